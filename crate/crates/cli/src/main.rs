use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use spancirc::ctse::{solve_ctse_verified, CtseInstance};
use spancirc::emwc::{solve_emwc, EmwcError, EmwcInstance};
use spancirc::toolkit::{
    gen_clique_reduction, gen_random_graph, gen_random_tree, parse_graph, parse_tree, write_graph, write_matrix,
    write_tree, FormatError, InstanceDoc, TreeDoc,
};
use spancirc::{compose, solve_sc, solve_wmsc, ConflictTree, LabelSet, MultiGraph, SolveError, SolverOptions};

#[derive(Parser)]
#[command(
    name = "spancirc",
    version,
    about = "Spanning circuit solvers for conflict trees of regular matroids"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimum weight circuit through the terminals, total weight at most the budget.
    SolveMsc(TreeArgs),
    /// Any circuit through the terminals.
    SolveSc(TreeArgs),
    /// Minimal edge cut through the terminal edges separating R1 from R2.
    SolveEmwc(EmwcArgs),
    /// Cheapest cycle through the terminal edges.
    SolveCtse(GraphArgs),
    /// Print the composed matroid as a matrix file.
    Compose {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Check that a conflict tree is well formed.
    ValidateTree {
        #[arg(long)]
        tree: PathBuf,
    },
    #[command(subcommand)]
    Gen(GenCmd),
    /// Re-check a witness file against an instance file.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Args)]
struct TreeArgs {
    /// Conflict tree JSON.
    #[arg(long, conflicts_with = "instance", required_unless_present = "instance")]
    tree: Option<PathBuf>,
    /// Instance JSON (kind wmsc or scir).
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    terminals: Vec<String>,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph text file.
    #[arg(long, conflicts_with = "instance", required_unless_present = "instance")]
    graph: Option<PathBuf>,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    terminals: Vec<String>,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct EmwcArgs {
    #[command(flatten)]
    base: GraphArgs,
    /// Vertices that must stay on the first side.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    r1: Vec<String>,
    /// Vertices that must stay on the second side.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    r2: Vec<String>,
}

#[derive(Subcommand)]
enum GenCmd {
    /// A random conflict tree, or with --graph a random connected graph.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        nodes: usize,
        #[arg(long, default_value_t = 16)]
        size: usize,
        /// Emit a graph file with this many vertices instead of a tree.
        #[arg(long)]
        graph: Option<usize>,
        #[arg(long, default_value_t = 3)]
        extra: usize,
        #[arg(long, default_value_t = 3)]
        max_weight: u64,
    },
    /// The hardness reduction from multicolored clique, as a wmsc instance.
    CliqueReduction {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// One color class per flag, vertices comma separated.
        #[arg(long = "part", required = true)]
        parts: Vec<String>,
    },
}

/// Failures that end the run, by exit code.
enum Failure {
    Usage(anyhow::Error),
    Invariant(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Invariant(_) | SolveError::Emwc(EmwcError::Invariant(_)) => Failure::Invariant(e.into()),
            e => Failure::Usage(e.into()),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Usage(e.into())
    }
}

impl From<EmwcError> for Failure {
    fn from(e: EmwcError) -> Self {
        SolveError::from(e).into()
    }
}

type Run = Result<String, Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_tree(path: &Path) -> anyhow::Result<ConflictTree> {
    parse_tree(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_graph(path: &Path) -> anyhow::Result<MultiGraph> {
    parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<InstanceDoc> {
    InstanceDoc::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn labels(v: &[String]) -> LabelSet {
    v.iter().filter(|s| !s.is_empty()).cloned().collect()
}

fn verdict(found: Option<(&LabelSet, u64)>) -> String {
    match found {
        None => "NO\n".into(),
        Some((c, w)) => {
            let mut s = format!("YES weight={w}\n");
            for l in c {
                let _ = writeln!(s, "{l}");
            }
            s
        }
    }
}

fn tree_instance(a: &TreeArgs, want_budget: bool) -> anyhow::Result<(ConflictTree, LabelSet, Option<u64>)> {
    let (tree, terminals, budget) = match (&a.tree, &a.instance) {
        (Some(t), _) => (load_tree(t)?, labels(&a.terminals), a.budget),
        (None, Some(i)) => match load_instance(i)? {
            InstanceDoc::Wmsc {
                tree,
                terminals,
                budget,
            } => (tree.to_tree()?, terminals, Some(budget)),
            InstanceDoc::Scir { tree, terminals } => (tree.to_tree()?, terminals, None),
            other => return Err(anyhow!("expected a wmsc or scir instance, found {}", other.kind_name())),
        },
        (None, None) => return Err(anyhow!("either --tree or --instance is required")),
    };
    if want_budget && budget.is_none() {
        return Err(anyhow!("--budget is required"));
    }
    tree.validate().context("invalid conflict tree")?;
    Ok((tree, terminals, budget))
}

/// Graph, terminals, budget and the two side constraints.
type GraphInput = (MultiGraph, LabelSet, u64, Vec<String>, Vec<String>);

fn graph_instance(a: &GraphArgs, want: &str) -> anyhow::Result<GraphInput> {
    match (&a.graph, &a.instance) {
        (Some(g), _) => {
            let budget = a.budget.ok_or_else(|| anyhow!("--budget is required"))?;
            Ok((load_graph(g)?, labels(&a.terminals), budget, Vec::new(), Vec::new()))
        }
        (None, Some(i)) => match (load_instance(i)?, want) {
            (
                InstanceDoc::Emwc {
                    graph,
                    terminals,
                    r1,
                    r2,
                    budget,
                },
                "emwc",
            ) => Ok((graph.to_graph()?, terminals, budget, r1, r2)),
            (
                InstanceDoc::Ctse {
                    graph,
                    terminals,
                    budget,
                },
                "ctse",
            ) => Ok((graph.to_graph()?, terminals, budget, Vec::new(), Vec::new())),
            (other, _) => Err(anyhow!("expected a {want} instance, found {}", other.kind_name())),
        },
        (None, None) => Err(anyhow!("either --graph or --instance is required")),
    }
}

fn emwc_instance(a: &EmwcArgs) -> Result<EmwcInstance, Failure> {
    let (g, terminals, k, mut r1, mut r2) = graph_instance(&a.base, "emwc")?;
    r1.extend(a.r1.iter().filter(|s| !s.is_empty()).cloned());
    r2.extend(a.r2.iter().filter(|s| !s.is_empty()).cloned());
    let inst = EmwcInstance::from_names(g, terminals, &r1, &r2, k).map_err(|e| Failure::Usage(e.into()))?;
    inst.check().map_err(|e| Failure::Usage(e.into()))?;
    Ok(inst)
}

fn ctse_instance(a: &GraphArgs) -> Result<CtseInstance, Failure> {
    let (g, terminals, k, _, _) = graph_instance(a, "ctse")?;
    if let Some(t) = terminals.iter().find(|t| g.edge_by_label(t).is_none()) {
        return Err(anyhow!("unknown terminal edge `{t}`").into());
    }
    Ok(CtseInstance::new(g, terminals, k))
}

fn extra_weight(g: &MultiGraph, terminals: &LabelSet, c: &LabelSet) -> u64 {
    c.iter()
        .filter(|l| !terminals.contains(*l))
        .filter_map(|l| g.edge_by_label(l))
        .map(|e| e.weight)
        .sum()
}

/// Cheapest feasible cut: the budget is lowered below each witness until none is left.
fn emwc_optimum(inst: &EmwcInstance) -> Result<Option<(LabelSet, u64)>, Failure> {
    let opts = SolverOptions::default().emwc;
    let mut cur = inst.clone();
    let mut best = None;
    while let Some(c) = solve_emwc(&cur, &opts)? {
        if !inst.verify(&c) {
            return Err(Failure::Invariant(anyhow!("cut {c:?} fails the feasibility check")));
        }
        let w = extra_weight(&inst.graph, &inst.terminals, &c);
        best = Some((c, w));
        if w == 0 {
            break;
        }
        cur.k = w - 1;
    }
    Ok(best)
}

fn parse_witness(text: &str) -> anyhow::Result<Option<LabelSet>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).peekable();
    match lines.peek() {
        Some(&"NO") => return Ok(None),
        Some(l) if l.starts_with("YES") => {
            lines.next();
        }
        _ => {}
    }
    let mut out = LabelSet::new();
    for l in lines {
        if l.contains(char::is_whitespace) {
            return Err(anyhow!("witness line `{l}` is not a single label"));
        }
        out.insert(l.to_string());
    }
    Ok(Some(out))
}

fn verify(instance: &Path, witness: &Path) -> Run {
    let doc = load_instance(instance)?;
    let Some(c) = parse_witness(&read(witness)?)? else {
        return Ok(verdict(None));
    };
    let found = match doc {
        InstanceDoc::Wmsc {
            tree,
            terminals,
            budget,
        } => {
            let tree = tree.to_tree()?;
            tree.validate().context("invalid conflict tree")?;
            let m = compose(&tree).map_err(SolveError::from)?;
            let weights = tree.weights();
            let w: u64 = c.iter().map(|l| weights.get(l).copied().unwrap_or(0)).sum();
            (m.is_circuit_labels(&c) && terminals.is_subset(&c) && w <= budget).then_some(w)
        }
        InstanceDoc::Scir { tree, terminals } => {
            let tree = tree.to_tree()?;
            tree.validate().context("invalid conflict tree")?;
            let m = compose(&tree).map_err(SolveError::from)?;
            (m.is_circuit_labels(&c) && terminals.is_subset(&c)).then_some(c.len() as u64)
        }
        InstanceDoc::Emwc {
            graph,
            terminals,
            r1,
            r2,
            budget,
        } => {
            let g = graph.to_graph()?;
            let inst =
                EmwcInstance::from_names(g, terminals, &r1, &r2, budget).map_err(|e| Failure::Usage(e.into()))?;
            inst.verify(&c).then(|| extra_weight(&inst.graph, &inst.terminals, &c))
        }
        InstanceDoc::Ctse {
            graph,
            terminals,
            budget,
        } => {
            let inst = CtseInstance::new(graph.to_graph()?, terminals, budget);
            inst.verify(&c).then(|| inst.extra_weight(&c))
        }
        other => return Err(anyhow!("cannot verify a witness against a {} document", other.kind_name()).into()),
    };
    Ok(verdict(found.map(|w| (&c, w))))
}

fn gen(cmd: &GenCmd) -> Run {
    match cmd {
        GenCmd::Random {
            seed,
            nodes,
            size,
            graph,
            extra,
            max_weight,
        } => match graph {
            Some(n) if *n == 0 => Err(anyhow!("--graph needs at least one vertex").into()),
            Some(n) => Ok(write_graph(&gen_random_graph(*seed, *n, *extra, *max_weight))),
            None if *nodes == 0 || *size == 0 => Err(anyhow!("--nodes and --size must be positive").into()),
            None => Ok(write_tree(&gen_random_tree(*seed, *nodes, *size))),
        },
        GenCmd::CliqueReduction { graph, k, parts } => {
            let g = load_graph(graph)?;
            let partition: Vec<Vec<String>> = parts
                .iter()
                .map(|p| p.split(',').filter(|s| !s.is_empty()).map(String::from).collect())
                .collect();
            let red = gen_clique_reduction(&g, *k, &partition).context("clique reduction")?;
            let doc = InstanceDoc::Wmsc {
                tree: TreeDoc::from_tree(&red.tree()),
                terminals: red.terminals.clone(),
                budget: red.ell,
            };
            Ok(doc.write())
        }
    }
}

fn run(cli: Cli) -> Run {
    let opts = SolverOptions::default();
    match cli.cmd {
        Cmd::SolveMsc(a) => {
            let (tree, terminals, budget) = tree_instance(&a, true)?;
            let out = solve_wmsc(&tree, &terminals, budget.unwrap_or(0), &opts)?;
            Ok(verdict(out.witness.as_ref().zip(out.weight)))
        }
        Cmd::SolveSc(a) => {
            let (tree, terminals, _) = tree_instance(&a, false)?;
            let out = solve_sc(&tree, &terminals, &opts)?;
            Ok(verdict(out.witness.as_ref().zip(out.weight)))
        }
        Cmd::SolveEmwc(a) => {
            let inst = emwc_instance(&a)?;
            let best = emwc_optimum(&inst)?;
            Ok(verdict(best.as_ref().map(|(c, w)| (c, *w))))
        }
        Cmd::SolveCtse(a) => {
            let inst = ctse_instance(&a)?;
            let found = solve_ctse_verified(&inst, opts.ctse).map_err(|e| Failure::Invariant(anyhow!(e)))?;
            Ok(verdict(found.as_ref().map(|c| (c, inst.extra_weight(c)))))
        }
        Cmd::Compose { tree } => {
            let t = load_tree(&tree)?;
            t.validate().context("invalid conflict tree")?;
            Ok(write_matrix(&compose(&t).map_err(SolveError::from)?))
        }
        Cmd::ValidateTree { tree } => Ok(match load_tree(&tree)?.validate() {
            Ok(()) => "VALID\n".into(),
            Err(e) => format!("INVALID {e}\n"),
        }),
        Cmd::Gen(g) => gen(&g),
        Cmd::Verify { instance, witness } => verify(&instance, &witness),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    // A panic anywhere below is a broken invariant, not a usage problem.
    let result = std::panic::catch_unwind(|| run(cli)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(Failure::Invariant(anyhow!("panic: {msg}")))
    });
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}
