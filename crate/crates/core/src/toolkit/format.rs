//! File formats: line-oriented graph text, GF(2) matrix text, and JSON documents for
//! conflict trees and instances. Every format carries `format: 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomp::{BasicNode, ConflictTree, DecompError, NodeKind, R10Edit, TreeEdge};
use crate::gf2::Gf2Matrix;
use crate::graph::{GraphError, MultiGraph};
use crate::matroid::{BinaryMatroid, LabelSet, MatroidError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("invalid json")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

/// Non-empty, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn expect_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<(), FormatError> {
    let (no, line) = lines.next().ok_or_else(|| parse_err(1, "missing `format: 1` header"))?;
    let v = line
        .strip_prefix("format:")
        .ok_or_else(|| parse_err(no, "expected `format: 1` header"))?
        .trim()
        .parse::<u32>()
        .map_err(|_| parse_err(no, "bad format version"))?;
    if v != FORMAT_VERSION {
        return Err(FormatError::Version(v));
    }
    Ok(())
}

fn default_format() -> u32 {
    FORMAT_VERSION
}

fn check_version(v: u32) -> Result<(), FormatError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(FormatError::Version(v))
    }
}

/// Reads `v <id>` and `e <label> <u> <v> <weight>` lines. Edge endpoints not declared
/// by a `v` line are added on first use.
pub fn parse_graph(text: &str) -> Result<MultiGraph, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines)?;
    let mut g = MultiGraph::new();
    for (no, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.as_slice() {
            ["v", id] => {
                g.add_vertex(id).map_err(|e| parse_err(no, e.to_string()))?;
            }
            ["e", label, u, v, w] => {
                let w: u64 = w.parse().map_err(|_| parse_err(no, format!("bad weight `{w}`")))?;
                if w == 0 {
                    return Err(parse_err(no, "weights must be at least 1"));
                }
                let (u, v) = (g.ensure_vertex(u), g.ensure_vertex(v));
                g.add_edge(label, u, v, w).map_err(|e| parse_err(no, e.to_string()))?;
            }
            _ => return Err(parse_err(no, format!("unrecognized line `{line}`"))),
        }
    }
    Ok(g)
}

pub fn write_graph(g: &MultiGraph) -> String {
    let mut out = format!("format: {FORMAT_VERSION}\n");
    for v in g.vertex_names() {
        out.push_str(&format!("v {v}\n"));
    }
    for e in g.edges() {
        out.push_str(&format!(
            "e {} {} {} {}\n",
            e.label,
            g.vertex_name(e.u),
            g.vertex_name(e.v),
            e.weight
        ));
    }
    out
}

/// Reads a `rows cols` header, the 0/1 rows (digits may be space separated) and a
/// line of column labels.
pub fn parse_matrix(text: &str) -> Result<BinaryMatroid, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines)?;
    let (no, dims) = lines.next().ok_or_else(|| parse_err(1, "missing `rows cols` line"))?;
    let d: Vec<usize> = dims
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| parse_err(no, format!("bad dimension `{x}`"))))
        .collect::<Result<_, _>>()?;
    let [rows, cols] = d[..] else {
        return Err(parse_err(no, "expected `rows cols`"));
    };
    let mut data = Vec::with_capacity(rows);
    // Rows of a matrix without columns are empty lines, so they are implicit.
    for _ in 0..if cols == 0 { 0 } else { rows } {
        let (no, line) = lines.next().ok_or_else(|| parse_err(no, "missing matrix row"))?;
        let row: Vec<u8> = line
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(parse_err(no, format!("bad matrix entry `{c}`"))),
            })
            .collect::<Result<_, _>>()?;
        if row.len() != cols {
            return Err(parse_err(no, format!("row has {} entries, expected {cols}", row.len())));
        }
        data.push(row);
    }
    let labels: Vec<String> = match lines.next() {
        Some((_, l)) => l.split_whitespace().map(str::to_string).collect(),
        None if cols == 0 => Vec::new(),
        None => return Err(parse_err(no, "missing label line")),
    };
    if let Some((no, _)) = lines.next() {
        return Err(parse_err(no, "trailing content after label line"));
    }
    let m = if rows == 0 || cols == 0 {
        Gf2Matrix::zeros(rows, cols)
    } else {
        Gf2Matrix::from_rows(&data)
    };
    Ok(BinaryMatroid::new(m, labels)?)
}

pub fn write_matrix(m: &BinaryMatroid) -> String {
    let a = m.matrix();
    let mut out = format!("format: {FORMAT_VERSION}\n{} {}\n", a.rows(), a.cols());
    for row in a.to_rows().into_iter().filter(|_| a.cols() > 0) {
        let r: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&r.join(" "));
        out.push('\n');
    }
    out.push_str(&m.labels().join(" "));
    out.push('\n');
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub label: String,
    pub u: String,
    pub v: String,
    pub weight: u64,
}

/// A graph inside a JSON document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

impl GraphDoc {
    pub fn from_graph(g: &MultiGraph) -> Self {
        GraphDoc {
            vertices: g.vertex_names().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    label: e.label.clone(),
                    u: g.vertex_name(e.u).to_string(),
                    v: g.vertex_name(e.v).to_string(),
                    weight: e.weight,
                })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<MultiGraph, FormatError> {
        let mut g = MultiGraph::new();
        for v in &self.vertices {
            g.add_vertex(v)?;
        }
        for e in &self.edges {
            g.add_named_edge(&e.label, &e.u, &e.v, e.weight)?;
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NodeDoc {
    Graphic {
        graph: GraphDoc,
    },
    Cographic {
        graph: GraphDoc,
    },
    R10 {
        base_labels: Vec<String>,
        #[serde(default)]
        parallels: Vec<(String, String)>,
        #[serde(default)]
        deleted: Vec<String>,
        #[serde(default)]
        weights: BTreeMap<String, u64>,
    },
}

impl NodeDoc {
    pub fn from_node(n: &BasicNode) -> Self {
        match n.kind() {
            NodeKind::Graphic(g) => NodeDoc::Graphic {
                graph: GraphDoc::from_graph(g),
            },
            NodeKind::Cographic(g) => NodeDoc::Cographic {
                graph: GraphDoc::from_graph(g),
            },
            NodeKind::R10Derived(e) => NodeDoc::R10 {
                base_labels: e.base_labels.clone(),
                parallels: e.parallels.clone(),
                deleted: e.deleted.clone(),
                weights: e.weights.clone(),
            },
        }
    }

    pub fn to_node(&self) -> Result<BasicNode, FormatError> {
        Ok(match self {
            NodeDoc::Graphic { graph } => BasicNode::graphic(graph.to_graph()?),
            NodeDoc::Cographic { graph } => BasicNode::cographic(graph.to_graph()?),
            NodeDoc::R10 {
                base_labels,
                parallels,
                deleted,
                weights,
            } => BasicNode::new(NodeKind::R10Derived(R10Edit {
                base_labels: base_labels.clone(),
                parallels: parallels.clone(),
                deleted: deleted.clone(),
                weights: weights.clone(),
            }))?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdgeDoc {
    pub a: usize,
    pub b: usize,
    pub shared: LabelSet,
}

/// A conflict tree as JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDoc {
    #[serde(default = "default_format")]
    pub format: u32,
    #[serde(default)]
    pub root: usize,
    pub nodes: Vec<NodeDoc>,
    #[serde(default)]
    pub edges: Vec<TreeEdgeDoc>,
}

impl TreeDoc {
    pub fn from_tree(t: &ConflictTree) -> Self {
        TreeDoc {
            format: FORMAT_VERSION,
            root: t.root,
            nodes: t.nodes.iter().map(NodeDoc::from_node).collect(),
            edges: t
                .edges
                .iter()
                .map(|e| TreeEdgeDoc {
                    a: e.a,
                    b: e.b,
                    shared: e.shared.clone(),
                })
                .collect(),
        }
    }

    /// Builds the tree without validating it.
    pub fn to_tree(&self) -> Result<ConflictTree, FormatError> {
        check_version(self.format)?;
        Ok(ConflictTree {
            nodes: self.nodes.iter().map(NodeDoc::to_node).collect::<Result<_, _>>()?,
            edges: self
                .edges
                .iter()
                .map(|e| TreeEdge {
                    a: e.a,
                    b: e.b,
                    shared: e.shared.clone(),
                })
                .collect(),
            root: self.root,
        })
    }
}

pub fn parse_tree(text: &str) -> Result<ConflictTree, FormatError> {
    serde_json::from_str::<TreeDoc>(text)?.to_tree()
}

pub fn write_tree(t: &ConflictTree) -> String {
    let mut s = serde_json::to_string_pretty(&TreeDoc::from_tree(t)).expect("tree documents serialize");
    s.push('\n');
    s
}

/// A matrix inside a JSON document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: Vec<Vec<u8>>,
    pub cols: usize,
    pub labels: Vec<String>,
}

/// A self-describing instance file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceDoc {
    Graph {
        graph: GraphDoc,
    },
    Matroid {
        matrix: MatrixDoc,
    },
    ConflictTree {
        tree: TreeDoc,
    },
    Emwc {
        graph: GraphDoc,
        terminals: LabelSet,
        #[serde(default)]
        r1: Vec<String>,
        #[serde(default)]
        r2: Vec<String>,
        budget: u64,
    },
    Ctse {
        graph: GraphDoc,
        terminals: LabelSet,
        budget: u64,
    },
    Wmsc {
        tree: TreeDoc,
        terminals: LabelSet,
        budget: u64,
    },
    Scir {
        tree: TreeDoc,
        terminals: LabelSet,
    },
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: u32,
    #[serde(flatten)]
    doc: InstanceDoc,
}

impl InstanceDoc {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let env: Envelope = serde_json::from_str(text)?;
        check_version(env.format)?;
        Ok(env.doc)
    }

    pub fn write(&self) -> String {
        let env = Envelope {
            format: FORMAT_VERSION,
            doc: self.clone(),
        };
        let mut s = serde_json::to_string_pretty(&env).expect("instance documents serialize");
        s.push('\n');
        s
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            InstanceDoc::Graph { .. } => "graph",
            InstanceDoc::Matroid { .. } => "matroid",
            InstanceDoc::ConflictTree { .. } => "conflict-tree",
            InstanceDoc::Emwc { .. } => "emwc",
            InstanceDoc::Ctse { .. } => "ctse",
            InstanceDoc::Wmsc { .. } => "wmsc",
            InstanceDoc::Scir { .. } => "scir",
        }
    }
}

impl MatrixDoc {
    pub fn from_matroid(m: &BinaryMatroid) -> Self {
        MatrixDoc {
            rows: m.matrix().to_rows(),
            cols: m.len(),
            labels: m.labels().to_vec(),
        }
    }

    pub fn to_matroid(&self) -> Result<BinaryMatroid, FormatError> {
        if self
            .rows
            .iter()
            .any(|r| r.len() != self.cols || r.iter().any(|&x| x > 1))
        {
            return Err(parse_err(0, "matrix rows must be 0/1 vectors of length `cols`"));
        }
        let m = if self.rows.is_empty() {
            Gf2Matrix::zeros(0, self.cols)
        } else {
            Gf2Matrix::from_rows(&self.rows)
        };
        Ok(BinaryMatroid::new(m, self.labels.clone())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toolkit::gen::gen_random_tree;

    const TRIANGLE: &str = "format: 1\nv a\nv b\nv c\ne x a b 1\ne y b c 2\ne z c a 1\n";

    #[test]
    fn graph_text_round_trips() {
        let g = parse_graph(TRIANGLE).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(write_graph(&g), TRIANGLE);
    }

    #[test]
    fn graph_text_rejects_garbage() {
        assert!(parse_graph("v a\n").is_err());
        assert!(parse_graph("format: 2\n").is_err());
        assert!(parse_graph("format: 1\ne x a b zero\n").is_err());
        assert!(parse_graph("format: 1\ne x a b 0\n").is_err());
        assert!(parse_graph("format: 1\nq\n").is_err());
    }

    #[test]
    fn matrix_text_round_trips() {
        let m = crate::matroid::r10();
        let text = write_matrix(&m);
        let back = parse_matrix(&text).unwrap();
        assert_eq!(write_matrix(&back), text);
        assert_eq!(
            back.enumerate_circuit_labels().unwrap(),
            m.enumerate_circuit_labels().unwrap()
        );
        assert!(parse_matrix("format: 1\n1 2\n1 0\na\n").is_err());
    }

    #[test]
    fn tree_json_round_trips() {
        for seed in 0..20 {
            let t = gen_random_tree(seed, 3, 20);
            let text = write_tree(&t);
            let back = parse_tree(&text).unwrap();
            assert_eq!(back, t);
            assert_eq!(write_tree(&back), text);
        }
    }

    #[test]
    fn instance_json_round_trips() {
        let g = parse_graph(TRIANGLE).unwrap();
        let doc = InstanceDoc::Ctse {
            graph: GraphDoc::from_graph(&g),
            terminals: ["x".to_string()].into(),
            budget: 3,
        };
        let text = doc.write();
        assert!(text.contains("\"format\": 1"));
        assert_eq!(InstanceDoc::parse(&text).unwrap(), doc);
        assert_eq!(InstanceDoc::parse(&text).unwrap().write(), text);
        assert!(InstanceDoc::parse(&text.replace("\"format\": 1", "\"format\": 9")).is_err());
    }
}
