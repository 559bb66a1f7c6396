//! Exhaustive oracles, instance generators and file formats.

pub mod format;
pub mod gen;
pub mod oracle;

pub use format::{
    parse_graph, parse_matrix, parse_tree, write_graph, write_matrix, write_tree, FormatError, GraphDoc, InstanceDoc,
    MatrixDoc, NodeDoc, TreeDoc, FORMAT_VERSION,
};
pub use gen::{gen_clique_reduction, gen_random_graph, gen_random_tree, gen_regular_graph, CliqueReduction, GenError};
pub use oracle::{
    oracle_circuits, oracle_constraint, oracle_ctse, oracle_emwc, oracle_sc, oracle_wmsc, OracleError,
    ORACLE_ELEMENT_CAP, ORACLE_VERTEX_CAP,
};
