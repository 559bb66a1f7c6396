//! Spanning-circuit solvers for regular matroids given as conflict trees of
//! graphic, cographic and R10-derived pieces.

pub mod ctse;
pub mod decomp;
pub mod emwc;
pub mod gf2;
pub mod graph;
pub mod matroid;
pub mod solvers;
pub mod toolkit;

pub use decomp::{compose, sum, BasicNode, ConflictTree, DecompError, NodeKind, R10Edit, TreeEdge};
pub use gf2::{ElementSet, Gf2Matrix};
pub use graph::{Edge, GraphError, MultiGraph, VertexCut};
pub use matroid::{label_set, r10, BinaryMatroid, LabelSet, MatroidError};
pub use solvers::{
    solve_esc, solve_ewmsc, solve_sc, solve_wmsc, Constraint, Group, GroupOption, Pivot, Problem, SolveError,
    SolveOutcome, SolverOptions, TreeInstance,
};
