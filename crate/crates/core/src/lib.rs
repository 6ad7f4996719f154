//! Equitable list coloring of star forests.

pub mod canon;
pub mod choosability;
pub mod closed_form;
pub mod error;
pub mod gadgets;
pub mod greedy;
pub mod model;
pub mod reduction;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    is_equitable_k_coloring, is_equitable_l_coloring, is_proper, rho, Color, Coloring, EquityCap,
    ListAssignment, StarForest, VertexId,
};
pub use solver::{leaf_assignment, solve, solve_center_fixed, solve_with, SolveOutcome, Strategy};
pub use canon::{
    canonicalize, canonicalize_with_symmetry, enumerate_canonical, is_canonical, sample_assignment,
    CanonicalAssignment, EnumerateOptions, EnumerationManifest, EnumerationStatus, Symmetry,
};
pub use choosability::{
    find_counterexample, is_equitably_k_choosable, Budget, ChoosabilityOptions, ChoosabilityReport,
    Counterexample, Mode, Verdict,
};
pub use closed_form::{fired_rules, status, Rule, Status};
pub use gadgets::{verify_gadget, Gadget};
pub use greedy::{
    lemma_reduce_color, post_greedy_disposition, rebalance, run_eps_greedy, theorem_main_color,
    Disposition, GreedyOutcome, MainOutcome, MainPath,
};
