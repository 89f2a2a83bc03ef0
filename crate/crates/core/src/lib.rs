//! Random 2-SAT near its satisfiability threshold.
//!
//! The crate covers the whole pipeline from instance generation to
//! finite-size-scaling measurements:
//!
//! * [`formula`]: literals, clauses, the `F(n,m)` / `F(n,p)` ensembles, the
//!   coupled birthday process and DIMACS I/O.
//! * [`digraph`]: the implication digraph, strongly connected components and
//!   linear-time satisfiability.
//! * [`spine`]: the spine order parameter, backbones and the trimmed
//!   out-graph search.
//! * [`hourglass`]: hourglass verification, extraction and search.
//! * [`analytics`]: exact connected-graph counts and the component-size
//!   distributions derived from them.
//! * [`experiments`]: Monte Carlo estimators, window estimation, power-law
//!   fits and deterministic parallel sweeps.
//! * [`oracle`]: brute-force ground truth for small instances.

pub mod analytics;
pub mod digraph;
pub mod error;
pub mod experiments;
pub mod formula;
pub mod hourglass;
pub mod oracle;
pub mod seed;
pub mod spine;
pub mod stats;

pub use digraph::{is_satisfiable, satisfying_assignment, Condensation, ImplicationDigraph};
pub use error::{Error, Result};
pub use formula::{Clause, Ensemble, Formula, Literal, Var};
pub use spine::{spine, SpineReport};
