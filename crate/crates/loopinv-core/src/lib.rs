//! Exact closed-form solving of loop recurrences and computation of the full
//! polynomial invariant ideal of single-path loops.
//!
//! The pipeline: parse a straight-line loop, extract one linear recurrence
//! per variable, solve each recurrence into a sum of hypergeometric terms
//! (constant-coefficient solving plus hypergeometric solution search), then
//! present every variable as a rational function in the loop counter,
//! exponential variables and falling-factorial variables, and eliminate the
//! auxiliaries with a Groebner basis to obtain a finite basis of all
//! polynomial invariants. An exact interpreter replays the loop to check
//! every emitted invariant independently of the algebra stack.

pub mod closedform;
pub mod extract;
pub mod frontend;
pub mod groebner;
pub mod hyper;
pub mod interp;
pub mod lattice;
pub mod linsys;
pub mod multipoly;
pub mod order;
pub mod ore;
pub mod pipeline;
pub mod ratfunc;
pub mod rational;
pub mod recurrence;
pub mod relations;
pub mod solver;
pub mod unipoly;
pub mod vars;

pub use closedform::ClosedForm;
pub use hyper::{FactorialFactor, GpForm, HypergeometricTerm};
pub use lattice::ExponentLattice;
pub use linsys::{LinearSolution, PolyFraction};
pub use groebner::{IdealBasis, IdealError};
pub use multipoly::MultiPoly;
pub use order::MonomialOrder;
pub use ore::OreOperator;
pub use pipeline::{CheckOutcome, InitValue, InvariantReport, PipelineConfig, PipelineError};
pub use ratfunc::RatFunc;
pub use rational::Rational;
pub use recurrence::Recurrence;
pub use solver::{SolveError, SolveStatus, SolverReport};
pub use unipoly::UniPoly;
pub use vars::{SymbolTable, VarId, VarKind};
