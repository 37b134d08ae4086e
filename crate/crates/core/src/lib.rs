//! Preprocessing and solver-development toolkit for dependency quantified
//! Boolean formulas (DQBF).
//!
//! * [`model`]: formula types and the DQDIMACS format.
//! * [`oracle`]: brute-force semantics used as ground truth.
//! * [`sat`]: propositional backend (built-in DPLL, external DIMACS solvers).
//! * [`autarky`]: autarky detection, lean-kernel reduction, certificates.
//! * [`symmetry`]: syntactic symmetry detection and lex-leader breaking.
//! * [`fuzz`]: random instance generation and solver campaigns.
//! * [`ddmin`]: delta debugging of failure-inducing instances.
//! * [`cli`]: the `dqprep` command line.

pub mod autarky;
pub mod cli;
pub mod ddmin;
pub mod fuzz;
pub mod model;
pub mod oracle;
pub mod par;
pub mod process;
pub mod sat;
pub mod symmetry;

pub use model::{Clause, DqbfFormula, Lit, Prefix, Var};
