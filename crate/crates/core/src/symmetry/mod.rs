//! Syntactic symmetries of DQBF formulas.
//!
//! A symmetry permutes literals so that complements map to complements, the
//! clause multiset is preserved, and every variable maps to one of the same
//! quantifier kind and the same dependency set. They are found as
//! automorphisms of a colored literal/clause graph, verified against the
//! formula, and used for lex-leader breakers and clause orbits.

mod breaker;
mod graph;
mod orbits;
mod perm;
mod search;

pub use breaker::{build_lex_breaker, BreakerError, BreakerMode};
pub use graph::{build_symmetry_graph, ColoredGraph};
pub use orbits::{clause_orbits, ClauseOrbit, ClauseOrbits};
pub use perm::{verify_symmetry, LitPerm, SymGenerator, SymmetryViolation};
pub use search::{find_automorphisms, find_generators, GeneratorSet, SearchBudget};

/// One generator per line in cycle notation.
pub fn dump_generators(gens: &[SymGenerator]) -> String {
    gens.iter().map(|g| format!("{g}\n")).collect()
}
