//! Exhaustive solvers for strategy-stealing games.
//!
//! The crate covers three game classes and the reductions between them:
//!
//! * [`poset`]: poset games (Chomp, Nim, arbitrary finite orders), Grundy
//!   values and the add-minimum construction.
//! * [`hex`]: Hex boards, connectivity checks and a small-board solver.
//! * [`makermaker`]: Maker-Maker games with explicit, predicate or circuit
//!   winning families, symmetry and draw-freeness certificates.
//! * [`reduction`]: the two-board Hex to Maker-Maker construction and its
//!   exhaustive verifier.
//!
//! All of them are solved by the memoized backward-induction search in
//! [`engine`].

pub mod engine;
pub mod error;
pub mod hex;
pub mod makermaker;
pub mod poset;
pub mod reduction;

pub use engine::{Game, Move, Outcome, Seat, SolveReport, Solver, SolverConfig};
pub use error::{Error, Result};
