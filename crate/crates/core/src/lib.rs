//! Linear circuits over GF(2).
//!
//! A linear circuit is a DAG of fan-in-2 XOR gates computing `y = Ax` for a
//! Boolean matrix `A`. This crate builds such circuits, decides whether they
//! are cancellation-free (no gate ever relies on `a ⊕ a = 0`), finds minimum
//! circuits for small matrices by exhaustive search, and evaluates the lower
//! bounds known for the cancellation-free model.
//!
//! Modules:
//!
//! - [`gf2`]: bit-packed vectors and matrices, rank and determinant.
//! - [`circuit`]: the circuit DAG, value vectors, evaluation, gate
//!   elimination and the straight-line-program text format.
//! - [`cfcheck`]: three independent cancellation-freeness deciders.
//! - [`synth`]: explicit constructions and heuristic synthesizers.
//! - [`oracle`]: iterative-deepening minimum circuit search.
//! - [`bounds`]: Mehlhorn-style bound, `K_{a,b}`-freeness, counting bound.
//! - [`gen`]: matrix generators (Sierpinski, prefix, Brown, random).

pub mod bounds;
pub mod cfcheck;
pub mod circuit;
mod error;
pub mod gen;
pub mod gf2;
pub mod oracle;
pub mod synth;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use circuit::{LinearCircuit, NodeRef};
