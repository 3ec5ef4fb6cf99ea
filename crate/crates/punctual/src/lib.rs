//! Punctual copies of the successor structure `(N, S)` and the constructions
//! around them: gap-sequence copies, doubled copies, binary lifts, the
//! eventual-domination calculus of exponential terms, stage-based
//! mainland-island diagonalizations, and cycle structures.

pub mod binary_lift;
pub mod copies;
pub mod copy_double;
pub mod copy_gap;
pub mod cycles;
pub mod foundations;
pub mod island;
pub mod levitz;
pub mod nat;

pub use nat::Nat;
