//! Pairing, gap sequences and the complement enumeration.

pub mod complement;
pub mod gap;
pub mod pairing;

pub use complement::ComplementEnum;
pub use gap::{AckermannDiagonal, GapError, GapSequence, ProviderName, Tower};
pub use pairing::{pair, unpair};
