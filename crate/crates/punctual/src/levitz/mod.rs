//! The exponential class generated from `0`, `1`, `x` by `+`, `*`, `n^f` and
//! `x^f`: normal forms, the eventual-domination order and explicit witnesses.
//!
//! Every term is a sum of additive primes, every additive prime a product of
//! factors `u^e` with `u` a constant `>= 2` or `x` and `e` again an additive
//! prime. Sorting both lists descending gives canonical forms, and comparing
//! them lexicographically decides `f(x) < g(x)` for all large `x`.

mod magnitude;
mod normal;
mod term;
mod witness;

pub use magnitude::{confirm_domination, Magnitude, SweepReport};
pub use normal::{
    anf, check_mnf_conditions, cmp_anf, compare, mnf, set_anf, set_mnf, Anf, Base, Factor, Mnf,
    SetFactor,
};
pub use term::{parse_term, DigitCap, GodelCode, LevitzTerm};
pub use witness::{
    lemma_eps_bound_holds, lemma_prconv_holds, nu, omega, verify_witness, witness_d, Violation,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LevitzError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("constant base must be at least 1")]
    ZeroBase,
    #[error("Gödel code exceeds {cap_bits} bits")]
    CodeOverflow { cap_bits: u64 },
    #[error("value exceeds {cap_bits} bits")]
    EvalOverflow { cap_bits: u64 },
    #[error("normal form of `{0}` has a coefficient beyond the digit cap")]
    NormalFormOverflow(String),
    #[error("`{0}` is not an additive prime")]
    NotAdditivePrime(String),
    #[error("expected {expected:?} for `{left}` vs `{right}`, compare gave {found:?}")]
    ComparisonContractViolated {
        left: String,
        right: String,
        expected: std::cmp::Ordering,
        found: std::cmp::Ordering,
    },
    #[error("leading base of `{0}` is not a constant where the case requires one")]
    BaseGuard(String),
}
