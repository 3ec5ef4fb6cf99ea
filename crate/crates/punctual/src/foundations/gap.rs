//! Gap sequences: strictly increasing sequences with a decidable range.
//!
//! Providers keep the feasible prefix of their values in a table built at
//! construction. Any index past that prefix denotes a value too large to
//! materialize, so capped queries answer "above the bound" for it.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::nat::{nat, Nat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GapError {
    #[error("index {index} is outside the feasible range of provider `{provider}`")]
    InfeasibleIndex { provider: &'static str, index: u64 },
    #[error("unknown gap provider `{0}`")]
    UnknownProvider(String),
}

pub trait GapSequence: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// The materializable prefix `a_0, a_1, ...`.
    fn table(&self) -> &[Nat];

    fn value(&self, n: u64) -> Result<Nat, GapError> {
        usize::try_from(n)
            .ok()
            .and_then(|i| self.table().get(i))
            .cloned()
            .ok_or(GapError::InfeasibleIndex {
                provider: self.name(),
                index: n,
            })
    }

    /// `Some(a_n)` when `a_n <= bound`, `None` when `a_n > bound`.
    fn value_at_most(&self, n: u64, bound: &Nat) -> Option<Nat> {
        let v = self.table().get(usize::try_from(n).ok()?)?;
        (v <= bound).then(|| v.clone())
    }

    /// The `n` with `a_n = k`, if any.
    fn index_of(&self, k: &Nat) -> Option<u64> {
        let mut n = 0u64;
        while let Some(v) = self.value_at_most(n, k) {
            if &v == k {
                return Some(n);
            }
            n += 1;
        }
        None
    }

    /// `a^{-1}(k)`: the index of `k`, or 0 outside the range.
    fn inverse(&self, k: &Nat) -> u64 {
        self.index_of(k).unwrap_or(0)
    }

    fn contains(&self, k: &Nat) -> bool {
        self.index_of(k).is_some()
    }

    /// `#{n : a_n <= y}`.
    fn count_at_most(&self, y: &Nat) -> u64 {
        let mut n = 0u64;
        while self.value_at_most(n, y).is_some() {
            n += 1;
        }
        n
    }
}

/// `a_n = 2^^(n+1)`: 2, 4, 16, 65536, 2^65536.
#[derive(Debug, Clone)]
pub struct Tower {
    values: Vec<Nat>,
}

impl Tower {
    /// Largest index whose value is materialized.
    pub const FEASIBLE_MAX: u64 = 4;

    pub fn new() -> Self {
        let mut values = vec![nat(2)];
        for _ in 0..Self::FEASIBLE_MAX {
            let exp = values
                .last()
                .unwrap()
                .to_u64()
                .expect("tower exponent fits");
            let mut next = Nat::zero();
            next.set_bit(exp, true);
            values.push(next);
        }
        Tower { values }
    }
}

impl Default for Tower {
    fn default() -> Self {
        Self::new()
    }
}

impl GapSequence for Tower {
    fn name(&self) -> &'static str {
        "tower"
    }

    fn table(&self) -> &[Nat] {
        &self.values
    }
}

/// `a_n = A(n, n)` for the two-argument Ackermann function: 1, 3, 7, 61.
/// `A(4, 4)` exceeds every number that fits in memory.
#[derive(Debug, Clone)]
pub struct AckermannDiagonal {
    values: Vec<Nat>,
}

impl AckermannDiagonal {
    pub const FEASIBLE_MAX: u64 = 3;

    pub fn new() -> Self {
        let values = (0..=Self::FEASIBLE_MAX)
            .map(|n| nat(ackermann(n, n)))
            .collect();
        AckermannDiagonal { values }
    }
}

impl Default for AckermannDiagonal {
    fn default() -> Self {
        Self::new()
    }
}

impl GapSequence for AckermannDiagonal {
    fn name(&self) -> &'static str {
        "ackermann-diagonal"
    }

    fn table(&self) -> &[Nat] {
        &self.values
    }
}

/// Ackermann-Peter function on an explicit stack; only for small arguments.
pub fn ackermann(m: u64, n: u64) -> u64 {
    let mut stack = vec![m];
    let mut n = n;
    while let Some(m) = stack.pop() {
        if m == 0 {
            n += 1;
        } else if n == 0 {
            stack.push(m - 1);
            n = 1;
        } else {
            stack.push(m - 1);
            stack.push(m);
            n -= 1;
        }
    }
    n
}

/// Names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderName {
    Tower,
    AckermannDiagonal,
}

impl ProviderName {
    pub fn build(self) -> Arc<dyn GapSequence> {
        match self {
            ProviderName::Tower => Arc::new(Tower::new()),
            ProviderName::AckermannDiagonal => Arc::new(AckermannDiagonal::new()),
        }
    }
}

impl FromStr for ProviderName {
    type Err = GapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tower" => Ok(ProviderName::Tower),
            "ackermann-diagonal" => Ok(ProviderName::AckermannDiagonal),
            other => Err(GapError::UnknownProvider(other.to_string())),
        }
    }
}

impl fmt::Display for ProviderName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProviderName::Tower => "tower",
            ProviderName::AckermannDiagonal => "ackermann-diagonal",
        })
    }
}

/// `2 ^^ height` for tiny heights, as an independent check on the tower table.
pub fn tetrate_two(height: u32) -> Nat {
    let mut v = Nat::one();
    for _ in 0..height {
        let e = v.to_u64().expect("tetration height too large");
        v = Nat::one() << e;
    }
    v
}
