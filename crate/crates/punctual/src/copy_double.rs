//! The doubled copy over a base copy with isomorphism `c`.
//!
//! Even numbers carry the base: `2c(0)` sits at position 0 and `2c(p)` at
//! position `2^p` for `p >= 1`. Between `2x` and `2S(x)` the chain runs
//!
//! ```text
//! 2x -> odd'(x) -> 2<x,0>+1 -> ... -> 2<x,k_x - 1>+1 -> 2S(x)
//! ```
//!
//! with `k_{c(0)} = 0` and `k_{c(p)} = 2^p - 2`, and `odd'` enumerates
//! `{ 2<x,i>+1 : i >= k_x }` increasingly. Deciding `i >= k_x` only needs
//! `c(0..=log2(i+2))`, which keeps both successor and doubling cheap.

use std::sync::Mutex;

use num_traits::{One, ToPrimitive, Zero};

use crate::copies::{CopyError, ElementPrefix, PunctualCopy};
use crate::foundations::{pair, unpair};
use crate::nat::{is_even, two_x_plus_one, Nat};

#[derive(Debug)]
pub struct DoubleCopy<B> {
    base: B,
    prefix: ElementPrefix,
    odd_codes: Mutex<OddCodes>,
}

#[derive(Debug, Default)]
struct OddCodes {
    /// Codes `<x,i>` with `i >= k_x`, increasing.
    codes: Vec<Nat>,
    scanned: Nat,
}

impl<B: PunctualCopy> DoubleCopy<B> {
    /// `budget` caps how many base elements `c(0), c(1), ...` may be generated.
    pub fn new(base: B, budget: u64) -> Self {
        DoubleCopy {
            base,
            prefix: ElementPrefix::new(budget),
            odd_codes: Mutex::new(OddCodes::default()),
        }
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    /// `k_x` for `x = c(p)` with `p <= bound`.
    pub fn k_count(&self, x: &Nat, bound: u64) -> Result<Nat, CopyError> {
        let limit = bound.min(self.prefix.cap());
        match self.prefix.position_within(&self.base, x, limit)? {
            Some(0) => Ok(Nat::zero()),
            Some(p) => Ok((Nat::one() << p) - 2u32),
            None => Err(CopyError::NotFoundWithinBudget {
                element: x.clone(),
                budget: limit,
            }),
        }
    }

    /// `i >= k_x`, i.e. `x = c(p)` for some `p` with `max(2^p, 2) <= i + 2`.
    fn at_least_k(&self, x: &Nat, i: &Nat) -> Result<bool, CopyError> {
        let p_max = (i + 2u32).bits() - 1;
        if p_max > self.prefix.cap() {
            return Err(CopyError::BudgetExceeded {
                requested: Nat::from(p_max),
                budget: self.prefix.cap(),
            });
        }
        Ok(self.prefix.position_within(&self.base, x, p_max)?.is_some())
    }

    /// `k_x = 0` exactly for `c(0)` and `c(1)`.
    fn k_is_zero(&self, x: &Nat) -> Result<bool, CopyError> {
        Ok(self.prefix.position_within(&self.base, x, 1)?.is_some())
    }

    fn is_odd_code(&self, z: &Nat) -> Result<bool, CopyError> {
        let (x, i) = unpair(z);
        self.at_least_k(&x, &i)
    }

    fn scan_while<P: Fn(&OddCodes) -> bool>(
        &self,
        keep_going: P,
    ) -> Result<std::sync::MutexGuard<'_, OddCodes>, CopyError> {
        let mut table = self.odd_codes.lock().expect("odd table lock poisoned");
        while keep_going(&table) {
            let z = table.scanned.clone();
            if self.is_odd_code(&z)? {
                table.codes.push(z);
            }
            table.scanned += 1u32;
        }
        Ok(table)
    }

    /// `odd'(m)`.
    pub fn odd_enum(&self, m: &Nat) -> Result<Nat, CopyError> {
        let idx = m
            .to_usize()
            .ok_or_else(|| CopyError::TooLarge(format!("odd'({m})")))?;
        let table = self.scan_while(|t| t.codes.len() <= idx)?;
        Ok(two_x_plus_one(&table.codes[idx]))
    }

    /// The `m` with `odd'(m) = 2z+1`, given that `z` is an odd-set code.
    fn odd_index(&self, z: &Nat) -> Result<Nat, CopyError> {
        let table = self.scan_while(|t| &t.scanned <= z)?;
        let idx = table
            .codes
            .binary_search(z)
            .expect("caller checked membership");
        Ok(Nat::from(idx))
    }

    pub fn successor_d(&self, n: &Nat) -> Result<Nat, CopyError> {
        if is_even(n) {
            return self.odd_enum(&(n >> 1u32));
        }
        let z = n >> 1u32;
        let (x, i) = unpair(&z);
        if !self.at_least_k(&x, &i)? {
            let next = &i + 1u32;
            if self.at_least_k(&x, &next)? {
                // i + 1 = k_x: the gap after 2x is exhausted
                Ok(self.base.successor(&x)? << 1u32)
            } else {
                Ok(two_x_plus_one(&pair(&x, &next)))
            }
        } else {
            let m = self.odd_index(&z)?;
            if self.k_is_zero(&m)? {
                Ok(self.base.successor(&m)? << 1u32)
            } else {
                Ok(two_x_plus_one(&pair(&m, &Nat::zero())))
            }
        }
    }

    /// The image of `x -> 2x`.
    pub fn double_d(&self, n: &Nat) -> Result<Nat, CopyError> {
        if is_even(n) {
            let x = n >> 1u32;
            if x == self.base.origin() {
                return Ok(n.clone());
            }
            return Ok(self.base.successor(&x)? << 1u32);
        }
        let z = n >> 1u32;
        let (x, i) = unpair(&z);
        if !self.at_least_k(&x, &i)? {
            // 2<x,i>+1 at 2^p + i + 2 doubles to 2^(p+1) + 2i + 4
            let sx = self.base.successor(&x)?;
            Ok(two_x_plus_one(&pair(&sx, &(i * 2u32 + 2u32))))
        } else {
            let m = self.odd_index(&z)?;
            let y = self.base.successor(&m)?;
            if self.k_is_zero(&y)? {
                Ok(y << 1u32)
            } else {
                Ok(two_x_plus_one(&pair(&y, &Nat::zero())))
            }
        }
    }
}

impl<B: PunctualCopy> PunctualCopy for DoubleCopy<B> {
    fn name(&self) -> String {
        format!("copy-double({})", self.base.name())
    }

    fn origin(&self) -> Nat {
        self.base.origin() << 1u32
    }

    fn successor(&self, x: &Nat) -> Result<Nat, CopyError> {
        self.successor_d(x)
    }
}
