//! The copy built from a gap sequence `a`.
//!
//! Block `n` of the copy is the chain
//!
//! ```text
//! a_n -> free(n) -> h(<n,0>) -> h(<n,1>) -> ... -> h(<n,a_{n+1}>) -> a_{n+1}
//! ```
//!
//! where `h` enumerates the complement of `ran(a)` and `free` enumerates the
//! leftover set `F = { h(<n,i>) : i > a_{n+1} }` in increasing order.

use std::sync::{Arc, Mutex};

use num_traits::{ToPrimitive, Zero};

use crate::copies::{CopyError, PunctualCopy};
use crate::foundations::{pair, unpair, ComplementEnum, GapSequence};
use crate::nat::Nat;

/// Location of an element: its block and its offset inside the block
/// (0 for `a_m`, 1 for `free(m)`, `i + 2` for `h(<m,i>)`).
/// The derived order is lexicographic, block first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositionTag {
    pub block: Nat,
    pub offset: Nat,
}

/// Which successor clause applies to an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// `x = a_n`.
    GapValue,
    /// `x = free(n)`.
    Free,
    /// `x = h(<n,i>)` with `i <= a_{n+1}`.
    Interior,
}

#[derive(Debug)]
pub struct GapCopy {
    provider: Arc<dyn GapSequence>,
    h: ComplementEnum,
    free_codes: Mutex<FreeCodes>,
}

#[derive(Debug, Default)]
struct FreeCodes {
    /// Codes `<n,i>` with `i > a_{n+1}`, increasing.
    codes: Vec<Nat>,
    /// Every code below this has been classified.
    scanned: Nat,
}

impl GapCopy {
    pub fn new(provider: Arc<dyn GapSequence>) -> Self {
        GapCopy {
            h: ComplementEnum::new(provider.clone()),
            provider,
            free_codes: Mutex::new(FreeCodes::default()),
        }
    }

    pub fn provider(&self) -> &Arc<dyn GapSequence> {
        &self.provider
    }

    pub fn complement(&self) -> &ComplementEnum {
        &self.h
    }

    /// `<n,i>` codes an element of `F` iff `a_{n+1} < i`.
    fn is_free_code(&self, z: &Nat) -> bool {
        let (n, i) = unpair(z);
        match n.to_u64() {
            Some(n) => matches!(self.provider.value_at_most(n + 1, &i), Some(v) if v < i),
            None => false,
        }
    }

    fn scan_while<P: Fn(&FreeCodes) -> bool>(
        &self,
        keep_going: P,
    ) -> std::sync::MutexGuard<'_, FreeCodes> {
        let mut table = self.free_codes.lock().expect("free table lock poisoned");
        while keep_going(&table) {
            let z = table.scanned.clone();
            if self.is_free_code(&z) {
                table.codes.push(z);
            }
            table.scanned += 1u32;
        }
        table
    }

    /// `free(n)`: the `n`-th element of `F`.
    pub fn free(&self, n: u64) -> Nat {
        // codes <0,i> with i > a_1 are all in F, so the scan terminates
        let table = self.scan_while(|t| (t.codes.len() as u64) <= n);
        self.h.h(&table.codes[n as usize])
    }

    /// The `n` with `free(n) = h(z)`, if `h(z)` is in `F`.
    fn free_index_of_code(&self, z: &Nat) -> Option<u64> {
        if !self.is_free_code(z) {
            return None;
        }
        let table = self.scan_while(|t| &t.scanned <= z);
        table.codes.binary_search(z).ok().map(|i| i as u64)
    }

    /// The clause governing `x`, with the data it needs.
    fn classify(&self, x: &Nat) -> Classified {
        if let Some(n) = self.provider.index_of(x) {
            return Classified::GapValue(n);
        }
        let z = self.h.inverse(x).expect("non-member has an h-preimage");
        if let Some(n) = self.free_index_of_code(&z) {
            return Classified::Free(n);
        }
        let (block, i) = unpair(&z);
        Classified::Interior { block, i }
    }

    pub fn clause(&self, x: &Nat) -> Clause {
        match self.classify(x) {
            Classified::GapValue(_) => Clause::GapValue,
            Classified::Free(_) => Clause::Free,
            Classified::Interior { .. } => Clause::Interior,
        }
    }

    pub fn successor_a(&self, x: &Nat) -> Nat {
        match self.classify(x) {
            Classified::GapValue(n) => self.free(n),
            Classified::Free(n) => self.h.h(&pair(&Nat::from(n), &Nat::zero())),
            Classified::Interior { block, i } => {
                let next_gap = block
                    .to_u64()
                    .and_then(|b| self.provider.value_at_most(b + 1, &i));
                match next_gap {
                    // i = a_{n+1}: the chain continues with the numeral a_{n+1}
                    Some(v) if v == i => v,
                    _ => self.h.h(&pair(&block, &(i + 1u32))),
                }
            }
        }
    }

    pub fn pos_a(&self, x: &Nat) -> PositionTag {
        match self.classify(x) {
            Classified::GapValue(m) => PositionTag {
                block: Nat::from(m),
                offset: Nat::zero(),
            },
            Classified::Free(m) => PositionTag {
                block: Nat::from(m),
                offset: Nat::from(1u32),
            },
            Classified::Interior { block, i } => PositionTag {
                block,
                offset: i + 2u32,
            },
        }
    }

    /// The image of `<` under `c`.
    pub fn less_a(&self, x: &Nat, y: &Nat) -> bool {
        self.pos_a(x) < self.pos_a(y)
    }
}

enum Classified {
    GapValue(u64),
    Free(u64),
    Interior { block: Nat, i: Nat },
}

impl PunctualCopy for GapCopy {
    fn name(&self) -> String {
        format!("copy-gap({})", self.provider.name())
    }

    fn origin(&self) -> Nat {
        self.provider.table()[0].clone()
    }

    fn successor(&self, x: &Nat) -> Result<Nat, CopyError> {
        Ok(self.successor_a(x))
    }
}
