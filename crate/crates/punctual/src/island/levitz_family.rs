//! The non-constant functions built from `0`, `1`, `x` by `+`, `*` and
//! `n^f` (no `x^f`), as a family plugin. This class is closed under
//! composition; normal forms, the order and witnesses come from
//! [`crate::levitz`].

use std::cmp::Ordering;

use crate::levitz::{anf, cmp_anf, compare, witness_d, Anf, DigitCap, LevitzTerm};
use crate::nat::Nat;

use super::{to_u64, IslandError, LFamily};

/// Additive normal form ordered by eventual domination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevitzNormal(pub Anf);

impl Ord for LevitzNormal {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_anf(&self.0, &other.0)
    }
}

impl PartialOrd for LevitzNormal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LevitzFamily {
    cap: DigitCap,
}

impl LevitzFamily {
    pub fn new(cap: DigitCap) -> Self {
        LevitzFamily { cap }
    }
}

/// `outer` with every `x` replaced by `inner`.
fn substitute(outer: &LevitzTerm, inner: &LevitzTerm) -> Result<LevitzTerm, IslandError> {
    use LevitzTerm::*;
    Ok(match outer {
        Zero => Zero,
        One => One,
        Var => inner.clone(),
        Sum(a, b) => LevitzTerm::sum(substitute(a, inner)?, substitute(b, inner)?),
        Prod(a, b) => LevitzTerm::prod(substitute(a, inner)?, substitute(b, inner)?),
        ConstPow(n, e) => ConstPow(n.clone(), Box::new(substitute(e, inner)?)),
        VarPow(_) => {
            return Err(IslandError::FamilyContractViolated(format!(
                "`{outer}` uses x^f, which is outside the composition-closed class"
            )))
        }
    })
}

/// Terms of weight `w`, where leaves weigh 1, `f + g` and `f * g` weigh
/// `1 + |f| + |g|`, and `n^f` weighs `n + |f|`.
fn terms_of_weight(table: &mut Vec<Vec<LevitzTerm>>, w: usize) {
    while table.len() <= w {
        let k = table.len();
        let mut out = Vec::new();
        if k == 1 {
            out = vec![LevitzTerm::Zero, LevitzTerm::One, LevitzTerm::Var];
        } else if k > 1 {
            for left in 1..k - 1 {
                let right = k - 1 - left;
                for a in &table[left] {
                    for b in &table[right] {
                        out.push(LevitzTerm::sum(a.clone(), b.clone()));
                        out.push(LevitzTerm::prod(a.clone(), b.clone()));
                    }
                }
            }
            for n in 1..k {
                for e in &table[k - n] {
                    out.push(LevitzTerm::ConstPow(Nat::from(n), Box::new(e.clone())));
                }
            }
        }
        table.push(out);
    }
}

impl LFamily for LevitzFamily {
    type Term = LevitzTerm;
    type Normal = LevitzNormal;

    fn name(&self) -> String {
        "levitz".to_string()
    }

    fn identity(&self) -> LevitzTerm {
        LevitzTerm::Var
    }

    fn successor(&self) -> LevitzTerm {
        LevitzTerm::sum(LevitzTerm::Var, LevitzTerm::One)
    }

    /// Enumerates all terms by weight and returns the `i`-th non-constant
    /// one; the cost is the number of terms enumerated.
    fn base_term(&self, i: u64) -> (LevitzTerm, u64) {
        let mut table = Vec::new();
        let mut cost = 0;
        let mut seen = 0;
        for w in 1.. {
            terms_of_weight(&mut table, w);
            for t in &table[w] {
                cost += 1;
                // non-constant members are strictly increasing
                let at = |x: u32| t.eval(&Nat::from(x), self.cap).ok();
                if at(0) != at(1) {
                    if seen == i {
                        return (t.clone(), cost);
                    }
                    seen += 1;
                }
            }
        }
        unreachable!("the enumeration is infinite")
    }

    fn compose(&self, outer: &LevitzTerm, inner: &LevitzTerm) -> Result<LevitzTerm, IslandError> {
        substitute(outer, inner)
    }

    fn normal_form(&self, t: &LevitzTerm) -> Result<LevitzNormal, IslandError> {
        Ok(LevitzNormal(anf(t)?))
    }

    fn eval(&self, t: &LevitzTerm, x: u64) -> Result<u64, IslandError> {
        to_u64(&t.eval(&Nat::from(x), self.cap)?, &format!("({t})({x})"))
    }

    fn strict_witness(&self, lower: &LevitzTerm, upper: &LevitzTerm) -> Result<u64, IslandError> {
        if compare(lower, upper)? != Ordering::Less {
            return Err(IslandError::NotDominated {
                lower: lower.to_string(),
                upper: upper.to_string(),
            });
        }
        to_u64(&witness_d(lower, upper)?, "witness")
    }
}
