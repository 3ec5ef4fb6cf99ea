//! Rigorous comparison of values too large to materialize.
//!
//! A [`Magnitude`] at level `L` encloses `log2^L(v)` (the `L`-fold binary
//! logarithm) in an interval with 64 fractional bits; level 0 encloses `v`
//! itself. Every operation rounds lower bounds down and upper bounds up, so
//! disjoint enclosures decide `<` soundly and overlapping ones decide nothing.
//! Levels only grow when an enclosure gets too wide to hold cheaply.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::normal::{anf, Anf, Base, Mnf};
use super::term::{capped_pow, DigitCap, LevitzTerm};
use super::LevitzError;
use crate::nat::Nat;

const FRAC: u64 = 64;
/// Extra working bits of the logarithm's mantissa.
const GUARD: u64 = 32;
/// Integer bits a level >= 1 bound may hold before lifting.
const LIFT_BITS: u64 = 256;
const MAX_LEVEL: u32 = 8;

fn one_fx() -> Nat {
    Nat::one() << FRAC
}

/// `2^-FRAC`-scaled `2^e` for `e <= 0`, rounded up to at least one unit.
fn pow2_neg_fx(e: &Nat) -> Nat {
    match u64::try_from(e) {
        Ok(e) if e < FRAC => Nat::one() << (FRAC - e),
        _ => Nat::one(),
    }
}

/// Bound on `log2(v / 2^FRAC)`: below when `!up`, above when `up`.
/// `None` when the value is below 1, where the logarithm is negative.
fn log2_fx(v: &Nat, up: bool) -> Option<Nat> {
    if v < &one_fx() {
        return None;
    }
    let top = v.bits() - 1;
    let int_part = top - FRAC;
    let q = FRAC + GUARD;
    // mantissa v / 2^top in [1, 2] with q fractional bits
    let mut y = if top >= q {
        let s = v >> (top - q);
        if up && (&s << (top - q)) != *v {
            s + 1u32
        } else {
            s
        }
    } else {
        v << (q - top)
    };
    let two = Nat::one() << (q + 1);
    let mut frac = Nat::zero();
    // log2(m) = sum of emitted bits + 2^-j log2(y_j); rounding y one way keeps
    // the sum on the same side
    for _ in 0..FRAC {
        let sq = &y * &y;
        let mut next = &sq >> q;
        if up && (&next << q) != sq {
            next += 1u32;
        }
        y = next;
        frac <<= 1;
        if y >= two {
            frac += 1u32;
            y = if up { (y + 1u32) >> 1 } else { y >> 1 };
        }
    }
    let mut out = (Nat::from(int_part) << FRAC) + frac;
    if up {
        // the dropped 2^-FRAC log2(y_FRAC) with y_FRAC <= 4
        out += 2u32;
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Magnitude {
    level: u32,
    lo: Nat,
    hi: Nat,
}

impl Magnitude {
    pub fn exact(n: &Nat) -> Self {
        let v = n << FRAC;
        Magnitude {
            level: 0,
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    fn as_exact(&self) -> Option<Nat> {
        let mask_free = (&self.lo >> FRAC) << FRAC == self.lo;
        (self.level == 0 && self.lo == self.hi && mask_free).then(|| &self.lo >> FRAC)
    }

    fn is_zero(&self) -> bool {
        self.level == 0 && self.hi.is_zero()
    }

    /// Same value, one level up.
    fn lift(&self) -> Option<Magnitude> {
        Some(Magnitude {
            level: self.level + 1,
            lo: log2_fx(&self.lo, false)?,
            hi: log2_fx(&self.hi, true)?,
        })
    }

    /// Lifts until the bounds are cheap to carry.
    fn normalize(mut self, cap: DigitCap) -> Option<Magnitude> {
        loop {
            let int_bits = (&self.hi >> FRAC).bits();
            let limit = if self.level == 0 {
                cap.bits()
            } else {
                LIFT_BITS
            };
            if int_bits <= limit {
                return Some(self);
            }
            if self.level >= MAX_LEVEL {
                return None;
            }
            self = self.lift()?;
        }
    }

    /// `log2` of the value.
    fn log(&self) -> Option<Magnitude> {
        if self.level > 0 {
            Some(Magnitude {
                level: self.level - 1,
                ..self.clone()
            })
        } else {
            Some(Magnitude {
                level: 0,
                lo: log2_fx(&self.lo, false)?,
                hi: log2_fx(&self.hi, true)?,
            })
        }
    }

    /// `2^value`.
    fn exp(self, cap: DigitCap) -> Option<Magnitude> {
        if let Some(n) = self.as_exact() {
            if let Some(v) = capped_pow(&Nat::from(2u32), &n, cap.bits()) {
                return Some(Magnitude::exact(&v));
            }
        }
        Magnitude {
            level: self.level + 1,
            ..self
        }
        .normalize(cap)
    }

    /// Bounds on `log2^level` of the value; `None` stands for minus infinity.
    fn at_level(&self, level: u32) -> (Option<Nat>, Option<Nat>) {
        let (mut lo, mut hi) = (Some(self.lo.clone()), Some(self.hi.clone()));
        for _ in self.level..level {
            lo = lo.and_then(|v| log2_fx(&v, false));
            hi = hi.and_then(|v| log2_fx(&v, true));
        }
        (lo, hi)
    }

    pub fn add(&self, other: &Magnitude, cap: DigitCap) -> Option<Magnitude> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        let level = self.level.max(other.level);
        if level == 0 {
            return Magnitude {
                level: 0,
                lo: &self.lo + &other.lo,
                hi: &self.hi + &other.hi,
            }
            .normalize(cap);
        }
        let (a_lo, a_hi) = self.at_level(level);
        let (b_lo, b_hi) = other.at_level(level);
        let lo = a_lo.clone().max(b_lo.clone())?;
        let hi = a_hi.clone().max(b_hi.clone())?;
        let delta = if level == 1 {
            // log2(a + b) <= log2(a) + 2^(1 - (log2 a - log2 b)) for a >= b
            let gap = |big_lo: &Option<Nat>, small_hi: &Option<Nat>| match (big_lo, small_hi) {
                (Some(l), None) => Some((l.clone(), None)),
                (Some(l), Some(h)) if l >= h => Some((l.clone(), Some(l - h))),
                _ => None,
            };
            match gap(&a_lo, &b_hi).or_else(|| gap(&b_lo, &a_hi)) {
                Some((_, None)) => Nat::zero(),
                Some((_, Some(g))) => {
                    let whole = g >> FRAC;
                    if whole.is_zero() {
                        one_fx()
                    } else {
                        pow2_neg_fx(&(whole - 1u32))
                    }
                }
                None => one_fx(),
            }
        } else {
            // a + b <= 2 max(a, b), and each further log2 shrinks the step
            // once the argument is at least 2
            if lo < one_fx() {
                return None;
            }
            let whole = &lo >> FRAC;
            pow2_neg_fx(&(whole - 1u32)).min(one_fx())
        };
        Magnitude {
            level,
            lo,
            hi: hi + delta,
        }
        .normalize(cap)
    }

    pub fn mul(&self, other: &Magnitude, cap: DigitCap) -> Option<Magnitude> {
        if self.is_zero() || other.is_zero() {
            return Some(Magnitude::exact(&Nat::zero()));
        }
        if let (Some(a), Some(b)) = (self.as_exact(), other.as_exact()) {
            if a.bits() + b.bits() <= cap.bits() {
                return Some(Magnitude::exact(&(a * b)));
            }
        }
        if self.level == 0 && other.level == 0 {
            let lo = (&self.lo * &other.lo) >> FRAC;
            let full = &self.hi * &other.hi;
            let mut hi = &full >> FRAC;
            if (&hi << FRAC) != full {
                hi += 1u32;
            }
            if (&hi >> FRAC).bits() <= cap.bits() {
                return Some(Magnitude { level: 0, lo, hi });
            }
        }
        self.log()?.add(&other.log()?, cap)?.exp(cap)
    }

    pub fn pow(&self, exponent: &Magnitude, cap: DigitCap) -> Option<Magnitude> {
        if exponent.is_zero() {
            return Some(Magnitude::exact(&Nat::one()));
        }
        if let Some(b) = self.as_exact() {
            if b.is_zero() || b.is_one() {
                return Some(Magnitude::exact(&b));
            }
            if let Some(e) = exponent.as_exact() {
                if let Some(v) = capped_pow(&b, &e, cap.bits()) {
                    return Some(Magnitude::exact(&v));
                }
            }
        }
        exponent.mul(&self.log()?, cap)?.exp(cap)
    }

    /// `None` when the enclosures overlap.
    pub fn compare(&self, other: &Magnitude) -> Option<Ordering> {
        if let (Some(a), Some(b)) = (self.as_exact(), other.as_exact()) {
            return Some(a.cmp(&b));
        }
        let level = self.level.max(other.level);
        let (a_lo, a_hi) = self.at_level(level);
        let (b_lo, b_hi) = other.at_level(level);
        // None is minus infinity, which Option's order already puts first
        if a_hi < b_lo {
            Some(Ordering::Less)
        } else if b_hi < a_lo {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn of_term(t: &LevitzTerm, x: &Nat, cap: DigitCap) -> Option<Magnitude> {
        match t {
            LevitzTerm::Zero => Some(Magnitude::exact(&Nat::zero())),
            LevitzTerm::One => Some(Magnitude::exact(&Nat::one())),
            LevitzTerm::Var => Magnitude::exact(x).normalize(cap),
            LevitzTerm::Sum(a, b) => {
                Magnitude::of_term(a, x, cap)?.add(&Magnitude::of_term(b, x, cap)?, cap)
            }
            LevitzTerm::Prod(a, b) => {
                Magnitude::of_term(a, x, cap)?.mul(&Magnitude::of_term(b, x, cap)?, cap)
            }
            LevitzTerm::ConstPow(n, e) => {
                Magnitude::exact(n).pow(&Magnitude::of_term(e, x, cap)?, cap)
            }
            LevitzTerm::VarPow(e) => Magnitude::exact(x).pow(&Magnitude::of_term(e, x, cap)?, cap),
        }
    }

    fn of_mnf(m: &Mnf, x: &Nat, cap: DigitCap) -> Option<Magnitude> {
        let mut acc = Magnitude::exact(&Nat::one());
        for (f, count) in m.runs() {
            let base = match &f.base {
                Base::Num(n) => Magnitude::exact(n),
                Base::Var => Magnitude::exact(x),
            };
            let exp = Magnitude::of_mnf(&f.exp, x, cap)?.mul(&Magnitude::exact(count), cap)?;
            acc = acc.mul(&base.pow(&exp, cap)?, cap)?;
        }
        Some(acc)
    }

    fn of_anf(a: &Anf, x: &Nat, cap: DigitCap) -> Option<Magnitude> {
        let mut acc = Magnitude::exact(&Nat::zero());
        for (p, count) in a.runs() {
            let part = Magnitude::of_mnf(p, x, cap)?.mul(&Magnitude::exact(count), cap)?;
            acc = acc.add(&part, cap)?;
        }
        Some(acc)
    }
}

/// Outcome of checking `f(x) < g(x)` on a window.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub points: u64,
    /// Points settled by exact evaluation.
    pub exact: u64,
    /// Points settled by enclosures.
    pub enclosed: u64,
    pub undecided: Vec<Nat>,
    /// First point where `f(x) < g(x)` fails.
    pub violation: Option<Nat>,
}

impl SweepReport {
    pub fn confirmed(&self) -> bool {
        self.violation.is_none() && self.undecided.is_empty()
    }
}

/// Checks `f(x) < g(x)` for `x` in `[w, w + span]`: exactly where the values
/// fit the cap, otherwise by enclosures, first of the terms and then of the
/// normal forms with shared summands (and, for primes at `x >= 1`, shared
/// factors) cancelled.
pub fn confirm_domination(
    f: &LevitzTerm,
    g: &LevitzTerm,
    w: &Nat,
    span: u64,
    cap: DigitCap,
) -> Result<SweepReport, LevitzError> {
    let mut report = SweepReport::default();
    let mut cancelled: Option<(Anf, Anf)> = None;
    for d in 0..=span {
        let x = w + d;
        report.points += 1;
        let verdict = match (f.eval(&x, cap), g.eval(&x, cap)) {
            (Ok(a), Ok(b)) => {
                report.exact += 1;
                Some(a.cmp(&b))
            }
            _ => {
                let direct = Magnitude::of_term(f, &x, cap)
                    .zip(Magnitude::of_term(g, &x, cap))
                    .and_then(|(a, b)| a.compare(&b));
                let verdict = match direct {
                    Some(v) => Some(v),
                    None => {
                        if cancelled.is_none() {
                            cancelled = Some(anf(f)?.cancel_common(&anf(g)?));
                        }
                        let (rf, rg) = cancelled.as_ref().expect("just filled");
                        compare_cancelled(rf, rg, &x, cap)
                    }
                };
                if verdict.is_some() {
                    report.enclosed += 1;
                }
                verdict
            }
        };
        match verdict {
            Some(Ordering::Less) => {}
            Some(_) => {
                report.violation = Some(x);
                break;
            }
            None => report.undecided.push(x),
        }
    }
    Ok(report)
}

fn compare_cancelled(f: &Anf, g: &Anf, x: &Nat, cap: DigitCap) -> Option<Ordering> {
    let single = |a: &Anf| match a.runs() {
        [(p, c)] if c.is_one() => Some(p.clone()),
        _ => None,
    };
    if let (Some(p), Some(q), false) = (single(f), single(g), x.is_zero()) {
        let (_, p, q) = p.split_common(&q);
        return Magnitude::of_mnf(&p, x, cap)?.compare(&Magnitude::of_mnf(&q, x, cap)?);
    }
    Magnitude::of_anf(f, x, cap)?.compare(&Magnitude::of_anf(g, x, cap)?)
}
