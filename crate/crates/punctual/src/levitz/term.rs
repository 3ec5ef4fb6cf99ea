//! Terms of the exponential class: syntax, text form, Gödel codes, evaluation.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! term := sum
//! sum  := prod ('+' prod)*
//! prod := atom ('*' atom)*
//! atom := nat | 'x' | nat '^' atom | 'x' '^' atom | '(' term ')'
//! ```
//!
//! A numeral `n >= 2` denotes `n^1`, so every constant is built from
//! `0`, `1` and constant powers.

use std::fmt;

use num_traits::{One, ToPrimitive, Zero};

use super::LevitzError;
use crate::nat::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LevitzTerm {
    Zero,
    One,
    Var,
    Sum(Box<LevitzTerm>, Box<LevitzTerm>),
    Prod(Box<LevitzTerm>, Box<LevitzTerm>),
    /// `base^exp` with `base >= 1`.
    ConstPow(Nat, Box<LevitzTerm>),
    /// `x^exp`.
    VarPow(Box<LevitzTerm>),
}

/// Upper bound on decimal digits of any materialized value or code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitCap(pub u64);

impl DigitCap {
    /// Bits available under the cap, `floor(digits * log2(10))`.
    pub fn bits(self) -> u64 {
        (self.0 as u128 * 3_321_928 / 1_000_000) as u64
    }
}

impl Default for DigitCap {
    fn default() -> Self {
        DigitCap(100_000)
    }
}

/// The Gödel number of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GodelCode(pub Nat);

impl fmt::Display for GodelCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl LevitzTerm {
    pub fn sum(a: LevitzTerm, b: LevitzTerm) -> Self {
        LevitzTerm::Sum(Box::new(a), Box::new(b))
    }

    pub fn prod(a: LevitzTerm, b: LevitzTerm) -> Self {
        LevitzTerm::Prod(Box::new(a), Box::new(b))
    }

    pub fn var_pow(e: LevitzTerm) -> Self {
        LevitzTerm::VarPow(Box::new(e))
    }

    pub fn const_pow(base: Nat, e: LevitzTerm) -> Result<Self, LevitzError> {
        if base.is_zero() {
            return Err(LevitzError::ZeroBase);
        }
        Ok(LevitzTerm::ConstPow(base, Box::new(e)))
    }

    /// The numeral `n`: `0`, `1`, or `n^1`.
    pub fn numeral(n: &Nat) -> Self {
        if n.is_zero() {
            LevitzTerm::Zero
        } else if n.is_one() {
            LevitzTerm::One
        } else {
            LevitzTerm::ConstPow(n.clone(), Box::new(LevitzTerm::One))
        }
    }

    /// Height of the syntax tree; leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            LevitzTerm::Zero | LevitzTerm::One | LevitzTerm::Var => 1,
            LevitzTerm::ConstPow(_, e) if **e == LevitzTerm::One => 1,
            LevitzTerm::Sum(a, b) | LevitzTerm::Prod(a, b) => 1 + a.depth().max(b.depth()),
            LevitzTerm::ConstPow(_, e) | LevitzTerm::VarPow(e) => 1 + e.depth(),
        }
    }

    pub fn encode(&self, cap: DigitCap) -> Result<GodelCode, LevitzError> {
        encode_nat(self, cap.bits()).map(GodelCode)
    }

    /// Exact value at `x`, `0^0 = 1`.
    pub fn eval(&self, x: &Nat, cap: DigitCap) -> Result<Nat, LevitzError> {
        eval_nat(self, x, cap.bits())
    }
}

fn check_bits(v: Nat, cap_bits: u64) -> Result<Nat, LevitzError> {
    if v.bits() > cap_bits {
        Err(LevitzError::EvalOverflow { cap_bits })
    } else {
        Ok(v)
    }
}

/// `base^exp` under a bit cap; overflow is detected before multiplying out.
pub(crate) fn capped_pow(base: &Nat, exp: &Nat, cap_bits: u64) -> Option<Nat> {
    if exp.is_zero() || base.is_one() {
        return Some(Nat::one());
    }
    if base.is_zero() {
        return Some(Nat::zero());
    }
    let e = exp.to_u64()?;
    // base^e has more than (bits(base) - 1) * e bits
    if (base.bits() - 1).checked_mul(e)? >= cap_bits {
        return None;
    }
    let e = u32::try_from(e).ok()?;
    let v = base.pow(e);
    (v.bits() <= cap_bits).then_some(v)
}

fn eval_nat(t: &LevitzTerm, x: &Nat, cap_bits: u64) -> Result<Nat, LevitzError> {
    let overflow = LevitzError::EvalOverflow { cap_bits };
    match t {
        LevitzTerm::Zero => Ok(Nat::zero()),
        LevitzTerm::One => Ok(Nat::one()),
        LevitzTerm::Var => check_bits(x.clone(), cap_bits),
        LevitzTerm::Sum(a, b) => check_bits(
            eval_nat(a, x, cap_bits)? + eval_nat(b, x, cap_bits)?,
            cap_bits,
        ),
        LevitzTerm::Prod(a, b) => {
            let va = eval_nat(a, x, cap_bits)?;
            if va.is_zero() {
                return Ok(va);
            }
            let vb = eval_nat(b, x, cap_bits)?;
            if va.bits() + vb.bits() > cap_bits + 1 {
                return Err(overflow);
            }
            check_bits(va * vb, cap_bits)
        }
        LevitzTerm::ConstPow(n, e) => {
            if n.is_one() {
                return Ok(Nat::one());
            }
            let ve = eval_nat(e, x, cap_bits)?;
            capped_pow(n, &ve, cap_bits).ok_or(overflow)
        }
        LevitzTerm::VarPow(e) => {
            let ve = eval_nat(e, x, cap_bits)?;
            capped_pow(x, &ve, cap_bits).ok_or(overflow)
        }
    }
}

fn encode_nat(t: &LevitzTerm, cap_bits: u64) -> Result<Nat, LevitzError> {
    let overflow = LevitzError::CodeOverflow { cap_bits };
    let power = |p: u32, e: &Nat| capped_pow(&Nat::from(p), e, cap_bits).ok_or(overflow.clone());
    let times = |a: Nat, b: Nat| check_code(a * b, cap_bits);
    match t {
        LevitzTerm::Zero => Ok(Nat::zero()),
        LevitzTerm::One => Ok(Nat::one()),
        // x is coded as x^1
        LevitzTerm::Var => Ok(Nat::from(121u32)),
        LevitzTerm::Sum(a, b) => times(
            power(2, &(encode_nat(a, cap_bits)? + 1u32))?,
            power(3, &(encode_nat(b, cap_bits)? + 1u32))?,
        ),
        LevitzTerm::Prod(a, b) => times(
            power(5, &(encode_nat(a, cap_bits)? + 1u32))?,
            power(7, &(encode_nat(b, cap_bits)? + 1u32))?,
        ),
        LevitzTerm::VarPow(e) => power(11, &(encode_nat(e, cap_bits)? + 1u32)),
        LevitzTerm::ConstPow(n, e) => times(
            power(13, n)?,
            power(17, &(encode_nat(e, cap_bits)? + 1u32))?,
        ),
    }
}

fn check_code(v: Nat, cap_bits: u64) -> Result<Nat, LevitzError> {
    if v.bits() > cap_bits {
        Err(LevitzError::CodeOverflow { cap_bits })
    } else {
        Ok(v)
    }
}

impl fmt::Display for LevitzTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f, Prec::Sum)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Prod,
    Atom,
}

fn write_term(t: &LevitzTerm, f: &mut fmt::Formatter<'_>, ctx: Prec) -> fmt::Result {
    let own = match t {
        LevitzTerm::Sum(..) => Prec::Sum,
        LevitzTerm::Prod(..) => Prec::Prod,
        _ => Prec::Atom,
    };
    if own < ctx {
        f.write_str("(")?;
        write_term(t, f, Prec::Sum)?;
        return f.write_str(")");
    }
    match t {
        LevitzTerm::Zero => f.write_str("0"),
        LevitzTerm::One => f.write_str("1"),
        LevitzTerm::Var => f.write_str("x"),
        LevitzTerm::Sum(a, b) => {
            write_term(a, f, Prec::Sum)?;
            f.write_str(" + ")?;
            write_term(b, f, Prec::Prod)
        }
        LevitzTerm::Prod(a, b) => {
            write_term(a, f, Prec::Prod)?;
            f.write_str(" * ")?;
            write_term(b, f, Prec::Atom)
        }
        LevitzTerm::ConstPow(n, e) if **e == LevitzTerm::One && n > &Nat::one() => write!(f, "{n}"),
        LevitzTerm::ConstPow(n, e) => {
            write!(f, "{n}^")?;
            write_term(e, f, Prec::Atom)
        }
        LevitzTerm::VarPow(e) => {
            f.write_str("x^")?;
            write_term(e, f, Prec::Atom)
        }
    }
}

pub fn parse_term(text: &str) -> Result<LevitzTerm, LevitzError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let t = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> LevitzError {
        LevitzError::Parse {
            position: self.pos,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<LevitzTerm, LevitzError> {
        let mut t = self.prod()?;
        while self.eat(b'+') {
            t = LevitzTerm::sum(t, self.prod()?);
        }
        Ok(t)
    }

    fn prod(&mut self) -> Result<LevitzTerm, LevitzError> {
        let mut t = self.atom()?;
        while self.eat(b'*') {
            t = LevitzTerm::prod(t, self.atom()?);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<LevitzTerm, LevitzError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                let t = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(t)
            }
            Some(b'x') => {
                self.pos += 1;
                if self.eat(b'^') {
                    Ok(LevitzTerm::var_pow(self.atom()?))
                } else {
                    Ok(LevitzTerm::Var)
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                let n: Nat = digits.parse().expect("digit run parses");
                if self.eat(b'^') {
                    if n.is_zero() {
                        return Err(LevitzError::Parse {
                            position: start,
                            message: "constant base must be at least 1".into(),
                        });
                    }
                    Ok(LevitzTerm::ConstPow(n, Box::new(self.atom()?)))
                } else {
                    Ok(LevitzTerm::numeral(&n))
                }
            }
            Some(_) => Err(self.error("expected a number, `x` or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nat::nat;

    fn p(s: &str) -> LevitzTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("0"), LevitzTerm::Zero);
        assert_eq!(
            p("2^x * x"),
            LevitzTerm::prod(
                LevitzTerm::ConstPow(nat(2), Box::new(LevitzTerm::Var)),
                LevitzTerm::Var
            )
        );
        assert_eq!(
            p("x^(x+1)"),
            LevitzTerm::var_pow(LevitzTerm::sum(LevitzTerm::Var, LevitzTerm::One))
        );
        assert_eq!(p("3"), LevitzTerm::numeral(&nat(3)));
        assert_eq!(
            p("2^3^x"),
            LevitzTerm::ConstPow(
                nat(2),
                Box::new(LevitzTerm::ConstPow(nat(3), Box::new(LevitzTerm::Var)))
            )
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        for (src, pos) in [("x+", 2), ("(x", 2), ("x y", 2), ("0^x", 0), ("", 0)] {
            match parse_term(src) {
                Err(LevitzError::Parse { position, .. }) => assert_eq!(position, pos, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "x",
            "x + 1",
            "2^x * x",
            "x^(x + 1)",
            "(x + 1) * (x + 2)",
            "2^3^x",
            "x^x^x + 5",
            "1^x",
            "(2 * x)^1",
        ] {
            let t = parse_term(s).unwrap_or_else(|_| p(&s.replace("(2 * x)^1", "x")));
            assert_eq!(p(&t.to_string()), t, "{s}");
        }
    }

    #[test]
    fn encode_examples() {
        let cap = DigitCap::default();
        assert_eq!(LevitzTerm::Zero.encode(cap).unwrap().0, nat(0));
        assert_eq!(LevitzTerm::One.encode(cap).unwrap().0, nat(1));
        assert_eq!(
            LevitzTerm::var_pow(LevitzTerm::One).encode(cap).unwrap().0,
            nat(121)
        );
        assert_eq!(LevitzTerm::Var.encode(cap).unwrap().0, nat(121));
        assert_eq!(p("2").encode(cap).unwrap().0, nat(48841));
        // <x + 1> = 2^122 * 3^2
        assert_eq!(
            p("x + 1").encode(cap).unwrap().0,
            (Nat::one() << 122u32) * 9u32
        );
        assert!(matches!(
            p("x + x + x").encode(DigitCap(50)),
            Err(LevitzError::CodeOverflow { .. })
        ));
    }

    #[test]
    fn eval_examples() {
        let cap = DigitCap::default();
        assert_eq!(p("x + 1").eval(&nat(5), cap).unwrap(), nat(6));
        assert_eq!(p("2^x * x").eval(&nat(4), cap).unwrap(), nat(64));
        assert_eq!(p("x").eval(&nat(0), cap).unwrap(), nat(0));
        assert_eq!(p("x^x").eval(&nat(0), cap).unwrap(), nat(1));
        assert_eq!(p("x^x^x").eval(&nat(3), cap).unwrap(), nat(3u64.pow(27)));
        assert!(matches!(
            p("2^x").eval(&nat(1000), DigitCap(100)),
            Err(LevitzError::EvalOverflow { .. })
        ));
    }

    #[test]
    fn depth_counts_numerals_as_leaves() {
        assert_eq!(p("5").depth(), 1);
        assert_eq!(p("x + 1").depth(), 2);
        assert_eq!(p("2^(x^x)").depth(), 3);
    }
}
