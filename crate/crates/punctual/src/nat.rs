//! Arbitrary-precision naturals and the bit-level helpers shared by the lifts.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Every numeral, position and code is a `BigUint`.
pub type Nat = BigUint;

pub fn nat(v: u64) -> Nat {
    Nat::from(v)
}

/// `Some(v)` when the value fits a machine word.
pub fn small(x: &Nat) -> Option<u64> {
    x.to_u64()
}

/// Exponents of the set bits of `x`, ascending.
pub fn set_bits(x: &Nat) -> Vec<u64> {
    let mut out = Vec::new();
    for (word_idx, mut word) in x.iter_u64_digits().enumerate() {
        while word != 0 {
            let tz = word.trailing_zeros() as u64;
            out.push(word_idx as u64 * 64 + tz);
            word &= word - 1;
        }
    }
    out
}

/// Bit test with a `Nat` index; indices past the machine range are never set.
pub fn bit_at(x: &Nat, index: &Nat) -> bool {
    match index.to_u64() {
        Some(i) => x.bit(i),
        None => false,
    }
}

/// `2^e` when `e` fits a machine word.
pub fn pow2(e: &Nat) -> Option<Nat> {
    let e = e.to_u64()?;
    let mut out = Nat::zero();
    out.set_bit(e, true);
    Some(out)
}

pub fn is_even(x: &Nat) -> bool {
    !x.bit(0)
}

pub fn two_x_plus_one(x: &Nat) -> Nat {
    (x << 1u32) + Nat::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_bits_lists_exponents() {
        assert_eq!(set_bits(&nat(0)), Vec::<u64>::new());
        assert_eq!(set_bits(&nat(0b1011)), vec![0, 1, 3]);
        let big = (Nat::one() << 130u32) + nat(4);
        assert_eq!(set_bits(&big), vec![2, 130]);
    }

    #[test]
    fn huge_bit_indices_read_as_clear() {
        let idx = Nat::one() << 80u32;
        assert!(!bit_at(&nat(u64::MAX), &idx));
        assert!(pow2(&idx).is_none());
        assert_eq!(pow2(&nat(5)), Some(nat(32)));
    }
}
