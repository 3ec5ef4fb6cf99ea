//! Cantor pairing `<x,y> = (x+y)(x+y+1)/2 + y`.
//!
//! Both components of `unpair(z)` are strictly below `z` for every `z >= 2`;
//! `unpair(1) = (1, 0)` is the single exception among nonzero codes.

use num_traits::ToPrimitive;

use crate::nat::Nat;

pub fn pair(x: &Nat, y: &Nat) -> Nat {
    if let (Some(a), Some(b)) = (x.to_u64(), y.to_u64()) {
        if let Some(code) = pair_u64(a, b) {
            return Nat::from(code);
        }
    }
    let s = x + y;
    ((&s * (&s + 1u32)) >> 1u32) + y
}

pub fn unpair(z: &Nat) -> (Nat, Nat) {
    if let Some(code) = z.to_u64() {
        let (x, y) = unpair_u64(code);
        return (Nat::from(x), Nat::from(y));
    }
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) >> 1u32;
    let t = (&w * (&w + 1u32)) >> 1u32;
    let y = z - t;
    let x = w - &y;
    (x, y)
}

/// `None` on overflow.
pub fn pair_u64(x: u64, y: u64) -> Option<u64> {
    let s = x.checked_add(y)?;
    let tri = (s as u128 * (s as u128 + 1)) / 2;
    u64::try_from(tri + y as u128).ok()
}

pub fn unpair_u64(z: u64) -> (u64, u64) {
    let w = (((8 * z as u128 + 1).isqrt() - 1) / 2) as u64;
    let t = ((w as u128) * (w as u128 + 1) / 2) as u64;
    let y = z - t;
    (w - y, y)
}
