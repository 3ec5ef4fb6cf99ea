//! The increasing enumeration `h` of the complement of a gap sequence's range.

use std::sync::Arc;

use crate::foundations::gap::GapSequence;
use crate::nat::Nat;

#[derive(Debug, Clone)]
pub struct ComplementEnum {
    backing: Arc<dyn GapSequence>,
}

impl ComplementEnum {
    pub fn new(backing: Arc<dyn GapSequence>) -> Self {
        ComplementEnum { backing }
    }

    pub fn backing(&self) -> &Arc<dyn GapSequence> {
        &self.backing
    }

    /// `h(x)`: the least `y` with `y - #{members <= y} = x` and `y` not a member.
    pub fn h(&self, x: &Nat) -> Nat {
        // y = x + #{members <= y} is monotone in y; iterate to its least fixed point
        let mut y = x.clone();
        loop {
            let next = x + self.backing.count_at_most(&y);
            if next == y {
                return y;
            }
            y = next;
        }
    }

    /// `h^{-1}(y)`, or `None` when `y` lies in the backing range.
    pub fn inverse(&self, y: &Nat) -> Option<Nat> {
        if self.backing.contains(y) {
            None
        } else {
            Some(y - self.backing.count_at_most(y))
        }
    }
}
