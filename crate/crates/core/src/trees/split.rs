use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest leaf count a [`Split`] bitmask can hold.
pub const MAX_LEAVES: usize = 31;

/// Unordered bipartition `I | Iᶜ` of `[n]` with both sides of size ≥ 2.
///
/// Stored by the side that does not contain `n`, as a bitmask (bit `k-1`
/// for leaf `k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Split {
    n: u8,
    side: u32,
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub(crate) fn leaves_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

impl Split {
    /// Builds the split with one side `leaves`; either side may be given.
    pub fn new(n: usize, leaves: &[usize]) -> Result<Split> {
        if !(4..=MAX_LEAVES).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "a split needs 4 <= n <= {MAX_LEAVES}, got n = {n}"
            )));
        }
        let mut mask = 0u32;
        for &k in leaves {
            if k == 0 || k > n {
                return Err(Error::InvalidArgument(format!("leaf {k} outside [1, {n}]")));
            }
            if mask >> (k - 1) & 1 == 1 {
                return Err(Error::InvalidArgument(format!("leaf {k} repeated")));
            }
            mask |= 1 << (k - 1);
        }
        Split::from_mask(n, mask)
    }

    pub fn from_mask(n: usize, mask: u32) -> Result<Split> {
        if !(4..=MAX_LEAVES).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "a split needs 4 <= n <= {MAX_LEAVES}, got n = {n}"
            )));
        }
        let full = full_mask(n);
        if mask & !full != 0 {
            return Err(Error::InvalidArgument(format!("mask {mask:#b} has leaves beyond {n}")));
        }
        let side = if mask >> (n - 1) & 1 == 1 { full & !mask } else { mask };
        let size = side.count_ones() as usize;
        if size < 2 || size > n - 2 {
            return Err(Error::InvalidArgument(format!(
                "split side {:?} must have between 2 and {} leaves",
                leaves_of(side),
                n - 2
            )));
        }
        Ok(Split { n: n as u8, side })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Canonical side, the one without `n`.
    pub fn side_mask(&self) -> u32 {
        self.side
    }

    pub fn complement_mask(&self) -> u32 {
        full_mask(self.n()) & !self.side
    }

    pub fn side(&self) -> Vec<usize> {
        leaves_of(self.side)
    }

    pub fn complement(&self) -> Vec<usize> {
        leaves_of(self.complement_mask())
    }

    /// The side with fewer leaves; ties go to the canonical side.
    pub fn smaller_side(&self) -> Vec<usize> {
        if self.side.count_ones() <= self.complement_mask().count_ones() {
            self.side()
        } else {
            self.complement()
        }
    }

    pub fn contains(&self, leaf: usize) -> bool {
        leaf >= 1 && self.side >> (leaf - 1) & 1 == 1
    }

    /// Whether leaves `a` and `b` lie on different sides.
    pub fn separates(&self, a: usize, b: usize) -> bool {
        self.contains(a) != self.contains(b)
    }

    /// `true` when the split cuts `{a, b} | {c, d}`.
    pub fn separates_pairs(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
        let s = self.contains(a);
        self.contains(b) == s && self.contains(c) != s && self.contains(d) != s
    }

    /// Two splits coexist in one tree iff their canonical sides are nested or
    /// disjoint (both complements contain `n`, so they always meet).
    pub fn compatible(&self, other: &Split) -> bool {
        debug_assert_eq!(self.n, other.n);
        let (a, b) = (self.side, other.side);
        a & b == 0 || a & b == a || a & b == b
    }

    /// Image under deleting `leaf` and relabeling `[n] ∖ {leaf}` onto `[n-1]`
    /// in order; `None` when a side drops below two leaves.
    pub fn forget(&self, leaf: usize) -> Option<Split> {
        let n = self.n();
        if n <= 4 {
            return None;
        }
        let squeeze = |m: u32| {
            let low = m & ((1u32 << (leaf - 1)) - 1);
            let high = (m >> leaf) << (leaf - 1);
            low | high
        };
        Split::from_mask(n - 1, squeeze(self.side)).ok()
    }

    /// Name used in DOT output and reports, e.g. `d12` for `δ_{12}`: the
    /// smaller side, or the side holding leaf 1 when both have equal size.
    pub fn name(&self) -> String {
        let (a, b) = (self.side.count_ones(), self.complement_mask().count_ones());
        let leaves = if a < b || (a == b && self.contains(1)) { self.side() } else { self.complement() };
        let mut s = String::from("d");
        for k in leaves {
            if self.n() >= 10 {
                s.push('_');
            }
            s.push_str(&k.to_string());
        }
        s
    }
}

impl Ord for Split {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.side.count_ones().cmp(&other.side.count_ones()))
            .then_with(|| self.side().cmp(&other.side()))
    }
}

impl PartialOrd for Split {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<usize>| v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}}|{{{}}}", join(self.side()), join(self.complement()))
    }
}

/// All splits of `[n]`, sorted.
pub fn all_splits(n: usize) -> Result<Vec<Split>> {
    if !(4..=MAX_LEAVES).contains(&n) {
        return Err(Error::InvalidArgument(format!("need 4 <= n <= {MAX_LEAVES}, got {n}")));
    }
    if n > 20 {
        return Err(Error::InvalidArgument(format!("refusing to list splits for n = {n}")));
    }
    let mut out: Vec<Split> = (1u32..1 << (n - 1))
        .filter_map(|m| Split::from_mask(n, m).ok())
        .collect();
    out.sort();
    Ok(out)
}
