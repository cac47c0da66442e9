//! Multi-index bookkeeping. A multi-index is a strictly increasing list of
//! 0-based indices stored as a bitmask; coefficients are laid out in
//! lexicographic order of the index lists. Every sign in the crate comes
//! from the permutation parities computed here.

use std::sync::OnceLock;

pub const MAX_DIM: usize = 8;

pub(crate) struct Table {
    masks: Vec<u16>,
    position: Vec<u32>,
}

impl Table {
    pub(crate) fn masks(&self) -> &[u16] {
        &self.masks
    }

    pub(crate) fn position(&self, mask: u16) -> usize {
        let p = self.position[mask as usize];
        debug_assert!(p != u32::MAX, "mask has wrong cardinality");
        p as usize
    }
}

fn build(n: usize, k: usize) -> Table {
    let mut masks = Vec::new();
    let mut stack = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, stack: &mut Vec<usize>, out: &mut Vec<u16>) {
        if stack.len() == k {
            out.push(stack.iter().fold(0u16, |m, &i| m | (1 << i)));
            return;
        }
        for i in start..n {
            stack.push(i);
            rec(n, k, i + 1, stack, out);
            stack.pop();
        }
    }
    rec(n, k, 0, &mut stack, &mut masks);
    let mut position = vec![u32::MAX; 1 << n];
    for (p, &m) in masks.iter().enumerate() {
        position[m as usize] = p as u32;
    }
    Table { masks, position }
}

pub(crate) fn table(n: usize, k: usize) -> &'static Table {
    static TABLES: OnceLock<Vec<Vec<Table>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..=MAX_DIM)
            .map(|n| (0..=n).map(|k| build(n, k)).collect())
            .collect()
    });
    &tables[n][k]
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub(crate) fn indices(mask: u16) -> impl Iterator<Item = usize> {
    (0..16).filter(move |i| mask & (1 << i) != 0)
}

/// Parity of the shuffle that sorts the concatenation `a ++ b` of two
/// disjoint increasing multi-indices: `true` means odd.
pub(crate) fn merge_odd(a: u16, b: u16) -> bool {
    let mut inversions = 0u32;
    for j in indices(b) {
        inversions += (a >> (j + 1)).count_ones();
    }
    inversions % 2 == 1
}

/// Sorts an arbitrary index list; returns the mask and whether the sorting
/// permutation is odd, or `None` on a repeated index.
pub(crate) fn sort_with_parity(idx: &[usize]) -> Option<(u16, bool)> {
    let mut mask = 0u16;
    let mut inversions = 0usize;
    for (p, &i) in idx.iter().enumerate() {
        if mask & (1 << i) != 0 {
            return None;
        }
        mask |= 1 << i;
        inversions += idx[..p].iter().filter(|&&j| j > i).count();
    }
    Some((mask, inversions % 2 == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_layout() {
        let t = table(4, 2);
        let lists: Vec<Vec<usize>> = t.masks().iter().map(|&m| indices(m).collect()).collect();
        assert_eq!(
            lists,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        for n in 0..=MAX_DIM {
            for k in 0..=n {
                assert_eq!(table(n, k).masks().len(), binomial(n, k));
            }
        }
    }

    #[test]
    fn parities() {
        // (4,5,6,7,1,2,3): 12 inversions
        assert!(!merge_odd(0b1111000, 0b0000111));
        assert!(merge_odd(0b10, 0b01));
        assert_eq!(sort_with_parity(&[2, 0, 1]), Some((0b111, false)));
        assert_eq!(sort_with_parity(&[1, 0]), Some((0b11, true)));
        assert_eq!(sort_with_parity(&[1, 1]), None);
    }
}
