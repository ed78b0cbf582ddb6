//! Multi-indices: sorted multisets of base-axis labels.

use std::fmt;

use num_bigint::BigInt;

use crate::scalar::factorial;

/// Multiset of 0-based axis labels stored as a sorted tuple.
///
/// Displayed 1-based, matching the usual coordinate labels `x^1 .. x^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(mut labels: Vec<usize>) -> Self {
        labels.sort_unstable();
        MultiIndex(labels)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        let labels = exps
            .iter()
            .enumerate()
            .flat_map(|(axis, &e)| std::iter::repeat(axis).take(e as usize))
            .collect();
        MultiIndex(labels)
    }

    pub fn exponents(&self, m: usize) -> Vec<u8> {
        let mut exps = vec![0u8; m];
        for &l in &self.0 {
            exps[l] += 1;
        }
        exps
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn max_label(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn with(&self, label: usize) -> Self {
        let mut labels = self.0.clone();
        labels.push(label);
        MultiIndex::new(labels)
    }

    /// Product of the factorials of the label multiplicities.
    pub fn multiplicity_factorial(&self) -> BigInt {
        let mut result = BigInt::from(1);
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            result *= factorial(j - i);
            i = j;
        }
        result
    }

    /// All multisets of the given order over `m` labels, in lexicographic order.
    pub fn all_of_order(m: usize, order: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(order);
        fn rec(m: usize, left: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for l in start..m {
                cur.push(l);
                rec(m, left - 1, l, cur, out);
                cur.pop();
            }
        }
        rec(m, order, 0, &mut current, &mut out);
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| (l + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Every tuple of length `len` with entries below `range`, in row-major order.
pub fn all_tuples(range: usize, len: usize) -> Vec<Vec<usize>> {
    let total = range.pow(len as u32);
    (0..total)
        .map(|mut flat| {
            let mut t = vec![0; len];
            for slot in (0..len).rev() {
                t[slot] = flat % range;
                flat /= range;
            }
            t
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_sorted() {
        assert_eq!(MultiIndex::new(vec![2, 0, 1]), MultiIndex::new(vec![0, 1, 2]));
        assert_eq!(MultiIndex::from_exponents(&[2, 0, 1]).labels(), &[0, 0, 2]);
        assert_eq!(MultiIndex::new(vec![0, 0, 2]).exponents(3), vec![2, 0, 1]);
    }

    #[test]
    fn multiplicity_factorial_values() {
        assert_eq!(MultiIndex::new(vec![0, 0]).multiplicity_factorial(), BigInt::from(2));
        assert_eq!(MultiIndex::new(vec![0, 0, 0, 1, 1]).multiplicity_factorial(), BigInt::from(12));
        assert_eq!(MultiIndex::empty().multiplicity_factorial(), BigInt::from(1));
    }

    #[test]
    fn enumerates_multisets() {
        // C(m+k-1, k)
        assert_eq!(MultiIndex::all_of_order(3, 2).len(), 6);
        assert_eq!(MultiIndex::all_of_order(2, 4).len(), 5);
        assert_eq!(MultiIndex::all_of_order(3, 0), vec![MultiIndex::empty()]);
    }
}
