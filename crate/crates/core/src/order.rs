//! Finite partial orders on `0..n`, with the order topology notions used by
//! cofiltered objects (open sets are downward closed).

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::Error;

/// A partial order on `0..n` stored as its full relation matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Reflexive-transitive closure of the given relations `lo ≤ hi`.
    /// Fails if the closure is not antisymmetric.
    pub fn from_relations(n: usize, relations: &[(usize, usize)]) -> Result<Self, Error> {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(Error::Precondition(alloc::format!("relation ({}, {}) out of range", a, b)));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::Precondition(alloc::format!("order relations form a cycle through {} and {}", i, j)));
                }
            }
        }
        Ok(Poset { n, leq })
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_relations(n, &[]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq[a][b] || self.leq[b][a]
    }

    /// The opposite order.
    pub fn reversed(&self) -> Self {
        let leq = (0..self.n).map(|i| (0..self.n).map(|j| self.leq[j][i]).collect()).collect();
        Poset { n: self.n, leq }
    }

    /// Cover relations `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.lt(a, b) && !(0..self.n).any(|c| self.lt(a, c) && self.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Restriction to a subset, reindexed in the given order.
    pub fn induced(&self, subset: &[usize]) -> Self {
        let leq = subset.iter().map(|&a| subset.iter().map(|&b| self.leq[a][b]).collect()).collect();
        Poset { n: subset.len(), leq }
    }

    /// `{≥ x}`.
    pub fn up_set(&self, x: usize) -> BTreeSet<usize> {
        (0..self.n).filter(|&y| self.leq[x][y]).collect()
    }

    /// `{≤ x}`.
    pub fn down_set(&self, x: usize) -> BTreeSet<usize> {
        (0..self.n).filter(|&y| self.leq[y][x]).collect()
    }

    /// `{< x}`.
    pub fn strict_down_set(&self, x: usize) -> BTreeSet<usize> {
        (0..self.n).filter(|&y| self.lt(y, x)).collect()
    }

    /// Open sets are the downward closed subsets.
    pub fn is_open(&self, set: &BTreeSet<usize>) -> bool {
        set.iter().all(|&x| (0..self.n).all(|y| !self.leq[y][x] || set.contains(&y)))
    }

    /// Upward closed subsets.
    pub fn is_closed(&self, set: &BTreeSet<usize>) -> bool {
        set.iter().all(|&x| (0..self.n).all(|y| !self.leq[x][y] || set.contains(&y)))
    }

    /// Smallest open set containing `set`.
    pub fn open_hull(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.n).filter(|&y| set.iter().any(|&x| self.leq[y][x])).collect()
    }

    /// Maximal elements of a subset.
    pub fn maxima(&self, set: &BTreeSet<usize>) -> Vec<usize> {
        set.iter().copied().filter(|&x| !set.iter().any(|&y| self.lt(x, y))).collect()
    }

    pub fn minima(&self, set: &BTreeSet<usize>) -> Vec<usize> {
        set.iter().copied().filter(|&x| !set.iter().any(|&y| self.lt(y, x))).collect()
    }

    /// A linear extension listing larger elements first. Among the currently
    /// available elements the one with the smallest key is taken.
    pub fn linear_extension_descending<K: Ord>(&self, key: impl Fn(usize) -> K) -> Vec<usize> {
        let mut done = vec![false; self.n];
        let mut out = Vec::with_capacity(self.n);
        while out.len() < self.n {
            let next = (0..self.n)
                .filter(|&x| !done[x] && (0..self.n).all(|y| done[y] || !self.lt(x, y)))
                .min_by_key(|&x| key(x))
                .unwrap();
            done[next] = true;
            out.push(next);
        }
        out
    }

    /// A linear extension listing smaller elements first.
    pub fn linear_extension_ascending<K: Ord>(&self, key: impl Fn(usize) -> K) -> Vec<usize> {
        self.reversed().linear_extension_descending(key)
    }

    /// Length (number of covers) of a longest chain.
    pub fn height(&self) -> usize {
        let order = self.linear_extension_ascending(|x| x);
        let mut best = vec![0usize; self.n];
        for &x in &order {
            for &y in &order {
                if self.lt(y, x) {
                    best[x] = best[x].max(best[y] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Poset {
        // 0 < 1, 2 < 3
        Poset::from_relations(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn closure_and_covers() {
        let p = diamond();
        assert!(p.leq(0, 3));
        assert!(!p.comparable(1, 2));
        assert_eq!(p.covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(p.height(), 2);
        assert!(Poset::from_relations(2, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn open_sets_and_extensions() {
        let p = diamond();
        assert!(p.is_open(&[0, 1].into_iter().collect()));
        assert!(!p.is_open(&[0, 3].into_iter().collect()));
        assert!(p.is_closed(&[1, 3].into_iter().collect()));
        assert_eq!(p.maxima(&[0, 1, 2].into_iter().collect()), vec![1, 2]);
        assert_eq!(p.linear_extension_descending(|x| x), vec![3, 1, 2, 0]);
        assert_eq!(p.linear_extension_descending(|x| core::cmp::Reverse(x)), vec![3, 2, 1, 0]);
        assert_eq!(p.linear_extension_ascending(|x| x), vec![0, 1, 2, 3]);
    }
}
