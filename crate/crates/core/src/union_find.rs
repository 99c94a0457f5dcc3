//! Disjoint-set forest with path compression and union by size.
//!
//! The representative of a set is a *label* stored at the tree root rather
//! than the root index itself, so callers can designate any member (here: the
//! minimum-DFN vertex of a merged SCC) as the set's representative no matter
//! how the trees are linked internally.

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    label: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            label: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// The designated representative of the set containing `x`.
    pub fn rep(&mut self, x: u32) -> u32 {
        let root = self.find(x);
        self.label[root as usize]
    }

    /// Merges the sets of `x` and `rep`, making `rep` the representative of
    /// the combined set.
    pub fn merge(&mut self, x: u32, rep: u32) {
        let a = self.find(x);
        let b = self.find(rep);
        if a == b {
            self.label[a as usize] = rep;
            return;
        }
        let (big, small) = if self.size[a as usize] >= self.size[b as usize] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.label[big as usize] = rep;
    }

    pub fn same_set(&mut self, x: u32, y: u32) -> bool {
        self.find(x) == self.find(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representative_is_the_designated_label() {
        let mut uf = UnionFind::new(8);
        uf.merge(6, 5);
        uf.merge(7, 5);
        assert_eq!(uf.rep(6), 5);
        assert_eq!(uf.rep(7), 5);
        // Merging a whole set under a new representative relabels everyone.
        uf.merge(5, 2);
        assert_eq!(uf.rep(6), 2);
        assert_eq!(uf.rep(7), 2);
        assert_eq!(uf.rep(5), 2);
        assert_eq!(uf.rep(3), 3);
    }

    #[test]
    fn union_by_size_keeps_rep_stable() {
        let mut uf = UnionFind::new(6);
        uf.merge(1, 0);
        uf.merge(2, 0);
        uf.merge(3, 0);
        // Attach the big set to a singleton; label must follow the new rep.
        uf.merge(0, 5);
        for v in [0, 1, 2, 3, 5] {
            assert_eq!(uf.rep(v), 5);
        }
        assert!(uf.same_set(1, 5));
        assert!(!uf.same_set(4, 5));
    }
}
