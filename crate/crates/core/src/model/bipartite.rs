use std::collections::HashMap;

use super::bitset::BitSet;
use super::exact::{ratio, Rational};
use crate::error::{Error, Result};

/// A bipartite graph between ordered vertex lists `left` (U) and `right` (W).
///
/// Adjacency is kept as one bit row per left vertex, indexed by position in
/// `right`. Vertex labels are carried for reporting; every algorithm works on
/// positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: Vec<u32>,
    right: Vec<u32>,
    rows: Vec<BitSet>,
}

impl BipartiteGraph {
    /// An edgeless graph. Sides must be disjoint.
    pub fn new(left: Vec<u32>, right: Vec<u32>) -> Result<Self> {
        let mut seen = HashMap::with_capacity(left.len() + right.len());
        for (side, v) in left.iter().map(|v| (0, v)).chain(right.iter().map(|v| (1, v))) {
            if let Some(prev) = seen.insert(*v, side) {
                let what = if prev == side { "repeated" } else { "shared by both sides" };
                return Err(Error::InvalidGraph(format!("vertex {v} is {what}")));
            }
        }
        Ok(Self::unchecked(left, right))
    }

    /// Graph on positional sides `0..nu` and `nu..nu+nw`.
    pub fn with_sizes(nu: usize, nw: usize) -> Self {
        Self::unchecked((0..nu as u32).collect(), (nu as u32..(nu + nw) as u32).collect())
    }

    pub(crate) fn unchecked(left: Vec<u32>, right: Vec<u32>) -> Self {
        let rows = vec![BitSet::new(right.len()); left.len()];
        BipartiteGraph { left, right, rows }
    }

    /// Builds from edges given as vertex labels `(u, w)` with `u` in `left` and `w` in `right`.
    pub fn from_edges<I>(left: Vec<u32>, right: Vec<u32>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut g = Self::new(left, right)?;
        let li: HashMap<u32, usize> = g.left.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ri: HashMap<u32, usize> = g.right.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        for (u, w) in edges {
            let (i, j) = match (li.get(&u), ri.get(&w)) {
                (Some(&i), Some(&j)) => (i, j),
                _ => match (li.get(&w), ri.get(&u)) {
                    (Some(&i), Some(&j)) => (i, j),
                    _ => return Err(Error::InvalidGraph(format!("edge ({u}, {w}) is not a cross pair"))),
                },
            };
            g.rows[i].insert(j);
        }
        Ok(g)
    }

    pub fn from_rows(left: Vec<u32>, right: Vec<u32>, rows: Vec<BitSet>) -> Result<Self> {
        let g = Self::new(left, right)?;
        if rows.len() != g.left.len() || rows.iter().any(|r| r.len() != g.right.len()) {
            return Err(Error::InvalidGraph("row shape does not match sides".into()));
        }
        Ok(BipartiteGraph { rows, ..g })
    }

    pub(crate) fn from_rows_unchecked(left: Vec<u32>, right: Vec<u32>, rows: Vec<BitSet>) -> Self {
        debug_assert_eq!(rows.len(), left.len());
        BipartiteGraph { left, right, rows }
    }

    pub fn left(&self) -> &[u32] {
        &self.left
    }

    pub fn right(&self) -> &[u32] {
        &self.right
    }

    pub fn left_len(&self) -> usize {
        self.left.len()
    }

    pub fn right_len(&self) -> usize {
        self.right.len()
    }

    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitSet {
        &self.rows[i]
    }

    #[inline]
    pub fn has_edge_at(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn add_edge_at(&mut self, i: usize, j: usize) {
        self.rows[i].insert(j);
    }

    pub fn remove_edge_at(&mut self, i: usize, j: usize) {
        self.rows[i].remove(j);
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].count()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum()
    }

    /// `|E| / (|U||W|)`, or an error when a side is empty.
    pub fn density(&self) -> Result<Rational> {
        let n = self.left.len() * self.right.len();
        if n == 0 {
            return Err(Error::EmptySide);
        }
        Ok(ratio(self.edge_count() as u64, n as u64))
    }

    /// Edges as positional pairs, row-major.
    pub fn edge_positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |j| (i, j)))
    }

    /// Edges as vertex-label pairs, row-major.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edge_positions().map(|(i, j)| (self.left[i], self.right[j]))
    }

    /// The bipartite complement on the same sides.
    pub fn complement(&self) -> Self {
        BipartiteGraph {
            left: self.left.clone(),
            right: self.right.clone(),
            rows: self.rows.iter().map(BitSet::complement).collect(),
        }
    }

    /// The graph with sides swapped.
    pub fn transpose(&self) -> Self {
        let mut rows = vec![BitSet::new(self.left.len()); self.right.len()];
        for (i, j) in self.edge_positions() {
            rows[j].insert(i);
        }
        BipartiteGraph { left: self.right.clone(), right: self.left.clone(), rows }
    }

    pub fn same_sides(&self, other: &Self) -> bool {
        self.left == other.left && self.right == other.right
    }

    /// Whether the two edge sets share no pair. Sides must match.
    pub fn is_edge_disjoint(&self, other: &Self) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| !a.intersects(b))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if !self.same_sides(other) {
            return Err(Error::Precondition("graphs have different sides".into()));
        }
        let mut g = self.clone();
        for (a, b) in g.rows.iter_mut().zip(&other.rows) {
            a.union_with(b);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_and_counts() {
        let g = BipartiteGraph::from_edges(vec![0, 1], vec![2, 3, 4], [(0, 2), (1, 4), (3, 1)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.density().unwrap(), ratio(1, 2));
        assert!(g.has_edge_at(1, 1));
        assert_eq!(g.complement().edge_count(), 3);
        assert_eq!(g.transpose().transpose(), g);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2), (1, 3), (1, 4)]);
    }

    #[test]
    fn rejects_bad_sides() {
        assert!(BipartiteGraph::new(vec![0, 1], vec![1, 2]).is_err());
        assert!(BipartiteGraph::new(vec![0, 0], vec![1]).is_err());
        assert!(BipartiteGraph::from_edges(vec![0], vec![1], [(0, 5)]).is_err());
        assert_eq!(BipartiteGraph::with_sizes(0, 3).density(), Err(Error::EmptySide));
    }
}
