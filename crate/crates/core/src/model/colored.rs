use serde::{Deserialize, Serialize};

use super::bitset::BitSet;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Color {
    Zero = 0,
    One = 1,
    Two = 2,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Zero, Color::One, Color::Two];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Color> {
        Color::ALL.get(i).copied()
    }
}

/// A complete bipartite graph whose cross pairs carry one of three colors.
///
/// Colors 1 and 2 are stored as bit rows; color 0 is everything else, so the
/// three classes always partition `K2[A, B]`. Side labels are opaque ids and
/// may come from different index spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoredBipartiteGraph {
    left: Vec<u32>,
    right: Vec<u32>,
    ones: Vec<BitSet>,
    twos: Vec<BitSet>,
}

impl EdgeColoredBipartiteGraph {
    /// All pairs colored 0.
    pub fn new(left: Vec<u32>, right: Vec<u32>) -> Self {
        let b = right.len();
        let a = left.len();
        EdgeColoredBipartiteGraph { left, right, ones: vec![BitSet::new(b); a], twos: vec![BitSet::new(b); a] }
    }

    pub fn with_sizes(a: usize, b: usize) -> Self {
        Self::new((0..a as u32).collect(), (0..b as u32).collect())
    }

    /// Builds from a row-major color table of length `|A||B|`.
    pub fn from_table(left: Vec<u32>, right: Vec<u32>, table: &[Color]) -> Result<Self> {
        if table.len() != left.len() * right.len() {
            return Err(Error::InvalidGraph(format!(
                "color table has {} entries, expected {}",
                table.len(),
                left.len() * right.len()
            )));
        }
        let b = right.len();
        let mut g = Self::new(left, right);
        for (k, &c) in table.iter().enumerate() {
            g.set(k / b.max(1), k % b.max(1), c);
        }
        Ok(g)
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

    #[inline]
    pub fn color(&self, i: usize, j: usize) -> Color {
        if self.ones[i].contains(j) {
            Color::One
        } else if self.twos[i].contains(j) {
            Color::Two
        } else {
            Color::Zero
        }
    }

    pub fn set(&mut self, i: usize, j: usize, c: Color) {
        self.ones[i].remove(j);
        self.twos[i].remove(j);
        match c {
            Color::One => self.ones[i].insert(j),
            Color::Two => self.twos[i].insert(j),
            Color::Zero => {}
        }
    }

    /// `N_{E_c}(a)` as a bit row over the right side.
    pub fn neighborhood(&self, i: usize, c: Color) -> BitSet {
        match c {
            Color::One => self.ones[i].clone(),
            Color::Two => self.twos[i].clone(),
            Color::Zero => {
                let mut z = self.ones[i].clone();
                z.union_with(&self.twos[i]);
                z.complement()
            }
        }
    }

    pub fn ones_row(&self, i: usize) -> &BitSet {
        &self.ones[i]
    }

    pub fn twos_row(&self, i: usize) -> &BitSet {
        &self.twos[i]
    }

    pub fn degree(&self, i: usize, c: Color) -> usize {
        match c {
            Color::One => self.ones[i].count(),
            Color::Two => self.twos[i].count(),
            Color::Zero => self.right.len() - self.ones[i].count() - self.twos[i].count(),
        }
    }

    pub fn color_count(&self, c: Color) -> usize {
        (0..self.left.len()).map(|i| self.degree(i, c)).sum()
    }

    /// `|N_{E_c}(a) Δ N_{E_c}(a')|` for left positions `a`, `a'`.
    pub fn symdiff(&self, a: usize, b: usize, c: Color) -> usize {
        match c {
            Color::One => self.ones[a].xor_count(&self.ones[b]),
            Color::Two => self.twos[a].xor_count(&self.twos[b]),
            Color::Zero => self.neighborhood(a, Color::Zero).xor_count(&self.neighborhood(b, Color::Zero)),
        }
    }

    /// Row-major color signature of a left vertex.
    pub fn signature(&self, i: usize) -> Vec<Color> {
        (0..self.right.len()).map(|j| self.color(i, j)).collect()
    }
}

/// A complete 3-partite 3-graph on parts `(A, B, C)` whose cross triples carry
/// one of three colors, stored densely in `A`-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoredTripartite3Graph {
    parts: [Vec<u32>; 3],
    colors: Vec<Color>,
}

impl EdgeColoredTripartite3Graph {
    pub fn new(parts: [Vec<u32>; 3], fill: Color) -> Self {
        let n = parts.iter().map(Vec::len).product();
        EdgeColoredTripartite3Graph { parts, colors: vec![fill; n] }
    }

    pub fn from_table(parts: [Vec<u32>; 3], colors: Vec<Color>) -> Result<Self> {
        let n: usize = parts.iter().map(Vec::len).product();
        if colors.len() != n {
            return Err(Error::InvalidGraph(format!("color table has {} entries, expected {n}", colors.len())));
        }
        Ok(EdgeColoredTripartite3Graph { parts, colors })
    }

    pub fn parts(&self) -> &[Vec<u32>; 3] {
        &self.parts
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.parts[0].len(), self.parts[1].len(), self.parts[2].len()]
    }

    #[inline]
    fn offset(&self, a: usize, b: usize, c: usize) -> usize {
        let [_, nb, nc] = self.sizes();
        (a * nb + b) * nc + c
    }

    #[inline]
    pub fn color(&self, a: usize, b: usize, c: usize) -> Color {
        self.colors[self.offset(a, b, c)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, color: Color) {
        let o = self.offset(a, b, c);
        self.colors[o] = color;
    }

    pub fn color_count(&self, c: Color) -> usize {
        self.colors.iter().filter(|&&x| x == c).count()
    }

    /// Counts each color over the box `K3[xs, ys, zs]` given as part positions.
    pub fn count_in_box(&self, xs: &[usize], ys: &[usize], zs: &[usize]) -> [usize; 3] {
        let mut out = [0usize; 3];
        for &a in xs {
            for &b in ys {
                for &c in zs {
                    out[self.color(a, b, c).index()] += 1;
                }
            }
        }
        out
    }
}
