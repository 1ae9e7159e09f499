use serde::{Deserialize, Serialize};

use super::bipartite::BipartiteGraph;
use crate::error::{Error, Result};

/// Address `(i, j, s, α, β, γ)` of the triad `P_ij^α ∪ P_is^β ∪ P_js^γ`, `i < j < s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriadAddress {
    pub i: usize,
    pub j: usize,
    pub s: usize,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
}

/// A 3-partite graph on parts `(V_0, V_1, V_2)` with pair graphs
/// `G[V_0,V_1]`, `G[V_0,V_2]` and `G[V_1,V_2]`, each oriented with the
/// lower-numbered part on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triad {
    pub parts: [Vec<u32>; 3],
    pub pair_graphs: [BipartiteGraph; 3],
    pub address: Option<TriadAddress>,
}

impl Triad {
    pub fn new(parts: [Vec<u32>; 3], pair_graphs: [BipartiteGraph; 3]) -> Result<Self> {
        let want = [(0, 1), (0, 2), (1, 2)];
        for (g, (a, b)) in pair_graphs.iter().zip(want) {
            if g.left() != parts[a].as_slice() || g.right() != parts[b].as_slice() {
                return Err(Error::InvalidGraph(format!("pair graph ({a},{b}) does not connect parts {a} and {b}")));
            }
        }
        let mut all: Vec<u32> = parts.iter().flatten().copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("triad parts are not disjoint".into()));
        }
        Ok(Triad { parts, pair_graphs, address: None })
    }

    /// Triad on positional parts of sizes `(a, b, c)`, labelled `0..a+b+c`.
    pub fn from_sizes(a: usize, b: usize, c: usize) -> Self {
        let p0: Vec<u32> = (0..a as u32).collect();
        let p1: Vec<u32> = (a as u32..(a + b) as u32).collect();
        let p2: Vec<u32> = ((a + b) as u32..(a + b + c) as u32).collect();
        let g = [
            BipartiteGraph::unchecked(p0.clone(), p1.clone()),
            BipartiteGraph::unchecked(p0.clone(), p2.clone()),
            BipartiteGraph::unchecked(p1.clone(), p2.clone()),
        ];
        Triad { parts: [p0, p1, p2], pair_graphs: g, address: None }
    }

    pub fn view(&self) -> TriadView<'_> {
        TriadView {
            parts: [&self.parts[0], &self.parts[1], &self.parts[2]],
            g01: &self.pair_graphs[0],
            g02: &self.pair_graphs[1],
            g12: &self.pair_graphs[2],
        }
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.parts[0].len(), self.parts[1].len(), self.parts[2].len()]
    }
}

/// Borrowed form of a triad, used by every statistic so that triads of a
/// decomposition need not be materialised.
#[derive(Clone, Copy, Debug)]
pub struct TriadView<'a> {
    pub parts: [&'a [u32]; 3],
    pub g01: &'a BipartiteGraph,
    pub g02: &'a BipartiteGraph,
    pub g12: &'a BipartiteGraph,
}

impl<'a> TriadView<'a> {
    pub fn sizes(&self) -> [usize; 3] {
        [self.parts[0].len(), self.parts[1].len(), self.parts[2].len()]
    }

    pub fn pair_graphs(&self) -> [&'a BipartiteGraph; 3] {
        [self.g01, self.g02, self.g12]
    }

    /// Calls `f(u, w, z)` on the positions of every triangle, in
    /// lexicographic order.
    pub fn for_each_triangle(&self, mut f: impl FnMut(usize, usize, usize)) {
        for u in 0..self.parts[0].len() {
            let zu = self.g02.row(u);
            for w in self.g01.row(u).iter() {
                let zw = self.g12.row(w);
                for z in zu.intersection(zw).iter() {
                    f(u, w, z);
                }
            }
        }
    }

    pub fn triangle_count(&self) -> u64 {
        let mut c = 0u64;
        for u in 0..self.parts[0].len() {
            let zu = self.g02.row(u);
            for w in self.g01.row(u).iter() {
                c += zu.and_count(self.g12.row(w)) as u64;
            }
        }
        c
    }

    #[inline]
    pub fn is_triangle(&self, u: usize, w: usize, z: usize) -> bool {
        self.g01.has_edge_at(u, w) && self.g02.has_edge_at(u, z) && self.g12.has_edge_at(w, z)
    }

    /// Vertex labels of the triangle at positions `(u, w, z)`.
    #[inline]
    pub fn labels(&self, u: usize, w: usize, z: usize) -> (u32, u32, u32) {
        (self.parts[0][u], self.parts[1][w], self.parts[2][z])
    }
}
