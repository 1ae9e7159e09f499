//! The octahedral sum `Σ_{u0,u1,w0,w1,z0,z1} Π_{(i,j,k)∈{0,1}³} f(u_i, w_j, z_k)`
//! for an integer-valued `f` supported on a sparse set of cells.
//!
//! Writing `M(u, w) = f(u, w, z0) f(u, w, z1)`, the sum over the `u` and `w`
//! coordinates for a fixed `(z0, z1)` is `Σ_{w0,w1} (Σ_u M(u,w0) M(u,w1))²`.
//! `M` is supported on the cells present under both `z0` and `z1`, so only
//! those are visited; the `(z0, z1)` and `(z1, z0)` terms coincide.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::model::exact::WideSum;

/// `f` grouped by its third coordinate: `cells[z]` lists `(u * nw + w, f)`
/// sorted by key, zero values omitted.
#[derive(Clone, Debug)]
pub(crate) struct SparseCube {
    pub nw: usize,
    pub cells: Vec<Vec<(u32, i64)>>,
}

impl SparseCube {
    pub fn new(nw: usize, nz: usize) -> Self {
        SparseCube { nw, cells: vec![Vec::new(); nz] }
    }

    /// Cells must be pushed in increasing `(u, w)` order per `z`.
    pub fn push(&mut self, u: usize, w: usize, z: usize, v: i64) {
        if v != 0 {
            self.cells[z].push(((u * self.nw + w) as u32, v));
        }
    }

    pub fn octahedral_sum(&self) -> BigInt {
        let nz = self.cells.len();
        let support: usize = self.cells.iter().map(Vec::len).sum();
        if support * nz < 1 << 16 {
            let mut scratch = Scratch::new(self.nw);
            let mut acc = BigInt::zero();
            for z0 in 0..nz {
                for z1 in z0..nz {
                    let term = self.pair_term(z0, z1, &mut scratch);
                    acc += if z1 == z0 { term } else { term * 2 };
                }
            }
            return acc;
        }
        let parts: Vec<BigInt> = (0..nz)
            .into_par_iter()
            .map(|z0| {
                let mut scratch = Scratch::new(self.nw);
                let mut acc = BigInt::zero();
                for z1 in z0..nz {
                    let term = self.pair_term(z0, z1, &mut scratch);
                    if z1 == z0 {
                        acc += term;
                    } else {
                        acc += term * 2;
                    }
                }
                acc
            })
            .collect();
        parts.into_iter().sum()
    }

    fn pair_term(&self, z0: usize, z1: usize, s: &mut Scratch) -> BigInt {
        let (a, b) = (&self.cells[z0], &self.cells[z1]);
        // Intersect the two supports; entries arrive grouped by u.
        s.row.clear();
        let mut cur_u = u32::MAX;
        let (mut x, mut y) = (0, 0);
        let mut overflow = false;
        while x < a.len() && y < b.len() {
            let (ka, va) = a[x];
            let (kb, vb) = b[y];
            if ka < kb {
                x += 1;
            } else if kb < ka {
                y += 1;
            } else {
                let u = ka / self.nw as u32;
                if u != cur_u {
                    overflow |= s.flush_row();
                    cur_u = u;
                }
                s.row.push(((ka % self.nw as u32) as usize, va as i128 * vb as i128));
                x += 1;
                y += 1;
            }
        }
        overflow |= s.flush_row();
        let mut acc = WideSum::default();
        if overflow {
            s.reset();
            return self.pair_term_big(z0, z1);
        }
        for &idx in &s.touched {
            let v = s.p[idx];
            acc.add_square(v, 1);
            s.p[idx] = 0;
        }
        s.touched.clear();
        acc.total()
    }

    /// Same as `pair_term`, entirely in big integers.
    fn pair_term_big(&self, z0: usize, z1: usize) -> BigInt {
        use std::collections::BTreeMap;
        let (a, b) = (&self.cells[z0], &self.cells[z1]);
        let bmap: BTreeMap<u32, i64> = b.iter().copied().collect();
        let mut rows: BTreeMap<u32, Vec<(usize, BigInt)>> = BTreeMap::new();
        for &(k, va) in a {
            if let Some(&vb) = bmap.get(&k) {
                rows.entry(k / self.nw as u32)
                    .or_default()
                    .push(((k % self.nw as u32) as usize, BigInt::from(va) * BigInt::from(vb)));
            }
        }
        let mut p: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for row in rows.values() {
            for (w0, m0) in row {
                for (w1, m1) in row {
                    *p.entry((*w0, *w1)).or_insert_with(BigInt::zero) += m0 * m1;
                }
            }
        }
        p.values().map(|v| v * v).sum()
    }
}

struct Scratch {
    nw: usize,
    row: Vec<(usize, i128)>,
    p: Vec<i128>,
    touched: Vec<usize>,
}

impl Scratch {
    fn new(nw: usize) -> Self {
        Scratch { nw, row: Vec::new(), p: vec![0; nw * nw], touched: Vec::new() }
    }

    /// Adds the outer product of the pending row into `p`; true on overflow.
    fn flush_row(&mut self) -> bool {
        let mut overflow = false;
        for &(w0, m0) in &self.row {
            for &(w1, m1) in &self.row {
                let idx = w0 * self.nw + w1;
                let add = m0.checked_mul(m1);
                match add.and_then(|v| self.p[idx].checked_add(v)) {
                    Some(v) => {
                        if self.p[idx] == 0 {
                            self.touched.push(idx);
                        }
                        self.p[idx] = v;
                    }
                    None => overflow = true,
                }
            }
        }
        self.row.clear();
        overflow
    }

    fn reset(&mut self) {
        for &idx in &self.touched {
            self.p[idx] = 0;
        }
        self.touched.clear();
        self.row.clear();
    }
}

/// Direct six-fold enumeration over a dense `f` indexed `(u * nw + w) * nz + z`.
pub(crate) fn octahedral_brute(f: &[i64], nu: usize, nw: usize, nz: usize) -> BigInt {
    let at = |u: usize, w: usize, z: usize| f[(u * nw + w) * nz + z];
    let mut acc = WideSum::default();
    for u0 in 0..nu {
        for u1 in 0..nu {
            for w0 in 0..nw {
                for w1 in 0..nw {
                    for z0 in 0..nz {
                        for z1 in 0..nz {
                            let vals = [
                                at(u0, w0, z0),
                                at(u0, w0, z1),
                                at(u0, w1, z0),
                                at(u0, w1, z1),
                                at(u1, w0, z0),
                                at(u1, w0, z1),
                                at(u1, w1, z0),
                                at(u1, w1, z1),
                            ];
                            if vals.contains(&0) {
                                continue;
                            }
                            match vals.iter().try_fold(1i128, |p, &v| p.checked_mul(v as i128)) {
                                Some(p) => acc.add(p),
                                None => {
                                    let p: BigInt = vals.iter().map(|&v| BigInt::from(v)).product();
                                    acc.add_big(&p);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    acc.total()
}
