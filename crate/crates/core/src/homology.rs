//! Integral homology of a glued tetrahedral complex.
//!
//! Boundary matrices are reduced by eliminating unit pivots in sparse form;
//! the remainder goes through a dense Smith normal form.

use crate::cx::{local_edge, Cx, Skeleton};
use crate::group::{smith_invariants, AbelianGroup};
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};

/// Sparse integer matrix stored by columns.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<BTreeMap<u32, i64>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols: vec![BTreeMap::new(); cols] }
    }

    pub fn add(&mut self, r: u32, c: usize, v: i64) {
        let e = self.cols[c].entry(r).or_insert(0);
        *e += v;
        if *e == 0 {
            self.cols[c].remove(&r);
        }
    }

    /// Rank and invariant factors other than 1. `None` when an entry
    /// overflows during elimination.
    pub fn smith(&self) -> Option<(usize, Vec<BigInt>)> {
        let mut cols = self.cols.clone();
        let mut row_cols: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); self.rows];
        for (c, col) in cols.iter().enumerate() {
            for &r in col.keys() {
                row_cols[r as usize].insert(c as u32);
            }
        }
        let mut alive = vec![true; cols.len()];
        let mut rank = 0;
        let mut progress = true;
        while progress {
            progress = false;
            for pc in 0..cols.len() {
                if !alive[pc] {
                    continue;
                }
                // Unit entry of this column whose row meets the fewest columns.
                let pick = cols[pc].iter().filter(|(_, v)| v.abs() == 1).min_by_key(|(&r, _)| row_cols[r as usize].len());
                let Some((&pr, &p)) = pick else { continue };
                let pivot = cols[pc].clone();
                let others: Vec<u32> = row_cols[pr as usize].iter().copied().filter(|&c| c as usize != pc).collect();
                for c in others {
                    let f = cols[c as usize][&pr] * p;
                    for (&r, &v) in &pivot {
                        let e = cols[c as usize].entry(r).or_insert(0);
                        *e = e.checked_sub(f.checked_mul(v)?)?;
                        if *e == 0 {
                            cols[c as usize].remove(&r);
                            row_cols[r as usize].remove(&c);
                        } else {
                            row_cols[r as usize].insert(c);
                        }
                    }
                }
                // Row pr now meets only the pivot column: drop both.
                for &r in pivot.keys() {
                    row_cols[r as usize].remove(&(pc as u32));
                }
                alive[pc] = false;
                cols[pc].clear();
                rank += 1;
                progress = true;
            }
        }
        let rest: Vec<usize> = (0..cols.len()).filter(|&c| alive[c] && !cols[c].is_empty()).collect();
        if rest.is_empty() {
            return Some((rank, Vec::new()));
        }
        let rows: Vec<u32> = rest.iter().flat_map(|&c| cols[c].keys().copied()).collect::<BTreeSet<_>>().into_iter().collect();
        let index: BTreeMap<u32, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut dense = vec![vec![BigInt::from(0); rest.len()]; rows.len()];
        for (j, &c) in rest.iter().enumerate() {
            for (r, &v) in &cols[c] {
                dense[index[r]][j] = BigInt::from(v);
            }
        }
        let (r, torsion) = smith_invariants(dense, rest.len());
        Some((rank + r, torsion))
    }
}

/// Boundary matrices ∂₁, ∂₂, ∂₃ in the vertex order of the base ids.
pub fn boundary_matrices(cx: &Cx, sk: &Skeleton) -> [SparseMatrix; 3] {
    let mut d1 = SparseMatrix::new(sk.n_verts(), sk.n_edges());
    for e in 0..sk.n_edges() {
        let (x, k) = sk.edge_rep[e];
        let (a, b) = crate::cx::LOCAL_EDGES[k as usize];
        d1.add(sk.vert_of[x as usize][b], e, 1);
        d1.add(sk.vert_of[x as usize][a], e, -1);
    }
    let mut d2 = SparseMatrix::new(sk.n_edges(), sk.n_faces());
    for f in 0..sk.n_faces() {
        let (x, i) = sk.face_members[f][0];
        let c: Vec<usize> = (0..4).filter(|&j| j != i as usize).collect();
        let edge = |p: usize, q: usize| sk.edge_of[x as usize][local_edge(c[p], c[q])];
        d2.add(edge(1, 2), f, 1);
        d2.add(edge(0, 2), f, -1);
        d2.add(edge(0, 1), f, 1);
    }
    let mut d3 = SparseMatrix::new(sk.n_faces(), cx.len());
    for x in 0..cx.len() {
        for i in 0..4 {
            d3.add(sk.face_of[x][i], x, if i % 2 == 0 { 1 } else { -1 });
        }
    }
    [d1, d2, d3]
}

/// H₀..H₃ with integer coefficients, or `None` on arithmetic overflow.
pub fn homology(cx: &Cx, sk: &Skeleton) -> Option<Vec<AbelianGroup>> {
    let [d1, d2, d3] = boundary_matrices(cx, sk);
    let (r1, _) = d1.smith()?;
    let (r2, t1) = d2.smith()?;
    let (r3, t2) = d3.smith()?;
    let sizes = [sk.n_verts(), sk.n_edges(), sk.n_faces(), cx.len()];
    let ranks = [0, r1, r2, r3, 0];
    let torsion = [Vec::new(), t1, t2, Vec::new()];
    Some(
        (0..4)
            .map(|i| AbelianGroup { free_rank: sizes[i] - ranks[i] - ranks[i + 1], torsion: torsion[i].clone() })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn dense(m: &SparseMatrix) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::from(0); m.cols.len()]; m.rows];
        for (c, col) in m.cols.iter().enumerate() {
            for (&r, &v) in col {
                out[r as usize][c] = BigInt::from(v);
            }
        }
        out
    }

    #[test]
    fn sparse_elimination_matches_dense_smith() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (rows, cols) = (rng.gen_range(1..7), rng.gen_range(1..7));
            let mut m = SparseMatrix::new(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    if rng.gen_bool(0.4) {
                        m.add(r as u32, c, rng.gen_range(-3..=3));
                    }
                }
            }
            let expect = smith_invariants(dense(&m), cols);
            assert_eq!(m.smith().unwrap(), expect);
        }
    }

    #[test]
    fn torsion_survives_elimination() {
        // [[2, 1], [0, 3]] has invariant factors 1, 6.
        let mut m = SparseMatrix::new(2, 2);
        m.add(0, 0, 2);
        m.add(0, 1, 1);
        m.add(1, 1, 3);
        let (rank, torsion) = m.smith().unwrap();
        assert_eq!(rank, 2);
        assert_eq!(torsion.iter().map(|d| d.to_i64().unwrap()).collect::<Vec<_>>(), vec![6]);
    }
}
