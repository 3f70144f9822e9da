//! Fundamental groups from the dual graph of a tetrahedral complex.

use crate::cx::{Cx, FaceRef, LOCAL_EDGES};
use crate::group::{free_reduce, simplify, Presentation, Simplified, Word};
use crate::triangulation::BaseComplex;
use serde::Serialize;
use std::collections::VecDeque;

/// Generators are the glued faces off a spanning tree of tetrahedra;
/// relators read the faces crossed around each interior edge.
#[derive(Debug, Clone)]
pub struct DualPresentation {
    pub pres: Presentation,
    /// Letter for leaving tet `x` through face `i`, 0 on tree faces and
    /// boundary faces.
    pub cross: Vec<[i32; 4]>,
    pub root: u32,
}

impl DualPresentation {
    /// Presentation of the component containing tet 0.
    pub fn new(cx: &Cx, t: &BaseComplex) -> Self {
        let n = cx.len();
        let mut cross = vec![[0i32; 4]; n];
        let mut tree = vec![[false; 4]; n];
        let mut seen = vec![false; n];
        if n > 0 {
            seen[0] = true;
            let mut queue = VecDeque::from([0u32]);
            while let Some(x) = queue.pop_front() {
                for i in 0..4 {
                    if let Some((y, j)) = cx.tets[x as usize].glue[i] {
                        if !seen[y as usize] {
                            seen[y as usize] = true;
                            tree[x as usize][i] = true;
                            tree[y as usize][j as usize] = true;
                            queue.push_back(y);
                        }
                    }
                }
            }
        }
        let mut n_gens = 0usize;
        for x in 0..n {
            for i in 0..4 {
                let Some((y, j)) = cx.tets[x].glue[i] else { continue };
                if !seen[x] || tree[x][i] || (y as usize, j as usize) < (x, i) {
                    continue;
                }
                n_gens += 1;
                cross[x][i] = n_gens as i32;
                cross[y as usize][j as usize] = -(n_gens as i32);
            }
        }
        let sk = cx.skeleton(t);
        let mut relators = Vec::new();
        for e in 0..sk.n_edges() {
            let (x, k) = sk.edge_rep[e];
            if sk.edge_boundary[e] || !seen[x as usize] {
                continue;
            }
            let (a, b) = LOCAL_EDGES[k as usize];
            let c = cx.corners(t, x);
            let star = cx.edge_star(t, x, &[c[a], c[b]]);
            debug_assert!(star.closed);
            let word: Word = star.tets.iter().map(|&(y, _, out)| cross[y as usize][out as usize]).filter(|&l| l != 0).collect();
            if !word.is_empty() {
                relators.push(word);
            }
        }
        DualPresentation { pres: Presentation { n_gens, relators }, cross, root: 0 }
    }

    /// Word read along a path of crossed faces.
    pub fn word(&self, path: &[FaceRef]) -> Word {
        let w: Word = path.iter().map(|&(x, i)| self.cross[x as usize][i as usize]).filter(|&l| l != 0).collect();
        free_reduce(&w)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FundamentalGroup {
    pub raw: Presentation,
    pub simplified: Presentation,
    pub moves: usize,
    /// The move budget ran out before simplification settled.
    pub exhausted: bool,
}

/// Cap on relator length during simplification.
pub const MAX_WORD_TOTAL: usize = 2_000_000;

pub fn simplify_dual(d: &DualPresentation, tracked: &[Word], budget: usize) -> Simplified {
    simplify(&d.pres, tracked, budget, MAX_WORD_TOTAL)
}

/// π₁ of a connected complex, based at tet 0.
pub fn fundamental_group(cx: &Cx, t: &BaseComplex, budget: usize) -> FundamentalGroup {
    let d = DualPresentation::new(cx, t);
    let s = simplify_dual(&d, &[], budget);
    FundamentalGroup { raw: d.pres, simplified: s.pres, moves: s.moves, exhausted: s.exhausted }
}
