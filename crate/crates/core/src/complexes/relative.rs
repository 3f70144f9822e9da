//! Triples (M, X₀, G ∪ N): cutting along a good complex and building simple
//! complexes on the pieces.

use super::appropriate::{is_appropriate, Appropriateness};
use super::good::TwoComplex;
use super::simple::{construct_simple_complex, SimpleComplex, SimpleError};
use super::{Limits, SegSet};
use crate::cx::Cx;
use crate::triangulation::{BaseComplex, Tri};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum CutError {
    #[error("triangle {0:?} is not an interior face of the complex")]
    NotInterior(Tri),
}

/// One piece of M cut along X₀.
#[derive(Debug, Clone)]
pub struct CutComponent {
    pub cx: Cx,
    /// Tetrahedra of the piece as indices into M.
    pub tets: Vec<u32>,
    /// G_k: boundary segments of the piece lying over G ∪ N.
    pub graph: SegSet,
}

/// M with every face over X₀ unglued.
pub fn cut_complex(m: &Cx, t: &BaseComplex, x0: &TwoComplex) -> Result<Cx, CutError> {
    let mut interior = std::collections::BTreeSet::new();
    for (x, tet) in m.tets.iter().enumerate() {
        for (i, g) in tet.glue.iter().enumerate() {
            if g.is_some() {
                interior.insert(m.base_face(t, (x as u32, i as u8)));
            }
        }
    }
    if let Some(tri) = x0.tris.iter().find(|tri| !interior.contains(*tri)) {
        return Err(CutError::NotInterior(*tri));
    }
    let mut cut = m.clone();
    cut.cut(t, |tri| x0.tris.contains(tri));
    Ok(cut)
}

/// The components obtained by cutting X₀ off M, with their pulled-back graphs.
pub fn cut_along(m: &Cx, t: &BaseComplex, x0: &TwoComplex, gn: &SegSet) -> Result<Vec<CutComponent>, CutError> {
    let cut = cut_complex(m, t, x0)?;
    Ok(cut
        .split()
        .into_iter()
        .map(|(cx, tets)| {
            let graph = super::Boundary::new(&cx, t).graph_segments(gn);
            CutComponent { cx, tets, graph }
        })
        .collect())
}

/// A vertex of the boundary graph of a piece with degree other than 2 or 3.
pub fn graph_degree_violation(cx: &Cx, t: &BaseComplex, g: &SegSet) -> Option<(u32, usize)> {
    let sk = cx.skeleton(t);
    let mut degree: BTreeMap<u32, usize> = BTreeMap::new();
    for e in 0..sk.n_edges() {
        let s = sk.edge_base[e];
        if sk.edge_boundary[e] && g.contains(&super::seg(s[0], s[1])) {
            let (x, k) = sk.edge_rep[e];
            let (a, b) = crate::cx::LOCAL_EDGES[k as usize];
            for c in [a, b] {
                *degree.entry(sk.vert_of[x as usize][c]).or_default() += 1;
            }
        }
    }
    degree.into_iter().find(|&(_, d)| d != 2 && d != 3).map(|(v, d)| (sk.vert_base[v as usize], d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TripleVerdict {
    Yes,
    /// The pulled-back graph of a piece has a vertex of bad degree.
    BadGraph { component: usize, vertex: u32, degree: usize },
    No { component: usize, detail: Appropriateness },
    Undecided { component: usize, detail: Appropriateness },
}

impl TripleVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, TripleVerdict::Yes)
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, TripleVerdict::Undecided { .. })
    }
}

/// Appropriateness of (M, X₀, G ∪ N). A definite `no` anywhere wins over
/// an undecided piece.
pub fn is_appropriate_triple(m: &Cx, t: &BaseComplex, x0: &TwoComplex, gn: &SegSet, limits: &Limits) -> Result<TripleVerdict, CutError> {
    let mut verdict = TripleVerdict::Yes;
    for (k, piece) in cut_along(m, t, x0, gn)?.iter().enumerate() {
        if let Some((vertex, degree)) = graph_degree_violation(&piece.cx, t, &piece.graph) {
            return Ok(TripleVerdict::BadGraph { component: k, vertex, degree });
        }
        match is_appropriate(&piece.cx, t, &piece.graph, limits) {
            Appropriateness::Yes => {}
            detail @ Appropriateness::No { .. } => return Ok(TripleVerdict::No { component: k, detail }),
            detail @ Appropriateness::Undecided { .. } => {
                if verdict.is_yes() {
                    verdict = TripleVerdict::Undecided { component: k, detail };
                }
            }
        }
    }
    Ok(verdict)
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum RelativeError {
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Simple(#[from] SimpleError),
}

/// A (M, X₀, G ∪ N)-simple complex: one part per piece of M cut along X₀.
/// Its good subcomplexes are the X₀-good subcomplexes.
pub fn construct_relative_simple_complex(m: &Cx, t: &BaseComplex, x0: &TwoComplex, gn: &SegSet, limits: &Limits) -> Result<SimpleComplex, RelativeError> {
    let cut = cut_complex(m, t, x0)?;
    Ok(construct_simple_complex(&cut, t, gn, limits)?)
}
