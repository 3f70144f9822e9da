//! Transversality of the immersion, checked on the arrangement.

use super::{build::DEFAULT_CELL_BUDGET, ArrangementComplex, ArrangementError};
use crate::geometry::{coplanar_interiors_overlap, P3};
use crate::rational::sign;
use crate::surface::ImmersedSurface;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Two distinct sheets share a 2-cell.
    TwoDimensionalOverlap,
    /// Triangles of one flat patch overlap each other.
    PatchSelfOverlap,
    /// More sheets meet than a transverse immersion allows.
    ExcessSheets,
    /// A local sheet at an edge does not consist of exactly two faces.
    UnpairedSheet,
    /// Two sheets touch along an edge without crossing.
    TangentialContact,
    /// Two sheets meet at a vertex without a double curve through it.
    NonTransverseVertex,
    /// A vertex star of the surface meets itself.
    StarSelfIntersection,
    /// Winding numbers do not change by the crossing rule across some face.
    WindingInconsistent,
    /// The arrangement could not be built within the cell budget.
    Budget,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    pub triangles: Vec<usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TransversalityReport {
    pub violations: Vec<Violation>,
    /// Arrangement edges with two sheets.
    pub double_locus: Vec<u32>,
    /// Arrangement vertices with three sheets.
    pub triple_points: Vec<u32>,
}

impl TransversalityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
        for v in &self.violations {
            *kinds.entry(format!("{:?}", v.kind)).or_default() += 1;
        }
        let first = self.violations.first().map(|v| v.detail.clone()).unwrap_or_default();
        format!("{kinds:?}; first: {first}")
    }

    /// Distinct kinds present, in a stable order.
    pub fn kinds(&self) -> Vec<ViolationKind> {
        let mut out: Vec<ViolationKind> = Vec::new();
        for v in &self.violations {
            if !out.contains(&v.kind) {
                out.push(v.kind);
            }
        }
        out
    }
}

/// Builds the arrangement with the default budget and checks it.
pub fn validate_transversality(s: &ImmersedSurface) -> TransversalityReport {
    match ArrangementComplex::build_unchecked(s, DEFAULT_CELL_BUDGET) {
        Ok(a) => check_arrangement(&a, s),
        Err(ArrangementError::CellBudget { budget }) => TransversalityReport {
            violations: vec![Violation {
                kind: ViolationKind::Budget,
                detail: format!("arrangement exceeds {budget} cells"),
                triangles: Vec::new(),
            }],
            ..Default::default()
        },
        Err(e) => TransversalityReport {
            violations: vec![Violation { kind: ViolationKind::Budget, detail: e.to_string(), triangles: Vec::new() }],
            ..Default::default()
        },
    }
}

pub(crate) fn check_arrangement(a: &ArrangementComplex, s: &ImmersedSurface) -> TransversalityReport {
    let mut out = TransversalityReport::default();
    let patch_tris = |ps: &[u32]| -> Vec<usize> {
        let mut t: Vec<usize> = ps.iter().map(|&p| a.patches[p as usize].triangles[0]).collect();
        t.sort_unstable();
        t
    };

    for (pi, patch) in a.patches.iter().enumerate() {
        let drop = a.planes[patch.plane as usize].drop_axis();
        'outer: for (i, &t) in patch.triangles.iter().enumerate() {
            for &u in &patch.triangles[i + 1..] {
                if coplanar_interiors_overlap(drop, s.corners(t), s.corners(u)) {
                    out.violations.push(Violation {
                        kind: ViolationKind::PatchSelfOverlap,
                        detail: format!("triangles {t} and {u} of patch {pi} overlap"),
                        triangles: vec![t, u],
                    });
                    break 'outer;
                }
            }
        }
    }

    for (fi, f) in a.faces.iter().enumerate() {
        if f.patches.len() > 1 {
            out.violations.push(Violation {
                kind: ViolationKind::TwoDimensionalOverlap,
                detail: format!("face {fi} is covered by {} sheets", f.patches.len()),
                triangles: patch_tris(&f.patches),
            });
        }
        if let (Some(n), Some(p)) = (f.neg, f.pos) {
            let delta: i64 = f.patches.iter().map(|&q| a.patches[q as usize].normal_sign as i64).sum();
            if a.region_winding[p as usize] != a.region_winding[n as usize] - delta {
                out.violations.push(Violation {
                    kind: ViolationKind::WindingInconsistent,
                    detail: format!("winding jump across face {fi} disagrees with its sheets"),
                    triangles: patch_tris(&f.patches),
                });
            }
        }
    }

    let mut double = BTreeSet::new();
    for (ei, e) in a.edges.iter().enumerate() {
        let es = &a.edge_sheets[ei];
        for (si, sheet) in es.sheets.iter().enumerate() {
            if sheet.len() != 2 {
                out.violations.push(Violation {
                    kind: ViolationKind::UnpairedSheet,
                    detail: format!("edge {ei}: a local sheet has {} faces", sheet.len()),
                    triangles: patch_tris(&es.sheet_patches[si]),
                });
            }
        }
        match es.sheets.len() {
            0 | 1 => {}
            2 => {
                if es.sheets.iter().all(|s| s.len() == 2) && !alternates(a, e.ends, &es.sheets) {
                    out.violations.push(Violation {
                        kind: ViolationKind::TangentialContact,
                        detail: format!("edge {ei}: two sheets touch without crossing"),
                        triangles: patch_tris(&es.sheet_patches.concat()),
                    });
                }
                double.insert(ei as u32);
            }
            n => out.violations.push(Violation {
                kind: ViolationKind::ExcessSheets,
                detail: format!("edge {ei} has {n} sheets"),
                triangles: patch_tris(&es.sheet_patches.concat()),
            }),
        }
    }

    let mut vertex_double: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &e in &double {
        for &v in &a.edges[e as usize].ends {
            vertex_double.entry(v).or_default().push(e);
        }
    }
    let mut triple = Vec::new();
    for (v, groups) in a.vertex_sheets.iter().enumerate() {
        if groups.len() <= 1 {
            continue;
        }
        let all: Vec<u32> = groups.concat();
        if groups.len() > 3 {
            out.violations.push(Violation {
                kind: ViolationKind::ExcessSheets,
                detail: format!("vertex {v} has {} sheets", groups.len()),
                triangles: patch_tris(&all),
            });
            continue;
        }
        let group_of = |p: u32| groups.iter().position(|g| g.contains(&p));
        let mut pair_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut bad_star = false;
        for &e in vertex_double.get(&(v as u32)).map(|x| x.as_slice()).unwrap_or(&[]) {
            let sp = &a.edge_sheets[e as usize].sheet_patches;
            let (x, y) = (group_of(sp[0][0]), group_of(sp[1][0]));
            match (x, y) {
                (Some(x), Some(y)) if x != y => *pair_count.entry((x.min(y), x.max(y))).or_default() += 1,
                _ => bad_star = true,
            }
        }
        if bad_star {
            out.violations.push(Violation {
                kind: ViolationKind::StarSelfIntersection,
                detail: format!("vertex {v}: one sheet crosses itself"),
                triangles: patch_tris(&all),
            });
            continue;
        }
        let k = groups.len();
        for i in 0..k {
            for j in i + 1..k {
                let c = pair_count.get(&(i, j)).copied().unwrap_or(0);
                if c != 2 {
                    out.violations.push(Violation {
                        kind: ViolationKind::NonTransverseVertex,
                        detail: format!("vertex {v}: sheets {i} and {j} share {c} double edges"),
                        triangles: patch_tris(&all),
                    });
                }
            }
        }
        if k == 3 {
            triple.push(v as u32);
        }
    }
    out.double_locus = double.into_iter().collect();
    out.triple_points = triple;
    out
}

/// Cyclic order of the faces around an edge alternates between the two sheets.
fn alternates(a: &ArrangementComplex, ends: [u32; 2], sheets: &[Vec<u32>]) -> bool {
    let p0 = &a.vertices[ends[0] as usize];
    let d = a.vertices[ends[1] as usize].sub(p0);
    let mut labelled: Vec<(u32, usize)> = Vec::new();
    for (si, s) in sheets.iter().enumerate() {
        for &f in s {
            labelled.push((f, si));
        }
    }
    let order = angular_order(a, p0, &d, labelled.iter().map(|&(f, _)| f).collect());
    let label: BTreeMap<u32, usize> = labelled.into_iter().collect();
    let seq: Vec<usize> = order.iter().map(|f| label[f]).collect();
    (0..seq.len()).all(|i| seq[i] != seq[(i + 1) % seq.len()])
}

/// Faces around an edge through `p0` with direction `d`, sorted by angle.
pub(crate) fn angular_order(a: &ArrangementComplex, p0: &P3, d: &P3, mut faces: Vec<u32>) -> Vec<u32> {
    let axis = (0..3)
        .map(|i| {
            let mut e = P3::zero();
            e.0[i] = crate::rational::int(1);
            e
        })
        .find(|e| !d.cross(e).is_zero())
        .expect("nonzero direction");
    let b1 = d.cross(&axis);
    let b2 = d.cross(&b1);
    let coords = |f: u32| {
        let u = a.faces[f as usize].centroid.sub(p0);
        (u.dot(&b1), u.dot(&b2))
    };
    faces.sort_by(|&f, &g| {
        let (x1, y1) = coords(f);
        let (x2, y2) = coords(g);
        let half = |x: &crate::rational::Q, y: &crate::rational::Q| -> i32 {
            if sign(y) > 0 || (sign(y) == 0 && sign(x) > 0) {
                0
            } else {
                1
            }
        };
        let (h1, h2) = (half(&x1, &y1), half(&x2, &y2));
        if h1 != h2 {
            return h1.cmp(&h2);
        }
        let cross = &x1 * &y2 - &y1 * &x2;
        match sign(&cross) {
            1 => Ordering::Less,
            -1 => Ordering::Greater,
            _ => f.cmp(&g),
        }
    });
    faces
}
