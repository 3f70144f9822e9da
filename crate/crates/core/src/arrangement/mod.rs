//! Exact plane arrangement of an immersed surface inside a padded bounding box.
//!
//! The box is split by every supporting plane of the surface (binary space
//! partition over the full plane set). Cells are convex polytopes; faces,
//! edges and vertices are shared between neighbouring cells and keyed by
//! exact coordinates.

mod build;
pub mod strata;
pub mod transversal;
pub mod winding;

use crate::geometry::{Plane, P3};
use crate::surface::ImmersedSurface;
use std::collections::BTreeSet;
use thiserror::Error;

pub use build::DEFAULT_CELL_BUDGET;
pub use strata::{is_thin_trivalent, strata, EmbeddedGraph, Stratum, StrataError};
pub use transversal::{validate_transversality, TransversalityReport, Violation, ViolationKind};
pub use winding::{winding_number, WindingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error("arrangement exceeds the cell budget of {budget} cells")]
    CellBudget { budget: usize },
    #[error("surface is not transverse: {0}")]
    NotTransverse(String),
}

/// Maximal edge-connected set of coplanar triangles.
#[derive(Debug, Clone)]
pub struct Patch {
    pub plane: u32,
    pub triangles: Vec<usize>,
    /// +1 when the triangle normals agree with the canonical plane normal.
    pub normal_sign: i32,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub ends: [u32; 2],
    pub faces: Vec<u32>,
    pub cells: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct Face {
    pub plane: u32,
    /// Vertices in cyclic order.
    pub verts: Vec<u32>,
    pub edges: Vec<u32>,
    /// Cell on the negative / positive side of the plane; `None` outside the box.
    pub neg: Option<u32>,
    pub pos: Option<u32>,
    /// Patches whose closure contains the face.
    pub patches: Vec<u32>,
    pub centroid: P3,
}

impl Face {
    pub fn is_image(&self) -> bool {
        !self.patches.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = u32> + '_ {
        self.neg.into_iter().chain(self.pos)
    }

    /// Cell across the face from `c`.
    pub fn other(&self, c: u32) -> Option<u32> {
        if self.neg == Some(c) {
            self.pos
        } else if self.pos == Some(c) {
            self.neg
        } else {
            panic!("cell {c} not adjacent to face")
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub verts: Vec<u32>,
    pub edges: Vec<u32>,
    pub faces: Vec<u32>,
    pub centroid: P3,
}

/// Per-edge local sheet structure of the image.
#[derive(Debug, Clone, Default)]
pub struct EdgeSheets {
    /// Groups of image faces, one per local sheet.
    pub sheets: Vec<Vec<u32>>,
    /// Patches making up each sheet, parallel to `sheets`.
    pub sheet_patches: Vec<Vec<u32>>,
}

#[derive(Debug, Clone)]
pub struct ArrangementComplex {
    pub planes: Vec<Plane>,
    pub vertices: Vec<P3>,
    /// Planes through each vertex, sorted.
    pub vertex_planes: Vec<Vec<u32>>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    pub cells: Vec<Cell>,
    pub patches: Vec<Patch>,
    pub region_winding: Vec<i64>,
    pub edge_sheets: Vec<EdgeSheets>,
    /// Patch groups meeting at each vertex (one group per local sheet).
    pub vertex_sheets: Vec<Vec<Vec<u32>>>,
    pub lo: P3,
    pub hi: P3,
    pub(crate) crease_joins: build::CreaseJoins,
}

/// Number of box planes at the start of `planes`.
pub const BOX_PLANES: usize = 6;

impl ArrangementComplex {
    /// Builds the arrangement without checking transversality.
    pub fn build_unchecked(s: &ImmersedSurface, cell_budget: usize) -> Result<Self, ArrangementError> {
        build::build(s, cell_budget)
    }

    pub fn is_box_plane(&self, p: u32) -> bool {
        (p as usize) < BOX_PLANES
    }

    pub fn image_faces(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.faces.len() as u32).filter(|&f| self.faces[f as usize].is_image())
    }

    pub fn sheet_count(&self, f: u32) -> usize {
        self.faces[f as usize].patches.len()
    }

    /// Edges with exactly 2 local sheets.
    pub fn double_locus(&self) -> Vec<u32> {
        (0..self.edges.len() as u32)
            .filter(|&e| self.edge_sheets[e as usize].sheets.len() == 2)
            .collect()
    }

    /// Vertices with exactly 3 local sheets.
    pub fn triple_points(&self) -> Vec<u32> {
        (0..self.vertices.len() as u32)
            .filter(|&v| self.vertex_sheets[v as usize].len() == 3)
            .collect()
    }

    pub fn is_image_edge(&self, e: u32) -> bool {
        !self.edge_sheets[e as usize].sheets.is_empty()
    }

    /// Winding number of a face's side; 0 outside the box.
    pub fn side_winding(&self, cell: Option<u32>) -> i64 {
        cell.map_or(0, |c| self.region_winding[c as usize])
    }

    /// Complement regions: cells flooded across non-image faces.
    pub fn regions(&self) -> Vec<Vec<u32>> {
        let mut region = vec![usize::MAX; self.cells.len()];
        let mut out: Vec<Vec<u32>> = Vec::new();
        for start in 0..self.cells.len() {
            if region[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start as u32];
            region[start] = id;
            let mut i = 0;
            while i < members.len() {
                let c = members[i];
                i += 1;
                for &f in &self.cells[c as usize].faces {
                    let face = &self.faces[f as usize];
                    if face.is_image() {
                        continue;
                    }
                    if let Some(n) = face.other(c) {
                        if region[n as usize] == usize::MAX {
                            region[n as usize] = id;
                            members.push(n);
                        }
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        // Cells touching the box boundary all belong to the unbounded region.
        let mut outer = BTreeSet::new();
        for f in &self.faces {
            if f.neg.is_none() || f.pos.is_none() {
                for c in f.cells() {
                    outer.insert(region[c as usize]);
                }
            }
        }
        let mut merged: Vec<u32> = Vec::new();
        let mut rest = Vec::new();
        for (i, r) in out.into_iter().enumerate() {
            if outer.contains(&i) {
                merged.extend(r);
            } else {
                rest.push(r);
            }
        }
        merged.sort_unstable();
        let mut all = vec![merged];
        all.extend(rest);
        all
    }

    /// Edge id with the given endpoints.
    pub fn find_edge(&self, a: u32, b: u32) -> Option<u32> {
        let key = [a.min(b), a.max(b)];
        self.edges
            .binary_search_by(|e| e.ends.cmp(&key))
            .ok()
            .map(|i| i as u32)
    }

    pub fn max_winding(&self) -> i64 {
        self.region_winding.iter().copied().max().unwrap_or(0)
    }

    pub fn min_winding(&self) -> (i64, Option<u32>) {
        let mut best = (0, None);
        for (c, &w) in self.region_winding.iter().enumerate() {
            if w < best.0 {
                best = (w, Some(c as u32));
            }
        }
        best
    }

    /// Boundary-of-boundary check: every edge of every cell is used by exactly two of its facets.
    pub fn check_incidence(&self) -> Result<(), String> {
        for (ci, c) in self.cells.iter().enumerate() {
            let mut uses = std::collections::BTreeMap::<u32, usize>::new();
            for &f in &c.faces {
                for &e in &self.faces[f as usize].edges {
                    *uses.entry(e).or_default() += 1;
                }
            }
            if uses.len() != c.edges.len() || uses.values().any(|&n| n != 2) {
                return Err(format!("cell {ci}: facet edges do not close up"));
            }
            let euler = c.verts.len() as i64 - c.edges.len() as i64 + c.faces.len() as i64;
            if euler != 2 {
                return Err(format!("cell {ci}: boundary Euler characteristic {euler}"));
            }
        }
        for (fi, f) in self.faces.iter().enumerate() {
            if f.verts.len() != f.edges.len() {
                return Err(format!("face {fi}: vertex and edge counts differ"));
            }
        }
        Ok(())
    }
}

/// Builds the arrangement after a successful transversality check.
pub fn build_arrangement(s: &ImmersedSurface, cell_budget: usize) -> Result<ArrangementComplex, ArrangementError> {
    let a = ArrangementComplex::build_unchecked(s, cell_budget)?;
    let report = transversal::check_arrangement(&a, s);
    if !report.ok() {
        return Err(ArrangementError::NotTransverse(report.summary()));
    }
    Ok(a)
}
