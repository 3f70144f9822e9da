//! Winding-number strata D_k and their interface graphs G_k.

use super::ArrangementComplex;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("no extension exists: region containing cell {cell} has winding number {omega}")]
    NegativeWinding { cell: u32, omega: i64 },
    #[error("graph is not embedded in the host surface: edge {0}")]
    NotEmbedded(u32),
}

/// Subgraph of the arrangement 1-skeleton.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EmbeddedGraph {
    pub vertices: Vec<u32>,
    pub edges: Vec<u32>,
}

impl EmbeddedGraph {
    pub fn from_edges(a: &ArrangementComplex, edges: impl IntoIterator<Item = u32>) -> Self {
        let edges: BTreeSet<u32> = edges.into_iter().collect();
        let vertices: BTreeSet<u32> = edges.iter().flat_map(|&e| a.edges[e as usize].ends).collect();
        EmbeddedGraph { vertices: vertices.into_iter().collect(), edges: edges.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn degrees(&self, a: &ArrangementComplex) -> BTreeMap<u32, usize> {
        let mut d = BTreeMap::new();
        for &e in &self.edges {
            for &v in &a.edges[e as usize].ends {
                *d.entry(v).or_default() += 1;
            }
        }
        d
    }

    /// Number of connected components.
    pub fn component_count(&self, a: &ArrangementComplex) -> usize {
        let idx: BTreeMap<u32, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = crate::util::UnionFind::new(self.vertices.len());
        for &e in &self.edges {
            let [x, y] = a.edges[e as usize].ends;
            uf.union(idx[&x], idx[&y]);
        }
        uf.labels().1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Stratum {
    pub k: u32,
    /// Sorted cells with winding ≥ k.
    pub cells: Vec<u32>,
    /// Connected components of the region (cells adjacent through faces).
    pub components: Vec<Vec<u32>>,
    /// Faces of ∂D_k.
    pub boundary_faces: Vec<u32>,
    /// G_k.
    pub graph: EmbeddedGraph,
}

fn boundary_faces(a: &ArrangementComplex, k: i64) -> Vec<u32> {
    (0..a.faces.len() as u32)
        .filter(|&f| {
            let face = &a.faces[f as usize];
            let x = a.side_winding(face.neg) >= k;
            let y = a.side_winding(face.pos) >= k;
            x != y
        })
        .collect()
}

fn closure_edges(a: &ArrangementComplex, faces: &[u32]) -> BTreeSet<u32> {
    faces.iter().flat_map(|&f| a.faces[f as usize].edges.iter().copied()).collect()
}

/// D_1 ⊇ D_2 ⊇ … ⊇ D_n with their graphs.
pub fn strata(a: &ArrangementComplex) -> Result<Vec<Stratum>, StrataError> {
    if let (w, Some(c)) = a.min_winding() {
        return Err(StrataError::NegativeWinding { cell: c, omega: w });
    }
    let n = a.max_winding();
    let mut out = Vec::new();
    let mut prev_boundary: Option<BTreeSet<u32>> = None;
    for k in 1..=n {
        let cells: Vec<u32> = (0..a.cells.len() as u32).filter(|&c| a.region_winding[c as usize] >= k).collect();
        let bfaces = boundary_faces(a, k);
        let bedges = closure_edges(a, &bfaces);
        let graph = match &prev_boundary {
            None => EmbeddedGraph::default(),
            Some(pb) => EmbeddedGraph::from_edges(a, bedges.intersection(pb).copied()),
        };
        let components = components(a, &cells);
        out.push(Stratum { k: k as u32, cells, components, boundary_faces: bfaces, graph });
        prev_boundary = Some(bedges);
    }
    Ok(out)
}

fn components(a: &ArrangementComplex, cells: &[u32]) -> Vec<Vec<u32>> {
    let idx: BTreeMap<u32, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut uf = crate::util::UnionFind::new(cells.len());
    for &c in cells {
        for &f in &a.cells[c as usize].faces {
            if let Some(o) = a.faces[f as usize].other(c) {
                if let Some(&j) = idx.get(&o) {
                    uf.union(idx[&c], j);
                }
            }
        }
    }
    let (labels, k) = uf.labels();
    let mut out = vec![Vec::new(); k];
    for (i, &c) in cells.iter().enumerate() {
        out[labels[i]].push(c);
    }
    out
}

/// Checks the structural identities relating strata to the singular set.
pub fn check_strata(a: &ArrangementComplex, st: &[Stratum]) -> Result<(), String> {
    let double: BTreeSet<u32> = a.double_locus().into_iter().collect();
    let triple: BTreeSet<u32> = a.triple_points().into_iter().collect();
    for (i, s) in st.iter().enumerate() {
        if i + 1 < st.len() {
            let next: BTreeSet<u32> = st[i + 1].cells.iter().copied().collect();
            let cur: BTreeSet<u32> = s.cells.iter().copied().collect();
            if !next.is_subset(&cur) {
                return Err(format!("D_{} is not contained in D_{}", s.k + 1, s.k));
            }
        }
        if s.graph.edges.iter().any(|e| !double.contains(e)) {
            return Err(format!("G_{} leaves the double locus", s.k));
        }
        let bedges = closure_edges(a, &s.boundary_faces);
        let lhs: BTreeSet<u32> = bedges.intersection(&double).copied().collect();
        let mut rhs: BTreeSet<u32> = s.graph.edges.iter().copied().collect();
        if let Some(n) = st.get(i + 1) {
            rhs.extend(n.graph.edges.iter().copied());
        }
        if lhs != rhs {
            return Err(format!("S ∩ ∂D_{} differs from G_{} ∪ G_{}", s.k, s.k, s.k + 1));
        }
        for (v, d) in s.graph.degrees(a) {
            if d != 2 && d != 3 {
                return Err(format!("G_{}: vertex {v} has degree {d}", s.k));
            }
            if (d == 3) != triple.contains(&v) {
                return Err(format!("G_{}: vertex {v} degree {d} disagrees with triple points", s.k));
            }
        }
    }
    Ok(())
}

/// Cyclic order of host edges around vertex `v` in a closed surface made of `host` faces.
fn cyclic_edges(a: &ArrangementComplex, host: &BTreeSet<u32>, v: u32) -> Vec<u32> {
    let mut face_edges: Vec<(u32, [u32; 2])> = Vec::new();
    for &f in host {
        let face = &a.faces[f as usize];
        if let Some(i) = face.verts.iter().position(|&x| x == v) {
            let n = face.verts.len();
            let prev = face.verts[(i + n - 1) % n];
            let next = face.verts[(i + 1) % n];
            let e1 = a.find_edge(v, prev).expect("face edge");
            let e2 = a.find_edge(v, next).expect("face edge");
            face_edges.push((f, [e1, e2]));
        }
    }
    if face_edges.is_empty() {
        return Vec::new();
    }
    let mut order = vec![face_edges[0].1[0]];
    let mut used = vec![false; face_edges.len()];
    let mut cur_edge = face_edges[0].1[0];
    loop {
        let Some(i) = (0..face_edges.len()).find(|&i| !used[i] && face_edges[i].1.contains(&cur_edge)) else { break };
        used[i] = true;
        let [x, y] = face_edges[i].1;
        cur_edge = if x == cur_edge { y } else { x };
        if cur_edge == order[0] {
            break;
        }
        order.push(cur_edge);
    }
    order
}

/// Whether `g2` meets `g1` only in degree-3 vertices of both with alternating edges.
pub fn is_thin_trivalent(
    a: &ArrangementComplex,
    g2: &EmbeddedGraph,
    g1: &EmbeddedGraph,
    host: &[u32],
) -> Result<bool, StrataError> {
    let host: BTreeSet<u32> = host.iter().copied().collect();
    let host_edges: BTreeSet<u32> = host.iter().flat_map(|&f| a.faces[f as usize].edges.iter().copied()).collect();
    for &e in g1.edges.iter().chain(&g2.edges) {
        if !host_edges.contains(&e) {
            return Err(StrataError::NotEmbedded(e));
        }
    }
    let e1: BTreeSet<u32> = g1.edges.iter().copied().collect();
    let e2: BTreeSet<u32> = g2.edges.iter().copied().collect();
    if e1.intersection(&e2).next().is_some() {
        return Ok(false);
    }
    let d1 = g1.degrees(a);
    let d2 = g2.degrees(a);
    for (&v, &deg2) in &d2 {
        let Some(&deg1) = d1.get(&v) else { continue };
        if deg1 != 3 || deg2 != 3 {
            return Ok(false);
        }
        let order: Vec<u32> = cyclic_edges(a, &host, v)
            .into_iter()
            .filter(|e| e1.contains(e) || e2.contains(e))
            .collect();
        if order.len() != 6 {
            return Ok(false);
        }
        let alternate = (0..6).all(|i| e1.contains(&order[i]) != e1.contains(&order[(i + 1) % 6]));
        if !alternate {
            return Ok(false);
        }
    }
    Ok(true)
}
