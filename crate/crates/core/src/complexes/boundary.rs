//! The boundary surface of a complex and its regions off a graph.

use super::{seg, SegSet};
use crate::cx::{Cx, FaceRef};
use crate::triangulation::{BaseComplex, Seg, Tri};
use crate::util::UnionFind;
use std::collections::HashMap;

/// A neighbour of a boundary face across one of its edges.
#[derive(Debug, Clone)]
pub struct Adjacency {
    pub seg: Seg,
    pub to: usize,
    /// Glued faces crossed on the way, as the faces left through.
    pub path: Vec<FaceRef>,
}

#[derive(Debug, Clone)]
pub struct Boundary {
    pub faces: Vec<FaceRef>,
    pub tris: Vec<Tri>,
    pub index: HashMap<FaceRef, usize>,
    pub adj: Vec<[Adjacency; 3]>,
}

impl Boundary {
    pub fn new(cx: &Cx, t: &BaseComplex) -> Self {
        let mut faces = Vec::new();
        for (x, tet) in cx.tets.iter().enumerate() {
            for (i, g) in tet.glue.iter().enumerate() {
                if g.is_none() {
                    faces.push((x as u32, i as u8));
                }
            }
        }
        let index: HashMap<FaceRef, usize> = faces.iter().enumerate().map(|(k, &f)| (f, k)).collect();
        let tris: Vec<Tri> = faces.iter().map(|&f| cx.base_face(t, f)).collect();
        let adj = faces
            .iter()
            .zip(&tris)
            .map(|(&(x, i), tri)| {
                [(0, 1), (0, 2), (1, 2)].map(|(a, b)| {
                    let s = seg(tri[a], tri[b]);
                    let (to, path) = cx.boundary_walk(t, x, i, &s);
                    Adjacency { seg: s, to: index[&to], path }
                })
            })
            .collect();
        Boundary { faces, tris, index, adj }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Components of the boundary minus `g`: a label per face and the count.
    pub fn regions(&self, g: &SegSet) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.faces.len());
        for (k, adj) in self.adj.iter().enumerate() {
            for a in adj {
                if !g.contains(&a.seg) {
                    uf.union(k, a.to);
                }
            }
        }
        uf.labels()
    }

    /// Boundary segments lying in `g`.
    pub fn graph_segments(&self, g: &SegSet) -> SegSet {
        self.adj.iter().flatten().map(|a| a.seg).filter(|s| g.contains(s)).collect()
    }

    /// Euler characteristic of the boundary surface.
    pub fn euler_characteristic(&self, cx: &Cx, t: &BaseComplex) -> i64 {
        let sk = cx.skeleton(t);
        let verts = sk.vert_boundary.iter().filter(|&&b| b).count() as i64;
        let edges = sk.edge_boundary.iter().filter(|&&b| b).count() as i64;
        verts - edges + self.faces.len() as i64
    }
}
