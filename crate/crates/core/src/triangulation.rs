//! Simplicial subdivisions of the cells of D_1.
//!
//! The first subdivision takes a tetrahedron for every flag (vertex, edge,
//! face, cell) of the arrangement. Further levels are barycentric
//! subdivisions of the previous one. Every vertex records the open
//! arrangement cell containing it, and vertex ids within a tetrahedron are
//! ordered by that cell's dimension.

use crate::arrangement::ArrangementComplex;
use crate::geometry::P3;
use crate::rational::Q;
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Vertex(u32),
    Edge(u32),
    Face(u32),
    Cell(u32),
}

impl Node {
    pub fn dim(self) -> u8 {
        match self {
            Node::Vertex(_) => 0,
            Node::Edge(_) => 1,
            Node::Face(_) => 2,
            Node::Cell(_) => 3,
        }
    }
}

pub type Tri = [u32; 3];
pub type Seg = [u32; 2];

#[derive(Debug, Clone)]
pub struct BaseComplex {
    pub arr: ArrangementComplex,
    /// Number of barycentric subdivisions applied to the flag complex.
    pub level: u32,
    pub positions: Vec<P3>,
    /// Open arrangement cell containing each vertex.
    pub carriers: Vec<Node>,
    /// Corner ids, ascending.
    pub tets: Vec<[u32; 4]>,
    pub tet_index: HashMap<[u32; 4], u32>,
    /// Neighbour across the face opposite each corner.
    pub nbr: Vec<[Option<(u32, u8)>; 4]>,
    pub tet_cell: Vec<u32>,
    edge_segs: Vec<Vec<Seg>>,
}

/// Face of a tetrahedron opposite corner `i`.
pub fn face_of(t: &[u32; 4], i: usize) -> Tri {
    let mut out = [0; 3];
    let mut k = 0;
    for (j, &v) in t.iter().enumerate() {
        if j != i {
            out[k] = v;
            k += 1;
        }
    }
    out
}

/// Local index of `v` among the corners, if present.
pub fn corner(t: &[u32; 4], v: u32) -> Option<usize> {
    t.iter().position(|&x| x == v)
}

impl BaseComplex {
    /// Flag subdivision of every cell with winding number at least 1.
    pub fn new(arr: ArrangementComplex) -> Self {
        let nv = arr.vertices.len() as u32;
        let ne = arr.edges.len() as u32;
        let nf = arr.faces.len() as u32;
        let (off_e, off_f, off_c) = (nv, nv + ne, nv + ne + nf);
        let mut positions = arr.vertices.clone();
        let mut carriers: Vec<Node> = (0..nv).map(Node::Vertex).collect();
        let half = Q::new(1.into(), 2.into());
        for (e, edge) in arr.edges.iter().enumerate() {
            let [a, b] = edge.ends;
            positions.push(arr.vertices[a as usize].add(&arr.vertices[b as usize]).scale(&half));
            carriers.push(Node::Edge(e as u32));
        }
        for (f, face) in arr.faces.iter().enumerate() {
            positions.push(face.centroid.clone());
            carriers.push(Node::Face(f as u32));
        }
        for (c, cell) in arr.cells.iter().enumerate() {
            positions.push(cell.centroid.clone());
            carriers.push(Node::Cell(c as u32));
        }
        let mut tets = Vec::new();
        for (c, cell) in arr.cells.iter().enumerate() {
            if arr.region_winding[c] < 1 {
                continue;
            }
            for &f in &cell.faces {
                for &e in &arr.faces[f as usize].edges {
                    for &v in &arr.edges[e as usize].ends {
                        tets.push(([v, off_e + e, off_f + f, off_c + c as u32], c as u32));
                    }
                }
            }
        }
        Self::assemble(arr, 1, positions, carriers, tets)
    }

    /// Simplex of this complex whose barycentre is each vertex of the
    /// barycentric subdivision, by subdivided vertex id. Ids grow with
    /// dimension, so subdivided tetrahedra list their corners as a flag
    /// vertex < edge < triangle < tetrahedron.
    pub fn barycentric_vertices(&self) -> Vec<Vec<u32>> {
        let mut ids: [BTreeSet<Vec<u32>>; 4] = Default::default();
        for t in &self.tets {
            for mask in 1u32..16 {
                let s: Vec<u32> = (0..4).filter(|&i| mask >> i & 1 == 1).map(|i| t[i]).collect();
                ids[s.len() - 1].insert(s);
            }
        }
        ids.into_iter().flatten().collect()
    }

    /// Barycentric subdivision: a tetrahedron for every chain
    /// vertex < edge < triangle < tetrahedron of the current complex.
    pub fn subdivide(&self) -> Self {
        let simplices = self.barycentric_vertices();
        let index: BTreeMap<&[u32], u32> = simplices.iter().enumerate().map(|(i, s)| (s.as_slice(), i as u32)).collect();
        let mut positions = Vec::with_capacity(simplices.len());
        let mut carriers = Vec::with_capacity(simplices.len());
        for s in &simplices {
            let w = Q::new(1.into(), (s.len() as i64).into());
            let mut p = P3::zero();
            for &v in s {
                p = p.add(&self.positions[v as usize]);
            }
            positions.push(p.scale(&w));
            carriers.push(self.carrier(s));
        }
        let id = |s: &[u32]| index[s];
        let mut tets = Vec::with_capacity(self.tets.len() * 24);
        for (ti, t) in self.tets.iter().enumerate() {
            for perm in PERMUTATIONS {
                let mut corners = [0u32; 4];
                for k in 0..4 {
                    let mut s: Vec<u32> = perm[..=k].iter().map(|&i| t[i]).collect();
                    s.sort_unstable();
                    corners[k] = id(&s);
                }
                tets.push((corners, self.tet_cell[ti]));
            }
        }
        Self::assemble(self.arr.clone(), self.level + 1, positions, carriers, tets)
    }

    /// Cones every listed tetrahedron from a new vertex at its barycentre.
    /// Triangles of the current complex are kept, so 2-complexes built on it
    /// remain subcomplexes.
    pub fn stellar(&self, split: &BTreeSet<u32>) -> Self {
        let mut positions = self.positions.clone();
        let mut carriers = self.carriers.clone();
        let quarter = Q::new(1.into(), 4.into());
        let mut tets = Vec::with_capacity(self.tets.len() + 3 * split.len());
        for (ti, t) in self.tets.iter().enumerate() {
            if !split.contains(&(ti as u32)) {
                tets.push((*t, self.tet_cell[ti]));
                continue;
            }
            // The new id is the largest and its carrier is a cell, so corners stay
            // ordered by carrier dimension.
            let c = positions.len() as u32;
            let mut p = P3::zero();
            for &v in t {
                p = p.add(&self.positions[v as usize]);
            }
            positions.push(p.scale(&quarter));
            carriers.push(self.carrier(t));
            for i in 0..4 {
                let f = face_of(t, i);
                tets.push(([f[0], f[1], f[2], c], self.tet_cell[ti]));
            }
        }
        Self::assemble(self.arr.clone(), self.level, positions, carriers, tets)
    }

    /// Splits every listed edge at its midpoint, halving each tetrahedron
    /// around it. The midpoint takes the carrier of the edge.
    pub fn bisect(&self, segs: &BTreeSet<Seg>) -> Self {
        let mut positions = self.positions.clone();
        let mut carriers = self.carriers.clone();
        let half = Q::new(1.into(), 2.into());
        let mut tets: Vec<([u32; 4], u32)> = self.tets.iter().copied().zip(self.tet_cell.iter().copied()).collect();
        for &[a, b] in segs {
            let m = positions.len() as u32;
            positions.push(positions[a as usize].add(&positions[b as usize]).scale(&half));
            carriers.push(carrier_of(&carriers, &[a, b]));
            let mut next = Vec::with_capacity(tets.len());
            for (t, cell) in tets {
                if !(t.contains(&a) && t.contains(&b)) {
                    next.push((t, cell));
                    continue;
                }
                for drop in [a, b] {
                    let mut c = t.map(|v| if v == drop { m } else { v });
                    c.sort_unstable();
                    next.push((c, cell));
                }
            }
            tets = next;
        }
        Self::assemble(self.arr.clone(), self.level, positions, carriers, tets)
    }

    fn assemble(arr: ArrangementComplex, level: u32, positions: Vec<P3>, carriers: Vec<Node>, mut tets: Vec<([u32; 4], u32)>) -> Self {
        tets.sort_unstable();
        let tet_cell: Vec<u32> = tets.iter().map(|t| t.1).collect();
        let tets: Vec<[u32; 4]> = tets.into_iter().map(|t| t.0).collect();
        let tet_index: HashMap<[u32; 4], u32> = tets.iter().enumerate().map(|(i, t)| (*t, i as u32)).collect();
        let mut by_face: HashMap<Tri, Vec<(u32, u8)>> = HashMap::new();
        for (ti, t) in tets.iter().enumerate() {
            for i in 0..4 {
                by_face.entry(face_of(t, i)).or_default().push((ti as u32, i as u8));
            }
        }
        let mut nbr = vec![[None; 4]; tets.len()];
        for list in by_face.values() {
            assert!(list.len() <= 2, "triangle in more than two tetrahedra");
            if let [a, b] = list[..] {
                nbr[a.0 as usize][a.1 as usize] = Some(b);
                nbr[b.0 as usize][b.1 as usize] = Some(a);
            }
        }
        let mut edge_segs: Vec<BTreeSet<Seg>> = vec![BTreeSet::new(); arr.edges.len()];
        for t in &tets {
            for a in 0..4 {
                for b in a + 1..4 {
                    let s = [t[a], t[b]];
                    if let Node::Edge(e) = carrier_of(&carriers, &s) {
                        edge_segs[e as usize].insert(s);
                    }
                }
            }
        }
        let edge_segs = edge_segs.into_iter().map(|s| s.into_iter().collect()).collect();
        BaseComplex { arr, level, positions, carriers, tets, tet_index, nbr, tet_cell, edge_segs }
    }

    /// Open arrangement cell containing the interior of a simplex.
    pub fn carrier(&self, s: &[u32]) -> Node {
        carrier_of(&self.carriers, s)
    }

    pub fn position(&self, id: u32) -> P3 {
        self.positions[id as usize].clone()
    }

    pub fn winding(&self, tet: u32) -> i64 {
        self.arr.region_winding[self.tet_cell[tet as usize] as usize]
    }

    pub fn len(&self) -> usize {
        self.tets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tets.is_empty()
    }

    /// Arrangement face carrying a triangle, when the triangle lies in one.
    pub fn carrier_face(&self, t: &Tri) -> Option<u32> {
        match self.carrier(t) {
            Node::Face(f) => Some(f),
            _ => None,
        }
    }

    /// Arrangement edge carrying a segment, when the segment lies in one.
    pub fn carrier_edge(&self, s: &Seg) -> Option<u32> {
        match self.carrier(s) {
            Node::Edge(e) => Some(e),
            _ => None,
        }
    }

    /// Segments subdividing an arrangement edge.
    pub fn edge_segments(&self, e: u32) -> &[Seg] {
        &self.edge_segs[e as usize]
    }

    /// Segments subdividing a set of arrangement edges.
    pub fn graph_segments(&self, edges: &[u32]) -> BTreeSet<Seg> {
        edges.iter().flat_map(|&e| self.edge_segments(e).iter().copied()).collect()
    }

    /// Tetrahedra with winding at least `k`.
    pub fn stratum_tets(&self, k: i64) -> Vec<u32> {
        (0..self.tets.len() as u32).filter(|&t| self.winding(t) >= k).collect()
    }

    /// Tetrahedron on the other side of the face of `t` opposite corner `i`.
    pub fn across(&self, t: u32, i: usize) -> Option<(u32, u8)> {
        self.nbr[t as usize][i]
    }

    /// Signed volume orientation of a tetrahedron (+1 or -1).
    pub fn orientation(&self, t: u32) -> i32 {
        let [a, b, c, d] = self.tets[t as usize].map(|v| self.position(v));
        crate::geometry::orient3d(&a, &b, &c, &d)
    }
}

fn carrier_of(carriers: &[Node], s: &[u32]) -> Node {
    s.iter().map(|&v| carriers[v as usize]).max_by_key(|n| n.dim()).expect("empty simplex")
}

const PERMUTATIONS: [[usize; 4]; 24] = {
    let mut out = [[0; 4]; 24];
    let mut k = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                if a != b && b != c && a != c {
                    out[k] = [a, b, c, 6 - a - b - c];
                    k += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::build_arrangement;
    use crate::samples;

    #[test]
    fn octahedron_subdivision() {
        let a = build_arrangement(&samples::octahedron(), 10_000).unwrap();
        let t = BaseComplex::new(a);
        // One cell, 8 triangular faces: 8 * 3 * 2 flags.
        assert_eq!(t.len(), 48);
        let boundary = t.nbr.iter().flatten().filter(|x| x.is_none()).count();
        assert_eq!(boundary, 48);
        for i in 0..t.len() as u32 {
            assert_ne!(t.orientation(i), 0);
        }
    }

    #[test]
    fn subdivision_keeps_boundary_and_carriers() {
        let a = build_arrangement(&samples::octahedron(), 10_000).unwrap();
        let t = BaseComplex::new(a).subdivide();
        assert_eq!(t.len(), 48 * 24);
        let boundary = t.nbr.iter().flatten().filter(|x| x.is_none()).count();
        assert_eq!(boundary, 48 * 6);
        for (i, c) in t.tets.iter().enumerate() {
            assert_ne!(t.orientation(i as u32), 0);
            assert!(c.windows(2).all(|w| t.carriers[w[0] as usize].dim() <= t.carriers[w[1] as usize].dim()));
        }
        let coarse = BaseComplex::new(t.arr.clone());
        for e in 0..t.arr.edges.len() as u32 {
            assert_eq!(t.edge_segments(e).len(), 2 * coarse.edge_segments(e).len());
        }
        assert_eq!(t.graph_segments(&(0..t.arr.edges.len() as u32).collect::<Vec<_>>()).len(), 12 * 4);
    }

    #[test]
    fn stellar_split_keeps_faces() {
        let a = build_arrangement(&samples::octahedron(), 10_000).unwrap();
        let t = BaseComplex::new(a);
        let split: BTreeSet<u32> = [0, 5, 17].into();
        let s = t.stellar(&split);
        assert_eq!(s.len(), t.len() + 9);
        assert_eq!(s.positions.len(), t.positions.len() + 3);
        for c in &t.tets {
            for i in 0..4 {
                let f = face_of(c, i);
                assert!(s.tets.iter().any(|d| (0..4).any(|j| face_of(d, j) == f)));
            }
        }
        for (i, c) in s.tets.iter().enumerate() {
            assert_ne!(s.orientation(i as u32), 0);
            assert!(c.windows(2).all(|w| s.carriers[w[0] as usize].dim() <= s.carriers[w[1] as usize].dim()));
        }
        let boundary = s.nbr.iter().flatten().filter(|x| x.is_none()).count();
        assert_eq!(boundary, 48);
    }

    #[test]
    fn bisection_keeps_boundary_and_volume_signs() {
        let a = build_arrangement(&samples::octahedron(), 10_000).unwrap();
        let t = BaseComplex::new(a);
        let c = t.tets[3];
        let star = t.tets.iter().filter(|d| d.contains(&c[2]) && d.contains(&c[3])).count();
        let s = t.bisect(&[[c[2], c[3]]].into());
        assert_eq!(s.len(), t.len() + star);
        assert!(s.tets.iter().all(|d| !(d.contains(&c[2]) && d.contains(&c[3]))));
        for i in 0..s.len() as u32 {
            assert_ne!(s.orientation(i), 0);
        }
        let boundary = s.nbr.iter().flatten().filter(|x| x.is_none()).count();
        let on_boundary = t.nbr.iter().enumerate().any(|(ti, n)| (0..4).any(|i| n[i].is_none() && face_of(&t.tets[ti], i).contains(&c[2]) && face_of(&t.tets[ti], i).contains(&c[3])));
        assert_eq!(boundary, if on_boundary { 50 } else { 48 });
    }
}
