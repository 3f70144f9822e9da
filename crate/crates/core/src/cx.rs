//! Tetrahedral complexes lying over the base triangulation.
//!
//! Every tetrahedron remembers the base tetrahedron it maps to and how each
//! of its faces is glued. Gluings always match corners with equal base ids,
//! so the map to the base is simplicial and orientations can be read from
//! base ids. Cutting along a surface is ungluing.

use crate::triangulation::{corner, face_of, BaseComplex, Seg, Tri};
use crate::util::UnionFind;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CxTet {
    pub base: u32,
    pub glue: [Option<(u32, u8)>; 4],
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Cx {
    pub tets: Vec<CxTet>,
}

/// Local edges of a tetrahedron as corner pairs.
pub const LOCAL_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn local_edge(i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    LOCAL_EDGES.iter().position(|&p| p == (i, j)).unwrap()
}

/// Face id (tet, opposite corner).
pub type FaceRef = (u32, u8);

/// Cell classes of a complex.
#[derive(Debug, Clone)]
pub struct Skeleton {
    pub vert_of: Vec<[u32; 4]>,
    pub edge_of: Vec<[u32; 6]>,
    pub face_of: Vec<[u32; 4]>,
    pub vert_base: Vec<u32>,
    pub edge_base: Vec<Seg>,
    pub face_base: Vec<Tri>,
    /// Members of each face class (1 on the boundary, 2 inside).
    pub face_members: Vec<Vec<FaceRef>>,
    pub vert_boundary: Vec<bool>,
    pub edge_boundary: Vec<bool>,
    /// One (tet, local index) representative per class.
    pub vert_rep: Vec<(u32, u8)>,
    pub edge_rep: Vec<(u32, u8)>,
}

impl Skeleton {
    pub fn n_verts(&self) -> usize {
        self.vert_base.len()
    }
    pub fn n_edges(&self) -> usize {
        self.edge_base.len()
    }
    pub fn n_faces(&self) -> usize {
        self.face_base.len()
    }
    pub fn face_is_boundary(&self, f: u32) -> bool {
        self.face_members[f as usize].len() == 1
    }
    pub fn boundary_faces(&self) -> Vec<u32> {
        (0..self.n_faces() as u32).filter(|&f| self.face_is_boundary(f)).collect()
    }
}

/// Tetrahedra around an edge in rotational order.
#[derive(Debug, Clone)]
pub struct EdgeStar {
    /// (tet, face entered through, face left through).
    pub tets: Vec<(u32, u8, u8)>,
    /// True when the star closes up (interior edge).
    pub closed: bool,
}

impl Cx {
    /// Subcomplex of the base spanned by `tets`, glued wherever the base is.
    pub fn from_base(t: &BaseComplex, tets: &[u32]) -> Cx {
        let index: BTreeMap<u32, u32> = tets.iter().enumerate().map(|(i, &b)| (b, i as u32)).collect();
        let tets = tets
            .iter()
            .map(|&b| {
                let mut glue = [None; 4];
                for (i, g) in glue.iter_mut().enumerate() {
                    if let Some((nb, j)) = t.across(b, i) {
                        if let Some(&y) = index.get(&nb) {
                            *g = Some((y, j));
                        }
                    }
                }
                CxTet { base: b, glue }
            })
            .collect();
        Cx { tets }
    }

    /// The same complex over the barycentric subdivision `fine` of `t`.
    /// Returns the fine complex and, per fine tetrahedron, its coarse
    /// tetrahedron; fine tetrahedron `24 x + k` lies in coarse `x`. The fine
    /// face opposite corner 3 is the only one on a coarse face.
    pub fn subdivide(&self, t: &BaseComplex, fine: &BaseComplex) -> (Cx, Vec<u32>) {
        let simplices = t.barycentric_vertices();
        let mut inside: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (f, c) in fine.tets.iter().enumerate() {
            let coarse = &simplices[c[3] as usize];
            let b = t.tet_index[&[coarse[0], coarse[1], coarse[2], coarse[3]]];
            inside.entry(b).or_default().push(f as u32);
        }
        let slot = |b: u32, f: u32| inside[&b].iter().position(|&g| g == f).unwrap() as u32;
        let mut tets = Vec::with_capacity(self.len() * 24);
        let mut owner = Vec::with_capacity(self.len() * 24);
        for (x, tet) in self.tets.iter().enumerate() {
            let corners = &t.tets[tet.base as usize];
            for &f in &inside[&tet.base] {
                let mut glue = [None; 4];
                for (j, g) in glue.iter_mut().enumerate() {
                    let Some((nf, nj)) = fine.across(f, j) else { continue };
                    if j < 3 {
                        *g = Some((x as u32 * 24 + slot(tet.base, nf), nj));
                        continue;
                    }
                    let tri = &simplices[fine.tets[f as usize][2] as usize];
                    let i = corners.iter().position(|v| !tri.contains(v)).unwrap();
                    if let Some((y, _)) = tet.glue[i] {
                        *g = Some((y * 24 + slot(self.tets[y as usize].base, nf), nj));
                    }
                }
                tets.push(CxTet { base: f, glue });
                owner.push(x as u32);
            }
        }
        (Cx { tets }, owner)
    }

    pub fn len(&self) -> usize {
        self.tets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tets.is_empty()
    }

    pub fn base_face(&self, t: &BaseComplex, f: FaceRef) -> Tri {
        face_of(&t.tets[self.tets[f.0 as usize].base as usize], f.1 as usize)
    }

    pub fn corners<'a>(&self, t: &'a BaseComplex, x: u32) -> &'a [u32; 4] {
        &t.tets[self.tets[x as usize].base as usize]
    }

    pub fn unglue(&mut self, x: u32, i: u8) {
        if let Some((y, j)) = self.tets[x as usize].glue[i as usize].take() {
            self.tets[y as usize].glue[j as usize] = None;
        }
    }

    pub fn glue(&mut self, a: FaceRef, b: FaceRef) {
        assert!(self.tets[a.0 as usize].glue[a.1 as usize].is_none());
        assert!(self.tets[b.0 as usize].glue[b.1 as usize].is_none());
        self.tets[a.0 as usize].glue[a.1 as usize] = Some(b);
        self.tets[b.0 as usize].glue[b.1 as usize] = Some(a);
    }

    /// Unglues every glued face whose base triangle satisfies `pred`.
    pub fn cut(&mut self, t: &BaseComplex, pred: impl Fn(&Tri) -> bool) {
        for x in 0..self.tets.len() as u32 {
            for i in 0..4u8 {
                if self.tets[x as usize].glue[i as usize].is_some() && pred(&self.base_face(t, (x, i))) {
                    self.unglue(x, i);
                }
            }
        }
    }

    /// Disjoint union; returns the offset of each part.
    pub fn disjoint_union(parts: &[&Cx]) -> (Cx, Vec<u32>) {
        let mut out = Cx::default();
        let mut offsets = Vec::new();
        for p in parts {
            let off = out.tets.len() as u32;
            offsets.push(off);
            for tet in &p.tets {
                let glue = tet.glue.map(|g| g.map(|(y, j)| (y + off, j)));
                out.tets.push(CxTet { base: tet.base, glue });
            }
        }
        (out, offsets)
    }

    /// Component label per tetrahedron and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.tets.len());
        for (x, tet) in self.tets.iter().enumerate() {
            for (y, _) in tet.glue.iter().flatten() {
                uf.union(x, *y as usize);
            }
        }
        uf.labels()
    }

    /// Sub-complex on `keep` (ascending), dropping gluings that leave it.
    pub fn restrict(&self, keep: &[u32]) -> (Cx, BTreeMap<u32, u32>) {
        let map: BTreeMap<u32, u32> = keep.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let tets = keep
            .iter()
            .map(|&x| {
                let tet = &self.tets[x as usize];
                let glue = tet.glue.map(|g| g.and_then(|(y, j)| map.get(&y).map(|&ny| (ny, j))));
                CxTet { base: tet.base, glue }
            })
            .collect();
        (Cx { tets }, map)
    }

    /// Splits into connected components; returns each with its tet list.
    pub fn split(&self) -> Vec<(Cx, Vec<u32>)> {
        let (labels, k) = self.components();
        let mut groups = vec![Vec::new(); k];
        for (x, &l) in labels.iter().enumerate() {
            groups[l].push(x as u32);
        }
        groups.into_iter().map(|g| (self.restrict(&g).0, g)).collect()
    }

    pub fn skeleton(&self, t: &BaseComplex) -> Skeleton {
        let n = self.tets.len();
        let mut uv = UnionFind::new(n * 4);
        let mut ue = UnionFind::new(n * 6);
        let mut uf = UnionFind::new(n * 4);
        for (x, tet) in self.tets.iter().enumerate() {
            let cx = &t.tets[tet.base as usize];
            for (i, g) in tet.glue.iter().enumerate() {
                let Some((y, j)) = *g else { continue };
                uf.union(x * 4 + i, y as usize * 4 + j as usize);
                let cy = &t.tets[self.tets[y as usize].base as usize];
                let fverts = face_of(cx, i);
                for &v in &fverts {
                    uv.union(x * 4 + corner(cx, v).unwrap(), y as usize * 4 + corner(cy, v).unwrap());
                }
                for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                    let (p, q) = (fverts[a], fverts[b]);
                    let lx = local_edge(corner(cx, p).unwrap(), corner(cx, q).unwrap());
                    let ly = local_edge(corner(cy, p).unwrap(), corner(cy, q).unwrap());
                    ue.union(x * 6 + lx, y as usize * 6 + ly);
                }
            }
        }
        let (lv, nv) = uv.labels();
        let (le, ne) = ue.labels();
        let (lf, nf) = uf.labels();
        let mut sk = Skeleton {
            vert_of: vec![[0; 4]; n],
            edge_of: vec![[0; 6]; n],
            face_of: vec![[0; 4]; n],
            vert_base: vec![0; nv],
            edge_base: vec![[0, 0]; ne],
            face_base: vec![[0, 0, 0]; nf],
            face_members: vec![Vec::new(); nf],
            vert_boundary: vec![false; nv],
            edge_boundary: vec![false; ne],
            vert_rep: vec![(0, 0); nv],
            edge_rep: vec![(0, 0); ne],
        };
        let mut seen_v = vec![false; nv];
        let mut seen_e = vec![false; ne];
        for (x, tet) in self.tets.iter().enumerate() {
            let c = &t.tets[tet.base as usize];
            for i in 0..4 {
                let v = lv[x * 4 + i] as u32;
                sk.vert_of[x][i] = v;
                sk.vert_base[v as usize] = c[i];
                if !seen_v[v as usize] {
                    seen_v[v as usize] = true;
                    sk.vert_rep[v as usize] = (x as u32, i as u8);
                }
                let f = lf[x * 4 + i] as u32;
                sk.face_of[x][i] = f;
                sk.face_base[f as usize] = face_of(c, i);
                sk.face_members[f as usize].push((x as u32, i as u8));
            }
            for (k, &(i, j)) in LOCAL_EDGES.iter().enumerate() {
                let e = le[x * 6 + k] as u32;
                sk.edge_of[x][k] = e;
                sk.edge_base[e as usize] = [c[i], c[j]];
                if !seen_e[e as usize] {
                    seen_e[e as usize] = true;
                    sk.edge_rep[e as usize] = (x as u32, k as u8);
                }
            }
        }
        for (x, tet) in self.tets.iter().enumerate() {
            for i in 0..4 {
                if tet.glue[i].is_none() {
                    for j in 0..4 {
                        if j != i {
                            sk.vert_boundary[sk.vert_of[x][j] as usize] = true;
                        }
                    }
                    for (k, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
                        if a != i && b != i {
                            sk.edge_boundary[sk.edge_of[x][k] as usize] = true;
                        }
                    }
                }
            }
        }
        sk
    }

    /// Faces of tet `x` containing base segment `s`, as the two corners opposite them.
    fn faces_at_edge(c: &[u32; 4], s: &Seg) -> [u8; 2] {
        let mut out = [0u8; 2];
        let mut k = 0;
        for (i, &v) in c.iter().enumerate() {
            if v != s[0] && v != s[1] {
                out[k] = i as u8;
                k += 1;
            }
        }
        out
    }

    /// Walks around the edge `s` of tet `x`, leaving through face `exit`.
    fn walk(&self, t: &BaseComplex, x: u32, s: &Seg, exit: u8, out: &mut Vec<(u32, u8, u8)>) -> Option<u32> {
        let (mut cur, mut leave) = (x, exit);
        loop {
            let (y, j) = self.tets[cur as usize].glue[leave as usize]?;
            if y == x {
                return Some(y);
            }
            let fs = Self::faces_at_edge(self.corners(t, y), s);
            let next = if fs[0] == j { fs[1] } else { fs[0] };
            out.push((y, j, next));
            cur = y;
            leave = next;
        }
    }

    /// Rotational star of the edge `s` through tet `x`.
    pub fn edge_star(&self, t: &BaseComplex, x: u32, s: &Seg) -> EdgeStar {
        let fs = Self::faces_at_edge(self.corners(t, x), s);
        let mut fwd = Vec::new();
        if self.walk(t, x, s, fs[1], &mut fwd).is_some() {
            let mut tets = vec![(x, fs[0], fs[1])];
            tets.extend(fwd);
            return EdgeStar { tets, closed: true };
        }
        let mut back = Vec::new();
        self.walk(t, x, s, fs[0], &mut back);
        let mut tets: Vec<(u32, u8, u8)> = back.into_iter().rev().map(|(y, a, b)| (y, b, a)).collect();
        tets.push((x, fs[0], fs[1]));
        tets.extend(fwd);
        EdgeStar { tets, closed: false }
    }

    /// Boundary face reached from boundary face `(x, i)` across its edge `s`.
    pub fn boundary_neighbor(&self, t: &BaseComplex, x: u32, i: u8, s: &Seg) -> FaceRef {
        self.boundary_walk(t, x, i, s).0
    }

    /// Like `boundary_neighbor`, also returning the glued faces crossed, each
    /// as the face it was left through.
    pub fn boundary_walk(&self, t: &BaseComplex, x: u32, i: u8, s: &Seg) -> (FaceRef, Vec<FaceRef>) {
        let fs = Self::faces_at_edge(self.corners(t, x), s);
        let mut leave = if fs[0] == i { fs[1] } else { fs[0] };
        let mut cur = x;
        let mut path = Vec::new();
        loop {
            match self.tets[cur as usize].glue[leave as usize] {
                None => return ((cur, leave), path),
                Some((y, j)) => {
                    path.push((cur, leave));
                    let fs = Self::faces_at_edge(self.corners(t, y), s);
                    leave = if fs[0] == j { fs[1] } else { fs[0] };
                    cur = y;
                }
            }
        }
    }

    /// Tetrahedra containing the vertex class of corner `i` of tet `x`, with the local corner.
    pub fn vertex_star(&self, t: &BaseComplex, x: u32, i: u8) -> Vec<(u32, u8)> {
        let v = self.corners(t, x)[i as usize];
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::from([x]);
        seen.insert(x);
        while let Some(y) = queue.pop_front() {
            let c = self.corners(t, y);
            let iv = corner(c, v).unwrap();
            out.push((y, iv as u8));
            for (j, g) in self.tets[y as usize].glue.iter().enumerate() {
                if j == iv {
                    continue;
                }
                if let Some((z, _)) = g {
                    if seen.insert(*z) {
                        queue.push_back(*z);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::build_arrangement;
    use crate::samples;

    fn octa() -> BaseComplex {
        BaseComplex::new(build_arrangement(&samples::octahedron(), 10_000).unwrap())
    }

    #[test]
    fn ball_skeleton_has_euler_characteristic_one() {
        let t = octa();
        let all: Vec<u32> = (0..t.len() as u32).collect();
        let cx = Cx::from_base(&t, &all);
        let sk = cx.skeleton(&t);
        let chi = sk.n_verts() as i64 - sk.n_edges() as i64 + sk.n_faces() as i64 - cx.len() as i64;
        assert_eq!(chi, 1);
        assert_eq!(sk.boundary_faces().len(), 48);
    }

    #[test]
    fn edge_stars_close_inside() {
        let t = octa();
        let all: Vec<u32> = (0..t.len() as u32).collect();
        let cx = Cx::from_base(&t, &all);
        let sk = cx.skeleton(&t);
        for e in 0..sk.n_edges() {
            let (x, k) = sk.edge_rep[e];
            let (a, b) = LOCAL_EDGES[k as usize];
            let c = cx.corners(&t, x);
            let star = cx.edge_star(&t, x, &[c[a], c[b]]);
            assert_eq!(star.closed, !sk.edge_boundary[e]);
        }
    }

    #[test]
    fn cutting_splits_components() {
        let t = octa();
        let all: Vec<u32> = (0..t.len() as u32).collect();
        let mut cx = Cx::from_base(&t, &all);
        // Cut along the plane z = 0 through the cell centroid.
        let z0 = |tri: &Tri| tri.iter().all(|&v| t.position(v).0[2] == crate::rational::int(0));
        cx.cut(&t, z0);
        assert_eq!(cx.components().1, 2);
    }
}
