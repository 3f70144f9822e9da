//! Good 2-complexes: the local-model oracle and subcomplex enumeration.

use super::{seg, SegSet};
use crate::cx::Cx;
use crate::triangulation::{BaseComplex, Seg, Tri};
use crate::util::UnionFind;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use thiserror::Error;

/// A 2-complex made of base triangles, plus optional loose edges (which a
/// good complex never has).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TwoComplex {
    pub tris: BTreeSet<Tri>,
    pub extra_edges: SegSet,
}

impl TwoComplex {
    pub fn new(tris: impl IntoIterator<Item = Tri>) -> Self {
        TwoComplex { tris: tris.into_iter().collect(), extra_edges: SegSet::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.tris.is_empty() && self.extra_edges.is_empty()
    }

    /// Number of triangles at each edge.
    pub fn edge_degrees(&self) -> BTreeMap<Seg, usize> {
        let mut d = BTreeMap::new();
        for t in &self.tris {
            for s in tri_segs(t) {
                *d.entry(s).or_default() += 1;
            }
        }
        d
    }

    pub fn vertices(&self) -> BTreeSet<u32> {
        self.tris.iter().flatten().copied().collect()
    }

    /// S(X): edges in three or more triangles together with their ends.
    pub fn singular_set(&self) -> SegSet {
        self.edge_degrees().into_iter().filter(|&(_, d)| d >= 3).map(|(s, _)| s).collect()
    }

    pub fn union(&self, o: &TwoComplex) -> TwoComplex {
        TwoComplex {
            tris: self.tris.union(&o.tris).copied().collect(),
            extra_edges: self.extra_edges.union(&o.extra_edges).copied().collect(),
        }
    }
}

pub fn tri_segs(t: &Tri) -> [Seg; 3] {
    [seg(t[0], t[1]), seg(t[0], t[2]), seg(t[1], t[2])]
}

/// Incidence data of the ambient complex that the oracle needs.
#[derive(Debug, Clone)]
pub struct Host {
    pub interior_tris: HashSet<Tri>,
    pub boundary_segs: HashSet<Seg>,
    pub boundary_verts: HashSet<u32>,
}

impl Host {
    pub fn new(cx: &Cx, t: &BaseComplex) -> Self {
        let mut interior_tris = HashSet::new();
        let mut boundary_segs = HashSet::new();
        let mut boundary_verts = HashSet::new();
        for (x, tet) in cx.tets.iter().enumerate() {
            for (i, g) in tet.glue.iter().enumerate() {
                let tri = cx.base_face(t, (x as u32, i as u8));
                if g.is_some() {
                    interior_tris.insert(tri);
                } else {
                    boundary_segs.extend(tri_segs(&tri));
                    boundary_verts.extend(tri);
                }
            }
        }
        Host { interior_tris, boundary_segs, boundary_verts }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum GoodError {
    #[error("triangle {0:?} is not an interior face of the manifold")]
    NotInterior(Tri),
    #[error("edge {0:?} bounds no triangle")]
    LocalDimension(Seg),
    #[error("edge {seg:?} lies in {degree} triangles")]
    EdgeDegree { seg: Seg, degree: usize },
    #[error("boundary trace differs from the graph at {0:?}")]
    BoundaryTrace(Seg),
    #[error("graph edge {0:?} is not a free edge of the complex")]
    MissingGraphEdge(Seg),
    #[error("vertex {vertex} has link {shape:?}")]
    VertexLink { vertex: u32, shape: LinkShape },
}

/// Homeomorphism type of a vertex link graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LinkShape {
    Cycle,
    Theta,
    K4,
    Path([u32; 2]),
    Tripod([u32; 3]),
    Other,
}

/// Classifies a connected multigraph with node ids `u32` up to subdivision.
pub fn classify_link(edges: &[[u32; 2]]) -> LinkShape {
    let mut adj: BTreeMap<u32, Vec<(u32, usize)>> = BTreeMap::new();
    for (k, &[a, b]) in edges.iter().enumerate() {
        adj.entry(a).or_default().push((b, k));
        adj.entry(b).or_default().push((a, k));
    }
    if adj.is_empty() {
        return LinkShape::Other;
    }
    let nodes: Vec<u32> = adj.keys().copied().collect();
    let idx: BTreeMap<u32, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(nodes.len());
    for &[a, b] in edges {
        uf.union(idx[&a], idx[&b]);
    }
    if uf.labels().1 != 1 {
        return LinkShape::Other;
    }
    let branch: Vec<u32> = nodes.iter().copied().filter(|v| adj[v].len() != 2).collect();
    if branch.is_empty() {
        return LinkShape::Cycle;
    }
    if branch.iter().any(|v| adj[v].len() > 3) {
        return LinkShape::Other;
    }
    // Smoothed edges between branch nodes.
    let mut used = vec![false; edges.len()];
    let mut smooth: Vec<[u32; 2]> = Vec::new();
    for &b in &branch {
        for &(next, k) in &adj[&b] {
            if used[k] {
                continue;
            }
            used[k] = true;
            let (mut prev_edge, mut cur) = (k, next);
            while adj[&cur].len() == 2 {
                let &(n2, k2) = adj[&cur].iter().find(|&&(_, kk)| kk != prev_edge).unwrap();
                used[k2] = true;
                prev_edge = k2;
                cur = n2;
            }
            smooth.push([b.min(cur), b.max(cur)]);
        }
    }
    let deg = |v: u32| adj[&v].len();
    let ones: Vec<u32> = branch.iter().copied().filter(|&v| deg(v) == 1).collect();
    let threes: Vec<u32> = branch.iter().copied().filter(|&v| deg(v) == 3).collect();
    let loops = smooth.iter().any(|e| e[0] == e[1]);
    if loops {
        return LinkShape::Other;
    }
    match (ones.len(), threes.len()) {
        (2, 0) => LinkShape::Path([ones[0], ones[1]]),
        (0, 2) if smooth.len() == 3 => LinkShape::Theta,
        (0, 4) => {
            let distinct: BTreeSet<[u32; 2]> = smooth.iter().copied().collect();
            if smooth.len() == 6 && distinct.len() == 6 {
                LinkShape::K4
            } else {
                LinkShape::Other
            }
        }
        (3, 1) if smooth.len() == 3 => LinkShape::Tripod([ones[0], ones[1], ones[2]]),
        _ => LinkShape::Other,
    }
}

/// Link graph of `v` in the triangles of `x`, with link nodes the far ends of edges at `v`.
pub fn vertex_link(tris: &BTreeSet<Tri>, v: u32) -> Vec<[u32; 2]> {
    tris.iter()
        .filter(|t| t.contains(&v))
        .map(|t| {
            let o: Vec<u32> = t.iter().copied().filter(|&u| u != v).collect();
            [o[0], o[1]]
        })
        .collect()
}

/// Whether `x` is a good 2-complex in the manifold with respect to `g`.
pub fn is_good_2complex(x: &TwoComplex, host: &Host, g: &SegSet) -> Result<(), GoodError> {
    let mut by_vertex: BTreeMap<u32, BTreeSet<Tri>> = BTreeMap::new();
    for tri in &x.tris {
        if !host.interior_tris.contains(tri) {
            return Err(GoodError::NotInterior(*tri));
        }
        for &v in tri {
            by_vertex.entry(v).or_default().insert(*tri);
        }
    }
    let deg = x.edge_degrees();
    if let Some(s) = x.extra_edges.iter().find(|s| !deg.contains_key(*s)) {
        return Err(GoodError::LocalDimension(*s));
    }
    for (&s, &d) in &deg {
        if host.boundary_segs.contains(&s) {
            if !g.contains(&s) || d != 1 {
                return Err(GoodError::BoundaryTrace(s));
            }
        } else if d != 2 && d != 3 {
            return Err(GoodError::EdgeDegree { seg: s, degree: d });
        }
    }
    if let Some(s) = g.iter().find(|s| deg.get(*s) != Some(&1)) {
        return Err(GoodError::MissingGraphEdge(*s));
    }
    let mut g_nbrs: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for s in g {
        g_nbrs.entry(s[0]).or_default().push(s[1]);
        g_nbrs.entry(s[1]).or_default().push(s[0]);
    }
    for (&v, tris) in &by_vertex {
        let shape = classify_link(&vertex_link(tris, v));
        let ok = if host.boundary_verts.contains(&v) {
            match (g_nbrs.get(&v), &shape) {
                (Some(n), LinkShape::Path(ends)) if n.len() == 2 => {
                    let mut a = ends.to_vec();
                    let mut b = n.clone();
                    a.sort_unstable();
                    b.sort_unstable();
                    a == b
                }
                (Some(n), LinkShape::Tripod(leaves)) if n.len() == 3 => {
                    let mut a = leaves.to_vec();
                    let mut b = n.clone();
                    a.sort_unstable();
                    b.sort_unstable();
                    a == b
                }
                _ => false,
            }
        } else {
            matches!(shape, LinkShape::Cycle | LinkShape::Theta | LinkShape::K4)
        };
        if !ok {
            return Err(GoodError::VertexLink { vertex: v, shape });
        }
    }
    Ok(())
}

/// Components of `x` minus its singular edges, each a sorted triangle list.
pub fn sheets(x: &TwoComplex) -> Vec<Vec<Tri>> {
    let tris: Vec<Tri> = x.tris.iter().copied().collect();
    let sing = x.singular_set();
    let mut by_seg: BTreeMap<Seg, Vec<usize>> = BTreeMap::new();
    for (i, t) in tris.iter().enumerate() {
        for s in tri_segs(t) {
            by_seg.entry(s).or_default().push(i);
        }
    }
    let mut uf = UnionFind::new(tris.len());
    for (s, list) in &by_seg {
        if !sing.contains(s) {
            for w in list.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    let (labels, k) = uf.labels();
    let mut out = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        out[l].push(tris[i]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("subcomplex enumeration exceeded {0} search nodes")]
pub struct EnumerationBudget(pub usize);

/// All good subcomplexes of `x`, as sheet unions in lexicographic sheet order.
pub fn good_subcomplexes(x: &TwoComplex, host: &Host, g: &SegSet, budget: usize) -> Result<Vec<TwoComplex>, EnumerationBudget> {
    let sh = sheets(x);
    let n = sh.len();
    // Triangles each sheet contributes at each singular edge.
    let sing = x.singular_set();
    let mut at_edge: BTreeMap<Seg, Vec<(usize, usize)>> = BTreeMap::new();
    for (k, tris) in sh.iter().enumerate() {
        let mut c: BTreeMap<Seg, usize> = BTreeMap::new();
        for t in tris {
            for s in tri_segs(t) {
                if sing.contains(&s) {
                    *c.entry(s).or_default() += 1;
                }
            }
        }
        for (s, m) in c {
            at_edge.entry(s).or_default().push((k, m));
        }
    }
    // An edge is decided once its last sheet is.
    let mut closes_at: Vec<Vec<Seg>> = vec![Vec::new(); n];
    for (s, list) in &at_edge {
        let last = list.iter().map(|&(k, _)| k).max().unwrap();
        closes_at[last].push(*s);
    }
    let required: Vec<bool> = sh.iter().map(|tris| tris.iter().any(|t| tri_segs(t).iter().any(|s| g.contains(s)))).collect();
    let mut out = Vec::new();
    let mut chosen = vec![false; n];
    let mut nodes = 0usize;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        sh: &[Vec<Tri>],
        chosen: &mut Vec<bool>,
        required: &[bool],
        closes_at: &[Vec<Seg>],
        at_edge: &BTreeMap<Seg, Vec<(usize, usize)>>,
        host: &Host,
        g: &SegSet,
        nodes: &mut usize,
        budget: usize,
        out: &mut Vec<TwoComplex>,
    ) -> Result<(), EnumerationBudget> {
        *nodes += 1;
        if *nodes > budget {
            return Err(EnumerationBudget(budget));
        }
        if k == sh.len() {
            let y = TwoComplex::new(sh.iter().zip(chosen.iter()).filter(|(_, &c)| c).flat_map(|(t, _)| t.iter().copied()));
            if is_good_2complex(&y, host, g).is_ok() {
                out.push(y);
            }
            return Ok(());
        }
        for choice in [false, true] {
            if required[k] && !choice {
                continue;
            }
            chosen[k] = choice;
            let ok = closes_at[k].iter().all(|s| {
                let c: usize = at_edge[s].iter().filter(|&&(j, _)| chosen[j]).map(|&(_, m)| m).sum();
                c == 0 || c == 2 || c == 3
            });
            if ok {
                rec(k + 1, sh, chosen, required, closes_at, at_edge, host, g, nodes, budget, out)?;
            }
        }
        chosen[k] = false;
        Ok(())
    }
    rec(0, &sh, &mut chosen, &required, &closes_at, &at_edge, host, g, &mut nodes, budget, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_shapes() {
        assert_eq!(classify_link(&[[1, 2], [2, 3], [3, 1]]), LinkShape::Cycle);
        assert_eq!(classify_link(&[[1, 2], [2, 3], [3, 4], [4, 1], [1, 5], [5, 3]]), LinkShape::Theta);
        let k4 = [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]];
        assert_eq!(classify_link(&k4), LinkShape::K4);
        assert_eq!(classify_link(&[[1, 2], [2, 3]]), LinkShape::Path([1, 3]));
        assert_eq!(classify_link(&[[0, 1], [0, 2], [0, 3]]), LinkShape::Tripod([1, 2, 3]));
        // Two circles sharing a point.
        assert_eq!(classify_link(&[[0, 1], [1, 2], [2, 0], [0, 3], [3, 4], [4, 0]]), LinkShape::Other);
        // Two disjoint circles.
        assert_eq!(classify_link(&[[0, 1], [1, 2], [2, 0], [5, 3], [3, 4], [4, 5]]), LinkShape::Other);
    }
}
