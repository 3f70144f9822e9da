//! Branched immersions over the base, cancellation of domains, and the
//! decomposition of an extension back into an inscribed element.
//!
//! Every complex here is a [`Cx`]: copies of base tetrahedra glued along
//! equal base faces, mapping simplexwise onto the base. Cancelling a family
//! of domains deletes their tetrahedra and glues the two faces freed over
//! each wall triangle to each other.

use crate::complexes::good::{is_good_2complex, Host, TwoComplex};
use crate::complexes::relative::{cut_along, CutError};
use crate::complexes::{seg, SegSet};
use crate::cx::{Cx, FaceRef, Skeleton, LOCAL_EDGES};
use crate::extension::Extension;
use crate::inscribed::{canonical_key, good_elements, key_hex, n_graph, Context, InscribedElement, InscribedSet};
use crate::triangulation::{face_of, BaseComplex, Seg, Tri};
use crate::util::UnionFind;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum CancelError {
    #[error("vertex {vertex}: {detail}")]
    Link { vertex: u32, detail: String },
    #[error("domain {domain} is empty or disconnected")]
    NotConnected { domain: usize },
    #[error("domain {domain} covers base tetrahedron {tet} twice")]
    NotEmbedded { domain: usize, tet: u32 },
    #[error("domain {domain} leaves the top region at base tetrahedron {tet}")]
    OutsideRegion { domain: usize, tet: u32 },
    #[error("domains do not match the pieces of the region cut along X: {0}")]
    Pieces(String),
    #[error("domain {domain} meets the top boundary at {tri:?} away from the boundary of K")]
    BoundaryPreimage { domain: usize, tri: Tri },
    #[error("piece {piece} has no anchor on the boundary or the previous seam")]
    NoAnchor { piece: usize },
    #[error("piece {piece} does not lift: {detail}")]
    Lift { piece: usize, detail: String },
    #[error("tetrahedron {tet} lies in two domains")]
    Overlap { tet: u32 },
    #[error("walls of the domains differ from X: {0}")]
    Walls(String),
    #[error("wall triangle {tri:?} frees {found} faces, expected 2")]
    Seam { tri: Tri, found: usize },
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error("X is not good in the top region: {0}")]
    NotGood(String),
}

/// A base vertex, edge or triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Vertex(u32),
    Edge(Seg),
    Tri(Tri),
}

/// Largest multiplicity of a base tetrahedron in the star of each vertex
/// and edge class: the local degree of the map there.
#[derive(Debug, Clone)]
pub struct LocalDegrees {
    pub sk: Skeleton,
    pub vertex: Vec<u32>,
    pub edge: Vec<u32>,
}

pub fn local_degrees(cx: &Cx, t: &BaseComplex) -> LocalDegrees {
    let sk = cx.skeleton(t);
    let mut vm: HashMap<(u32, u32), u32> = HashMap::new();
    let mut em: HashMap<(u32, u32), u32> = HashMap::new();
    for (x, tet) in cx.tets.iter().enumerate() {
        for &v in &sk.vert_of[x] {
            *vm.entry((v, tet.base)).or_default() += 1;
        }
        for &e in &sk.edge_of[x] {
            *em.entry((e, tet.base)).or_default() += 1;
        }
    }
    let mut vertex = vec![1; sk.n_verts()];
    for ((v, _), m) in vm {
        vertex[v as usize] = vertex[v as usize].max(m);
    }
    let mut edge = vec![1; sk.n_edges()];
    for ((e, _), m) in em {
        edge[e as usize] = edge[e as usize].max(m);
    }
    LocalDegrees { sk, vertex, edge }
}

impl LocalDegrees {
    /// Preimage classes over each base vertex and edge, with their degrees.
    fn by_base(&self) -> (BTreeMap<u32, Vec<u32>>, BTreeMap<Seg, Vec<u32>>) {
        let mut v: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (c, &b) in self.sk.vert_base.iter().enumerate() {
            v.entry(b).or_default().push(self.vertex[c]);
        }
        let mut e: BTreeMap<Seg, Vec<u32>> = BTreeMap::new();
        for (c, &b) in self.sk.edge_base.iter().enumerate() {
            e.entry(b).or_default().push(self.edge[c]);
        }
        (v, e)
    }

    /// Branch edges and branch vertices with their index (degree − 1).
    pub fn branch_set(&self) -> (SegSet, BTreeMap<u32, u32>) {
        let mut edges = SegSet::new();
        for (c, &d) in self.edge.iter().enumerate() {
            if d > 1 {
                edges.insert(self.sk.edge_base[c]);
            }
        }
        let mut verts = BTreeMap::new();
        for (c, &d) in self.vertex.iter().enumerate() {
            if d > 1 {
                let e = verts.entry(self.sk.vert_base[c]).or_insert(0);
                *e = (*e).max(d - 1);
            }
        }
        (edges, verts)
    }
}

/// A branched immersion K → R³ with R(g) = D_top.
#[derive(Debug, Clone)]
pub struct BranchedImmersion {
    pub cx: Cx,
    pub top: u32,
    /// B(K): base vertices of interior vertex classes whose link is a
    /// closed surface other than the sphere.
    pub cone_points: Vec<u32>,
}

impl BranchedImmersion {
    /// Validates that every vertex link is a connected surface: a sphere or
    /// disk, or a closed non-sphere at a cone point.
    pub fn new(cx: Cx, t: &BaseComplex, top: u32) -> Result<Self, CancelError> {
        let sk = cx.skeleton(t);
        let mut tris = vec![0i64; sk.n_verts()];
        let mut edges: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); sk.n_verts()];
        let mut verts: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); sk.n_verts()];
        for x in 0..cx.len() {
            for iv in 0..4 {
                let v = sk.vert_of[x][iv] as usize;
                tris[v] += 1;
                for i in (0..4).filter(|&i| i != iv) {
                    edges[v].insert(sk.face_of[x][i]);
                }
                for (e, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
                    if a == iv || b == iv {
                        verts[v].insert(sk.edge_of[x][e]);
                    }
                }
            }
        }
        let mut cone_points = Vec::new();
        for v in 0..sk.n_verts() {
            let chi = verts[v].len() as i64 - edges[v].len() as i64 + tris[v];
            let base = sk.vert_base[v];
            match (sk.vert_boundary[v], chi) {
                (true, 1) | (false, 2) => {}
                (false, _) => cone_points.push(base),
                (true, _) => return Err(CancelError::Link { vertex: base, detail: format!("boundary link has Euler characteristic {chi}") }),
            }
        }
        cone_points.sort_unstable();
        Ok(BranchedImmersion { cx, top, cone_points })
    }
}

/// Domains A_1..A_t as tetrahedron lists of K, with the complex X they
/// are cut by.
#[derive(Debug, Clone)]
pub struct CancellableFamily {
    pub domains: Vec<Vec<u32>>,
    pub associated: TwoComplex,
    /// X(A_1, …, A_t): base triangles under faces of the domains glued to
    /// tetrahedra outside them.
    pub wall: TwoComplex,
}

/// Free faces of each base tetrahedron of a stratum, i.e. over ∂D_k.
fn region_boundary(ctx: &Context, k: u32) -> BTreeSet<(u32, u8)> {
    let d = ctx.stratum(k);
    let mut out = BTreeSet::new();
    for tet in &d.tets {
        for i in 0..4u8 {
            if tet.glue[i as usize].is_none() {
                out.insert((tet.base, i));
            }
        }
    }
    out
}

fn wall_of(cx: &Cx, t: &BaseComplex, inside: &[bool]) -> BTreeSet<Tri> {
    let mut out = BTreeSet::new();
    for (x, tet) in cx.tets.iter().enumerate() {
        if !inside[x] {
            continue;
        }
        for (i, g) in tet.glue.iter().enumerate() {
            if let Some((y, _)) = g {
                if !inside[*y as usize] {
                    out.insert(cx.base_face(t, (x as u32, i as u8)));
                }
            }
        }
    }
    out
}

fn describe(extra: &BTreeSet<Tri>, missing: &BTreeSet<Tri>) -> String {
    format!("{} extra (first {:?}), {} missing (first {:?})", extra.len(), extra.first(), missing.len(), missing.first())
}

/// Checks the three conditions on a family of domains with associated
/// complex `x`.
pub fn check_cancellable(ctx: &Context, g: &BranchedImmersion, domains: &[Vec<u32>], x: &TwoComplex) -> Result<(), CancelError> {
    let (cx, t) = (&g.cx, &ctx.t);
    let region = ctx.stratum(g.top);
    let host = Host::new(region, t);
    is_good_2complex(x, &host, ctx.graph(g.top)).map_err(|e| CancelError::NotGood(e.to_string()))?;
    let in_region: BTreeSet<u32> = region.tets.iter().map(|tet| tet.base).collect();
    let mut owner = vec![None; cx.len()];
    for (d, dom) in domains.iter().enumerate() {
        for &y in dom {
            if owner[y as usize].replace(d).is_some() {
                return Err(CancelError::Overlap { tet: y });
            }
        }
    }
    // Interiors embed into R(g), and are connected.
    let mut images = Vec::new();
    for (d, dom) in domains.iter().enumerate() {
        let mut bases = BTreeSet::new();
        for &y in dom {
            let b = cx.tets[y as usize].base;
            if !in_region.contains(&b) {
                return Err(CancelError::OutsideRegion { domain: d, tet: b });
            }
            if !bases.insert(b) {
                return Err(CancelError::NotEmbedded { domain: d, tet: b });
            }
        }
        let pos: HashMap<u32, usize> = dom.iter().enumerate().map(|(k, &y)| (y, k)).collect();
        let mut uf = UnionFind::new(dom.len());
        for (k, &y) in dom.iter().enumerate() {
            for (z, _) in cx.tets[y as usize].glue.iter().flatten() {
                if let Some(&m) = pos.get(z) {
                    uf.union(k, m);
                }
            }
        }
        if dom.is_empty() || uf.labels().1 != 1 {
            return Err(CancelError::NotConnected { domain: d });
        }
        images.push(bases);
    }
    // Images are the pieces of R(g) cut along X.
    let pieces = cut_along(region, t, x, &SegSet::new())?;
    let mut want: Vec<BTreeSet<u32>> = pieces.iter().map(|p| p.tets.iter().map(|&i| region.tets[i as usize].base).collect()).collect();
    want.sort();
    images.sort();
    if want != images {
        return Err(CancelError::Pieces(format!("{} domains for {} pieces", images.len(), want.len())));
    }
    // Faces over ∂R(g) stay on ∂K.
    let rb = region_boundary(ctx, g.top);
    for (d, dom) in domains.iter().enumerate() {
        for &y in dom {
            let tet = &cx.tets[y as usize];
            for i in 0..4u8 {
                if rb.contains(&(tet.base, i)) && tet.glue[i as usize].is_some() {
                    return Err(CancelError::BoundaryPreimage { domain: d, tri: cx.base_face(t, (y, i)) });
                }
            }
        }
    }
    Ok(())
}

/// Lifts every piece of R(g) cut along `x` into K, starting from its face
/// on ∂K over ∂R(g) or, failing that, from a tetrahedron on one of the
/// `anchors` faces. The walls of the lifts must be exactly `x`.
pub fn find_cancellable_domains(ctx: &Context, g: &BranchedImmersion, x: &TwoComplex, anchors: &BTreeMap<Tri, (FaceRef, FaceRef)>) -> Result<CancellableFamily, CancelError> {
    let (cx, t) = (&g.cx, &ctx.t);
    let region = ctx.stratum(g.top);
    let rb = region_boundary(ctx, g.top);
    let pieces = cut_along(region, t, x, &SegSet::new())?;
    // Free faces of K by (base tet, face), and anchor tets by base tet.
    let mut free: HashMap<(u32, u8), Vec<u32>> = HashMap::new();
    for (y, tet) in cx.tets.iter().enumerate() {
        for i in 0..4u8 {
            if tet.glue[i as usize].is_none() {
                free.entry((tet.base, i)).or_default().push(y as u32);
            }
        }
    }
    let mut anchor_tets: HashMap<u32, Vec<u32>> = HashMap::new();
    for (a, b) in anchors.values() {
        for f in [a, b] {
            anchor_tets.entry(cx.tets[f.0 as usize].base).or_default().push(f.0);
        }
    }
    let mut owner: Vec<Option<usize>> = vec![None; cx.len()];
    let mut domains = Vec::new();
    for (pi, piece) in pieces.iter().enumerate() {
        let p = &piece.cx;
        let start = (0..p.len() as u32)
            .find_map(|q| {
                let b = p.tets[q as usize].base;
                (0..4u8).find_map(|i| {
                    if !rb.contains(&(b, i)) {
                        return None;
                    }
                    match free.get(&(b, i)).map(Vec::as_slice) {
                        Some([y]) => Some(Ok((q, *y))),
                        other => Some(Err(CancelError::Lift {
                            piece: pi,
                            detail: format!("{} free faces over boundary triangle {:?}", other.map_or(0, <[u32]>::len), p.base_face(t, (q, i))),
                        })),
                    }
                })
            })
            .or_else(|| {
                (0..p.len() as u32).find_map(|q| {
                    let ys = anchor_tets.get(&p.tets[q as usize].base)?;
                    Some(Ok((q, ys[0])))
                })
            })
            .ok_or(CancelError::NoAnchor { piece: pi })??;
        let mut lift: HashMap<u32, u32> = HashMap::from([(start.0, start.1)]);
        let mut queue = VecDeque::from([start.0]);
        while let Some(q) = queue.pop_front() {
            let y = lift[&q];
            for i in 0..4u8 {
                let Some((r, _)) = p.tets[q as usize].glue[i as usize] else { continue };
                let Some((z, _)) = cx.tets[y as usize].glue[i as usize] else {
                    return Err(CancelError::Lift { piece: pi, detail: format!("face over {:?} is free in K", p.base_face(t, (q, i))) });
                };
                match lift.get(&r) {
                    Some(&z0) if z0 != z => {
                        return Err(CancelError::Lift { piece: pi, detail: format!("base tetrahedron {} lifts twice", p.tets[r as usize].base) });
                    }
                    Some(_) => {}
                    None => {
                        lift.insert(r, z);
                        queue.push_back(r);
                    }
                }
            }
        }
        let mut dom: Vec<u32> = lift.into_values().collect();
        dom.sort_unstable();
        for &y in &dom {
            if owner[y as usize].replace(pi).is_some() {
                return Err(CancelError::Overlap { tet: y });
            }
        }
        domains.push(dom);
    }
    let inside: Vec<bool> = owner.iter().map(Option::is_some).collect();
    let wall = wall_of(cx, t, &inside);
    if wall != x.tris {
        let extra = wall.difference(&x.tris).copied().collect();
        let missing = x.tris.difference(&wall).copied().collect();
        return Err(CancelError::Walls(describe(&extra, &missing)));
    }
    Ok(CancellableFamily { domains, associated: x.clone(), wall: TwoComplex::new(wall) })
}

/// Identification classes of the seam over every wall cell.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    /// Classes of the glued complex met by the seam over each wall cell.
    pub classes: BTreeMap<Cell, usize>,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.classes.values().all(|&c| c == 1)
    }

    /// Cells where the seam falls apart.
    pub fn irregular(&self) -> Vec<Cell> {
        self.classes.iter().filter(|&(_, &c)| c != 1).map(|(&c, _)| c).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0:?} is not a cell of the wall complex")]
pub struct NotOnWall(pub Cell);

/// Whether the cancellation is regular at one wall cell.
pub fn regularity_at(report: &RegularityReport, cell: Cell) -> Result<bool, NotOnWall> {
    report.classes.get(&cell).map(|&c| c == 1).ok_or(NotOnWall(cell))
}

/// Counts the classes of `cx` that the seam faces meet over each cell of
/// `wall`.
pub fn regularity(cx: &Cx, t: &BaseComplex, wall: &TwoComplex, seams: &BTreeMap<Tri, (FaceRef, FaceRef)>) -> RegularityReport {
    let sk = cx.skeleton(t);
    let mut verts: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    let mut edges: BTreeMap<Seg, BTreeSet<u32>> = BTreeMap::new();
    let mut faces: BTreeMap<Tri, BTreeSet<u32>> = BTreeMap::new();
    for (tri, (a, b)) in seams {
        for &(x, i) in [a, b] {
            let x = x as usize;
            faces.entry(*tri).or_default().insert(sk.face_of[x][i as usize]);
            let c = cx.corners(t, x as u32);
            for j in (0..4).filter(|&j| j != i as usize) {
                verts.entry(c[j]).or_default().insert(sk.vert_of[x][j]);
            }
            for (e, &(p, q)) in LOCAL_EDGES.iter().enumerate() {
                if p != i as usize && q != i as usize {
                    edges.entry([c[p], c[q]]).or_default().insert(sk.edge_of[x][e]);
                }
            }
        }
    }
    let mut classes = BTreeMap::new();
    for (v, s) in verts {
        classes.insert(Cell::Vertex(v), s.len());
    }
    for (e, s) in edges {
        classes.insert(Cell::Edge(e), s.len());
    }
    for (f, s) in faces {
        classes.insert(Cell::Tri(f), s.len());
    }
    for tri in &wall.tris {
        classes.entry(Cell::Tri(*tri)).or_insert(0);
    }
    RegularityReport { classes }
}

/// Result of one cancellation.
#[derive(Debug, Clone)]
pub struct Cancellation {
    pub result: BranchedImmersion,
    /// The two faces glued over each wall triangle, in the new numbering.
    pub seams: BTreeMap<Tri, (FaceRef, FaceRef)>,
    pub regularity: RegularityReport,
    /// New index of every surviving tetrahedron of K.
    pub renumber: BTreeMap<u32, u32>,
}

/// Cuts the domains out and glues the freed faces over each wall triangle.
/// Surviving tetrahedra keep their relative order.
pub fn cancel(ctx: &Context, g: &BranchedImmersion, family: &CancellableFamily) -> Result<Cancellation, CancelError> {
    let t = &ctx.t;
    let mut removed = vec![false; g.cx.len()];
    for &y in family.domains.iter().flatten() {
        removed[y as usize] = true;
    }
    let keep: Vec<u32> = (0..g.cx.len() as u32).filter(|&y| !removed[y as usize]).collect();
    let mut freed: BTreeMap<Tri, Vec<FaceRef>> = BTreeMap::new();
    for (y, tet) in g.cx.tets.iter().enumerate() {
        if removed[y] {
            continue;
        }
        for (i, gl) in tet.glue.iter().enumerate() {
            if let Some((z, _)) = gl {
                if removed[*z as usize] {
                    freed.entry(g.cx.base_face(t, (y as u32, i as u8))).or_default().push((y as u32, i as u8));
                }
            }
        }
    }
    let (mut k0, renumber) = g.cx.restrict(&keep);
    let mut seams = BTreeMap::new();
    for (tri, faces) in &freed {
        let bases: BTreeSet<u32> = faces.iter().map(|f| g.cx.tets[f.0 as usize].base).collect();
        if faces.len() != 2 || bases.len() != 2 || !family.wall.tris.contains(tri) {
            return Err(CancelError::Seam { tri: *tri, found: faces.len() });
        }
        let (a, b) = ((renumber[&faces[0].0], faces[0].1), (renumber[&faces[1].0], faces[1].1));
        k0.glue(a, b);
        seams.insert(*tri, (a, b));
    }
    for tri in &family.wall.tris {
        if !seams.contains_key(tri) {
            return Err(CancelError::Seam { tri: *tri, found: 0 });
        }
    }
    let regularity = regularity(&k0, t, &family.wall, &seams);
    let top = g.top.saturating_sub(1);
    let result = BranchedImmersion::new(k0, t, top)?;
    Ok(Cancellation { result, seams, regularity, renumber })
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum DecomposeError {
    #[error("level {k}: {error}")]
    Cancel { k: u32, error: CancelError },
    #[error("level {k}: no element of ζ_{k} is cancellable here ({tried} tried; first failure: {first})")]
    NoCandidate { k: u32, tried: usize, first: String },
    #[error("level {k}: {count} elements are cancellable")]
    Ambiguous { k: u32, count: usize },
    #[error("level {k}: cancellation is irregular at {cells:?}")]
    Irregular { k: u32, cells: Vec<Cell> },
    #[error("level {k}: {detail}")]
    Audit { k: u32, detail: String },
    #[error("recovered element is not good")]
    NotGood,
}

/// Checks run after one level.
#[derive(Debug, Clone, Serialize)]
pub struct LevelAudit {
    pub k: u32,
    pub domains: usize,
    pub wall_triangles: usize,
    pub branch_edges: usize,
    pub branch_vertices: usize,
    /// Interior cells of D_k at which the counting identity was checked.
    pub counted_cells: usize,
    /// Singular edges whose seam sheets were checked to alternate.
    pub alternating_edges: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub key: String,
    pub levels: Vec<LevelAudit>,
    #[serde(skip)]
    pub element: InscribedElement,
}

/// Per base cell: number of preimage classes and total index Σ(degree − 1).
fn preimage_counts(cx: &Cx, t: &BaseComplex) -> (BTreeMap<Cell, (usize, u32)>, Vec<usize>) {
    let ld = local_degrees(cx, t);
    let (v, e) = ld.by_base();
    let mut out = BTreeMap::new();
    for (b, d) in v {
        out.insert(Cell::Vertex(b), (d.len(), d.iter().map(|x| x - 1).sum()));
    }
    for (b, d) in e {
        out.insert(Cell::Edge(b), (d.len(), d.iter().map(|x| x - 1).sum()));
    }
    for &b in &ld.sk.face_base {
        out.entry(Cell::Tri(b)).or_insert((0, 0)).0 += 1;
    }
    let mut copies = vec![0; t.len()];
    for tet in &cx.tets {
        copies[tet.base as usize] += 1;
    }
    (out, copies)
}

/// Vertices, edges and triangles of D_k off its boundary.
fn interior_cells(ctx: &Context, k: u32) -> BTreeSet<Cell> {
    let d = ctx.stratum(k);
    let t = &ctx.t;
    let mut on_boundary = BTreeSet::new();
    let mut all = BTreeSet::new();
    for (x, tet) in d.tets.iter().enumerate() {
        let c = d.corners(t, x as u32);
        for i in 0..4 {
            let tri = face_of(c, i);
            let cells = [Cell::Tri(tri), Cell::Edge(seg(tri[0], tri[1])), Cell::Edge(seg(tri[0], tri[2])), Cell::Edge(seg(tri[1], tri[2])), Cell::Vertex(tri[0]), Cell::Vertex(tri[1]), Cell::Vertex(tri[2])];
            if tet.glue[i].is_none() {
                on_boundary.extend(cells);
            }
            all.extend(cells);
        }
    }
    all.difference(&on_boundary).copied().collect()
}

/// Crossing faces around the seam edge over `e`, in rotation order, each
/// flagged as a seam or not; only faces over triangles of `x` count.
fn seam_pattern(cx: &Cx, t: &BaseComplex, e: &Seg, x: &TwoComplex, seams: &BTreeMap<Tri, (FaceRef, FaceRef)>) -> Option<Vec<bool>> {
    let seam_faces: BTreeSet<FaceRef> = seams.values().flat_map(|&(a, b)| [a, b]).collect();
    let (tri, (a, _)) = seams.iter().find(|(tri, _)| tri.contains(&e[0]) && tri.contains(&e[1]))?;
    let _ = tri;
    let star = cx.edge_star(t, a.0, e);
    if !star.closed {
        return None;
    }
    Some(
        star.tets
            .iter()
            .filter(|&&(y, _, left)| x.tris.contains(&cx.base_face(t, (y, left))))
            .map(|&(y, _, left)| seam_faces.contains(&(y, left)))
            .collect(),
    )
}

/// Recovers the element of I(ζ) an extension comes from by cancelling
/// one level at a time, top level first, and auditing every step.
pub fn decompose_extension(ctx: &Context, z: &InscribedSet, ext: &Extension) -> Result<Decomposition, DecomposeError> {
    let t = &ctx.t;
    let n = ctx.n();
    let mut g = BranchedImmersion::new(ext.cx.clone(), t, n).map_err(|error| DecomposeError::Cancel { k: n, error })?;
    let mut seams: BTreeMap<Tri, (FaceRef, FaceRef)> = BTreeMap::new();
    let mut chosen: Vec<TwoComplex> = Vec::new();
    let mut levels = Vec::new();
    let mut element = None;
    for k in (1..=n).rev() {
        let prefix = |e: &InscribedElement| (k + 1..=n).rev().zip(chosen.iter()).all(|(j, x)| e.x(j) == *x);
        let candidates: Vec<&InscribedElement> = z.zeta(k).iter().filter(|e| prefix(e)).collect();
        let mut found = Vec::new();
        let mut first = None;
        for e in &candidates {
            match find_cancellable_domains(ctx, &g, &e.x(k), &seams) {
                Ok(f) => found.push((*e, f)),
                Err(err) => {
                    first.get_or_insert(err.to_string());
                }
            }
        }
        let (e, family) = match found.len() {
            0 => return Err(DecomposeError::NoCandidate { k, tried: candidates.len(), first: first.unwrap_or_default() }),
            1 => found.pop().unwrap(),
            count => return Err(DecomposeError::Ambiguous { k, count }),
        };
        check_cancellable(ctx, &g, &family.domains, &family.associated).map_err(|error| DecomposeError::Cancel { k, error })?;
        let audit_err = |detail: String| DecomposeError::Audit { k, detail };
        // The previous seam lies inside the domains.
        let inside: BTreeSet<u32> = family.domains.iter().flatten().copied().collect();
        if let Some(tri) = seams.iter().find(|(_, (a, b))| !inside.contains(&a.0) || !inside.contains(&b.0)).map(|(tri, _)| tri) {
            return Err(audit_err(format!("seam over {tri:?} is not cancelled")));
        }
        let (before, before_copies) = preimage_counts(&g.cx, t);
        let c = cancel(ctx, &g, &family).map_err(|error| DecomposeError::Cancel { k, error })?;
        if !c.regularity.is_regular() {
            return Err(DecomposeError::Irregular { k, cells: c.regularity.irregular() });
        }
        let (after, after_copies) = preimage_counts(&c.result.cx, t);
        // Counting identity over the interior of D_k.
        let mut counted = 0;
        for b in ctx.stratum(k).tets.iter().map(|tet| tet.base) {
            if after_copies[b as usize] + 1 != before_copies[b as usize] {
                return Err(audit_err(format!("base tetrahedron {b} keeps {} of {} copies", after_copies[b as usize], before_copies[b as usize])));
            }
            counted += 1;
        }
        for cell in interior_cells(ctx, k) {
            let (p0, i0) = before.get(&cell).copied().unwrap_or_default();
            let (p1, i1) = after.get(&cell).copied().unwrap_or_default();
            if p1 as i64 + i1 as i64 != p0 as i64 + i0 as i64 - 1 {
                return Err(audit_err(format!("counting identity fails at {cell:?}: {p0}+{i0} before, {p1}+{i1} after")));
            }
            counted += 1;
        }
        // Branch set of the new map is S(X_k) minus S(X_{k+1}), of index
        // 2 at branch vertices of degree > 2 in S(X_k) and 1 elsewhere.
        let x_above = chosen.last().cloned().unwrap_or_default();
        let branch = n_graph(&family.associated, &x_above);
        let ld = local_degrees(&c.result.cx, t);
        let (bedges, bverts) = ld.branch_set();
        if bedges != branch {
            let extra: Vec<_> = bedges.difference(&branch).collect();
            let missing: Vec<_> = branch.difference(&bedges).collect();
            return Err(audit_err(format!("branch edges: {} extra {:?}, {} missing {:?}", extra.len(), extra.first(), missing.len(), missing.first())));
        }
        let s_here = family.associated.singular_set();
        let s_above: BTreeSet<u32> = x_above.singular_set().iter().flatten().copied().collect();
        let mut sdeg: BTreeMap<u32, usize> = BTreeMap::new();
        for s in &s_here {
            for &v in s {
                *sdeg.entry(v).or_default() += 1;
            }
        }
        let bvset: BTreeSet<u32> = branch.iter().flatten().copied().collect();
        for (&v, &idx) in &bverts {
            let want = if sdeg.get(&v).is_some_and(|&d| d > 2) && !s_above.contains(&v) { 2 } else { 1 };
            if !bvset.contains(&v) || idx != want {
                return Err(audit_err(format!("vertex {v} has index {idx}, expected {}", if bvset.contains(&v) { want } else { 0 })));
            }
        }
        if let Some(v) = bvset.iter().find(|v| !bverts.contains_key(v)) {
            return Err(audit_err(format!("branch vertex {v} is unbranched")));
        }
        // Seam and non-seam sheets alternate around each branch edge.
        let mut alternating = 0;
        for e in &branch {
            let Some(pattern) = seam_pattern(&c.result.cx, t, e, &family.associated, &c.seams) else { continue };
            let alt = pattern.len() % 2 == 0 && (0..pattern.len()).all(|i| pattern[i] != pattern[(i + 1) % pattern.len()]);
            if !alt {
                return Err(audit_err(format!("seam sheets do not alternate around {e:?}: {pattern:?}")));
            }
            alternating += 1;
        }
        // Boundary descent: the boundary now lies over ∂D_1 ∪ … ∪ ∂D_{k−1}.
        let mut want = BTreeSet::new();
        for j in 1..k {
            for (b, i) in region_boundary(ctx, j) {
                want.insert(face_of(&t.tets[b as usize], i as usize));
            }
        }
        let mut have = BTreeSet::new();
        for (y, tet) in c.result.cx.tets.iter().enumerate() {
            for i in 0..4u8 {
                if tet.glue[i as usize].is_none() {
                    have.insert(c.result.cx.base_face(t, (y as u32, i)));
                }
            }
        }
        if have != want {
            let extra = have.difference(&want).copied().collect();
            let missing = want.difference(&have).copied().collect();
            return Err(audit_err(format!("boundary after cancelling: {}", describe(&extra, &missing))));
        }
        levels.push(LevelAudit {
            k,
            domains: family.domains.len(),
            wall_triangles: family.wall.tris.len(),
            branch_edges: bedges.len(),
            branch_vertices: bverts.len(),
            counted_cells: counted,
            alternating_edges: alternating,
        });
        chosen.push(family.associated.clone());
        seams = c.seams;
        g = c.result;
        if k == 1 {
            element = Some(e.clone());
        }
    }
    // Cancelling D_1 leaves nothing: g_1 was the embedding of D_1.
    if !g.cx.is_empty() {
        return Err(DecomposeError::Audit { k: 1, detail: format!("{} tetrahedra left", g.cx.len()) });
    }
    let element = element.ok_or(DecomposeError::NotGood)?;
    let key = key_hex(&canonical_key(&element));
    if !element.is_good() || !good_elements(z).iter().any(|e| key_hex(&canonical_key(e)) == key) {
        return Err(DecomposeError::NotGood);
    }
    Ok(Decomposition { key, levels, element })
}

/// Assembles each good element and decomposes it again.
pub fn round_trip(ctx: &Context, z: &InscribedSet) -> Vec<(String, Result<String, String>)> {
    use rayon::prelude::*;
    good_elements(z)
        .par_iter()
        .map(|e| {
            let key = key_hex(&canonical_key(e));
            let back = crate::extension::assemble_extension(ctx, e)
                .map_err(|err| format!("assembly: {err}"))
                .and_then(|(ext, _)| decompose_extension(ctx, z, &ext).map_err(|err| err.to_string()))
                .and_then(|d| if d.key == key { Ok(d.key) } else { Err(format!("recovered {}", d.key)) });
            (key, back)
        })
        .collect()
}
