//! The inscribed map of a good element, its manifold certificate and
//! invariants, and the arc test telling two extensions apart.

use crate::complexes::good::TwoComplex;
use crate::complexes::relative::{cut_complex, CutError};
use crate::complexes::{fundamental_group, Boundary, FundamentalGroup};
use crate::cx::{Cx, FaceRef, Skeleton, LOCAL_EDGES};
use crate::geometry::orient2d_on;
use crate::group::AbelianGroup;
use crate::homology::homology;
use crate::inscribed::{canonical_key, good_elements, inscribed_set, key_hex, Config, Context, InscribedElement, InscribedSet, PipelineError};
use crate::surface::ImmersedSurface;
use crate::triangulation::{Seg, Tri};
use crate::util::UnionFind;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, VecDeque};
use thiserror::Error;

/// A compact 3-manifold glued from copies of base tetrahedra. The map to R³
/// sends each tetrahedron onto its base.
#[derive(Debug, Clone)]
pub struct Extension {
    pub cx: Cx,
    /// Stratum k whose copy each tetrahedron belongs to.
    pub layer: Vec<u32>,
    /// Hex digest of the source element's canonical key.
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum AssemblyError {
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error("triangle {tri:?} of X_{k} has {found} cut faces in layer {layer}, expected 2")]
    Gluing { k: u32, tri: Tri, layer: u32, found: usize },
    #[error("X_{k} and X_{} share triangle {tri:?}", k + 1)]
    SharedTriangle { k: u32, tri: Tri },
    #[error("element is not good")]
    NotGood,
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
}

/// Boundary faces of a layer lying over `x`, keyed by triangle, with the
/// face of the lower base tetrahedron first.
fn cut_faces(cx: &Cx, ctx: &Context, x: &TwoComplex, offset: u32) -> BTreeMap<Tri, Vec<FaceRef>> {
    let mut out: BTreeMap<Tri, Vec<FaceRef>> = BTreeMap::new();
    for (i, tet) in cx.tets.iter().enumerate() {
        for f in 0..4u8 {
            if tet.glue[f as usize].is_none() {
                let tri = cx.base_face(&ctx.t, (i as u32, f));
                if x.tris.contains(&tri) {
                    out.entry(tri).or_default().push((i as u32 + offset, f));
                }
            }
        }
    }
    for v in out.values_mut() {
        v.sort_by_key(|&(y, _)| cx.tets[(y - offset) as usize].base);
    }
    out
}

/// Copies D'_k of D_k cut along X_k ∪ X_{k+1}, glued crosswise over every
/// triangle of X_k: the copy in D'_k on one side meets the copy in D'_{k−1}
/// on the other. No manifold check.
pub fn assemble_unchecked(ctx: &Context, e: &InscribedElement) -> Result<Extension, AssemblyError> {
    let n = ctx.n();
    let mut layers = Vec::new();
    for k in 1..=n {
        let (x, above) = (e.x(k), e.x(k + 1));
        if let Some(tri) = x.tris.intersection(&above.tris).next() {
            return Err(AssemblyError::SharedTriangle { k, tri: *tri });
        }
        let cut = x.union(&above);
        layers.push(cut_complex(ctx.stratum(k), &ctx.t, &cut)?);
    }
    let refs: Vec<&Cx> = layers.iter().collect();
    let (mut cx, offsets) = Cx::disjoint_union(&refs);
    let mut layer = Vec::with_capacity(cx.len());
    for (k, l) in layers.iter().enumerate() {
        layer.extend(std::iter::repeat(k as u32 + 1).take(l.len()));
    }
    for k in 2..=n {
        let x = e.x(k);
        let upper = cut_faces(&layers[k as usize - 1], ctx, &x, offsets[k as usize - 1]);
        let lower = cut_faces(&layers[k as usize - 2], ctx, &x, offsets[k as usize - 2]);
        for tri in &x.tris {
            let (u, l) = (upper.get(tri).map_or(&[][..], Vec::as_slice), lower.get(tri).map_or(&[][..], Vec::as_slice));
            if u.len() != 2 {
                return Err(AssemblyError::Gluing { k, tri: *tri, layer: k, found: u.len() });
            }
            if l.len() != 2 {
                return Err(AssemblyError::Gluing { k, tri: *tri, layer: k - 1, found: l.len() });
            }
            cx.glue(u[0], l[1]);
            cx.glue(l[0], u[1]);
        }
    }
    Ok(Extension { cx, layer, key: key_hex(&canonical_key(e)) })
}

/// Assembles the inscribed map and certifies it.
pub fn assemble_extension(ctx: &Context, e: &InscribedElement) -> Result<(Extension, Certificate), AssemblyError> {
    if !e.is_good() {
        return Err(AssemblyError::NotGood);
    }
    let ext = assemble_unchecked(ctx, e)?;
    let cert = verify_manifold(ctx, &ext)?;
    Ok((ext, cert))
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum ManifoldError {
    #[error("empty complex")]
    Empty,
    #[error("the component of tetrahedron {tet} does not reach the boundary")]
    Unanchored { tet: u32 },
    #[error("edge {seg:?}: {detail}")]
    EdgeLink { seg: Seg, detail: String },
    #[error("vertex {vertex}: {detail}")]
    VertexLink { vertex: u32, detail: String },
    #[error("boundary triangle {tri:?}: {detail}")]
    Boundary { tri: Tri, detail: String },
    #[error("base tetrahedron {tet} has {copies} copies, winding number {winding}")]
    PreimageCount { tet: u32, copies: usize, winding: i64 },
}

/// Summary of a verified extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub components: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub tets: usize,
    pub boundary_faces: usize,
    pub euler: i64,
    pub boundary_euler: i64,
}

/// Tetrahedra of the base around each vertex and edge.
fn base_degrees(ctx: &Context) -> (HashMap<u32, usize>, HashMap<Seg, usize>) {
    let mut vd = HashMap::new();
    let mut ed = HashMap::new();
    for c in &ctx.t.tets {
        for &v in c {
            *vd.entry(v).or_default() += 1;
        }
        for &(a, b) in &LOCAL_EDGES {
            *ed.entry([c[a], c[b]]).or_default() += 1;
        }
    }
    (vd, ed)
}

/// Checks that the complex is a connected 3-manifold immersed by its map,
/// that the boundary is the surface once over, and that every base
/// tetrahedron has as many copies as its winding number.
pub fn verify_manifold(ctx: &Context, ext: &Extension) -> Result<Certificate, ManifoldError> {
    let (cx, t) = (&ext.cx, &ctx.t);
    if cx.is_empty() {
        return Err(ManifoldError::Empty);
    }
    // Every component reaches the boundary. For a connected surface this
    // makes the complex connected.
    let (label, components) = cx.components();
    let mut anchored = vec![false; components];
    for (x, tet) in cx.tets.iter().enumerate() {
        if tet.glue.iter().any(Option::is_none) {
            anchored[label[x]] = true;
        }
    }
    if let Some(c) = anchored.iter().position(|&a| !a) {
        let tet = label.iter().position(|&l| l == c).unwrap() as u32;
        return Err(ManifoldError::Unanchored { tet });
    }
    let sk = cx.skeleton(t);
    let (vdeg, edeg) = base_degrees(ctx);
    check_edges(cx, t, &sk, &edeg)?;
    check_vertices(cx, &sk, &vdeg)?;
    let boundary_faces = check_boundary(ctx, ext)?;
    let mut copies = vec![0usize; t.len()];
    for tet in &cx.tets {
        copies[tet.base as usize] += 1;
    }
    for (b, &c) in copies.iter().enumerate() {
        let w = t.winding(b as u32).max(0);
        if c as i64 != w {
            return Err(ManifoldError::PreimageCount { tet: b as u32, copies: c, winding: w });
        }
    }
    let (v, e, f) = (sk.n_verts(), sk.n_edges(), sk.n_faces());
    let euler = v as i64 - e as i64 + f as i64 - cx.len() as i64;
    let boundary_euler = Boundary::new(cx, t).euler_characteristic(cx, t);
    Ok(Certificate { components, vertices: v, edges: e, faces: f, tets: cx.len(), boundary_faces, euler, boundary_euler })
}

fn check_edges(cx: &Cx, t: &crate::triangulation::BaseComplex, sk: &Skeleton, edeg: &HashMap<Seg, usize>) -> Result<(), ManifoldError> {
    let mut members = vec![0usize; sk.n_edges()];
    for row in &sk.edge_of {
        for &e in row {
            members[e as usize] += 1;
        }
    }
    for e in 0..sk.n_edges() {
        let (x, k) = sk.edge_rep[e];
        let (a, b) = LOCAL_EDGES[k as usize];
        let c = cx.corners(t, x);
        let s = [c[a], c[b]];
        let star = cx.edge_star(t, x, &s);
        let fail = |detail: String| Err(ManifoldError::EdgeLink { seg: s, detail });
        if star.tets.len() != members[e] {
            return fail(format!("star has {} tetrahedra but the edge class has {}", star.tets.len(), members[e]));
        }
        let mut bases: Vec<u32> = star.tets.iter().map(|&(y, _, _)| cx.tets[y as usize].base).collect();
        bases.sort_unstable();
        if bases.windows(2).any(|w| w[0] == w[1]) {
            return fail("star is not injective on the base".into());
        }
        if star.closed == sk.edge_boundary[e] {
            return fail(format!("star closed = {} on a {} edge", star.closed, if sk.edge_boundary[e] { "boundary" } else { "interior" }));
        }
        if star.closed && edeg.get(&s) != Some(&star.tets.len()) {
            return fail(format!("star covers {} of {:?} base tetrahedra", star.tets.len(), edeg.get(&s)));
        }
    }
    Ok(())
}

fn check_vertices(cx: &Cx, sk: &Skeleton, vdeg: &HashMap<u32, usize>) -> Result<(), ManifoldError> {
    let mut star: Vec<Vec<(u32, u8)>> = vec![Vec::new(); sk.n_verts()];
    for (x, row) in sk.vert_of.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            star[v as usize].push((x as u32, i as u8));
        }
    }
    for v in 0..sk.n_verts() {
        let base = sk.vert_base[v];
        let fail = |detail: String| Err(ManifoldError::VertexLink { vertex: base, detail });
        let s = &star[v];
        let mut bases: Vec<u32> = s.iter().map(|&(x, _)| cx.tets[x as usize].base).collect();
        bases.sort_unstable();
        if bases.windows(2).any(|w| w[0] == w[1]) {
            return fail("star is not injective on the base".into());
        }
        // Link: a triangle per star tetrahedron, edges from faces through v,
        // vertices from edges through v.
        let pos: HashMap<u32, usize> = s.iter().enumerate().map(|(k, &(x, _))| (x, k)).collect();
        let mut uf = UnionFind::new(s.len());
        let mut link_edges = std::collections::BTreeSet::new();
        let mut link_verts = std::collections::BTreeSet::new();
        for (k, &(x, iv)) in s.iter().enumerate() {
            for i in 0..4u8 {
                if i == iv {
                    continue;
                }
                link_edges.insert(sk.face_of[x as usize][i as usize]);
                if let Some((y, _)) = cx.tets[x as usize].glue[i as usize] {
                    match pos.get(&y) {
                        Some(&m) => {
                            uf.union(k, m);
                        }
                        None => return fail("glued neighbour missing from the star".into()),
                    }
                }
            }
            for (e, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
                if a == iv as usize || b == iv as usize {
                    link_verts.insert(sk.edge_of[x as usize][e]);
                }
            }
        }
        if uf.labels().1 != 1 {
            return fail("link is disconnected".into());
        }
        let chi = link_verts.len() as i64 - link_edges.len() as i64 + s.len() as i64;
        let want = if sk.vert_boundary[v] { 1 } else { 2 };
        if chi != want {
            return fail(format!("link has Euler characteristic {chi}, expected {want}"));
        }
        if !sk.vert_boundary[v] && vdeg.get(&base) != Some(&s.len()) {
            return fail(format!("star covers {} of {:?} base tetrahedra", s.len(), vdeg.get(&base)));
        }
    }
    Ok(())
}

/// Boundary faces biject with the image triangles of the base, each on the
/// side its sheet's orientation points away from. Returns their number.
fn check_boundary(ctx: &Context, ext: &Extension) -> Result<usize, ManifoldError> {
    let (cx, t, a) = (&ext.cx, &ctx.t, &ctx.t.arr);
    let mut seen: HashMap<Tri, FaceRef> = HashMap::new();
    for (x, tet) in cx.tets.iter().enumerate() {
        for i in 0..4u8 {
            if tet.glue[i as usize].is_some() {
                continue;
            }
            let tri = cx.base_face(t, (x as u32, i));
            let fail = |detail: &str| Err(ManifoldError::Boundary { tri, detail: detail.into() });
            let Some(f) = t.carrier_face(&tri) else { return fail("does not lie in an arrangement face") };
            let face = &a.faces[f as usize];
            let [p] = face.patches[..] else { return fail("does not lie on exactly one sheet of the image") };
            let opposite = t.position(cx.corners(t, x as u32)[i as usize]);
            let side = a.planes[face.plane as usize].side(&opposite);
            if side != -a.patches[p as usize].normal_sign {
                return fail("lies on the wrong side of its sheet");
            }
            if seen.insert(tri, (x as u32, i)).is_some() {
                return fail("covered twice");
            }
        }
    }
    let image: usize = image_triangles(ctx).len();
    if seen.len() != image {
        return Err(ManifoldError::Boundary { tri: [0, 0, 0], detail: format!("boundary has {} triangles, the image {}", seen.len(), image) });
    }
    Ok(seen.len())
}

/// Base triangles lying in image faces of the arrangement.
pub fn image_triangles(ctx: &Context) -> Vec<Tri> {
    let t = &ctx.t;
    let mut out = std::collections::BTreeSet::new();
    for c in &t.tets {
        for i in 0..4 {
            let tri = crate::triangulation::face_of(c, i);
            if t.carrier_face(&tri).is_some_and(|f| t.arr.faces[f as usize].is_image()) {
                out.insert(tri);
            }
        }
    }
    out.into_iter().collect()
}

/// Surface triangle containing each boundary face of the extension.
pub fn boundary_identification(ctx: &Context, s: &ImmersedSurface, ext: &Extension) -> Vec<(FaceRef, usize)> {
    let (cx, t, a) = (&ext.cx, &ctx.t, &ctx.t.arr);
    let mut out = Vec::new();
    for (x, tet) in cx.tets.iter().enumerate() {
        for i in 0..4u8 {
            if tet.glue[i as usize].is_some() {
                continue;
            }
            let tri = cx.base_face(t, (x as u32, i));
            let Some(f) = t.carrier_face(&tri) else { continue };
            let face = &a.faces[f as usize];
            let drop = a.planes[face.plane as usize].drop_axis();
            let p = crate::geometry::P3::centroid(tri.iter().map(|&v| &t.positions[v as usize]));
            let found = face.patches.iter().flat_map(|&pi| a.patches[pi as usize].triangles.iter().copied()).find(|&st| {
                let [u, v, w] = s.corners(st);
                let signs = [orient2d_on(drop, u, v, &p), orient2d_on(drop, v, w, &p), orient2d_on(drop, w, u, &p)];
                signs.iter().all(|&g| g >= 0) || signs.iter().all(|&g| g <= 0)
            });
            if let Some(st) = found {
                out.push(((x as u32, i), st));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BallVerdict {
    Ball,
    NotBall,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub euler: i64,
    /// H₀..H₃; absent when the integer elimination overflowed.
    pub homology: Option<Vec<AbelianGroup>>,
    pub pi1: FundamentalGroup,
    pub boundary_euler: i64,
    pub boundary_components: usize,
    pub ball_verdict: BallVerdict,
}

/// Number of connected components of the boundary surface.
fn boundary_components(cx: &Cx, t: &crate::triangulation::BaseComplex) -> usize {
    let b = Boundary::new(cx, t);
    let mut uf = UnionFind::new(b.len());
    for (k, adj) in b.adj.iter().enumerate() {
        for a in adj {
            uf.union(k, a.to);
        }
    }
    uf.labels().1
}

/// Euler characteristic, homology and π₁ of a complex, with the ball verdict.
pub fn invariants(ctx: &Context, cx: &Cx) -> InvariantReport {
    let t = &ctx.t;
    let sk = cx.skeleton(t);
    let euler = sk.n_verts() as i64 - sk.n_edges() as i64 + sk.n_faces() as i64 - cx.len() as i64;
    let homology = homology(cx, &sk);
    let pi1 = fundamental_group(cx, t, ctx.config.tietze_budget);
    let boundary_euler = Boundary::new(cx, t).euler_characteristic(cx, t);
    let boundary_components = boundary_components(cx, t);
    let sphere_boundary = boundary_components == 1 && boundary_euler == 2;
    let acyclic = homology
        .as_ref()
        .map(|h| h[0].free_rank == 1 && h[0].torsion.is_empty() && h[1..].iter().all(AbelianGroup::is_trivial));
    let obstructed = euler != 1 || !sphere_boundary || homology.as_ref().is_some_and(|h| !h[1].is_trivial()) || acyclic == Some(false);
    let ball_verdict = if obstructed {
        BallVerdict::NotBall
    } else if acyclic == Some(true) && pi1.simplified.is_trivial() {
        BallVerdict::Ball
    } else {
        BallVerdict::Unknown
    };
    InvariantReport { euler, homology, pi1, boundary_euler, boundary_components, ball_verdict }
}

/// One equivalence class of extensions.
#[derive(Debug, Clone, Serialize)]
pub struct ClassEntry {
    pub key: String,
    /// Triangle count of every X_k, top level first.
    pub x_sizes: Vec<(u32, usize)>,
    pub certificate: Option<Certificate>,
    pub invariants: Option<InvariantReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub n: u32,
    /// |ζ_k| for k = 1..n.
    pub zeta_sizes: Vec<usize>,
    pub class_count: usize,
    pub classes: Vec<ClassEntry>,
    pub partial: bool,
    pub diagnostics: Vec<String>,
    pub refinement: u32,
}

/// Assembles, certifies and measures every good element of `z`.
pub fn classify_set(ctx: &Context, z: &InscribedSet) -> (ClassificationReport, Vec<Option<Extension>>) {
    let good = good_elements(z);
    let mut results: Vec<(ClassEntry, Option<Extension>)> = good
        .par_iter()
        .map(|e| {
            let key = key_hex(&canonical_key(e));
            let x_sizes = e.pairs.iter().map(|p| (p.k, p.chosen.tris.len())).collect();
            match assemble_extension(ctx, e) {
                Ok((ext, cert)) => {
                    let inv = invariants(ctx, &ext.cx);
                    (ClassEntry { key, x_sizes, certificate: Some(cert), invariants: Some(inv), error: None }, Some(ext))
                }
                Err(err) => (ClassEntry { key, x_sizes, certificate: None, invariants: None, error: Some(err.to_string()) }, None),
            }
        })
        .collect();
    results.sort_by(|a, b| a.0.key.cmp(&b.0.key));
    let (classes, exts): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let mut diagnostics = z.diagnostics.clone();
    diagnostics.extend(classes.iter().filter_map(|c| c.error.as_ref().map(|e| format!("class {}: {e}", &c.key[..12]))));
    let report = ClassificationReport {
        n: z.n,
        zeta_sizes: z.level_sizes(),
        class_count: classes.len(),
        partial: z.partial || classes.iter().any(|c| c.error.is_some()),
        classes,
        diagnostics,
        refinement: z.refinement,
    };
    (report, exts)
}

/// The full pipeline: strata, inscribed set, one extension per good element.
pub fn classify(s: &ImmersedSurface, config: Config) -> Result<(Context, InscribedSet, ClassificationReport, Vec<Option<Extension>>), PipelineError> {
    let (ctx, z) = inscribed_set(s, config)?;
    let (report, exts) = classify_set(&ctx, &z);
    Ok((ctx, z, report, exts))
}

/// How a lifted path ends differently in the two extensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcEnd {
    /// The path reaches the boundary of extension `reaches` through
    /// `face` while continuing in the other.
    Boundary { reaches: u8, face: Tri },
    /// Lifts started at two boundary points meet in one extension but not
    /// in the other.
    Mismatch { other_start: Tri },
}

/// A path of base tetrahedra from a boundary triangle whose lifts to the
/// two extensions behave differently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcWitness {
    pub start: Tri,
    pub path: Vec<u32>,
    pub end: ArcEnd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcSearch {
    pub witness: Option<ArcWitness>,
    /// Tetrahedron pairs visited.
    pub explored: usize,
}

fn boundary_lifts(cx: &Cx, ctx: &Context) -> HashMap<Tri, u32> {
    let mut out = HashMap::new();
    for (x, tet) in cx.tets.iter().enumerate() {
        for i in 0..4u8 {
            if tet.glue[i as usize].is_none() {
                out.insert(cx.base_face(&ctx.t, (x as u32, i)), x as u32);
            }
        }
    }
    out
}

/// Lifts paths from every boundary triangle into both extensions at once.
/// An equivalence over R³ fixing the boundary would carry one lift onto the
/// other, so a path that ends on the boundary in one extension only, or
/// two lifts that meet in one only, tells them apart. `None` means no such
/// path exists: the lifts then define a cellwise equivalence.
pub fn arc_distinguisher(ctx: &Context, m1: &Extension, m2: &Extension) -> ArcSearch {
    let (b1, b2) = (boundary_lifts(&m1.cx, ctx), boundary_lifts(&m2.cx, ctx));
    let mut starts: Vec<&Tri> = b1.keys().filter(|k| b2.contains_key(*k)).collect();
    starts.sort_unstable();
    // Pair index per tet of m1, with its partner, parent pair and start.
    let mut partner: HashMap<u32, (u32, Option<usize>, Tri)> = HashMap::new();
    let mut order: Vec<(u32, u32)> = Vec::new();
    let mut queue = VecDeque::new();
    let path_to = |order: &[(u32, u32)], partner: &HashMap<u32, (u32, Option<usize>, Tri)>, mut k: usize| {
        let mut out = vec![m1.cx.tets[order[k].0 as usize].base];
        while let Some(p) = partner[&order[k].0].1 {
            k = p;
            out.push(m1.cx.tets[order[k].0 as usize].base);
        }
        out.reverse();
        out
    };
    for &s in &starts {
        let (x1, x2) = (b1[s], b2[s]);
        match partner.get(&x1) {
            Some(&(y2, _, other)) if y2 != x2 => {
                let k = order.iter().position(|&(a, _)| a == x1).unwrap();
                return ArcSearch {
                    witness: Some(ArcWitness { start: *s, path: path_to(&order, &partner, k), end: ArcEnd::Mismatch { other_start: other } }),
                    explored: order.len(),
                };
            }
            Some(_) => {}
            None => {
                partner.insert(x1, (x2, None, *s));
                order.push((x1, x2));
                queue.push_back(order.len() - 1);
            }
        }
    }
    while let Some(k) = queue.pop_front() {
        let (x1, x2) = order[k];
        let start = partner[&x1].2;
        for i in 0..4u8 {
            let g1 = m1.cx.tets[x1 as usize].glue[i as usize];
            let g2 = m2.cx.tets[x2 as usize].glue[i as usize];
            let face = m1.cx.base_face(&ctx.t, (x1, i));
            let end = match (g1, g2) {
                (None, None) => continue,
                (None, Some(_)) => Some(ArcEnd::Boundary { reaches: 1, face }),
                (Some(_), None) => Some(ArcEnd::Boundary { reaches: 2, face }),
                (Some((y1, _)), Some((y2, _))) => match partner.get(&y1) {
                    Some(&(z2, _, other)) if z2 != y2 => Some(ArcEnd::Mismatch { other_start: other }),
                    Some(_) => None,
                    None => {
                        partner.insert(y1, (y2, Some(k), start));
                        order.push((y1, y2));
                        queue.push_back(order.len() - 1);
                        None
                    }
                },
            };
            if let Some(end) = end {
                return ArcSearch { witness: Some(ArcWitness { start, path: path_to(&order, &partner, k), end }), explored: order.len() };
            }
        }
    }
    ArcSearch { witness: None, explored: order.len() }
}
