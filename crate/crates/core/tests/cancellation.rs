use extend_core::cancellation::*;
use extend_core::complexes::good::TwoComplex;
use extend_core::extension::{assemble_extension, Extension};
use extend_core::inscribed::{canonical_key, good_elements, inscribed_set, key_hex, Config, Context, InscribedSet};
use extend_core::samples;
use extend_core::surface::ImmersedSurface;
use extend_core::triangulation::face_of;
use std::collections::BTreeMap;

fn setup(s: &ImmersedSurface) -> (Context, InscribedSet, Vec<Extension>) {
    let (ctx, z) = inscribed_set(s, Config::default()).unwrap();
    let exts = good_elements(&z).iter().map(|e| assemble_extension(&ctx, e).unwrap().0).collect();
    (ctx, z, exts)
}

fn top(ctx: &Context, ext: &Extension) -> BranchedImmersion {
    BranchedImmersion::new(ext.cx.clone(), &ctx.t, ctx.n()).unwrap()
}

/// Tetrahedra of layer `k` lying over the base tetrahedra of D_j.
fn layer_over(ctx: &Context, ext: &Extension, k: u32, j: u32) -> Vec<u32> {
    let over: std::collections::BTreeSet<u32> = ctx.stratum(j).tets.iter().map(|t| t.base).collect();
    (0..ext.cx.len() as u32).filter(|&y| ext.layer[y as usize] == k && over.contains(&ext.cx.tets[y as usize].base)).collect()
}

#[test]
fn embedded_ball_cancels_to_nothing() {
    let (ctx, _, exts) = setup(&samples::octahedron());
    let g = top(&ctx, &exts[0]);
    assert!(g.cone_points.is_empty());
    let x = TwoComplex::default();
    let family = find_cancellable_domains(&ctx, &g, &x, &BTreeMap::new()).unwrap();
    assert_eq!(family.domains.len(), 1);
    assert_eq!(family.domains[0].len(), g.cx.len());
    check_cancellable(&ctx, &g, &family.domains, &x).unwrap();
    let c = cancel(&ctx, &g, &family).unwrap();
    assert!(c.result.cx.is_empty());
    assert!(c.regularity.is_regular() && c.regularity.classes.is_empty());
}

/// The top-level family of the two-sheet extension and, per domain, the
/// layer-1 tetrahedra over the same base.
fn two_sheet_family() -> (Context, BranchedImmersion, CancellableFamily, Vec<Vec<u32>>) {
    let (ctx, z, exts) = setup(&samples::two_sheet_sphere());
    let ext = &exts[0];
    let g = top(&ctx, ext);
    let family = find_cancellable_domains(&ctx, &g, &good_elements(&z)[0].x(2), &BTreeMap::new()).unwrap();
    let below = family
        .domains
        .iter()
        .map(|d| {
            let bases: std::collections::BTreeSet<u32> = d.iter().map(|&y| ext.cx.tets[y as usize].base).collect();
            (0..ext.cx.len() as u32).filter(|&y| ext.layer[y as usize] == 1 && bases.contains(&ext.cx.tets[y as usize].base)).collect()
        })
        .collect();
    (ctx, g, family, below)
}

#[test]
fn two_domains_over_one_piece_are_not_cancellable() {
    let (ctx, g, family, below) = two_sheet_family();
    let domains = vec![family.domains[0].clone(), below[0].clone()];
    let err = check_cancellable(&ctx, &g, &domains, &family.associated).unwrap_err();
    assert!(matches!(err, CancelError::Pieces(_)), "{err}");
}

#[test]
fn two_sheet_top_level_has_two_domains() {
    let (ctx, z, exts) = setup(&samples::two_sheet_sphere());
    let e = good_elements(&z)[0];
    let g = top(&ctx, &exts[0]);
    let x = e.x(2);
    let family = find_cancellable_domains(&ctx, &g, &x, &BTreeMap::new()).unwrap();
    assert_eq!(family.domains.len(), 2);
    assert_eq!(family.wall, x);
    check_cancellable(&ctx, &g, &family.domains, &x).unwrap();
    // The domains are the top layer of the assembled extension.
    let mut all: Vec<u32> = family.domains.concat();
    all.sort_unstable();
    let mut layer2 = layer_over(&ctx, &exts[0], 2, 2);
    layer2.sort_unstable();
    assert_eq!(all, layer2);
}

#[test]
fn boundary_preimage_violation_is_rejected() {
    // Layer-1 copies have the right images but are glued onward across ∂D_2.
    let (ctx, g, family, below) = two_sheet_family();
    let err = check_cancellable(&ctx, &g, &below, &family.associated).unwrap_err();
    assert!(matches!(err, CancelError::BoundaryPreimage { .. }), "{err}");
}

#[test]
fn unanchored_piece_is_not_determined() {
    let ctx = Context::new(&samples::octahedron(), Config::default()).unwrap().refine();
    let g = BranchedImmersion::new(ctx.stratum(1).clone(), &ctx.t, 1).unwrap();
    // The link of a vertex away from ∂R encloses a piece with no anchor.
    let t = &ctx.t;
    let on_boundary: std::collections::BTreeSet<u32> =
        (0..g.cx.len() as u32).flat_map(|y| (0..4u8).map(move |i| (y, i))).filter(|&(y, i)| g.cx.tets[y as usize].glue[i as usize].is_none()).flat_map(|f| g.cx.base_face(t, f)).collect();
    let link_of = |v: u32| TwoComplex::new(t.tets.iter().filter_map(|c| c.iter().position(|&u| u == v).map(|i| face_of(c, i))));
    let link = (0..t.positions.len() as u32)
        .filter(|v| !on_boundary.contains(v))
        .map(link_of)
        .find(|l| !l.tris.is_empty() && l.vertices().iter().all(|u| !on_boundary.contains(u)))
        .unwrap();
    let err = find_cancellable_domains(&ctx, &g, &link, &BTreeMap::new()).unwrap_err();
    assert!(matches!(err, CancelError::NoAnchor { .. }), "{err}");
}

#[test]
fn regularity_of_the_two_sheet_cancellation() {
    let (ctx, z, exts) = setup(&samples::two_sheet_sphere());
    let x = good_elements(&z)[0].x(2);
    let g = top(&ctx, &exts[0]);
    let family = find_cancellable_domains(&ctx, &g, &x, &BTreeMap::new()).unwrap();
    let c = cancel(&ctx, &g, &family).unwrap();
    assert!(c.regularity.is_regular());
    let tri = *x.tris.first().unwrap();
    assert_eq!(regularity_at(&c.regularity, Cell::Tri(tri)), Ok(true));
    assert_eq!(regularity_at(&c.regularity, Cell::Vertex(tri[0])), Ok(true));
    let far = (0..ctx.t.positions.len() as u32).find(|v| !x.vertices().contains(v)).unwrap();
    assert!(regularity_at(&c.regularity, Cell::Vertex(far)).is_err());

    // Leaving the seams open splits the identification at interior wall
    // vertices.
    let mut open = c.result.cx.clone();
    for (a, _) in c.seams.values() {
        open.unglue(a.0, a.1);
    }
    let broken = regularity(&open, &ctx.t, &x, &c.seams);
    assert!(!broken.is_regular());
    assert!(broken.irregular().iter().all(|cell| regularity_at(&broken, *cell) == Ok(false)));
}

#[test]
fn round_trip_recovers_every_element() {
    for s in [samples::octahedron(), samples::torus_ring(), samples::genus_two(), samples::two_sheet_sphere(), samples::nested_shells()] {
        let (ctx, z, exts) = setup(&s);
        let keys: Vec<String> = good_elements(&z).iter().map(|e| key_hex(&canonical_key(e))).collect();
        for (ext, key) in exts.iter().zip(&keys) {
            let d = decompose_extension(&ctx, &z, ext).unwrap();
            assert_eq!(&d.key, key);
            assert_eq!(d.levels.len() as u32, ctx.n());
        }
        let mut sorted = keys.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), keys.len());
    }
}

#[test]
fn triple_point_branch_indices_are_audited() {
    let (ctx, z, exts) = setup(&samples::triple_bars());
    let d = decompose_extension(&ctx, &z, &exts[0]).unwrap();
    let top = &d.levels[0];
    assert_eq!(top.k, 3);
    assert!(top.branch_edges > 0);
    assert_eq!(top.alternating_edges, top.branch_edges);
    assert!(d.levels.iter().all(|l| l.counted_cells > 0));
}

#[test]
fn decomposition_rejects_straight_seams() {
    let (ctx, z, exts) = setup(&samples::two_sheet_sphere());
    let mut ext = exts[0].clone();
    // Reglue every crosswise pair over X_2 within its own layer.
    let x = good_elements(&z)[0].x(2);
    let mut over: BTreeMap<_, Vec<(u32, u8)>> = BTreeMap::new();
    for (y, tet) in ext.cx.tets.iter().enumerate() {
        for i in 0..4u8 {
            let tri = ext.cx.base_face(&ctx.t, (y as u32, i));
            if tet.glue[i as usize].is_some() && x.tris.contains(&tri) {
                over.entry(tri).or_default().push((y as u32, i));
            }
        }
    }
    for faces in over.values() {
        for &(y, i) in faces {
            ext.cx.unglue(y, i);
        }
        for k in [1, 2] {
            let mine: Vec<_> = faces.iter().copied().filter(|f| ext.layer[f.0 as usize] == k).collect();
            ext.cx.glue(mine[0], mine[1]);
        }
    }
    assert!(decompose_extension(&ctx, &z, &ext).is_err());
}
