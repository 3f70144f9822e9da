use extend_core::arrangement::StrataError;
use extend_core::cx::{Cx, CxTet};
use extend_core::extension::*;
use extend_core::inscribed::{good_elements, inscribed_set, Config, Context, PipelineError};
use extend_core::samples;
use extend_core::surface::ImmersedSurface;
use std::collections::BTreeMap;

fn classified(s: &ImmersedSurface) -> (Context, ClassificationReport, Vec<Extension>) {
    let (ctx, _, report, exts) = classify(s, Config::default()).unwrap();
    assert!(!report.partial, "{:?}", report.diagnostics);
    (ctx, report, exts.into_iter().map(Option::unwrap).collect())
}

fn homology_ranks(inv: &InvariantReport) -> Vec<usize> {
    let h = inv.homology.as_ref().unwrap();
    assert!(h.iter().all(|g| g.torsion.is_empty()));
    h.iter().map(|g| g.free_rank).collect()
}

#[test]
fn octahedron_bounds_a_ball() {
    let (_, report, exts) = classified(&samples::octahedron());
    assert_eq!(report.class_count, 1);
    let inv = report.classes[0].invariants.as_ref().unwrap();
    assert_eq!(inv.euler, 1);
    assert_eq!(homology_ranks(inv), [1, 0, 0, 0]);
    assert_eq!(inv.ball_verdict, BallVerdict::Ball);
    // n = 1: the extension is D_1 itself.
    assert!(exts[0].layer.iter().all(|&k| k == 1));
}

#[test]
fn reversed_octahedron_has_no_extension() {
    let err = classify(&samples::reversed_octahedron(), Config::default()).unwrap_err();
    assert!(matches!(err, PipelineError::Strata(StrataError::NegativeWinding { omega: -1, .. })));
}

#[test]
fn embedded_tori_bound_handlebodies() {
    for (s, genus) in [(samples::torus_ring(), 1), (samples::nine_vertex_torus(), 1), (samples::genus_two(), 2)] {
        let (_, report, _) = classified(&s);
        assert_eq!(report.class_count, 1);
        let inv = report.classes[0].invariants.as_ref().unwrap();
        assert_eq!(inv.euler, 1 - genus as i64);
        assert_eq!(homology_ranks(inv), [1, genus, 0, 0]);
        assert_eq!(inv.ball_verdict, BallVerdict::NotBall);
        assert!(!inv.pi1.simplified.is_trivial());
    }
}

#[test]
fn two_sheet_sphere_extends_to_a_ball() {
    let (_, report, exts) = classified(&samples::two_sheet_sphere());
    assert_eq!(report.class_count, 1);
    let cert = report.classes[0].certificate.as_ref().unwrap();
    assert_eq!(cert.boundary_euler, 2);
    assert_eq!(cert.components, 1);
    assert_eq!(report.classes[0].invariants.as_ref().unwrap().ball_verdict, BallVerdict::Ball);
    assert!(exts[0].layer.contains(&2));
}

#[test]
fn euler_characteristic_is_half_the_surface() {
    for s in [samples::octahedron(), samples::torus_ring(), samples::genus_two(), samples::two_sheet_sphere(), samples::nested_shells()] {
        let (_, report, _) = classified(&s);
        for c in &report.classes {
            let cert = c.certificate.as_ref().unwrap();
            assert_eq!(2 * cert.euler, s.euler_characteristic());
            assert_eq!(cert.boundary_euler, s.euler_characteristic());
        }
    }
}

#[test]
fn boundary_lies_over_the_surface() {
    let s = samples::two_sheet_sphere();
    let (ctx, _, exts) = classified(&s);
    let ids = boundary_identification(&ctx, &s, &exts[0]);
    let cert = verify_manifold(&ctx, &exts[0]).unwrap();
    assert_eq!(ids.len(), cert.boundary_faces);
    let mut hit = vec![false; s.triangles.len()];
    for (_, t) in ids {
        hit[t] = true;
    }
    assert!(hit.iter().all(|&h| h));
}

/// Pairs of glued faces joining different layers, grouped by base triangle.
fn seams(ctx: &Context, ext: &Extension) -> BTreeMap<[u32; 3], Vec<((u32, u8), (u32, u8))>> {
    let mut out: BTreeMap<_, Vec<_>> = BTreeMap::new();
    for (x, tet) in ext.cx.tets.iter().enumerate() {
        for (i, g) in tet.glue.iter().enumerate() {
            if let Some((y, j)) = *g {
                if (x as u32) < y && ext.layer[x] != ext.layer[y as usize] {
                    out.entry(ext.cx.base_face(&ctx.t, (x as u32, i as u8))).or_default().push(((x as u32, i as u8), (y, j)));
                }
            }
        }
    }
    out
}

#[test]
fn straight_gluing_across_a_seam_is_rejected() {
    let (ctx, z) = inscribed_set(&samples::two_sheet_sphere(), Config::default()).unwrap();
    let e = good_elements(&z)[0];
    let mut ext = assemble_unchecked(&ctx, e).unwrap();
    verify_manifold(&ctx, &ext).unwrap();
    let seams = seams(&ctx, &ext);
    let (_, pairs) = seams.iter().next().unwrap();
    let [(a, b), (c, d)] = pairs[..] else { panic!("seam triangle has {} gluings", pairs.len()) };
    for f in [a, b, c, d] {
        ext.cx.unglue(f.0, f.1);
    }
    // Glue each layer back to itself instead of crosswise.
    let (a, b, c, d) = if ext.layer[a.0 as usize] == ext.layer[c.0 as usize] { (a, c, b, d) } else { (a, d, b, c) };
    ext.cx.glue(a, b);
    ext.cx.glue(c, d);
    let err = verify_manifold(&ctx, &ext).unwrap_err();
    assert!(matches!(err, ManifoldError::EdgeLink { .. } | ManifoldError::VertexLink { .. }), "{err}");
}

#[test]
fn opening_an_interior_face_is_rejected() {
    let (ctx, _, exts) = classified(&samples::octahedron());
    let mut ext = exts[0].clone();
    let (x, i) = (0..ext.cx.len() as u32)
        .flat_map(|x| (0..4u8).map(move |i| (x, i)))
        .find(|&(x, i)| ext.cx.tets[x as usize].glue[i as usize].is_some())
        .unwrap();
    ext.cx.unglue(x, i);
    assert!(verify_manifold(&ctx, &ext).is_err());
}

#[test]
fn extra_copy_breaks_the_preimage_count() {
    let (ctx, _, exts) = classified(&samples::octahedron());
    let mut ext = exts[0].clone();
    ext.cx.tets.push(CxTet { base: ext.cx.tets[0].base, glue: [None; 4] });
    ext.layer.push(1);
    assert!(verify_manifold(&ctx, &ext).is_err());
}

fn relabeled(cx: &Cx) -> Cx {
    let n = cx.len() as u32;
    let perm = |x: u32| (x * 7 + 3) % n;
    let mut tets = cx.tets.clone();
    for (x, tet) in cx.tets.iter().enumerate() {
        tets[perm(x as u32) as usize] = CxTet { base: tet.base, glue: tet.glue.map(|g| g.map(|(y, j)| (perm(y), j))) };
    }
    Cx { tets }
}

#[test]
fn arc_search_finds_nothing_between_equal_extensions() {
    let (ctx, _, exts) = classified(&samples::torus_ring());
    assert_eq!(arc_distinguisher(&ctx, &exts[0], &exts[0]).witness, None);
    assert_ne!(exts[0].cx.len() % 7, 0);
    let moved = Extension { cx: relabeled(&exts[0].cx), layer: exts[0].layer.clone(), key: exts[0].key.clone() };
    verify_manifold(&ctx, &moved).unwrap();
    assert_eq!(arc_distinguisher(&ctx, &exts[0], &moved).witness, None);
}

#[test]
fn arc_search_separates_distinct_classes() {
    let (ctx, report, exts) = classified(&samples::nested_shells());
    assert_eq!(report.class_count, 2);
    let search = arc_distinguisher(&ctx, &exts[0], &exts[1]);
    let w = search.witness.expect("distinct classes");
    assert!(!w.path.is_empty());
    assert!(arc_distinguisher(&ctx, &exts[1], &exts[0]).witness.is_some());
}
