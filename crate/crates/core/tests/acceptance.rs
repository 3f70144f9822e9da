use extend_core::arrangement::{winding_number, StrataError};
use extend_core::cancellation::decompose_extension;
use extend_core::complexes::{is_appropriate, is_good_2complex, seg, Appropriateness, Boundary, Limits, SegSet, TwoComplex};
use extend_core::complexes::simple::{thicken_derived, Thickener};
use extend_core::cx::Cx;
use extend_core::extension::{classify, classify_set, verify_manifold, BallVerdict};
use extend_core::geometry::P3;
use extend_core::inscribed::{canonical_key, good_elements, inscribed_set, key_hex, Config, Context, PipelineError};
use extend_core::rational::{frac, int, Q};
use extend_core::report::{classification_json, to_text};
use extend_core::samples;
use extend_core::surface::ImmersedSurface;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

fn report(n: u32, what: &str, start: Instant) {
    println!("criterion {n}: PASS ({what}, {:.2?})", start.elapsed());
}

#[test]
fn criterion_1_embedded_sphere_bounds_one_ball() {
    let start = Instant::now();
    let (ctx, _, rep, exts) = classify(&samples::octahedron(), Config::default()).unwrap();
    assert_eq!(rep.class_count, 1);
    verify_manifold(&ctx, exts[0].as_ref().unwrap()).unwrap();
    let inv = rep.classes[0].invariants.as_ref().unwrap();
    assert_eq!(inv.euler, 1);
    let h = inv.homology.as_ref().unwrap();
    assert!(h[0].free_rank == 1 && h[0].torsion.is_empty() && h[1..].iter().all(|g| g.is_trivial()));
    assert_eq!(inv.ball_verdict, BallVerdict::Ball);
    assert!(start.elapsed() < Duration::from_secs(5));
    report(1, "1 class, ball", start);
}

#[test]
fn criterion_2_reversed_sphere_has_no_extension() {
    let start = Instant::now();
    let err = classify(&samples::reversed_octahedron(), Config::default()).unwrap_err();
    let PipelineError::Strata(StrataError::NegativeWinding { omega, .. }) = err else { panic!("{err}") };
    assert_eq!(omega, -1);
    assert!(err.to_string().contains("no extension"));
    report(2, "no extension, ω = −1", start);
}

#[test]
fn criterion_3_embedded_torus_bounds_a_solid_torus() {
    let start = Instant::now();
    for s in [samples::torus_ring(), samples::nine_vertex_torus()] {
        let (_, _, rep, _) = classify(&s, Config::default()).unwrap();
        assert_eq!(rep.class_count, 1);
        let inv = rep.classes[0].invariants.as_ref().unwrap();
        let h1 = &inv.homology.as_ref().unwrap()[1];
        assert!(h1.free_rank == 1 && h1.torsion.is_empty());
        assert_eq!(inv.ball_verdict, BallVerdict::NotBall);
    }
    assert!(start.elapsed() < Duration::from_secs(30));
    report(3, "1 class, H1 = Z, not a ball", start);
}

/// Signed crossings of the ray p + t·d, t > 0; `None` when the ray meets an
/// edge or lies in a triangle's plane.
fn ray_crossings(s: &ImmersedSurface, p: &P3, d: &P3) -> Option<i64> {
    let det = |a: &P3, b: &P3, c: &P3| a.dot(&b.cross(c));
    let mut w = 0;
    for t in 0..s.triangles.len() {
        let [a, b, c] = s.corners(t).map(|q| q.sub(p));
        let signs = [det(d, &a, &b), det(d, &b, &c), det(d, &c, &a)].map(|x| x.signum());
        if signs.iter().any(Zero::is_zero) {
            return None;
        }
        if signs[0] != signs[1] || signs[1] != signs[2] {
            continue;
        }
        let n = b.sub(&a).cross(&c.sub(&a));
        let (num, den) = (n.dot(&a), n.dot(d));
        if den.is_zero() || num.is_zero() {
            return None;
        }
        if num.signum() == den.signum() {
            w += if den.is_positive() { 1 } else { -1 };
        }
    }
    Some(w)
}

fn oracle_winding(s: &ImmersedSurface, p: &P3, rng: &mut ChaCha8Rng) -> Option<i64> {
    (0..64).find_map(|_| {
        let mut r = || frac(rng.gen_range(-1000..=1000), rng.gen_range(1..=997));
        ray_crossings(s, p, &P3::new(r(), r(), r()))
    })
}

#[test]
fn criterion_4_two_sheet_sphere_pipeline() {
    let start = Instant::now();
    let s = samples::two_sheet_sphere();
    // (a) winding numbers against an independent ray oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    // Half the points come from the box of the doubly covered cell.
    let ctx = Context::new(&s, Config::default()).unwrap();
    let inner = &ctx.t.arr.cells[ctx.strata[1].cells[0] as usize];
    let inner_pts: Vec<&P3> = inner.verts.iter().map(|&v| &ctx.t.arr.vertices[v as usize]).collect();
    let inner_box = (0..3).map(|i| {
        let vals = inner_pts.iter().map(|p| p.0[i].clone());
        (vals.clone().min().unwrap(), vals.max().unwrap())
    });
    let (lo, hi) = s.bounds();
    let boxes: [Vec<(Q, Q)>; 2] = [(0..3).map(|i| (&lo.0[i] - int(1), &hi.0[i] + int(1))).collect(), inner_box.collect()];
    let mut checked = 0;
    let mut seen = BTreeSet::new();
    while checked < 100 {
        let b = &boxes[checked % 2];
        let mut coord = |i: usize| &b[i].0 + (&b[i].1 - &b[i].0) * frac(rng.gen_range(1..1000), 1000) + frac(1, 7919);
        let p = P3::new(coord(0), coord(1), coord(2));
        let Ok(w) = winding_number(&s, &p) else { continue };
        let Some(expect) = oracle_winding(&s, &p, &mut rng) else { continue };
        assert_eq!(w, expect, "at {p:?}");
        seen.insert(w);
        checked += 1;
    }
    assert_eq!(seen, BTreeSet::from([0, 1, 2]));

    // (b) every good element assembles to a verified extension.
    let (ctx, z) = inscribed_set(&s, Config::default()).unwrap();
    assert!(!z.partial);
    let (rep, exts) = classify_set(&ctx, &z);
    assert!(rep.class_count >= 1);
    for ext in &exts {
        let ext = ext.as_ref().unwrap();
        let cert = verify_manifold(&ctx, ext).unwrap();
        assert_eq!(cert.tets, ext.cx.len());
        // Preimage count equals winding on every base tetrahedron.
        let mut count = vec![0i64; ctx.t.len()];
        for tet in &ext.cx.tets {
            count[tet.base as usize] += 1;
        }
        assert!((0..ctx.t.len() as u32).all(|b| count[b as usize] == ctx.t.winding(b).max(0)));
    }

    // (c) and (d): the round trip recovers every key and audits every level.
    for e in good_elements(&z) {
        let key = key_hex(&canonical_key(e));
        let ext = exts.iter().flatten().find(|x| x.key == key).unwrap();
        let d = decompose_extension(&ctx, &z, ext).unwrap();
        assert_eq!(d.key, key);
        assert_eq!(d.levels.len() as u32, ctx.n());
        assert!(d.levels.iter().all(|l| l.counted_cells > 0));
    }
    assert!(start.elapsed() < Duration::from_secs(600));
    report(4, "winding oracle, verified extensions, round trip, counting audit", start);
}

/// Labels constant on random blobs grown from `seeds` tetrahedra.
fn blob_labels(cx: &Cx, seeds: usize, regions: u32, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let n = cx.len();
    let mut label: Vec<Option<u32>> = vec![None; n];
    let mut frontier = Vec::new();
    for _ in 0..seeds {
        let x = rng.gen_range(0..n);
        label[x] = Some(rng.gen_range(0..regions));
        frontier.push(x);
    }
    while !frontier.is_empty() {
        let k = rng.gen_range(0..frontier.len());
        let x = frontier.swap_remove(k);
        for g in cx.tets[x].glue.iter().flatten() {
            let y = g.0 as usize;
            if label[y].is_none() {
                label[y] = label[x];
                frontier.push(y);
            }
        }
    }
    label.into_iter().map(|l| (l.unwrap_or(0), 0)).collect()
}

#[test]
fn criterion_5_thickening_terminates_in_normal_form() {
    let start = Instant::now();
    let ctx = Context::new(&samples::torus_ring(), Config::default()).unwrap();
    let cx = ctx.stratum(1);
    let th = Thickener::trivial(cx, &ctx.t, 6);
    let interior_edges: Vec<usize> = (0..th.sk.n_edges()).filter(|&e| th.edge_is_interior(e)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut states, mut worst, mut total_moves) = (0, 0, 0);
    while states < 20 {
        let seeds = rng.gen_range(3..12);
        let labels = blob_labels(cx, seeds, 6, &mut rng);
        let excess = th.potential(&labels);
        let top = interior_edges.iter().map(|&e| th.edge_preimages(&labels, e)).max().unwrap();
        if excess == 0 || top > 6 {
            continue;
        }
        worst = worst.max(top);
        let r = thicken_derived(&th, &labels, excess).unwrap();
        assert!(r.moves.len() <= excess, "{} moves for excess {excess}", r.moves.len());
        total_moves += r.moves.len();
        let last = r.last().thickener(th.covers.clone());
        assert_eq!(last.potential(&r.labels), 0);
        assert!((0..last.sk.n_edges()).filter(|&e| last.edge_is_interior(e)).all(|e| last.edge_preimages(&r.labels, e) <= 3));
        assert!((0..last.sk.n_verts()).filter(|&v| last.vertex_is_interior(v)).all(|v| last.vertex_preimages(&r.labels, v) <= 4));
        states += 1;
    }
    assert!(worst >= 5);
    report(5, &format!("20 states, edge preimages up to {worst}, {total_moves} moves"), start);
}

fn boundary_graph(cx: &Cx, ctx: &Context, pred: impl Fn(&P3) -> bool) -> SegSet {
    let t = &ctx.t;
    Boundary::new(cx, t)
        .adj
        .iter()
        .flatten()
        .map(|a| a.seg)
        .filter(|s| pred(&t.position(s[0])) && pred(&t.position(s[1])))
        .map(|s| seg(s[0], s[1]))
        .collect()
}

#[test]
fn criterion_6_solid_torus_appropriateness() {
    let start = Instant::now();
    let ctx = Context::new(&samples::torus_ring(), Config::default()).unwrap();
    let cx = ctx.stratum(1);
    let limits = Limits::default();
    let outer = |p: &P3| p.0[0] == int(0) || p.0[0] == int(3) || p.0[1] == int(0) || p.0[1] == int(3);
    // One longitude leaves a boundary annulus whose crossing loop bounds a meridian disk.
    let one = boundary_graph(cx, &ctx, |p| p.0[2] == int(1) && outer(p));
    assert!(matches!(is_appropriate(cx, &ctx.t, &one, &limits), Appropriateness::No { .. }));
    let two = boundary_graph(cx, &ctx, |p| (p.0[2] == int(1) || p.0[2] == int(0)) && outer(p));
    assert_eq!(is_appropriate(cx, &ctx.t, &two, &limits), Appropriateness::Yes);
    let meridian = boundary_graph(cx, &ctx, |p| p.0[0] == frac(3, 2) && p.0[1] <= int(1));
    assert!(!meridian.is_empty());
    // The meridian's complement has a subgroup of infinite index: the limit is always hit.
    assert!(matches!(is_appropriate(cx, &ctx.t, &meridian, &limits), Appropriateness::Undecided { .. }));
    // Capped tables answer either as uncapped or undecided.
    for g in [&one, &two, &meridian] {
        let full = is_appropriate(cx, &ctx.t, g, &limits);
        for cap in [1, 2, 3, 5, 8, 100] {
            let v = is_appropriate(cx, &ctx.t, g, &Limits { coset_limit: cap, ..limits });
            assert!(v == full || matches!(v, Appropriateness::Undecided { .. }), "cap {cap}: {v:?} vs {full:?}");
        }
    }
    report(6, "no / yes / undecided", start);
}

#[test]
fn criterion_7_good_subcomplexes_match_brute_force() {
    let start = Instant::now();
    let mut compared = 0;
    for (_, make) in samples::catalog() {
        let Ok((_, z)) = inscribed_set(&make(), Config::default()) else { continue };
        let mut done: Vec<*const ()> = Vec::new();
        for k in 1..=z.n {
            for e in z.zeta(k) {
                let Some(pair) = e.pair(k) else { continue };
                let id = std::sync::Arc::as_ptr(&pair.tilde) as *const ();
                if done.contains(&id) {
                    continue;
                }
                done.push(id);
                for part in &pair.tilde.parts {
                    let tris: Vec<_> = part.x.tris.iter().copied().collect();
                    if tris.len() > 12 {
                        continue;
                    }
                    let mut brute: Vec<BTreeSet<_>> = (0u32..1 << tris.len())
                        .map(|mask| TwoComplex::new((0..tris.len()).filter(|&i| mask >> i & 1 == 1).map(|i| tris[i])))
                        .filter(|y| is_good_2complex(y, &part.host, &part.graph).is_ok())
                        .map(|y| y.tris)
                        .collect();
                    brute.sort();
                    let mut got: Vec<BTreeSet<_>> = part.good_subcomplexes(1 << 20).unwrap().into_iter().map(|y| y.tris).collect();
                    got.sort();
                    assert_eq!(got, brute);
                    compared += 1;
                }
            }
        }
    }
    assert!(compared > 0);
    report(7, &format!("{compared} complexes"), start);
}

#[test]
fn criterion_8_classification_reports_are_byte_identical() {
    let start = Instant::now();
    let run = || {
        let (ctx, z) = inscribed_set(&samples::two_sheet_sphere(), Config::default()).unwrap();
        let (rep, _) = classify_set(&ctx, &z);
        to_text(&classification_json("digest", &ctx.config, &rep))
    };
    let first = run();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let second = pool.install(run);
    assert_eq!(first.as_bytes(), second.as_bytes());
    report(8, "identical JSON", start);
}
