use extend_core::arrangement::build_arrangement;
use extend_core::complexes::{fundamental_group, is_appropriate, seg, Appropriateness, Boundary, Limits, SegSet};
use extend_core::cx::Cx;
use extend_core::geometry::P3;
use extend_core::rational::{frac, int};
use extend_core::samples;
use extend_core::surface::ImmersedSurface;
use extend_core::triangulation::BaseComplex;

fn d1(s: &ImmersedSurface) -> (BaseComplex, Cx) {
    let t = BaseComplex::new(build_arrangement(s, 100_000).unwrap());
    let tets = t.stratum_tets(1);
    let cx = Cx::from_base(&t, &tets);
    (t, cx)
}

fn boundary_graph(cx: &Cx, t: &BaseComplex, pred: impl Fn(&P3) -> bool) -> SegSet {
    let b = Boundary::new(cx, t);
    b.adj
        .iter()
        .flatten()
        .map(|a| a.seg)
        .filter(|s| pred(&t.position(s[0])) && pred(&t.position(s[1])))
        .map(|s| seg(s[0], s[1]))
        .collect()
}

#[test]
fn ball_has_trivial_group() {
    let (t, cx) = d1(&samples::octahedron());
    let g = fundamental_group(&cx, &t, 10_000);
    assert!(g.simplified.is_trivial());
}

#[test]
fn handlebody_groups_abelianize_to_free_groups() {
    for (s, rank) in [(samples::torus_ring(), 1), (samples::genus_two(), 2)] {
        let (t, cx) = d1(&s);
        let g = fundamental_group(&cx, &t, 10_000);
        let ab = g.raw.abelianization();
        assert_eq!((ab.free_rank, ab.torsion.len()), (rank, 0));
        let ab = g.simplified.abelianization();
        assert_eq!((ab.free_rank, ab.torsion.len()), (rank, 0));
        assert_eq!(g.simplified.n_gens, rank);
    }
}

#[test]
fn solid_torus_appropriateness() {
    let (t, cx) = d1(&samples::torus_ring());
    let limits = Limits::default();
    let on_outer = |p: &P3| p.0[0] == int(0) || p.0[0] == int(3) || p.0[1] == int(0) || p.0[1] == int(3);
    let top = boundary_graph(&cx, &t, |p| p.0[2] == int(1) && on_outer(p));
    assert!(!top.is_empty());
    assert!(matches!(is_appropriate(&cx, &t, &top, &limits), Appropriateness::No { .. }));
    let both = boundary_graph(&cx, &t, |p| (p.0[2] == int(1) || p.0[2] == int(0)) && on_outer(p));
    assert_eq!(is_appropriate(&cx, &t, &both, &limits), Appropriateness::Yes);
    let meridian = boundary_graph(&cx, &t, |p| p.0[0] == frac(3, 2) && p.0[1] <= int(1));
    assert!(!meridian.is_empty());
    assert!(matches!(is_appropriate(&cx, &t, &meridian, &limits), Appropriateness::Undecided { .. }));
    assert_eq!(is_appropriate(&cx, &t, &SegSet::new(), &limits), Appropriateness::Yes);
}
