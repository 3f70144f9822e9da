use extend_core::arrangement::strata::StrataError;
use extend_core::complexes::good::TwoComplex;
use extend_core::complexes::relative::{cut_complex, CutError};
use extend_core::complexes::{construct_relative_simple_complex, is_appropriate, is_appropriate_triple, Appropriateness, SegSet, TripleVerdict};
use extend_core::inscribed::{canonical_key, good_elements, inscribed_set, key_hex, n_graph, Config, Context, PipelineError};
use extend_core::samples;
use std::collections::BTreeSet;

#[test]
fn embedded_sphere_has_one_element() {
    let (ctx, z) = inscribed_set(&samples::octahedron(), Config::default()).unwrap();
    assert_eq!(ctx.n(), 1);
    assert_eq!(z.level_sizes(), vec![1]);
    assert!(!z.partial);
    let e = &z.zeta(1)[0];
    assert!(e.is_good());
    assert_eq!(key_hex(&canonical_key(e)).len(), 64);
}

#[test]
fn every_level_chooses_inside_its_simple_complex() {
    for s in [samples::two_sheet_sphere(), samples::nested_shells(), samples::triple_bars()] {
        let (ctx, z) = inscribed_set(&s, Config::default()).unwrap();
        assert_eq!(z.levels.len() as u32, ctx.n());
        let goods = good_elements(&z);
        assert!(!goods.is_empty());
        let keys: BTreeSet<Vec<u8>> = goods.iter().map(|e| canonical_key(e)).collect();
        assert_eq!(keys.len(), goods.len());
        for e in goods {
            assert_eq!(e.pairs.len() as u32, ctx.n());
            for (i, p) in e.pairs.iter().enumerate() {
                assert_eq!(p.k, ctx.n() - i as u32);
                assert!(p.chosen.tris.is_subset(&p.tilde.x.tris));
            }
        }
    }
}

#[test]
fn negative_winding_is_reported_before_construction() {
    let err = inscribed_set(&samples::reversed_octahedron(), Config::default()).unwrap_err();
    assert!(matches!(err, PipelineError::Strata(StrataError::NegativeWinding { omega: -1, .. })), "{err}");
}

#[test]
fn n_graph_drops_the_singular_set_two_levels_up() {
    let (_, z) = inscribed_set(&samples::triple_bars(), Config::default()).unwrap();
    let e = good_elements(&z)[0];
    let (x2, x3) = (e.x(2), e.x(3));
    let n = n_graph(&x2, &x3);
    assert!(n.is_disjoint(&x3.singular_set()));
    assert!(n.is_subset(&x2.singular_set()));
    assert_eq!(n_graph(&x2, &TwoComplex::default()), x2.singular_set());
}

#[test]
fn cutting_along_nothing_is_the_absolute_case() {
    let ctx = Context::new(&samples::torus_ring(), Config::default()).unwrap();
    let m = ctx.stratum(1);
    let empty = TwoComplex::default();
    let g = SegSet::new();
    assert_eq!(is_appropriate(m, &ctx.t, &g, &ctx.config.limits()), Appropriateness::Yes);
    assert_eq!(is_appropriate_triple(m, &ctx.t, &empty, &g, &ctx.config.limits()).unwrap(), TripleVerdict::Yes);
    assert_eq!(cut_complex(m, &ctx.t, &empty).unwrap().len(), m.len());
    let rel = construct_relative_simple_complex(m, &ctx.t, &empty, &g, &ctx.config.limits()).unwrap();
    assert_eq!(rel.parts.len(), 1);
}

#[test]
fn cut_rejects_boundary_triangles() {
    let ctx = Context::new(&samples::octahedron(), Config::default()).unwrap();
    let m = ctx.stratum(1);
    let (x, i) = (0..m.len() as u32).flat_map(|x| (0..4u8).map(move |i| (x, i))).find(|&(x, i)| m.tets[x as usize].glue[i as usize].is_none()).unwrap();
    let tri = m.base_face(&ctx.t, (x, i));
    let err = cut_complex(m, &ctx.t, &TwoComplex::new([tri])).unwrap_err();
    assert_eq!(err, CutError::NotInterior(tri));
}

#[test]
fn cutting_along_a_wall_opens_both_sides() {
    let (ctx, z) = inscribed_set(&samples::two_sheet_sphere(), Config::default()).unwrap();
    let x2 = good_elements(&z)[0].x(2);
    let m = ctx.stratum(1);
    let cut = cut_complex(m, &ctx.t, &x2).unwrap();
    assert_eq!(cut.len(), m.len());
    assert!(!x2.is_empty());
    let open = |c: &extend_core::cx::Cx| c.tets.iter().flat_map(|t| t.glue.iter()).filter(|g| g.is_none()).count();
    // Every wall triangle opens one face on each side.
    assert_eq!(open(&cut), open(m) + 2 * x2.tris.len());
}
