use extend_core::arrangement::{
    build_arrangement, is_thin_trivalent, strata, validate_transversality, winding_number, ArrangementComplex,
    StrataError, ViolationKind, DEFAULT_CELL_BUDGET,
};
use extend_core::samples;
use extend_core::surface::ImmersedSurface;

fn arr(s: &ImmersedSurface) -> ArrangementComplex {
    build_arrangement(s, DEFAULT_CELL_BUDGET).expect("transverse")
}

#[test]
fn octahedron_has_two_regions() {
    let s = samples::octahedron();
    let a = arr(&s);
    a.check_incidence().unwrap();
    assert_eq!(a.regions().len(), 2);
    assert_eq!(a.max_winding(), 1);
    assert!(a.double_locus().is_empty());
    let st = strata(&a).unwrap();
    assert_eq!(st.len(), 1);
    assert_eq!(st[0].components.len(), 1);
    assert!(st[0].graph.is_empty());
}

#[test]
fn reversed_octahedron_is_rejected() {
    let a = arr(&samples::reversed_octahedron());
    match strata(&a) {
        Err(StrataError::NegativeWinding { omega, .. }) => assert_eq!(omega, -1),
        other => panic!("expected negative winding, got {other:?}"),
    }
}

#[test]
fn cell_windings_match_ray_casting() {
    for s in [samples::two_sheet_sphere(), samples::triple_bars(), samples::nested_shells()] {
        let a = arr(&s);
        a.check_incidence().unwrap();
        let stride = (a.cells.len() / 60).max(1);
        for (c, cell) in a.cells.iter().enumerate().step_by(stride) {
            assert_eq!(winding_number(&s, &cell.centroid).unwrap(), a.region_winding[c], "cell {c}");
        }
    }
}

#[test]
fn two_sheet_sphere_strata() {
    let a = arr(&samples::two_sheet_sphere());
    assert_eq!(a.regions().len(), 3);
    assert_eq!(a.max_winding(), 2);
    assert!(a.triple_points().is_empty());
    let st = strata(&a).unwrap();
    extend_core::arrangement::strata::check_strata(&a, &st).unwrap();
    assert_eq!(st.len(), 2);
    assert!(st[0].graph.is_empty());
    assert_eq!(st[1].graph.component_count(&a), 1);
    assert!(st[1].graph.degrees(&a).values().all(|&d| d == 2));
}

#[test]
fn embedded_torus_is_transverse() {
    for s in [samples::torus_ring(), samples::genus_two(), samples::nine_vertex_torus()] {
        let rep = validate_transversality(&s);
        assert!(rep.ok(), "{}", rep.summary());
        let a = arr(&s);
        assert_eq!(a.max_winding(), 1);
        assert!(a.double_locus().is_empty());
    }
}

#[test]
fn coplanar_facets_are_not_transverse() {
    let rep = validate_transversality(&samples::coplanar_octahedra());
    assert!(rep.kinds().contains(&ViolationKind::TwoDimensionalOverlap), "{:?}", rep.kinds());
}

#[test]
fn touching_cubes_are_not_transverse() {
    use samples::{voxel_surface, VoxelBody};
    let s = voxel_surface(
        &[VoxelBody::new(vec![[[0, 1], [0, 1], [0, 1]]]), VoxelBody::new(vec![[[1, 2], [0, 1], [0, 1]]])],
        &[],
    );
    assert!(!validate_transversality(&s).ok());
}

#[test]
fn cubes_sharing_an_edge_touch_tangentially() {
    use samples::{voxel_surface, VoxelBody};
    let s = voxel_surface(
        &[VoxelBody::new(vec![[[0, 1], [0, 1], [0, 1]]]), VoxelBody::new(vec![[[1, 2], [1, 2], [0, 1]]])],
        &[],
    );
    let rep = validate_transversality(&s);
    assert!(!rep.ok());
}

#[test]
fn triple_bars_have_four_triple_points() {
    let s = samples::triple_bars();
    let rep = validate_transversality(&s);
    assert!(rep.ok(), "{}", rep.summary());
    assert_eq!(rep.triple_points.len(), 4);
    let a = arr(&s);
    assert_eq!(a.max_winding(), 3);
    let st = strata(&a).unwrap();
    extend_core::arrangement::strata::check_strata(&a, &st).unwrap();
    assert_eq!(st.len(), 3);
    // G_2 and G_3 meet exactly at the four triple points on the boundary of D_2.
    let host = &st[1].boundary_faces;
    assert!(is_thin_trivalent(&a, &st[2].graph, &st[1].graph, host).unwrap());
}

#[test]
fn non_trivalent_crossing_is_not_thin() {
    let s = samples::triple_bars();
    let a = arr(&s);
    let st = strata(&a).unwrap();
    // A graph meeting itself along shared edges fails.
    let host = &st[1].boundary_faces;
    assert!(!is_thin_trivalent(&a, &st[1].graph, &st[1].graph, host).unwrap());
}
