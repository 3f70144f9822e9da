use extend_core::extension::classify;
use extend_core::geometry::P3;
use extend_core::inscribed::{Config, Context};
use extend_core::rational::{frac, int, Q};
use extend_core::report::*;
use extend_core::samples;
use num_traits::Zero;

/// Six times the enclosed signed volume.
fn volume6(m: &Mesh) -> Q {
    let mut v = Q::zero();
    for f in &m.faces {
        let p = |i: usize| &m.vertices[f[i] as usize];
        for i in 1..f.len() - 1 {
            v += p(0).dot(&p(i).cross(p(i + 1)));
        }
    }
    v
}

#[test]
fn octahedron_boundary_is_six_vertices_eight_faces() {
    let ctx = Context::new(&samples::octahedron(), Config::default()).unwrap();
    let m = stratum_boundary(&ctx.t.arr, &ctx.strata[0]);
    assert_eq!((m.vertices.len(), m.faces.len()), (6, 8));
    assert!(m.is_closed_oriented());
    assert!(volume6(&m) > Q::zero());
    let off = m.to_off();
    assert!(off.starts_with("OFF\n6 8 0\n"));
    assert_eq!(off.lines().count(), 2 + 6 + 8);
}

#[test]
fn two_sheet_inner_stratum_is_a_sphere() {
    let ctx = Context::new(&samples::two_sheet_sphere(), Config::default()).unwrap();
    let m = stratum_boundary(&ctx.t.arr, &ctx.strata[1]);
    assert!(m.is_closed_oriented());
    assert_eq!(m.euler_characteristic(), 2);
    assert!(volume6(&m) > Q::zero());
    for st in &ctx.strata {
        assert!(volume6(&stratum_boundary(&ctx.t.arr, st)) > Q::zero());
    }
}

#[test]
fn extension_boundary_matches_the_surface() {
    for s in [samples::octahedron(), samples::two_sheet_sphere(), samples::torus_ring()] {
        let (ctx, _, _, exts) = classify(&s, Config::default()).unwrap();
        let m = extension_boundary(&ctx, exts[0].as_ref().unwrap());
        assert!(m.is_closed_oriented());
        assert_eq!(m.euler_characteristic(), s.euler_characteristic());
        // Each sheet encloses positive volume, so the total is Σ ω·vol > 0.
        assert!(volume6(&m) > Q::zero());
        assert_eq!(volume6(&m), volume6(&Mesh::from_surface(&s)));
    }
}

#[test]
fn empty_complex_writes_a_header_only_file() {
    assert_eq!(Mesh::default().to_off(), "OFF\n0 0 0\n");
}

#[test]
fn non_terminating_coordinates_keep_the_exact_value_in_a_comment() {
    let m = Mesh { vertices: vec![P3::new(frac(1, 3), frac(-5, 4), int(2))], faces: vec![] };
    let off = m.to_off();
    let lines: Vec<&str> = off.lines().collect();
    assert_eq!(lines[2], "# 1/3 -5/4 2");
    assert_eq!(lines[3], "0.333333333333 -1.25 2");
    let exact = Mesh { vertices: vec![P3::new(frac(1, 8), int(0), int(-3))], faces: vec![] };
    assert_eq!(exact.to_off().lines().nth(2), Some("0.125 0 -3"));
}

#[test]
fn digest_is_sha256_hex() {
    assert_eq!(input_digest(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
