use extend_core::complexes::good::{classify_link, LinkShape};
use extend_core::rational::parse_rational;
use extend_core::report::Mesh;
use extend_core::samples;
use extend_core::surface::{jitter, parse_surface};
use proptest::prelude::*;

/// Replaces every edge of `template` by a path with `lengths[i]` interior
/// nodes, then renames nodes by `perm`.
fn subdivide(template: &[[u32; 2]], lengths: &[usize], perm: &[u32]) -> Vec<[u32; 2]> {
    let mut next = 1 + template.iter().flatten().max().copied().unwrap_or(0);
    let mut out = Vec::new();
    for (e, &n) in template.iter().zip(lengths) {
        let mut prev = e[0];
        for _ in 0..n {
            out.push([prev, next]);
            prev = next;
            next += 1;
        }
        out.push([prev, e[1]]);
    }
    out.iter().map(|&[a, b]| [perm[a as usize], perm[b as usize]]).collect()
}

fn shuffled(n: usize) -> impl Strategy<Value = Vec<u32>> {
    Just((0..n as u32).collect::<Vec<u32>>()).prop_shuffle()
}

const THETA: [[u32; 2]; 3] = [[0, 1], [0, 1], [0, 1]];
const K4: [[u32; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

proptest! {
    #[test]
    fn link_shape_survives_subdivision_and_renaming(
        lengths in proptest::collection::vec(1usize..6, 6),
        perm in shuffled(64),
    ) {
        let cycle = subdivide(&[[0, 1], [1, 0]], &lengths, &perm);
        prop_assert_eq!(classify_link(&cycle), LinkShape::Cycle);
        prop_assert_eq!(classify_link(&subdivide(&THETA, &lengths, &perm)), LinkShape::Theta);
        prop_assert_eq!(classify_link(&subdivide(&K4, &lengths, &perm)), LinkShape::K4);
        let path = subdivide(&[[0, 1]], &lengths, &perm);
        let LinkShape::Path(ends) = classify_link(&path) else { panic!("not a path") };
        let mut want = [perm[0], perm[1]];
        want.sort_unstable();
        prop_assert_eq!(ends, want);
        let tripod = subdivide(&[[0, 1], [0, 2], [0, 3]], &lengths, &perm);
        prop_assert!(matches!(classify_link(&tripod), LinkShape::Tripod(_)));
    }

    #[test]
    fn disconnected_links_are_rejected(lengths in proptest::collection::vec(1usize..6, 4), perm in shuffled(64)) {
        let two = subdivide(&[[0, 1], [1, 0], [2, 3], [3, 2]], &lengths, &perm);
        prop_assert_eq!(classify_link(&two), LinkShape::Other);
    }

    #[test]
    fn mesh_invariants_ignore_vertex_numbering(perm in shuffled(6)) {
        let s = samples::octahedron();
        let m = Mesh::from_surface(&s);
        let faces = m.faces.iter().map(|f| f.iter().map(|&v| perm[v as usize]).collect()).collect();
        let mut table = m.vertices.clone();
        for (v, p) in m.vertices.iter().enumerate() {
            table[perm[v] as usize] = p.clone();
        }
        let renamed = Mesh::compact(&table, faces);
        prop_assert_eq!(renamed.euler_characteristic(), 2);
        prop_assert!(renamed.is_closed_oriented());
        prop_assert_eq!(renamed.to_off().lines().count(), 2 + 6 + 8);
    }

    #[test]
    fn jittered_surfaces_round_trip_through_json(seed in any::<u64>()) {
        let s = jitter(&samples::octahedron(), seed).unwrap();
        let back = parse_surface(&s.to_json().to_string()).unwrap();
        prop_assert_eq!(back.vertices, s.vertices);
        prop_assert_eq!(back.triangles, s.triangles);
    }

    #[test]
    fn rational_parser_never_panics(text in "\\PC{0,24}") {
        let _ = parse_rational(&text);
    }
}
