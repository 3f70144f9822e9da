//! Sample immersed surfaces used by tests, docs and the CLI.
//!
//! Most samples are boundaries of voxel bodies. Each body is a union of
//! integer boxes; bodies may overlap (giving an immersion) and listed body
//! pairs are glued where their voxels touch.

use crate::geometry::P3;
use crate::rational::{frac, int};
use crate::surface::ImmersedSurface;
use crate::util::UnionFind;
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub type IBox = [[i64; 2]; 3];

#[derive(Debug, Clone)]
pub struct VoxelBody {
    pub boxes: Vec<IBox>,
    /// Reverse the orientation of this body's boundary.
    pub inward: bool,
}

impl VoxelBody {
    pub fn new(boxes: Vec<IBox>) -> Self {
        VoxelBody { boxes, inward: false }
    }

    pub fn inward(mut self) -> Self {
        self.inward = true;
        self
    }
}

type Voxel = [usize; 3];

struct Grid {
    coords: [Vec<i64>; 3],
}

impl Grid {
    fn cell_center_in(&self, v: Voxel, b: &IBox) -> bool {
        (0..3).all(|a| {
            let lo = self.coords[a][v[a]];
            let hi = self.coords[a][v[a] + 1];
            b[a][0] <= lo && hi <= b[a][1]
        })
    }
}

/// Boundary of the glued union of voxel bodies, as an immersed surface.
pub fn voxel_surface(bodies: &[VoxelBody], glue: &[(usize, usize)]) -> ImmersedSurface {
    let mut coords: [BTreeSet<i64>; 3] = Default::default();
    for body in bodies {
        for b in &body.boxes {
            for a in 0..3 {
                coords[a].insert(b[a][0]);
                coords[a].insert(b[a][1]);
            }
        }
    }
    let grid = Grid { coords: coords.map(|c| c.into_iter().collect()) };
    let dims = [grid.coords[0].len() - 1, grid.coords[1].len() - 1, grid.coords[2].len() - 1];
    let glued: BTreeSet<(usize, usize)> = glue.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();

    let mut occupied: BTreeSet<(Voxel, usize)> = BTreeSet::new();
    for (bi, body) in bodies.iter().enumerate() {
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let v = [i, j, k];
                    if body.boxes.iter().any(|b| grid.cell_center_in(v, b)) {
                        occupied.insert((v, bi));
                    }
                }
            }
        }
    }
    let step = |v: Voxel, axis: usize, dir: i64| -> Option<Voxel> {
        let x = v[axis] as i64 + dir;
        if x < 0 || x >= dims[axis] as i64 {
            return None;
        }
        let mut w = v;
        w[axis] = x as usize;
        Some(w)
    };
    // Partner of (voxel, body) across the face in direction (axis, dir).
    let partner = |v: Voxel, b: usize, axis: usize, dir: i64| -> Option<(Voxel, usize)> {
        let w = step(v, axis, dir)?;
        if occupied.contains(&(w, b)) {
            return Some((w, b));
        }
        (0..bodies.len()).find(|&c| glued.contains(&(b, c)) && occupied.contains(&(w, c))).map(|c| (w, c))
    };

    // Boundary squares: (voxel, body, axis, dir).
    let mut squares: Vec<(Voxel, usize, usize, i64)> = Vec::new();
    for &(v, b) in &occupied {
        for axis in 0..3 {
            for dir in [-1, 1] {
                if partner(v, b, axis, dir).is_none() {
                    squares.push((v, b, axis, dir));
                }
            }
        }
    }
    let square_id: HashMap<(Voxel, usize, usize, i64), usize> = squares.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    // Corner slots of square s: grid points of its face, indexed 0..4.
    let face_corners = |s: &(Voxel, usize, usize, i64)| -> [[usize; 3]; 4] {
        let (v, _, axis, dir) = *s;
        let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
        let mut base = v;
        if dir > 0 {
            base[axis] += 1;
        }
        let mut out = [base; 4];
        out[1][a1] += 1;
        out[2][a1] += 1;
        out[2][a2] += 1;
        out[3][a2] += 1;
        out
    };
    let mut uf = UnionFind::new(squares.len() * 4);
    for (si, s) in squares.iter().enumerate() {
        let (v, b, axis, _) = *s;
        let corners = face_corners(s);
        for k in 0..4 {
            let (p, q) = (corners[k], corners[(k + 1) % 4]);
            let edge_axis = (0..3).find(|&a| p[a] != q[a]).unwrap();
            // Walk around the edge inside the solid until the next boundary square.
            let other_axis = 3 - axis - edge_axis;
            // The voxel's other face at this edge is perpendicular to `other_axis`.
            let side = if p[other_axis] == v[other_axis] { -1 } else { 1 };
            let (mut cv, mut cb) = (v, b);
            let (mut cross_axis, mut cross_dir) = (other_axis, side);
            let mut guard = 0;
            let found = loop {
                guard += 1;
                assert!(guard < 16, "voxel walk did not close");
                match partner(cv, cb, cross_axis, cross_dir) {
                    None => break (cv, cb, cross_axis, cross_dir),
                    Some((nv, nb)) => {
                        // The next face at the edge is perpendicular to the remaining axis.
                        let next_axis = 3 - edge_axis - cross_axis;
                        cross_dir = if p[next_axis] == nv[next_axis] { -1 } else { 1 };
                        cross_axis = next_axis;
                        cv = nv;
                        cb = nb;
                    }
                }
            };
            let sj = square_id[&found];
            let oc = face_corners(&squares[sj]);
            for pt in [p, q] {
                let kk = oc.iter().position(|c| *c == pt).expect("shared edge corner");
                uf.union(si * 4 + (corners.iter().position(|c| *c == pt).unwrap()), sj * 4 + kk);
            }
        }
    }
    let (labels, nverts) = uf.labels();
    let mut vertex_point: Vec<Option<[usize; 3]>> = vec![None; nverts];
    for (si, s) in squares.iter().enumerate() {
        for (k, c) in face_corners(s).iter().enumerate() {
            vertex_point[labels[si * 4 + k]] = Some(*c);
        }
    }
    let vertices: Vec<P3> = vertex_point
        .into_iter()
        .map(|c| {
            let c = c.unwrap();
            P3::new(int(grid.coords[0][c[0]]), int(grid.coords[1][c[1]]), int(grid.coords[2][c[2]]))
        })
        .collect();
    let mut triangles = Vec::new();
    for (si, s) in squares.iter().enumerate() {
        let (_, b, _, dir) = *s;
        let ids: Vec<u32> = (0..4).map(|k| labels[si * 4 + k] as u32).collect();
        // Corners 0,1,2,3 go around counterclockwise seen from +axis.
        let outward = (dir > 0) != bodies[b].inward;
        if outward {
            triangles.push([ids[0], ids[1], ids[2]]);
            triangles.push([ids[0], ids[2], ids[3]]);
        } else {
            triangles.push([ids[0], ids[2], ids[1]]);
            triangles.push([ids[0], ids[3], ids[2]]);
        }
    }
    ImmersedSurface::new(vertices, triangles).expect("voxel boundary is a closed surface")
}

pub fn octahedron() -> ImmersedSurface {
    let v = vec![
        P3::from_ints(1, 0, 0),
        P3::from_ints(-1, 0, 0),
        P3::from_ints(0, 1, 0),
        P3::from_ints(0, -1, 0),
        P3::from_ints(0, 0, 1),
        P3::from_ints(0, 0, -1),
    ];
    let t = vec![[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]];
    ImmersedSurface::new(v, t).unwrap()
}

pub fn reversed_octahedron() -> ImmersedSurface {
    octahedron().reversed()
}

/// Two octahedra, the second reflected through a facet plane of the first.
pub fn coplanar_octahedra() -> ImmersedSurface {
    let o = octahedron();
    let mut vertices = o.vertices.clone();
    let third = frac(1, 3);
    for p in &o.vertices {
        // Reflect through x + y + z = 1.
        let s = &p.0[0] + &p.0[1] + &p.0[2] - int(1);
        let shift = &s * &third * int(2);
        vertices.push(P3::new(&p.0[0] - &shift, &p.0[1] - &shift, &p.0[2] - &shift));
    }
    let mut triangles = o.triangles.clone();
    for &[a, b, c] in &o.triangles {
        triangles.push([a + 6, c + 6, b + 6]);
    }
    ImmersedSurface::new(vertices, triangles).unwrap()
}

/// Square ring [0,3]²×[0,1] minus [1,2]²×[0,1]: an embedded torus.
pub fn torus_ring() -> ImmersedSurface {
    voxel_surface(
        &[VoxelBody::new(vec![
            [[0, 3], [0, 1], [0, 1]],
            [[0, 3], [2, 3], [0, 1]],
            [[0, 1], [0, 3], [0, 1]],
            [[2, 3], [0, 3], [0, 1]],
        ])],
        &[],
    )
}

/// Slab with two square holes: an embedded genus-2 surface.
pub fn genus_two() -> ImmersedSurface {
    voxel_surface(
        &[VoxelBody::new(vec![
            [[0, 5], [0, 1], [0, 1]],
            [[0, 5], [2, 3], [0, 1]],
            [[0, 1], [0, 3], [0, 1]],
            [[2, 3], [0, 3], [0, 1]],
            [[4, 5], [0, 3], [0, 1]],
        ])],
        &[],
    )
}

/// Immersed sphere: a box pushed up through the top of a larger box, the two
/// joined by a bent tube. Winding 2 on the overlap, double locus one square.
pub fn two_sheet_sphere() -> ImmersedSurface {
    voxel_surface(
        &[
            VoxelBody::new(vec![[[0, 10], [0, 10], [0, 6]]]),
            VoxelBody::new(vec![[[2, 4], [2, 4], [5, 8]]]),
            VoxelBody::new(vec![[[4, 7], [2, 4], [7, 8]], [[6, 7], [2, 4], [6, 7]]]),
        ],
        &[(0, 2), (1, 2)],
    )
}

/// Three nested cube boundaries oriented out, out, in (disconnected surface).
pub fn nested_shells() -> ImmersedSurface {
    voxel_surface(
        &[
            VoxelBody::new(vec![[[0, 9], [0, 9], [0, 9]]]),
            VoxelBody::new(vec![[[2, 7], [2, 7], [2, 7]]]),
            VoxelBody::new(vec![[[4, 5], [4, 5], [4, 5]]]).inward(),
        ],
        &[],
    )
}

/// Three overlapping bars in general position; four triple points, n = 3.
pub fn triple_bars() -> ImmersedSurface {
    voxel_surface(
        &[
            VoxelBody::new(vec![[[-4, 4], [-1, 1], [-1, 1]]]),
            VoxelBody::new(vec![[[-2, 2], [-4, 4], [-2, 2]]]),
            VoxelBody::new(vec![[[-3, 3], [-3, 3], [-5, 0]]]),
        ],
        &[],
    )
}

/// Nine-vertex torus: a triangle swept around a triangular core.
pub fn nine_vertex_torus() -> ImmersedSurface {
    let centers = [(4, 0), (-2, 4), (-2, -4)];
    let mut vertices = Vec::new();
    for &(cx, cy) in &centers {
        // Radial direction (cx, cy)/4 scaled; cross-section in the (radial, z) plane.
        let r = |s: i64| frac(s * cx, 4);
        let q = |s: i64| frac(s * cy, 4);
        for &(dr, dz) in &[(1i64, 0i64), (-1, 1), (-1, -1)] {
            vertices.push(P3::new(int(cx) + r(dr), int(cy) + q(dr), int(dz)));
        }
    }
    let id = |i: usize, j: usize| (3 * (i % 3) + j % 3) as u32;
    let mut triangles = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let s = ImmersedSurface::new(vertices, triangles).unwrap();
    // Orient outward: the winding number at a core point must be 1.
    let core = P3::new(int(4), int(0), frac(-1, 3));
    match crate::arrangement::winding_number(&s, &core) {
        Ok(1) => s,
        _ => s.reversed(),
    }
}

/// Named samples, in a stable order.
pub fn catalog() -> BTreeMap<&'static str, fn() -> ImmersedSurface> {
    let mut m: BTreeMap<&'static str, fn() -> ImmersedSurface> = BTreeMap::new();
    m.insert("octahedron", octahedron);
    m.insert("reversed_octahedron", reversed_octahedron);
    m.insert("coplanar_octahedra", coplanar_octahedra);
    m.insert("torus_ring", torus_ring);
    m.insert("genus_two", genus_two);
    m.insert("two_sheet_sphere", two_sheet_sphere);
    m.insert("nested_shells", nested_shells);
    m.insert("triple_bars", triple_bars);
    m.insert("nine_vertex_torus", nine_vertex_torus);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn voxel_surfaces_are_closed() {
        assert_eq!(torus_ring().euler_characteristic(), 0);
        assert_eq!(genus_two().euler_characteristic(), -2);
        let ts = two_sheet_sphere();
        assert_eq!(ts.euler_characteristic(), 2);
        assert_eq!(ts.component_count(), 1);
        assert_eq!(nested_shells().euler_characteristic(), 6);
        assert_eq!(triple_bars().component_count(), 3);
    }

    #[test]
    fn nine_vertex_torus_counts() {
        let t = nine_vertex_torus();
        assert_eq!(t.vertices.len(), 9);
        assert_eq!(t.triangles.len(), 18);
        assert_eq!(t.euler_characteristic(), 0);
    }
}
