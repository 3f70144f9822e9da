//! Winding numbers by signed ray crossings.

use crate::geometry::{locate_in_triangle, Plane, TriLoc, P3};
use crate::rational::{int, sign};
use crate::surface::ImmersedSurface;
use num_traits::Signed;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindingError {
    #[error("point lies on the image of the surface (triangle {0})")]
    OnImage(usize),
    #[error("no generic ray found")]
    NoGenericRay,
}

/// The i-th direction of the fixed ray sequence.
pub fn ray_direction(i: u64) -> P3 {
    let i = i as i64;
    P3::new(int(1_000_003 + 17 * i), int(3_001 + 101 * i + i * i), int(7_919 - 13 * i * i))
}

/// Signed crossing count along one ray, or `None` if the ray is degenerate.
pub fn crossings_along(s: &ImmersedSurface, p: &P3, d: &P3) -> Option<i64> {
    let mut total = 0i64;
    for t in 0..s.triangles.len() {
        let n = s.normal(t);
        let [a, b, c] = s.corners(t);
        let nd = n.dot(d);
        let offset = n.dot(&a.sub(p));
        if nd == num_traits::Zero::zero() {
            if offset == num_traits::Zero::zero() {
                return None;
            }
            continue;
        }
        let tt = &offset / &nd;
        if !tt.is_positive() {
            continue;
        }
        let q = p.add(&d.scale(&tt));
        let plane = Plane::through(a, b, c).expect("non-degenerate triangle");
        match locate_in_triangle(plane.drop_axis(), [a, b, c], &q) {
            TriLoc::Outside => {}
            TriLoc::Boundary => return None,
            TriLoc::Interior => total += sign(&nd) as i64,
        }
    }
    Some(total)
}

/// Checks whether `p` lies on some closed triangle.
pub fn on_image(s: &ImmersedSurface, p: &P3) -> Option<usize> {
    (0..s.triangles.len()).find(|&t| {
        let [a, b, c] = s.corners(t);
        let n = s.normal(t);
        n.dot(&p.sub(a)) == num_traits::Zero::zero() && {
            let plane = Plane::through(a, b, c).expect("non-degenerate triangle");
            locate_in_triangle(plane.drop_axis(), [a, b, c], p) != TriLoc::Outside
        }
    })
}

/// Winding number of `s` around `p`.
pub fn winding_number(s: &ImmersedSurface, p: &P3) -> Result<i64, WindingError> {
    if let Some(t) = on_image(s, p) {
        return Err(WindingError::OnImage(t));
    }
    for i in 0..256 {
        if let Some(w) = crossings_along(s, p, &ray_direction(i)) {
            return Ok(w);
        }
    }
    Err(WindingError::NoGenericRay)
}
