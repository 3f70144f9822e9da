//! Exact 3D vectors, planes and orientation predicates over `Q`.

use crate::rational::{int, sign, Q};
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct P3(pub [Q; 3]);

impl fmt::Debug for P3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl P3 {
    pub fn new(x: Q, y: Q, z: Q) -> Self {
        P3([x, y, z])
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        P3([int(x), int(y), int(z)])
    }

    pub fn zero() -> Self {
        P3([Q::zero(), Q::zero(), Q::zero()])
    }

    pub fn add(&self, o: &P3) -> P3 {
        P3([&self.0[0] + &o.0[0], &self.0[1] + &o.0[1], &self.0[2] + &o.0[2]])
    }

    pub fn sub(&self, o: &P3) -> P3 {
        P3([&self.0[0] - &o.0[0], &self.0[1] - &o.0[1], &self.0[2] - &o.0[2]])
    }

    pub fn scale(&self, s: &Q) -> P3 {
        P3([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s])
    }

    pub fn dot(&self, o: &P3) -> Q {
        &self.0[0] * &o.0[0] + &self.0[1] * &o.0[1] + &self.0[2] * &o.0[2]
    }

    pub fn cross(&self, o: &P3) -> P3 {
        let a = &self.0;
        let b = &o.0;
        P3([
            &a[1] * &b[2] - &a[2] * &b[1],
            &a[2] * &b[0] - &a[0] * &b[2],
            &a[0] * &b[1] - &a[1] * &b[0],
        ])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Componentwise average of a nonempty point list.
    pub fn centroid<'a, I: IntoIterator<Item = &'a P3>>(points: I) -> P3 {
        let mut sum = P3::zero();
        let mut n = 0i64;
        for p in points {
            sum = sum.add(p);
            n += 1;
        }
        assert!(n > 0, "centroid of empty set");
        sum.scale(&Q::new(One::one(), n.into()))
    }
}

/// Sign of det(b - a, c - a, d - a).
pub fn orient3d(a: &P3, b: &P3, c: &P3, d: &P3) -> i32 {
    let u = b.sub(a);
    let v = c.sub(a);
    let w = d.sub(a);
    sign(&u.cross(&v).dot(&w))
}

/// Plane `n . x = d`, normalized so the first nonzero normal coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plane {
    pub n: P3,
    pub d: Q,
}

impl fmt::Debug for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}.x = {}", self.n, self.d)
    }
}

impl Plane {
    /// Canonical plane through three non-collinear points.
    pub fn through(a: &P3, b: &P3, c: &P3) -> Option<Plane> {
        let n = b.sub(a).cross(&c.sub(a));
        if n.is_zero() {
            return None;
        }
        let d = n.dot(a);
        Some(Plane::normalized(n, d))
    }

    pub fn normalized(n: P3, d: Q) -> Plane {
        let lead = n.0.iter().find(|c| !c.is_zero()).expect("zero normal").clone();
        let inv = Q::one() / lead;
        Plane { n: n.scale(&inv), d: d * inv }
    }

    pub fn axis(axis: usize, value: Q) -> Plane {
        let mut n = [Q::zero(), Q::zero(), Q::zero()];
        n[axis] = Q::one();
        Plane { n: P3(n), d: value }
    }

    pub fn eval(&self, p: &P3) -> Q {
        self.n.dot(p) - &self.d
    }

    pub fn side(&self, p: &P3) -> i32 {
        sign(&self.eval(p))
    }

    /// Index of the coordinate dropped for 2D projection (largest |normal| component).
    pub fn drop_axis(&self) -> usize {
        let mut best = 0;
        for i in 1..3 {
            if self.n.0[i].abs() > self.n.0[best].abs() {
                best = i;
            }
        }
        best
    }
}

/// 2D orientation of projected points, with the plane's drop axis removed.
pub fn orient2d_on(drop: usize, a: &P3, b: &P3, c: &P3) -> i32 {
    let (i, j) = match drop {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let v = (&b.0[i] - &a.0[i]) * (&c.0[j] - &a.0[j]) - (&b.0[j] - &a.0[j]) * (&c.0[i] - &a.0[i]);
    sign(&v)
}

/// Location of a point relative to a triangle lying in the same plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriLoc {
    Outside,
    Boundary,
    Interior,
}

/// Classifies `p` against the coplanar triangle `t`; `drop` is the projection axis.
pub fn locate_in_triangle(drop: usize, t: [&P3; 3], p: &P3) -> TriLoc {
    let s = orient2d_on(drop, t[0], t[1], t[2]);
    debug_assert!(s != 0);
    let mut on_edge = false;
    for k in 0..3 {
        let o = orient2d_on(drop, t[k], t[(k + 1) % 3], p) * s;
        if o < 0 {
            return TriLoc::Outside;
        }
        if o == 0 {
            on_edge = true;
        }
    }
    if on_edge {
        TriLoc::Boundary
    } else {
        TriLoc::Interior
    }
}

/// True when two coplanar triangles have overlapping interiors.
pub fn coplanar_interiors_overlap(drop: usize, a: [&P3; 3], b: [&P3; 3]) -> bool {
    for (t, u) in [(a, b), (b, a)] {
        let s = orient2d_on(drop, t[0], t[1], t[2]);
        for k in 0..3 {
            let (p, q) = (t[k], t[(k + 1) % 3]);
            if u.iter().all(|x| orient2d_on(drop, p, q, x) * s <= 0) {
                return false;
            }
        }
    }
    true
}

/// Is `p` on the closed segment `[a, b]`?
pub fn on_segment(a: &P3, b: &P3, p: &P3) -> bool {
    let ab = b.sub(a);
    let ap = p.sub(a);
    if !ab.cross(&ap).is_zero() {
        return false;
    }
    let t = ap.dot(&ab);
    !t.is_negative() && t <= ab.dot(&ab)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_is_canonical() {
        let a = P3::from_ints(0, 0, 2);
        let b = P3::from_ints(1, 0, 2);
        let c = P3::from_ints(0, 1, 2);
        let p = Plane::through(&a, &b, &c).unwrap();
        let q = Plane::through(&a, &c, &b).unwrap();
        assert_eq!(p, q);
        assert_eq!(p, Plane::axis(2, int(2)));
    }

    #[test]
    fn triangle_location() {
        let t = [P3::from_ints(0, 0, 0), P3::from_ints(4, 0, 0), P3::from_ints(0, 4, 0)];
        let r = [&t[0], &t[1], &t[2]];
        assert_eq!(locate_in_triangle(2, r, &P3::from_ints(1, 1, 0)), TriLoc::Interior);
        assert_eq!(locate_in_triangle(2, r, &P3::from_ints(2, 2, 0)), TriLoc::Boundary);
        assert_eq!(locate_in_triangle(2, r, &P3::from_ints(3, 3, 0)), TriLoc::Outside);
    }

    #[test]
    fn overlap_test() {
        let a = [P3::from_ints(0, 0, 0), P3::from_ints(2, 0, 0), P3::from_ints(0, 2, 0)];
        let b = [P3::from_ints(2, 2, 0), P3::from_ints(2, 0, 0), P3::from_ints(0, 2, 0)];
        let c = [P3::from_ints(1, 1, 0), P3::from_ints(0, 0, 0), P3::from_ints(2, 0, 0)];
        fn r(t: &[P3; 3]) -> [&P3; 3] {
            [&t[0], &t[1], &t[2]]
        }
        assert!(!coplanar_interiors_overlap(2, r(&a), r(&b)));
        assert!(coplanar_interiors_overlap(2, r(&a), r(&c)));
    }
}
