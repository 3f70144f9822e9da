//! Triangulated closed oriented surfaces with a simplexwise linear map to Q³.

use crate::geometry::P3;
use crate::rational::{parse_rational, to_fraction_string, Q};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("non-surface complex: {0}")]
    NotSurface(String),
    #[error("incoherent orientation at edge ({0}, {1})")]
    IncoherentOrientation(u32, u32),
    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImmersedSurface {
    pub vertices: Vec<P3>,
    pub triangles: Vec<[u32; 3]>,
}

impl ImmersedSurface {
    /// Builds and structurally validates a surface.
    pub fn new(vertices: Vec<P3>, triangles: Vec<[u32; 3]>) -> Result<Self, SurfaceError> {
        let s = ImmersedSurface { vertices, triangles };
        s.check_structure()?;
        Ok(s)
    }

    pub fn point(&self, v: u32) -> &P3 {
        &self.vertices[v as usize]
    }

    pub fn corners(&self, t: usize) -> [&P3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.point(a), self.point(b), self.point(c)]
    }

    /// Unnormalized normal `(b - a) x (c - a)`.
    pub fn normal(&self, t: usize) -> P3 {
        let [a, b, c] = self.corners(t);
        b.sub(a).cross(&c.sub(a))
    }

    /// Same surface with every triangle reversed.
    pub fn reversed(&self) -> ImmersedSurface {
        ImmersedSurface {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
        }
    }

    /// Undirected edges with the two triangles on them, keyed by sorted endpoints.
    pub fn edge_map(&self) -> BTreeMap<(u32, u32), Vec<usize>> {
        let mut map: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                map.entry((a.min(b), a.max(b))).or_default().push(t);
            }
        }
        map
    }

    pub fn euler_characteristic(&self) -> i64 {
        let used: BTreeSet<u32> = self.triangles.iter().flatten().copied().collect();
        used.len() as i64 - self.edge_map().len() as i64 + self.triangles.len() as i64
    }

    /// Number of edge-connected components.
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.triangles.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        for ts in self.edge_map().values() {
            for w in ts.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        (0..self.triangles.len()).filter(|&t| find(&mut parent, t) == t).count()
    }

    fn check_structure(&self) -> Result<(), SurfaceError> {
        if self.triangles.is_empty() {
            return Err(SurfaceError::NotSurface("no triangles".into()));
        }
        let nv = self.vertices.len() as u32;
        let mut seen = BTreeSet::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(SurfaceError::Malformed(format!("triangle {t} has an out-of-range vertex index")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(SurfaceError::DegenerateTriangle(t));
            }
            let mut key = *tri;
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(SurfaceError::NotSurface(format!("triangle {t} repeats a vertex set")));
            }
        }
        let edges = self.edge_map();
        for (&(a, b), ts) in &edges {
            if ts.len() != 2 {
                return Err(SurfaceError::NotSurface(format!(
                    "edge ({a}, {b}) borders {} triangles",
                    ts.len()
                )));
            }
        }
        let mut directed = BTreeSet::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                if !directed.insert(e) {
                    return Err(SurfaceError::IncoherentOrientation(e.0.min(e.1), e.0.max(e.1)));
                }
            }
        }
        self.check_vertex_links()?;
        for t in 0..self.triangles.len() {
            if self.normal(t).is_zero() {
                return Err(SurfaceError::DegenerateTriangle(t));
            }
        }
        Ok(())
    }

    fn check_vertex_links(&self) -> Result<(), SurfaceError> {
        let mut link: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                link.entry(tri[k]).or_default().push((tri[(k + 1) % 3], tri[(k + 2) % 3]));
            }
        }
        for (v, arcs) in link {
            let next: HashMap<u32, u32> = arcs.iter().copied().collect();
            let start = arcs[0].0;
            let mut cur = start;
            let mut steps = 0;
            loop {
                cur = next[&cur];
                steps += 1;
                if cur == start {
                    break;
                }
                if steps > arcs.len() {
                    return Err(SurfaceError::NotSurface(format!("link of vertex {v} is not a circle")));
                }
            }
            if steps != arcs.len() {
                return Err(SurfaceError::NotSurface(format!("link of vertex {v} is not a circle")));
            }
        }
        Ok(())
    }

    /// Axis-aligned bounding box of the vertices used by triangles.
    pub fn bounds(&self) -> (P3, P3) {
        let mut lo = self.vertices[self.triangles[0][0] as usize].clone();
        let mut hi = lo.clone();
        for &v in self.triangles.iter().flatten() {
            let p = self.point(v);
            for i in 0..3 {
                if p.0[i] < lo.0[i] {
                    lo.0[i] = p.0[i].clone();
                }
                if p.0[i] > hi.0[i] {
                    hi.0[i] = p.0[i].clone();
                }
            }
        }
        (lo, hi)
    }

    /// JSON document in the input schema; coordinates as integers or `"p/q"` strings.
    pub fn to_json(&self) -> Value {
        let coord = |q: &Q| -> Value {
            if q.denom().is_one() {
                serde_json::from_str(&q.numer().to_string()).expect("integer literal")
            } else {
                Value::String(to_fraction_string(q))
            }
        };
        serde_json::json!({
            "vertices": self.vertices.iter().map(|p| p.0.iter().map(coord).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "triangles": self.triangles,
        })
    }
}

fn parse_num(v: &Value) -> Result<Q, SurfaceError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(SurfaceError::Malformed(format!("expected a number, found {other}"))),
    };
    parse_rational(&text).map_err(|e| SurfaceError::Malformed(e.to_string()))
}

fn parse_index(v: &Value) -> Result<u32, SurfaceError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        other => return Err(SurfaceError::Malformed(format!("expected a vertex index, found {other}"))),
    };
    text.parse::<u32>()
        .map_err(|_| SurfaceError::Malformed(format!("invalid vertex index {text}")))
}

fn triple<'a>(v: &'a Value, what: &str) -> Result<&'a [Value], SurfaceError> {
    match v {
        Value::Array(items) if items.len() == 3 => Ok(items),
        _ => Err(SurfaceError::Malformed(format!("each {what} must be an array of 3 entries"))),
    }
}

/// Parses the `{"vertices": [...], "triangles": [...]}` document.
pub fn parse_surface(document: &str) -> Result<ImmersedSurface, SurfaceError> {
    let doc: Value = serde_json::from_str(document).map_err(|e| SurfaceError::Malformed(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| SurfaceError::Malformed("top level must be an object".into()))?;
    let verts = obj
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| SurfaceError::Malformed("missing \"vertices\" array".into()))?;
    let tris = obj
        .get("triangles")
        .and_then(Value::as_array)
        .ok_or_else(|| SurfaceError::Malformed("missing \"triangles\" array".into()))?;
    let mut vertices = Vec::with_capacity(verts.len());
    for v in verts {
        let c = triple(v, "vertex")?;
        vertices.push(P3::new(parse_num(&c[0])?, parse_num(&c[1])?, parse_num(&c[2])?));
    }
    let mut triangles = Vec::with_capacity(tris.len());
    for t in tris {
        let c = triple(t, "triangle")?;
        triangles.push([parse_index(&c[0])?, parse_index(&c[1])?, parse_index(&c[2])?]);
    }
    ImmersedSurface::new(vertices, triangles)
}

/// Deterministic rational perturbation of magnitude 2^-20 of the bounding-box size.
///
/// The result is only structurally validated; transversality must be re-checked.
pub fn jitter(s: &ImmersedSurface, seed: u64) -> Result<ImmersedSurface, SurfaceError> {
    let (lo, hi) = s.bounds();
    let mut size = Q::zero();
    for i in 0..3 {
        let d = &hi.0[i] - &lo.0[i];
        if d > size {
            size = d;
        }
    }
    let step = size / Q::from_integer(BigInt::from(1u64 << 20));
    let resolution: i64 = 1 << 16;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let vertices = s
        .vertices
        .iter()
        .map(|p| {
            let mut q = p.clone();
            for c in q.0.iter_mut() {
                let k: i64 = rng.gen_range(-resolution..=resolution);
                *c += &step * Q::new(k.into(), resolution.into());
            }
            q
        })
        .collect();
    ImmersedSurface::new(vertices, s.triangles.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    const OCTA: &str = r#"{"vertices":[[1,0,0],[-1,0,0],[0,1,0],[0,-1,0],[0,0,1],[0,0,-1]],
      "triangles":[[0,2,4],[2,1,4],[1,3,4],[3,0,4],[2,0,5],[1,2,5],[3,1,5],[0,3,5]]}"#;

    #[test]
    fn octahedron_parses() {
        let s = parse_surface(OCTA).unwrap();
        assert_eq!(s.triangles.len(), 8);
        assert_eq!(s.euler_characteristic(), 2);
    }

    #[test]
    fn reversed_triangle_is_incoherent() {
        let bad = OCTA.replace("[0,2,4]", "[2,0,4]");
        assert!(matches!(parse_surface(&bad), Err(SurfaceError::IncoherentOrientation(..))));
    }

    #[test]
    fn accepts_fraction_strings_and_decimals() {
        let doc = OCTA.replace("[1,0,0]", "[\"2/2\",0.0,\"0\"]");
        assert_eq!(parse_surface(&doc).unwrap(), parse_surface(OCTA).unwrap());
    }

    #[test]
    fn rejects_open_surface() {
        let open = r#"{"vertices":[[0,0,0],[1,0,0],[0,1,0]],"triangles":[[0,1,2]]}"#;
        assert!(matches!(parse_surface(open), Err(SurfaceError::NotSurface(_))));
    }

    #[test]
    fn degenerate_triangle() {
        let doc = OCTA.replace("[0,0,1]", "[0.5,0.5,0]");
        assert_eq!(parse_surface(&doc), Err(SurfaceError::DegenerateTriangle(0)));
    }

    #[test]
    fn json_round_trip() {
        let s = parse_surface(OCTA).unwrap();
        let again = parse_surface(&s.to_json().to_string()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn jitter_is_seeded() {
        let s = parse_surface(OCTA).unwrap();
        assert_eq!(jitter(&s, 7).unwrap(), jitter(&s, 7).unwrap());
        assert_ne!(jitter(&s, 7).unwrap(), jitter(&s, 8).unwrap());
    }
}
