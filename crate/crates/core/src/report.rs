//! Serialized artifacts: versioned JSON reports and OFF meshes.

use crate::arrangement::{ArrangementComplex, Stratum};
use crate::complexes::good::TwoComplex;
use crate::extension::{ClassificationReport, Extension};
use crate::geometry::P3;
use crate::inscribed::{Config, Context};
use crate::rational::{to_exact_decimal, to_fraction_string, to_rounded_decimal};
use crate::surface::ImmersedSurface;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write;

pub const SCHEMA_VERSION: u32 = 1;

/// Decimal places of the approximate coordinate written for non-terminating rationals.
pub const OFF_PLACES: usize = 12;

pub fn input_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Polygon mesh with exact vertex positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Mesh {
    pub vertices: Vec<P3>,
    pub faces: Vec<Vec<u32>>,
}

impl Mesh {
    /// Mesh over a subset of a shared vertex table; unused vertices are dropped
    /// and the rest keep their relative order.
    pub fn compact(table: &[P3], faces: Vec<Vec<u32>>) -> Mesh {
        let mut used: BTreeMap<u32, u32> = faces.iter().flatten().map(|&v| (v, 0)).collect();
        for (i, slot) in used.values_mut().enumerate() {
            *slot = i as u32;
        }
        let vertices = used.keys().map(|&v| table[v as usize].clone()).collect();
        let faces = faces.into_iter().map(|f| f.into_iter().map(|v| used[&v]).collect()).collect();
        Mesh { vertices, faces }
    }

    pub fn from_surface(s: &ImmersedSurface) -> Mesh {
        Mesh { vertices: s.vertices.clone(), faces: s.triangles.iter().map(|t| t.to_vec()).collect() }
    }

    pub fn edges(&self) -> BTreeMap<(u32, u32), usize> {
        let mut out = BTreeMap::new();
        for f in &self.faces {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                *out.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        out
    }

    /// V − E + F over the vertices actually used.
    pub fn euler_characteristic(&self) -> i64 {
        let used: std::collections::BTreeSet<u32> = self.faces.iter().flatten().copied().collect();
        used.len() as i64 - self.edges().len() as i64 + self.faces.len() as i64
    }

    /// Every edge on exactly two faces, traversed once in each direction.
    pub fn is_closed_oriented(&self) -> bool {
        let mut directed: BTreeMap<(u32, u32), i32> = BTreeMap::new();
        for f in &self.faces {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                *directed.entry((a.min(b), a.max(b))).or_insert(0) += if a < b { 1 } else { -1 };
            }
        }
        directed.values().all(|&d| d == 0) && self.edges().values().all(|&n| n == 2)
    }

    /// OFF text. Coordinates are exact decimals when the rational terminates;
    /// otherwise the vertex line carries a rounded decimal and is preceded by
    /// a `# p/q p/q p/q` comment with the exact value.
    pub fn to_off(&self) -> String {
        let mut out = String::from("OFF\n");
        writeln!(out, "{} {} 0", self.vertices.len(), self.faces.len()).unwrap();
        for p in &self.vertices {
            let exact: Vec<Option<String>> = p.0.iter().map(to_exact_decimal).collect();
            if exact.iter().any(Option::is_none) {
                let fr: Vec<String> = p.0.iter().map(to_fraction_string).collect();
                writeln!(out, "# {}", fr.join(" ")).unwrap();
            }
            let line: Vec<String> =
                p.0.iter().zip(exact).map(|(q, e)| e.unwrap_or_else(|| to_rounded_decimal(q, OFF_PLACES))).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        for f in &self.faces {
            let ids: Vec<String> = f.iter().map(u32::to_string).collect();
            writeln!(out, "{} {}", f.len(), ids.join(" ")).unwrap();
        }
        out
    }
}

fn polygon_normal(pts: &[&P3]) -> P3 {
    // Fan sum of cross products; exact for planar polygons.
    let mut n = P3::zero();
    for i in 1..pts.len() - 1 {
        n = n.add(&pts[i].sub(pts[0]).cross(&pts[i + 1].sub(pts[0])));
    }
    n
}

/// ∂D_k as arrangement polygons, oriented with normals pointing out of D_k.
pub fn stratum_boundary(a: &ArrangementComplex, st: &Stratum) -> Mesh {
    let k = st.k as i64;
    let faces = st
        .boundary_faces
        .iter()
        .map(|&f| {
            let face = &a.faces[f as usize];
            let mut verts = face.verts.clone();
            let pts: Vec<&P3> = verts.iter().map(|&v| &a.vertices[v as usize]).collect();
            let along = polygon_normal(&pts).dot(&a.planes[face.plane as usize].n);
            // The plane normal points from neg to pos; outward means toward the side below k.
            let inside_neg = a.side_winding(face.neg) >= k;
            if (along > num_traits::Zero::zero()) != inside_neg {
                verts.reverse();
            }
            verts
        })
        .collect();
    Mesh::compact(&a.vertices, faces)
}

/// The boundary surface of an extension: one vertex per boundary vertex
/// class, placed at its image, faces oriented outward.
pub fn extension_boundary(ctx: &Context, ext: &Extension) -> Mesh {
    let t = &ctx.t;
    let sk = ext.cx.skeleton(t);
    let mut faces = Vec::new();
    for (x, tet) in ext.cx.tets.iter().enumerate() {
        for i in 0..4 {
            if tet.glue[i].is_some() {
                continue;
            }
            let c = ext.cx.corners(t, x as u32);
            let mut local: Vec<usize> = (0..4).filter(|&j| j != i).collect();
            let p: Vec<P3> = local.iter().map(|&j| t.position(c[j])).collect();
            let n = p[1].sub(&p[0]).cross(&p[2].sub(&p[0]));
            if n.dot(&t.position(c[i]).sub(&p[0])) > num_traits::Zero::zero() {
                local.swap(1, 2);
            }
            faces.push(local.iter().map(|&j| sk.vert_of[x][j]).collect());
        }
    }
    let table: Vec<P3> = sk.vert_base.iter().map(|&v| t.position(v)).collect();
    Mesh::compact(&table, faces)
}

/// A set of base triangles, vertices shared by base id.
pub fn triangles_mesh(ctx: &Context, x: &TwoComplex) -> Mesh {
    let table: Vec<P3> = (0..ctx.t.positions.len() as u32).map(|v| ctx.t.position(v)).collect();
    Mesh::compact(&table, x.tris.iter().map(|t| t.to_vec()).collect())
}

pub fn config_json(c: &Config) -> Value {
    serde_json::to_value(c).expect("config serializes")
}

fn envelope(kind: &str, digest: &str, config: &Config) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("kind".into(), json!(kind));
    m.insert("input_digest".into(), json!(digest));
    m.insert("config".into(), config_json(config));
    m
}

/// Per-level summary of the strata.
pub fn strata_json(digest: &str, ctx: &Context) -> Value {
    let a = &ctx.t.arr;
    let mut m = envelope("strata", digest, &ctx.config);
    m.insert("n".into(), json!(ctx.n()));
    m.insert("cells".into(), json!(a.cells.len()));
    let levels: Vec<Value> = ctx
        .strata
        .iter()
        .map(|st| {
            let mesh = stratum_boundary(a, st);
            json!({
                "k": st.k,
                "cells": st.cells.len(),
                "components": st.components.len(),
                "boundary_faces": st.boundary_faces.len(),
                "boundary_euler": mesh.euler_characteristic(),
                "graph_edges": st.graph.edges.len(),
                "graph_components": st.graph.component_count(a),
            })
        })
        .collect();
    m.insert("levels".into(), Value::Array(levels));
    Value::Object(m)
}

pub fn classification_json(digest: &str, config: &Config, report: &ClassificationReport) -> Value {
    let mut m = envelope("classification", digest, config);
    let Value::Object(body) = serde_json::to_value(report).expect("report serializes") else { unreachable!() };
    m.extend(body);
    Value::Object(m)
}

/// Deterministic pretty-printed text with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}
