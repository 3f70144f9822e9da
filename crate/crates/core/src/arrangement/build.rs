use super::{ArrangementComplex, ArrangementError, Cell, Edge, EdgeSheets, Face, Patch, BOX_PLANES};
use crate::geometry::{locate_in_triangle, on_segment, Plane, TriLoc, P3};
use crate::rational::{int, sign, Q};
use crate::surface::ImmersedSurface;
use crate::util::UnionFind;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

pub const DEFAULT_CELL_BUDGET: usize = 100_000;

/// Patch pairs glued along mesh creases, indexed by the arrangement edges and vertices on them.
#[derive(Debug, Clone, Default)]
pub(crate) struct CreaseJoins {
    pub edge: BTreeMap<u32, Vec<(u32, u32)>>,
    pub vertex: BTreeMap<u32, Vec<(u32, u32)>>,
}

struct Points {
    coords: Vec<P3>,
    index: HashMap<P3, u32>,
    tight: Vec<Vec<u32>>,
}

impl Points {
    fn insert(&mut self, p: P3, tight: Vec<u32>) -> u32 {
        if let Some(&id) = self.index.get(&p) {
            let t = &mut self.tight[id as usize];
            for x in tight {
                if let Err(pos) = t.binary_search(&x) {
                    t.insert(pos, x);
                }
            }
            return id;
        }
        let id = self.coords.len() as u32;
        self.index.insert(p.clone(), id);
        self.coords.push(p);
        self.tight.push(tight);
        id
    }
}

fn common_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn common(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().filter(|x| b.binary_search(x).is_ok()).copied().collect()
}

pub(super) fn build(s: &ImmersedSurface, budget: usize) -> Result<ArrangementComplex, ArrangementError> {
    let tri_planes: Vec<Plane> = (0..s.triangles.len())
        .map(|t| {
            let [a, b, c] = s.corners(t);
            Plane::through(a, b, c).expect("triangles are non-degenerate")
        })
        .collect();
    let (lo0, hi0) = s.bounds();
    let one = int(1);
    let lo = P3([&lo0.0[0] - &one, &lo0.0[1] - &one, &lo0.0[2] - &one]);
    let hi = P3([&hi0.0[0] + &one, &hi0.0[1] + &one, &hi0.0[2] + &one]);
    let mut planes: Vec<Plane> = Vec::new();
    for axis in 0..3 {
        planes.push(Plane::axis(axis, lo.0[axis].clone()));
        planes.push(Plane::axis(axis, hi.0[axis].clone()));
    }
    let distinct: BTreeSet<Plane> = tri_planes.iter().cloned().collect();
    planes.extend(distinct);
    let plane_id: HashMap<Plane, u32> = planes.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();
    let tri_plane_id: Vec<u32> = tri_planes.iter().map(|p| plane_id[p]).collect();

    let patches = make_patches(s, &tri_plane_id, &planes);

    let mut pts = Points { coords: Vec::new(), index: HashMap::new(), tight: Vec::new() };
    let mut first = Vec::new();
    for mask in 0..8u32 {
        let mut c = [Q::zero(), Q::zero(), Q::zero()];
        let mut tight = Vec::new();
        for axis in 0..3 {
            let high = mask >> axis & 1 == 1;
            c[axis] = if high { hi.0[axis].clone() } else { lo.0[axis].clone() };
            tight.push((2 * axis + high as usize) as u32);
        }
        tight.sort_unstable();
        first.push(pts.insert(P3(c), tight));
    }
    first.sort_unstable();
    let mut cells: Vec<Vec<u32>> = vec![first];

    for p in BOX_PLANES..planes.len() {
        let plane = &planes[p];
        let vals: Vec<Q> = pts.coords.iter().map(|x| plane.eval(x)).collect();
        for (v, val) in vals.iter().enumerate() {
            if val.is_zero() {
                let t = &mut pts.tight[v];
                if let Err(pos) = t.binary_search(&(p as u32)) {
                    t.insert(pos, p as u32);
                }
            }
        }
        let mut next = Vec::with_capacity(cells.len());
        for cell in cells {
            let signs: Vec<i32> = cell.iter().map(|&v| sign(&vals[v as usize])).collect();
            let has_pos = signs.iter().any(|&x| x > 0);
            let has_neg = signs.iter().any(|&x| x < 0);
            if !(has_pos && has_neg) {
                next.push(cell);
                continue;
            }
            let mut plus: Vec<u32> = Vec::new();
            let mut minus: Vec<u32> = Vec::new();
            for (i, &v) in cell.iter().enumerate() {
                if signs[i] >= 0 {
                    plus.push(v);
                }
                if signs[i] <= 0 {
                    minus.push(v);
                }
            }
            for i in 0..cell.len() {
                for j in i + 1..cell.len() {
                    if signs[i] * signs[j] >= 0 {
                        continue;
                    }
                    let (u, w) = (cell[i], cell[j]);
                    let tu = &pts.tight[u as usize];
                    let tw = &pts.tight[w as usize];
                    if common_count(tu, tw) < 2 {
                        continue;
                    }
                    let mut tight = common(tu, tw);
                    tight.push(p as u32);
                    tight.sort_unstable();
                    let (vu, vw) = (&vals[u as usize], &vals[w as usize]);
                    let t = vu / (vu - vw);
                    let pu = &pts.coords[u as usize];
                    let x = pu.add(&pts.coords[w as usize].sub(pu).scale(&t));
                    let id = pts.insert(x, tight);
                    plus.push(id);
                    minus.push(id);
                }
            }
            plus.sort_unstable();
            plus.dedup();
            minus.sort_unstable();
            minus.dedup();
            next.push(minus);
            next.push(plus);
        }
        cells = next;
        if cells.len() > budget {
            return Err(ArrangementError::CellBudget { budget });
        }
    }
    lattice(s, planes, pts, cells, patches, tri_plane_id, lo, hi)
}

fn make_patches(s: &ImmersedSurface, tri_plane: &[u32], planes: &[Plane]) -> Vec<Patch> {
    let mut uf = UnionFind::new(s.triangles.len());
    for ts in s.edge_map().values() {
        if tri_plane[ts[0]] == tri_plane[ts[1]] {
            uf.union(ts[0], ts[1]);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for t in 0..s.triangles.len() {
        groups.entry(uf.find(t)).or_default().push(t);
    }
    let mut out: Vec<Patch> = groups
        .into_values()
        .map(|triangles| {
            let plane = tri_plane[triangles[0]];
            let normal_sign = sign(&s.normal(triangles[0]).dot(&planes[plane as usize].n));
            Patch { plane, triangles, normal_sign }
        })
        .collect();
    out.sort_by_key(|p| p.triangles[0]);
    out
}

#[allow(clippy::too_many_arguments)]
fn lattice(
    s: &ImmersedSurface,
    planes: Vec<Plane>,
    pts: Points,
    cell_verts: Vec<Vec<u32>>,
    patches: Vec<Patch>,
    tri_plane: Vec<u32>,
    lo: P3,
    hi: P3,
) -> Result<ArrangementComplex, ArrangementError> {
    let tight = &pts.tight;
    let mut edge_set: BTreeSet<[u32; 2]> = BTreeSet::new();
    let mut cell_edges: Vec<Vec<[u32; 2]>> = Vec::with_capacity(cell_verts.len());
    for verts in &cell_verts {
        let mut es = Vec::new();
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                if common_count(&tight[verts[i] as usize], &tight[verts[j] as usize]) >= 2 {
                    es.push([verts[i], verts[j]]);
                }
            }
        }
        edge_set.extend(es.iter().copied());
        cell_edges.push(es);
    }
    let edge_list: Vec<[u32; 2]> = edge_set.into_iter().collect();
    let edge_id = |e: [u32; 2]| edge_list.binary_search(&e).expect("edge present") as u32;

    let mut face_key: BTreeMap<(u32, Vec<u32>), Vec<u32>> = BTreeMap::new();
    for (ci, verts) in cell_verts.iter().enumerate() {
        let mut on: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &v in verts {
            for &p in &tight[v as usize] {
                on.entry(p).or_default().push(v);
            }
        }
        for (p, vs) in on {
            if vs.len() >= 3 {
                face_key.entry((p, vs)).or_default().push(ci as u32);
            }
        }
    }

    let cell_centroids: Vec<P3> = cell_verts
        .iter()
        .map(|vs| P3::centroid(vs.iter().map(|&v| &pts.coords[v as usize])))
        .collect();

    let mut faces = Vec::with_capacity(face_key.len());
    let mut cell_faces: Vec<Vec<u32>> = vec![Vec::new(); cell_verts.len()];
    for ((p, vs), cs) in face_key {
        let fid = faces.len() as u32;
        let plane = &planes[p as usize];
        let (mut neg, mut pos) = (None, None);
        for &c in &cs {
            cell_faces[c as usize].push(fid);
            match plane.side(&cell_centroids[c as usize]) {
                1 => {
                    assert!(pos.is_none(), "two cells on one side of a face");
                    pos = Some(c)
                }
                -1 => {
                    assert!(neg.is_none(), "two cells on one side of a face");
                    neg = Some(c)
                }
                _ => unreachable!("cell centroid on its own facet plane"),
            }
        }
        let mut fedges = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let e = [vs[i], vs[j]];
                if edge_list.binary_search(&e).is_ok() {
                    fedges.push(edge_id(e));
                }
            }
        }
        let cyc = cycle_order(&vs, &fedges, &edge_list);
        let centroid = P3::centroid(vs.iter().map(|&v| &pts.coords[v as usize]));
        faces.push(Face { plane: p, verts: cyc, edges: fedges, neg, pos, patches: Vec::new(), centroid });
    }

    let mut edges: Vec<Edge> = edge_list.iter().map(|&ends| Edge { ends, faces: Vec::new(), cells: Vec::new() }).collect();
    for (fi, f) in faces.iter().enumerate() {
        for &e in &f.edges {
            edges[e as usize].faces.push(fi as u32);
        }
    }
    let mut cells = Vec::with_capacity(cell_verts.len());
    for (ci, verts) in cell_verts.into_iter().enumerate() {
        let mut es: Vec<u32> = cell_edges[ci].iter().map(|&e| edge_id(e)).collect();
        es.sort_unstable();
        for &e in &es {
            edges[e as usize].cells.push(ci as u32);
        }
        let mut fs = std::mem::take(&mut cell_faces[ci]);
        fs.sort_unstable();
        cells.push(Cell { verts, edges: es, faces: fs, centroid: cell_centroids[ci].clone() });
    }

    // Patch membership of faces.
    let mut plane_patches: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (pi, patch) in patches.iter().enumerate() {
        plane_patches.entry(patch.plane).or_default().push(pi as u32);
    }
    for f in faces.iter_mut() {
        let Some(candidates) = plane_patches.get(&f.plane) else { continue };
        let drop = planes[f.plane as usize].drop_axis();
        for &pi in candidates {
            let inside = patches[pi as usize]
                .triangles
                .iter()
                .any(|&t| locate_in_triangle(drop, s.corners(t), &f.centroid) != TriLoc::Outside);
            if inside {
                f.patches.push(pi);
            }
        }
    }

    let region_winding = propagate_winding(&faces, &patches, cells.len());
    let crease_joins = crease_joins(s, &tri_plane, &patches, &pts, &edge_list);

    let mut arr = ArrangementComplex {
        planes,
        vertices: pts.coords,
        vertex_planes: pts.tight,
        edges,
        faces,
        cells,
        patches,
        region_winding,
        edge_sheets: Vec::new(),
        vertex_sheets: Vec::new(),
        lo,
        hi,
        crease_joins,
    };
    compute_sheets(&mut arr);
    Ok(arr)
}

fn cycle_order(vs: &[u32], fedges: &[u32], edge_list: &[[u32; 2]]) -> Vec<u32> {
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &e in fedges {
        let [a, b] = edge_list[e as usize];
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let start = vs[0];
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = *adj[&start].iter().min().expect("face vertex has edges");
    while cur != start {
        order.push(cur);
        let n = &adj[&cur];
        let nxt = if n[0] == prev { n[1] } else { n[0] };
        prev = cur;
        cur = nxt;
        assert!(order.len() <= vs.len(), "face boundary is not a cycle");
    }
    assert_eq!(order.len(), vs.len(), "face boundary is not a single cycle");
    order
}

/// Winding numbers by propagation from the box boundary (ω = 0 there).
fn propagate_winding(faces: &[Face], patches: &[Patch], ncells: usize) -> Vec<i64> {
    let mut w: Vec<Option<i64>> = vec![None; ncells];
    let mut cell_faces: Vec<Vec<u32>> = vec![Vec::new(); ncells];
    let mut queue = VecDeque::new();
    for (fi, f) in faces.iter().enumerate() {
        for c in f.cells() {
            cell_faces[c as usize].push(fi as u32);
        }
        if f.neg.is_none() || f.pos.is_none() {
            let c = f.neg.or(f.pos).unwrap() as usize;
            if w[c].is_none() {
                w[c] = Some(0);
                queue.push_back(c);
            }
        }
    }
    while let Some(c) = queue.pop_front() {
        let wc = w[c].unwrap();
        for &fi in &cell_faces[c] {
            let f = &faces[fi as usize];
            let Some(n) = f.other(c as u32) else { continue };
            if w[n as usize].is_some() {
                continue;
            }
            let to_side = if f.pos == Some(n) { 1 } else { -1 };
            let delta: i64 = f.patches.iter().map(|&p| (patches[p as usize].normal_sign * to_side) as i64).sum();
            w[n as usize] = Some(wc - delta);
            queue.push_back(n as usize);
        }
    }
    w.into_iter().map(|x| x.expect("every cell reached")).collect()
}

fn crease_joins(
    s: &ImmersedSurface,
    tri_plane: &[u32],
    patches: &[Patch],
    pts: &Points,
    edge_list: &[[u32; 2]],
) -> CreaseJoins {
    let mut tri_patch = vec![0u32; s.triangles.len()];
    for (pi, p) in patches.iter().enumerate() {
        for &t in &p.triangles {
            tri_patch[t] = pi as u32;
        }
    }
    let mut by_pair: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (v, t) in pts.tight.iter().enumerate() {
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                by_pair.entry((t[i], t[j])).or_default().push(v as u32);
            }
        }
    }
    let mut joins = CreaseJoins::default();
    for (&(a, b), ts) in &s.edge_map() {
        let (pa, pb) = (tri_patch[ts[0]], tri_patch[ts[1]]);
        if pa == pb {
            continue;
        }
        let (qa, qb) = (tri_plane[ts[0]], tri_plane[ts[1]]);
        let key = (qa.min(qb), qa.max(qb));
        let (xa, xb) = (s.point(a), s.point(b));
        let dir = xb.sub(xa);
        let mut on: Vec<(Q, u32)> = by_pair
            .get(&key)
            .map(|vs| {
                vs.iter()
                    .filter(|&&v| on_segment(xa, xb, &pts.coords[v as usize]))
                    .map(|&v| (pts.coords[v as usize].sub(xa).dot(&dir), v))
                    .collect()
            })
            .unwrap_or_default();
        on.sort();
        let pair = (pa.min(pb), pa.max(pb));
        for &(_, v) in &on {
            joins.vertex.entry(v).or_default().push(pair);
        }
        for w in on.windows(2) {
            let e = [w[0].1.min(w[1].1), w[0].1.max(w[1].1)];
            if let Ok(id) = edge_list.binary_search(&e) {
                joins.edge.entry(id as u32).or_default().push(pair);
            }
        }
    }
    joins
}

fn compute_sheets(arr: &mut ArrangementComplex) {
    let mut edge_sheets = Vec::with_capacity(arr.edges.len());
    for (ei, e) in arr.edges.iter().enumerate() {
        let mut by_patch: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &f in &e.faces {
            for &p in &arr.faces[f as usize].patches {
                by_patch.entry(p).or_default().push(f);
            }
        }
        if by_patch.is_empty() {
            edge_sheets.push(EdgeSheets::default());
            continue;
        }
        let keys: Vec<u32> = by_patch.keys().copied().collect();
        let mut uf = UnionFind::new(keys.len());
        if let Some(js) = arr.crease_joins.edge.get(&(ei as u32)) {
            for &(a, b) in js {
                if let (Ok(i), Ok(j)) = (keys.binary_search(&a), keys.binary_search(&b)) {
                    uf.union(i, j);
                }
            }
        }
        let mut groups: BTreeMap<usize, (Vec<u32>, Vec<u32>)> = BTreeMap::new();
        for (i, &p) in keys.iter().enumerate() {
            let g = groups.entry(uf.find(i)).or_default();
            g.0.extend(by_patch[&p].iter().copied());
            g.1.push(p);
        }
        let mut sheets = Vec::new();
        let mut sheet_patches = Vec::new();
        let mut ordered: Vec<(Vec<u32>, Vec<u32>)> = groups.into_values().collect();
        ordered.sort_by(|a, b| a.1.cmp(&b.1));
        for (mut fs, ps) in ordered {
            fs.sort_unstable();
            sheets.push(fs);
            sheet_patches.push(ps);
        }
        edge_sheets.push(EdgeSheets { sheets, sheet_patches });
    }
    let mut vertex_patches: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); arr.vertices.len()];
    for f in &arr.faces {
        for &v in &f.verts {
            vertex_patches[v as usize].extend(f.patches.iter().copied());
        }
    }
    let mut vertex_sheets = Vec::with_capacity(arr.vertices.len());
    for (v, ps) in vertex_patches.into_iter().enumerate() {
        let keys: Vec<u32> = ps.into_iter().collect();
        let mut uf = UnionFind::new(keys.len());
        if let Some(js) = arr.crease_joins.vertex.get(&(v as u32)) {
            for &(a, b) in js {
                if let (Ok(i), Ok(j)) = (keys.binary_search(&a), keys.binary_search(&b)) {
                    uf.union(i, j);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (i, &p) in keys.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(p);
        }
        let mut gs: Vec<Vec<u32>> = groups.into_values().collect();
        gs.sort();
        vertex_sheets.push(gs);
    }
    arr.edge_sheets = edge_sheets;
    arr.vertex_sheets = vertex_sheets;
}
