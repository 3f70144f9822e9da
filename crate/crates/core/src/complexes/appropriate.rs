//! Coverings for boundary-region subgroups and the appropriateness test.

use super::boundary::Boundary;
use super::pi1::{simplify_dual, DualPresentation};
use super::{Limits, SegSet};
use crate::cx::Cx;
use crate::group::{enumerate_cosets, gen_of, inverse, CosetTable, Enumeration, Word};
use crate::triangulation::{BaseComplex, Seg};
use serde::Serialize;
use std::collections::VecDeque;

/// Loops generating the image of π₁ of one boundary region.
#[derive(Debug, Clone)]
pub struct RegionLoops {
    pub region: usize,
    /// Word from the base tet to each boundary face of the region (others `None`).
    pub to_face: Vec<Option<Word>>,
    pub generators: Vec<Word>,
}

/// Spanning-tree loops of the boundary region `region`.
pub fn region_loops(b: &Boundary, d: &DualPresentation, labels: &[usize], g: &SegSet, region: usize) -> RegionLoops {
    let n = b.len();
    let mut to_face: Vec<Option<Word>> = vec![None; n];
    let mut parent: Vec<Option<(usize, Seg)>> = vec![None; n];
    let Some(start) = (0..n).find(|&k| labels[k] == region) else {
        return RegionLoops { region, to_face, generators: Vec::new() };
    };
    // The base tet reaches every tet through tree faces, which read as empty words.
    to_face[start] = Some(Vec::new());
    let mut queue = VecDeque::from([start]);
    while let Some(k) = queue.pop_front() {
        for a in &b.adj[k] {
            if g.contains(&a.seg) || to_face[a.to].is_some() {
                continue;
            }
            let mut w = to_face[k].clone().unwrap();
            w.extend(d.word(&a.path));
            to_face[a.to] = Some(crate::group::free_reduce(&w));
            parent[a.to] = Some((k, a.seg));
            queue.push_back(a.to);
        }
    }
    let mut generators = Vec::new();
    for k in 0..n {
        if labels[k] != region {
            continue;
        }
        for a in &b.adj[k] {
            if g.contains(&a.seg) || k >= a.to || parent[a.to] == Some((k, a.seg)) || parent[k] == Some((a.to, a.seg)) {
                continue;
            }
            let w = crossing_loop(&to_face, d, k, a.to, &a.path);
            if !w.is_empty() {
                generators.push(w);
            }
        }
    }
    RegionLoops { region, to_face, generators }
}

/// `P(from) · w(from → to) · P(to)⁻¹`.
fn crossing_loop(to_face: &[Option<Word>], d: &DualPresentation, from: usize, to: usize, path: &[crate::cx::FaceRef]) -> Word {
    let mut w = to_face[from].clone().unwrap();
    w.extend(d.word(path));
    w.extend(inverse(to_face[to].as_ref().unwrap()));
    crate::group::free_reduce(&w)
}

/// A finite covering given by the action of every dual generator on cosets.
#[derive(Debug, Clone)]
pub struct Covering {
    pub table: CosetTable,
    perm: Vec<Vec<u32>>,
    perm_inv: Vec<Vec<u32>>,
}

impl Covering {
    pub fn sheets(&self) -> usize {
        self.table.index()
    }

    pub fn act_letter(&self, c: u32, l: i32) -> u32 {
        if l == 0 {
            c
        } else if l > 0 {
            self.perm[gen_of(l)][c as usize]
        } else {
            self.perm_inv[gen_of(l)][c as usize]
        }
    }

    pub fn act(&self, c: u32, w: &[i32]) -> u32 {
        w.iter().fold(c, |c, &l| self.act_letter(c, l))
    }

    /// Trivial covering of a presentation with no generators left.
    pub fn identity(n_gens: usize) -> Self {
        Covering { table: CosetTable { n_gens: 0, table: vec![vec![]] }, perm: vec![vec![0]; n_gens], perm_inv: vec![vec![0]; n_gens] }
    }
}

#[derive(Debug, Clone)]
pub enum CoveringResult {
    Complete(Box<Covering>),
    /// The coset limit was reached; the table is incomplete.
    Partial { defined: usize },
}

impl CoveringResult {
    pub fn into_covering(self) -> Option<Covering> {
        match self {
            CoveringResult::Complete(c) => Some(*c),
            CoveringResult::Partial { .. } => None,
        }
    }
}

/// Covering for the subgroup generated by `loops` (words in the dual generators).
pub fn build_covering(d: &DualPresentation, loops: &[Word], limits: &Limits) -> CoveringResult {
    let s = simplify_dual(d, loops, limits.tietze_budget);
    match enumerate_cosets(&s.pres, &s.tracked, limits.coset_limit) {
        Enumeration::Complete(table) => {
            let perm = table.original_action(&s);
            let perm_inv = perm
                .iter()
                .map(|p| {
                    let mut q = vec![0u32; p.len()];
                    for (a, &b) in p.iter().enumerate() {
                        q[b as usize] = a as u32;
                    }
                    q
                })
                .collect();
            CoveringResult::Complete(Box::new(Covering { table, perm, perm_inv }))
        }
        Enumeration::Incomplete { defined } => CoveringResult::Partial { defined },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Appropriateness {
    Yes,
    /// A loop crossing `segment` once is null-homotopic.
    No { segment: Seg, region: usize },
    /// Coset enumeration for `region` hit the limit.
    Undecided { region: usize, defined: usize },
}

impl Appropriateness {
    pub fn is_yes(&self) -> bool {
        matches!(self, Appropriateness::Yes)
    }
}

/// Appropriateness of `(cx, g)`, every component checked separately.
pub fn is_appropriate(cx: &Cx, t: &BaseComplex, g: &SegSet, limits: &Limits) -> Appropriateness {
    let mut verdict = Appropriateness::Yes;
    let mut region_offset = 0;
    for (part, _) in cx.split() {
        let v = appropriate_connected(&part, t, g, limits);
        let b_regions = {
            let b = Boundary::new(&part, t);
            b.regions(g).1
        };
        match v {
            Appropriateness::No { segment, region } => {
                return Appropriateness::No { segment, region: region + region_offset };
            }
            Appropriateness::Undecided { region, defined } if verdict.is_yes() => {
                verdict = Appropriateness::Undecided { region: region + region_offset, defined };
            }
            _ => {}
        }
        region_offset += b_regions;
    }
    verdict
}

fn appropriate_connected(cx: &Cx, t: &BaseComplex, g: &SegSet, limits: &Limits) -> Appropriateness {
    let b = Boundary::new(cx, t);
    let (labels, k) = b.regions(g);
    let d = DualPresentation::new(cx, t);
    let mut verdict = Appropriateness::Yes;
    for r in 0..k {
        let mut tests: Vec<(usize, usize, usize)> = Vec::new();
        for (f, adj) in b.adj.iter().enumerate() {
            for (ai, a) in adj.iter().enumerate() {
                if labels[f] == r && labels[a.to] == r && g.contains(&a.seg) && f < a.to {
                    tests.push((f, ai, a.to));
                }
            }
        }
        if tests.is_empty() {
            continue;
        }
        let loops = region_loops(&b, &d, &labels, g, r);
        let cover = match build_covering(&d, &loops.generators, limits) {
            CoveringResult::Complete(c) => *c,
            CoveringResult::Partial { defined } => {
                if verdict.is_yes() {
                    verdict = Appropriateness::Undecided { region: r, defined };
                }
                continue;
            }
        };
        for (f, ai, to) in tests {
            let a = &b.adj[f][ai];
            let w = crossing_loop(&loops.to_face, &d, f, to, &a.path);
            if cover.act(0, &w) == 0 {
                return Appropriateness::No { segment: a.seg, region: r };
            }
        }
    }
    verdict
}
