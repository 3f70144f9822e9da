//! The top-down recursion producing the inscribed set ζ and its good
//! elements I(ζ).

use crate::arrangement::{build_arrangement, strata, ArrangementError, Stratum, StrataError};
use crate::complexes::good::TwoComplex;
use crate::complexes::relative::{cut_complex, is_appropriate_triple, TripleVerdict};
use crate::complexes::simple::{construct_simple_complex, seed_splits, segments_of, SeedSplits, SimpleError};
use crate::complexes::{is_appropriate, Appropriateness, Limits, SegSet, SimpleComplex};
use crate::cx::Cx;
use crate::surface::ImmersedSurface;
use crate::triangulation::BaseComplex;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use thiserror::Error;

/// Budgets and knobs of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Config {
    pub cell_budget: usize,
    pub coset_limit: usize,
    pub subset_budget: usize,
    pub element_budget: usize,
    pub tietze_budget: usize,
    /// Finest triangulation tried when a construction fails: 1 is the flag
    /// triangulation, each further level one barycentric subdivision.
    pub max_refinement: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config { cell_budget: 1_000_000, coset_limit: 10_000, subset_budget: 100_000, element_budget: 10_000, tietze_budget: 1_000_000, max_refinement: 2 }
    }
}

impl Config {
    pub fn limits(&self) -> Limits {
        Limits { coset_limit: self.coset_limit, tietze_budget: self.tietze_budget, subset_budget: self.subset_budget }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Strata(#[from] StrataError),
}

/// Everything the recursion reads: the triangulation, the strata as
/// complexes and their graphs.
#[derive(Debug, Clone)]
pub struct Context {
    pub surface: ImmersedSurface,
    pub t: BaseComplex,
    pub strata: Vec<Stratum>,
    /// `d[k - 1]` is D_k.
    pub d: Vec<Cx>,
    /// `g[k - 1]` is G_k as base segments.
    pub g: Vec<SegSet>,
    pub config: Config,
}

impl Context {
    pub fn new(surface: &ImmersedSurface, config: Config) -> Result<Self, PipelineError> {
        let a = build_arrangement(surface, config.cell_budget)?;
        let st = strata(&a)?;
        Ok(Self::with_base(surface, BaseComplex::new(a), st, config))
    }

    fn with_base(surface: &ImmersedSurface, t: BaseComplex, strata: Vec<Stratum>, config: Config) -> Self {
        let d = (1..=strata.len()).map(|k| Cx::from_base(&t, &t.stratum_tets(k as i64))).collect();
        let g = strata.iter().map(|s| t.graph_segments(&s.graph.edges)).collect();
        Context { surface: surface.clone(), t, strata, d, g, config }
    }

    /// The same data on the barycentric subdivision.
    pub fn refine(&self) -> Self {
        Self::with_base(&self.surface, self.t.subdivide(), self.strata.clone(), self.config)
    }

    /// The same data after coning tetrahedra and bisecting edges.
    pub fn split(&self, splits: &SeedSplits) -> Self {
        let mut t = self.t.stellar(&splits.cone);
        if !splits.bisect.is_empty() {
            t = t.bisect(&splits.bisect);
        }
        Self::with_base(&self.surface, t, self.strata.clone(), self.config)
    }

    /// n = max ω.
    pub fn n(&self) -> u32 {
        self.strata.len() as u32
    }

    pub fn stratum(&self, k: u32) -> &Cx {
        &self.d[k as usize - 1]
    }

    pub fn graph(&self, k: u32) -> &SegSet {
        &self.g[k as usize - 1]
    }
}

/// One level (X̃_k, X_k) of an element. The labels inside `tilde` refer to
/// the triangulation current when the level was built; its triangles stay
/// valid on later splits.
#[derive(Debug, Clone, Serialize)]
pub struct Pair {
    pub k: u32,
    #[serde(skip)]
    pub tilde: Arc<SimpleComplex>,
    pub chosen: TwoComplex,
}

/// A partial or complete element ((X̃_k, X_k), …, (X̃_n, X_n)); `pairs[0]`
/// is level n.
#[derive(Debug, Clone, Serialize)]
pub struct InscribedElement {
    pub pairs: Vec<Pair>,
}

impl InscribedElement {
    /// Lowest level present.
    pub fn bottom(&self) -> u32 {
        self.pairs.last().map_or(0, |p| p.k)
    }

    /// X_k, or ∅ outside the levels present (X_{n+1} = ∅).
    pub fn x(&self, k: u32) -> TwoComplex {
        self.pair(k).map(|p| p.chosen.clone()).unwrap_or_default()
    }

    pub fn pair(&self, k: u32) -> Option<&Pair> {
        self.pairs.iter().find(|p| p.k == k)
    }

    pub fn is_good(&self) -> bool {
        self.bottom() == 1 && self.x(1).is_empty()
    }
}

fn push_complex(out: &mut Vec<u8>, x: &TwoComplex) {
    // BTreeSet iteration is sorted, so the key ignores insertion order.
    out.extend((x.tris.len() as u64).to_le_bytes());
    for tri in &x.tris {
        for v in tri {
            out.extend(v.to_le_bytes());
        }
    }
}

/// Length-prefixed sorted triangle lists of every level, top level first.
pub fn canonical_key(e: &InscribedElement) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend((e.pairs.len() as u64).to_le_bytes());
    for p in &e.pairs {
        out.extend(p.k.to_le_bytes());
        push_complex(&mut out, &p.tilde.x);
        push_complex(&mut out, &p.chosen);
    }
    out
}

pub fn key_hex(key: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(key))
}

/// N = S(X_{k+1}) minus S(X_{k+2}), as segments.
pub fn n_graph(x_above: &TwoComplex, x_two_above: &TwoComplex) -> SegSet {
    let upper = x_two_above.singular_set();
    x_above.singular_set().difference(&upper).copied().collect()
}

/// Outcome of one level for one suffix.
#[derive(Debug, Clone)]
pub enum LevelOutcome {
    Built { tilde: Arc<SimpleComplex>, subs: Arc<Vec<TwoComplex>> },
    NotAppropriate(String),
    Undecided(String),
    /// The construction failed on this triangulation.
    Failed(SimpleError),
    Budget(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct InscribedSet {
    pub n: u32,
    /// `levels[k - 1]` is ζ_k.
    #[serde(skip)]
    pub levels: Vec<Vec<InscribedElement>>,
    /// An undecided branch or exhausted budget was met.
    pub partial: bool,
    pub diagnostics: Vec<String>,
    /// Subdivision level of the triangulation used.
    pub refinement: u32,
}

impl InscribedSet {
    pub fn zeta(&self, k: u32) -> &[InscribedElement] {
        &self.levels[k as usize - 1]
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

/// Memoized levels keyed by (k, X_{k+1}, X_{k+2}).
#[derive(Default)]
pub struct LevelCache {
    map: HashMap<(u32, Vec<u8>), LevelOutcome>,
}

impl LevelCache {
    pub fn level(&mut self, ctx: &Context, k: u32, above: &TwoComplex, two_above: &TwoComplex) -> LevelOutcome {
        let mut key = Vec::new();
        push_complex(&mut key, above);
        push_complex(&mut key, two_above);
        self.map.entry((k, key)).or_insert_with(|| compute_level(ctx, k, above, two_above)).clone()
    }
}

fn compute_level(ctx: &Context, k: u32, above: &TwoComplex, two_above: &TwoComplex) -> LevelOutcome {
    let limits = ctx.config.limits();
    let t = &ctx.t;
    let built = if k == ctx.n() {
        match is_appropriate(ctx.stratum(k), t, ctx.graph(k), &limits) {
            Appropriateness::Yes => construct_simple_complex(ctx.stratum(k), t, ctx.graph(k), &limits),
            v @ Appropriateness::No { .. } => return LevelOutcome::NotAppropriate(format!("(D_{k}, G_{k}): {v:?}")),
            v @ Appropriateness::Undecided { .. } => return LevelOutcome::Undecided(format!("(D_{k}, G_{k}): {v:?}")),
        }
    } else {
        let mut gn = n_graph(above, two_above);
        gn.extend(ctx.graph(k).iter().copied());
        match is_appropriate_triple(ctx.stratum(k), t, above, &gn, &limits) {
            Ok(TripleVerdict::Yes) => {}
            Ok(v) if v.is_undecided() => return LevelOutcome::Undecided(format!("(D_{k}, X_{}, N ∪ G_{k}): {v:?}", k + 1)),
            Ok(v) => return LevelOutcome::NotAppropriate(format!("(D_{k}, X_{}, N ∪ G_{k}): {v:?}", k + 1)),
            Err(e) => return LevelOutcome::NotAppropriate(format!("(D_{k}, X_{}): {e}", k + 1)),
        }
        let cut = cut_complex(ctx.stratum(k), t, above).expect("cut checked above");
        construct_simple_complex(&cut, t, &gn, &limits)
    };
    match built {
        Ok(sc) => match sc.good_subcomplexes(ctx.config.subset_budget) {
            Ok(subs) => LevelOutcome::Built { tilde: Arc::new(sc), subs: Arc::new(subs) },
            Err(b) => LevelOutcome::Budget(format!("level {k}: good subcomplex enumeration exceeded {}", b.0)),
        },
        Err(SimpleError::CoveringIncomplete { region, defined }) => {
            LevelOutcome::Undecided(format!("level {k}: covering of region {region} incomplete after {defined} cosets"))
        }
        Err(e) => LevelOutcome::Failed(e),
    }
}

/// A construction failed; the caller may retry on a finer triangulation.
#[derive(Debug, Clone)]
pub struct ConstructionFailure {
    pub k: u32,
    pub error: SimpleError,
}

/// Rounds of local subdivision tried before a level.
const SEPARATION_ROUNDS: usize = 8;

/// Subdivides the base near ∂(D_k cut along X_{k+1}) until no tetrahedron
/// meets two regions of its boundary off N ∪ G_k, for every suffix in
/// `current`. Edges of complexes already chosen are never bisected.
fn separate_regions(ctx: &mut Context, k: u32, current: &[InscribedElement]) {
    let mut protected = SegSet::new();
    for e in current {
        for p in &e.pairs {
            protected.extend(segments_of(&p.tilde.x.tris));
        }
    }
    for _ in 0..SEPARATION_ROUNDS {
        let mut splits = SeedSplits::default();
        let mut seen = BTreeSet::new();
        for e in current {
            let (above, two_above) = (e.x(k + 1), e.x(k + 2));
            if !seen.insert((above.tris.clone(), two_above.tris.clone())) {
                continue;
            }
            let mut gn = n_graph(&above, &two_above);
            gn.extend(ctx.graph(k).iter().copied());
            let Ok(cut) = cut_complex(ctx.stratum(k), &ctx.t, &above) else { continue };
            let s = seed_splits(&cut, &ctx.t, &gn, &protected);
            splits.cone.extend(s.cone);
            splits.bisect.extend(s.bisect);
        }
        if splits.is_empty() {
            return;
        }
        *ctx = ctx.split(&splits);
    }
}

/// ζ on the triangulation of `ctx`. Each level first subdivides the base
/// locally so that the boundary seeding is consistent.
pub fn inscribed_set_on(ctx: &mut Context, cache: &mut LevelCache) -> Result<InscribedSet, ConstructionFailure> {
    let n = ctx.n();
    let mut set = InscribedSet { n, levels: vec![Vec::new(); n as usize], partial: false, diagnostics: Vec::new(), refinement: ctx.t.level };
    let mut current: Vec<InscribedElement> = vec![InscribedElement { pairs: Vec::new() }];
    for k in (1..=n).rev() {
        separate_regions(ctx, k, &current);
        *cache = LevelCache::default();
        let mut next = Vec::new();
        for a in &current {
            let above = a.x(k + 1);
            let two_above = a.x(k + 2);
            match cache.level(ctx, k, &above, &two_above) {
                LevelOutcome::Built { tilde, subs } => {
                    for s in subs.iter() {
                        if next.len() >= ctx.config.element_budget {
                            set.partial = true;
                            set.diagnostics.push(format!("level {k}: element budget {} reached", ctx.config.element_budget));
                            break;
                        }
                        let mut e = a.clone();
                        e.pairs.push(Pair { k, tilde: tilde.clone(), chosen: s.clone() });
                        next.push(e);
                    }
                }
                LevelOutcome::NotAppropriate(_) => {}
                LevelOutcome::Undecided(d) | LevelOutcome::Budget(d) => {
                    set.partial = true;
                    set.diagnostics.push(d);
                }
                LevelOutcome::Failed(error) => return Err(ConstructionFailure { k, error }),
            }
        }
        set.levels[k as usize - 1] = next.clone();
        current = next;
    }
    set.diagnostics.dedup();
    Ok(set)
}

/// ζ, refining the triangulation while a construction fails.
pub fn inscribed_set(surface: &ImmersedSurface, config: Config) -> Result<(Context, InscribedSet), PipelineError> {
    let mut ctx = Context::new(surface, config)?;
    loop {
        let mut cache = LevelCache::default();
        let base = ctx.clone();
        match inscribed_set_on(&mut ctx, &mut cache) {
            Ok(set) => return Ok((ctx, set)),
            Err(_) if base.t.level < config.max_refinement => ctx = base.refine(),
            Err(f) => {
                let n = ctx.n();
                let set = InscribedSet {
                    n,
                    levels: vec![Vec::new(); n as usize],
                    partial: true,
                    diagnostics: vec![format!("level {}: construction failed at refinement {}: {}", f.k, ctx.t.level, f.error)],
                    refinement: ctx.t.level,
                };
                return Ok((ctx, set));
            }
        }
    }
}

/// I(ζ): the elements with X_1 = ∅.
pub fn good_elements(z: &InscribedSet) -> Vec<&InscribedElement> {
    if z.n == 0 {
        return Vec::new();
    }
    z.zeta(1).iter().filter(|e| e.is_good()).collect()
}
