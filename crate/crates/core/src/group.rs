//! Finitely presented groups: words, Tietze simplification, coset
//! enumeration and abelian invariants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Letters are `±(g + 1)` for generator `g`.
pub type Word = Vec<i32>;

pub fn letter(g: usize, inverse: bool) -> i32 {
    let l = g as i32 + 1;
    if inverse {
        -l
    } else {
        l
    }
}

pub fn gen_of(l: i32) -> usize {
    l.unsigned_abs() as usize - 1
}

pub fn inverse(w: &[i32]) -> Word {
    w.iter().rev().map(|&l| -l).collect()
}

pub fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn cyclic_reduce(w: &[i32]) -> Word {
    let mut w = free_reduce(w);
    let mut start = 0;
    let mut end = w.len();
    while end - start >= 2 && w[start] == -w[end - 1] {
        start += 1;
        end -= 1;
    }
    w.truncate(end);
    w.drain(..start);
    w
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub n_gens: usize,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn is_trivial(&self) -> bool {
        self.n_gens == 0
    }

    /// Relator exponent-sum matrix.
    pub fn relation_matrix(&self) -> Vec<Vec<BigInt>> {
        self.relators
            .iter()
            .map(|r| {
                let mut row = vec![BigInt::zero(); self.n_gens];
                for &l in r {
                    row[gen_of(l)] += if l > 0 { 1 } else { -1 };
                }
                row
            })
            .collect()
    }

    /// Abelianization as free rank plus torsion divisors.
    pub fn abelianization(&self) -> AbelianGroup {
        let (rank, divisors) = smith_invariants(self.relation_matrix(), self.n_gens);
        AbelianGroup { free_rank: self.n_gens - rank, torsion: divisors }
    }
}

/// `Z^free_rank ⊕ Z/d_1 ⊕ …`, with every `d_i > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    #[serde(serialize_with = "crate::util::ser_bigints")]
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Rank and non-unit invariant factors of an integer matrix.
pub fn smith_invariants(mut m: Vec<Vec<BigInt>>, ncols: usize) -> (usize, Vec<BigInt>) {
    let nrows = m.len();
    let mut diag: Vec<BigInt> = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, v) in row.iter().enumerate().skip(t) {
                if !v.is_zero() && best.map_or(true, |(bi, bj)| v.abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..nrows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                for j in t..ncols {
                    let s = &q * &m[t][j];
                    m[i][j] -= s;
                }
                if !m[i][t].is_zero() {
                    m.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..ncols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for row in m.iter_mut().skip(t) {
                    let s = &q * &row[t];
                    row[j] -= s;
                }
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility: fold in any entry the pivot does not divide.
            let p = m[t][t].clone();
            let bad = (t + 1..nrows).find_map(|i| (t + 1..ncols).find(|&j| !(&m[i][j] % &p).is_zero()).map(|j| (i, j)));
            match bad {
                Some((i, _)) => {
                    for j in t..ncols {
                        let v = m[i][j].clone();
                        m[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    let torsion = diag.iter().filter(|d| !d.is_one()).cloned().collect();
    (diag.len(), torsion)
}

/// Result of simplification: the new presentation plus bookkeeping.
#[derive(Debug, Clone)]
pub struct Simplified {
    pub pres: Presentation,
    /// Caller-supplied words rewritten in the new generators.
    pub tracked: Vec<Word>,
    /// New index of each surviving original generator.
    pub gen_map: Vec<Option<usize>>,
    /// Eliminated generators in order, each as a word in original numbering.
    pub eliminations: Vec<(usize, Word)>,
    pub moves: usize,
    pub exhausted: bool,
}

/// Greedy Tietze simplification: repeatedly solve the shortest relator for a
/// generator occurring once in it and substitute. `tracked` words are
/// rewritten along the way; `max_len` caps the total length of relators and
/// tracked words so substitution never blows up.
pub fn simplify(p: &Presentation, tracked: &[Word], budget: usize, max_len: usize) -> Simplified {
    let n = p.n_gens;
    let mut rels: Vec<Option<Word>> = p.relators.iter().map(|r| Some(cyclic_reduce(r))).collect();
    let mut tracked: Vec<Word> = tracked.iter().map(|w| free_reduce(w)).collect();
    let mut occ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut track_occ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut by_len: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, r) in rels.iter().enumerate() {
        let r = r.as_ref().unwrap();
        for &l in r {
            occ[gen_of(l)].insert(i);
        }
        if !r.is_empty() {
            by_len.insert((r.len(), i));
        }
    }
    for (i, w) in tracked.iter().enumerate() {
        for &l in w {
            track_occ[gen_of(l)].insert(i);
        }
    }
    let mut total: usize = rels.iter().flatten().map(Vec::len).sum::<usize>() + tracked.iter().map(Vec::len).sum::<usize>();
    let mut alive = vec![true; n];
    let mut eliminations = Vec::new();
    let mut moves = 0;
    let mut exhausted = false;
    let mut stuck: BTreeSet<usize> = BTreeSet::new();
    'outer: loop {
        let mut chosen = None;
        for &(_, ri) in &by_len {
            if stuck.contains(&ri) {
                continue;
            }
            let r = rels[ri].as_ref().unwrap();
            let mut count: BTreeMap<usize, usize> = BTreeMap::new();
            for &l in r {
                *count.entry(gen_of(l)).or_default() += 1;
            }
            let best = count
                .iter()
                .filter(|&(_, &c)| c == 1)
                .map(|(&g, _)| g)
                .min_by_key(|&g| (occ[g].len() + track_occ[g].len(), g));
            match best {
                Some(g) => {
                    chosen = Some((ri, g));
                    break;
                }
                None => {
                    stuck.insert(ri);
                }
            }
        }
        let Some((ri, g)) = chosen else { break };
        if moves >= budget {
            exhausted = true;
            break;
        }
        let r = rels[ri].clone().unwrap();
        let pos = r.iter().position(|&l| gen_of(l) == g).unwrap();
        let (u, v) = (&r[..pos], &r[pos + 1..]);
        // r = u g^e v = 1 gives g^e = u^-1 v^-1.
        let mut ge = inverse(u);
        ge.extend(inverse(v));
        let def = if r[pos] > 0 { free_reduce(&ge) } else { inverse(&ge) };
        let def_inv = inverse(&def);
        let subst = |w: &[i32]| -> Word {
            let mut out = Vec::with_capacity(w.len());
            for &l in w {
                if gen_of(l) == g {
                    out.extend_from_slice(if l > 0 { &def } else { &def_inv });
                } else {
                    out.push(l);
                }
            }
            out
        };
        // Length guard.
        let mut growth: isize = 0;
        for &i in occ[g].iter().filter(|&&i| i != ri) {
            let w = rels[i].as_ref().unwrap();
            let k = w.iter().filter(|&&l| gen_of(l) == g).count();
            growth += k as isize * (def.len() as isize - 1);
        }
        for &i in &track_occ[g] {
            let k = tracked[i].iter().filter(|&&l| gen_of(l) == g).count();
            growth += k as isize * (def.len() as isize - 1);
        }
        if total as isize + growth > max_len as isize {
            stuck.insert(ri);
            continue 'outer;
        }
        moves += 1;
        alive[g] = false;
        eliminations.push((g, def.clone()));
        by_len.remove(&(r.len(), ri));
        for &l in &r {
            occ[gen_of(l)].remove(&ri);
        }
        total -= r.len();
        rels[ri] = None;
        let targets: Vec<usize> = occ[g].iter().copied().collect();
        for i in targets {
            let old = rels[i].take().unwrap();
            by_len.remove(&(old.len(), i));
            for &l in &old {
                occ[gen_of(l)].remove(&i);
            }
            let new = cyclic_reduce(&subst(&old));
            total = total - old.len() + new.len();
            for &l in &new {
                occ[gen_of(l)].insert(i);
            }
            if !new.is_empty() {
                by_len.insert((new.len(), i));
            }
            stuck.remove(&i);
            rels[i] = Some(new);
        }
        let targets: Vec<usize> = track_occ[g].iter().copied().collect();
        for i in targets {
            for &l in &tracked[i] {
                track_occ[gen_of(l)].remove(&i);
            }
            let new = free_reduce(&subst(&tracked[i]));
            total = total - tracked[i].len() + new.len();
            for &l in &new {
                track_occ[gen_of(l)].insert(i);
            }
            tracked[i] = new;
        }
    }
    let mut gen_map = vec![None; n];
    let mut k = 0;
    for g in 0..n {
        if alive[g] {
            gen_map[g] = Some(k);
            k += 1;
        }
    }
    let rename = |w: &[i32]| -> Word {
        w.iter().map(|&l| letter(gen_map[gen_of(l)].unwrap(), l < 0)).collect()
    };
    let mut relators: Vec<Word> = rels.iter().flatten().filter(|r| !r.is_empty()).map(|r| rename(r)).collect();
    relators.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    relators.dedup();
    let tracked = tracked.iter().map(|w| rename(w)).collect();
    Simplified { pres: Presentation { n_gens: k, relators }, tracked, gen_map, eliminations, moves, exhausted }
}

/// A complete coset table: `table[c][2g]` is `c·g`, `table[c][2g+1]` is `c·g⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    pub n_gens: usize,
    pub table: Vec<Vec<u32>>,
}

fn col(l: i32) -> usize {
    2 * gen_of(l) + usize::from(l < 0)
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.table.len()
    }

    pub fn act_letter(&self, c: u32, l: i32) -> u32 {
        self.table[c as usize][col(l)]
    }

    pub fn act(&self, c: u32, w: &[i32]) -> u32 {
        w.iter().fold(c, |c, &l| self.act_letter(c, l))
    }

    /// Permutation of every original generator of a simplified presentation.
    /// Eliminated generators are evaluated in reverse elimination order, so
    /// their definitions only involve generators already known.
    pub fn original_action(&self, s: &Simplified) -> Vec<Vec<u32>> {
        let n = s.gen_map.len();
        let idx = self.index();
        let mut perm: Vec<Option<Vec<u32>>> = vec![None; n];
        let mut inv: Vec<Option<Vec<u32>>> = vec![None; n];
        for g in 0..n {
            if let Some(k) = s.gen_map[g] {
                perm[g] = Some((0..idx as u32).map(|c| self.table[c as usize][2 * k]).collect());
            }
        }
        for (g, def) in s.eliminations.iter().rev() {
            let p: Vec<u32> = (0..idx as u32)
                .map(|c| {
                    def.iter().fold(c, |c, &l| {
                        let h = gen_of(l);
                        if l > 0 {
                            perm[h].as_ref().unwrap()[c as usize]
                        } else {
                            if inv[h].is_none() {
                                let mut q = vec![0u32; idx];
                                for (a, &b) in perm[h].as_ref().unwrap().iter().enumerate() {
                                    q[b as usize] = a as u32;
                                }
                                inv[h] = Some(q);
                            }
                            inv[h].as_ref().unwrap()[c as usize]
                        }
                    })
                })
                .collect();
            perm[*g] = Some(p);
        }
        perm.into_iter().map(Option::unwrap).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    Complete(CosetTable),
    /// The coset limit was reached before the table closed.
    Incomplete { defined: usize },
}

const UNDEF: u32 = u32::MAX;

struct Enumerator<'a> {
    rels: &'a [Word],
    ncols: usize,
    table: Vec<Vec<u32>>,
    parent: Vec<u32>,
    limit: usize,
}

struct Overflow;

impl Enumerator<'_> {
    fn define(&mut self, a: u32, x: usize) -> Result<(), Overflow> {
        if self.table.len() >= self.limit {
            return Err(Overflow);
        }
        let b = self.table.len() as u32;
        self.table.push(vec![UNDEF; self.ncols]);
        self.parent.push(b);
        self.table[a as usize][x] = b;
        self.table[b as usize][x ^ 1] = a;
        Ok(())
    }

    fn rep(&mut self, k: u32) -> u32 {
        let mut l = k;
        while self.parent[l as usize] != l {
            l = self.parent[l as usize];
        }
        let mut k = k;
        while self.parent[k as usize] != l {
            let next = self.parent[k as usize];
            self.parent[k as usize] = l;
            k = next;
        }
        l
    }

    fn merge(&mut self, k: u32, l: u32, q: &mut Vec<u32>) {
        let (a, b) = (self.rep(k), self.rep(l));
        if a != b {
            let (m, n) = (a.min(b), a.max(b));
            self.parent[n as usize] = m;
            q.push(n);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        let mut q = Vec::new();
        self.merge(a, b, &mut q);
        let mut i = 0;
        while i < q.len() {
            let g = q[i];
            i += 1;
            for x in 0..self.ncols {
                let d = self.table[g as usize][x];
                if d == UNDEF {
                    continue;
                }
                self.table[d as usize][x ^ 1] = UNDEF;
                let m = self.rep(g);
                let n = self.rep(d);
                if self.table[m as usize][x] != UNDEF {
                    let t = self.table[m as usize][x];
                    self.merge(n, t, &mut q);
                } else if self.table[n as usize][x ^ 1] != UNDEF {
                    let t = self.table[n as usize][x ^ 1];
                    self.merge(m, t, &mut q);
                } else {
                    self.table[m as usize][x] = n;
                    self.table[n as usize][x ^ 1] = m;
                }
            }
        }
    }

    fn scan_and_fill(&mut self, a: u32, w: &[i32]) -> Result<(), Overflow> {
        if w.is_empty() {
            return Ok(());
        }
        let w: Vec<usize> = w.iter().map(|&l| col(l)).collect();
        let (mut f, mut b) = (a, a);
        let mut i = 0usize;
        let mut j = w.len() as isize - 1;
        loop {
            while i as isize <= j && self.table[f as usize][w[i]] != UNDEF {
                f = self.table[f as usize][w[i]];
                i += 1;
            }
            if i as isize > j {
                if f != a {
                    self.coincidence(f, a);
                }
                return Ok(());
            }
            while j >= i as isize && self.table[b as usize][w[j as usize] ^ 1] != UNDEF {
                b = self.table[b as usize][w[j as usize] ^ 1];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            } else if j == i as isize {
                self.table[f as usize][w[i]] = b;
                self.table[b as usize][w[i] ^ 1] = f;
                return Ok(());
            } else {
                self.define(f, w[i])?;
            }
        }
    }

    fn run(&mut self, h: &[Word]) -> Result<(), Overflow> {
        for w in h {
            self.scan_and_fill(0, w)?;
        }
        let mut a = 0u32;
        while (a as usize) < self.table.len() {
            for r in self.rels {
                if self.parent[a as usize] != a {
                    break;
                }
                self.scan_and_fill(a, r)?;
            }
            if self.parent[a as usize] == a {
                for x in 0..self.ncols {
                    if self.table[a as usize][x] == UNDEF {
                        self.define(a, x)?;
                    }
                }
            }
            a += 1;
        }
        Ok(())
    }
}

/// Todd–Coxeter enumeration (HLT strategy) of the cosets of `⟨h⟩`.
pub fn enumerate_cosets(p: &Presentation, h: &[Word], limit: usize) -> Enumeration {
    let ncols = 2 * p.n_gens;
    let rels: Vec<Word> = p.relators.iter().map(|r| free_reduce(r)).filter(|r| !r.is_empty()).collect();
    let mut e = Enumerator { rels: &rels, ncols, table: vec![vec![UNDEF; ncols]], parent: vec![0], limit: limit.max(1) };
    let h: Vec<Word> = h.iter().map(|w| free_reduce(w)).collect();
    if e.run(&h).is_err() {
        return Enumeration::Incomplete { defined: e.table.len() };
    }
    let live: Vec<u32> = (0..e.table.len() as u32).filter(|&c| e.parent[c as usize] == c).collect();
    let mut renum = vec![UNDEF; e.table.len()];
    for (i, &c) in live.iter().enumerate() {
        renum[c as usize] = i as u32;
    }
    let mut table = Vec::with_capacity(live.len());
    for &c in &live {
        let row: Vec<u32> = (0..ncols)
            .map(|x| {
                let d = e.table[c as usize][x];
                let d = e.rep(d);
                renum[d as usize]
            })
            .collect();
        table.push(row);
    }
    Enumeration::Complete(CosetTable { n_gens: p.n_gens, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: Vec<Vec<i64>>) -> Vec<Vec<BigInt>> {
        rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
    }

    #[test]
    fn smith_of_small_matrices() {
        assert_eq!(smith_invariants(big(vec![vec![2, 4], vec![6, 8]]), 2), (2, vec![2.into(), 4.into()]));
        assert_eq!(smith_invariants(big(vec![vec![2, 0], vec![0, 3]]), 2), (2, vec![6.into()]));
        assert_eq!(smith_invariants(big(vec![vec![0, 0]]), 2), (0, vec![]));
    }

    #[test]
    fn abelianization_of_standard_groups() {
        // Klein bottle group abab^-1.
        let p = Presentation { n_gens: 2, relators: vec![vec![1, 2, 1, -2]] };
        let a = p.abelianization();
        assert_eq!((a.free_rank, a.torsion.clone()), (1, vec![2.into()]));
        assert_eq!(a.to_string(), "Z + Z/2");
    }

    #[test]
    fn cosets_of_symmetric_group() {
        // S3 = <a, b | a^2, b^3, (ab)^2>.
        let p = Presentation { n_gens: 2, relators: vec![vec![1, 1], vec![2, 2, 2], vec![1, 2, 1, 2]] };
        let Enumeration::Complete(t) = enumerate_cosets(&p, &[], 100) else { panic!() };
        assert_eq!(t.index(), 6);
        let Enumeration::Complete(t) = enumerate_cosets(&p, &[vec![1]], 100) else { panic!() };
        assert_eq!(t.index(), 3);
    }

    #[test]
    fn infinite_index_is_incomplete() {
        let p = Presentation { n_gens: 1, relators: vec![] };
        assert!(matches!(enumerate_cosets(&p, &[], 64), Enumeration::Incomplete { .. }));
        let Enumeration::Complete(t) = enumerate_cosets(&p, &[vec![1, 1]], 64) else { panic!() };
        assert_eq!(t.index(), 2);
    }

    #[test]
    fn simplification_tracks_words() {
        // <a, b, c | ab^-1, bc^-1> is Z; the word ac stays nontrivial.
        let p = Presentation { n_gens: 3, relators: vec![vec![1, -2], vec![2, -3]] };
        let s = simplify(&p, &[vec![1, 3]], 100, 1000);
        assert_eq!(s.pres.n_gens, 1);
        assert!(s.pres.relators.is_empty());
        assert_eq!(s.tracked[0].len(), 2);
        let Enumeration::Complete(t) = enumerate_cosets(&s.pres, &[vec![1, 1, 1]], 100) else { panic!() };
        let perms = t.original_action(&s);
        assert_eq!(perms.len(), 3);
        assert_eq!(perms[0], perms[1]);
        assert_eq!(perms[1], perms[2]);
    }
}
