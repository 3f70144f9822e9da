//! Small shared helpers.

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    /// Dense labels 0..k in order of first appearance.
    pub fn labels(&mut self) -> (Vec<usize>, usize) {
        let mut map = vec![usize::MAX; self.parent.len()];
        let mut out = Vec::with_capacity(self.parent.len());
        let mut next = 0;
        for i in 0..self.parent.len() {
            let r = self.find(i);
            if map[r] == usize::MAX {
                map[r] = next;
                next += 1;
            }
            out.push(map[r]);
        }
        (out, next)
    }
}

/// Serializes big integers as decimal strings.
pub fn ser_bigints<S: serde::Serializer>(v: &[num_bigint::BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}
