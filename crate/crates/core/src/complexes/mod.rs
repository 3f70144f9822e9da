//! Two-complexes inside tetrahedral 3-manifolds: boundary regions,
//! fundamental groups, appropriateness, simple complexes and their good
//! subcomplexes.

pub mod appropriate;
pub mod boundary;
pub mod good;
pub mod pi1;
pub mod relative;
pub mod simple;

use crate::triangulation::Seg;
use std::collections::BTreeSet;

pub use appropriate::{build_covering, is_appropriate, Appropriateness, Covering, CoveringResult};
pub use boundary::Boundary;
pub use good::{good_subcomplexes, is_good_2complex, GoodError, TwoComplex};
pub use pi1::{fundamental_group, DualPresentation, FundamentalGroup};
pub use relative::{construct_relative_simple_complex, cut_along, is_appropriate_triple, CutComponent, RelativeError, TripleVerdict};
pub use simple::{construct_simple_complex, SimpleComplex, SimpleError};

/// A graph as a set of base segments, each stored with ascending ends.
pub type SegSet = BTreeSet<Seg>;

pub fn seg(a: u32, b: u32) -> Seg {
    [a.min(b), a.max(b)]
}

/// Budgets for the group-theoretic and combinatorial searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub coset_limit: usize,
    pub tietze_budget: usize,
    pub subset_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { coset_limit: 10_000, tietze_budget: 10_000, subset_budget: 100_000 }
    }
}
