//! Closed-form choosability conditions for stars and pairs of stars, and a
//! status oracle combining them.
//!
//! Two-star predicates take leaf counts in either order and sort them first.
//! Arithmetic is signed so bounds like `rho(k-1) - 1` behave at `k = 1`.

use std::fmt;

use serde::Serialize;

use crate::model::StarForest;

fn sorted(m1: usize, m2: usize) -> (i64, i64) {
    (m1.min(m2) as i64, m1.max(m2) as i64)
}

/// `ceil((m1 + m2 + 2) / k)`, the cap for two stars.
pub fn two_star_rho(m1: usize, m2: usize, k: usize) -> i64 {
    assert!(k > 0, "k must be positive");
    ((m1 + m2 + 2).div_ceil(k)) as i64
}

/// `K_{1,m}` is equitably k-choosable iff `m <= ceil((m+1)/k) (k-1)`.
pub fn single_star_choosable(m: usize, k: usize) -> bool {
    assert!(k > 0, "k must be positive");
    m <= (m + 1).div_ceil(k) * (k - 1)
}

/// Two stars with at least one leaf each are equitably 2-choosable iff
/// their sizes differ by at most one and total at most 15.
pub fn two_star_2choosable(m1: usize, m2: usize) -> bool {
    let (a, b) = sorted(m1, m2);
    b - a <= 1 && a + b <= 15
}

/// `n >= 2` copies of `K_{1,m}`, `m >= 1`: equitably 2-choosable iff
/// `m <= 2` for odd `n` and `m <= 7` for even `n`.
pub fn n_same_star_2choosable(n: usize, m: usize) -> bool {
    if n % 2 == 1 {
        m <= 2
    } else {
        m <= 7
    }
}

/// Necessary condition for two stars: `m2 <= rho(k-1) - 1`.
pub fn lemma_only2_necessary(m1: usize, m2: usize, k: usize) -> bool {
    let (_, b) = sorted(m1, m2);
    b < two_star_rho(m1, m2, k) * (k as i64 - 1)
}

/// The sharper form `m2 <= rho(k-1) - 1 - max(0, m1 - rho + 1)`. Equivalent
/// to [`lemma_only2_necessary`] as a filter.
pub fn lemma_only_necessary(m1: usize, m2: usize, k: usize) -> bool {
    let (a, b) = sorted(m1, m2);
    let rho = two_star_rho(m1, m2, k);
    b <= rho * (k as i64 - 1) - 1 - 0.max(a - rho + 1)
}

/// Both inequalities `m2 <= rho(k-1) - 1` and `m1 + m2 <= 15 + rho(k-2)`,
/// which together guarantee equitable k-choosability of two stars.
pub fn thm_main_sufficient(m1: usize, m2: usize, k: usize) -> bool {
    let (a, b) = sorted(m1, m2);
    let rho = two_star_rho(m1, m2, k);
    a >= 1 && lemma_only2_necessary(m1, m2, k) && a + b <= 15 + rho * (k as i64 - 2)
}

/// Every forest is equitably k-choosable once `k >= 1 + Delta/2`.
pub fn forest_bound_sufficient(forest: &StarForest, k: usize) -> bool {
    2 * (k as i64 - 1) >= forest.max_leaves() as i64
}

/// Two stars differing by two or more leaves are not equitably 2-choosable.
pub fn unbalanced_pair_not_2choosable(m1: usize, m2: usize) -> bool {
    let (a, b) = sorted(m1, m2);
    a >= 1 && b - a >= 2
}

/// Two stars with 16 or more leaves are not equitably 2-choosable.
pub fn large_pair_not_2choosable(m1: usize, m2: usize) -> bool {
    let (a, b) = sorted(m1, m2);
    a >= 1 && a + b >= 16
}

/// Leaf counts `{(k-1)(k^3-k+2), k^3}` for which the subset-block lists defeat
/// equitable k-colorability.
pub fn is_subset_block_pair(m1: usize, m2: usize, k: usize) -> bool {
    if k < 2 {
        return false;
    }
    let cube = k * k * k;
    let big = (k - 1) * (cube - k + 2);
    sorted(m1, m2) == sorted(big, cube)
}

/// `K_{1,8} + K_{1,9(k-1)-1}` for `k >= 3`, equitably k-choosable although
/// outside [`thm_main_sufficient`].
pub fn is_eight_leaf_pair(m1: usize, m2: usize, k: usize) -> bool {
    k >= 3 && sorted(m1, m2) == (8, 9 * (k as i64 - 1) - 1)
}

/// The condition a verdict rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    SingleStarFormula,
    TwoStarsK2Characterization,
    EqualStarsK2Characterization,
    LargeStarNecessaryBound,
    UnbalancedPairK2,
    SumAtLeast16K2,
    SubsetBlockFamily,
    TwoStarSufficientBounds,
    ForestDegreeBound,
    EightLeafFamily,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::SingleStarFormula,
        Rule::TwoStarsK2Characterization,
        Rule::EqualStarsK2Characterization,
        Rule::LargeStarNecessaryBound,
        Rule::UnbalancedPairK2,
        Rule::SumAtLeast16K2,
        Rule::SubsetBlockFamily,
        Rule::TwoStarSufficientBounds,
        Rule::ForestDegreeBound,
        Rule::EightLeafFamily,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Rule::SingleStarFormula => "single-star-formula",
            Rule::TwoStarsK2Characterization => "two-stars-k2-characterization",
            Rule::EqualStarsK2Characterization => "equal-stars-k2-characterization",
            Rule::LargeStarNecessaryBound => "large-star-necessary-bound",
            Rule::UnbalancedPairK2 => "unbalanced-pair-k2",
            Rule::SumAtLeast16K2 => "sum-at-least-16-k2",
            Rule::SubsetBlockFamily => "subset-block-family",
            Rule::TwoStarSufficientBounds => "two-star-sufficient-bounds",
            Rule::ForestDegreeBound => "forest-degree-bound",
            Rule::EightLeafFamily => "eight-leaf-family",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "rule", rename_all = "kebab-case")]
pub enum Status {
    ProvenChoosable(Rule),
    ProvenNotChoosable(Rule),
    Unknown,
}

impl Status {
    pub fn tag(&self) -> &'static str {
        match self {
            Status::ProvenChoosable(_) => "choosable",
            Status::ProvenNotChoosable(_) => "not-choosable",
            Status::Unknown => "unknown",
        }
    }

    pub fn rule(&self) -> Option<Rule> {
        match *self {
            Status::ProvenChoosable(r) | Status::ProvenNotChoosable(r) => Some(r),
            Status::Unknown => None,
        }
    }

    /// `Some(true)` if proven choosable, `Some(false)` if proven not.
    pub fn decided(&self) -> Option<bool> {
        match self {
            Status::ProvenChoosable(_) => Some(true),
            Status::ProvenNotChoosable(_) => Some(false),
            Status::Unknown => None,
        }
    }
}

/// Every rule whose hypotheses hold, with the verdict it gives, in priority
/// order: exact characterizations, then negative filters, then positive ones.
pub fn fired_rules(forest: &StarForest, k: usize) -> Vec<(Rule, bool)> {
    assert!(k > 0, "k must be positive");
    let stars = forest.stars();
    let mut out = Vec::new();
    if let [m] = *stars {
        out.push((Rule::SingleStarFormula, single_star_choosable(m, k)));
    }
    let pair = match *stars {
        [a, b] if a.min(b) >= 1 => Some((a, b)),
        _ => None,
    };
    if let (Some((a, b)), 2) = (pair, k) {
        out.push((Rule::TwoStarsK2Characterization, two_star_2choosable(a, b)));
    }
    if k == 2 && stars.len() >= 2 && stars[0] >= 1 && stars.iter().all(|&m| m == stars[0]) {
        out.push((Rule::EqualStarsK2Characterization, n_same_star_2choosable(stars.len(), stars[0])));
    }
    if let Some((a, b)) = pair {
        if !lemma_only2_necessary(a, b, k) {
            out.push((Rule::LargeStarNecessaryBound, false));
        }
        if k == 2 && unbalanced_pair_not_2choosable(a, b) {
            out.push((Rule::UnbalancedPairK2, false));
        }
        if k == 2 && large_pair_not_2choosable(a, b) {
            out.push((Rule::SumAtLeast16K2, false));
        }
        if is_subset_block_pair(a, b, k) {
            out.push((Rule::SubsetBlockFamily, false));
        }
        if thm_main_sufficient(a, b, k) {
            out.push((Rule::TwoStarSufficientBounds, true));
        }
    }
    if forest_bound_sufficient(forest, k) {
        out.push((Rule::ForestDegreeBound, true));
    }
    if let Some((a, b)) = pair {
        if is_eight_leaf_pair(a, b, k) {
            out.push((Rule::EightLeafFamily, true));
        }
    }
    out
}

/// The first rule that fires, or `Unknown`.
pub fn status(forest: &StarForest, k: usize) -> Status {
    match fired_rules(forest, k).first() {
        Some(&(rule, true)) => Status::ProvenChoosable(rule),
        Some(&(rule, false)) => Status::ProvenNotChoosable(rule),
        None => Status::Unknown,
    }
}

/// Rules that fire with opposite verdicts on the same input.
pub fn conflicts(forest: &StarForest, k: usize) -> Option<(Rule, Rule)> {
    let fired = fired_rules(forest, k);
    let pos = fired.iter().find(|r| r.1)?;
    let neg = fired.iter().find(|r| !r.1)?;
    Some((pos.0, neg.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forest(stars: &[usize]) -> StarForest {
        StarForest::new(stars.to_vec()).unwrap()
    }

    #[test]
    fn single_star_examples() {
        assert!(single_star_choosable(6, 3));
        assert!(!single_star_choosable(3, 2));
        assert!(single_star_choosable(2, 2));
        assert!(single_star_choosable(1, 3));
        assert!(!single_star_choosable(1, 1));
        assert!(single_star_choosable(0, 1));
    }

    #[test]
    fn two_star_examples() {
        assert!(two_star_2choosable(7, 8));
        assert!(two_star_2choosable(8, 7));
        assert!(!two_star_2choosable(8, 8));
        assert!(!two_star_2choosable(2, 4));
        let count = (1..=20).flat_map(|a| (a..=20).map(move |b| (a, b))).filter(|&(a, b)| two_star_2choosable(a, b)).count();
        assert_eq!(count, 14);
    }

    #[test]
    fn equal_star_examples() {
        assert!(n_same_star_2choosable(3, 2));
        assert!(!n_same_star_2choosable(3, 3));
        assert!(n_same_star_2choosable(2, 7));
        assert!(!n_same_star_2choosable(4, 8));
    }

    #[test]
    fn necessary_bound_examples() {
        assert!(!lemma_only2_necessary(6, 1, 3));
        assert!(lemma_only2_necessary(52, 27, 3));
        assert!(lemma_only2_necessary(1, 1, 2));
        assert!(!lemma_only2_necessary(1, 1, 1));
    }

    #[test]
    fn sufficient_bound_examples() {
        assert!(thm_main_sufficient(8, 8, 3));
        assert!(thm_main_sufficient(5, 9, 3));
        for k in 2..=6 {
            let cube = k * k * k;
            assert!(!thm_main_sufficient((k - 1) * (cube - k + 2), cube, k), "k={k}");
        }
        assert!(!thm_main_sufficient(8, 17, 3));
        assert!(!thm_main_sufficient(0, 3, 3));
    }

    #[test]
    fn forest_bound_examples() {
        assert!(forest_bound_sufficient(&forest(&[6, 1]), 4));
        assert!(!forest_bound_sufficient(&forest(&[6, 1]), 3));
        assert!(forest_bound_sufficient(&forest(&[2]), 2));
    }

    #[test]
    fn status_examples() {
        assert_eq!(status(&forest(&[8, 17]), 3), Status::ProvenChoosable(Rule::EightLeafFamily));
        assert_eq!(status(&forest(&[27, 52]), 3), Status::ProvenNotChoosable(Rule::SubsetBlockFamily));
        assert_eq!(status(&forest(&[5, 9]), 3), Status::ProvenChoosable(Rule::TwoStarSufficientBounds));
        assert_eq!(status(&forest(&[6, 1]), 3), Status::ProvenNotChoosable(Rule::LargeStarNecessaryBound));
        assert_eq!(status(&forest(&[3]), 2), Status::ProvenNotChoosable(Rule::SingleStarFormula));
        assert_eq!(status(&forest(&[8, 8]), 2), Status::ProvenNotChoosable(Rule::TwoStarsK2Characterization));
        assert_eq!(status(&forest(&[3, 3, 3]), 2), Status::ProvenNotChoosable(Rule::EqualStarsK2Characterization));
        assert_eq!(status(&forest(&[1, 2, 3]), 2), Status::Unknown);
        assert_eq!(status(&forest(&[30, 40]), 3).tag(), "unknown");
    }

    #[test]
    fn status_serializes_with_tags() {
        let s = serde_json::to_value(status(&forest(&[8, 17]), 3)).unwrap();
        assert_eq!(s, serde_json::json!({"status": "proven-choosable", "rule": "eight-leaf-family"}));
    }

    #[test]
    fn sharper_bound_agrees() {
        for k in 1..=6 {
            for a in 1..=60 {
                for b in a..=60 {
                    assert_eq!(lemma_only2_necessary(a, b, k), lemma_only_necessary(a, b, k), "{a} {b} {k}");
                }
            }
        }
    }
}
