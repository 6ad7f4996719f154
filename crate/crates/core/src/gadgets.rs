//! Explicit list assignments that defeat equitable colorability, one family
//! per negative construction, plus a registry so callers can iterate them.

use itertools::Itertools;
use serde_json::json;

use crate::error::{Error, Result};
use crate::model::{Color, ListAssignment, StarForest};
use crate::solver::solve;

/// A concrete gadget: a forest, a list size and the lists themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub family: &'static str,
    pub forest: StarForest,
    pub k: usize,
    pub lists: ListAssignment,
}

impl Gadget {
    /// Assignment JSON with the family name and parameters up front.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = self.lists.to_json_value();
        v["gadget"] = json!(self.family);
        v["forest"] = json!(self.forest);
        v["k"] = json!(self.k);
        v
    }
}

fn colors(raw: &[u32]) -> Vec<Color> {
    raw.iter().map(|&c| Color(c)).collect()
}

/// Every vertex gets `{1..k}`.
pub fn constant_assignment(forest: &StarForest, k: usize) -> Result<ListAssignment> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let all: Vec<Color> = (1..=k as u32).map(Color).collect();
    ListAssignment::constant(forest, &all)
}

/// Leaf lists of the star carrying the mixed pairs: two leaves each on
/// {1,3}, {1,4}, {2,3}, {2,4}, the rest and the center on {3,4}.
fn mixed_star_lists(m: usize) -> Vec<Vec<Color>> {
    let mut lists = vec![colors(&[3, 4])];
    for pair in [[1, 3], [1, 4], [2, 3], [2, 4]] {
        lists.push(colors(&pair));
        lists.push(colors(&pair));
    }
    lists.resize(m + 1, colors(&[3, 4]));
    lists
}

/// Two near-equal stars with at least 16 leaves in total: the first star
/// gets the mixed pairs, the second the constant `{1,2}`.
pub fn lemma_add_gadget(m1: usize, m2: usize) -> Result<Gadget> {
    if !(8 <= m1 && m1 <= m2 && m2 <= m1 + 1) {
        return Err(Error::InvalidParameters(format!(
            "need 8 <= m1 <= m2 <= m1 + 1, got ({m1}, {m2})"
        )));
    }
    let forest = StarForest::new(vec![m1, m2])?;
    let mut lists = mixed_star_lists(m1);
    lists.extend(std::iter::repeat_n(colors(&[1, 2]), m2 + 1));
    Ok(Gadget {
        family: "two-star-mixed-pairs",
        lists: ListAssignment::new(&forest, lists)?,
        forest,
        k: 2,
    })
}

/// `n` copies of `K_{1,m}`, `n` odd, all lists `{1,2}`.
pub fn same_stars_odd_gadget(n: usize, m: usize) -> Result<Gadget> {
    if n < 3 || n.is_multiple_of(2) || m < 3 {
        return Err(Error::InvalidParameters(format!(
            "need odd n >= 3 and m >= 3, got n = {n}, m = {m}"
        )));
    }
    let forest = StarForest::new(vec![m; n])?;
    Ok(Gadget {
        family: "equal-stars-odd",
        lists: constant_assignment(&forest, 2)?,
        forest,
        k: 2,
    })
}

/// `n` copies of `K_{1,m}`, `n` even: the first star gets the mixed pairs,
/// the others `{1,2}`.
pub fn same_stars_even_gadget(n: usize, m: usize) -> Result<Gadget> {
    if n < 2 || n % 2 == 1 || m < 8 {
        return Err(Error::InvalidParameters(format!(
            "need even n >= 2 and m >= 8, got n = {n}, m = {m}"
        )));
    }
    let forest = StarForest::new(vec![m; n])?;
    let mut lists = mixed_star_lists(m);
    lists.extend(std::iter::repeat_n(colors(&[1, 2]), (n - 1) * (m + 1)));
    Ok(Gadget {
        family: "equal-stars-even",
        lists: ListAssignment::new(&forest, lists)?,
        forest,
        k: 2,
    })
}

/// Leaf counts `((k-1)(k^3-k+2), k^3)` of the subset-block gadget.
pub fn tconstruct_forest(k: usize) -> Result<StarForest> {
    if k < 2 {
        return Err(Error::InvalidParameters(format!("need k >= 2, got {k}")));
    }
    let cube = k * k * k;
    StarForest::new(vec![(k - 1) * (cube - k + 2), cube])
}

/// First star constant `{1..k}`; second center `{k+1..2k}`; the second
/// star's leaves split into `k^2` blocks of `k`, block `(i, j)` (i-major)
/// holding `{k+i}` plus the `j`-th `(k-1)`-subset of `{1..k}` in
/// lexicographic order.
pub fn tconstruct_gadget(k: usize) -> Result<Gadget> {
    let forest = tconstruct_forest(k)?;
    let kk = k as u32;
    let all: Vec<Color> = (1..=kk).map(Color).collect();
    let mut lists = vec![all; forest.leaves(0) + 1];
    lists.push((kk + 1..=2 * kk).map(Color).collect());
    let subsets: Vec<Vec<u32>> = (1..=kk).combinations(k - 1).collect();
    for i in 1..=kk {
        for subset in &subsets {
            let mut block = subset.clone();
            block.push(kk + i);
            for _ in 0..k {
                lists.push(colors(&block));
            }
        }
    }
    Ok(Gadget {
        family: "subset-blocks",
        lists: ListAssignment::new(&forest, lists)?,
        forest,
        k,
    })
}

/// True iff the solver finds no equitable coloring for the gadget.
pub fn verify_gadget(gadget: &Gadget) -> Result<bool> {
    Ok(!solve(&gadget.forest, &gadget.lists, gadget.k)?.colorable)
}

/// A named gadget family: when it applies and how to build it.
pub struct GadgetFamily {
    pub name: &'static str,
    pub summary: &'static str,
    pub applies: fn(&StarForest, usize) -> bool,
    pub build: fn(&StarForest, usize) -> Result<Gadget>,
}

fn equal_stars(forest: &StarForest) -> Option<(usize, usize)> {
    let m = forest.stars()[0];
    forest
        .stars()
        .iter()
        .all(|&x| x == m)
        .then_some((forest.component_count(), m))
}

pub fn registry() -> Vec<GadgetFamily> {
    vec![
        GadgetFamily {
            name: "constant",
            summary: "every vertex gets {1..k}",
            applies: |_, k| k >= 1,
            build: |f, k| {
                Ok(Gadget {
                    family: "constant",
                    forest: f.clone(),
                    k,
                    lists: constant_assignment(f, k)?,
                })
            },
        },
        GadgetFamily {
            name: "two-star-mixed-pairs",
            summary: "two stars, 8 <= m1 <= m2 <= m1+1, k = 2",
            applies: |f, k| {
                k == 2 && f.component_count() == 2 && {
                    let (a, b) = (f.stars()[0], f.stars()[1]);
                    8 <= a && a <= b && b <= a + 1
                }
            },
            build: |f, _| lemma_add_gadget(f.stars()[0], f.stars()[1]),
        },
        GadgetFamily {
            name: "equal-stars-odd",
            summary: "odd number n >= 3 of equal stars with m >= 3 leaves, k = 2",
            applies: |f, k| {
                k == 2 && equal_stars(f).is_some_and(|(n, m)| n >= 3 && n % 2 == 1 && m >= 3)
            },
            build: |f, _| {
                let (n, m) = equal_stars(f).expect("checked by applies");
                same_stars_odd_gadget(n, m)
            },
        },
        GadgetFamily {
            name: "equal-stars-even",
            summary: "even number of equal stars with m >= 8 leaves, k = 2",
            applies: |f, k| k == 2 && equal_stars(f).is_some_and(|(n, m)| n % 2 == 0 && m >= 8),
            build: |f, _| {
                let (n, m) = equal_stars(f).expect("checked by applies");
                same_stars_even_gadget(n, m)
            },
        },
        GadgetFamily {
            name: "subset-blocks",
            summary: "stars ((k-1)(k^3-k+2), k^3) for k >= 2",
            applies: |f, k| k >= 2 && tconstruct_forest(k).is_ok_and(|t| t == *f),
            build: |_, k| tconstruct_gadget(k),
        },
    ]
}

pub fn family(name: &str) -> Option<GadgetFamily> {
    registry().into_iter().find(|g| g.name == name)
}
