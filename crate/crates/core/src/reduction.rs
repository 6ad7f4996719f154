//! PARTITION to equitable 2-coloring of stars, and back.
//!
//! A proper 2-coloring of a star forest is fixed by one bit per star: `true`
//! puts color 1 on the center, `false` puts it on the leaves.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Color, Coloring, StarForest};

/// Positive integers to split into two equal-sum parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionInstance {
    values: Vec<u64>,
}

impl PartitionInstance {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameters("a partition instance needs at least one value".into()));
        }
        if values.contains(&0) {
            return Err(Error::InvalidParameters("partition values must be positive".into()));
        }
        Ok(PartitionInstance { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }
}

impl FromStr for PartitionInstance {
    type Err = Error;

    /// Comma-separated integers, e.g. `1,1,2`.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidParameters(format!("not a positive integer: {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PartitionInstance::new(values)
    }
}

/// Odd totals map to `K_{1,3}`, which has no equitable 2-coloring; even
/// totals map to stars with `m_i + 1` leaves.
pub fn reduce_partition(instance: &PartitionInstance) -> Result<StarForest> {
    if instance.total() % 2 == 1 {
        return StarForest::new(vec![3]);
    }
    let stars = instance
        .values
        .iter()
        .map(|&m| usize::try_from(m + 1).map_err(|_| Error::InvalidParameters(format!("value {m} too large"))))
        .collect::<Result<Vec<_>>>()?;
    StarForest::new(stars)
}

/// One bit per star; `true` means the center takes color 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation(pub Vec<bool>);

impl Orientation {
    /// Vertices that take color 1.
    pub fn color_one_count(&self, forest: &StarForest) -> usize {
        self.0
            .iter()
            .zip(forest.stars())
            .map(|(&center_one, &m)| if center_one { 1 } else { m })
            .sum()
    }

    /// Color classes differ in size by at most one.
    pub fn is_equitable(&self, forest: &StarForest) -> bool {
        self.0.len() == forest.component_count() && {
            let ones = self.color_one_count(forest);
            ones.abs_diff(forest.vertex_count() - ones) <= 1
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(Error::InvalidParameters(format!("orientation bits are 0/1, got {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Orientation)
    }
}

impl Serialize for Orientation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An orientation whose 2-coloring is equitable, or `None`.
///
/// Subset-sum over the number of color-1 vertices: star `i` contributes 1
/// (center) or `m_i` (leaves). The lexicographically smallest orientation
/// among those reaching the lower target, then the upper, is returned.
pub fn equitable_2colorable(forest: &StarForest) -> Option<Orientation> {
    let stars = forest.stars();
    let n = forest.vertex_count();
    let n_stars = stars.len();
    // reach[i][s]: stars i.. can contribute exactly s
    let mut reach = vec![vec![false; n + 1]; n_stars + 1];
    reach[n_stars][0] = true;
    for i in (0..n_stars).rev() {
        for s in 0..=n {
            reach[i][s] = (s >= stars[i] && reach[i + 1][s - stars[i]]) || (s >= 1 && reach[i + 1][s - 1]);
        }
    }
    let target = [n / 2, n.div_ceil(2)].into_iter().find(|&t| reach[0][t])?;
    let mut bits = Vec::with_capacity(n_stars);
    let mut left = target;
    for (i, &m) in stars.iter().enumerate() {
        // false (leaves get 1) sorts first
        if left >= m && reach[i + 1][left - m] {
            bits.push(false);
            left -= m;
        } else {
            bits.push(true);
            left -= 1;
        }
    }
    debug_assert_eq!(left, 0);
    Some(Orientation(bits))
}

/// The proper 2-coloring an orientation describes.
pub fn orientation_coloring(forest: &StarForest, orientation: &Orientation) -> Result<Coloring> {
    if orientation.0.len() != forest.component_count() {
        return Err(Error::LengthMismatch {
            expected: forest.component_count(),
            found: orientation.0.len(),
        });
    }
    let mut coloring = Coloring::empty(forest);
    for (comp, &center_one) in orientation.0.iter().enumerate() {
        let (center, leaf) = if center_one { (Color(1), Color(2)) } else { (Color(2), Color(1)) };
        coloring.set_index(forest.offset(comp), center);
        for v in forest.leaf_range(comp) {
            coloring.set_index(v, leaf);
        }
    }
    Ok(coloring)
}

/// Equal-sum index sets recovered from an equitable orientation of the
/// reduced forest: `A` holds the stars whose leaves take color 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

pub fn extract_partition(instance: &PartitionInstance, orientation: &Orientation) -> Result<Partition> {
    if instance.total() % 2 == 1 {
        return Err(Error::InvalidParameters("odd total: the reduction produced no star per value".into()));
    }
    let forest = reduce_partition(instance)?;
    if !orientation.is_equitable(&forest) {
        return Err(Error::InvalidParameters(format!(
            "orientation {orientation} is not an equitable 2-coloring of {forest}"
        )));
    }
    let (a, b): (Vec<usize>, Vec<usize>) = (0..instance.values.len()).partition(|&i| !orientation.0[i]);
    let sum = |idx: &[usize]| idx.iter().map(|&i| instance.values[i]).sum::<u64>();
    if sum(&a) != sum(&b) {
        return Err(Error::Construction(format!("sides sum to {} and {}", sum(&a), sum(&b))));
    }
    Ok(Partition { a, b })
}

/// Some subset sums to half the total.
pub fn partition_exists(instance: &PartitionInstance) -> bool {
    let total = instance.total();
    if total % 2 == 1 {
        return false;
    }
    let half = (total / 2) as usize;
    let mut reach = vec![false; half + 1];
    reach[0] = true;
    for &v in &instance.values {
        let v = v as usize;
        for s in (v..=half).rev() {
            reach[s] |= reach[s - v];
        }
    }
    reach[half]
}
