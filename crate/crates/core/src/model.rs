//! Star forests, list assignments and colorings.
//!
//! A star forest is stored as its sequence of leaf counts. Vertices are
//! addressed as `(component, slot)` pairs where slot 0 is the center and slots
//! `1..=m` are the leaves. The global vertex order (components ascending,
//! center first, leaves by slot) is used for every deterministic tie-break in
//! the crate.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A palette element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Color(pub u32);

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Color {
    fn from(c: u32) -> Self {
        Color(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId {
    pub component: usize,
    pub slot: usize,
}

impl VertexId {
    pub fn center(component: usize) -> Self {
        VertexId { component, slot: 0 }
    }

    pub fn leaf(component: usize, slot: usize) -> Self {
        debug_assert!(slot >= 1);
        VertexId { component, slot }
    }

    pub fn is_center(&self) -> bool {
        self.slot == 0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.component, self.slot)
    }
}

impl FromStr for VertexId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadVertexKey(s.to_string());
        let (c, v) = s.split_once('.').ok_or_else(bad)?;
        Ok(VertexId {
            component: c.parse().map_err(|_| bad())?,
            slot: v.parse().map_err(|_| bad())?,
        })
    }
}

/// The graph `K_{1,m_1} + ... + K_{1,m_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ForestJson", into = "ForestJson")]
pub struct StarForest {
    stars: Vec<usize>,
    offsets: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ForestJson {
    stars: Vec<usize>,
}

impl TryFrom<ForestJson> for StarForest {
    type Error = Error;

    fn try_from(j: ForestJson) -> Result<Self> {
        StarForest::new(j.stars)
    }
}

impl From<StarForest> for ForestJson {
    fn from(f: StarForest) -> Self {
        ForestJson { stars: f.stars }
    }
}

impl StarForest {
    pub fn new(stars: impl Into<Vec<usize>>) -> Result<Self> {
        let stars = stars.into();
        if stars.is_empty() {
            return Err(Error::EmptyForest);
        }
        let mut offsets = Vec::with_capacity(stars.len() + 1);
        let mut acc = 0;
        for &m in &stars {
            offsets.push(acc);
            acc += m + 1;
        }
        offsets.push(acc);
        Ok(StarForest { stars, offsets })
    }

    pub fn stars(&self) -> &[usize] {
        &self.stars
    }

    pub fn component_count(&self) -> usize {
        self.stars.len()
    }

    pub fn leaves(&self, component: usize) -> usize {
        self.stars[component]
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets[self.stars.len()]
    }

    pub fn max_leaves(&self) -> usize {
        self.stars.iter().copied().max().unwrap_or(0)
    }

    pub fn has_edge(&self) -> bool {
        self.stars.iter().any(|&m| m > 0)
    }

    /// Global index of the center of `component`.
    pub fn offset(&self, component: usize) -> usize {
        self.offsets[component]
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.component < self.stars.len() && v.slot <= self.stars[v.component]
    }

    pub fn index(&self, v: VertexId) -> Result<usize> {
        if !self.contains(v) {
            return Err(Error::UnknownVertex(v));
        }
        Ok(self.offsets[v.component] + v.slot)
    }

    pub fn vertex(&self, index: usize) -> VertexId {
        assert!(index < self.vertex_count(), "vertex index out of range");
        let component = self.offsets.partition_point(|&o| o <= index) - 1;
        VertexId {
            component,
            slot: index - self.offsets[component],
        }
    }

    /// Component owning the vertex at global `index`.
    pub fn component_of(&self, index: usize) -> usize {
        self.offsets.partition_point(|&o| o <= index) - 1
    }

    /// All vertices in the global order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.stars
            .iter()
            .enumerate()
            .flat_map(|(c, &m)| (0..=m).map(move |s| VertexId { component: c, slot: s }))
    }

    /// Global index range of the leaves of `component`.
    pub fn leaf_range(&self, component: usize) -> std::ops::Range<usize> {
        self.offsets[component] + 1..self.offsets[component + 1]
    }
}

impl fmt::Display for StarForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.stars.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        if self.stars.len() == 1 {
            write!(f, ",")?;
        }
        write!(f, ")")
    }
}

/// `ρ(G,k) = ⌈|V(G)|/k⌉`, the most times any color may be used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EquityCap(pub usize);

impl EquityCap {
    pub fn get(self) -> usize {
        self.0
    }
}

pub fn rho(forest: &StarForest, k: usize) -> Result<EquityCap> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    Ok(EquityCap(forest.vertex_count().div_ceil(k)))
}

/// A list of allowed colors for every vertex of a forest.
///
/// Lists are kept sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ListAssignment {
    forest: StarForest,
    lists: Vec<Vec<Color>>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    lists: BTreeMap<String, Vec<u32>>,
}

impl ListAssignment {
    /// Builds an assignment from lists in global vertex order.
    pub fn new(forest: &StarForest, lists: Vec<Vec<Color>>) -> Result<Self> {
        if lists.len() != forest.vertex_count() {
            return Err(Error::LengthMismatch {
                expected: forest.vertex_count(),
                found: lists.len(),
            });
        }
        let mut lists = lists;
        for (i, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.is_empty() {
                return Err(Error::EmptyList(forest.vertex(i)));
            }
        }
        Ok(ListAssignment {
            forest: forest.clone(),
            lists,
        })
    }

    pub fn from_fn(forest: &StarForest, mut f: impl FnMut(VertexId) -> Vec<Color>) -> Result<Self> {
        let lists = forest.vertices().map(&mut f).collect();
        Self::new(forest, lists)
    }

    /// Convenience constructor from raw integers, in global vertex order.
    pub fn from_raw(forest: &StarForest, lists: &[&[u32]]) -> Result<Self> {
        Self::new(
            forest,
            lists
                .iter()
                .map(|l| l.iter().map(|&c| Color(c)).collect())
                .collect(),
        )
    }

    /// Every vertex receives `colors`.
    pub fn constant(forest: &StarForest, colors: &[Color]) -> Result<Self> {
        Self::from_fn(forest, |_| colors.to_vec())
    }

    pub fn forest(&self) -> &StarForest {
        &self.forest
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn list_at(&self, index: usize) -> &[Color] {
        &self.lists[index]
    }

    pub fn list(&self, v: VertexId) -> Result<&[Color]> {
        Ok(&self.lists[self.forest.index(v)?])
    }

    pub fn palette(&self) -> Vec<Color> {
        let mut p: Vec<Color> = self.lists.iter().flatten().copied().collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    /// `Some(k)` when every list has exactly `k` colors.
    pub fn uniform_size(&self) -> Option<usize> {
        let k = self.lists[0].len();
        self.lists.iter().all(|l| l.len() == k).then_some(k)
    }

    pub fn is_k_assignment(&self, k: usize) -> bool {
        self.uniform_size() == Some(k)
    }

    pub fn check_k_assignment(&self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        match self.lists.iter().position(|l| l.len() != k) {
            None => Ok(()),
            Some(i) => Err(Error::NotKAssignment {
                k,
                vertex: self.forest.vertex(i),
                size: self.lists[i].len(),
            }),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let lists = self
            .forest
            .vertices()
            .zip(&self.lists)
            .map(|(v, l)| (v.to_string(), l.iter().map(|c| c.0).collect()))
            .collect();
        serde_json::to_value(AssignmentJson { lists }).expect("plain map serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(forest: &StarForest, value: serde_json::Value) -> Result<Self> {
        let raw: AssignmentJson = serde_json::from_value(value)?;
        let mut lists: Vec<Option<Vec<Color>>> = vec![None; forest.vertex_count()];
        for (key, colors) in raw.lists {
            let v: VertexId = key.parse()?;
            let i = forest.index(v)?;
            lists[i] = Some(colors.into_iter().map(Color).collect());
        }
        let lists = lists
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::MissingList(forest.vertex(i))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(forest, lists)
    }

    pub fn from_json(forest: &StarForest, text: &str) -> Result<Self> {
        Self::from_json_value(forest, serde_json::from_str(text)?)
    }
}

/// A partial or total map from vertices to colors, with usage counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    forest: StarForest,
    colors: Vec<Option<Color>>,
    usage: BTreeMap<Color, usize>,
}

#[derive(Serialize, Deserialize)]
struct ColoringJson {
    colors: BTreeMap<String, u32>,
}

impl Coloring {
    pub fn empty(forest: &StarForest) -> Self {
        Coloring {
            forest: forest.clone(),
            colors: vec![None; forest.vertex_count()],
            usage: BTreeMap::new(),
        }
    }

    /// Builds a coloring from per-vertex entries in global vertex order.
    pub fn from_entries(forest: &StarForest, colors: Vec<Option<Color>>) -> Result<Self> {
        if colors.len() != forest.vertex_count() {
            return Err(Error::LengthMismatch {
                expected: forest.vertex_count(),
                found: colors.len(),
            });
        }
        let mut c = Coloring::empty(forest);
        for (i, col) in colors.into_iter().enumerate() {
            if let Some(col) = col {
                c.set_index(i, col);
            }
        }
        Ok(c)
    }

    /// Total coloring from raw integers in global vertex order.
    pub fn from_raw(forest: &StarForest, colors: &[u32]) -> Result<Self> {
        Self::from_entries(forest, colors.iter().map(|&c| Some(Color(c))).collect())
    }

    pub fn forest(&self) -> &StarForest {
        &self.forest
    }

    pub fn set(&mut self, v: VertexId, color: Color) -> Result<()> {
        let i = self.forest.index(v)?;
        self.set_index(i, color);
        Ok(())
    }

    pub fn set_index(&mut self, index: usize, color: Color) {
        if let Some(old) = self.colors[index].replace(color) {
            self.decrement(old);
        }
        *self.usage.entry(color).or_insert(0) += 1;
    }

    pub fn clear_index(&mut self, index: usize) {
        if let Some(old) = self.colors[index].take() {
            self.decrement(old);
        }
    }

    fn decrement(&mut self, c: Color) {
        let n = self.usage.get_mut(&c).expect("usage tracks every assigned color");
        *n -= 1;
        if *n == 0 {
            self.usage.remove(&c);
        }
    }

    pub fn get(&self, v: VertexId) -> Result<Option<Color>> {
        Ok(self.colors[self.forest.index(v)?])
    }

    pub fn at(&self, index: usize) -> Option<Color> {
        self.colors[index]
    }

    pub fn entries(&self) -> &[Option<Color>] {
        &self.colors
    }

    pub fn usage(&self) -> &BTreeMap<Color, usize> {
        &self.usage
    }

    pub fn usage_of(&self, c: Color) -> usize {
        self.usage.get(&c).copied().unwrap_or(0)
    }

    pub fn max_usage(&self) -> usize {
        self.usage.values().copied().max().unwrap_or(0)
    }

    pub fn colored_count(&self) -> usize {
        self.colors.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    /// Recomputes the usage table from scratch and compares.
    pub fn usage_consistent(&self) -> bool {
        let mut fresh = BTreeMap::new();
        for c in self.colors.iter().flatten() {
            *fresh.entry(*c).or_insert(0usize) += 1;
        }
        fresh == self.usage
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let colors = self
            .forest
            .vertices()
            .zip(&self.colors)
            .filter_map(|(v, c)| c.map(|c| (v.to_string(), c.0)))
            .collect();
        serde_json::to_value(ColoringJson { colors }).expect("plain map serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(forest: &StarForest, value: serde_json::Value) -> Result<Self> {
        let raw: ColoringJson = serde_json::from_value(value)?;
        let mut c = Coloring::empty(forest);
        for (key, color) in raw.colors {
            let v: VertexId = key.parse()?;
            c.set(v, Color(color))?;
        }
        Ok(c)
    }

    pub fn from_json(forest: &StarForest, text: &str) -> Result<Self> {
        Self::from_json_value(forest, serde_json::from_str(text)?)
    }
}

fn check_shape(forest: &StarForest, other: &StarForest) -> Result<()> {
    if forest != other {
        return Err(Error::ShapeMismatch);
    }
    Ok(())
}

/// True iff no center shares a color with a colored leaf of its own star.
pub fn is_proper(forest: &StarForest, coloring: &Coloring) -> Result<bool> {
    check_shape(forest, coloring.forest())?;
    Ok(proper_entries(forest, coloring.entries()))
}

pub(crate) fn proper_entries(forest: &StarForest, colors: &[Option<Color>]) -> bool {
    (0..forest.component_count()).all(|comp| match colors[forest.offset(comp)] {
        None => true,
        Some(center) => forest
            .leaf_range(comp)
            .all(|i| colors[i] != Some(center)),
    })
}

/// Total, proper, list-respecting, and no color used more than `cap` times.
///
/// This is the list-size-agnostic core of [`is_equitable_l_coloring`]; the
/// constructive colorers use it with residual caps.
pub fn is_capped_l_coloring(
    forest: &StarForest,
    lists: &ListAssignment,
    coloring: &Coloring,
    cap: usize,
) -> bool {
    if forest != lists.forest() || forest != coloring.forest() {
        return false;
    }
    coloring.is_total()
        && proper_entries(forest, coloring.entries())
        && coloring
            .entries()
            .iter()
            .zip(lists.lists())
            .all(|(c, l)| c.is_some_and(|c| l.binary_search(&c).is_ok()))
        && coloring.max_usage() <= cap
}

/// Equitable `L`-coloring for a `k`-assignment `L`.
pub fn is_equitable_l_coloring(
    forest: &StarForest,
    lists: &ListAssignment,
    coloring: &Coloring,
    k: usize,
) -> Result<bool> {
    check_shape(forest, lists.forest())?;
    check_shape(forest, coloring.forest())?;
    lists.check_k_assignment(k)?;
    let cap = rho(forest, k)?.get();
    Ok(is_capped_l_coloring(forest, lists, coloring, cap))
}

/// Equitable `k`-coloring in the classical sense, over the colors `1..=k`:
/// proper, and the `k` class sizes (empty classes included) differ by at most one.
pub fn is_equitable_k_coloring(forest: &StarForest, coloring: &Coloring, k: usize) -> bool {
    if k == 0 || forest != coloring.forest() || !coloring.is_total() {
        return false;
    }
    if !proper_entries(forest, coloring.entries()) {
        return false;
    }
    let mut sizes = vec![0usize; k];
    for c in coloring.entries().iter().flatten() {
        match (c.0 as usize).checked_sub(1) {
            Some(i) if i < k => sizes[i] += 1,
            _ => return false,
        }
    }
    let lo = sizes.iter().min().copied().unwrap_or(0);
    let hi = sizes.iter().max().copied().unwrap_or(0);
    hi - lo <= 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forest(stars: &[usize]) -> StarForest {
        StarForest::new(stars.to_vec()).unwrap()
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(&forest(&[7, 8]), 2).unwrap().get(), 9);
        assert_eq!(rho(&forest(&[8, 8]), 2).unwrap().get(), 9);
        assert_eq!(rho(&forest(&[52, 27]), 3).unwrap().get(), 27);
        assert_eq!(rho(&forest(&[1]), 0), Err(Error::ZeroK));
    }

    #[test]
    fn vertex_indexing_round_trips() {
        let f = forest(&[2, 0, 3]);
        assert_eq!(f.vertex_count(), 8);
        for (i, v) in f.vertices().enumerate() {
            assert_eq!(f.index(v).unwrap(), i);
            assert_eq!(f.vertex(i), v);
            assert_eq!(f.component_of(i), v.component);
        }
        assert!(f.index(VertexId::leaf(1, 1)).is_err());
        assert_eq!("2.3".parse::<VertexId>().unwrap(), VertexId::leaf(2, 3));
        assert!("2-3".parse::<VertexId>().is_err());
    }

    #[test]
    fn empty_forest_rejected() {
        assert_eq!(StarForest::new(vec![]), Err(Error::EmptyForest));
    }

    #[test]
    fn proper_examples() {
        let f = forest(&[1, 1]);
        let c = Coloring::from_raw(&f, &[1, 2, 2, 1]).unwrap();
        assert!(is_proper(&f, &c).unwrap());

        let f = forest(&[1]);
        let c = Coloring::from_raw(&f, &[1, 1]).unwrap();
        assert!(!is_proper(&f, &c).unwrap());

        let f = forest(&[2]);
        let c = Coloring::from_entries(&f, vec![Some(Color(1)), Some(Color(2)), None]).unwrap();
        assert!(is_proper(&f, &c).unwrap());

        let other = Coloring::empty(&forest(&[3]));
        assert_eq!(is_proper(&f, &other), Err(Error::ShapeMismatch));
    }

    #[test]
    fn equitable_l_coloring_examples() {
        let f = forest(&[1, 1]);
        let l = ListAssignment::constant(&f, &[Color(1), Color(2)]).unwrap();
        let c = Coloring::from_raw(&f, &[1, 2, 2, 1]).unwrap();
        assert!(is_equitable_l_coloring(&f, &l, &c, 2).unwrap());

        let f = forest(&[3]);
        let l = ListAssignment::constant(&f, &[Color(1), Color(2)]).unwrap();
        let c = Coloring::from_raw(&f, &[1, 2, 2, 2]).unwrap();
        assert!(!is_equitable_l_coloring(&f, &l, &c, 2).unwrap());

        // a color outside the list is rejected even if proper and balanced
        let c = Coloring::from_raw(&f, &[3, 2, 2, 1]).unwrap();
        assert!(!is_equitable_l_coloring(&f, &l, &c, 2).unwrap());

        assert!(matches!(
            is_equitable_l_coloring(&f, &l, &c, 3),
            Err(Error::NotKAssignment { k: 3, .. })
        ));
    }

    #[test]
    fn constant_three_on_six_one_never_equitable() {
        // every total proper list coloring of K_{1,6}+K_{1,1} from {1,2,3} fails the cap of 3
        let f = forest(&[6, 1]);
        let l = ListAssignment::constant(&f, &[Color(1), Color(2), Color(3)]).unwrap();
        let n = f.vertex_count();
        let mut colors = vec![1u32; n];
        let mut seen_proper = 0;
        loop {
            let c = Coloring::from_raw(&f, &colors).unwrap();
            if is_proper(&f, &c).unwrap() {
                seen_proper += 1;
            }
            assert!(!is_equitable_l_coloring(&f, &l, &c, 3).unwrap());
            let mut i = 0;
            while i < n && colors[i] == 3 {
                colors[i] = 1;
                i += 1;
            }
            if i == n {
                break;
            }
            colors[i] += 1;
        }
        assert!(seen_proper > 0);
    }

    #[test]
    fn equitable_k_coloring_examples() {
        let f = forest(&[3]);
        for colors in [[1, 2, 2, 2], [2, 1, 1, 1]] {
            let c = Coloring::from_raw(&f, &colors).unwrap();
            assert!(!is_equitable_k_coloring(&f, &c, 2));
        }
        let f = forest(&[2, 2, 3]);
        // centers 1,1,2 -> leaves 2,2 | 2,2 | 1,1,1 : classes 5/5
        let c = Coloring::from_raw(&f, &[1, 2, 2, 1, 2, 2, 2, 1, 1, 1]).unwrap();
        assert!(is_equitable_k_coloring(&f, &c, 2));
        let f = forest(&[1]);
        assert!(is_equitable_k_coloring(&f, &Coloring::from_raw(&f, &[1, 2]).unwrap(), 2));
        // empty classes count
        let f = forest(&[2]);
        assert!(!is_equitable_k_coloring(&f, &Coloring::from_raw(&f, &[1, 2, 2]).unwrap(), 4));
        assert!(is_equitable_k_coloring(&f, &Coloring::from_raw(&f, &[1, 2, 3]).unwrap(), 4));
    }

    #[test]
    fn json_forms_round_trip() {
        let f = forest(&[2, 1]);
        let fj = serde_json::to_string(&f).unwrap();
        assert_eq!(fj, r#"{"stars":[2,1]}"#);
        assert_eq!(serde_json::from_str::<StarForest>(&fj).unwrap(), f);
        assert!(serde_json::from_str::<StarForest>(r#"{"stars":[]}"#).is_err());

        let l = ListAssignment::from_raw(&f, &[&[1, 2], &[2, 3], &[1, 3], &[4, 1], &[2, 1]]).unwrap();
        let back = ListAssignment::from_json(&f, &l.to_json()).unwrap();
        assert_eq!(back, l);
        assert!(l.to_json().contains(r#""1.1":[1,2]"#));

        let c = Coloring::from_entries(&f, vec![Some(Color(1)), None, Some(Color(3)), None, None]).unwrap();
        let back = Coloring::from_json(&f, &c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(Coloring::from_json(&f, r#"{"colors":{"5.0":1}}"#).is_err());
        assert!(ListAssignment::from_json(&f, r#"{"lists":{"0.0":[1]}}"#).is_err());
    }

    #[test]
    fn usage_tracks_reassignment() {
        let f = forest(&[2]);
        let mut c = Coloring::empty(&f);
        c.set_index(0, Color(1));
        c.set_index(1, Color(2));
        c.set_index(1, Color(3));
        c.clear_index(0);
        assert!(c.usage_consistent());
        assert_eq!(c.usage_of(Color(2)), 0);
        assert_eq!(c.usage_of(Color(3)), 1);
    }
}
