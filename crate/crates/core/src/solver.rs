//! Exact decision of equitable `L`-colorability for star forests.
//!
//! Three interchangeable strategies are provided:
//!
//! * center enumeration: try every combination of center colors (first
//!   component most significant, colors ascending) and decide the leaves as a
//!   capacity-constrained bipartite assignment;
//! * usage-vector DP: sweep vertices in order while tracking how often each
//!   color has been used, which is cheap when the palette is tiny;
//! * full backtracking, used as a slow reference.
//!
//! The caps are global: every color may be used at most `ρ` times over the
//! whole forest, centers included.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rho, Color, Coloring, ListAssignment, StarForest};

/// Largest palette handled by the usage-vector DP.
pub const DP_MAX_PALETTE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "center-enumeration+assignment")]
    CenterEnumeration,
    #[serde(rename = "usage-vector-DP")]
    UsageDp,
    #[serde(rename = "full-backtracking")]
    Backtracking,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub colorable: bool,
    #[serde(
        serialize_with = "ser_witness",
        deserialize_with = "de_witness_placeholder",
        default
    )]
    pub witness: Option<Coloring>,
    pub strategy: Strategy,
    /// Search nodes expanded (center combinations, DP states or backtracking nodes).
    pub nodes: u64,
}

fn ser_witness<S: serde::Serializer>(w: &Option<Coloring>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        Some(c) => c.to_json_value().serialize(s),
        None => s.serialize_none(),
    }
}

// Witnesses need their forest to be parsed; callers reload them with
// `Coloring::from_json_value` against the forest they already hold.
fn de_witness_placeholder<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Coloring>, D::Error> {
    let _ = serde_json::Value::deserialize(d)?;
    Ok(None)
}

impl SolveOutcome {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("outcome serializes")
    }
}

/// Search was cut off by a node limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Aborted;

/// A list assignment with colors renamed to `0..palette.len()`.
#[derive(Clone, Debug)]
pub(crate) struct DenseLists {
    pub palette: Vec<Color>,
    pub lists: Vec<Vec<u16>>,
}

impl DenseLists {
    pub fn new(lists: &ListAssignment) -> Self {
        let palette = lists.palette();
        let dense = lists
            .lists()
            .iter()
            .map(|l| {
                l.iter()
                    .map(|c| palette.binary_search(c).expect("palette covers lists") as u16)
                    .collect()
            })
            .collect();
        DenseLists { palette, lists: dense }
    }

    fn to_coloring(&self, forest: &StarForest, colors: &[u16]) -> Coloring {
        Coloring::from_entries(
            forest,
            colors.iter().map(|&c| Some(self.palette[c as usize])).collect(),
        )
        .expect("one color per vertex")
    }
}

/// Decides whether `forest` has an equitable `L`-coloring for the `k`-assignment `lists`.
pub fn solve(forest: &StarForest, lists: &ListAssignment, k: usize) -> Result<SolveOutcome> {
    check_inputs(forest, lists, k)?;
    let cap = rho(forest, k)?.get();
    let strategy = default_strategy(lists);
    Ok(run_checked(forest, lists, cap, strategy))
}

/// Same as [`solve`] with an explicit strategy.
pub fn solve_with(
    forest: &StarForest,
    lists: &ListAssignment,
    k: usize,
    strategy: Strategy,
) -> Result<SolveOutcome> {
    check_inputs(forest, lists, k)?;
    let cap = rho(forest, k)?.get();
    Ok(run_checked(forest, lists, cap, strategy))
}

/// Proper list coloring using no color more than `cap` times, for lists of
/// arbitrary (possibly unequal) sizes.
pub fn solve_capped(
    forest: &StarForest,
    lists: &ListAssignment,
    cap: usize,
    strategy: Option<Strategy>,
) -> Result<SolveOutcome> {
    if forest != lists.forest() {
        return Err(Error::ShapeMismatch);
    }
    let strategy = strategy.unwrap_or_else(|| default_strategy(lists));
    Ok(run_checked(forest, lists, cap, strategy))
}

fn check_inputs(forest: &StarForest, lists: &ListAssignment, k: usize) -> Result<()> {
    if forest != lists.forest() {
        return Err(Error::ShapeMismatch);
    }
    lists.check_k_assignment(k)
}

fn default_strategy(lists: &ListAssignment) -> Strategy {
    if lists.palette().len() <= DP_MAX_PALETTE {
        Strategy::UsageDp
    } else {
        Strategy::CenterEnumeration
    }
}

fn run_checked(forest: &StarForest, lists: &ListAssignment, cap: usize, strategy: Strategy) -> SolveOutcome {
    let dense = DenseLists::new(lists);
    let strategy = if strategy == Strategy::UsageDp && dense.palette.len() > DP_MAX_PALETTE {
        Strategy::CenterEnumeration
    } else {
        strategy
    };
    let mut nodes = 0;
    let found = run_dense(forest, &dense.lists, dense.palette.len(), cap, strategy, &mut nodes, None)
        .expect("no node limit");
    let witness = found.map(|colors| dense.to_coloring(forest, &colors));
    if let Some(w) = &witness {
        assert!(
            crate::model::is_capped_l_coloring(forest, lists, w, cap),
            "solver produced an invalid witness"
        );
    }
    SolveOutcome {
        colorable: witness.is_some(),
        witness,
        strategy,
        nodes,
    }
}

pub(crate) fn run_dense(
    forest: &StarForest,
    lists: &[Vec<u16>],
    palette: usize,
    cap: usize,
    strategy: Strategy,
    nodes: &mut u64,
    limit: Option<u64>,
) -> Result<Option<Vec<u16>>, Aborted> {
    match strategy {
        Strategy::CenterEnumeration => center_enumeration(forest, lists, palette, cap, nodes, limit),
        Strategy::UsageDp => usage_dp(forest, lists, palette, cap, nodes, limit),
        Strategy::Backtracking => backtracking(forest, lists, palette, cap, nodes, limit),
    }
}

/// Picks DP for tiny palettes, center enumeration otherwise.
pub(crate) fn auto_dense(
    forest: &StarForest,
    lists: &[Vec<u16>],
    palette: usize,
    cap: usize,
    nodes: &mut u64,
    limit: Option<u64>,
) -> Result<Option<Vec<u16>>, Aborted> {
    let strategy = if palette <= DP_MAX_PALETTE {
        Strategy::UsageDp
    } else {
        Strategy::CenterEnumeration
    };
    run_dense(forest, lists, palette, cap, strategy, nodes, limit)
}

fn bump(nodes: &mut u64, limit: Option<u64>) -> Result<(), Aborted> {
    *nodes += 1;
    match limit {
        Some(l) if *nodes > l => Err(Aborted),
        _ => Ok(()),
    }
}

fn center_enumeration(
    forest: &StarForest,
    lists: &[Vec<u16>],
    palette: usize,
    cap: usize,
    nodes: &mut u64,
    limit: Option<u64>,
) -> Result<Option<Vec<u16>>, Aborted> {
    let n = forest.component_count();
    let centers: Vec<&[u16]> = (0..n).map(|c| lists[forest.offset(c)].as_slice()).collect();
    let mut choice = vec![0usize; n];
    let mut matcher = LeafMatcher::new(palette);
    let leaf_total = forest.vertex_count() - n;
    loop {
        bump(nodes, limit)?;
        let mut caps = vec![cap; palette];
        let mut ok = true;
        for (comp, &i) in choice.iter().enumerate() {
            let c = centers[comp][i] as usize;
            if caps[c] == 0 {
                ok = false;
                break;
            }
            caps[c] -= 1;
        }
        if ok && caps.iter().sum::<usize>() >= leaf_total {
            matcher.reset(&caps);
            let mut all = true;
            for comp in 0..n {
                let forbidden = centers[comp][choice[comp]];
                for leaf in forest.leaf_range(comp) {
                    if !matcher.insert(leaf, &lists[leaf], Some(forbidden)) {
                        all = false;
                        break;
                    }
                }
                if !all {
                    break;
                }
            }
            if all {
                let mut colors = vec![0u16; forest.vertex_count()];
                for (comp, &i) in choice.iter().enumerate() {
                    colors[forest.offset(comp)] = centers[comp][i];
                }
                for (leaf, color) in matcher.assignment() {
                    colors[leaf] = color;
                }
                return Ok(Some(colors));
            }
        }
        // next combination, last component varies fastest
        let mut comp = n;
        loop {
            if comp == 0 {
                return Ok(None);
            }
            comp -= 1;
            choice[comp] += 1;
            if choice[comp] < centers[comp].len() {
                break;
            }
            choice[comp] = 0;
        }
    }
}

/// Incremental capacitated bipartite matching between leaves and colors.
struct LeafMatcher {
    caps: Vec<usize>,
    holders: Vec<Vec<usize>>,
    // per inserted leaf: (vertex id, allowed colors, assigned color)
    leaves: Vec<(usize, Vec<u16>, u16)>,
    visited: Vec<bool>,
}

impl LeafMatcher {
    fn new(palette: usize) -> Self {
        LeafMatcher {
            caps: vec![0; palette],
            holders: vec![Vec::new(); palette],
            leaves: Vec::new(),
            visited: vec![false; palette],
        }
    }

    fn reset(&mut self, caps: &[usize]) {
        self.caps.clear();
        self.caps.extend_from_slice(caps);
        for h in &mut self.holders {
            h.clear();
        }
        self.leaves.clear();
    }

    fn insert(&mut self, vertex: usize, list: &[u16], forbidden: Option<u16>) -> bool {
        let allowed: Vec<u16> = list.iter().copied().filter(|&c| Some(c) != forbidden).collect();
        let idx = self.leaves.len();
        self.leaves.push((vertex, allowed, u16::MAX));
        self.visited.iter_mut().for_each(|v| *v = false);
        if self.augment(idx) {
            true
        } else {
            self.leaves.pop();
            false
        }
    }

    fn augment(&mut self, leaf: usize) -> bool {
        let allowed = self.leaves[leaf].1.clone();
        // free capacity first, ascending, so rerouting only happens when needed
        for &c in &allowed {
            let ci = c as usize;
            if !self.visited[ci] && self.holders[ci].len() < self.caps[ci] {
                self.visited[ci] = true;
                self.holders[ci].push(leaf);
                self.leaves[leaf].2 = c;
                return true;
            }
        }
        for &c in &allowed {
            let ci = c as usize;
            if self.visited[ci] {
                continue;
            }
            self.visited[ci] = true;
            for pos in 0..self.holders[ci].len() {
                let other = self.holders[ci][pos];
                if self.augment(other) {
                    self.holders[ci][pos] = leaf;
                    self.leaves[leaf].2 = c;
                    return true;
                }
            }
        }
        false
    }

    fn assignment(&self) -> impl Iterator<Item = (usize, u16)> + '_ {
        self.leaves.iter().map(|(v, _, c)| (*v, *c))
    }
}

/// Assigns every leaf a color from its list, avoiding its forbidden color and
/// using each color at most its cap. Exact: returns `None` only when no such
/// assignment exists.
pub fn leaf_assignment(
    leaf_lists: &[Vec<Color>],
    forbidden: &[Option<Color>],
    caps: &BTreeMap<Color, usize>,
) -> Result<Option<Vec<Color>>> {
    if forbidden.len() != leaf_lists.len() {
        return Err(Error::LengthMismatch {
            expected: leaf_lists.len(),
            found: forbidden.len(),
        });
    }
    let palette: Vec<Color> = caps.keys().copied().collect();
    let cap_vec: Vec<usize> = caps.values().copied().collect();
    let dense = |c: &Color| palette.binary_search(c).ok().map(|i| i as u16);
    let mut matcher = LeafMatcher::new(palette.len());
    matcher.reset(&cap_vec);
    for (i, (list, forb)) in leaf_lists.iter().zip(forbidden).enumerate() {
        let mut allowed: Vec<u16> = list.iter().filter_map(dense).collect();
        allowed.sort_unstable();
        allowed.dedup();
        let forb = forb.as_ref().and_then(dense);
        if !matcher.insert(i, &allowed, forb) {
            return Ok(None);
        }
    }
    let mut out = vec![Color(0); leaf_lists.len()];
    for (i, c) in matcher.assignment() {
        out[i] = palette[c as usize];
    }
    Ok(Some(out))
}

/// Extends the given center colors to an equitable `L`-coloring if possible.
pub fn solve_center_fixed(
    forest: &StarForest,
    lists: &ListAssignment,
    k: usize,
    centers: &[Color],
) -> Result<Option<Coloring>> {
    check_inputs(forest, lists, k)?;
    if centers.len() != forest.component_count() {
        return Err(Error::LengthMismatch {
            expected: forest.component_count(),
            found: centers.len(),
        });
    }
    let cap = rho(forest, k)?.get();
    let mut caps: BTreeMap<Color, usize> = lists.palette().into_iter().map(|c| (c, cap)).collect();
    for (comp, &c) in centers.iter().enumerate() {
        let at = forest.offset(comp);
        if lists.list_at(at).binary_search(&c).is_err() {
            return Err(Error::ColorNotInList {
                vertex: forest.vertex(at),
                color: c.0,
            });
        }
        let slot = caps.get_mut(&c).expect("center color is in the palette");
        if *slot == 0 {
            return Ok(None);
        }
        *slot -= 1;
    }
    let mut leaf_lists = Vec::new();
    let mut forbidden = Vec::new();
    for (comp, &cc) in centers.iter().enumerate() {
        for leaf in forest.leaf_range(comp) {
            leaf_lists.push(lists.list_at(leaf).to_vec());
            forbidden.push(Some(cc));
        }
    }
    let Some(leaf_colors) = leaf_assignment(&leaf_lists, &forbidden, &caps)? else {
        return Ok(None);
    };
    let mut coloring = Coloring::empty(forest);
    let mut next = leaf_colors.into_iter();
    for (comp, &cc) in centers.iter().enumerate() {
        coloring.set_index(forest.offset(comp), cc);
        for leaf in forest.leaf_range(comp) {
            coloring.set_index(leaf, next.next().expect("one color per leaf"));
        }
    }
    Ok(Some(coloring))
}

fn pack(usage: &[u16]) -> u64 {
    usage.iter().enumerate().fold(0u64, |acc, (i, &u)| acc | (u as u64) << (16 * i))
}

fn usage_of(key: u64, color: usize) -> usize {
    ((key >> (16 * color)) & 0xffff) as usize
}

fn usage_dp(
    forest: &StarForest,
    lists: &[Vec<u16>],
    palette: usize,
    cap: usize,
    nodes: &mut u64,
    limit: Option<u64>,
) -> Result<Option<Vec<u16>>, Aborted> {
    assert!(palette <= DP_MAX_PALETTE);
    if cap > u16::MAX as usize {
        return center_enumeration(forest, lists, palette, cap, nodes, limit);
    }
    const NO_CENTER: u8 = u8::MAX;
    // layer entries: (usage key, current center color, parent index, color chosen)
    let mut layers: Vec<Vec<(u64, u8, u32, u16)>> = Vec::with_capacity(forest.vertex_count() + 1);
    layers.push(vec![(pack(&[0; DP_MAX_PALETTE][..palette]), NO_CENTER, 0, 0)]);
    let mut index: HashMap<(u64, u8), u32> = HashMap::new();
    for (v, list) in lists.iter().enumerate() {
        let is_center = forest.vertex(v).is_center();
        let prev = layers.last().expect("seeded");
        let mut next: Vec<(u64, u8, u32, u16)> = Vec::new();
        index.clear();
        for (pi, &(key, center, _, _)) in prev.iter().enumerate() {
            bump(nodes, limit)?;
            for &c in list {
                if !is_center && center == c as u8 {
                    continue;
                }
                if usage_of(key, c as usize) >= cap {
                    continue;
                }
                let nkey = key + (1u64 << (16 * c as u64));
                let ncenter = if is_center { c as u8 } else { center };
                index.entry((nkey, ncenter)).or_insert_with(|| {
                    next.push((nkey, ncenter, pi as u32, c));
                    (next.len() - 1) as u32
                });
            }
        }
        if next.is_empty() {
            return Ok(None);
        }
        layers.push(next);
    }
    let mut colors = vec![0u16; forest.vertex_count()];
    let mut at = 0usize;
    for v in (0..forest.vertex_count()).rev() {
        let (_, _, parent, c) = layers[v + 1][at];
        colors[v] = c;
        at = parent as usize;
    }
    Ok(Some(colors))
}

fn backtracking(
    forest: &StarForest,
    lists: &[Vec<u16>],
    palette: usize,
    cap: usize,
    nodes: &mut u64,
    limit: Option<u64>,
) -> Result<Option<Vec<u16>>, Aborted> {
    struct Ctx<'a> {
        forest: &'a StarForest,
        lists: &'a [Vec<u16>],
        cap: usize,
        usage: Vec<usize>,
        colors: Vec<u16>,
        center: u16,
    }
    fn go(ctx: &mut Ctx<'_>, v: usize, nodes: &mut u64, limit: Option<u64>) -> Result<bool, Aborted> {
        bump(nodes, limit)?;
        if v == ctx.lists.len() {
            return Ok(true);
        }
        let is_center = ctx.forest.vertex(v).is_center();
        let saved_center = ctx.center;
        for i in 0..ctx.lists[v].len() {
            let c = ctx.lists[v][i];
            if (!is_center && c == ctx.center) || ctx.usage[c as usize] >= ctx.cap {
                continue;
            }
            ctx.usage[c as usize] += 1;
            ctx.colors[v] = c;
            if is_center {
                ctx.center = c;
            }
            if go(ctx, v + 1, nodes, limit)? {
                return Ok(true);
            }
            ctx.usage[c as usize] -= 1;
            ctx.center = saved_center;
        }
        Ok(false)
    }
    let mut ctx = Ctx {
        forest,
        lists,
        cap,
        usage: vec![0; palette],
        colors: vec![0; lists.len()],
        center: u16::MAX,
    };
    Ok(go(&mut ctx, 0, nodes, limit)?.then_some(ctx.colors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::is_equitable_l_coloring;

    fn forest(stars: &[usize]) -> StarForest {
        StarForest::new(stars.to_vec()).unwrap()
    }

    fn constant(f: &StarForest, k: u32) -> ListAssignment {
        ListAssignment::constant(f, &(1..=k).map(Color).collect::<Vec<_>>()).unwrap()
    }

    const ALL: [Strategy; 3] = [Strategy::CenterEnumeration, Strategy::UsageDp, Strategy::Backtracking];

    #[test]
    fn six_one_constant_three_is_infeasible() {
        let f = forest(&[6, 1]);
        let l = constant(&f, 3);
        for s in ALL {
            assert!(!solve_with(&f, &l, 3, s).unwrap().colorable);
        }
    }

    #[test]
    fn one_one_constant_two_is_feasible() {
        let f = forest(&[1, 1]);
        let l = constant(&f, 2);
        let out = solve_with(&f, &l, 2, Strategy::CenterEnumeration).unwrap();
        assert!(out.colorable);
        // centers (1,1) come first in lexicographic order and already succeed
        let w = out.witness.unwrap();
        assert_eq!(w, Coloring::from_raw(&f, &[1, 2, 1, 2]).unwrap());
        for s in ALL {
            let out = solve_with(&f, &l, 2, s).unwrap();
            assert!(is_equitable_l_coloring(&f, &l, out.witness.as_ref().unwrap(), 2).unwrap());
        }
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let l = constant(&forest(&[2]), 2);
        assert_eq!(solve(&forest(&[1]), &l, 2), Err(Error::ShapeMismatch));
        assert!(matches!(solve(&forest(&[2]), &l, 3), Err(Error::NotKAssignment { .. })));
    }

    #[test]
    fn center_fixed_examples() {
        let f = forest(&[1, 1]);
        let got = solve_center_fixed(&f, &constant(&f, 2), 2, &[Color(1), Color(2)]).unwrap();
        assert_eq!(got, Some(Coloring::from_raw(&f, &[1, 2, 2, 1]).unwrap()));

        let f = forest(&[6, 1]);
        let got = solve_center_fixed(&f, &constant(&f, 3), 3, &[Color(1), Color(2)]).unwrap();
        assert_eq!(got, None);

        let f = forest(&[2, 2]);
        let l = constant(&f, 3);
        let got = solve_center_fixed(&f, &l, 3, &[Color(1), Color(1)]).unwrap().unwrap();
        assert!(is_equitable_l_coloring(&f, &l, &got, 3).unwrap());
        assert!(got.usage_of(Color(2)) <= 2 && got.usage_of(Color(3)) <= 2);

        assert!(matches!(
            solve_center_fixed(&f, &l, 3, &[Color(4), Color(1)]),
            Err(Error::ColorNotInList { .. })
        ));
    }

    fn caps(pairs: &[(u32, usize)]) -> BTreeMap<Color, usize> {
        pairs.iter().map(|&(c, n)| (Color(c), n)).collect()
    }

    fn lists(raw: &[&[u32]]) -> Vec<Vec<Color>> {
        raw.iter().map(|l| l.iter().map(|&c| Color(c)).collect()).collect()
    }

    #[test]
    fn leaf_assignment_examples() {
        let got = leaf_assignment(&lists(&[&[1, 2], &[1, 2]]), &[None, None], &caps(&[(1, 1), (2, 1)]))
            .unwrap()
            .unwrap();
        assert_eq!(got, vec![Color(1), Color(2)]);

        let got = leaf_assignment(
            &lists(&[&[1, 2], &[1, 2], &[1, 2]]),
            &[None, None, None],
            &caps(&[(1, 1), (2, 1)]),
        )
        .unwrap();
        assert_eq!(got, None);

        let one = Some(Color(1));
        let got = leaf_assignment(
            &lists(&[&[1, 3], &[1, 4], &[2, 3]]),
            &[one, one, one],
            &caps(&[(2, 1), (3, 1), (4, 1)]),
        )
        .unwrap()
        .unwrap();
        assert_eq!(got, vec![Color(3), Color(4), Color(2)]);
    }

    #[test]
    fn leaf_assignment_reroutes() {
        // the first leaf grabs color 1, the second forces it onto 2
        let got = leaf_assignment(&lists(&[&[1, 2], &[1]]), &[None, None], &caps(&[(1, 1), (2, 1)]))
            .unwrap()
            .unwrap();
        assert_eq!(got, vec![Color(2), Color(1)]);
    }

    #[test]
    fn capped_solver_handles_uneven_lists() {
        let f = forest(&[2]);
        let l = ListAssignment::from_raw(&f, &[&[1], &[2, 3], &[2]]).unwrap();
        let out = solve_capped(&f, &l, 1, None).unwrap();
        assert_eq!(out.witness.unwrap(), Coloring::from_raw(&f, &[1, 3, 2]).unwrap());
        assert!(solve_capped(&f, &l, 1, Some(Strategy::Backtracking)).unwrap().colorable);
    }

    #[test]
    fn outcome_serializes_with_strategy_tag() {
        let f = forest(&[1, 1]);
        let out = solve(&f, &constant(&f, 2), 2).unwrap();
        let v = out.to_json_value();
        assert_eq!(v["strategy"], "usage-vector-DP");
        assert_eq!(v["colorable"], true);
        let w = Coloring::from_json_value(&f, v["witness"].clone()).unwrap();
        assert!(w.is_total());
    }

    #[test]
    fn node_limit_aborts() {
        let f = forest(&[3, 3, 3]);
        let dense = DenseLists::new(&constant(&f, 5));
        let mut nodes = 0;
        let r = run_dense(&f, &dense.lists, 5, 3, Strategy::CenterEnumeration, &mut nodes, Some(0));
        assert_eq!(r, Err(Aborted));
    }
}
