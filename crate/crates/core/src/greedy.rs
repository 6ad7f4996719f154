//! Equitable list coloring of two stars by layers: the greedy process that
//! peels off full color classes of size `rho` from the leaves, the exchange
//! moves that balance what is left, and the case analysis that finishes the
//! residual two-star instance.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::Serialize;
use serde_json::{json, Value};

use crate::closed_form::thm_main_sufficient;
use crate::error::{Error, Result};
use crate::model::{is_capped_l_coloring, rho, Color, Coloring, ListAssignment, StarForest, VertexId};
use crate::solver::solve;

/// One class placed by the greedy process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyClass {
    pub color: Color,
    pub vertices: Vec<VertexId>,
}

impl GreedyClass {
    fn to_json(&self) -> Value {
        json!({
            "color": self.color,
            "vertices": self.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct GreedyOutcome {
    pub k: usize,
    pub rho: usize,
    pub classes: Vec<GreedyClass>,
    /// Colors exactly the vertices of the classes.
    pub partial: Coloring,
    /// Remaining lists on uncolored vertices, `None` on colored ones.
    pub residual_lists: Vec<Option<Vec<Color>>>,
    pub trace: Vec<Value>,
}

impl GreedyOutcome {
    /// Uncolored leaves per component.
    pub fn residual_leaves(&self, forest: &StarForest) -> Vec<usize> {
        (0..forest.component_count())
            .map(|c| forest.leaf_range(c).filter(|&v| self.residual_lists[v].is_some()).count())
            .collect()
    }

    /// Colors lying in at least `rho` residual leaf lists, with their counts.
    pub fn popular_colors(&self, forest: &StarForest) -> Vec<(Color, usize)> {
        popular(forest, &self.residual_lists, self.rho)
    }

    /// Checks the structural guarantees of the process against the input.
    pub fn check_invariants(&self, forest: &StarForest, lists: &ListAssignment) -> std::result::Result<(), String> {
        if self.classes.len() > self.k.saturating_sub(2) {
            return Err(format!("{} classes placed, at most {} allowed", self.classes.len(), self.k - 2));
        }
        let mut seen = Vec::new();
        let mut covered = vec![false; forest.vertex_count()];
        for class in &self.classes {
            if seen.contains(&class.color) {
                return Err(format!("color {} used by two classes", class.color));
            }
            seen.push(class.color);
            if class.vertices.len() != self.rho {
                return Err(format!("class of color {} has {} vertices", class.color, class.vertices.len()));
            }
            for v in &class.vertices {
                if v.is_center() {
                    return Err(format!("center {v} placed in a class"));
                }
                let i = forest.index(*v).map_err(|e| e.to_string())?;
                if covered[i] {
                    return Err(format!("vertex {v} in two classes"));
                }
                covered[i] = true;
                if self.partial.at(i) != Some(class.color) || lists.list_at(i).binary_search(&class.color).is_err() {
                    return Err(format!("vertex {v} not colored {} from its list", class.color));
                }
            }
        }
        for (i, &cov) in covered.iter().enumerate() {
            match (&self.residual_lists[i], cov) {
                (None, true) => {}
                (Some(l), false) => {
                    if self.partial.at(i).is_some() {
                        return Err(format!("residual vertex {} is colored", forest.vertex(i)));
                    }
                    let expect: Vec<Color> =
                        lists.list_at(i).iter().copied().filter(|c| !seen.contains(c)).collect();
                    if *l != expect {
                        return Err(format!("residual list of {} is wrong", forest.vertex(i)));
                    }
                    if l.len() < 2 {
                        return Err(format!("residual list of {} has fewer than 2 colors", forest.vertex(i)));
                    }
                }
                _ => return Err(format!("vertex {} is both colored and residual", forest.vertex(i))),
            }
        }
        if !self.popular_colors(forest).is_empty() && self.classes.len() != self.k - 2 {
            return Err("a popular color remains but fewer than k-2 classes were placed".into());
        }
        Ok(())
    }
}

fn popular(forest: &StarForest, residual: &[Option<Vec<Color>>], rho: usize) -> Vec<(Color, usize)> {
    let mut counts: BTreeMap<Color, usize> = BTreeMap::new();
    for comp in 0..forest.component_count() {
        for v in forest.leaf_range(comp) {
            for &c in residual[v].iter().flatten() {
                *counts.entry(c).or_default() += 1;
            }
        }
    }
    counts.into_iter().filter(|&(_, n)| n >= rho).collect()
}

/// Highest count first, then smallest color.
fn most_popular(popular: &[(Color, usize)]) -> Option<(Color, usize)> {
    popular.iter().copied().min_by_key(|&(c, n)| (std::cmp::Reverse(n), c))
}

fn check_two_stars(forest: &StarForest, lists: &ListAssignment, k: usize) -> Result<()> {
    if forest.component_count() != 2 {
        return Err(Error::Hypothesis(format!(
            "expected two stars, got {} components",
            forest.component_count()
        )));
    }
    if forest != lists.forest() {
        return Err(Error::ShapeMismatch);
    }
    lists.check_k_assignment(k)
}

/// Runs the greedy process: while fewer than `k-2` classes are placed and
/// some unused color lies in at least `rho` lists of uncolored leaves, color
/// `rho` such leaves with it.
///
/// The color is the one with the most such leaves (smallest on ties). Leaves
/// are taken one at a time from the star with more uncolored leaves among
/// stars that still have an eligible one (lower component, then lower slot,
/// on ties).
pub fn run_eps_greedy(forest: &StarForest, lists: &ListAssignment, k: usize) -> Result<GreedyOutcome> {
    check_two_stars(forest, lists, k)?;
    if k < 3 {
        return Err(Error::InvalidParameters(format!("the greedy process needs k >= 3, got {k}")));
    }
    let rho = rho(forest, k)?.get();
    let mut residual: Vec<Option<Vec<Color>>> = lists.lists().iter().map(|l| Some(l.clone())).collect();
    let mut partial = Coloring::empty(forest);
    let mut classes = Vec::new();
    let mut trace = Vec::new();
    while classes.len() < k - 2 {
        let Some((color, count)) = most_popular(&popular(forest, &residual, rho)) else {
            break;
        };
        let mut eligible: Vec<Vec<usize>> = (0..2)
            .map(|comp| {
                forest
                    .leaf_range(comp)
                    .filter(|&v| residual[v].as_ref().is_some_and(|l| l.contains(&color)))
                    .collect()
            })
            .collect();
        let mut uncolored: Vec<usize> = (0..2)
            .map(|comp| forest.leaf_range(comp).filter(|&v| residual[v].is_some()).count())
            .collect();
        let mut chosen = Vec::with_capacity(rho);
        for _ in 0..rho {
            let side = (0..2)
                .filter(|&s| !eligible[s].is_empty())
                .max_by_key(|&s| (uncolored[s], std::cmp::Reverse(s)))
                .expect("count >= rho guarantees an eligible leaf");
            let v = eligible[side].remove(0);
            uncolored[side] -= 1;
            chosen.push(v);
        }
        chosen.sort_unstable();
        for &v in &chosen {
            residual[v] = None;
            partial.set_index(v, color);
        }
        for l in residual.iter_mut().flatten() {
            l.retain(|&c| c != color);
        }
        let class = GreedyClass {
            color,
            vertices: chosen.iter().map(|&v| forest.vertex(v)).collect(),
        };
        trace.push(json!({
            "event": "class",
            "step": classes.len() + 1,
            "holders": count,
            "class": class.to_json(),
            "uncolored_leaves": uncolored,
        }));
        classes.push(class);
    }
    Ok(GreedyOutcome {
        k,
        rho,
        classes,
        partial,
        residual_lists: residual,
        trace,
    })
}

/// What the greedy outcome allows.
#[derive(Clone, Debug)]
pub enum Disposition {
    /// No popular color is left; the completion is an equitable coloring.
    ColorableNow(Coloring),
    /// A popular color remains and exactly `k-2` classes were placed.
    NeedRebalance(RebalanceState),
}

/// Colors the uncolored vertices from their residual lists. Center colors
/// are tried in lexicographic order; leaves take their smallest color that
/// avoids the center and keeps usage within `cap`, if there is one. The
/// first completion within `cap` wins, otherwise the first one found.
fn complete_greedily(
    forest: &StarForest,
    residual: &[Option<Vec<Color>>],
    partial: &Coloring,
    cap: usize,
) -> Option<Coloring> {
    let choices: Vec<Vec<Color>> = (0..forest.component_count())
        .map(|comp| {
            let center = forest.offset(comp);
            match &residual[center] {
                Some(l) => l.clone(),
                None => partial.at(center).into_iter().collect(),
            }
        })
        .collect();
    let mut first = None;
    'centers: for centers in choices.iter().map(|c| c.iter().copied()).multi_cartesian_product() {
        let mut coloring = partial.clone();
        for (comp, &cc) in centers.iter().enumerate() {
            coloring.set_index(forest.offset(comp), cc);
        }
        for (comp, &cc) in centers.iter().enumerate() {
            for v in forest.leaf_range(comp) {
                if let Some(l) = &residual[v] {
                    let mut ok = l.iter().copied().filter(|&c| c != cc);
                    let Some(pick) = ok.clone().find(|&c| coloring.usage_of(c) < cap).or_else(|| ok.next()) else {
                        continue 'centers;
                    };
                    coloring.set_index(v, pick);
                }
            }
        }
        if coloring.usage().values().all(|&n| n <= cap) {
            return Some(coloring);
        }
        first.get_or_insert(coloring);
    }
    first
}


pub fn post_greedy_disposition(
    forest: &StarForest,
    lists: &ListAssignment,
    outcome: &GreedyOutcome,
) -> Result<Disposition> {
    if outcome.popular_colors(forest).is_empty() {
        let coloring = complete_greedily(forest, &outcome.residual_lists, &outcome.partial, outcome.rho)
            .ok_or_else(|| Error::Construction("a residual list ran out of colors".into()))?;
        if !is_capped_l_coloring(forest, lists, &coloring, outcome.rho) {
            return Err(Error::Construction("greedy completion is not equitable".into()));
        }
        return Ok(Disposition::ColorableNow(coloring));
    }
    if outcome.classes.len() != outcome.k - 2 {
        return Err(Error::Construction(format!(
            "a popular color remains after only {} of {} classes",
            outcome.classes.len(),
            outcome.k - 2
        )));
    }
    Ok(Disposition::NeedRebalance(RebalanceState {
        rho: outcome.rho,
        classes: outcome.classes.clone(),
        coloring: outcome.partial.clone(),
    }))
}

/// `k-2` full classes on leaves, with the leaves they leave uncolored.
#[derive(Clone, Debug)]
pub struct RebalanceState {
    pub rho: usize,
    pub classes: Vec<GreedyClass>,
    pub coloring: Coloring,
}

impl RebalanceState {
    /// Uncolored leaves of a component, by slot.
    pub fn uncolored(&self, forest: &StarForest, comp: usize) -> Vec<usize> {
        forest.leaf_range(comp).filter(|&v| self.coloring.at(v).is_none()).collect()
    }

    pub fn mu(&self, forest: &StarForest) -> [usize; 2] {
        [self.uncolored(forest, 0).len(), self.uncolored(forest, 1).len()]
    }

    fn is_valid(&self, forest: &StarForest, lists: &ListAssignment) -> bool {
        let mut total = 0;
        for class in &self.classes {
            if class.vertices.len() != self.rho {
                return false;
            }
            for v in &class.vertices {
                let Ok(i) = forest.index(*v) else { return false };
                if v.is_center()
                    || self.coloring.at(i) != Some(class.color)
                    || lists.list_at(i).binary_search(&class.color).is_err()
                {
                    return false;
                }
                total += 1;
            }
        }
        total == self.coloring.colored_count()
    }
}

/// One exchange: `from` (colored, light star) gives its color to `to`
/// (uncolored, heavy star).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exchange {
    pub color: Color,
    pub from: String,
    pub to: String,
}

/// Applies exchange moves while the uncolored leaf counts differ by two or
/// more: an uncolored leaf of the heavier star whose list holds the color of
/// a colored leaf of the lighter star takes over that color. Each move
/// shrinks the difference by two; stops when balanced or no move applies.
pub fn rebalance(
    forest: &StarForest,
    lists: &ListAssignment,
    mut state: RebalanceState,
) -> Result<(RebalanceState, Vec<Exchange>)> {
    if !state.is_valid(forest, lists) {
        return Err(Error::Construction("rebalance state is not a set of full classes".into()));
    }
    let mut moves = Vec::new();
    'outer: loop {
        let mu = state.mu(forest);
        if mu[0].abs_diff(mu[1]) <= 1 {
            break;
        }
        let (heavy, light) = if mu[0] > mu[1] { (0, 1) } else { (1, 0) };
        for x in state.uncolored(forest, heavy) {
            for y in forest.leaf_range(light) {
                let Some(c) = state.coloring.at(y) else { continue };
                if lists.list_at(x).binary_search(&c).is_err() {
                    continue;
                }
                state.coloring.clear_index(y);
                state.coloring.set_index(x, c);
                let class = state.classes.iter_mut().find(|cl| cl.color == c).expect("color has a class");
                let pos = class.vertices.iter().position(|&v| v == forest.vertex(y)).expect("holder listed");
                class.vertices[pos] = forest.vertex(x);
                class.vertices.sort_unstable();
                moves.push(Exchange {
                    color: c,
                    from: forest.vertex(y).to_string(),
                    to: forest.vertex(x).to_string(),
                });
                continue 'outer;
            }
        }
        break;
    }
    Ok((state, moves))
}

/// Colors two stars (first with `m1 >= 0` leaves, second with
/// `m2 >= max(2, m1)`) when every second-star leaf has at least 3 colors,
/// every other vertex at least 2, and `c` lies in at least
/// `sigma = floor((m1+m2+2)/2)` leaf lists. No color is used more than
/// `sigma` times.
///
/// First-star leaves holding `c` get `c`, second-star leaves holding `c`
/// (lowest slots first) top `c` up to exactly `sigma` uses, then centers and
/// remaining leaves are colored greedily from their lists minus `c`.
pub fn lemma_reduce_color(forest: &StarForest, lists: &ListAssignment, c: Color) -> Result<Coloring> {
    if forest.component_count() != 2 || forest != lists.forest() {
        return Err(Error::Hypothesis("expected a two-star forest and matching lists".into()));
    }
    let (m1, m2) = (forest.leaves(0), forest.leaves(1));
    if m2 < m1.max(2) {
        return Err(Error::Hypothesis(format!("m2 >= max(2, m1) fails for ({m1}, {m2})")));
    }
    for v in 0..forest.vertex_count() {
        let need = if forest.component_of(v) == 1 && !forest.vertex(v).is_center() { 3 } else { 2 };
        if lists.list_at(v).len() < need {
            return Err(Error::Hypothesis(format!(
                "vertex {} has {} colors, needs at least {need}",
                forest.vertex(v),
                lists.list_at(v).len()
            )));
        }
    }
    let sigma = (m1 + m2 + 2) / 2;
    let holds = |v: usize| lists.list_at(v).binary_search(&c).is_ok();
    let holders = (0..2).flat_map(|comp| forest.leaf_range(comp)).filter(|&v| holds(v)).count();
    if holders < sigma {
        return Err(Error::Hypothesis(format!(
            "color {c} lies in {holders} leaf lists, needs at least {sigma}"
        )));
    }

    let mut coloring = Coloring::empty(forest);
    let mut used = 0;
    for v in forest.leaf_range(0).filter(|&v| holds(v)) {
        coloring.set_index(v, c);
        used += 1;
    }
    for v in forest.leaf_range(1).filter(|&v| holds(v)) {
        if used == sigma {
            break;
        }
        coloring.set_index(v, c);
        used += 1;
    }
    let residual: Vec<Option<Vec<Color>>> = (0..forest.vertex_count())
        .map(|v| {
            coloring
                .at(v)
                .is_none()
                .then(|| lists.list_at(v).iter().copied().filter(|&x| x != c).collect())
        })
        .collect();
    let coloring = complete_greedily(forest, &residual, &coloring, sigma)
        .ok_or_else(|| Error::Construction("a list ran out of colors".into()))?;
    if !is_capped_l_coloring(forest, lists, &coloring, sigma) {
        return Err(Error::Construction(format!("result uses a color more than {sigma} times")));
    }
    Ok(coloring)
}

/// Which branch produced the coloring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MainPath {
    /// k <= 2: handed to the exact solver.
    ExactSmallK,
    /// rho = 1: every vertex needs its own color.
    DistinctColors,
    /// No popular color after the greedy classes (or after exchanges).
    NoPopularColor,
    /// Uncolored leaf counts differ by at most one.
    BalancedResidual,
    /// The heavier side keeps 3+ colors per leaf: reduce around a popular color.
    ReduceHeavySide,
    /// The small star is entirely uncolored: strip surplus big-star leaves.
    StripAndExtend,
    /// A step's precondition failed; the exact solver finished the job.
    Fallback,
}

#[derive(Clone, Debug)]
pub struct MainOutcome {
    pub coloring: Option<Coloring>,
    pub path: MainPath,
    pub fallback_reason: Option<String>,
    pub exchanges: Vec<Exchange>,
    pub trace: Vec<Value>,
}

impl MainOutcome {
    pub fn used_fallback(&self) -> bool {
        self.path == MainPath::Fallback
    }

    /// The trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        self.trace.iter().map(|e| e.to_string() + "\n").collect()
    }
}

/// A residual two-star instance carved out of the original forest.
struct SubInstance {
    forest: StarForest,
    lists: ListAssignment,
    /// sub-forest vertex index -> original vertex index
    map: Vec<usize>,
}

impl SubInstance {
    fn new(
        forest: &StarForest,
        stars: [(usize, &[usize]); 2],
        list_of: impl Fn(usize) -> Vec<Color>,
    ) -> Result<Self> {
        let sub = StarForest::new(vec![stars[0].1.len(), stars[1].1.len()])?;
        let mut map = Vec::with_capacity(sub.vertex_count());
        for (center, leaves) in stars {
            map.push(forest.offset(center));
            map.extend_from_slice(leaves);
        }
        let lists = ListAssignment::new(&sub, map.iter().map(|&v| list_of(v)).collect())?;
        Ok(SubInstance { forest: sub, lists, map })
    }

    fn write_back(&self, sub: &Coloring, into: &mut Coloring) {
        for (i, &v) in self.map.iter().enumerate() {
            if let Some(c) = sub.at(i) {
                into.set_index(v, c);
            }
        }
    }
}

/// Colors two stars `K_{1,m1} + K_{1,m2}` (in either order) satisfying
/// `m2 <= rho(k-1) - 1` and `m1 + m2 <= 15 + rho(k-2)` for the smaller `m1`
/// by the layered construction. Any failed step hands the instance to the
/// exact solver and marks the outcome as a fallback.
pub fn theorem_main_color(forest: &StarForest, lists: &ListAssignment, k: usize) -> Result<MainOutcome> {
    check_two_stars(forest, lists, k)?;
    let (m1, m2) = (forest.leaves(0), forest.leaves(1));
    let (lo, hi) = (m1.min(m2), m1.max(m2));
    if lo < 1 {
        return Err(Error::Hypothesis("both stars need at least one leaf".into()));
    }
    if !thm_main_sufficient(lo, hi, k) {
        return Err(Error::Hypothesis(format!(
            "({lo}, {hi}) with k = {k} is outside m2 <= rho(k-1)-1 and m1+m2 <= 15+rho(k-2)"
        )));
    }
    let rho = rho(forest, k)?.get();
    let mut trace = vec![json!({"event": "start", "stars": [m1, m2], "k": k, "rho": rho})];
    let exact = |path: MainPath, reason: Option<String>, mut trace: Vec<Value>, exchanges: Vec<Exchange>| {
        let outcome = solve(forest, lists, k)?;
        trace.push(json!({"event": "exact", "colorable": outcome.colorable, "reason": reason}));
        Ok(MainOutcome {
            coloring: outcome.witness,
            path,
            fallback_reason: reason,
            exchanges,
            trace,
        })
    };
    if k <= 2 {
        return exact(MainPath::ExactSmallK, None, trace, Vec::new());
    }
    if rho == 1 {
        return exact(MainPath::DistinctColors, None, trace, Vec::new());
    }
    // side 0 is the smaller star
    let sides = if m1 <= m2 { [0, 1] } else { [1, 0] };
    match layered(forest, lists, k, rho, sides, &mut trace) {
        Ok((coloring, path, exchanges)) => {
            if is_capped_l_coloring(forest, lists, &coloring, rho) {
                trace.push(json!({"event": "done", "path": path}));
                Ok(MainOutcome {
                    coloring: Some(coloring),
                    path,
                    fallback_reason: None,
                    exchanges,
                    trace,
                })
            } else {
                let reason = format!("{path:?} produced a coloring that fails verification");
                exact(MainPath::Fallback, Some(reason), trace, exchanges)
            }
        }
        Err((reason, exchanges)) => exact(MainPath::Fallback, Some(reason), trace, exchanges),
    }
}

type Layered = std::result::Result<(Coloring, MainPath, Vec<Exchange>), (String, Vec<Exchange>)>;

fn layered(
    forest: &StarForest,
    lists: &ListAssignment,
    k: usize,
    rho: usize,
    sides: [usize; 2],
    trace: &mut Vec<Value>,
) -> Layered {
    let fail = |reason: String| Err((reason, Vec::new()));
    let outcome = match run_eps_greedy(forest, lists, k) {
        Ok(o) => o,
        Err(e) => return fail(e.to_string()),
    };
    trace.extend(outcome.trace.iter().cloned());
    if let Err(e) = outcome.check_invariants(forest, lists) {
        return fail(format!("greedy invariant: {e}"));
    }
    let state = match post_greedy_disposition(forest, lists, &outcome) {
        Ok(Disposition::ColorableNow(c)) => return Ok((c, MainPath::NoPopularColor, Vec::new())),
        Ok(Disposition::NeedRebalance(s)) => s,
        Err(e) => return fail(e.to_string()),
    };
    let (state, exchanges) = match rebalance(forest, lists, state) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    for x in &exchanges {
        trace.push(json!({"event": "exchange", "color": x.color, "from": x.from, "to": x.to}));
    }
    let fail = |reason: String| Err((reason, exchanges.clone()));

    let used: Vec<Color> = state.classes.iter().map(|c| c.color).collect();
    let residual: Vec<Option<Vec<Color>>> = (0..forest.vertex_count())
        .map(|v| {
            state
                .coloring
                .at(v)
                .is_none()
                .then(|| lists.list_at(v).iter().copied().filter(|c| !used.contains(c)).collect())
        })
        .collect();
    let [a, b] = sides;
    let ua = state.uncolored(forest, a);
    let ub = state.uncolored(forest, b);
    let (mu_a, mu_b) = (ua.len(), ub.len());
    trace.push(json!({"event": "balanced", "mu_small": mu_a, "mu_big": mu_b}));

    let hot = popular(forest, &residual, rho);
    if hot.is_empty() {
        return match complete_greedily(forest, &residual, &state.coloring, rho) {
            Some(c) => Ok((c, MainPath::NoPopularColor, exchanges)),
            None => fail("a residual list ran out of colors".into()),
        };
    }
    let truncated = |v: usize| residual[v].as_ref().expect("residual vertex").iter().copied().take(2).collect();
    let full = |v: usize| residual[v].clone().expect("residual vertex");
    let mut coloring = state.coloring.clone();

    if mu_a.abs_diff(mu_b) <= 1 {
        trace.push(json!({"event": "case", "case": "balanced-residual"}));
        let sub = match SubInstance::new(forest, [(a, &ua), (b, &ub)], truncated) {
            Ok(s) => s,
            Err(e) => return fail(e.to_string()),
        };
        return match solve(&sub.forest, &sub.lists, 2) {
            Ok(out) if out.colorable => {
                sub.write_back(out.witness.as_ref().expect("witness"), &mut coloring);
                Ok((coloring, MainPath::BalancedResidual, exchanges))
            }
            Ok(_) => fail("residual two-star instance has no equitable 2-coloring".into()),
            Err(e) => fail(e.to_string()),
        };
    }

    let small_untouched = mu_a == forest.leaves(a);
    if mu_b >= mu_a + 2 && small_untouched {
        trace.push(json!({"event": "case", "case": "strip-and-extend"}));
        let d = mu_b - mu_a;
        let (stripped, kept) = ub.split_at(d);
        let sub = match SubInstance::new(forest, [(a, &ua), (b, kept)], truncated) {
            Ok(s) => s,
            Err(e) => return fail(e.to_string()),
        };
        let out = match solve(&sub.forest, &sub.lists, 2) {
            Ok(out) if out.colorable => out.witness.expect("witness"),
            Ok(_) => return fail("equal residual stars have no equitable 2-coloring".into()),
            Err(e) => return fail(e.to_string()),
        };
        sub.write_back(&out, &mut coloring);
        let big_center = coloring.at(forest.offset(b)).expect("center colored");
        for &v in stripped {
            let l: Vec<Color> = truncated(v);
            match l.into_iter().find(|&c| c != big_center) {
                Some(c) => coloring.set_index(v, c),
                None => return fail("stripped leaf has no color besides the center's".into()),
            }
        }
        return Ok((coloring, MainPath::StripAndExtend, exchanges));
    }

    // one side is heavier by two or more and its leaves keep 3+ colors
    let (light, heavy, ul, uh) = if mu_b > mu_a { (a, b, &ua, &ub) } else { (b, a, &ub, &ua) };
    trace.push(json!({"event": "case", "case": "reduce-heavy-side", "heavy_component": heavy}));
    let sub = match SubInstance::new(forest, [(light, ul), (heavy, uh)], full) {
        Ok(s) => s,
        Err(e) => return fail(e.to_string()),
    };
    let sub_hot = popular(&sub.forest, &sub.lists.lists().iter().cloned().map(Some).collect::<Vec<_>>(), 1);
    let (c, _) = most_popular(&sub_hot).expect("residual leaves exist");
    match lemma_reduce_color(&sub.forest, &sub.lists, c) {
        Ok(sc) => {
            sub.write_back(&sc, &mut coloring);
            Ok((coloring, MainPath::ReduceHeavySide, exchanges))
        }
        Err(e) => fail(e.to_string()),
    }
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

    #[test]
    fn greedy_on_constant_lists() {
        let f = forest(&[2, 2]);
        let l = constant(&f, 3);
        let out = run_eps_greedy(&f, &l, 3).unwrap();
        assert_eq!(out.rho, 2);
        assert_eq!(out.classes.len(), 1);
        assert_eq!(out.classes[0].color, Color(1));
        assert_eq!(out.classes[0].vertices, vec![VertexId::leaf(0, 1), VertexId::leaf(1, 1)]);
        assert_eq!(out.residual_lists[f.offset(1)], Some(vec![Color(2), Color(3)]));
        out.check_invariants(&f, &l).unwrap();
    }

    #[test]
    fn greedy_stops_without_popular_colors() {
        let f = forest(&[1, 1]);
        let l = ListAssignment::from_raw(&f, &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9], &[10, 11, 12]]).unwrap();
        let out = run_eps_greedy(&f, &l, 3).unwrap();
        assert!(out.classes.is_empty());
        let Disposition::ColorableNow(c) = post_greedy_disposition(&f, &l, &out).unwrap() else {
            panic!("expected a direct completion");
        };
        assert!(is_equitable_l_coloring(&f, &l, &c, 3).unwrap());
        assert!(run_eps_greedy(&f, &constant(&f, 2), 2).is_err());
    }

    #[test]
    fn constant_lists_need_rebalance() {
        let f = forest(&[8, 8]);
        let l = constant(&f, 4);
        let out = run_eps_greedy(&f, &l, 4).unwrap();
        out.check_invariants(&f, &l).unwrap();
        assert_eq!(out.classes.len(), 2);
        let Disposition::NeedRebalance(state) = post_greedy_disposition(&f, &l, &out).unwrap() else {
            panic!("a popular color remains");
        };
        let (state, moves) = rebalance(&f, &l, state).unwrap();
        assert!(moves.is_empty());
        assert_eq!(state.mu(&f), [3, 3]);
    }

    #[test]
    fn one_exchange_balances() {
        // classes of color 1 and 2 sit on the first star; the second star's
        // leaves can take color 1, so one move brings (1, 5) to (2, 4)...
        let f = forest(&[5, 5]);
        let l = constant(&f, 4);
        let mut coloring = Coloring::empty(&f);
        let mut classes = Vec::new();
        for (c, slots) in [(1u32, [1usize, 2]), (2, [3, 4])] {
            for s in slots {
                coloring.set(VertexId::leaf(0, s), Color(c)).unwrap();
            }
            classes.push(GreedyClass {
                color: Color(c),
                vertices: slots.iter().map(|&s| VertexId::leaf(0, s)).collect(),
            });
        }
        let rho = 2;
        let state = RebalanceState { rho, classes, coloring };
        assert_eq!(state.mu(&f), [1, 5]);
        let (state, moves) = rebalance(&f, &l, state).unwrap();
        assert_eq!(moves.len(), 2);
        assert_eq!(state.mu(&f), [3, 3]);
        assert!(state.is_valid(&f, &l));
        let (same, none) = rebalance(&f, &l, state.clone()).unwrap();
        assert!(none.is_empty());
        assert_eq!(same.mu(&f), [3, 3]);
    }

    #[test]
    fn lemma_reduce_examples() {
        let f = forest(&[0, 2]);
        let l = ListAssignment::from_raw(&f, &[&[1, 2], &[1, 2], &[1, 2, 3], &[1, 2, 3]]).unwrap();
        let c = lemma_reduce_color(&f, &l, Color(1)).unwrap();
        assert!(is_capped_l_coloring(&f, &l, &c, 2));
        assert!(c.usage_of(Color(1)) <= 2);
        let f = forest(&[0, 1]);
        let l = ListAssignment::from_raw(&f, &[&[1, 2], &[1, 2], &[1, 2, 3]]).unwrap();
        assert!(matches!(lemma_reduce_color(&f, &l, Color(1)), Err(Error::Hypothesis(_))));
        let f = forest(&[0, 2]);
        let l = ListAssignment::from_raw(&f, &[&[1, 2], &[1, 2], &[1, 2], &[1, 2, 3]]).unwrap();
        assert!(matches!(lemma_reduce_color(&f, &l, Color(1)), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn main_colorer_small_cases() {
        let f = forest(&[1, 1]);
        let l = constant(&f, 3);
        let out = theorem_main_color(&f, &l, 3).unwrap();
        assert!(is_equitable_l_coloring(&f, &l, out.coloring.as_ref().unwrap(), 3).unwrap());
        let f = forest(&[8, 8]);
        for k in [3u32, 4] {
            let l = constant(&f, k);
            let out = theorem_main_color(&f, &l, k as usize).unwrap();
            assert!(!out.used_fallback(), "{:?}", out.fallback_reason);
            assert!(is_equitable_l_coloring(&f, &l, out.coloring.as_ref().unwrap(), k as usize).unwrap());
        }
        let f = forest(&[8, 17]);
        assert!(matches!(theorem_main_color(&f, &constant(&f, 3), 3), Err(Error::Hypothesis(_))));
    }
}
