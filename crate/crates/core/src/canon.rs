//! Canonical forms of list assignments up to color renaming, leaf
//! permutations inside a star and swaps of equal-size stars, and orderly
//! generation of one representative per class.
//!
//! The canonical encoding of an assignment is the lexicographically least
//! sequence of lists (in forest vertex order) over every admissible vertex
//! reordering and every injective renaming of colors. For a fixed reordering
//! the least renaming is found by ordered partition refinement, so the search
//! only branches over vertex choices that tie on their encoded list.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::rc::Rc;

use itertools::Itertools;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rho, Color, ListAssignment, StarForest};

/// A list assignment in canonical form. Colors are `1..=palette_size` in
/// order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalAssignment {
    assignment: ListAssignment,
}

impl CanonicalAssignment {
    pub fn assignment(&self) -> &ListAssignment {
        &self.assignment
    }

    pub fn into_assignment(self) -> ListAssignment {
        self.assignment
    }

    pub fn forest(&self) -> &StarForest {
        self.assignment.forest()
    }

    pub fn encoding(&self) -> Vec<Vec<u32>> {
        self.assignment
            .lists()
            .iter()
            .map(|l| l.iter().map(|c| c.0).collect())
            .collect()
    }

    pub fn palette_size(&self) -> usize {
        self.assignment.palette().len()
    }

    pub(crate) fn from_encoding(forest: &StarForest, encoding: &[Vec<u32>]) -> Self {
        let lists = encoding
            .iter()
            .map(|l| l.iter().map(|&c| Color(c)).collect())
            .collect();
        CanonicalAssignment {
            assignment: ListAssignment::new(forest, lists).expect("encodings are non-empty lists"),
        }
    }
}

/// The symmetry taking an assignment to its canonical form: canonical
/// vertex `j` carries the renamed list of original vertex `order[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symmetry {
    pub order: Vec<usize>,
    pub colors: BTreeMap<Color, Color>,
}

impl Symmetry {
    pub fn apply(&self, lists: &ListAssignment) -> Result<ListAssignment> {
        let forest = lists.forest();
        if self.order.len() != forest.vertex_count() {
            return Err(Error::ShapeMismatch);
        }
        let mut out = Vec::with_capacity(self.order.len());
        for &v in &self.order {
            let mut l = Vec::with_capacity(lists.list_at(v).len());
            for c in lists.list_at(v) {
                l.push(*self.colors.get(c).ok_or(Error::ShapeMismatch)?);
            }
            out.push(l);
        }
        ListAssignment::new(forest, out)
    }
}

/// Canonical form of `lists`.
pub fn canonicalize(forest: &StarForest, lists: &ListAssignment) -> Result<CanonicalAssignment> {
    canonicalize_with_symmetry(forest, lists).map(|(c, _)| c)
}

/// Canonical form of `lists` together with a symmetry realizing it.
pub fn canonicalize_with_symmetry(
    forest: &StarForest,
    lists: &ListAssignment,
) -> Result<(CanonicalAssignment, Symmetry)> {
    if forest != lists.forest() {
        return Err(Error::ShapeMismatch);
    }
    let palette = lists.palette();
    let dense: Vec<Vec<u16>> = lists
        .lists()
        .iter()
        .map(|l| l.iter().map(|c| palette.binary_search(c).unwrap() as u16).collect())
        .collect();
    let mut search = Search::new(forest, &dense, palette.len(), forest.vertex_count(), None);
    search.run();
    let encoding = search.best.clone();
    let refinement = search.best_refinement.take().expect("search always reaches a leaf");
    let mut colors = BTreeMap::new();
    let mut next = 1u32;
    for block in &refinement.blocks {
        for &c in block.iter().sorted() {
            colors.insert(palette[c as usize], Color(next));
            next += 1;
        }
    }
    let symmetry = Symmetry {
        order: search.best_order.clone(),
        colors,
    };
    Ok((CanonicalAssignment::from_encoding(forest, &encoding), symmetry))
}

/// Whether `lists` is already in canonical form.
pub fn is_canonical(forest: &StarForest, lists: &ListAssignment) -> Result<bool> {
    if forest != lists.forest() {
        return Err(Error::ShapeMismatch);
    }
    let encoding: Vec<Vec<u32>> = lists
        .lists()
        .iter()
        .map(|l| l.iter().map(|c| c.0).collect())
        .collect();
    if !is_first_appearance(&encoding) {
        return Ok(false);
    }
    Ok(prefix_is_canonical(forest, &encoding))
}

fn is_first_appearance(encoding: &[Vec<u32>]) -> bool {
    let mut max = 0;
    for l in encoding {
        for &c in l {
            if c > max + 1 {
                return false;
            }
            if c == max + 1 {
                max = c;
            }
        }
    }
    true
}

/// Checks an encoded prefix (colors `1..`) of the forest's vertex sequence
/// against every symmetry of the induced sub-forest that extends to the
/// whole forest.
fn prefix_is_canonical(forest: &StarForest, encoding: &[Vec<u32>]) -> bool {
    let dense: Vec<Vec<u16>> = encoding
        .iter()
        .map(|l| l.iter().map(|&c| (c - 1) as u16).collect())
        .collect();
    let palette = encoding.iter().flatten().copied().max().unwrap_or(0) as usize;
    let mut search = Search::new(forest, &dense, palette, encoding.len(), Some(encoding.to_vec()));
    search.run();
    !search.smaller
}

/// Ordered partition of the colors seen so far. Encoding a list gives each
/// block's members in the list the lowest ids the block owns; colors not yet
/// seen get fresh ids after all blocks.
#[derive(Clone, Debug)]
struct Refinement {
    blocks: Vec<Vec<u16>>,
    block_of: Vec<u32>,
}

const UNSEEN: u32 = u32::MAX;

impl Refinement {
    fn new(palette: usize) -> Self {
        Refinement {
            blocks: Vec::new(),
            block_of: vec![UNSEEN; palette],
        }
    }

    fn encode(&self, list: &[u16]) -> Vec<u32> {
        let mut counts = vec![0u32; self.blocks.len()];
        let mut unseen = 0u32;
        for &c in list {
            match self.block_of[c as usize] {
                UNSEEN => unseen += 1,
                b => counts[b as usize] += 1,
            }
        }
        let mut out = Vec::with_capacity(list.len());
        let mut offset = 0u32;
        for (b, block) in self.blocks.iter().enumerate() {
            out.extend(offset + 1..=offset + counts[b]);
            offset += block.len() as u32;
        }
        out.extend(offset + 1..=offset + unseen);
        out
    }

    fn refine(&self, list: &[u16]) -> Self {
        let mut blocks = Vec::with_capacity(self.blocks.len() + 2);
        for block in &self.blocks {
            let (inside, outside): (Vec<u16>, Vec<u16>) =
                block.iter().partition(|c| list.contains(c));
            if !inside.is_empty() {
                blocks.push(inside);
            }
            if !outside.is_empty() {
                blocks.push(outside);
            }
        }
        let fresh: Vec<u16> = list
            .iter()
            .copied()
            .filter(|&c| self.block_of[c as usize] == UNSEEN)
            .collect();
        if !fresh.is_empty() {
            blocks.push(fresh);
        }
        let mut block_of = vec![UNSEEN; self.block_of.len()];
        for (b, block) in blocks.iter().enumerate() {
            for &c in block {
                block_of[c as usize] = b as u32;
            }
        }
        Refinement { blocks, block_of }
    }
}

/// Branch-and-bound over vertex orderings. Without a target it finds the
/// least encoding; with one it only asks whether something smaller exists.
struct Search<'a> {
    forest: &'a StarForest,
    lists: &'a [Vec<u16>],
    palette: usize,
    len: usize,
    /// per position: (component, leaves present, component fully present)
    positions: Vec<(usize, usize, bool)>,
    /// per component present: signature for deduplicating identical stars
    signatures: Vec<Vec<Vec<u16>>>,
    check: bool,
    best: Vec<Vec<u32>>,
    best_order: Vec<usize>,
    best_refinement: Option<Refinement>,
    have_best: bool,
    version: u64,
    smaller: bool,
    cur: Vec<Vec<u32>>,
    order: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(
        forest: &'a StarForest,
        lists: &'a [Vec<u16>],
        palette: usize,
        len: usize,
        target: Option<Vec<Vec<u32>>>,
    ) -> Self {
        let mut positions = Vec::new();
        let mut signatures = Vec::new();
        for comp in 0..forest.component_count() {
            let off = forest.offset(comp);
            if off >= len {
                break;
            }
            let present = (off + 1 + forest.leaves(comp)).min(len) - off - 1;
            let complete = present == forest.leaves(comp);
            positions.push((comp, present, complete));
            let mut sig = vec![lists[off].clone()];
            let mut leaves: Vec<Vec<u16>> = (off + 1..off + 1 + present).map(|v| lists[v].clone()).collect();
            leaves.sort();
            sig.extend(leaves);
            signatures.push(sig);
        }
        let check = target.is_some();
        Search {
            forest,
            lists,
            palette,
            len,
            signatures,
            check,
            have_best: check,
            best: target.unwrap_or_default(),
            best_order: Vec::new(),
            best_refinement: None,
            version: 0,
            smaller: false,
            cur: Vec::with_capacity(len),
            order: Vec::with_capacity(len),
            used: vec![false; positions.len()],
            positions,
        }
    }

    fn run(&mut self) {
        let start = Refinement::new(self.palette);
        let less = !self.have_best;
        self.dfs(0, Vec::new(), false, &start, less);
    }

    fn dfs(&mut self, pos: usize, remaining: Vec<usize>, in_comp: bool, part: &Refinement, less: bool) {
        if self.smaller {
            return;
        }
        let depth = self.cur.len();
        if depth == self.len {
            if !self.check && (less || !self.have_best) {
                self.best = self.cur.clone();
                self.best_order = self.order.clone();
                self.best_refinement = Some(part.clone());
                self.have_best = true;
                self.version += 1;
            }
            return;
        }
        if in_comp && remaining.is_empty() {
            return self.dfs(pos + 1, remaining, false, part, less);
        }

        // candidates: (vertex, component if this places a center)
        let mut cands: Vec<(usize, Option<usize>)> = Vec::new();
        if in_comp {
            for (i, &v) in remaining.iter().enumerate() {
                if remaining[..i].iter().all(|&u| self.lists[u] != self.lists[v]) {
                    cands.push((v, None));
                }
            }
        } else {
            let (_, present, complete) = self.positions[pos];
            let size = self.forest.leaves(self.positions[pos].0);
            let mut seen: Vec<usize> = Vec::new();
            for (q, &(comp, p, c)) in self.positions.iter().enumerate() {
                let eligible = if complete {
                    c && self.forest.leaves(comp) == size
                } else {
                    q == pos && p == present
                };
                if !eligible || self.used[q] {
                    continue;
                }
                if seen.iter().any(|&s| self.signatures[s] == self.signatures[q]) {
                    continue;
                }
                seen.push(q);
                cands.push((self.forest.offset(comp), Some(q)));
            }
        }

        let encoded: Vec<Vec<u32>> = cands.iter().map(|&(v, _)| part.encode(&self.lists[v])).collect();
        let min = encoded.iter().min().expect("at least one candidate").clone();

        let mut less_now = less;
        let mut version = self.version;
        for (i, &(v, comp)) in cands.iter().enumerate() {
            if encoded[i] != min {
                continue;
            }
            let child_less = if less_now || !self.have_best {
                true
            } else {
                match min.cmp(&self.best[depth]) {
                    Ordering::Greater => return,
                    Ordering::Less => {
                        if self.check {
                            self.smaller = true;
                            return;
                        }
                        true
                    }
                    Ordering::Equal => false,
                }
            };
            let next = part.refine(&self.lists[v]);
            self.cur.push(min.clone());
            self.order.push(v);
            match comp {
                Some(q) => {
                    self.used[q] = true;
                    let (c, present, _) = self.positions[q];
                    let off = self.forest.offset(c);
                    let leaves: Vec<usize> = (off + 1..off + 1 + present).collect();
                    self.dfs(pos, leaves, true, &next, child_less);
                    self.used[q] = false;
                }
                None => {
                    let rest: Vec<usize> = remaining.iter().copied().filter(|&u| u != v).collect();
                    self.dfs(pos, rest, true, &next, child_less);
                }
            }
            self.cur.pop();
            self.order.pop();
            if self.smaller {
                return;
            }
            if self.version != version {
                // the new best runs through the current prefix
                less_now = false;
                version = self.version;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnumerationStatus {
    Complete,
    Stopped,
    BudgetExceeded,
}

#[derive(Clone, Debug, Default)]
pub struct EnumerateOptions {
    /// Largest color allowed. `None` means `k * |V|`, which loses nothing.
    pub palette_bound: Option<usize>,
    /// Stop with [`EnumerationStatus::BudgetExceeded`] after this many classes.
    pub max_classes: Option<u64>,
    /// Skip classes containing a free color: one whose holders are pairwise
    /// non-adjacent and number at most `rho`. Such a color can be traded for
    /// another one at any holder without creating an equitable coloring, so
    /// if any assignment defeats the forest then one without free colors
    /// does too. Has no effect on edgeless forests.
    pub skip_free_colors: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationManifest {
    pub forest: StarForest,
    pub k: usize,
    pub palette_bound: usize,
    pub heuristic_bound: bool,
    pub skip_free_colors: bool,
    pub status: EnumerationStatus,
    pub classes: u64,
}

impl EnumerationManifest {
    pub fn complete(&self) -> bool {
        self.status == EnumerationStatus::Complete
    }
}

/// Emits one canonical representative of every class of `k`-assignments,
/// in increasing lexicographic order of encodings.
pub fn enumerate_canonical(
    forest: &StarForest,
    k: usize,
    options: &EnumerateOptions,
    mut visit: impl FnMut(&CanonicalAssignment) -> ControlFlow<()>,
) -> Result<EnumerationManifest> {
    enumerate_encodings(forest, k, options, |enc| {
        visit(&CanonicalAssignment::from_encoding(forest, enc))
    })
}

/// Same as [`enumerate_canonical`] but hands out raw encodings.
pub(crate) fn enumerate_encodings(
    forest: &StarForest,
    k: usize,
    options: &EnumerateOptions,
    visit: impl FnMut(&[Vec<u32>]) -> ControlFlow<()>,
) -> Result<EnumerationManifest> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let full = k * forest.vertex_count();
    let bound = options.palette_bound.unwrap_or(full);
    if bound < k {
        return Err(Error::PaletteTooSmall { palette: bound, k });
    }
    let bound = bound.min(full);
    let skip_free = options.skip_free_colors && forest.has_edge();
    let mut gen = Generator::new(forest, k, bound, rho(forest, k)?.get(), skip_free, options.max_classes, visit);
    let _ = gen.extend(0, 0);
    Ok(EnumerationManifest {
        forest: forest.clone(),
        k,
        palette_bound: bound,
        heuristic_bound: bound < full,
        skip_free_colors: skip_free,
        status: gen.status,
        classes: gen.classes,
    })
}

struct Generator<'a, F> {
    forest: &'a StarForest,
    k: usize,
    bound: usize,
    rho: usize,
    skip_free: bool,
    max_classes: Option<u64>,
    visit: F,
    status: EnumerationStatus,
    classes: u64,
    lists: Vec<Vec<u32>>,
    candidates: Vec<Option<Rc<Vec<Vec<u32>>>>>,
    /// nearest earlier component with the same number of leaves
    twin: Vec<Option<usize>>,
    /// per color (1-based): holders, and edges whose both ends hold it
    holders: Vec<usize>,
    clashes: Vec<usize>,
    /// first vertex of each later component that has leaves, by component
    leafy_after: Vec<bool>,
}

impl<'a, F: FnMut(&[Vec<u32>]) -> ControlFlow<()>> Generator<'a, F> {
    fn new(
        forest: &'a StarForest,
        k: usize,
        bound: usize,
        rho: usize,
        skip_free: bool,
        max_classes: Option<u64>,
        visit: F,
    ) -> Self {
        let n = forest.component_count();
        let twin = (0..n)
            .map(|i| (0..i).rev().find(|&j| forest.leaves(j) == forest.leaves(i)))
            .collect();
        let leafy_after = (0..n)
            .map(|i| (i + 1..n).any(|j| forest.leaves(j) > 0))
            .collect();
        Generator {
            forest,
            k,
            bound,
            rho,
            skip_free,
            max_classes,
            visit,
            status: EnumerationStatus::Complete,
            classes: 0,
            lists: Vec::with_capacity(forest.vertex_count()),
            candidates: vec![None; bound + 1],
            twin,
            holders: vec![0; bound + 2],
            clashes: vec![0; bound + 2],
            leafy_after,
        }
    }

    /// Lists usable when colors `1..=max` are in use: any k-set whose colors
    /// above `max` are exactly `max+1..=max+t`, in lexicographic order.
    fn candidates(&mut self, max: usize) -> Rc<Vec<Vec<u32>>> {
        if let Some(c) = &self.candidates[max] {
            return Rc::clone(c);
        }
        let top = (max + self.k).min(self.bound) as u32;
        let list: Vec<Vec<u32>> = (1..=top)
            .combinations(self.k)
            .filter(|s| {
                let fresh: Vec<u32> = s.iter().copied().filter(|&c| c as usize > max).collect();
                fresh.iter().enumerate().all(|(i, &c)| c as usize == max + 1 + i)
            })
            .collect();
        let list = Rc::new(list);
        self.candidates[max] = Some(Rc::clone(&list));
        list
    }

    fn extend(&mut self, j: usize, max: usize) -> ControlFlow<()> {
        if j == self.forest.vertex_count() {
            if let Some(limit) = self.max_classes {
                if self.classes >= limit {
                    self.status = EnumerationStatus::BudgetExceeded;
                    return ControlFlow::Break(());
                }
            }
            self.classes += 1;
            if (self.visit)(&self.lists).is_break() {
                self.status = EnumerationStatus::Stopped;
                return ControlFlow::Break(());
            }
            return ControlFlow::Continue(());
        }
        let comp = self.forest.component_of(j);
        let off = self.forest.offset(comp);
        let slot = j - off;
        let cands = self.candidates(max);
        for cand in cands.iter() {
            if slot >= 2 && *cand < self.lists[j - 1] {
                continue;
            }
            if let Some(t) = self.twin[comp] {
                let toff = self.forest.offset(t);
                if self.lists[off..j] == self.lists[toff..toff + slot] && *cand < self.lists[toff + slot] {
                    continue;
                }
            }
            let new_max = max.max(*cand.last().unwrap() as usize);
            self.push(j, comp, cand);
            let keep = (!self.skip_free || self.free_colors_fixable(j, comp, new_max))
                && prefix_is_canonical(self.forest, &self.lists);
            let flow = if keep {
                self.extend(j + 1, new_max)
            } else {
                ControlFlow::Continue(())
            };
            self.pop(j, comp);
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn push(&mut self, j: usize, comp: usize, list: &[u32]) {
        let center = self.forest.offset(comp);
        for &c in list {
            self.holders[c as usize] += 1;
            if j != center && self.lists[center].binary_search(&c).is_ok() {
                self.clashes[c as usize] += 1;
            }
        }
        self.lists.push(list.to_vec());
    }

    fn pop(&mut self, j: usize, comp: usize) {
        let list = self.lists.pop().unwrap();
        let center = self.forest.offset(comp);
        for &c in &list {
            self.holders[c as usize] -= 1;
            if j != center && self.lists[center].binary_search(&c).is_ok() {
                self.clashes[c as usize] -= 1;
            }
        }
    }

    /// Whether the vertices after `j` can still leave no free color behind.
    fn free_colors_fixable(&self, j: usize, comp: usize, max: usize) -> bool {
        let left = self.forest.vertex_count() - j - 1;
        let center = self.forest.offset(comp);
        let leaves_left_here = j + 1 < center + 1 + self.forest.leaves(comp);
        let mut total = 0;
        for c in 1..=max {
            if self.clashes[c] > 0 || self.holders[c] > self.rho {
                continue;
            }
            let mut need = self.rho + 1 - self.holders[c];
            if leaves_left_here && self.lists[center].binary_search(&(c as u32)).is_ok() {
                need = need.min(1);
            }
            if self.leafy_after[comp] {
                need = need.min(2);
            }
            if need > left {
                return false;
            }
            total += need;
        }
        total <= left * self.k
    }
}

/// Independent uniform `k`-subsets of `1..=palette_size` per vertex.
pub fn sample_assignment(
    forest: &StarForest,
    k: usize,
    palette_size: usize,
    seed: u64,
) -> Result<ListAssignment> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if palette_size < k {
        return Err(Error::PaletteTooSmall { palette: palette_size, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(forest, k, palette_size, &mut rng)
}

pub(crate) fn sample_with(
    forest: &StarForest,
    k: usize,
    palette_size: usize,
    rng: &mut impl rand::Rng,
) -> Result<ListAssignment> {
    ListAssignment::from_fn(forest, |_| {
        let mut l: Vec<Color> = index::sample(rng, palette_size, k)
            .into_iter()
            .map(|i| Color(i as u32 + 1))
            .collect();
        l.sort();
        l
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn forest(stars: &[usize]) -> StarForest {
        StarForest::new(stars.to_vec()).unwrap()
    }

    fn count(f: &StarForest, k: usize, skip_free: bool) -> u64 {
        let opts = EnumerateOptions {
            skip_free_colors: skip_free,
            ..Default::default()
        };
        let m = enumerate_canonical(f, k, &opts, |_| ControlFlow::Continue(())).unwrap();
        assert!(m.complete());
        m.classes
    }

    #[test]
    fn single_edge_counts() {
        assert_eq!(count(&forest(&[1]), 1, false), 2);
        assert_eq!(count(&forest(&[1]), 2, false), 3);
    }

    #[test]
    fn relabeling_example() {
        let f = forest(&[1]);
        let l = ListAssignment::from_raw(&f, &[&[7, 3], &[3, 9]]).unwrap();
        let (c, sym) = canonicalize_with_symmetry(&f, &l).unwrap();
        // lists are sets, so the shared color is renamed 1 in the least encoding
        assert_eq!(c.encoding(), vec![vec![1, 2], vec![1, 3]]);
        assert_eq!(sym.colors[&Color(3)], Color(1));
        assert_eq!(sym.apply(&l).unwrap(), *c.assignment());
    }

    #[test]
    fn swapped_equal_stars_agree() {
        let f = forest(&[1, 1]);
        let a = ListAssignment::from_raw(&f, &[&[1, 2], &[3, 4], &[5, 6], &[5, 7]]).unwrap();
        let b = ListAssignment::from_raw(&f, &[&[5, 6], &[5, 7], &[1, 2], &[3, 4]]).unwrap();
        assert_eq!(canonicalize(&f, &a).unwrap(), canonicalize(&f, &b).unwrap());
    }

    #[test]
    fn manifest_flags_heuristic_bound_and_budget() {
        let f = forest(&[1, 1]);
        let opts = EnumerateOptions {
            palette_bound: Some(3),
            ..Default::default()
        };
        let m = enumerate_canonical(&f, 2, &opts, |c| {
            assert!(c.palette_size() <= 3);
            ControlFlow::Continue(())
        })
        .unwrap();
        assert!(m.heuristic_bound && m.complete());
        let opts = EnumerateOptions {
            max_classes: Some(5),
            ..Default::default()
        };
        let m = enumerate_canonical(&f, 2, &opts, |_| ControlFlow::Continue(())).unwrap();
        assert_eq!(m.status, EnumerationStatus::BudgetExceeded);
        assert_eq!(m.classes, 5);
    }

    #[test]
    fn emitted_forms_are_canonical_and_sorted() {
        let f = forest(&[2, 1]);
        let mut prev: Option<Vec<Vec<u32>>> = None;
        enumerate_canonical(&f, 2, &EnumerateOptions::default(), |c| {
            assert!(is_canonical(&f, c.assignment()).unwrap());
            assert_eq!(canonicalize(&f, c.assignment()).unwrap(), *c);
            let e = c.encoding();
            if let Some(p) = &prev {
                assert!(*p < e);
            }
            prev = Some(e);
            ControlFlow::Continue(())
        })
        .unwrap();
    }

    #[test]
    fn sampling() {
        let f = forest(&[2, 2]);
        let a = sample_assignment(&f, 3, 9, 1).unwrap();
        assert_eq!(a, sample_assignment(&f, 3, 9, 1).unwrap());
        assert!(a.is_k_assignment(3));
        for seed in 0..5 {
            let c = sample_assignment(&f, 3, 3, seed).unwrap();
            assert_eq!(c, ListAssignment::constant(&f, &[Color(1), Color(2), Color(3)]).unwrap());
        }
        assert!(sample_assignment(&f, 3, 2, 0).is_err());
        let palettes: BTreeSet<usize> = (0..50)
            .map(|s| sample_assignment(&f, 2, 4, s).unwrap().palette().len())
            .collect();
        assert!(palettes.len() > 1);
    }
}
