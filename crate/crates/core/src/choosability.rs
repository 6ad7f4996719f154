//! Equitable k-choosability by exhaustion over canonical assignments.

use std::ops::ControlFlow;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{enumerate_encodings, CanonicalAssignment, EnumerateOptions, EnumerationStatus};
use crate::error::Result;
use crate::model::{rho, StarForest};
use crate::solver::{auto_dense, Aborted};

const BATCH: usize = 2048;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Reports the lexicographically first defeating class.
    #[default]
    Deterministic,
    /// Reports whichever defeating class a worker hits first.
    Fast,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_classes: Option<u64>,
    pub max_nodes: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct ChoosabilityOptions {
    pub budget: Budget,
    pub mode: Mode,
    /// Heuristic palette cap; `None` keeps the lossless `k * |V|`.
    pub palette_bound: Option<usize>,
    /// See [`EnumerateOptions::skip_free_colors`]. On by default.
    pub skip_free_colors: bool,
}

impl Default for ChoosabilityOptions {
    fn default() -> Self {
        ChoosabilityOptions {
            budget: Budget::default(),
            mode: Mode::Deterministic,
            palette_bound: None,
            skip_free_colors: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Choosable { classes: u64 },
    NotChoosable { witness: CanonicalAssignment },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Choosable { .. } => "choosable",
            Verdict::NotChoosable { .. } => "not-choosable",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_choosable(&self) -> Option<bool> {
        match self {
            Verdict::Choosable { .. } => Some(true),
            Verdict::NotChoosable { .. } => Some(false),
            Verdict::Inconclusive { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&CanonicalAssignment> {
        match self {
            Verdict::NotChoosable { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChoosabilityReport {
    pub forest: StarForest,
    pub k: usize,
    pub mode: Mode,
    pub verdict: Verdict,
    pub classes_examined: u64,
    pub solver_nodes: u64,
    pub palette_bound: usize,
    pub heuristic_bound: bool,
    pub skip_free_colors: bool,
    pub elapsed_ms: u128,
}

impl ChoosabilityReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "forest": self.forest,
            "k": self.k,
            "mode": self.mode,
            "verdict": self.verdict.tag(),
            "classes_examined": self.classes_examined,
            "solver_nodes": self.solver_nodes,
            "palette_bound": self.palette_bound,
            "heuristic_bound": self.heuristic_bound,
            "skip_free_colors": self.skip_free_colors,
            "elapsed_ms": self.elapsed_ms,
        });
        match &self.verdict {
            Verdict::NotChoosable { witness } => {
                v["witness"] = witness.assignment().to_json_value();
            }
            Verdict::Inconclusive { reason } => {
                v["reason"] = serde_json::Value::String(reason.clone());
            }
            Verdict::Choosable { .. } => {}
        }
        v
    }
}

enum ClassResult {
    Colorable(u64),
    Defeating(u64),
    OutOfNodes,
}

struct Scan<'a> {
    forest: &'a StarForest,
    cap: usize,
    mode: Mode,
    max_nodes: Option<u64>,
    classes: u64,
    nodes: u64,
    witness: Option<Vec<Vec<u32>>>,
    out_of_nodes: bool,
}

impl Scan<'_> {
    fn check(&self, enc: &[Vec<u32>], limit: Option<u64>) -> ClassResult {
        let palette = enc.iter().flatten().copied().max().unwrap_or(0) as usize;
        let dense: Vec<Vec<u16>> = enc
            .iter()
            .map(|l| l.iter().map(|&c| (c - 1) as u16).collect())
            .collect();
        let mut nodes = 0;
        match auto_dense(self.forest, &dense, palette, self.cap, &mut nodes, limit) {
            Ok(Some(_)) => ClassResult::Colorable(nodes),
            Ok(None) => ClassResult::Defeating(nodes),
            Err(Aborted) => ClassResult::OutOfNodes,
        }
    }

    /// Solves a batch; returns true once the scan is decided.
    fn flush(&mut self, batch: &mut Vec<Vec<Vec<u32>>>) -> bool {
        if batch.is_empty() {
            return false;
        }
        let limit = self.max_nodes.map(|m| m.saturating_sub(self.nodes));
        let done = match self.mode {
            Mode::Deterministic => {
                let results: Vec<ClassResult> = batch.par_iter().map(|e| self.check(e, limit)).collect();
                let mut done = false;
                for (enc, r) in batch.iter().zip(results) {
                    self.classes += 1;
                    let n = match r {
                        ClassResult::Colorable(n) | ClassResult::Defeating(n) => n,
                        ClassResult::OutOfNodes => {
                            self.out_of_nodes = true;
                            done = true;
                            break;
                        }
                    };
                    self.nodes += n;
                    if self.max_nodes.is_some_and(|m| self.nodes > m) {
                        self.out_of_nodes = true;
                        done = true;
                        break;
                    }
                    if let ClassResult::Defeating(_) = r {
                        self.witness = Some(enc.clone());
                        done = true;
                        break;
                    }
                }
                done
            }
            Mode::Fast => {
                let results: Vec<ClassResult> = batch.par_iter().map(|e| self.check(e, limit)).collect();
                self.classes += batch.len() as u64;
                for (enc, r) in batch.iter().zip(results) {
                    match r {
                        ClassResult::Colorable(n) => self.nodes += n,
                        ClassResult::Defeating(n) => {
                            self.nodes += n;
                            if self.witness.is_none() {
                                self.witness = Some(enc.clone());
                            }
                        }
                        ClassResult::OutOfNodes => self.out_of_nodes = true,
                    }
                }
                if self.max_nodes.is_some_and(|m| self.nodes > m) {
                    self.out_of_nodes = true;
                }
                self.witness.is_some() || self.out_of_nodes
            }
        };
        batch.clear();
        done
    }
}

/// Decides whether every `k`-assignment of `forest` admits an equitable coloring.
pub fn is_equitably_k_choosable(
    forest: &StarForest,
    k: usize,
    options: &ChoosabilityOptions,
) -> Result<ChoosabilityReport> {
    let start = Instant::now();
    let cap = rho(forest, k)?.get();
    let mut scan = Scan {
        forest,
        cap,
        mode: options.mode,
        max_nodes: options.budget.max_nodes,
        classes: 0,
        nodes: 0,
        witness: None,
        out_of_nodes: false,
    };
    let enum_opts = EnumerateOptions {
        palette_bound: options.palette_bound,
        max_classes: options.budget.max_classes,
        skip_free_colors: options.skip_free_colors,
    };
    let mut batch = Vec::with_capacity(BATCH);
    let manifest = enumerate_encodings(forest, k, &enum_opts, |enc| {
        batch.push(enc.to_vec());
        if batch.len() == BATCH && scan.flush(&mut batch) {
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    scan.flush(&mut batch);

    let verdict = if let Some(enc) = &scan.witness {
        Verdict::NotChoosable {
            witness: CanonicalAssignment::from_encoding(forest, enc),
        }
    } else if scan.out_of_nodes {
        Verdict::Inconclusive {
            reason: "solver node budget exceeded".into(),
        }
    } else if manifest.status == EnumerationStatus::BudgetExceeded {
        Verdict::Inconclusive {
            reason: "class budget exceeded".into(),
        }
    } else {
        Verdict::Choosable { classes: scan.classes }
    };
    Ok(ChoosabilityReport {
        forest: forest.clone(),
        k,
        mode: options.mode,
        verdict,
        classes_examined: scan.classes,
        solver_nodes: scan.nodes,
        palette_bound: manifest.palette_bound,
        heuristic_bound: manifest.heuristic_bound,
        skip_free_colors: manifest.skip_free_colors,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub witness: Option<CanonicalAssignment>,
    /// False when the budget ran out before the search space was covered.
    pub exhausted: bool,
    pub report: ChoosabilityReport,
}

/// First defeating canonical assignment, if one exists within budget.
pub fn find_counterexample(
    forest: &StarForest,
    k: usize,
    options: &ChoosabilityOptions,
) -> Result<Counterexample> {
    let report = is_equitably_k_choosable(forest, k, options)?;
    Ok(Counterexample {
        witness: report.verdict.witness().cloned(),
        exhausted: !matches!(report.verdict, Verdict::Inconclusive { .. }),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Color, ListAssignment};
    use crate::solver::solve;

    fn forest(stars: &[usize]) -> StarForest {
        StarForest::new(stars.to_vec()).unwrap()
    }

    fn verdict(stars: &[usize], k: usize) -> Verdict {
        is_equitably_k_choosable(&forest(stars), k, &ChoosabilityOptions::default())
            .unwrap()
            .verdict
    }

    #[test]
    fn documented_verdicts() {
        assert_eq!(verdict(&[1, 1], 2).is_choosable(), Some(true));
        assert_eq!(verdict(&[2], 2).is_choosable(), Some(true));
        assert_eq!(verdict(&[1, 3], 2).is_choosable(), Some(false));
        assert_eq!(verdict(&[3], 2).is_choosable(), Some(false));
        assert_eq!(verdict(&[1, 2], 2).is_choosable(), Some(true));
    }

    #[test]
    fn witnesses_are_solver_infeasible() {
        for (stars, k) in [(&[1usize, 3][..], 2usize), (&[3], 2), (&[2, 4], 2), (&[5], 3)] {
            let f = forest(stars);
            let found = find_counterexample(&f, k, &ChoosabilityOptions::default()).unwrap();
            let w = found.witness.expect("defeating assignment exists");
            assert!(!solve(&f, w.assignment(), k).unwrap().colorable);
        }
        let f = forest(&[1, 1]);
        let found = find_counterexample(&f, 2, &ChoosabilityOptions::default()).unwrap();
        assert!(found.witness.is_none() && found.exhausted);
    }

    #[test]
    fn constant_lists_defeat_six_one() {
        let f = forest(&[6, 1]);
        let found = find_counterexample(&f, 3, &ChoosabilityOptions::default()).unwrap();
        let constant = ListAssignment::constant(&f, &[Color(1), Color(2), Color(3)]).unwrap();
        assert_eq!(found.witness.unwrap().assignment(), &constant);
    }

    #[test]
    fn budgets_give_inconclusive() {
        let f = forest(&[7, 7]);
        let options = ChoosabilityOptions {
            budget: Budget {
                max_classes: Some(10),
                max_nodes: None,
            },
            ..Default::default()
        };
        let r = is_equitably_k_choosable(&f, 2, &options).unwrap();
        assert!(matches!(r.verdict, Verdict::Inconclusive { .. }));
        assert!(r.classes_examined <= 10);
        let options = ChoosabilityOptions {
            budget: Budget {
                max_classes: None,
                max_nodes: Some(3),
            },
            ..Default::default()
        };
        let r = is_equitably_k_choosable(&forest(&[2, 2]), 2, &options).unwrap();
        assert!(matches!(r.verdict, Verdict::Inconclusive { .. }));
    }

    #[test]
    fn skipping_free_colors_keeps_verdicts() {
        let full = ChoosabilityOptions {
            skip_free_colors: false,
            ..Default::default()
        };
        let cases: &[(&[usize], usize)] = &[
            (&[1], 2),
            (&[2], 2),
            (&[3], 2),
            (&[1, 1], 2),
            (&[1, 2], 2),
            (&[0, 3], 2),
            (&[1, 3], 2),
            (&[2, 2], 2),
            (&[4], 3),
            (&[5], 3),
            (&[1, 1, 1], 2),
        ];
        for &(stars, k) in cases {
            let f = forest(stars);
            let fast = is_equitably_k_choosable(&f, k, &ChoosabilityOptions::default()).unwrap();
            let slow = is_equitably_k_choosable(&f, k, &full).unwrap();
            assert_eq!(fast.verdict.is_choosable(), slow.verdict.is_choosable(), "{f} k={k}");
            assert!(fast.verdict.is_choosable().is_some());
            if let Verdict::Choosable { classes } = slow.verdict {
                let Verdict::Choosable { classes: fewer } = fast.verdict else { unreachable!() };
                assert!(fewer <= classes);
            }
        }
    }

    #[test]
    fn fast_mode_agrees_on_existence() {
        let options = ChoosabilityOptions {
            mode: Mode::Fast,
            ..Default::default()
        };
        for (stars, k, expect) in [(&[1usize, 3][..], 2usize, false), (&[2, 2], 2, true)] {
            let r = is_equitably_k_choosable(&forest(stars), k, &options).unwrap();
            assert_eq!(r.verdict.is_choosable(), Some(expect));
        }
    }
}
