//! Bounded exhaustive search for a level-≤2 totally smooth structure
//! representing a given table.
//!
//! In a level-≤2 structure, whether a level-1 arrow is valid inside a
//! restriction `⌈X` depends only on the set `B` of points its level-2
//! attackers originate from: the arrow is valid iff `B ∩ X = ∅`. Which
//! copies launch the attacks, and how many parallel level-2 arrows there
//! are, cannot matter. A candidate is therefore a set of *instances*
//! `(origin point, target copy, attacker point set)`, which keeps the
//! space finite and small enough to exhaust:
//!
//! * per target copy and origin point, at most `max_arrow_copies` instances
//!   with distinct attacker sets;
//! * attacker sets violating the total-smoothness necessity
//!   `B ∩ X ≠ ∅ → B ∩ μ(X) ≠ ∅` (for every family set `X` containing the
//!   arrow) can never appear in an accepted structure and are pre-filtered;
//! * instances are grouped by their support pair and decided depth-first,
//!   checking each family set as soon as its restriction is complete.
//!
//! Found structures are re-verified through the independent `μ` and
//! total-smoothness implementations before being reported.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use thiserror::Error;

use crate::model::{ArrowSpec, PointCopy, PointSet, Structure, Target};
use crate::represent::ReprError;
use crate::smoothness::is_totally_smooth;
use crate::table::MuTable;
use crate::validity::mu;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("search budget exceeded: {visited} nodes visited, ceiling {ceiling}")]
    BoundsTooLarge { visited: u64, ceiling: u64 },
    #[error(transparent)]
    Repr(#[from] ReprError),
}

#[derive(Clone, Copy, Debug)]
pub struct SearchBounds {
    pub max_copies_per_point: u32,
    pub max_arrow_copies: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub bounds: SearchBounds,
    /// When false the total-smoothness clauses are dropped and the search
    /// looks for any representing level-≤2 structure.
    pub require_total_smoothness: bool,
    /// Budget on visited enumeration nodes.
    pub ceiling: u64,
    pub jobs: usize,
}

impl SearchConfig {
    pub fn new(bounds: SearchBounds) -> Self {
        SearchConfig {
            bounds,
            require_total_smoothness: true,
            ceiling: 10_000_000,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(Structure),
    /// The bounded space holds no representing structure.
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub visited: u64,
    pub complete_candidates: u64,
    /// What was actually enumerated, for interpreting the result as
    /// bounded evidence.
    pub space: String,
}

/// Bitmask interning of the table over its sorted universe.
struct MaskTable {
    points: Vec<String>,
    family: Vec<u32>,
    mu: BTreeMap<u32, u32>,
}

impl MaskTable {
    fn new(table: &MuTable) -> MaskTable {
        let points: Vec<String> = table.universe.iter().cloned().collect();
        let to_mask = |s: &PointSet| -> u32 {
            s.iter()
                .map(|e| 1u32 << points.iter().position(|p| p == e).unwrap())
                .sum()
        };
        let family: Vec<u32> = table.family.iter().map(to_mask).collect();
        let mu = table
            .family
            .iter()
            .map(|x| (to_mask(x), to_mask(&table.values[x])))
            .collect();
        MaskTable { points, family, mu }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Slot {
    origin: usize, // point index
    target_copy: u32,
    class: u32, // support mask {origin, target_point}
}

/// Solves one target point independently: every constraint that mentions an
/// attack into a copy of `z` — the μ-membership row of `z` across the whole
/// family, and the total-smoothness witnesses for arrows landing on `z`'s
/// copies — depends only on these slots, so classes do not interact.
struct ClassDfs<'a> {
    mt: &'a MaskTable,
    cfg: &'a SearchConfig,
    z: usize,
    copies: u32,
    slots: Vec<Slot>,
    options: Vec<Vec<Vec<u32>>>,
    /// slot index after which each copy's incoming attacks are complete
    copy_done_at: Vec<usize>,
    visited: &'a AtomicU64,
    over_budget: &'a AtomicBool,
    complete: u64,
}

impl ClassDfs<'_> {
    /// Is copy `ci` of `z` free of valid attacks inside `⌈x`?
    fn clean(&self, assignment: &[usize], upto: usize, ci: u32, x: u32) -> bool {
        for (si, s) in self.slots.iter().enumerate().take(upto) {
            if s.target_copy != ci || x & (1 << s.origin) == 0 {
                continue;
            }
            if self.options[si][assignment[si]].iter().any(|&b| b & x == 0) {
                return false;
            }
        }
        true
    }

    /// Necessary checks once copy `ci` has all its attackers decided.
    fn check_copy(&self, assignment: &[usize], upto: usize, ci: u32) -> bool {
        for &x in &self.mt.family {
            if x & (1 << self.z) == 0 {
                continue;
            }
            let mu_x = self.mt.mu[&x];
            // a point minimized by the table admits no clean copy
            if mu_x & (1 << self.z) == 0 && self.clean(assignment, upto, ci, x) {
                return false;
            }
            if !self.cfg.require_total_smoothness {
                continue;
            }
            // total smoothness, level-1 clause for arrows into this copy
            for (si, s) in self.slots.iter().enumerate().take(upto) {
                if s.target_copy != ci || s.class & !x != 0 {
                    continue;
                }
                for &b in &self.options[si][assignment[si]] {
                    let valid = b & x == 0;
                    let witness = self
                        .slots
                        .iter()
                        .enumerate()
                        .take(upto)
                        .filter(|(_, w)| {
                            w.target_copy == ci
                                && mu_x & (1 << w.origin) != 0
                                && w.class & !x == 0
                        })
                        .any(|(wi, _)| {
                            self.options[wi][assignment[wi]]
                                .iter()
                                .any(|&bw| !valid || bw & x == 0)
                        });
                    if !witness {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The full μ-membership row once the class is complete.
    fn check_class(&self, assignment: &[usize]) -> bool {
        let upto = self.slots.len();
        for &x in &self.mt.family {
            if x & (1 << self.z) == 0 {
                continue;
            }
            if self.mt.mu[&x] & (1 << self.z) != 0
                && !(0..self.copies).any(|ci| self.clean(assignment, upto, ci, x))
            {
                return false;
            }
        }
        true
    }

    fn run(&mut self, assignment: &mut Vec<usize>, depth: usize) -> Option<Vec<usize>> {
        if self.over_budget.load(Ordering::Relaxed) {
            return None;
        }
        if depth == self.slots.len() {
            self.complete += 1;
            if self.check_class(assignment) {
                return Some(assignment.clone());
            }
            return None;
        }
        for oi in 0..self.options[depth].len() {
            let v = self.visited.fetch_add(1, Ordering::Relaxed) + 1;
            if v > self.cfg.ceiling {
                self.over_budget.store(true, Ordering::Relaxed);
                return None;
            }
            assignment.push(oi);
            let ci = self.slots[depth].target_copy;
            let ok = self.copy_done_at[depth] != depth + 1
                || self.check_copy(assignment, depth + 1, ci);
            if ok {
                if let Some(found) = self.run(assignment, depth + 1) {
                    return Some(found);
                }
            }
            assignment.pop();
        }
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn search_with_counts(
    mt: &MaskTable,
    table: &MuTable,
    cfg: &SearchConfig,
    counts: &[u32],
    full: u32,
    visited: &AtomicU64,
    over_budget: &AtomicBool,
    complete: &mut u64,
) -> Option<Structure> {
    let n = mt.points.len();

    // μ(∅) must be ∅
    if let Some(&m) = mt.mu.get(&0) {
        if m != 0 {
            return None;
        }
    }

    let mut chosen: Vec<(usize, Slot, Vec<u32>)> = Vec::new();
    for (z, &z_copies) in counts.iter().enumerate() {
        // slots attacking copies of z, grouped copy by copy
        let mut slots: Vec<Slot> = Vec::new();
        for target_copy in 0..z_copies {
            for origin in 0..n {
                slots.push(Slot {
                    origin,
                    target_copy,
                    class: (1 << origin) | (1 << z),
                });
            }
        }
        let copy_done_at: Vec<usize> = slots
            .iter()
            .map(|s| {
                slots
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| w.target_copy == s.target_copy)
                    .map(|(j, _)| j + 1)
                    .max()
                    .unwrap()
            })
            .collect();
        let options: Vec<Vec<Vec<u32>>> = slots
            .iter()
            .map(|s| slot_options(mt, cfg, s.class, full))
            .collect();

        let mut dfs = ClassDfs {
            mt,
            cfg,
            z,
            copies: z_copies,
            slots: slots.clone(),
            options,
            copy_done_at,
            visited,
            over_budget,
            complete: 0,
        };
        let solved = dfs.run(&mut Vec::new(), 0);
        *complete += dfs.complete;
        let assignment = solved?;
        for (si, slot) in slots.iter().enumerate() {
            chosen.push((z, *slot, dfs.options[si][assignment[si]].clone()));
        }
    }
    Some(realize(mt, table, counts, &chosen))
}

/// Attacker sets admitted per slot, grouped into instance bundles of size
/// ≤ `max_arrow_copies`.
fn slot_options(mt: &MaskTable, cfg: &SearchConfig, class: u32, full: u32) -> Vec<Vec<u32>> {
    let mut admissible: Vec<u32> = Vec::new();
    for b in 0..=full {
        let ok = !cfg.require_total_smoothness
            || mt
                .family
                .iter()
                .all(|&x| class & !x != 0 || b & x == 0 || b & mt.mu[&x] != 0);
        if ok {
            admissible.push(b);
        }
    }
    let mut opts: Vec<Vec<u32>> = vec![vec![]];
    let mut frontier: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..cfg.bounds.max_arrow_copies {
        let mut next = Vec::new();
        for base in &frontier {
            let start = base.last().map_or(0, |&l| l + 1);
            for &b in admissible.iter().filter(|&&b| b >= start) {
                let mut v = base.clone();
                v.push(b);
                opts.push(v.clone());
                next.push(v);
            }
        }
        frontier = next;
    }
    opts
}

/// Materializes the chosen instances as a real structure.
fn realize(
    mt: &MaskTable,
    table: &MuTable,
    counts: &[u32],
    chosen: &[(usize, Slot, Vec<u32>)],
) -> Structure {
    let mut copies = Vec::new();
    for (pi, p) in mt.points.iter().enumerate() {
        for ci in 0..counts[pi] {
            copies.push(PointCopy::new(p.clone(), ci));
        }
    }
    let mut specs = Vec::new();
    for (z, s, bs) in chosen {
        for (k, &b) in bs.iter().enumerate() {
            let id = format!(
                "q|{}>{}.{}#{}",
                mt.points[s.origin], mt.points[*z], s.target_copy, k
            );
            specs.push(ArrowSpec::new(
                id.clone(),
                id.clone(),
                k as u32,
                PointCopy::new(mt.points[s.origin].clone(), 0),
                Target::Point(PointCopy::new(mt.points[*z].clone(), s.target_copy)),
            ));
            for pi in 0..mt.points.len() {
                if b & (1 << pi) != 0 {
                    let bid = format!("{id}~k{pi}");
                    specs.push(ArrowSpec::new(
                        bid.clone(),
                        bid,
                        0,
                        PointCopy::new(mt.points[pi].clone(), 0),
                        Target::Arrow(id.clone()),
                    ));
                }
            }
        }
    }
    Structure::build(table.universe.iter().cloned(), copies, specs, 2)
        .expect("realized structure is valid")
}

/// Exhaustive bounded search. Returns the canonically first representing
/// structure within the bounds, or certifies that none exists there.
pub fn search_level2_totally_smooth(
    table: &MuTable,
    cfg: &SearchConfig,
) -> Result<SearchReport, SearchError> {
    let mt = MaskTable::new(table);
    let n = mt.points.len();
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let space = format!(
        "instances (origin point, target copy, attacker point-set) with 1..={} copies per point, \
         ≤{} instances per (origin, target copy), attacker sets pre-filtered by the \
         total-smoothness necessity, solved independently per target point; ceiling {} visited nodes",
        cfg.bounds.max_copies_per_point, cfg.bounds.max_arrow_copies, cfg.ceiling
    );

    // quick impossibility: μ must choose subsets
    if !table.satisfies_mu_subset() {
        return Ok(SearchReport {
            outcome: SearchOutcome::Exhausted,
            visited: 0,
            complete_candidates: 0,
            space: format!("{space}; rejected upfront: the table violates (μ⊆)"),
        });
    }

    let visited = AtomicU64::new(0);
    let over_budget = AtomicBool::new(false);

    // enumerate per-point copy counts
    let mut count_vectors: Vec<Vec<u32>> = Vec::new();
    crate::sample::odometer(&vec![cfg.bounds.max_copies_per_point as usize; n], |idx| {
        count_vectors.push(idx.iter().map(|&i| i as u32 + 1).collect());
    });

    // the candidate stream splits across workers by copy-count vector; the
    // reported structure is the one the sequential order would find first
    let jobs = cfg.jobs.max(1).min(count_vectors.len().max(1));
    let mut results: Vec<(usize, Option<Structure>, u64)> = Vec::new();
    if jobs <= 1 {
        for (vi, counts) in count_vectors.iter().enumerate() {
            if over_budget.load(Ordering::Relaxed) {
                break;
            }
            let mut complete = 0u64;
            let r = search_with_counts(&mt, table, cfg, counts, full, &visited, &over_budget, &mut complete);
            let hit = r.is_some();
            results.push((vi, r, complete));
            if hit {
                break;
            }
        }
    } else {
        let chunks: Vec<Vec<(usize, &Vec<u32>)>> = (0..jobs)
            .map(|j| {
                count_vectors
                    .iter()
                    .enumerate()
                    .skip(j)
                    .step_by(jobs)
                    .collect()
            })
            .collect();
        let collected: Vec<Vec<(usize, Option<Structure>, u64)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    let mt = &mt;
                    let visited = &visited;
                    let over_budget = &over_budget;
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        for (vi, counts) in chunk {
                            if over_budget.load(Ordering::Relaxed) {
                                break;
                            }
                            let mut complete = 0u64;
                            let r = search_with_counts(
                                mt, table, cfg, counts, full, visited, over_budget, &mut complete,
                            );
                            out.push((*vi, r, complete));
                        }
                        out
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker")).collect()
        });
        for v in collected {
            results.extend(v);
        }
    }

    if over_budget.load(Ordering::Relaxed) {
        return Err(SearchError::BoundsTooLarge {
            visited: visited.load(Ordering::Relaxed),
            ceiling: cfg.ceiling,
        });
    }

    let complete: u64 = results.iter().map(|(_, _, c)| *c).sum();
    let found: Option<(usize, Structure)> = results
        .into_iter()
        .filter_map(|(vi, r, _)| r.map(|s| (vi, s)))
        .min_by_key(|(vi, _)| *vi);

    let outcome = match found {
        Some((_, s)) => {
            // independent re-verification through the real evaluators
            for x in &table.family {
                assert_eq!(
                    mu(&s, x).expect("carrier covers the family"),
                    table.values[x],
                    "search result fails independent μ verification"
                );
                if cfg.require_total_smoothness {
                    assert!(
                        is_totally_smooth(&s, x).expect("valid set").holds,
                        "search result fails independent total-smoothness verification"
                    );
                }
            }
            SearchOutcome::Found(s)
        }
        None => SearchOutcome::Exhausted,
    };
    Ok(SearchReport {
        outcome,
        visited: visited.load(Ordering::Relaxed),
        complete_candidates: complete,
        space,
    })
}

/// Convenience entry with the spec'd knobs spelled out.
pub fn search_with_bounds(
    table: &MuTable,
    max_copies_per_point: u32,
    max_arrow_copies: usize,
) -> Result<SearchReport, SearchError> {
    search_level2_totally_smooth(
        table,
        &SearchConfig::new(SearchBounds {
            max_copies_per_point,
            max_arrow_copies,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{level_bigger_2_table, need_pr_table};
    use crate::sample;
    use std::collections::BTreeMap;

    fn cfg(copies: u32, arrows: usize) -> SearchConfig {
        SearchConfig::new(SearchBounds {
            max_copies_per_point: copies,
            max_arrow_copies: arrows,
        })
    }

    #[test]
    fn identity_table_found_arrowless() {
        let u = sample::universe(2);
        let values: BTreeMap<_, _> = sample::powerset(&u)
            .into_iter()
            .map(|x| (x.clone(), x))
            .collect();
        let t = MuTable::new(u, values, None).unwrap();
        let mut c = cfg(1, 0);
        c.ceiling = 10_000;
        let r = search_level2_totally_smooth(&t, &c).unwrap();
        match r.outcome {
            SearchOutcome::Found(s) => assert_eq!(s.arrow_count(), 0),
            SearchOutcome::Exhausted => panic!("identity must be representable"),
        }
    }

    #[test]
    fn level_bigger_2_exhausted_at_one_copy() {
        let t = level_bigger_2_table();
        let r = search_level2_totally_smooth(&t, &cfg(1, 1)).unwrap();
        assert!(matches!(r.outcome, SearchOutcome::Exhausted), "visited {}", r.visited);
    }

    #[test]
    fn need_pr_found_without_total_smoothness() {
        let t = need_pr_table();
        let mut c = cfg(1, 1);
        c.require_total_smoothness = false;
        let r = search_level2_totally_smooth(&t, &c).unwrap();
        match r.outcome {
            SearchOutcome::Found(s) => {
                for x in &t.family {
                    assert_eq!(crate::validity::mu(&s, x).unwrap(), t.values[x]);
                }
            }
            SearchOutcome::Exhausted => panic!("a level-2 structure represents this table"),
        }
    }

    #[test]
    fn ceiling_is_enforced() {
        let t = level_bigger_2_table();
        let mut c = cfg(2, 2);
        c.ceiling = 50;
        assert!(matches!(
            search_level2_totally_smooth(&t, &c),
            Err(SearchError::BoundsTooLarge { .. })
        ));
    }

    #[test]
    fn mu_subset_violations_are_rejected_upfront() {
        let u = sample::universe(2);
        let mut values = BTreeMap::new();
        for x in sample::powerset(&u) {
            values.insert(x, u.clone()); // not (μ⊆)
        }
        let t = MuTable::new(u.clone(), values, None).unwrap();
        let r = search_level2_totally_smooth(&t, &cfg(1, 1)).unwrap();
        assert!(matches!(r.outcome, SearchOutcome::Exhausted));
        assert!(r.space.contains("(μ⊆)"));
    }
}
