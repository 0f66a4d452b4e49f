//! Core model: structures whose arrows may target points or lower arrows.
//!
//! A [`Structure`] holds a finite carrier of point names, indexed copies
//! `⟨x,i⟩` of those points, and arrows. Arrow origins are always point
//! copies; targets are point copies (level 1) or other arrows (level of the
//! target plus one). Construction validates all references, rejects cyclic
//! arrow targets and enforces the declared level bound.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point set, ordered for deterministic iteration.
pub type PointSet = BTreeSet<String>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("arrow {0}: origin is an arrow, origins must be point copies")]
    OriginNotPoint(String),
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("cyclic arrow targets involving {0}")]
    CyclicTargets(String),
    #[error("arrow {id}: level {level} exceeds bound {bound}")]
    LevelBoundExceeded { id: String, level: u32, bound: u32 },
    #[error("duplicate copy ({0},{1})")]
    DuplicateCopy(String, u32),
    #[error("duplicate arrow id {0}")]
    DuplicateArrow(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("{0:?} is not a subset of the carrier")]
    NotASubset(PointSet),
    #[error("invalid structure: {0}")]
    Invalid(String),
}

/// An indexed copy `⟨x,i⟩` of a carrier point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointCopy(pub String, pub u32);

impl PointCopy {
    pub fn new(point: impl Into<String>, copy: u32) -> Self {
        PointCopy(point.into(), copy)
    }
    pub fn point(&self) -> &str {
        &self.0
    }
    pub fn copy(&self) -> u32 {
        self.1
    }
}

/// Arrow target: a point copy or a lower arrow.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Point(PointCopy),
    Arrow(String),
}

/// Reference used when describing an arrow origin before validation. The
/// model rejects arrow origins; the variant exists so that the violation can
/// be expressed and reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObjectRef {
    Copy(PointCopy),
    Arrow(String),
}

/// Unvalidated arrow description fed into [`Structure::build`].
#[derive(Clone, Debug)]
pub struct ArrowSpec {
    pub id: String,
    pub base: String,
    pub copy: u32,
    pub origin: ObjectRef,
    pub target: Target,
}

impl ArrowSpec {
    pub fn new(
        id: impl Into<String>,
        base: impl Into<String>,
        copy: u32,
        origin: PointCopy,
        target: Target,
    ) -> Self {
        ArrowSpec {
            id: id.into(),
            base: base.into(),
            copy,
            origin: ObjectRef::Copy(origin),
            target,
        }
    }
}

/// A validated arrow. `base` is shared by copies `⟨α,k⟩` of one conceptual
/// arrow, `copy` distinguishes them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub base: String,
    pub copy: u32,
    pub origin: PointCopy,
    pub target: Target,
}

/// Origin and destination closures `O(α)`, `D(α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureSets {
    pub origins: PointSet,
    pub destinations: PointSet,
}

/// A generalized preferential structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    carrier: PointSet,
    copies: BTreeSet<PointCopy>,
    arrows: Vec<Arrow>,
    index: BTreeMap<String, usize>,
    levels: Vec<u32>,
    level_bound: u32,
}

impl Structure {
    /// Validates and builds a structure. Rejects arrow origins that are
    /// arrows, dangling references, cyclic targets and level overflow.
    pub fn build(
        carrier: impl IntoIterator<Item = impl Into<String>>,
        copies: impl IntoIterator<Item = PointCopy>,
        arrow_specs: Vec<ArrowSpec>,
        level_bound: u32,
    ) -> Result<Structure, ModelError> {
        let carrier: PointSet = carrier.into_iter().map(Into::into).collect();
        let mut copy_set: BTreeSet<PointCopy> = BTreeSet::new();
        for c in copies {
            if !carrier.contains(c.point()) {
                return Err(ModelError::DanglingReference(format!(
                    "copy ({},{}) of a point outside the carrier",
                    c.0, c.1
                )));
            }
            if !copy_set.insert(c.clone()) {
                return Err(ModelError::DuplicateCopy(c.0, c.1));
            }
        }

        let mut ids: BTreeSet<String> = BTreeSet::new();
        for spec in &arrow_specs {
            if !ids.insert(spec.id.clone()) {
                return Err(ModelError::DuplicateArrow(spec.id.clone()));
            }
        }

        let mut arrows = Vec::with_capacity(arrow_specs.len());
        for spec in arrow_specs {
            let origin = match spec.origin {
                ObjectRef::Copy(c) => c,
                ObjectRef::Arrow(_) => return Err(ModelError::OriginNotPoint(spec.id)),
            };
            if !copy_set.contains(&origin) {
                return Err(ModelError::DanglingReference(format!(
                    "arrow {}: origin ({},{}) is not a declared copy",
                    spec.id, origin.0, origin.1
                )));
            }
            match &spec.target {
                Target::Point(c) => {
                    if !copy_set.contains(c) {
                        return Err(ModelError::DanglingReference(format!(
                            "arrow {}: target ({},{}) is not a declared copy",
                            spec.id, c.0, c.1
                        )));
                    }
                }
                Target::Arrow(tid) => {
                    if !ids.contains(tid) {
                        return Err(ModelError::DanglingReference(format!(
                            "arrow {}: target arrow {} is not declared",
                            spec.id, tid
                        )));
                    }
                }
            }
            arrows.push(Arrow {
                id: spec.id,
                base: spec.base,
                copy: spec.copy,
                origin,
                target: spec.target,
            });
        }

        arrows.sort_by(|a, b| a.id.cmp(&b.id));
        let index: BTreeMap<String, usize> = arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.clone(), i))
            .collect();

        let levels = compute_levels(&arrows, &index)?;
        for (i, level) in levels.iter().enumerate() {
            if *level > level_bound {
                return Err(ModelError::LevelBoundExceeded {
                    id: arrows[i].id.clone(),
                    level: *level,
                    bound: level_bound,
                });
            }
        }

        Ok(Structure {
            carrier,
            copies: copy_set,
            arrows,
            index,
            levels,
            level_bound,
        })
    }

    pub fn carrier(&self) -> &PointSet {
        &self.carrier
    }

    pub fn copies(&self) -> impl Iterator<Item = &PointCopy> {
        self.copies.iter()
    }

    pub fn copies_of<'a>(&'a self, point: &'a str) -> impl Iterator<Item = &'a PointCopy> + 'a {
        self.copies.iter().filter(move |c| c.point() == point)
    }

    pub fn has_copy(&self, c: &PointCopy) -> bool {
        self.copies.contains(c)
    }

    pub fn arrows(&self) -> impl Iterator<Item = &Arrow> {
        self.arrows.iter()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow(&self, id: &str) -> Result<&Arrow, ModelError> {
        self.index
            .get(id)
            .map(|&i| &self.arrows[i])
            .ok_or_else(|| ModelError::UnknownArrow(id.to_string()))
    }

    pub fn level_bound(&self) -> u32 {
        self.level_bound
    }

    /// Level of an arrow: 1 for point-targeted arrows, target level + 1
    /// otherwise.
    pub fn level(&self, id: &str) -> Result<u32, ModelError> {
        self.index
            .get(id)
            .map(|&i| self.levels[i])
            .ok_or_else(|| ModelError::UnknownArrow(id.to_string()))
    }

    /// Highest level actually realized by an arrow (0 when arrowless).
    pub fn max_level(&self) -> u32 {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    pub(crate) fn level_by_idx(&self, idx: usize) -> u32 {
        self.levels[idx]
    }

    pub(crate) fn arrow_by_idx(&self, idx: usize) -> &Arrow {
        &self.arrows[idx]
    }

    pub(crate) fn idx_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// `O(α)` and `D(α)` per the inductive definition: level 1 arrows have
    /// singleton closures, for `α: x → β` the destination set is `D(β)` and
    /// the origin set is `{x} ∪ O(β)`.
    pub fn closure_sets(&self, id: &str) -> Result<ClosureSets, ModelError> {
        let idx = self
            .idx_of(id)
            .ok_or_else(|| ModelError::UnknownArrow(id.to_string()))?;
        Ok(self.closures()[idx].clone())
    }

    /// Closures for every arrow, by ascending level so targets come first.
    pub(crate) fn closures(&self) -> Vec<ClosureSets> {
        let mut out: Vec<Option<ClosureSets>> = vec![None; self.arrows.len()];
        let mut order: Vec<usize> = (0..self.arrows.len()).collect();
        order.sort_by_key(|&i| self.levels[i]);
        for i in order {
            let a = &self.arrows[i];
            let cs = match &a.target {
                Target::Point(c) => ClosureSets {
                    origins: std::iter::once(a.origin.point().to_string()).collect(),
                    destinations: std::iter::once(c.point().to_string()).collect(),
                },
                Target::Arrow(tid) => {
                    let t = self.index[tid];
                    let base = out[t].as_ref().expect("targets precede by level");
                    let mut origins = base.origins.clone();
                    origins.insert(a.origin.point().to_string());
                    ClosureSets {
                        origins,
                        destinations: base.destinations.clone(),
                    }
                }
            };
            out[i] = Some(cs);
        }
        out.into_iter().map(|c| c.unwrap()).collect()
    }

    /// Arrows pointing at the given arrow.
    pub fn attackers_of_arrow<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Arrow> {
        self.arrows
            .iter()
            .filter(move |a| matches!(&a.target, Target::Arrow(t) if t == id))
    }

    /// Arrows pointing at the given point copy.
    pub fn attackers_of_copy<'a>(&'a self, c: &'a PointCopy) -> impl Iterator<Item = &'a Arrow> {
        self.arrows
            .iter()
            .filter(move |a| matches!(&a.target, Target::Point(p) if p == c))
    }

    /// The legal subdiagram generated by `x`: all copies of points in `x`,
    /// plus inductively every arrow whose origin copy and target already
    /// belong to the restriction.
    pub fn restrict(&self, x: &PointSet) -> Result<Structure, ModelError> {
        if !x.is_subset(&self.carrier) {
            return Err(ModelError::NotASubset(x.difference(&self.carrier).cloned().collect()));
        }
        let copies: Vec<PointCopy> = self
            .copies
            .iter()
            .filter(|c| x.contains(c.point()))
            .cloned()
            .collect();

        let mut kept: BTreeSet<&str> = BTreeSet::new();
        let mut order: Vec<usize> = (0..self.arrows.len()).collect();
        order.sort_by_key(|&i| self.levels[i]);
        for i in order {
            let a = &self.arrows[i];
            if !x.contains(a.origin.point()) {
                continue;
            }
            let target_in = match &a.target {
                Target::Point(c) => x.contains(c.point()),
                Target::Arrow(tid) => kept.contains(tid.as_str()),
            };
            if target_in {
                kept.insert(&a.id);
            }
        }
        let specs: Vec<ArrowSpec> = self
            .arrows
            .iter()
            .filter(|a| kept.contains(a.id.as_str()))
            .map(|a| ArrowSpec {
                id: a.id.clone(),
                base: a.base.clone(),
                copy: a.copy,
                origin: ObjectRef::Copy(a.origin.clone()),
                target: a.target.clone(),
            })
            .collect();
        Structure::build(x.iter().cloned(), copies, specs, self.level_bound)
    }

    /// Canonical JSON form; stable byte-for-byte under reserialization.
    pub fn to_json(&self) -> String {
        let raw = RawStructure {
            carrier: self.carrier.iter().cloned().collect(),
            copies: self.copies.iter().map(|c| (c.0.clone(), c.1)).collect(),
            arrows: self.arrows.clone(),
            level_bound: self.level_bound,
        };
        serde_json::to_string_pretty(&raw).expect("structure serializes")
    }

    pub fn from_json(text: &str) -> Result<Structure, ModelError> {
        let raw: RawStructure =
            serde_json::from_str(text).map_err(|e| ModelError::Invalid(e.to_string()))?;
        let specs = raw
            .arrows
            .into_iter()
            .map(|a| ArrowSpec {
                id: a.id,
                base: a.base,
                copy: a.copy,
                origin: ObjectRef::Copy(a.origin),
                target: a.target,
            })
            .collect();
        Structure::build(
            raw.carrier,
            raw.copies.into_iter().map(|(p, i)| PointCopy(p, i)),
            specs,
            raw.level_bound,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct RawStructure {
    carrier: Vec<String>,
    copies: Vec<(String, u32)>,
    arrows: Vec<Arrow>,
    level_bound: u32,
}

fn compute_levels(
    arrows: &[Arrow],
    index: &BTreeMap<String, usize>,
) -> Result<Vec<u32>, ModelError> {
    // Iterative DFS; detects cycles among arrow-to-arrow targets.
    let mut levels: Vec<Option<u32>> = vec![None; arrows.len()];
    let mut in_progress = vec![false; arrows.len()];
    for start in 0..arrows.len() {
        if levels[start].is_some() {
            continue;
        }
        let mut stack = vec![start];
        while let Some(&i) = stack.last() {
            if levels[i].is_some() {
                stack.pop();
                continue;
            }
            match &arrows[i].target {
                Target::Point(_) => {
                    levels[i] = Some(1);
                    in_progress[i] = false;
                    stack.pop();
                }
                Target::Arrow(tid) => {
                    let t = index[tid];
                    if let Some(tl) = levels[t] {
                        levels[i] = Some(tl + 1);
                        in_progress[i] = false;
                        stack.pop();
                    } else if in_progress[t] {
                        return Err(ModelError::CyclicTargets(arrows[i].id.clone()));
                    } else {
                        in_progress[i] = true;
                        stack.push(t);
                    }
                }
            }
        }
    }
    Ok(levels.into_iter().map(|l| l.unwrap()).collect())
}

/// Convenience: builds a single-copy structure from level-1 point pairs plus
/// optional higher arrows given as `(id, origin point, target arrow id)`.
pub fn quick_structure(
    points: &[&str],
    level1: &[(&str, &str, &str)],
    higher: &[(&str, &str, &str)],
    level_bound: u32,
) -> Structure {
    let copies: Vec<PointCopy> = points.iter().map(|p| PointCopy::new(*p, 0)).collect();
    let mut specs = Vec::new();
    for (id, from, to) in level1 {
        specs.push(ArrowSpec::new(
            *id,
            *id,
            0,
            PointCopy::new(*from, 0),
            Target::Point(PointCopy::new(*to, 0)),
        ));
    }
    for (id, from, target) in higher {
        specs.push(ArrowSpec::new(
            *id,
            *id,
            0,
            PointCopy::new(*from, 0),
            Target::Arrow(target.to_string()),
        ));
    }
    Structure::build(points.iter().copied(), copies, specs, level_bound)
        .expect("quick structure is valid")
}

/// Parses `a,b,c` into a point set.
pub fn point_set(csv: &str) -> PointSet {
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}
