//! The `⊑` relation, total smoothness, essential smoothness and classical
//! smoothness, each returning a verdict with a replayable witness on failure.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{PointCopy, PointSet, Structure, Target};
use crate::validity::{self, ValidityError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SmoothError {
    #[error("X must be a subset of X'")]
    NotNested,
    #[error("{0:?} is not a subset of the carrier")]
    NotASubset(PointSet),
    #[error("operation requires a level-1 structure")]
    NotLevelOne,
    #[error(transparent)]
    Validity(#[from] ValidityError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Counterexample record: the copy at fault and the offending arrow chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothWitness {
    pub copy: Option<PointCopy>,
    pub arrows: Vec<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothnessVerdict {
    pub holds: bool,
    pub witness: Option<SmoothWitness>,
    /// For level-≤3 essential smoothness: which case certifies each point
    /// ("1" for minimal points, "2a"/"2b" for minimized ones).
    pub cases: Option<BTreeMap<String, String>>,
}

impl SmoothnessVerdict {
    fn ok() -> Self {
        SmoothnessVerdict {
            holds: true,
            witness: None,
            cases: None,
        }
    }
    fn fail(copy: Option<PointCopy>, arrows: Vec<String>, reason: impl Into<String>) -> Self {
        SmoothnessVerdict {
            holds: false,
            witness: Some(SmoothWitness {
                copy,
                arrows,
                reason: reason.into(),
            }),
            cases: None,
        }
    }
}

/// `X ⊑ X'`: every copy of every point of `X'−X` is hit by a valid `X ⇒ X'`
/// arrow, and every point of `X` has a copy whose `X'`-originating attackers
/// are all counter-attacked by valid `X ⇒ X'` arrows.
pub fn is_sqsubseteq(s: &Structure, x: &PointSet, xp: &PointSet) -> Result<SmoothnessVerdict, SmoothError> {
    if !xp.is_subset(s.carrier()) {
        return Err(SmoothError::NotASubset(
            xp.difference(s.carrier()).cloned().collect(),
        ));
    }
    if !x.is_subset(xp) {
        return Err(SmoothError::NotNested);
    }
    let valid = validity::valid_x_impl_y(s, x, xp)?.valid;

    // clause (2)
    for p in xp.difference(x) {
        for c in s.copies_of(p) {
            let hit = s
                .attackers_of_copy(c)
                .any(|a| valid.contains(&a.id));
            if !hit {
                return Ok(SmoothnessVerdict::fail(
                    Some(c.clone()),
                    vec![],
                    format!("copy ({},{}) of {} in X'-X has no valid X=>X' attacker", c.0, c.1, p),
                ));
            }
        }
    }

    // clause (3)
    for p in x {
        let mut good_copy = false;
        let mut last_bad: Option<(PointCopy, Vec<String>)> = None;
        let mut any_copy = false;
        for c in s.copies_of(p) {
            any_copy = true;
            let mut all_countered = true;
            let mut chain = vec![];
            for a in s.attackers_of_copy(c) {
                if !xp.contains(a.origin.point()) {
                    continue;
                }
                let countered = s
                    .attackers_of_arrow(&a.id)
                    .any(|b| valid.contains(&b.id));
                if !countered {
                    all_countered = false;
                    chain = vec![a.id.clone()];
                    break;
                }
            }
            if all_countered {
                good_copy = true;
                break;
            } else {
                last_bad = Some((c.clone(), chain));
            }
        }
        if !any_copy {
            return Ok(SmoothnessVerdict::fail(
                None,
                vec![],
                format!("point {} of X has no copies", p),
            ));
        }
        if !good_copy {
            let (c, chain) = last_bad.expect("some copy failed");
            return Ok(SmoothnessVerdict::fail(
                Some(c),
                chain,
                format!("every copy of {} has an uncountered attacker from X'", p),
            ));
        }
    }
    Ok(SmoothnessVerdict::ok())
}

/// Total smoothness for `X`: every arrow `α: x → y` with
/// `O(α) ∪ D(α) ⊆ X` has a witness `α': x' → y` with `x' ∈ μ(X)`, and when
/// `α` is valid in the `X`-restriction the witness is valid there too.
pub fn is_totally_smooth(s: &Structure, x: &PointSet) -> Result<SmoothnessVerdict, SmoothError> {
    if !x.is_subset(s.carrier()) {
        return Err(SmoothError::NotASubset(
            x.difference(s.carrier()).cloned().collect(),
        ));
    }
    let r = s.restrict(x)?;
    let mu_x = validity::mu_unrestricted(&r, x);
    let valid = validity::valid_x_to_y(&r, x, x)?.valid;

    // Arrows with O(α) ∪ D(α) ⊆ X are exactly the arrows of the restriction.
    let arrows: Vec<_> = r.arrows().cloned().collect();
    for a in &arrows {
        let witness_ok = arrows.iter().any(|w| {
            w.target == a.target
                && mu_x.contains(w.origin.point())
                && (!valid.contains(&a.id) || valid.contains(&w.id))
        });
        if !witness_ok {
            return Ok(SmoothnessVerdict::fail(
                Some(a.origin.clone()),
                vec![a.id.clone()],
                format!(
                    "arrow {} has no {} counterpart from mu(X)",
                    a.id,
                    if valid.contains(&a.id) { "valid" } else { "parallel" }
                ),
            ));
        }
    }
    Ok(SmoothnessVerdict::ok())
}

/// Essential smoothness for `X`: `μ(X) ⊑ X`. For structures of level ≤ 3
/// the verdict carries the case split certifying each point.
pub fn is_essentially_smooth(s: &Structure, x: &PointSet) -> Result<SmoothnessVerdict, SmoothError> {
    if !x.is_subset(s.carrier()) {
        return Err(SmoothError::NotASubset(
            x.difference(s.carrier()).cloned().collect(),
        ));
    }
    let mu_x = validity::mu(s, x)?;
    let mut verdict = is_sqsubseteq(s, &mu_x, x)?;
    if verdict.holds && s.max_level() <= 3 {
        verdict.cases = Some(remark_cases(s, x, &mu_x));
    }
    Ok(verdict)
}

/// Direct evaluation of the level-3 case split for `μ(X) ⊑ X`, independent
/// of the valid-arrow machinery. Returns the per-point certifying case.
/// Only meaningful for structures of level ≤ 3.
fn remark_cases(s: &Structure, x: &PointSet, mu_x: &PointSet) -> BTreeMap<String, String> {
    let mut cases = BTreeMap::new();
    for p in x {
        if mu_x.contains(p) {
            cases.insert(p.clone(), "1".to_string());
        } else {
            // record which sub-case each copy used; points may mix (a)/(b)
            let mut labels: Vec<&str> = vec![];
            for c in s.copies_of(p) {
                let mut label = "";
                for a in s.attackers_of_copy(c) {
                    if !mu_x.contains(a.origin.point()) {
                        continue;
                    }
                    let attackers: Vec<_> = s
                        .attackers_of_arrow(&a.id)
                        .filter(|b| x.contains(b.origin.point()))
                        .collect();
                    if attackers.is_empty() {
                        label = "2a";
                        break;
                    }
                    let all_countered = attackers.iter().all(|b| {
                        s.attackers_of_arrow(&b.id)
                            .any(|g| mu_x.contains(g.origin.point()))
                    });
                    if all_countered {
                        label = "2b";
                        break;
                    }
                }
                if !label.is_empty() && !labels.contains(&label) {
                    labels.push(label);
                }
            }
            cases.insert(p.clone(), labels.join(","));
        }
    }
    cases
}

/// Independent level-≤3 evaluation of `μ(X) ⊑ X` by the case split alone;
/// used as a cross-check of [`is_essentially_smooth`] in tests.
pub fn essentially_smooth_by_cases(s: &Structure, x: &PointSet) -> Result<bool, SmoothError> {
    if s.max_level() > 3 {
        return Err(SmoothError::NotLevelOne);
    }
    if !x.is_subset(s.carrier()) {
        return Err(SmoothError::NotASubset(
            x.difference(s.carrier()).cloned().collect(),
        ));
    }
    let mu_x = validity::mu(s, x)?;
    // case (1) for minimal points
    for p in &mu_x {
        let ok = s.copies_of(p).any(|c| {
            s.attackers_of_copy(c)
                .filter(|a| x.contains(a.origin.point()))
                .all(|a| {
                    s.attackers_of_arrow(&a.id).any(|b| {
                        mu_x.contains(b.origin.point())
                            && !s
                                .attackers_of_arrow(&b.id)
                                .any(|g| x.contains(g.origin.point()))
                    })
                })
        });
        if !ok {
            return Ok(false);
        }
    }
    // case (2) for minimized points
    for p in x.difference(&mu_x) {
        for c in s.copies_of(p) {
            let ok = s.attackers_of_copy(c).any(|a| {
                if !mu_x.contains(a.origin.point()) {
                    return false;
                }
                let from_x: Vec<_> = s
                    .attackers_of_arrow(&a.id)
                    .filter(|b| x.contains(b.origin.point()))
                    .collect();
                from_x.is_empty()
                    || from_x.iter().all(|b| {
                        s.attackers_of_arrow(&b.id)
                            .any(|g| mu_x.contains(g.origin.point()))
                    })
            });
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Classical `𝒴`-smoothness (with-copies clause): in every `X` of the
/// family, every copy is unattacked from `X` or attacked by some copy that
/// is itself unattacked from `X`. Requires a level-1 structure.
pub fn is_classically_smooth(
    s: &Structure,
    family: &[PointSet],
) -> Result<SmoothnessVerdict, SmoothError> {
    if s.max_level() > 1 {
        return Err(SmoothError::NotLevelOne);
    }
    for x in family {
        if !x.is_subset(s.carrier()) {
            return Err(SmoothError::NotASubset(
                x.difference(s.carrier()).cloned().collect(),
            ));
        }
        for p in x {
            for c in s.copies_of(p) {
                let attackers: Vec<_> = s
                    .attackers_of_copy(c)
                    .filter(|a| x.contains(a.origin.point()))
                    .collect();
                if attackers.is_empty() {
                    continue;
                }
                let has_minimal_attacker = attackers.iter().any(|a| {
                    let ac = match &a.target {
                        Target::Point(_) => &a.origin,
                        Target::Arrow(_) => unreachable!("level-1 structure"),
                    };
                    !s.attackers_of_copy(ac)
                        .any(|b| x.contains(b.origin.point()))
                });
                if !has_minimal_attacker {
                    return Ok(SmoothnessVerdict::fail(
                        Some(c.clone()),
                        attackers.iter().map(|a| a.id.clone()).collect(),
                        format!("copy ({},{}) has attackers from X but none minimal", c.0, c.1),
                    ));
                }
            }
        }
    }
    Ok(SmoothnessVerdict::ok())
}
