//! The valid-arrow calculus and the minimal-element functions.
//!
//! Validity is decided by a downward induction over levels: attackers of an
//! arrow sit one level above it, so evaluating levels in descending order
//! terminates and every attacker's counter-attackers are already decided.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{ModelError, PointSet, Structure, Target};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidityError {
    #[error("{0:?} is not a subset of the carrier")]
    NotASubset(PointSet),
    #[error("X must be a subset of Y")]
    NotNested,
    #[error("{0:?} is not in the table's domain")]
    DomainMiss(PointSet),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which validity notion a [`ValiditySets`] was computed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScopeKind {
    /// `X`-to-`Y`: `O(α) ⊆ X`, `D(α) ⊆ Y`, attackers quantified over `X`.
    XtoY,
    /// `X ⇒ Y`: `o(α) ∈ X`, `O(α) ⊆ Y`, `D(α) ⊆ Y`, attackers over `Y`.
    XimplY,
}

/// Result of a validity computation: the scope plus every valid arrow id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValiditySets {
    pub kind: ScopeKind,
    pub x: PointSet,
    pub y: PointSet,
    pub valid: BTreeSet<String>,
}

fn valid_flags(s: &Structure, x: &PointSet, y: &PointSet, kind: ScopeKind) -> Vec<bool> {
    let n = s.arrow_count();
    let closures = s.closures();
    let mut valid = vec![false; n];

    // attackers indexed by target arrow
    let mut attackers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        if let Target::Arrow(tid) = &s.arrow_by_idx(i).target {
            let t = s.idx_of(tid).expect("validated");
            attackers.entry(t).or_default().push(i);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(s.level_by_idx(i)));

    let attacker_window = match kind {
        ScopeKind::XtoY => x,
        ScopeKind::XimplY => y,
    };

    for i in order {
        let a = s.arrow_by_idx(i);
        let cs = &closures[i];
        let closure_ok = match kind {
            ScopeKind::XtoY => cs.origins.is_subset(x) && cs.destinations.is_subset(y),
            ScopeKind::XimplY => {
                x.contains(a.origin.point())
                    && cs.origins.is_subset(y)
                    && cs.destinations.is_subset(y)
            }
        };
        if !closure_ok {
            continue;
        }
        let mut ok = true;
        for &b in attackers.get(&i).into_iter().flatten() {
            let beta = s.arrow_by_idx(b);
            if !attacker_window.contains(beta.origin.point()) {
                continue;
            }
            // β must itself be counter-attacked by a valid arrow
            let countered = attackers
                .get(&b)
                .into_iter()
                .flatten()
                .any(|&g| valid[g]);
            if !countered {
                ok = false;
                break;
            }
        }
        valid[i] = ok;
    }
    valid
}

fn collect(s: &Structure, flags: &[bool]) -> BTreeSet<String> {
    s.arrows()
        .enumerate()
        .filter(|(i, _)| flags[*i])
        .map(|(_, a)| a.id.clone())
        .collect()
}

/// Valid `X`-to-`Y` arrows of the structure.
pub fn valid_x_to_y(s: &Structure, x: &PointSet, y: &PointSet) -> Result<ValiditySets, ValidityError> {
    for set in [x, y] {
        if !set.is_subset(s.carrier()) {
            return Err(ValidityError::NotASubset(
                set.difference(s.carrier()).cloned().collect(),
            ));
        }
    }
    let flags = valid_flags(s, x, y, ScopeKind::XtoY);
    Ok(ValiditySets {
        kind: ScopeKind::XtoY,
        x: x.clone(),
        y: y.clone(),
        valid: collect(s, &flags),
    })
}

/// Valid `X ⇒ Y` arrows; requires `X ⊆ Y ⊆` carrier.
pub fn valid_x_impl_y(s: &Structure, x: &PointSet, y: &PointSet) -> Result<ValiditySets, ValidityError> {
    if !y.is_subset(s.carrier()) {
        return Err(ValidityError::NotASubset(
            y.difference(s.carrier()).cloned().collect(),
        ));
    }
    if !x.is_subset(y) {
        return Err(ValidityError::NotNested);
    }
    let flags = valid_flags(s, x, y, ScopeKind::XimplY);
    Ok(ValiditySets {
        kind: ScopeKind::XimplY,
        x: x.clone(),
        y: y.clone(),
        valid: collect(s, &flags),
    })
}

/// `μ(X)`: the elements of `X` with a copy that no valid `X`-to-`X` arrow
/// points at. Evaluated inside the legal subdiagram generated by `X`; arrows
/// mentioning points outside `X` cannot satisfy the closure conditions, so
/// this agrees with evaluation in the full structure (asserted in tests).
pub fn mu(s: &Structure, x: &PointSet) -> Result<PointSet, ValidityError> {
    let r = s.restrict(x)?;
    Ok(mu_unrestricted(&r, x))
}

/// `μ(X)` evaluated directly in `s`, without restricting first.
pub fn mu_unrestricted(s: &Structure, x: &PointSet) -> PointSet {
    let flags = valid_flags(s, x, x, ScopeKind::XtoY);
    minimal_points(s, x, &flags)
}

fn minimal_points(s: &Structure, x: &PointSet, flags: &[bool]) -> PointSet {
    let mut attacked: BTreeSet<&crate::model::PointCopy> = BTreeSet::new();
    for (i, a) in s.arrows().enumerate() {
        if flags[i] {
            if let Target::Point(c) = &a.target {
                attacked.insert(c);
            }
        }
    }
    x.iter()
        .filter(|p| {
            s.copies_of(p).any(|c| !attacked.contains(c))
        })
        .cloned()
        .collect()
}

/// `ρ(X)` of an attacking structure relative to `η`: the elements of `η(X)`
/// with a copy that no valid `X`-to-`η(X)` arrow points at. Evaluated in the
/// full structure.
pub fn mu_attacking(
    s: &Structure,
    eta: &BTreeMap<PointSet, PointSet>,
    x: &PointSet,
) -> Result<PointSet, ValidityError> {
    let eta_x = eta.get(x).ok_or_else(|| ValidityError::DomainMiss(x.clone()))?;
    let flags = valid_flags(s, x, eta_x, ScopeKind::XtoY);
    Ok(minimal_points(s, eta_x, &flags))
}
