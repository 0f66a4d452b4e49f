//! Algebraic properties of tabulated choice functions and brute-force
//! verification of the implication table between them.
//!
//! Instances whose constructed sets (unions, intersections, pairs) fall
//! outside the family are skipped and counted, so vacuous passes stay
//! visible.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::model::PointSet;
use crate::sample;
use crate::table::{set_key, MuTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PropError {
    #[error("unknown property {0}")]
    UnknownProperty(String),
    #[error("unknown implication row {0}")]
    UnknownRow(String),
    #[error("search space exceeded: {0}")]
    SearchSpaceExceeded(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PropertyId {
    MuSubset,
    MuEmpty,
    MuEmptyFin,
    MuPr,
    MuPrPrime,
    MuOr,
    MuWOr,
    MuDisjOr,
    MuCut,
    MuCm,
    MuResM,
    MuCum,
    MuSubsetSupset,
    MuRatM,
    MuEq,
    MuEqPrime,
    MuPar,
    MuCup,
    MuCupPrime,
    MuIn,
}

pub const ALL_PROPERTIES: &[PropertyId] = &[
    PropertyId::MuSubset,
    PropertyId::MuEmpty,
    PropertyId::MuEmptyFin,
    PropertyId::MuPr,
    PropertyId::MuPrPrime,
    PropertyId::MuOr,
    PropertyId::MuWOr,
    PropertyId::MuDisjOr,
    PropertyId::MuCut,
    PropertyId::MuCm,
    PropertyId::MuResM,
    PropertyId::MuCum,
    PropertyId::MuSubsetSupset,
    PropertyId::MuRatM,
    PropertyId::MuEq,
    PropertyId::MuEqPrime,
    PropertyId::MuPar,
    PropertyId::MuCup,
    PropertyId::MuCupPrime,
    PropertyId::MuIn,
];

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PropertyId::MuSubset => "(μ⊆)",
            PropertyId::MuEmpty => "(μ∅)",
            PropertyId::MuEmptyFin => "(μ∅fin)",
            PropertyId::MuPr => "(μPR)",
            PropertyId::MuPrPrime => "(μPR')",
            PropertyId::MuOr => "(μOR)",
            PropertyId::MuWOr => "(μwOR)",
            PropertyId::MuDisjOr => "(μdisjOR)",
            PropertyId::MuCut => "(μCUT)",
            PropertyId::MuCm => "(μCM)",
            PropertyId::MuResM => "(μResM)",
            PropertyId::MuCum => "(μCUM)",
            PropertyId::MuSubsetSupset => "(μ⊆⊇)",
            PropertyId::MuRatM => "(μRatM)",
            PropertyId::MuEq => "(μ=)",
            PropertyId::MuEqPrime => "(μ=')",
            PropertyId::MuPar => "(μ∥)",
            PropertyId::MuCup => "(μ∪)",
            PropertyId::MuCupPrime => "(μ∪')",
            PropertyId::MuIn => "(μ∈)",
        };
        write!(f, "{s}")
    }
}

impl FromStr for PropertyId {
    type Err = PropError;

    fn from_str(s: &str) -> Result<Self, PropError> {
        let norm = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .replace(' ', "")
            .replace('μ', "mu")
            .to_ascii_lowercase();
        let id = match norm.as_str() {
            "musubset" | "mu⊆" | "musub" => PropertyId::MuSubset,
            "muempty" | "mu∅" | "mu0" => PropertyId::MuEmpty,
            "muemptyfin" | "mu∅fin" | "mu0fin" => PropertyId::MuEmptyFin,
            "mupr" => PropertyId::MuPr,
            "muprprime" | "mupr'" => PropertyId::MuPrPrime,
            "muor" => PropertyId::MuOr,
            "muwor" => PropertyId::MuWOr,
            "mudisjor" => PropertyId::MuDisjOr,
            "mucut" => PropertyId::MuCut,
            "mucm" => PropertyId::MuCm,
            "muresm" => PropertyId::MuResM,
            "mucum" => PropertyId::MuCum,
            "musubsetsupset" | "mu⊆⊇" | "musubsup" => PropertyId::MuSubsetSupset,
            "muratm" => PropertyId::MuRatM,
            "mueq" | "mu=" => PropertyId::MuEq,
            "mueqprime" | "mu='" | "mu=prime" => PropertyId::MuEqPrime,
            "mupar" | "mu∥" | "mu‖" | "mu||" => PropertyId::MuPar,
            "mucup" | "mu∪" => PropertyId::MuCup,
            "mucupprime" | "mu∪'" => PropertyId::MuCupPrime,
            "muin" | "mu∈" => PropertyId::MuIn,
            _ => return Err(PropError::UnknownProperty(s.to_string())),
        };
        Ok(id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessValue {
    Set(PointSet),
    Elem(String),
}

impl fmt::Display for WitnessValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessValue::Set(s) => write!(f, "{{{}}}", set_key(s)),
            WitnessValue::Elem(e) => write!(f, "{e}"),
        }
    }
}

pub type Witness = BTreeMap<String, WitnessValue>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyVerdict {
    pub property: PropertyId,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub skipped_instances: u64,
}

struct Check<'t> {
    t: &'t MuTable,
    skipped: u64,
    witness: Option<Witness>,
}

impl<'t> Check<'t> {
    fn new(t: &'t MuTable) -> Self {
        Check { t, skipped: 0, witness: None }
    }

    /// Value lookup that records a skip when the set is outside the family.
    fn get(&mut self, x: &PointSet) -> Option<PointSet> {
        match self.t.get(x) {
            Some(v) => Some(v.clone()),
            None => {
                self.skipped += 1;
                None
            }
        }
    }

    fn fail(&mut self, bindings: &[(&str, WitnessValue)]) -> bool {
        self.witness = Some(
            bindings
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        );
        false
    }
}

fn inter(a: &PointSet, b: &PointSet) -> PointSet {
    a.intersection(b).cloned().collect()
}
fn union(a: &PointSet, b: &PointSet) -> PointSet {
    a.union(b).cloned().collect()
}
fn diff(a: &PointSet, b: &PointSet) -> PointSet {
    a.difference(b).cloned().collect()
}

fn run_property(c: &mut Check, prop: PropertyId) -> bool {
    let family: Vec<PointSet> = c.t.family.iter().cloned().collect();
    let universe = c.t.universe.clone();
    let wx = |x: &PointSet| WitnessValue::Set(x.clone());
    match prop {
        PropertyId::MuSubset => {
            for x in &family {
                let fx = c.get(x).unwrap();
                if !fx.is_subset(x) {
                    return c.fail(&[("X", wx(x))]);
                }
            }
            true
        }
        PropertyId::MuEmpty | PropertyId::MuEmptyFin => {
            for x in &family {
                let fx = c.get(x).unwrap();
                if fx.is_empty() && !x.is_empty() {
                    return c.fail(&[("X", wx(x))]);
                }
            }
            true
        }
        PropertyId::MuPr => {
            for x in &family {
                for y in &family {
                    if !x.is_subset(y) {
                        continue;
                    }
                    let fx = c.get(x).unwrap();
                    let fy = c.get(y).unwrap();
                    if !inter(&fy, x).is_subset(&fx) {
                        return c.fail(&[("X", wx(x)), ("Y", wx(y))]);
                    }
                }
            }
            true
        }
        PropertyId::MuPrPrime => {
            for x in &family {
                for y in &family {
                    let fx = c.get(x).unwrap();
                    let Some(fxy) = c.get(&inter(x, y)) else { continue };
                    if !inter(&fx, y).is_subset(&fxy) {
                        return c.fail(&[("X", wx(x)), ("Y", wx(y))]);
                    }
                }
            }
            true
        }
        PropertyId::MuOr | PropertyId::MuDisjOr => {
            for x in &family {
                for y in &family {
                    if prop == PropertyId::MuDisjOr && !inter(x, y).is_empty() {
                        continue;
                    }
                    let fx = c.get(x).unwrap();
                    let fy = c.get(y).unwrap();
                    let Some(fxy) = c.get(&union(x, y)) else { continue };
                    if !fxy.is_subset(&union(&fx, &fy)) {
                        return c.fail(&[("X", wx(x)), ("Y", wx(y))]);
                    }
                }
            }
            true
        }
        PropertyId::MuWOr => {
            for x in &family {
                for y in &family {
                    let fx = c.get(x).unwrap();
                    let Some(fxy) = c.get(&union(x, y)) else { continue };
                    if !fxy.is_subset(&union(&fx, y)) {
                        return c.fail(&[("X", wx(x)), ("Y", wx(y))]);
                    }
                }
            }
            true
        }
        PropertyId::MuCut | PropertyId::MuCm | PropertyId::MuCum => {
            for x in &family {
                for y in &family {
                    let fx = c.get(x).unwrap();
                    if !(fx.is_subset(y) && y.is_subset(x)) {
                        continue;
                    }
                    let fy = c.get(y).unwrap();
                    let ok = match prop {
                        PropertyId::MuCut => fx.is_subset(&fy),
                        PropertyId::MuCm => fy.is_subset(&fx),
                        _ => fx == fy,
                    };
                    if !ok {
                        return c.fail(&[("X", wx(x)), ("Y", wx(y))]);
                    }
                }
            }
            true
        }
        PropertyId::MuResM => {
            // A and B range over arbitrary (formula-definable) sets
            let all = sample::powerset(&universe);
            for x in &family {
                let fx = c.get(x).unwrap();
                for a in &all {
                    if !fx.is_subset(a) {
                        continue;
                    }
                    let Some(fxa) = c.get(&inter(x, a)) else { continue };
                    for b in &all {
                        if fx.is_subset(&inter(a, b)) && !fxa.is_subset(b) {
                            return c.fail(&[("X", wx(x)), ("A", wx(a)), ("B", wx(b))]);
                        }
                    }
                }
            }
            true
        }
        PropertyId::MuSubsetSupset => {
            for x in &family {
                for y in &family {
                    let fx = c.get(x).unwrap();
                    let fy = c.get(y).unwrap();
                    if fx.is_subset(y) && fy.is_subset(x) && fx != fy {
                        return c.fail(&[("X", wx(x)), ("Y", wx(y))]);
                    }
                }
            }
            true
        }
        PropertyId::MuRatM | PropertyId::MuEq => {
            for x in &family {
                for y in &family {
                    if !x.is_subset(y) {
                        continue;
                    }
                    let fx = c.get(x).unwrap();
                    let fy = c.get(y).unwrap();
                    if inter(x, &fy).is_empty() {
                        continue;
                    }
                    let rhs = inter(&fy, x);
                    let ok = match prop {
                        PropertyId::MuRatM => fx.is_subset(&rhs),
                        _ => fx == rhs,
                    };
                    if !ok {
                        return c.fail(&[("X", wx(x)), ("Y", wx(y))]);
                    }
                }
            }
            true
        }
        PropertyId::MuEqPrime => {
            for x in &family {
                for y in &family {
                    let fy = c.get(y).unwrap();
                    if inter(&fy, x).is_empty() {
                        continue;
                    }
                    let Some(fyx) = c.get(&inter(y, x)) else { continue };
                    if fyx != inter(&fy, x) {
                        return c.fail(&[("X", wx(x)), ("Y", wx(y))]);
                    }
                }
            }
            true
        }
        PropertyId::MuPar => {
            for x in &family {
                for y in &family {
                    let fx = c.get(x).unwrap();
                    let fy = c.get(y).unwrap();
                    let Some(fxy) = c.get(&union(x, y)) else { continue };
                    if fxy != fx && fxy != fy && fxy != union(&fx, &fy) {
                        return c.fail(&[("X", wx(x)), ("Y", wx(y))]);
                    }
                }
            }
            true
        }
        PropertyId::MuCup | PropertyId::MuCupPrime => {
            for x in &family {
                for y in &family {
                    let fx = c.get(x).unwrap();
                    let fy = c.get(y).unwrap();
                    if inter(&fy, &diff(x, &fx)).is_empty() {
                        continue;
                    }
                    let Some(fxy) = c.get(&union(x, y)) else { continue };
                    let ok = match prop {
                        PropertyId::MuCup => inter(&fxy, y).is_empty(),
                        _ => fxy == fx,
                    };
                    if !ok {
                        return c.fail(&[("X", wx(x)), ("Y", wx(y))]);
                    }
                }
            }
            true
        }
        PropertyId::MuIn => {
            for x in &family {
                let fx = c.get(x).unwrap();
                for a in diff(x, &fx) {
                    let mut found = false;
                    let mut any_undefined = false;
                    for b in x {
                        let pair: PointSet = [a.clone(), b.clone()].into_iter().collect();
                        match c.t.get(&pair) {
                            Some(fab) => {
                                if !fab.contains(&a) {
                                    found = true;
                                    break;
                                }
                            }
                            None => any_undefined = true,
                        }
                    }
                    if !found {
                        if any_undefined {
                            c.skipped += 1;
                        } else {
                            return c.fail(&[("X", wx(x)), ("a", WitnessValue::Elem(a))]);
                        }
                    }
                }
            }
            true
        }
    }
}

/// Decides a single property by universal quantification over the family.
pub fn check_property(table: &MuTable, prop: PropertyId) -> PropertyVerdict {
    let mut c = Check::new(table);
    let holds = run_property(&mut c, prop);
    PropertyVerdict {
        property: prop,
        holds,
        witness: c.witness,
        skipped_instances: c.skipped,
    }
}

/// Re-evaluates exactly one instance of a property at the witness bindings;
/// `false` means the witness indeed violates the property.
pub fn replay_witness(table: &MuTable, prop: PropertyId, witness: &Witness) -> bool {
    let set = |k: &str| match witness.get(k) {
        Some(WitnessValue::Set(s)) => s.clone(),
        _ => panic!("witness binding {k} missing"),
    };
    let f = |s: &PointSet| table.get(s).cloned();
    match prop {
        PropertyId::MuSubset => f(&set("X")).is_none_or(|fx| fx.is_subset(&set("X"))),
        PropertyId::MuEmpty | PropertyId::MuEmptyFin => {
            f(&set("X")).is_none_or(|fx| !(fx.is_empty() && !set("X").is_empty()))
        }
        PropertyId::MuPr => {
            let (x, y) = (set("X"), set("Y"));
            match (f(&x), f(&y)) {
                (Some(fx), Some(fy)) if x.is_subset(&y) => inter(&fy, &x).is_subset(&fx),
                _ => true,
            }
        }
        PropertyId::MuPrPrime => {
            let (x, y) = (set("X"), set("Y"));
            match (f(&x), f(&inter(&x, &y))) {
                (Some(fx), Some(fxy)) => inter(&fx, &y).is_subset(&fxy),
                _ => true,
            }
        }
        PropertyId::MuOr | PropertyId::MuDisjOr => {
            let (x, y) = (set("X"), set("Y"));
            if prop == PropertyId::MuDisjOr && !inter(&x, &y).is_empty() {
                return true;
            }
            match (f(&x), f(&y), f(&union(&x, &y))) {
                (Some(fx), Some(fy), Some(fxy)) => fxy.is_subset(&union(&fx, &fy)),
                _ => true,
            }
        }
        PropertyId::MuWOr => {
            let (x, y) = (set("X"), set("Y"));
            match (f(&x), f(&union(&x, &y))) {
                (Some(fx), Some(fxy)) => fxy.is_subset(&union(&fx, &y)),
                _ => true,
            }
        }
        PropertyId::MuCut | PropertyId::MuCm | PropertyId::MuCum => {
            let (x, y) = (set("X"), set("Y"));
            match (f(&x), f(&y)) {
                (Some(fx), Some(fy)) if fx.is_subset(&y) && y.is_subset(&x) => match prop {
                    PropertyId::MuCut => fx.is_subset(&fy),
                    PropertyId::MuCm => fy.is_subset(&fx),
                    _ => fx == fy,
                },
                _ => true,
            }
        }
        PropertyId::MuResM => {
            let (x, a, b) = (set("X"), set("A"), set("B"));
            match (f(&x), f(&inter(&x, &a))) {
                (Some(fx), Some(fxa)) if fx.is_subset(&inter(&a, &b)) => fxa.is_subset(&b),
                _ => true,
            }
        }
        PropertyId::MuSubsetSupset => {
            let (x, y) = (set("X"), set("Y"));
            match (f(&x), f(&y)) {
                (Some(fx), Some(fy)) if fx.is_subset(&y) && fy.is_subset(&x) => fx == fy,
                _ => true,
            }
        }
        PropertyId::MuRatM | PropertyId::MuEq => {
            let (x, y) = (set("X"), set("Y"));
            match (f(&x), f(&y)) {
                (Some(fx), Some(fy)) if x.is_subset(&y) && !inter(&x, &fy).is_empty() => {
                    let rhs = inter(&fy, &x);
                    if prop == PropertyId::MuRatM {
                        fx.is_subset(&rhs)
                    } else {
                        fx == rhs
                    }
                }
                _ => true,
            }
        }
        PropertyId::MuEqPrime => {
            let (x, y) = (set("X"), set("Y"));
            match (f(&y), f(&inter(&y, &x))) {
                (Some(fy), Some(fyx)) if !inter(&fy, &x).is_empty() => fyx == inter(&fy, &x),
                _ => true,
            }
        }
        PropertyId::MuPar => {
            let (x, y) = (set("X"), set("Y"));
            match (f(&x), f(&y), f(&union(&x, &y))) {
                (Some(fx), Some(fy), Some(fxy)) => {
                    fxy == fx || fxy == fy || fxy == union(&fx, &fy)
                }
                _ => true,
            }
        }
        PropertyId::MuCup | PropertyId::MuCupPrime => {
            let (x, y) = (set("X"), set("Y"));
            match (f(&x), f(&y), f(&union(&x, &y))) {
                (Some(fx), Some(fy), Some(fxy))
                    if !inter(&fy, &diff(&x, &fx)).is_empty() =>
                {
                    if prop == PropertyId::MuCup {
                        inter(&fxy, &y).is_empty()
                    } else {
                        fxy == fx
                    }
                }
                _ => true,
            }
        }
        PropertyId::MuIn => {
            let x = set("X");
            let a = match witness.get("a") {
                Some(WitnessValue::Elem(e)) => e.clone(),
                _ => panic!("witness binding a missing"),
            };
            match f(&x) {
                Some(fx) if x.contains(&a) && !fx.contains(&a) => x.iter().any(|b| {
                    let pair: PointSet = [a.clone(), b.clone()].into_iter().collect();
                    table.get(&pair).is_some_and(|fab| !fab.contains(&a))
                }),
                _ => true,
            }
        }
    }
}

/// Closure conditions on the family itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureKind {
    Intersection,
    Union,
    Complement,
    SetDifference,
    Singletons,
}

impl fmt::Display for ClosureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClosureKind::Intersection => "(∩)",
            ClosureKind::Union => "(∪)",
            ClosureKind::Complement => "(C)",
            ClosureKind::SetDifference => "(−)",
            ClosureKind::Singletons => "singletons",
        };
        write!(f, "{s}")
    }
}

impl FromStr for ClosureKind {
    type Err = PropError;
    fn from_str(s: &str) -> Result<Self, PropError> {
        match s.trim().trim_matches(['(', ')']) {
            "∩" | "cap" | "intersection" => Ok(ClosureKind::Intersection),
            "∪" | "cup" | "union" => Ok(ClosureKind::Union),
            "C" | "c" | "complement" => Ok(ClosureKind::Complement),
            "−" | "-" | "difference" | "setdiff" => Ok(ClosureKind::SetDifference),
            "singletons" => Ok(ClosureKind::Singletons),
            other => Err(PropError::UnknownProperty(other.to_string())),
        }
    }
}

/// Checks a closure condition of the family, with a witness pair on failure.
pub fn check_family_closure(table: &MuTable, kind: ClosureKind) -> (bool, Option<Witness>) {
    let fam: Vec<&PointSet> = table.family.iter().collect();
    let wit = |x: &PointSet, y: Option<&PointSet>, missing: &PointSet| {
        let mut w = Witness::new();
        w.insert("X".into(), WitnessValue::Set(x.clone()));
        if let Some(y) = y {
            w.insert("Y".into(), WitnessValue::Set(y.clone()));
        }
        w.insert("missing".into(), WitnessValue::Set(missing.clone()));
        w
    };
    match kind {
        ClosureKind::Intersection | ClosureKind::Union | ClosureKind::SetDifference => {
            for x in &fam {
                for y in &fam {
                    let built = match kind {
                        ClosureKind::Intersection => inter(x, y),
                        ClosureKind::Union => union(x, y),
                        _ => diff(x, y),
                    };
                    if !table.family.contains(&built) {
                        return (false, Some(wit(x, Some(y), &built)));
                    }
                }
            }
            (true, None)
        }
        ClosureKind::Complement => {
            for x in &fam {
                let built = diff(&table.universe, x);
                if !table.family.contains(&built) {
                    return (false, Some(wit(x, None, &built)));
                }
            }
            (true, None)
        }
        ClosureKind::Singletons => {
            for u in &table.universe {
                let s: PointSet = std::iter::once(u.clone()).collect();
                if !table.family.contains(&s) {
                    return (false, Some(wit(&s, None, &s)));
                }
            }
            (true, None)
        }
    }
}

/// One row of the implication table.
#[derive(Clone)]
pub struct RowSpec {
    pub id: &'static str,
    pub lhs: &'static [PropertyId],
    pub aux_closures: &'static [ClosureKind],
    pub rhs: &'static [PropertyId],
    pub positive: bool,
    /// `None` means verifiable at desk scale; otherwise the reason it is not.
    pub unverifiable: Option<&'static str>,
    pub fixture: Option<fn() -> MuTable>,
}

use ClosureKind as C;
use PropertyId as P;

pub const ROWS: &[RowSpec] = &[
    RowSpec { id: "1.1", lhs: &[P::MuPr, P::MuSubset], aux_closures: &[C::Intersection], rhs: &[P::MuPrPrime], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "1.2", lhs: &[P::MuPrPrime], aux_closures: &[], rhs: &[P::MuPr], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "2.1", lhs: &[P::MuPr, P::MuSubset], aux_closures: &[], rhs: &[P::MuOr], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "2.2", lhs: &[P::MuOr, P::MuSubset], aux_closures: &[C::SetDifference], rhs: &[P::MuPr], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "3", lhs: &[P::MuPr], aux_closures: &[], rhs: &[P::MuCut], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "4", lhs: &[P::MuSubset, P::MuSubsetSupset, P::MuCum, P::MuRatM], aux_closures: &[C::Intersection], rhs: &[P::MuPr], positive: false, unverifiable: None, fixture: Some(crate::fixtures::need_pr_table) },
    RowSpec { id: "5.1", lhs: &[P::MuCm, P::MuSubset], aux_closures: &[C::Intersection], rhs: &[P::MuResM], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "5.2", lhs: &[P::MuResM], aux_closures: &[], rhs: &[P::MuCm], positive: true, unverifiable: Some("the converse needs infinite auxiliaries"), fixture: None },
    RowSpec { id: "6.1", lhs: &[P::MuCm, P::MuCut], aux_closures: &[], rhs: &[P::MuCum], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "6.2", lhs: &[P::MuCum], aux_closures: &[], rhs: &[P::MuCm, P::MuCut], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "7", lhs: &[P::MuSubset, P::MuSubsetSupset], aux_closures: &[], rhs: &[P::MuCum], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "8", lhs: &[P::MuSubset, P::MuCum], aux_closures: &[C::Intersection], rhs: &[P::MuSubsetSupset], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "9", lhs: &[P::MuSubset, P::MuCum], aux_closures: &[], rhs: &[P::MuSubsetSupset], positive: false, unverifiable: None, fixture: Some(crate::fixtures::mu_cum_cd_table) },
    RowSpec { id: "10", lhs: &[P::MuRatM, P::MuPr], aux_closures: &[], rhs: &[P::MuEq], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "11", lhs: &[P::MuEq], aux_closures: &[], rhs: &[P::MuPr], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "12.1", lhs: &[P::MuEq, P::MuSubset], aux_closures: &[C::Intersection], rhs: &[P::MuEqPrime], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "12.2", lhs: &[P::MuEqPrime], aux_closures: &[], rhs: &[P::MuEq], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "13", lhs: &[P::MuSubset, P::MuEq], aux_closures: &[C::Union], rhs: &[P::MuCup], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "14", lhs: &[P::MuSubset, P::MuEmpty, P::MuEq], aux_closures: &[C::Union], rhs: &[P::MuPar, P::MuCupPrime, P::MuCum], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "15", lhs: &[P::MuSubset, P::MuPar], aux_closures: &[C::SetDifference], rhs: &[P::MuEq], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "16", lhs: &[P::MuPar, P::MuIn, P::MuPr, P::MuSubset], aux_closures: &[C::Union, C::Singletons], rhs: &[P::MuEq], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "17", lhs: &[P::MuCum, P::MuEq], aux_closures: &[C::Union, C::Singletons], rhs: &[P::MuIn], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "18", lhs: &[P::MuCum, P::MuEq, P::MuSubset], aux_closures: &[C::Union], rhs: &[P::MuPar], positive: true, unverifiable: None, fixture: None },
    RowSpec { id: "19", lhs: &[P::MuPr, P::MuCum, P::MuPar], aux_closures: &[], rhs: &[P::MuEq], positive: true, unverifiable: Some("definability auxiliary; vacuous at finite scale"), fixture: None },
    RowSpec { id: "20", lhs: &[P::MuSubset, P::MuPr, P::MuEq], aux_closures: &[], rhs: &[P::MuPar], positive: false, unverifiable: None, fixture: None },
    RowSpec { id: "21", lhs: &[P::MuSubset, P::MuPr, P::MuPar], aux_closures: &[], rhs: &[P::MuEq], positive: false, unverifiable: None, fixture: None },
    RowSpec { id: "22", lhs: &[P::MuSubset, P::MuPr, P::MuPar, P::MuEq, P::MuCup], aux_closures: &[], rhs: &[P::MuIn], positive: false, unverifiable: None, fixture: None },
];

pub fn row(id: &str) -> Result<&'static RowSpec, PropError> {
    ROWS.iter()
        .find(|r| r.id == id)
        .ok_or_else(|| PropError::UnknownRow(id.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    /// `(μ⊆)`-filtered exhaustive enumeration.
    Filtered,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct ImplicationReport {
    pub row: String,
    pub description: String,
    pub positive: bool,
    pub verifiable: bool,
    pub tables_checked: u64,
    /// Positive rows: a table violating the implication (none expected).
    /// Negative rows: the refuting table (one expected).
    pub counterexample: Option<MuTable>,
    pub note: String,
}

impl ImplicationReport {
    /// Positive rows hold when no counterexample surfaced; negative rows
    /// hold when one did.
    pub fn holds(&self) -> Option<bool> {
        if !self.verifiable {
            return None;
        }
        Some(self.positive != self.counterexample.is_some())
    }
}

fn satisfies(table: &MuTable, props: &[PropertyId], closures: &[ClosureKind]) -> bool {
    closures.iter().all(|&k| check_family_closure(table, k).0)
        && props.iter().all(|&p| check_property(table, p).holds)
}

fn describe(spec: &RowSpec) -> String {
    let lhs: Vec<String> = spec.lhs.iter().map(|p| p.to_string()).collect();
    let aux: Vec<String> = spec.aux_closures.iter().map(|c| c.to_string()).collect();
    let rhs: Vec<String> = spec.rhs.iter().map(|p| p.to_string()).collect();
    format!(
        "{}{} {} {}",
        lhs.join("+"),
        if aux.is_empty() { String::new() } else { format!(" [{}]", aux.join("+")) },
        if spec.positive { "⇒" } else { "⇏" },
        rhs.join("+"),
    )
}

/// Verifies one implication row by brute force over tabulated functions.
pub fn verify_implication(
    row_id: &str,
    universe_size: usize,
    mode: VerifyMode,
) -> Result<ImplicationReport, PropError> {
    let spec = row(row_id)?;
    let description = describe(spec);
    if let Some(reason) = spec.unverifiable {
        return Ok(ImplicationReport {
            row: spec.id.to_string(),
            description,
            positive: spec.positive,
            verifiable: false,
            tables_checked: 0,
            counterexample: None,
            note: format!("unverifiable at desk scale: {reason}"),
        });
    }

    // Negative rows carrying a known refuting table report it directly.
    if let Some(fixture) = spec.fixture {
        let t = fixture();
        let is_counter = satisfies(&t, spec.lhs, spec.aux_closures)
            && !spec.rhs.iter().all(|&p| check_property(&t, p).holds);
        if is_counter {
            return Ok(ImplicationReport {
                row: spec.id.to_string(),
                description,
                positive: spec.positive,
                verifiable: true,
                tables_checked: 1,
                counterexample: Some(t),
                note: "refuted by the catalogued counterexample table".into(),
            });
        }
    }

    let universe = sample::universe(universe_size);
    let candidates: Box<dyn Iterator<Item = MuTable>> = match mode {
        VerifyMode::Exhaustive => {
            if universe_size > 2 {
                return Err(PropError::SearchSpaceExceeded(format!(
                    "exhaustive unrestricted enumeration at |U|={universe_size}; use filtered or sampled"
                )));
            }
            Box::new(sample::all_tables_all_families(&universe).into_iter())
        }
        VerifyMode::Filtered => {
            if universe_size > 3 {
                return Err(PropError::SearchSpaceExceeded(format!(
                    "filtered enumeration at |U|={universe_size}"
                )));
            }
            Box::new(all_subset_tables_all_families(&universe).into_iter())
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut rng = sample::rng(seed);
            Box::new(
                (0..samples).map(move |_| {
                    let mu_subset = rng.gen_bool(0.5);
                    sample::random_table(&mut rng, &universe, mu_subset)
                }),
            )
        }
    };

    let mut checked = 0u64;
    let mut counterexample = None;
    for t in candidates {
        checked += 1;
        if !satisfies(&t, spec.lhs, spec.aux_closures) {
            continue;
        }
        if !spec.rhs.iter().all(|&p| check_property(&t, p).holds) {
            counterexample = Some(t);
            break;
        }
    }
    let note = match (&counterexample, spec.positive) {
        (None, true) => format!("no counterexample found ({checked} tables checked)"),
        (Some(_), true) => "implication refuted".into(),
        (None, false) => format!("no counterexample within the searched space ({checked} tables)"),
        (Some(_), false) => "counterexample found".into(),
    };
    Ok(ImplicationReport {
        row: spec.id.to_string(),
        description,
        positive: spec.positive,
        verifiable: true,
        tables_checked: checked,
        counterexample,
        note,
    })
}

/// All `(μ⊆)` tables over all families `𝒴 ⊆ 𝒫(U)`.
fn all_subset_tables_all_families(universe: &PointSet) -> Vec<MuTable> {
    let subsets = sample::powerset(universe);
    let mut out = Vec::new();
    for fam_mask in 0u32..(1 << subsets.len()) {
        let family: Vec<&PointSet> = subsets
            .iter()
            .enumerate()
            .filter(|(i, _)| fam_mask & (1 << i) != 0)
            .map(|(_, s)| s)
            .collect();
        let options: Vec<Vec<PointSet>> = family.iter().map(|x| sample::powerset(x)).collect();
        sample::odometer(
            &options.iter().map(Vec::len).collect::<Vec<_>>(),
            |idx| {
                let values: BTreeMap<PointSet, PointSet> = family
                    .iter()
                    .enumerate()
                    .map(|(i, x)| ((*x).clone(), options[i][idx[i]].clone()))
                    .collect();
                out.push(MuTable::new(universe.clone(), values, None).unwrap());
            },
        );
    }
    out
}
