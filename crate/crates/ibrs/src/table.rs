//! Explicitly tabulated choice functions over a finite family of subsets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::PointSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("table value for {0:?} leaves the universe")]
    ValueOutsideUniverse(PointSet),
    #[error("family and value map disagree at {0:?}")]
    FamilyMismatch(PointSet),
    #[error("invalid table: {0}")]
    Invalid(String),
}

/// A tabulated function `μ` (or pair `η`,`ρ` when `eta` is present) over a
/// finite family `𝒴` of subsets of a finite universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuTable {
    pub universe: PointSet,
    pub family: BTreeSet<PointSet>,
    pub values: BTreeMap<PointSet, PointSet>,
    pub eta: Option<BTreeMap<PointSet, PointSet>>,
}

impl MuTable {
    pub fn new(
        universe: PointSet,
        values: BTreeMap<PointSet, PointSet>,
        eta: Option<BTreeMap<PointSet, PointSet>>,
    ) -> Result<MuTable, TableError> {
        for (x, v) in &values {
            if !x.is_subset(&universe) || !v.is_subset(&universe) {
                return Err(TableError::ValueOutsideUniverse(x.clone()));
            }
        }
        if let Some(eta) = &eta {
            if eta.keys().collect::<Vec<_>>() != values.keys().collect::<Vec<_>>() {
                return Err(TableError::Invalid(
                    "eta column must cover exactly the family".into(),
                ));
            }
            for (x, v) in eta {
                if !v.is_subset(&universe) {
                    return Err(TableError::ValueOutsideUniverse(x.clone()));
                }
            }
        }
        let family = values.keys().cloned().collect();
        Ok(MuTable {
            universe,
            family,
            values,
            eta,
        })
    }

    pub fn get(&self, x: &PointSet) -> Option<&PointSet> {
        self.values.get(x)
    }

    pub fn eta_of<'a>(&'a self, x: &'a PointSet) -> Option<&'a PointSet> {
        match &self.eta {
            Some(eta) => eta.get(x),
            None => self.values.contains_key(x).then_some(x),
        }
    }

    /// The `η` column as an explicit map; identity over the family when the
    /// table carries no second column.
    pub fn eta_map(&self) -> BTreeMap<PointSet, PointSet> {
        match &self.eta {
            Some(eta) => eta.clone(),
            None => self.family.iter().map(|x| (x.clone(), x.clone())).collect(),
        }
    }

    /// `(μ⊆)`: every value is a subset of its argument.
    pub fn satisfies_mu_subset(&self) -> bool {
        self.values.iter().all(|(x, v)| v.is_subset(x))
    }

    /// `ρ(X) ⊆ η(X)` everywhere, and `ρ(∅) = η(∅)` when `∅` is in the family.
    pub fn eta_rho_preconditions(&self) -> bool {
        let eta = self.eta_map();
        self.values
            .iter()
            .all(|(x, rho)| rho.is_subset(&eta[x]))
            && match self.values.get(&PointSet::new()) {
                Some(rho_empty) => rho_empty == &eta[&PointSet::new()],
                None => true,
            }
    }

    pub fn to_json(&self) -> String {
        let raw = RawTable {
            universe: self.universe.iter().cloned().collect(),
            family: self.family.iter().map(|s| s.iter().cloned().collect()).collect(),
            mu: self
                .values
                .iter()
                .map(|(k, v)| (set_key(k), v.iter().cloned().collect()))
                .collect(),
            eta: self.eta.as_ref().map(|eta| {
                eta.iter()
                    .map(|(k, v)| (set_key(k), v.iter().cloned().collect()))
                    .collect()
            }),
        };
        serde_json::to_string_pretty(&raw).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<MuTable, TableError> {
        let raw: RawTable =
            serde_json::from_str(text).map_err(|e| TableError::Invalid(e.to_string()))?;
        let universe: PointSet = raw.universe.into_iter().collect();
        let family: BTreeSet<PointSet> = raw
            .family
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        let mut values = BTreeMap::new();
        for (k, v) in raw.mu {
            values.insert(parse_key(&k), v.into_iter().collect());
        }
        for x in &family {
            if !values.contains_key(x) {
                return Err(TableError::FamilyMismatch(x.clone()));
            }
        }
        if values.len() != family.len() {
            let extra = values.keys().find(|k| !family.contains(*k)).unwrap();
            return Err(TableError::FamilyMismatch(extra.clone()));
        }
        let eta = match raw.eta {
            Some(raw_eta) => {
                let mut eta = BTreeMap::new();
                for (k, v) in raw_eta {
                    eta.insert(parse_key(&k), v.into_iter().collect());
                }
                Some(eta)
            }
            None => None,
        };
        MuTable::new(universe, values, eta)
    }
}

impl fmt::Display for MuTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, v) in &self.values {
            writeln!(f, "  mu({{{}}}) = {{{}}}", set_key(x), set_key(v))?;
        }
        Ok(())
    }
}

pub fn set_key(s: &PointSet) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(",")
}

fn parse_key(k: &str) -> PointSet {
    crate::model::point_set(k)
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    universe: Vec<String>,
    family: Vec<Vec<String>>,
    mu: BTreeMap<String, Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<BTreeMap<String, Vec<String>>>,
}
