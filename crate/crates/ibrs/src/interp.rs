//! Labeled IBRS and the extraction algorithms: modal box evaluation,
//! nonmonotonic consequence, winning arguments under higher-order attacks,
//! intuitionistic persistence, and a distance-parameterized counterfactual
//! evaluator.
//!
//! Unlike [`crate::model::Structure`], arrows here may originate at arrows
//! (the argumentation reading needs attacks launched by attacks).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterpError {
    #[error("missing label for atom {atom} at {at}")]
    MissingLabel { atom: String, at: String },
    #[error("missing distance from {from} to {to}")]
    MissingDistance { from: String, to: String },
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("no fixpoint within {0} rounds")]
    NonConvergence(usize),
    #[error("invalid labeled system: {0}")]
    Invalid(String),
}

/// A node or an arrow of the system.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Object {
    Node(String),
    Arrow(String),
}

impl std::fmt::Display for Object {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Object::Node(n) => write!(f, "node {n}"),
            Object::Arrow(a) => write!(f, "arrow {a}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IbrsArrow {
    pub id: String,
    pub from: Object,
    pub to: Object,
}

/// An IBRS with atoms and a (partial) label assignment on nodes and arrows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledIbrs {
    pub nodes: Vec<String>,
    pub arrows: Vec<IbrsArrow>,
    pub atoms: Vec<String>,
    pub labels: Vec<LabelEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub atom: String,
    pub at: Object,
    pub value: f64,
}

impl LabeledIbrs {
    pub fn validate(&self) -> Result<(), InterpError> {
        let nodes: BTreeSet<&str> = self.nodes.iter().map(String::as_str).collect();
        let ids: BTreeSet<&str> = self.arrows.iter().map(|a| a.id.as_str()).collect();
        if ids.len() != self.arrows.len() {
            return Err(InterpError::Invalid("duplicate arrow ids".into()));
        }
        let check = |o: &Object| match o {
            Object::Node(n) if nodes.contains(n.as_str()) => Ok(()),
            Object::Arrow(a) if ids.contains(a.as_str()) => Ok(()),
            other => Err(InterpError::UnknownObject(other.to_string())),
        };
        for a in &self.arrows {
            check(&a.from)?;
            check(&a.to)?;
        }
        for l in &self.labels {
            check(&l.at)?;
            if !self.atoms.contains(&l.atom) {
                return Err(InterpError::Invalid(format!("label for unknown atom {}", l.atom)));
            }
        }
        Ok(())
    }

    /// `h(atom, node)`, required total when an algorithm asks for it.
    pub fn node_label(&self, atom: &str, node: &str) -> Result<f64, InterpError> {
        self.labels
            .iter()
            .find(|l| l.atom == atom && l.at == Object::Node(node.to_string()))
            .map(|l| l.value)
            .ok_or_else(|| InterpError::MissingLabel {
                atom: atom.to_string(),
                at: format!("node {node}"),
            })
    }

    fn node_true(&self, atom: &str, node: &str) -> Result<bool, InterpError> {
        Ok(self.node_label(atom, node)? == 1.0)
    }

    /// Node-to-node successors through level-1 arrows.
    fn successors(&self, node: &str) -> Vec<&str> {
        self.arrows
            .iter()
            .filter_map(|a| match (&a.from, &a.to) {
                (Object::Node(f), Object::Node(t)) if f == node => Some(t.as_str()),
                _ => None,
            })
            .collect()
    }

    fn node_relation(&self) -> Vec<(&str, &str)> {
        self.arrows
            .iter()
            .filter_map(|a| match (&a.from, &a.to) {
                (Object::Node(f), Object::Node(t)) => Some((f.as_str(), t.as_str())),
                _ => None,
            })
            .collect()
    }

    /// Nodes with no incoming node-to-node arrow.
    pub fn minimal_nodes(&self) -> Vec<&str> {
        let rel = self.node_relation();
        self.nodes
            .iter()
            .map(String::as_str)
            .filter(|n| !rel.iter().any(|(_, t)| t == n))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializes")
    }

    pub fn from_json(text: &str) -> Result<LabeledIbrs, InterpError> {
        let sys: LabeledIbrs =
            serde_json::from_str(text).map_err(|e| InterpError::Invalid(e.to_string()))?;
        sys.validate()?;
        Ok(sys)
    }
}

/// Algorithm 1 (reflexive box): `□atom` holds at `world` iff the atom is
/// true at `world` and at every node one arrow away.
pub fn modal_box_eval(sys: &LabeledIbrs, world: &str, atom: &str) -> Result<bool, InterpError> {
    if !sys.nodes.iter().any(|n| n == world) {
        return Err(InterpError::UnknownObject(format!("node {world}")));
    }
    let mut targets = vec![world];
    targets.extend(sys.successors(world));
    for t in targets {
        if !sys.node_true(atom, t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Structure-level box validity: `□atom` at every relation-minimal node,
/// or at an explicitly distinguished set of nodes (for orderings without
/// minimal points).
pub fn modal_box_valid(
    sys: &LabeledIbrs,
    atom: &str,
    minimal_override: Option<&BTreeSet<String>>,
) -> Result<bool, InterpError> {
    let minimal: Vec<&str> = match minimal_override {
        Some(m) => m.iter().map(String::as_str).collect(),
        None => sys.minimal_nodes(),
    };
    for n in minimal {
        if !modal_box_eval(sys, n, atom)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Algorithm 2 (nonmonotonic deduction): `premise |~ conclusion` iff the
/// conclusion holds at every minimal model of the premise. Minimality is
/// taken among the premise models, through level-1 arrows only. An explicit
/// minimal set may be supplied for orderings without minimal points.
pub fn nm_consequence(
    sys: &LabeledIbrs,
    premise: &str,
    conclusion: &str,
    minimal_override: Option<&BTreeSet<String>>,
) -> Result<bool, InterpError> {
    let s_p: Vec<&str> = sys
        .nodes
        .iter()
        .map(String::as_str)
        .filter(|n| sys.node_true(premise, n).unwrap_or(false))
        .collect();
    // require labels total for both atoms on premise models
    for n in &s_p {
        sys.node_true(premise, n)?;
        sys.node_true(conclusion, n)?;
    }
    let rel = sys.node_relation();
    let minimal: Vec<&str> = match minimal_override {
        Some(m) => s_p.iter().copied().filter(|n| m.contains(*n)).collect(),
        None => s_p
            .iter()
            .copied()
            .filter(|n| !rel.iter().any(|(f, t)| t == n && s_p.contains(f)))
            .collect(),
    };
    for n in minimal {
        if !sys.node_true(conclusion, n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Algorithm 3 (winning arguments): grounded-style least fixpoint
/// generalized to attacks on attacks, with nodes and arrows labelled alike.
/// An object is IN once every attack pointing at it is ineffective, OUT
/// once an effective attack hits it; an attack arrow is effective when both
/// it and its source are IN, ineffective when either is OUT. On frameworks
/// without higher-order attacks this is exactly the grounded extension.
/// Labels are ignored.
pub fn winning_arguments(sys: &LabeledIbrs) -> Result<BTreeSet<String>, InterpError> {
    sys.validate()?;

    #[derive(Clone, Copy, PartialEq)]
    enum Status {
        Undecided,
        In,
        Out,
    }
    let mut status: BTreeMap<Object, Status> = sys
        .nodes
        .iter()
        .map(|n| (Object::Node(n.clone()), Status::Undecided))
        .chain(
            sys.arrows
                .iter()
                .map(|a| (Object::Arrow(a.id.clone()), Status::Undecided)),
        )
        .collect();

    let bound = sys.nodes.len() + sys.arrows.len() + 1;
    let mut rounds = 0;
    loop {
        let mut changed = false;
        let snapshot = status.clone();
        let effective = |a: &IbrsArrow| {
            snapshot[&Object::Arrow(a.id.clone())] == Status::In
                && snapshot[&a.from] == Status::In
        };
        let ineffective = |a: &IbrsArrow| {
            snapshot[&Object::Arrow(a.id.clone())] == Status::Out
                || snapshot[&a.from] == Status::Out
        };
        for (obj, st) in status.iter_mut() {
            if *st != Status::Undecided {
                continue;
            }
            let attackers: Vec<&IbrsArrow> = sys.arrows.iter().filter(|a| a.to == *obj).collect();
            if attackers.iter().all(|a| ineffective(a)) {
                *st = Status::In;
                changed = true;
            } else if attackers.iter().any(|a| effective(a)) {
                *st = Status::Out;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        rounds += 1;
        if rounds > bound {
            return Err(InterpError::NonConvergence(bound));
        }
    }
    Ok(sys
        .nodes
        .iter()
        .filter(|n| status[&Object::Node((*n).clone())] == Status::In)
        .cloned()
        .collect())
}

/// The persistence preorder seed: `t ρ₀ s` iff `t = s`, or `t R s` and every
/// atom's label does not decrease from `t` to `s`.
pub fn intuitionistic_rho0(sys: &LabeledIbrs) -> Result<BTreeSet<(String, String)>, InterpError> {
    let mut rho = BTreeSet::new();
    for n in &sys.nodes {
        rho.insert((n.clone(), n.clone()));
    }
    for (f, t) in sys.node_relation() {
        let mut persistent = true;
        for atom in &sys.atoms {
            if sys.node_label(atom, f)? > sys.node_label(atom, t)? {
                persistent = false;
                break;
            }
        }
        if persistent {
            rho.insert((f.to_string(), t.to_string()));
        }
    }
    Ok(rho)
}

fn transitive_closure(rel: &BTreeSet<(String, String)>) -> BTreeSet<(String, String)> {
    let mut closure = rel.clone();
    loop {
        let mut next = closure.clone();
        for (a, b) in &closure {
            for (c, d) in &closure {
                if b == c {
                    next.insert((a.clone(), d.clone()));
                }
            }
        }
        if next == closure {
            return closure;
        }
        closure = next;
    }
}

/// Algorithm 4 (intuitionistic persistence): `premise ⇒ conclusion` holds
/// iff it holds in the Kripke model `(S, ρ)` at every ρ-minimal point,
/// where ρ is the transitive closure of ρ₀. A distinguished point set may
/// replace the minimal ones.
pub fn intuitionistic_eval(
    sys: &LabeledIbrs,
    premise: &str,
    conclusion: &str,
) -> Result<bool, InterpError> {
    intuitionistic_eval_at(sys, premise, conclusion, None)
}

pub fn intuitionistic_eval_at(
    sys: &LabeledIbrs,
    premise: &str,
    conclusion: &str,
    minimal_override: Option<&BTreeSet<String>>,
) -> Result<bool, InterpError> {
    let rho = transitive_closure(&intuitionistic_rho0(sys)?);
    let minimal: Vec<&String> = match minimal_override {
        Some(m) => sys.nodes.iter().filter(|n| m.contains(*n)).collect(),
        None => sys
            .nodes
            .iter()
            .filter(|n| {
                !rho.iter()
                    .any(|(f, t)| t == *n && f != *n)
            })
            .collect(),
    };
    for w in minimal {
        // w ⊩ p ⇒ q iff every ρ-successor satisfying p satisfies q
        for s in &sys.nodes {
            if rho.contains(&(w.clone(), s.clone()))
                && sys.node_true(premise, s)?
                && !sys.node_true(conclusion, s)?
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Counterfactual: at `world`, every node within `radius` that satisfies the
/// premise also satisfies the conclusion. Distances are caller-supplied;
/// the distance from a world to itself defaults to zero.
pub fn counterfactual_eval(
    sys: &LabeledIbrs,
    distances: &BTreeMap<(String, String), f64>,
    world: &str,
    premise: &str,
    conclusion: &str,
    radius: f64,
) -> Result<bool, InterpError> {
    if !sys.nodes.iter().any(|n| n == world) {
        return Err(InterpError::UnknownObject(format!("node {world}")));
    }
    for n in &sys.nodes {
        let d = if n == world {
            distances
                .get(&(world.to_string(), n.clone()))
                .copied()
                .unwrap_or(0.0)
        } else {
            *distances
                .get(&(world.to_string(), n.clone()))
                .ok_or_else(|| InterpError::MissingDistance {
                    from: world.to_string(),
                    to: n.clone(),
                })?
        };
        if d <= radius && sys.node_true(premise, n)? && !sys.node_true(conclusion, n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::paper_ibrs;

    #[test]
    fn fixture_validates() {
        let sys = paper_ibrs();
        sys.validate().unwrap();
        assert_eq!(sys.nodes.len(), 5);
        assert_eq!(sys.arrows.len(), 6);
    }

    #[test]
    fn box_q_false_at_a() {
        let sys = paper_ibrs();
        assert!(!modal_box_eval(&sys, "a", "q").unwrap());
    }

    #[test]
    fn box_p_false_at_d_via_c() {
        // h(p,d)=1, h(p,c)=0, h(p,e)=1
        let sys = paper_ibrs();
        assert!(!modal_box_eval(&sys, "d", "p").unwrap());
    }

    #[test]
    fn isolated_true_node_boxes_itself() {
        let sys = LabeledIbrs {
            nodes: vec!["w".into()],
            arrows: vec![],
            atoms: vec!["q".into()],
            labels: vec![LabelEntry {
                atom: "q".into(),
                at: Object::Node("w".into()),
                value: 1.0,
            }],
        };
        assert!(modal_box_eval(&sys, "w", "q").unwrap());
    }

    #[test]
    fn nm_p_does_not_yield_q() {
        // S_p = {d,e}, minimal {d}, h(q,d)=0
        let sys = paper_ibrs();
        assert!(!nm_consequence(&sys, "p", "q", None).unwrap());
    }

    #[test]
    fn nm_vacuous_when_no_premise_models() {
        let sys = LabeledIbrs {
            nodes: vec!["w".into()],
            arrows: vec![],
            atoms: vec!["p".into(), "q".into()],
            labels: vec![
                LabelEntry { atom: "p".into(), at: Object::Node("w".into()), value: 0.0 },
                LabelEntry { atom: "q".into(), at: Object::Node("w".into()), value: 0.0 },
            ],
        };
        assert!(nm_consequence(&sys, "p", "q", None).unwrap());
    }

    #[test]
    fn nm_q_does_not_yield_p() {
        // S_q = {b,c,e}, no arrows among them, p fails at b and c
        let sys = paper_ibrs();
        assert!(!nm_consequence(&sys, "q", "p", None).unwrap());
    }

    #[test]
    fn fixture_winning_arguments() {
        let sys = paper_ibrs();
        let win = winning_arguments(&sys).unwrap();
        let expect: BTreeSet<String> =
            ["a", "c", "d"].iter().map(|s| s.to_string()).collect();
        assert_eq!(win, expect);
    }

    #[test]
    fn no_arrows_means_everyone_wins() {
        let sys = LabeledIbrs {
            nodes: vec!["a".into(), "b".into()],
            arrows: vec![],
            atoms: vec![],
            labels: vec![],
        };
        let win = winning_arguments(&sys).unwrap();
        assert_eq!(win.len(), 2);
    }

    #[test]
    fn single_attack() {
        let sys = LabeledIbrs {
            nodes: vec!["a".into(), "b".into()],
            arrows: vec![IbrsArrow {
                id: "r".into(),
                from: Object::Node("a".into()),
                to: Object::Node("b".into()),
            }],
            atoms: vec![],
            labels: vec![],
        };
        let win = winning_arguments(&sys).unwrap();
        assert_eq!(win.into_iter().collect::<Vec<_>>(), vec!["a".to_string()]);
    }

    #[test]
    fn fixture_rho0() {
        let sys = paper_ibrs();
        let rho0 = intuitionistic_rho0(&sys).unwrap();
        let mut expect: BTreeSet<(String, String)> = sys
            .nodes
            .iter()
            .map(|n| (n.clone(), n.clone()))
            .collect();
        for (f, t) in [("a", "b"), ("a", "c"), ("d", "e")] {
            expect.insert((f.into(), t.into()));
        }
        assert_eq!(rho0, expect);
    }

    #[test]
    fn equal_labels_lift_whole_relation() {
        let sys = LabeledIbrs {
            nodes: vec!["a".into(), "b".into()],
            arrows: vec![IbrsArrow {
                id: "r".into(),
                from: Object::Node("a".into()),
                to: Object::Node("b".into()),
            }],
            atoms: vec!["p".into()],
            labels: vec![
                LabelEntry { atom: "p".into(), at: Object::Node("a".into()), value: 1.0 },
                LabelEntry { atom: "p".into(), at: Object::Node("b".into()), value: 1.0 },
            ],
        };
        let rho0 = intuitionistic_rho0(&sys).unwrap();
        assert!(rho0.contains(&("a".into(), "b".into())));
        assert_eq!(rho0.len(), 3);
    }

    #[test]
    fn fixture_intuitionistic_p_implies_q_fails_at_d() {
        let sys = paper_ibrs();
        assert!(!intuitionistic_eval(&sys, "p", "q").unwrap());
    }

    #[test]
    fn persistence_invariant_along_rho() {
        let sys = paper_ibrs();
        let rho = transitive_closure(&intuitionistic_rho0(&sys).unwrap());
        for (t, s) in &rho {
            for atom in &sys.atoms {
                assert!(sys.node_label(atom, t).unwrap() <= sys.node_label(atom, s).unwrap());
            }
        }
    }

    #[test]
    fn counterfactual_radius_zero_and_infinity() {
        let sys = paper_ibrs();
        let mut d = BTreeMap::new();
        for n in &sys.nodes {
            d.insert(("a".to_string(), n.clone()), 10.0);
        }
        d.insert(("a".to_string(), "a".to_string()), 0.0);
        // radius 0: only a itself; a has p=0, vacuously true
        assert!(counterfactual_eval(&sys, &d, "a", "p", "q", 0.0).unwrap());
        // infinite radius: material check over all worlds; d has p=1, q=0
        assert!(!counterfactual_eval(&sys, &d, "a", "p", "q", f64::INFINITY).unwrap());
    }

    #[test]
    fn counterfactual_with_only_d_in_range() {
        let sys = paper_ibrs();
        let mut dist = BTreeMap::new();
        for n in &sys.nodes {
            dist.insert(("a".to_string(), n.clone()), 99.0);
        }
        dist.insert(("a".to_string(), "d".to_string()), 2.0);
        // d satisfies p but h(q,d)=0
        assert!(!counterfactual_eval(&sys, &dist, "a", "p", "q", 2.0).unwrap());
        // bringing e inside does not rescue it
        dist.insert(("a".to_string(), "e".to_string()), 2.0);
        assert!(!counterfactual_eval(&sys, &dist, "a", "p", "q", 2.0).unwrap());
    }

    #[test]
    fn counterfactual_missing_distance_reported() {
        let sys = paper_ibrs();
        let d = BTreeMap::new();
        assert!(matches!(
            counterfactual_eval(&sys, &d, "a", "p", "q", 1.0),
            Err(InterpError::MissingDistance { .. })
        ));
    }

    #[test]
    fn winning_matches_classical_grounded_on_plain_frameworks() {
        // independent oracle: Dung's grounded extension via the
        // characteristic function on nodes only
        fn grounded(nodes: &[String], attacks: &[(usize, usize)]) -> BTreeSet<String> {
            let n = nodes.len();
            let mut in_set = vec![false; n];
            let mut out_set = vec![false; n];
            loop {
                let mut changed = false;
                for i in 0..n {
                    if !in_set[i]
                        && attacks.iter().filter(|(_, t)| *t == i).all(|(f, _)| out_set[*f])
                    {
                        in_set[i] = true;
                        changed = true;
                    }
                }
                for i in 0..n {
                    if !out_set[i]
                        && attacks.iter().any(|(f, t)| *t == i && in_set[*f])
                    {
                        out_set[i] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            nodes
                .iter()
                .enumerate()
                .filter(|(i, _)| in_set[*i])
                .map(|(_, n)| n.clone())
                .collect()
        }

        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        // exhaust all 3-node frameworks
        for mask in 0u32..(1 << 9) {
            let mut attacks = vec![];
            let mut arrows = vec![];
            for f in 0..3 {
                for t in 0..3 {
                    if mask & (1 << (f * 3 + t)) != 0 {
                        attacks.push((f, t));
                        arrows.push(IbrsArrow {
                            id: format!("r{f}{t}"),
                            from: Object::Node(names[f].clone()),
                            to: Object::Node(names[t].clone()),
                        });
                    }
                }
            }
            let sys = LabeledIbrs {
                nodes: names.clone(),
                arrows,
                atoms: vec![],
                labels: vec![],
            };
            assert_eq!(
                winning_arguments(&sys).unwrap(),
                grounded(&names, &attacks),
                "mask {mask}"
            );
        }

        // plus a seeded sample of 5-node frameworks
        let names5: Vec<String> = ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).collect();
        let mut rng = crate::sample::rng(41);
        for _ in 0..200 {
            use rand::Rng;
            let mut attacks = vec![];
            let mut arrows = vec![];
            for f in 0..5 {
                for t in 0..5 {
                    if rng.gen_bool(0.25) {
                        attacks.push((f, t));
                        arrows.push(IbrsArrow {
                            id: format!("r{f}{t}"),
                            from: Object::Node(names5[f].clone()),
                            to: Object::Node(names5[t].clone()),
                        });
                    }
                }
            }
            let sys = LabeledIbrs {
                nodes: names5.clone(),
                arrows,
                atoms: vec![],
                labels: vec![],
            };
            assert_eq!(winning_arguments(&sys).unwrap(), grounded(&names5, &attacks));
        }
    }

    #[test]
    fn all_true_labels_make_box_hold_everywhere() {
        let sys = paper_ibrs();
        let mut all_true = sys.clone();
        for l in &mut all_true.labels {
            l.value = 1.0;
        }
        for n in &all_true.nodes {
            assert!(modal_box_eval(&all_true, n, "p").unwrap());
            assert!(modal_box_eval(&all_true, n, "q").unwrap());
        }
        assert!(modal_box_valid(&all_true, "q", None).unwrap());
    }
}
