//! Canonical fixtures: the worked structures, tables, the labeled example
//! system and the two flip-flop circuits. Exposed to the CLI via
//! [`fixture_json`].

use std::collections::BTreeMap;

use crate::circuit::{Gate, GateKind, Netlist};
use crate::interp::{IbrsArrow, LabelEntry, LabeledIbrs, Object};
use crate::model::{point_set, quick_structure, ArrowSpec, PointCopy, Structure, Target};
use crate::table::MuTable;

/// α': a→b, α'': b→c, α: a→c, β: a→α. Breaks cumulativity:
/// μ({a,b,c}) = {a} but μ({a,c}) = {a,c}.
pub fn need_smooth() -> Structure {
    quick_structure(
        &["a", "b", "c"],
        &[("alp", "a", "b"), ("alpp", "b", "c"), ("al", "a", "c")],
        &[("be", "a", "al")],
        2,
    )
}

/// α: a→b, α': b→c, α'': a→c, β: b→α'. Not totally smooth: the attack on
/// α' has no counterpart from μ.
pub fn totally_smooth_without_witness() -> Structure {
    quick_structure(
        &["a", "b", "c"],
        &[("al", "a", "b"), ("alp", "b", "c"), ("alpp", "a", "c")],
        &[("be", "b", "alp")],
        2,
    )
}

/// The same plus β': a→α'; totally smooth.
pub fn totally_smooth_with_witness() -> Structure {
    quick_structure(
        &["a", "b", "c"],
        &[("al", "a", "b"), ("alp", "b", "c"), ("alpp", "a", "c")],
        &[("be", "b", "alp"), ("bep", "a", "alp")],
        2,
    )
}

/// a → b → ⟨c,0⟩ with an untouched second copy ⟨c,1⟩ and no transitivity.
/// Essentially smooth but not totally smooth.
pub fn total_vs_essential() -> Structure {
    let copies = vec![
        PointCopy::new("a", 0),
        PointCopy::new("b", 0),
        PointCopy::new("c", 0),
        PointCopy::new("c", 1),
    ];
    let specs = vec![
        ArrowSpec::new(
            "al1",
            "al1",
            0,
            PointCopy::new("a", 0),
            Target::Point(PointCopy::new("b", 0)),
        ),
        ArrowSpec::new(
            "al2",
            "al2",
            0,
            PointCopy::new("b", 0),
            Target::Point(PointCopy::new("c", 0)),
        ),
    ];
    Structure::build(["a", "b", "c"], copies, specs, 1).expect("fixture is valid")
}

/// The totally smooth level-3 structure realizing μ(Y)={y,y'},
/// μ({x,y})=μ({x,y'})={x} on Y={x,y,y'}:
/// α₁: x→y, α₂: x→y', α₃: y→x, β₁: y→α₂, β₂: y'→α₁, β₃: y→α₃, β₄: x→α₃,
/// γ₁: y'→β₃, γ₂: y'→β₄.
pub fn level3_solution() -> Structure {
    quick_structure(
        &["x", "y", "yp"],
        &[("a1", "x", "y"), ("a2", "x", "yp"), ("a3", "y", "x")],
        &[
            ("b1", "y", "a2"),
            ("b2", "yp", "a1"),
            ("b3", "y", "a3"),
            ("b4", "x", "a3"),
            ("g1", "yp", "b3"),
            ("g2", "yp", "b4"),
        ],
        3,
    )
}

/// Identity on 𝒫({a,b,c}) except f({a,b}) = {b}. Satisfies (μ⊆), (μCUM),
/// (μRatM), (μ⊆⊇) but not (μPR).
pub fn need_pr_table() -> MuTable {
    let u = point_set("a,b,c");
    let mut values = BTreeMap::new();
    for x in crate::sample::powerset(&u) {
        let v = if x == point_set("a,b") { point_set("b") } else { x.clone() };
        values.insert(x, v);
    }
    MuTable::new(u, values, None).unwrap()
}

/// 𝒴 = {{a,b,c},{a,b,d}} with f({a,b,c})={a}, f({a,b,d})={a,b}.
/// Satisfies (μ⊆)+(μCUM) but not (μ⊆⊇); the family is not ∩-closed.
pub fn mu_cum_cd_table() -> MuTable {
    let u = point_set("a,b,c,d");
    let mut values = BTreeMap::new();
    values.insert(point_set("a,b,c"), point_set("a"));
    values.insert(point_set("a,b,d"), point_set("a,b"));
    MuTable::new(u, values, None).unwrap()
}

/// μ({x,y,y'}) = {y,y'}, μ({x,y}) = μ({x,y'}) = {x}, identity elsewhere.
/// Satisfies (∩), (μ⊆), (μCUM); not representable by a level-2 totally
/// smooth structure.
pub fn level_bigger_2_table() -> MuTable {
    let u = point_set("x,y,yp");
    let mut values = BTreeMap::new();
    for xset in crate::sample::powerset(&u) {
        let v = if xset == u {
            point_set("y,yp")
        } else if xset == point_set("x,y") || xset == point_set("x,yp") {
            point_set("x")
        } else {
            xset.clone()
        };
        values.insert(xset, v);
    }
    MuTable::new(u, values, None).unwrap()
}

/// The worked example system: five nodes, four node-to-node arrows, one
/// arrow attacking an arrow from an arrow, one from a node, with (p,q)
/// labels on everything.
pub fn paper_ibrs() -> LabeledIbrs {
    let nodes: Vec<String> = ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).collect();
    let arrows = vec![
        IbrsArrow { id: "r_ab".into(), from: Object::Node("a".into()), to: Object::Node("b".into()) },
        IbrsArrow { id: "r_ac".into(), from: Object::Node("a".into()), to: Object::Node("c".into()) },
        IbrsArrow { id: "r_dc".into(), from: Object::Node("d".into()), to: Object::Node("c".into()) },
        IbrsArrow { id: "r_de".into(), from: Object::Node("d".into()), to: Object::Node("e".into()) },
        IbrsArrow { id: "r_ab_dc".into(), from: Object::Arrow("r_ab".into()), to: Object::Arrow("r_dc".into()) },
        IbrsArrow { id: "r_d_ac".into(), from: Object::Node("d".into()), to: Object::Arrow("r_ac".into()) },
    ];
    let node_labels = [
        ("a", 0.0, 0.0),
        ("b", 0.0, 1.0),
        ("c", 0.0, 1.0),
        ("d", 1.0, 0.0),
        ("e", 1.0, 1.0),
    ];
    let mut labels = Vec::new();
    for (n, p, q) in node_labels {
        labels.push(LabelEntry { atom: "p".into(), at: Object::Node(n.into()), value: p });
        labels.push(LabelEntry { atom: "q".into(), at: Object::Node(n.into()), value: q });
    }
    for a in &arrows {
        labels.push(LabelEntry { atom: "p".into(), at: Object::Arrow(a.id.clone()), value: 1.0 });
        labels.push(LabelEntry { atom: "q".into(), at: Object::Arrow(a.id.clone()), value: 1.0 });
    }
    LabeledIbrs {
        nodes,
        arrows,
        atoms: vec!["p".into(), "q".into()],
        labels,
    }
}

fn flip_flop(and_delay: u32) -> Netlist {
    let points: Vec<String> = ["In1", "In2", "A1", "A2", "A3", "A4", "Out1", "Out2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let gate = |kind, ins: &[&str], out: &str, delay| Gate {
        kind,
        inputs: ins.iter().map(|s| s.to_string()).collect(),
        out: out.to_string(),
        delay,
    };
    let gates = vec![
        gate(GateKind::And, &["In1", "Out1"], "A1", and_delay),
        gate(GateKind::And, &["In2", "Out2"], "A2", and_delay),
        gate(GateKind::Or, &["A1", "Out2"], "A3", 1),
        gate(GateKind::Or, &["A2", "Out1"], "A4", 1),
        gate(GateKind::Not, &["A3"], "Out1", 1),
        gate(GateKind::Not, &["A4"], "Out2", 1),
    ];
    let mut initial = BTreeMap::new();
    for p in &points {
        initial.insert(p.clone(), p == "In1");
    }
    Netlist {
        points,
        gates,
        inputs: vec!["In1".into(), "In2".into()],
        initial,
    }
}

/// The feedback circuit with delay 1 everywhere; oscillates with period 4.
pub fn circuit1() -> Netlist {
    flip_flop(1)
}

/// The same circuit with AND delay 2; reaches a stable state at t = 6.
pub fn circuit2() -> Netlist {
    flip_flop(2)
}

pub const FIXTURE_NAMES: &[&str] = &[
    "need-smooth",
    "totally-smooth",
    "totally-smooth-plus",
    "total-vs-essential",
    "level3-solution",
    "need-pr",
    "mu-cum-cd",
    "level-bigger-2",
    "paper-ibrs",
    "circuit1",
    "circuit2",
];

/// Serialized form of a named fixture, or `None` for unknown names.
pub fn fixture_json(name: &str) -> Option<String> {
    let json = match name {
        "need-smooth" => need_smooth().to_json(),
        "totally-smooth" => totally_smooth_without_witness().to_json(),
        "totally-smooth-plus" => totally_smooth_with_witness().to_json(),
        "total-vs-essential" => total_vs_essential().to_json(),
        "level3-solution" => level3_solution().to_json(),
        "need-pr" => need_pr_table().to_json(),
        "mu-cum-cd" => mu_cum_cd_table().to_json(),
        "level-bigger-2" => level_bigger_2_table().to_json(),
        "paper-ibrs" => paper_ibrs().to_json(),
        "circuit1" => circuit1().to_json(),
        "circuit2" => circuit2().to_json(),
        _ => return None,
    };
    Some(json)
}
