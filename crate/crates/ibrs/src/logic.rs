//! Propositional logic over a finite language, the consequence relation
//! induced by a structure whose points are valuations, and syntactic rule
//! checking.
//!
//! Theories are handled up to model-set equality; with a finite language
//! every model set is definable, so the definability-preservation side
//! conditions hold automatically and quantification over "all theories"
//! reduces to quantification over all model sets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{PointSet, Structure};
use crate::properties::PropertyId;
use crate::table::MuTable;
use crate::validity;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at byte {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("atom {0} is outside the language")]
    AtomOutsideLanguage(String),
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("oracle violates {0} during tabulation")]
    OracleInconsistent(String),
    #[error("language too large: {0} atoms")]
    LanguageTooLarge(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "T"),
            Formula::False => write!(f, "F"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(x) => write!(f, "!{x}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Iff(a, b) => write!(f, "({a} <-> {b})"),
        }
    }
}

/// A finite set of formulas.
pub type Theory = Vec<Formula>;

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::SyntaxError { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.implies()?;
        if self.eat("<->") {
            let rhs = self.iff()?;
            return Ok(Formula::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.or()?;
        self.skip_ws();
        // don't confuse `->` with the first half of `<->`
        if self.text[self.pos..].starts_with(b"->") {
            self.pos += 2;
            let rhs = self.implies()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.not()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.not()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Formula, LogicError> {
        if self.peek() == Some(b'!') {
            self.pos += 1;
            let inner = self.not()?;
            return Ok(Formula::Not(Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, LogicError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.iff()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    self.err("expected ')'")
                }
            }
            Some(b'T') => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(b'F') => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while self
                    .text
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || *c == b'_')
                {
                    self.pos += 1;
                }
                Ok(Formula::Atom(
                    String::from_utf8_lossy(&self.text[start..self.pos]).into_owned(),
                ))
            }
            Some(c) => self.err(format!("unexpected character {:?}", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses the ASCII grammar: atoms `[a-z][a-z0-9_]*`, `!` `&` `|` `->`
/// `<->`, constants `T`/`F`, parentheses. `¬ > ∧ > ∨ > → > ↔`, with `->`
/// right-associative.
pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    let mut p = Parser { text: text.as_bytes(), pos: 0 };
    let f = p.iff()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// A finite propositional language: an ordered list of distinct atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Language {
    atoms: Vec<String>,
}

/// Model sets are bitmasks over the `2^n` valuations; valuation `v` has
/// atom `i` true iff bit `i` of `v` is set.
pub type ModelSet = u32;

impl Language {
    pub fn new(atoms: impl IntoIterator<Item = impl Into<String>>) -> Result<Language, LogicError> {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.len() > 5 {
            return Err(LogicError::LanguageTooLarge(atoms.len()));
        }
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return Err(LogicError::AtomOutsideLanguage(format!("duplicate atom {a}")));
            }
        }
        Ok(Language { atoms })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn valuation_count(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn full_model_set(&self) -> ModelSet {
        if self.valuation_count() == 32 {
            u32::MAX
        } else {
            (1u32 << self.valuation_count()) - 1
        }
    }

    /// Canonical point name of a valuation: its bits in atom order.
    pub fn valuation_name(&self, v: usize) -> String {
        (0..self.atoms.len())
            .map(|i| if v & (1 << i) != 0 { '1' } else { '0' })
            .collect()
    }

    pub fn valuation_names(&self) -> PointSet {
        (0..self.valuation_count()).map(|v| self.valuation_name(v)).collect()
    }

    pub fn model_set_to_points(&self, m: ModelSet) -> PointSet {
        (0..self.valuation_count())
            .filter(|v| m & (1 << v) != 0)
            .map(|v| self.valuation_name(v))
            .collect()
    }

    pub fn points_to_model_set(&self, points: &PointSet) -> Result<ModelSet, LogicError> {
        let mut m = 0;
        for p in points {
            let v = (0..self.valuation_count())
                .find(|&v| self.valuation_name(v) == *p)
                .ok_or_else(|| LogicError::CarrierMismatch(format!("point {p} is no valuation")))?;
            m |= 1 << v;
        }
        Ok(m)
    }

    fn eval_at(&self, f: &Formula, v: usize) -> Result<bool, LogicError> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => {
                let i = self
                    .atoms
                    .iter()
                    .position(|x| x == a)
                    .ok_or_else(|| LogicError::AtomOutsideLanguage(a.clone()))?;
                v & (1 << i) != 0
            }
            Formula::Not(x) => !self.eval_at(x, v)?,
            Formula::And(a, b) => self.eval_at(a, v)? && self.eval_at(b, v)?,
            Formula::Or(a, b) => self.eval_at(a, v)? || self.eval_at(b, v)?,
            Formula::Implies(a, b) => !self.eval_at(a, v)? || self.eval_at(b, v)?,
            Formula::Iff(a, b) => self.eval_at(a, v)? == self.eval_at(b, v)?,
        })
    }

    /// `M(T)`: the valuations satisfying every formula of the theory.
    pub fn models(&self, theory: &Theory) -> Result<ModelSet, LogicError> {
        let mut m = 0;
        'val: for v in 0..self.valuation_count() {
            for f in theory {
                if !self.eval_at(f, v)? {
                    continue 'val;
                }
            }
            m |= 1 << v;
        }
        Ok(m)
    }

    pub fn models_of(&self, f: &Formula) -> Result<ModelSet, LogicError> {
        self.models(&vec![f.clone()])
    }

    /// `Th(X)` as a canonical finite axiomatization: the full disjunctive
    /// normal form over the language (single formula).
    pub fn theory_of(&self, m: ModelSet) -> Theory {
        if m == self.full_model_set() {
            return vec![Formula::True];
        }
        if m == 0 {
            return vec![Formula::False];
        }
        let mut disjuncts: Option<Formula> = None;
        for v in 0..self.valuation_count() {
            if m & (1 << v) == 0 {
                continue;
            }
            let mut conj: Option<Formula> = None;
            for (i, a) in self.atoms.iter().enumerate() {
                let lit = if v & (1 << i) != 0 {
                    Formula::Atom(a.clone())
                } else {
                    Formula::Not(Box::new(Formula::Atom(a.clone())))
                };
                conj = Some(match conj {
                    None => lit,
                    Some(c) => Formula::And(Box::new(c), Box::new(lit)),
                });
            }
            let minterm = conj.unwrap_or(Formula::True);
            disjuncts = Some(match disjuncts {
                None => minterm,
                Some(d) => Formula::Or(Box::new(d), Box::new(minterm)),
            });
        }
        vec![disjuncts.expect("nonempty model set")]
    }
}

/// Where the choice function driving the consequence relation comes from.
pub enum ConsequenceSource<'a> {
    /// Classical closure: the identity on model sets.
    Classical,
    /// A structure whose carrier is exactly the valuation names.
    Structure(&'a Structure),
    /// A tabulated function over the valuation names.
    Table(&'a MuTable),
}

impl ConsequenceSource<'_> {
    /// Applies the source's choice function to a model set.
    pub fn apply(&self, lang: &Language, m: ModelSet) -> Result<ModelSet, LogicError> {
        match self {
            ConsequenceSource::Classical => Ok(m),
            ConsequenceSource::Structure(s) => {
                if *s.carrier() != lang.valuation_names() {
                    return Err(LogicError::CarrierMismatch(
                        "structure carrier must be exactly the valuation names".into(),
                    ));
                }
                let x = lang.model_set_to_points(m);
                let mu = validity::mu(s, &x)
                    .map_err(|e| LogicError::CarrierMismatch(e.to_string()))?;
                lang.points_to_model_set(&mu)
            }
            ConsequenceSource::Table(t) => {
                if t.universe != lang.valuation_names() {
                    return Err(LogicError::CarrierMismatch(
                        "table universe must be exactly the valuation names".into(),
                    ));
                }
                let x = lang.model_set_to_points(m);
                let fx = t.get(&x).ok_or_else(|| {
                    LogicError::CarrierMismatch(format!(
                        "table family misses the model set {{{}}}",
                        crate::table::set_key(&x)
                    ))
                })?;
                lang.points_to_model_set(fx)
            }
        }
    }

    /// Tabulates the choice function over every model set.
    pub fn tabulate(&self, lang: &Language) -> Result<Vec<ModelSet>, LogicError> {
        (0..(1u64 << lang.valuation_count()))
            .map(|m| self.apply(lang, m as ModelSet))
            .collect()
    }
}

/// `T̄̄ = Th(μ(M(T)))`.
pub fn consequence(
    source: &ConsequenceSource,
    lang: &Language,
    theory: &Theory,
) -> Result<Theory, LogicError> {
    let m = lang.models(theory)?;
    let fm = source.apply(lang, m)?;
    Ok(lang.theory_of(fm))
}

/// Does `T |~ query` hold for the source?
pub fn entails(
    source: &ConsequenceSource,
    lang: &Language,
    theory: &Theory,
    query: &Formula,
) -> Result<bool, LogicError> {
    let m = lang.models(theory)?;
    let fm = source.apply(lang, m)?;
    Ok(fm & !lang.models_of(query)? == 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuleId {
    And,
    Or,
    WOr,
    DisjOr,
    Lle,
    Rw,
    Ccl,
    Sc,
    Ref,
    Cp,
    Pr,
    Cut,
    Cm,
    ResM,
    Cum,
    SubsetSupset,
    RatM,
    RatMEq,
    LogEqPrime,
    LogPar,
    LogCup,
    LogCupPrime,
}

pub const ALL_RULES: &[RuleId] = &[
    RuleId::And,
    RuleId::Or,
    RuleId::WOr,
    RuleId::DisjOr,
    RuleId::Lle,
    RuleId::Rw,
    RuleId::Ccl,
    RuleId::Sc,
    RuleId::Ref,
    RuleId::Cp,
    RuleId::Pr,
    RuleId::Cut,
    RuleId::Cm,
    RuleId::ResM,
    RuleId::Cum,
    RuleId::SubsetSupset,
    RuleId::RatM,
    RuleId::RatMEq,
    RuleId::LogEqPrime,
    RuleId::LogPar,
    RuleId::LogCup,
    RuleId::LogCupPrime,
];

/// The rules characterizing preferential consequence.
pub const SYSTEM_P: &[RuleId] = &[
    RuleId::And,
    RuleId::Or,
    RuleId::Lle,
    RuleId::Rw,
    RuleId::Sc,
    RuleId::Cp,
    RuleId::Cm,
    RuleId::Cum,
];

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleId::And => "(AND)",
            RuleId::Or => "(OR)",
            RuleId::WOr => "(wOR)",
            RuleId::DisjOr => "(disjOR)",
            RuleId::Lle => "(LLE)",
            RuleId::Rw => "(RW)",
            RuleId::Ccl => "(CCL)",
            RuleId::Sc => "(SC)",
            RuleId::Ref => "(REF)",
            RuleId::Cp => "(CP)",
            RuleId::Pr => "(PR)",
            RuleId::Cut => "(CUT)",
            RuleId::Cm => "(CM)",
            RuleId::ResM => "(ResM)",
            RuleId::Cum => "(CUM)",
            RuleId::SubsetSupset => "(⊆⊇)",
            RuleId::RatM => "(RatM)",
            RuleId::RatMEq => "(RatM=)",
            RuleId::LogEqPrime => "(Log=')",
            RuleId::LogPar => "(Log∥)",
            RuleId::LogCup => "(Log∪)",
            RuleId::LogCupPrime => "(Log∪')",
        };
        write!(f, "{s}")
    }
}

impl FromStr for RuleId {
    type Err = LogicError;
    fn from_str(s: &str) -> Result<Self, LogicError> {
        let norm = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .to_ascii_lowercase();
        let id = match norm.as_str() {
            "and" => RuleId::And,
            "or" => RuleId::Or,
            "wor" => RuleId::WOr,
            "disjor" => RuleId::DisjOr,
            "lle" => RuleId::Lle,
            "rw" => RuleId::Rw,
            "ccl" => RuleId::Ccl,
            "sc" => RuleId::Sc,
            "ref" => RuleId::Ref,
            "cp" => RuleId::Cp,
            "pr" => RuleId::Pr,
            "cut" => RuleId::Cut,
            "cm" => RuleId::Cm,
            "resm" => RuleId::ResM,
            "cum" => RuleId::Cum,
            "⊆⊇" | "subsetsupset" | "subsup" => RuleId::SubsetSupset,
            "ratm" => RuleId::RatM,
            "ratm=" | "ratmeq" => RuleId::RatMEq,
            "log='" | "logeqprime" | "log=prime" => RuleId::LogEqPrime,
            "log∥" | "logpar" | "log||" => RuleId::LogPar,
            "log∪" | "logcup" => RuleId::LogCup,
            "log∪'" | "logcupprime" => RuleId::LogCupPrime,
            _ => return Err(LogicError::UnknownRule(s.to_string())),
        };
        Ok(id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleVerdict {
    pub rule: RuleId,
    pub holds: bool,
    /// theories instantiating the refutation, rendered canonically
    pub witness: Option<Vec<(String, String)>>,
    pub note: Option<String>,
}

/// Checks a rule schema against the consequence relation by enumerating all
/// model sets of the language. The theory space is only enumerable for
/// small languages (≤ 3 atoms).
pub fn check_rule(
    source: &ConsequenceSource,
    lang: &Language,
    rule: RuleId,
) -> Result<RuleVerdict, LogicError> {
    if lang.atoms().len() > 3 {
        return Err(LogicError::LanguageTooLarge(lang.atoms().len()));
    }
    let c = source.tabulate(lang)?;
    Ok(check_rule_tabulated(&c, lang, rule))
}

/// As [`check_rule`], on a pre-tabulated consequence function.
pub fn check_rule_tabulated(c: &[ModelSet], lang: &Language, rule: RuleId) -> RuleVerdict {
    let n = c.len();
    let cf = |m: ModelSet| c[m as usize];
    let th = |m: ModelSet| format!("Th({})", lang.theory_of(m)[0]);
    let ok = RuleVerdict { rule, holds: true, witness: None, note: None };
    let fail1 = |x: ModelSet| RuleVerdict {
        rule,
        holds: false,
        witness: Some(vec![("T".into(), th(x))]),
        note: None,
    };
    let fail2 = |x: ModelSet, y: ModelSet| RuleVerdict {
        rule,
        holds: false,
        witness: Some(vec![("T".into(), th(x)), ("T'".into(), th(y))]),
        note: None,
    };

    let subset = |a: ModelSet, b: ModelSet| a & !b == 0;

    match rule {
        RuleId::And | RuleId::Rw | RuleId::Lle | RuleId::Ccl => RuleVerdict {
            rule,
            holds: true,
            witness: None,
            note: Some("holds by the model-set representation of theories".into()),
        },
        RuleId::Sc => {
            for x in 0..n as u32 {
                if !subset(cf(x), x) {
                    return fail1(x);
                }
            }
            ok
        }
        RuleId::Ref => {
            // Δ, α |~ α: the consequences of T ∪ {α} stay below α
            for x in 0..n as u32 {
                for a in 0..n as u32 {
                    if !subset(cf(x & a), a) {
                        return fail2(x, a);
                    }
                }
            }
            ok
        }
        RuleId::Cp => {
            for x in 0..n as u32 {
                if cf(x) == 0 && x != 0 {
                    return fail1(x);
                }
            }
            ok
        }
        RuleId::Pr => {
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    if !subset(cf(x) & y, cf(x & y)) {
                        return fail2(x, y);
                    }
                }
            }
            ok
        }
        RuleId::Cut | RuleId::Cm | RuleId::Cum => {
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    if subset(cf(x), y) && subset(y, x) {
                        let good = match rule {
                            RuleId::Cut => subset(cf(x), cf(y)),
                            RuleId::Cm => subset(cf(y), cf(x)),
                            _ => cf(x) == cf(y),
                        };
                        if !good {
                            return fail2(x, y);
                        }
                    }
                }
            }
            ok
        }
        RuleId::ResM => {
            for x in 0..n as u32 {
                for a in 0..n as u32 {
                    if !subset(cf(x), a) {
                        continue;
                    }
                    let cxa = cf(x & a);
                    for b in 0..n as u32 {
                        if subset(cf(x), a & b) && !subset(cxa, b) {
                            return RuleVerdict {
                                rule,
                                holds: false,
                                witness: Some(vec![
                                    ("T".into(), th(x)),
                                    ("alpha".into(), th(a)),
                                    ("beta".into(), th(b)),
                                ]),
                                note: None,
                            };
                        }
                    }
                }
            }
            ok
        }
        RuleId::SubsetSupset => {
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    if subset(cf(x), y) && subset(cf(y), x) && cf(x) != cf(y) {
                        return fail2(x, y);
                    }
                }
            }
            ok
        }
        RuleId::RatM | RuleId::RatMEq => {
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    if subset(x, y) && x & cf(y) != 0 {
                        let rhs = cf(y) & x;
                        let good = if rule == RuleId::RatM {
                            subset(cf(x), rhs)
                        } else {
                            cf(x) == rhs
                        };
                        if !good {
                            return fail2(x, y);
                        }
                    }
                }
            }
            ok
        }
        RuleId::LogEqPrime => {
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    if cf(y) & x != 0 && cf(y & x) != cf(y) & x {
                        return fail2(x, y);
                    }
                }
            }
            ok
        }
        RuleId::LogPar => {
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    let u = cf(x | y);
                    if u != cf(x) && u != cf(y) && u != cf(x) | cf(y) {
                        return fail2(x, y);
                    }
                }
            }
            ok
        }
        RuleId::LogCup | RuleId::LogCupPrime => {
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    if cf(y) & x != 0 && cf(y) & cf(x) == 0 {
                        let u = cf(x | y);
                        let good = if rule == RuleId::LogCup { u & y == 0 } else { u == cf(x) };
                        if !good {
                            return fail2(x, y);
                        }
                    }
                }
            }
            ok
        }
        RuleId::Or | RuleId::DisjOr => {
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    if rule == RuleId::DisjOr && x & y != 0 {
                        continue;
                    }
                    if !subset(cf(x | y), cf(x) | cf(y)) {
                        return fail2(x, y);
                    }
                }
            }
            ok
        }
        RuleId::WOr => {
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    if !subset(cf(x | y), cf(x) | y) {
                        return fail2(x, y);
                    }
                }
            }
            ok
        }
    }
}

/// An oracle given at the theory level, probed during tabulation.
pub trait TheoryOracle {
    fn consequence(&self, lang: &Language, theory: &Theory) -> Result<Theory, LogicError>;
}

impl TheoryOracle for ConsequenceSource<'_> {
    fn consequence(&self, lang: &Language, theory: &Theory) -> Result<Theory, LogicError> {
        consequence(self, lang, theory)
    }
}

/// Tabulates `f(M(T)) := M(T̄̄)` over every model set, probing (LLE) with a
/// syntactically different equivalent theory each time.
pub fn mu_from_logic(
    oracle: &dyn TheoryOracle,
    lang: &Language,
) -> Result<MuTable, LogicError> {
    let mut values: BTreeMap<PointSet, PointSet> = BTreeMap::new();
    for m in 0..(1u64 << lang.valuation_count()) {
        let m = m as ModelSet;
        let t = lang.theory_of(m);
        let tbar = oracle.consequence(lang, &t)?;
        let fm = lang.models(&tbar)?;
        // (LLE) probe: an equivalent but different axiomatization
        let mut variant = t.clone();
        variant.push(Formula::True);
        let fm2 = lang.models(&oracle.consequence(lang, &variant)?)?;
        if fm != fm2 {
            return Err(LogicError::OracleInconsistent("(LLE)".into()));
        }
        values.insert(lang.model_set_to_points(m), lang.model_set_to_points(fm));
    }
    MuTable::new(lang.valuation_names(), values, None)
        .map_err(|e| LogicError::CarrierMismatch(e.to_string()))
}

/// One row of the rule/property correspondence: the rule holds for the
/// consequence relation iff the matching property holds for the tabulated
/// choice function, under the listed auxiliaries (empty at finite scale for
/// most rows).
pub struct AlgLogRow {
    pub rule: RuleId,
    pub property: PropertyId,
    /// aux for rule ⇒ property
    pub forward_aux: &'static [PropertyId],
    /// aux for property ⇒ rule
    pub backward_aux: &'static [PropertyId],
}

pub const ALG_LOG_ROWS: &[AlgLogRow] = &[
    AlgLogRow { rule: RuleId::Or, property: PropertyId::MuOr, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::DisjOr, property: PropertyId::MuDisjOr, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::WOr, property: PropertyId::MuWOr, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::Sc, property: PropertyId::MuSubset, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::Cp, property: PropertyId::MuEmpty, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::Pr, property: PropertyId::MuPr, forward_aux: &[], backward_aux: &[PropertyId::MuSubset] },
    AlgLogRow { rule: RuleId::Cut, property: PropertyId::MuCut, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::Cm, property: PropertyId::MuCm, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::ResM, property: PropertyId::MuResM, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::SubsetSupset, property: PropertyId::MuSubsetSupset, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::Cum, property: PropertyId::MuCum, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::RatM, property: PropertyId::MuRatM, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::RatMEq, property: PropertyId::MuEq, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::LogEqPrime, property: PropertyId::MuEqPrime, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::LogPar, property: PropertyId::MuPar, forward_aux: &[], backward_aux: &[] },
    AlgLogRow { rule: RuleId::LogCup, property: PropertyId::MuCup, forward_aux: &[PropertyId::MuSubset, PropertyId::MuEq], backward_aux: &[] },
    AlgLogRow { rule: RuleId::LogCupPrime, property: PropertyId::MuCupPrime, forward_aux: &[PropertyId::MuSubset, PropertyId::MuEq], backward_aux: &[] },
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{point_set, quick_structure};
    use crate::properties::check_property;

    fn lang_pq() -> Language {
        Language::new(["p", "q"]).unwrap()
    }

    #[test]
    fn parser_precedence_and_associativity() {
        assert_eq!(
            parse_formula("p & q -> r").unwrap().to_string(),
            "((p & q) -> r)"
        );
        assert_eq!(parse_formula("!(p | q)").unwrap().to_string(), "!(p | q)");
        assert_eq!(
            parse_formula("p -> q -> r").unwrap().to_string(),
            "(p -> (q -> r))"
        );
        assert_eq!(
            parse_formula("p <-> q | r").unwrap().to_string(),
            "(p <-> (q | r))"
        );
        assert!(matches!(
            parse_formula("p & & q"),
            Err(LogicError::SyntaxError { .. })
        ));
        assert!(matches!(
            parse_formula("p )"),
            Err(LogicError::SyntaxError { .. })
        ));
    }

    #[test]
    fn model_set_identities() {
        let lang = lang_pq();
        let t1 = vec![parse_formula("p").unwrap()];
        let t2 = vec![parse_formula("q").unwrap()];
        let union: Theory = t1.iter().chain(&t2).cloned().collect();
        // M(T ∪ T') = M(T) ∩ M(T')
        assert_eq!(
            lang.models(&union).unwrap(),
            lang.models(&t1).unwrap() & lang.models(&t2).unwrap()
        );
        // M(∅) is everything, M({p, ¬p}) nothing
        assert_eq!(lang.models(&vec![]).unwrap(), lang.full_model_set());
        let contradiction = vec![
            parse_formula("p").unwrap(),
            parse_formula("!p").unwrap(),
        ];
        assert_eq!(lang.models(&contradiction).unwrap(), 0);
    }

    #[test]
    fn theory_of_inverts_models() {
        let lang = lang_pq();
        for m in 0..16u32 {
            let t = lang.theory_of(m);
            assert_eq!(lang.models(&t).unwrap(), m, "model set {m}");
        }
        assert_eq!(lang.theory_of(lang.full_model_set()), vec![Formula::True]);
        assert_eq!(lang.theory_of(0), vec![Formula::False]);
    }

    #[test]
    fn arrowless_consequence_is_classical_closure() {
        let lang = lang_pq();
        let names: Vec<String> = lang.valuation_names().into_iter().collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let s = quick_structure(&refs, &[], &[], 1);
        let t = vec![parse_formula("p | q").unwrap()];
        let tbar = consequence(&ConsequenceSource::Structure(&s), &lang, &t).unwrap();
        assert_eq!(
            lang.models(&tbar).unwrap(),
            lang.models(&t).unwrap()
        );
    }

    #[test]
    fn single_atom_preference() {
        // ¬p-model below p-model: ∅ |~ ¬p
        let lang = Language::new(["p"]).unwrap();
        // valuations: "0" (p false), "1" (p true)
        let s = quick_structure(&["0", "1"], &[("al", "0", "1")], &[], 1);
        let src = ConsequenceSource::Structure(&s);
        let empty: Theory = vec![];
        assert!(entails(&src, &lang, &empty, &parse_formula("!p").unwrap()).unwrap());
        assert!(!entails(&src, &lang, &empty, &parse_formula("p").unwrap()).unwrap());
    }

    #[test]
    fn supraclassicality_from_mu_subset() {
        let mut rng = crate::sample::rng(3);
        let lang = lang_pq();
        for _ in 0..40 {
            let s = crate::sample::random_structure_on(&mut rng, &lang.valuation_names(), 2, 10, 2);
            let v = check_rule(&ConsequenceSource::Structure(&s), &lang, RuleId::Sc).unwrap();
            assert!(v.holds, "structures always satisfy (μ⊆): {}", s.to_json());
        }
    }

    #[test]
    fn classical_oracle_satisfies_every_rule() {
        let lang = lang_pq();
        for &rule in ALL_RULES {
            let v = check_rule(&ConsequenceSource::Classical, &lang, rule).unwrap();
            assert!(v.holds, "{rule}");
        }
    }

    #[test]
    fn need_pr_table_lifted_to_the_language_fails_pr() {
        // embed U={a,b,c} into three of the four valuations
        let lang = lang_pq();
        let t = crate::fixtures::need_pr_table();
        let map: BTreeMap<&str, String> = [
            ("a", "00".to_string()),
            ("b", "10".to_string()),
            ("c", "01".to_string()),
        ]
        .into();
        let rename = |s: &PointSet| -> PointSet {
            s.iter().map(|e| map[e.as_str()].clone()).collect()
        };
        let mut values: BTreeMap<PointSet, PointSet> = t
            .values
            .iter()
            .map(|(k, v)| (rename(k), rename(v)))
            .collect();
        // extend to the full powerset: identity on sets containing "11"
        for m in crate::sample::powerset(&lang.valuation_names()) {
            values.entry(m.clone()).or_insert(m);
        }
        let lifted = MuTable::new(lang.valuation_names(), values, None).unwrap();
        let v = check_rule(&ConsequenceSource::Table(&lifted), &lang, RuleId::Pr).unwrap();
        assert!(!v.holds);
        assert!(v.witness.is_some());
    }

    #[test]
    fn mu_from_logic_round_trips() {
        let lang = lang_pq();
        // classical oracle tabulates to the identity
        let t = mu_from_logic(&ConsequenceSource::Classical, &lang).unwrap();
        for (x, v) in &t.values {
            assert_eq!(x, v);
        }
        // structure oracle: mu_from_logic ∘ consequence = direct tabulation
        let mut rng = crate::sample::rng(9);
        for _ in 0..25 {
            let s = crate::sample::random_structure_on(&mut rng, &lang.valuation_names(), 2, 10, 2);
            let src = ConsequenceSource::Structure(&s);
            let tab = mu_from_logic(&src, &lang).unwrap();
            for m in 0..16u32 {
                let pts = lang.model_set_to_points(m);
                let direct = crate::validity::mu(&s, &pts).unwrap();
                assert_eq!(tab.values[&pts], direct);
            }
        }
    }

    #[test]
    fn sc_holds_iff_mu_subset_on_tables() {
        let lang = Language::new(["p"]).unwrap();
        let u = lang.valuation_names();
        for table in crate::sample::all_tables_all_families(&u) {
            if table.family.len() != 4 {
                continue; // need the full powerset to act as a consequence source
            }
            let rule = check_rule(&ConsequenceSource::Table(&table), &lang, RuleId::Sc)
                .unwrap()
                .holds;
            let prop = check_property(&table, PropertyId::MuSubset).holds;
            assert_eq!(rule, prop, "{table}");
        }
    }

}
