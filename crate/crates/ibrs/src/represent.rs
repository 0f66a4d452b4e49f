//! The representation constructions: a level-2 attacking structure for an
//! arbitrary `(η,ρ)` pair, the classical level-1 stage, and the level-3
//! modification that makes the result essentially smooth.
//!
//! Free choices in the constructions (which copy index an attack lands on,
//! arbitrary picks from nonempty μ-sets) are resolved to the canonically
//! least option so results serialize reproducibly.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{ArrowSpec, ModelError, PointCopy, PointSet, Structure, Target};
use crate::properties::{check_property, PropertyId};
use crate::table::MuTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReprError {
    #[error("choice product has an empty factor")]
    EmptyFactor,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("operation requires a level-1 arrow")]
    NotLevelOne,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One element of a cartesian product: the pick for each factor, by
/// position.
pub type ChoiceFunction = Vec<String>;

/// Deterministic lexicographic enumeration of `Π factors`; rejects empty
/// factors. The empty factor list yields exactly the empty function.
pub fn enumerate_choice_functions(factors: &[PointSet]) -> Result<Vec<ChoiceFunction>, ReprError> {
    if factors.iter().any(|f| f.is_empty()) {
        return Err(ReprError::EmptyFactor);
    }
    Ok(product_allow_empty(factors))
}

/// As above, but an empty factor collapses the product to no functions.
fn product_allow_empty(factors: &[PointSet]) -> Vec<ChoiceFunction> {
    if factors.iter().any(|f| f.is_empty()) {
        return Vec::new();
    }
    let pools: Vec<Vec<&String>> = factors.iter().map(|f| f.iter().collect()).collect();
    let mut out = vec![];
    let mut idx = vec![0usize; pools.len()];
    loop {
        out.push(idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect());
        // rightmost factor varies fastest: lexicographic order
        let mut pos = pools.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < pools[pos].len() {
                break;
            }
            idx[pos] = 0;
            if pos == 0 {
                return out;
            }
        }
    }
}

fn ran(f: &ChoiceFunction) -> PointSet {
    f.iter().cloned().collect()
}

/// Stage-1 product domain for `x`: the family members where `x` survives
/// `η` but not `ρ`.
fn stage1_domain(table: &MuTable, eta: &BTreeMap<PointSet, PointSet>, x: &str) -> Vec<PointSet> {
    table
        .family
        .iter()
        .filter(|set| eta[*set].contains(x) && !table.values[*set].contains(x))
        .cloned()
        .collect()
}

/// Stage-2 side conditions (b)(2)+(b)(3) for the pair `(x, X)`.
fn stage2_needs_record(
    table: &MuTable,
    eta: &BTreeMap<PointSet, PointSet>,
    x: &str,
    xset: &PointSet,
) -> bool {
    table.values[xset].contains(x)
        && table
            .family
            .iter()
            .any(|xp| xp.is_subset(xset) && eta[xp].contains(x) && !table.values[xp].contains(x))
}

/// Stage-2 side condition (b)(4): `f` also chooses outside `X` for every
/// larger set where `x` is minimized.
fn stage2_c4(
    table: &MuTable,
    eta: &BTreeMap<PointSet, PointSet>,
    x: &str,
    ran_f: &PointSet,
    xset: &PointSet,
) -> bool {
    table.family.iter().all(|xpp| {
        !(xset.is_subset(xpp) && eta[xpp].contains(x) && !table.values[xpp].contains(x))
            || ran_f.intersection(xpp).any(|e| !xset.contains(e))
    })
}

/// Builds the level-≤2 attacking structure relative to `η` representing
/// `ρ`; returns it together with the `η` column to evaluate against.
///
/// Stage 1 makes copies `⟨x,f⟩` for `f ∈ Π{X ∈ 𝒴 : x ∈ η(X)−ρ(X)}` with
/// attacks from every `x' ∈ ran(f)` (from `X`, not from `ρ(X)`). Stage 2
/// extends the copies with a third component `*` or a set `X` meeting the
/// side conditions; stage 3 turns attacks from inside `X` into `X`-indexed
/// arrow copies, each attacked in turn from its index point.
pub fn build_level2_attacking(
    table: &MuTable,
) -> Result<(Structure, BTreeMap<PointSet, PointSet>), ReprError> {
    if !table.eta_rho_preconditions() {
        return Err(ReprError::PreconditionViolated(
            "need ρ(X) ⊆ η(X) for all X, and ρ(∅) = η(∅) when ∅ is in the family".into(),
        ));
    }
    let eta = table.eta_map();
    let universe = &table.universe;

    // stage 1 products
    struct CopyRec {
        point: String,
        f_domain: Vec<PointSet>,
        f: ChoiceFunction,
        tag: Option<PointSet>, // None is the dummy *
    }

    let mut records: Vec<CopyRec> = Vec::new();
    for x in universe {
        let domain = stage1_domain(table, &eta, x);
        let fs = product_allow_empty(&domain);
        for f in fs {
            // stage 2: the * copy plus every admissible ⟨x,f,X⟩
            let mut tags: Vec<Option<PointSet>> = vec![None];
            for xset in &table.family {
                if stage2_needs_record(table, &eta, x, xset)
                    && stage2_c4(table, &eta, x, &ran(&f), xset)
                {
                    tags.push(Some(xset.clone()));
                }
            }
            for tag in tags {
                records.push(CopyRec {
                    point: x.clone(),
                    f_domain: domain.clone(),
                    f: f.clone(),
                    tag,
                });
            }
        }
    }

    // canonical copy indices per point
    records.sort_by(|a, b| {
        (&a.point, &a.f, &a.tag).cmp(&(&b.point, &b.f, &b.tag))
    });
    let mut copies = Vec::new();
    let mut index_of_point: BTreeMap<&str, u32> = BTreeMap::new();
    let mut copy_ids: Vec<PointCopy> = Vec::new();
    for rec in &records {
        let idx = index_of_point.entry(rec.point.as_str()).or_insert(0);
        let c = PointCopy::new(rec.point.clone(), *idx);
        *idx += 1;
        copies.push(c.clone());
        copy_ids.push(c);
    }
    let least_copy: BTreeMap<&str, PointCopy> = universe
        .iter()
        .map(|x| (x.as_str(), PointCopy::new(x.clone(), 0)))
        .collect();

    // points never appearing as a copy still need one carrier copy: cannot
    // happen here, every x owns at least ⟨x,∅,*⟩
    debug_assert!(universe.iter().all(|x| index_of_point.contains_key(x.as_str())));

    let mut specs: Vec<ArrowSpec> = Vec::new();
    for (rec, target) in records.iter().zip(&copy_ids) {
        let _ = &rec.f_domain;
        for xp in ran(&rec.f) {
            let plain = match &rec.tag {
                None => true,
                Some(xset) => !xset.contains(&xp),
            };
            let stem = format!("a|{}>{}.{}", xp, target.point(), target.copy());
            if plain {
                specs.push(ArrowSpec::new(
                    stem.clone(),
                    stem,
                    0,
                    least_copy[xp.as_str()].clone(),
                    Target::Point(target.clone()),
                ));
            } else {
                let xset = rec.tag.as_ref().unwrap();
                for (k, xpp) in xset.iter().enumerate() {
                    let alpha_id = format!("{stem}#{k}");
                    specs.push(ArrowSpec::new(
                        alpha_id.clone(),
                        stem.clone(),
                        k as u32,
                        least_copy[xp.as_str()].clone(),
                        Target::Point(target.clone()),
                    ));
                    let beta_id = format!("b|{stem}#{k}");
                    specs.push(ArrowSpec::new(
                        beta_id.clone(),
                        beta_id.clone(),
                        k as u32,
                        least_copy[xpp.as_str()].clone(),
                        Target::Arrow(alpha_id),
                    ));
                }
            }
        }
    }

    let s = Structure::build(universe.iter().cloned(), copies, specs, 2)?;
    Ok((s, eta))
}

/// Stage one of the smooth-representation construction: copies `⟨x,f⟩`,
/// `f ∈ Π{μ(X) : X ∈ 𝒴, x ∈ X−μ(X)}`, and attacks from every copy of every
/// `x' ∈ ran(f)`. Level 1.
pub fn build_level1_stage(table: &MuTable) -> Result<Structure, ReprError> {
    build_level1_stage_with_bound(table, 1)
}

fn build_level1_stage_with_bound(table: &MuTable, bound: u32) -> Result<Structure, ReprError> {
    if !table.satisfies_mu_subset() {
        return Err(ReprError::PreconditionViolated("(μ⊆) must hold".into()));
    }
    let universe = &table.universe;
    let mut copies: Vec<PointCopy> = Vec::new();
    let mut rans: BTreeMap<PointCopy, PointSet> = BTreeMap::new();
    for x in universe {
        let domain: Vec<PointSet> = table
            .family
            .iter()
            .filter(|set| set.contains(x) && !table.values[*set].contains(x))
            .map(|set| table.values[set].clone())
            .collect();
        // an empty μ-factor leaves x without copies
        for (i, f) in product_allow_empty(&domain).into_iter().enumerate() {
            let c = PointCopy::new(x.clone(), i as u32);
            rans.insert(c.clone(), ran(&f));
            copies.push(c);
        }
    }
    let mut specs = Vec::new();
    for (target, r) in &rans {
        for xp in r {
            for origin in copies.iter().filter(|c| c.point() == xp) {
                let id = format!("s|{}.{}>{}.{}", origin.point(), origin.copy(), target.point(), target.copy());
                specs.push(ArrowSpec::new(
                    id.clone(),
                    id,
                    0,
                    origin.clone(),
                    Target::Point(target.clone()),
                ));
            }
        }
    }
    Ok(Structure::build(universe.iter().cloned(), copies, specs, bound)?)
}

/// The `𝐎`/`𝐃` families of a level-1 arrow `α: ⟨y,j⟩ → ⟨x,i⟩`:
/// `𝐎(α) = {Y : x ∈ Y−μ(Y), y ∈ μ(Y)}`, `𝐃(α) = {X : x ∈ μ(X), y ∈ X}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaContext {
    pub arrow: String,
    pub o_sets: Vec<PointSet>,
    pub d_sets: Vec<PointSet>,
}

pub fn alpha_context(s: &Structure, table: &MuTable, arrow_id: &str) -> Result<AlphaContext, ReprError> {
    let a = s.arrow(arrow_id)?;
    let target = match &a.target {
        Target::Point(c) => c,
        Target::Arrow(_) => return Err(ReprError::NotLevelOne),
    };
    let x = target.point();
    let y = a.origin.point();
    let o_sets = table
        .family
        .iter()
        .filter(|set| set.contains(x) && !table.values[*set].contains(x) && table.values[*set].contains(y))
        .cloned()
        .collect();
    let d_sets = table
        .family
        .iter()
        .filter(|set| table.values[*set].contains(x) && set.contains(y))
        .cloned()
        .collect();
    Ok(AlphaContext {
        arrow: arrow_id.to_string(),
        o_sets,
        d_sets,
    })
}

fn require_mu_subset_supset(table: &MuTable) -> Result<(), ReprError> {
    for p in [PropertyId::MuSubset, PropertyId::MuSubsetSupset] {
        if !check_property(table, p).holds {
            return Err(ReprError::PreconditionViolated(format!("{p} must hold")));
        }
    }
    Ok(())
}

/// The level-3 modification for one arrow: replaces `α` by copies `⟨α,f⟩`
/// over `Π(𝐃,α)`, attacks each from `⟨f(X_r), i_r⟩` through
/// `⟨β,f,X_r,g⟩` for `g ∈ Π(𝐎,α)`, and attacks those from `⟨g(Y_s), j_s⟩`
/// exactly when `μ(Y_s) ⊄ X_r` and `f(X_r) ∈ Y_s`. Afterwards no copy of
/// `α` is valid in any `X ∈ 𝐃(α)` while at least one is valid in every
/// `Y ∈ 𝐎(α)`.
pub fn lemma_level3_modify(
    s: &Structure,
    table: &MuTable,
    arrow_id: &str,
) -> Result<Structure, ReprError> {
    require_mu_subset_supset(table)?;
    let ctx = alpha_context(s, table, arrow_id)?;
    if ctx.o_sets.is_empty() || ctx.d_sets.is_empty() {
        return Err(ReprError::PreconditionViolated(
            "the modification needs nonempty O(α) and D(α)".into(),
        ));
    }
    let mut specs: Vec<ArrowSpec> = s
        .arrows()
        .filter(|a| a.id != arrow_id)
        .map(|a| ArrowSpec {
            id: a.id.clone(),
            base: a.base.clone(),
            copy: a.copy,
            origin: crate::model::ObjectRef::Copy(a.origin.clone()),
            target: a.target.clone(),
        })
        .collect();
    specs.extend(modification_specs(s, table, &ctx)?);
    let copies: Vec<PointCopy> = s.copies().cloned().collect();
    Ok(Structure::build(
        s.carrier().iter().cloned(),
        copies,
        specs,
        3,
    )?)
}

/// The replacement arrows for one α, shared by [`lemma_level3_modify`] and
/// [`build_level3_essentially_smooth`].
fn modification_specs(
    s: &Structure,
    table: &MuTable,
    ctx: &AlphaContext,
) -> Result<Vec<ArrowSpec>, ReprError> {
    let a = s.arrow(&ctx.arrow)?;
    let target = match &a.target {
        Target::Point(c) => c.clone(),
        Target::Arrow(_) => return Err(ReprError::NotLevelOne),
    };
    let least_copy = |p: &str| s.copies_of(p).next().cloned();

    let d_factors: Vec<PointSet> = ctx.d_sets.iter().map(|x| table.values[x].clone()).collect();
    let o_factors: Vec<PointSet> = ctx.o_sets.iter().map(|y| table.values[y].clone()).collect();
    let fs = product_allow_empty(&d_factors);
    let gs = product_allow_empty(&o_factors);

    let mut specs = Vec::new();
    for (fi, f) in fs.iter().enumerate() {
        let alpha_id = format!("{}~{}", ctx.arrow, fi);
        specs.push(ArrowSpec::new(
            alpha_id.clone(),
            ctx.arrow.clone(),
            fi as u32,
            a.origin.clone(),
            Target::Point(target.clone()),
        ));
        for (r, xr) in ctx.d_sets.iter().enumerate() {
            let Some(beta_origin) = least_copy(&f[r]) else {
                // a point minimized to an empty μ-set somewhere has no
                // copies; the β attack cannot be placed
                continue;
            };
            for (gi, g) in gs.iter().enumerate() {
                let beta_id = format!("{alpha_id}~b{r}.{gi}");
                specs.push(ArrowSpec::new(
                    beta_id.clone(),
                    beta_id.clone(),
                    0,
                    beta_origin.clone(),
                    Target::Arrow(alpha_id.clone()),
                ));
                for (si, ys) in ctx.o_sets.iter().enumerate() {
                    let mu_ys = &table.values[ys];
                    if mu_ys.is_subset(xr) || !ys.contains(&f[r]) {
                        continue;
                    }
                    let Some(gamma_origin) = least_copy(&g[si]) else {
                        continue;
                    };
                    let gamma_id = format!("{beta_id}~g{si}");
                    specs.push(ArrowSpec::new(
                        gamma_id.clone(),
                        gamma_id,
                        0,
                        gamma_origin,
                        Target::Arrow(beta_id.clone()),
                    ));
                }
            }
        }
    }
    Ok(specs)
}

/// Builds the level-3 essentially smooth structure for a table satisfying
/// `(μ⊆)` and `(μ⊆⊇)`: the level-1 stage with the modification applied to
/// every arrow whose `𝐃`-family is nonempty, independently.
pub fn build_level3_essentially_smooth(table: &MuTable) -> Result<Structure, ReprError> {
    require_mu_subset_supset(table)?;
    let stage1 = build_level1_stage_with_bound(table, 3)?;
    let mut specs: Vec<ArrowSpec> = Vec::new();
    for a in stage1.arrows() {
        let ctx = alpha_context(&stage1, table, &a.id)?;
        debug_assert!(!ctx.o_sets.is_empty(), "stage-1 arrows always carry an O-witness");
        if ctx.d_sets.is_empty() || ctx.o_sets.is_empty() {
            specs.push(ArrowSpec {
                id: a.id.clone(),
                base: a.base.clone(),
                copy: a.copy,
                origin: crate::model::ObjectRef::Copy(a.origin.clone()),
                target: a.target.clone(),
            });
        } else {
            specs.extend(modification_specs(&stage1, table, &ctx)?);
        }
    }
    let copies: Vec<PointCopy> = stage1.copies().cloned().collect();
    Ok(Structure::build(
        stage1.carrier().iter().cloned(),
        copies,
        specs,
        3,
    )?)
}

/// Tables on which the level-3 construction is provably complete: no point
/// sits in a set with empty μ-value while staying μ-selected elsewhere.
/// On the remaining ("dead-point") tables no structure at all can combine
/// exact representation with essential smoothness, since a valid `∅ ⇒ X`
/// arrow would need an origin inside the empty set.
pub fn has_dead_point(table: &MuTable) -> bool {
    table.universe.iter().any(|x| {
        let selected = table.values.values().any(|v| v.contains(x));
        let dead = table
            .family
            .iter()
            .any(|set| set.contains(x) && table.values[set].is_empty());
        selected && dead
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::set_key;
    use crate::fixtures::{level_bigger_2_table, need_pr_table};
    use crate::model::point_set;
    use crate::sample;
    use crate::smoothness::is_essentially_smooth;
    use crate::validity::{mu, mu_attacking};

    fn identity_table(universe: &PointSet) -> MuTable {
        let values: BTreeMap<PointSet, PointSet> = sample::powerset(universe)
            .into_iter()
            .map(|x| (x.clone(), x))
            .collect();
        MuTable::new(universe.clone(), values, None).unwrap()
    }

    #[test]
    fn choice_function_enumeration() {
        let one = enumerate_choice_functions(&[point_set("a"), point_set("b")]).unwrap();
        assert_eq!(one, vec![vec!["a".to_string(), "b".to_string()]]);

        let two = enumerate_choice_functions(&[point_set("a,b")]).unwrap();
        assert_eq!(two, vec![vec!["a".to_string()], vec!["b".to_string()]]);

        let six = enumerate_choice_functions(&[point_set("a,b"), point_set("c,d,e")]).unwrap();
        assert_eq!(six.len(), 6);

        assert_eq!(enumerate_choice_functions(&[]).unwrap(), vec![Vec::<String>::new()]);
        assert_eq!(
            enumerate_choice_functions(&[point_set("a"), PointSet::new()]).unwrap_err(),
            ReprError::EmptyFactor
        );
    }

    #[test]
    fn level2_reproduces_need_pr() {
        let table = need_pr_table();
        let (s, eta) = build_level2_attacking(&table).unwrap();
        assert!(s.max_level() <= 2);
        for x in &table.family {
            assert_eq!(
                mu_attacking(&s, &eta, x).unwrap(),
                table.values[x],
                "at {{{}}}",
                set_key(x)
            );
        }
    }

    #[test]
    fn level2_identity_has_nothing_to_minimize() {
        let table = identity_table(&sample::universe(2));
        let (s, eta) = build_level2_attacking(&table).unwrap();
        for x in &table.family {
            assert_eq!(mu_attacking(&s, &eta, x).unwrap(), *x);
        }
    }

    #[test]
    fn level2_rejects_bad_pairs() {
        let u = sample::universe(2);
        let mut eta = BTreeMap::new();
        let mut rho = BTreeMap::new();
        for x in sample::powerset(&u) {
            eta.insert(x.clone(), PointSet::new());
            rho.insert(x.clone(), u.clone()); // ρ ⊄ η
        }
        let t = MuTable::new(u, rho, Some(eta)).unwrap();
        assert!(matches!(
            build_level2_attacking(&t),
            Err(ReprError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn level2_round_trip_exhaustive_u2() {
        for table in sample::all_eta_rho_tables(&sample::universe(2)) {
            let (s, eta) = build_level2_attacking(&table).unwrap();
            for x in &table.family {
                assert_eq!(
                    mu_attacking(&s, &eta, x).unwrap(),
                    table.values[x],
                    "table {table} at {{{}}}",
                    set_key(x)
                );
            }
        }
    }

    #[test]
    fn stage2_condition_b4_always_has_a_witness() {
        // whenever (b)(2)+(b)(3) hold for (x, X), some f also meets (b)(4)
        let mut rng = sample::rng(5);
        for _ in 0..120 {
            let table = sample::random_eta_rho_table(&mut rng, &sample::universe(3));
            let eta = table.eta_map();
            for x in &table.universe {
                let domain = stage1_domain(&table, &eta, x);
                for xset in &table.family {
                    if !stage2_needs_record(&table, &eta, x, xset) {
                        continue;
                    }
                    let witness = product_allow_empty(&domain)
                        .iter()
                        .any(|f| stage2_c4(&table, &eta, x, &ran(f), xset));
                    assert!(
                        witness,
                        "no f meets (b)(4) for {x} at {{{}}} in {table}",
                        set_key(xset)
                    );
                }
            }
        }
    }

    #[test]
    fn stage1_mu_cum_cd_products() {
        let t = crate::fixtures::mu_cum_cd_table();
        let s = build_level1_stage(&t).unwrap();
        // b and c get one copy each (f over {μ(X)}={a}), d two (f over {a,b})
        assert_eq!(s.copies_of("a").count(), 1);
        assert_eq!(s.copies_of("b").count(), 1);
        assert_eq!(s.copies_of("c").count(), 1);
        assert_eq!(s.copies_of("d").count(), 2);
        assert_eq!(s.max_level(), 1);
    }

    #[test]
    fn stage1_identity_table_is_arrowless() {
        let t = identity_table(&sample::universe(3));
        let s = build_level1_stage(&t).unwrap();
        assert_eq!(s.arrow_count(), 0);
        for x in &t.universe {
            assert_eq!(s.copies_of(x).count(), 1);
        }
    }

    #[test]
    fn stage1_alone_represents_classical_smooth_tables() {
        // (μ⊆)+(μPR)+(μCUM) over 𝒫({a,b}): stage one already represents μ
        for table in sample::all_mu_subset_tables(&sample::universe(2)) {
            let ok = [PropertyId::MuPr, PropertyId::MuCum]
                .iter()
                .all(|&p| check_property(&table, p).holds);
            if !ok {
                continue;
            }
            let s = build_level1_stage(&table).unwrap();
            for x in &table.family {
                assert_eq!(mu(&s, x).unwrap(), table.values[x], "table {table}");
            }
        }
    }

    #[test]
    fn alpha_context_families() {
        let t = need_pr_table();
        let s = build_level1_stage(&t).unwrap();
        // the arrow b → a witnessing b minimizing a inside {a,b}
        let arrow = s
            .arrows()
            .find(|a| a.origin.point() == "b")
            .expect("stage 1 attacks a from b");
        let ctx = alpha_context(&s, &t, &arrow.id).unwrap();
        assert_eq!(ctx.o_sets, vec![point_set("a,b")]);
        assert!(ctx.d_sets.contains(&point_set("a,b,c")));

        // identity table: both families empty for any arrow means there is
        // simply no arrow at all
        let ident = identity_table(&sample::universe(2));
        assert_eq!(build_level1_stage(&ident).unwrap().arrow_count(), 0);
    }

    #[test]
    fn lemma_postconditions_on_need_pr() {
        let t = need_pr_table();
        let s = build_level1_stage(&t).unwrap();
        let arrow = s.arrows().find(|a| a.origin.point() == "b").unwrap().id.clone();
        let ctx = alpha_context(&s, &t, &arrow).unwrap();
        let modified = lemma_level3_modify(&s, &t, &arrow).unwrap();
        let copies_of_alpha: Vec<String> = modified
            .arrows()
            .filter(|a| a.base == arrow)
            .map(|a| a.id.clone())
            .collect();
        assert!(!copies_of_alpha.is_empty());
        for xr in &ctx.d_sets {
            let valid = crate::validity::valid_x_to_y(
                &modified.restrict(xr).unwrap(),
                xr,
                xr,
            )
            .unwrap()
            .valid;
            for id in &copies_of_alpha {
                assert!(!valid.contains(id), "copy {id} valid in D-set {{{}}}", set_key(xr));
            }
        }
        for ys in &ctx.o_sets {
            let valid = crate::validity::valid_x_to_y(
                &modified.restrict(ys).unwrap(),
                ys,
                ys,
            )
            .unwrap()
            .valid;
            assert!(
                copies_of_alpha.iter().any(|id| valid.contains(id)),
                "no copy valid in O-set {{{}}}",
                set_key(ys)
            );
        }
    }

    #[test]
    fn lemma_case1_creates_no_gamma_arrows() {
        // 𝐎(α)={Y}, 𝐃(α)={X} with μ(Y) ⊆ X: no γ is added
        let u = point_set("a,b,c");
        let mut values = BTreeMap::new();
        values.insert(point_set("a,b"), point_set("b"));
        values.insert(point_set("a,b,c"), point_set("a,c"));
        let t = MuTable::new(u, values, None).unwrap();
        assert!(check_property(&t, PropertyId::MuSubsetSupset).holds);
        let s = build_level1_stage(&t).unwrap();
        let arrow = s
            .arrows()
            .find(|a| a.origin.point() == "b")
            .unwrap()
            .id
            .clone();
        let ctx = alpha_context(&s, &t, &arrow).unwrap();
        assert_eq!(ctx.o_sets, vec![point_set("a,b")]);
        assert_eq!(ctx.d_sets, vec![point_set("a,b,c")]);
        // μ(Y) = {b} ⊆ X = {a,b,c}: the γ guard never fires
        let modified = lemma_level3_modify(&s, &t, &arrow).unwrap();
        let gammas = modified
            .arrows()
            .filter(|a| a.id.starts_with(&arrow) && a.id.contains("~g"))
            .count();
        assert_eq!(gammas, 0);
        // the β attacks still exist
        assert!(modified.arrows().any(|a| a.id.starts_with(&arrow) && a.id.contains("~b")));
    }

    #[test]
    fn lemma_applications_commute() {
        let t = level_bigger_2_table();
        let s = crate::represent::build_level1_stage_with_bound(&t, 3).unwrap();
        let eligible: Vec<String> = s
            .arrows()
            .filter(|a| {
                let ctx = alpha_context(&s, &t, &a.id).unwrap();
                !ctx.o_sets.is_empty() && !ctx.d_sets.is_empty()
            })
            .map(|a| a.id.clone())
            .take(2)
            .collect();
        assert!(eligible.len() == 2, "need two modifiable arrows");
        let ab = lemma_level3_modify(&lemma_level3_modify(&s, &t, &eligible[0]).unwrap(), &t, &eligible[1]).unwrap();
        let ba = lemma_level3_modify(&lemma_level3_modify(&s, &t, &eligible[1]).unwrap(), &t, &eligible[0]).unwrap();
        assert_eq!(ab.to_json(), ba.to_json());
    }

    #[test]
    fn level3_represents_level_bigger_2_table() {
        let t = level_bigger_2_table();
        let s = build_level3_essentially_smooth(&t).unwrap();
        assert!(s.max_level() <= 3);
        for x in &t.family {
            assert_eq!(mu(&s, x).unwrap(), t.values[x], "at {{{}}}", set_key(x));
            assert!(
                is_essentially_smooth(&s, x).unwrap().holds,
                "essential smoothness at {{{}}}",
                set_key(x)
            );
        }
    }

    #[test]
    fn level3_identity_is_stage1() {
        let t = identity_table(&sample::universe(3));
        let s = build_level3_essentially_smooth(&t).unwrap();
        assert_eq!(s.arrow_count(), 0);
    }

    #[test]
    fn level3_requires_preconditions() {
        let t = crate::fixtures::mu_cum_cd_table();
        assert!(matches!(
            build_level3_essentially_smooth(&t),
            Err(ReprError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn dead_point_detection() {
        let u = sample::universe(2);
        let mut values = BTreeMap::new();
        for x in sample::powerset(&u) {
            values.insert(x.clone(), if x.len() == 1 { PointSet::new() } else { x });
        }
        let t = MuTable::new(u, values, None).unwrap();
        assert!(check_property(&t, PropertyId::MuSubsetSupset).holds);
        assert!(has_dead_point(&t));
        assert!(!has_dead_point(&need_pr_table()));
    }
}
