//! Seeded generators and small-set enumeration used by sampled verification
//! modes, the search partitioner and the test suites.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::model::{ArrowSpec, PointCopy, PointSet, Structure, Target};
use crate::table::MuTable;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All subsets of a finite set, in bitmask order over the sorted elements.
pub fn powerset(s: &PointSet) -> Vec<PointSet> {
    let elems: Vec<&String> = s.iter().collect();
    let mut out = Vec::with_capacity(1 << elems.len());
    for mask in 0u32..(1 << elems.len()) {
        out.push(
            elems
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| (*e).clone())
                .collect(),
        );
    }
    out
}

pub fn random_subset(rng: &mut ChaCha8Rng, s: &PointSet) -> PointSet {
    s.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// A random set `m` with `lo ⊆ m ⊆ hi`.
pub fn random_between(rng: &mut ChaCha8Rng, lo: &PointSet, hi: &PointSet) -> PointSet {
    let mut m = lo.clone();
    for e in hi.difference(lo) {
        if rng.gen_bool(0.5) {
            m.insert(e.clone());
        }
    }
    m
}

/// Random structure: up to `max_points` points, 1..=`max_copies` copies per
/// point, up to `max_arrows` arrows of level ≤ `max_level`. Higher arrows
/// target previously created arrows, so targets are acyclic by construction.
pub fn random_structure(
    rng: &mut ChaCha8Rng,
    max_points: usize,
    max_copies: u32,
    max_arrows: usize,
    max_level: u32,
) -> Structure {
    let names = ["a", "b", "c", "d", "e", "f"];
    let n_points = rng.gen_range(1..=max_points.min(names.len()));
    let points: PointSet = names[..n_points].iter().map(|s| s.to_string()).collect();
    random_structure_on(rng, &points, max_copies, max_arrows, max_level)
}

/// Random structure over a fixed point set.
pub fn random_structure_on(
    rng: &mut ChaCha8Rng,
    points: &PointSet,
    max_copies: u32,
    max_arrows: usize,
    max_level: u32,
) -> Structure {
    let mut copies = Vec::new();
    for p in points {
        let k = rng.gen_range(1..=max_copies);
        for i in 0..k {
            copies.push(PointCopy::new(p.clone(), i));
        }
    }
    let n_arrows = rng.gen_range(0..=max_arrows);
    let mut specs: Vec<ArrowSpec> = Vec::new();
    let mut levels: Vec<u32> = Vec::new();
    for i in 0..n_arrows {
        let origin = copies[rng.gen_range(0..copies.len())].clone();
        // bias towards low levels so level-1 arrows dominate
        let want_higher = !specs.is_empty() && rng.gen_bool(0.4);
        let (target, level) = if want_higher {
            let candidates: Vec<usize> = (0..specs.len()).filter(|&j| levels[j] < max_level).collect();
            if candidates.is_empty() {
                let c = copies[rng.gen_range(0..copies.len())].clone();
                (Target::Point(c), 1)
            } else {
                let j = candidates[rng.gen_range(0..candidates.len())];
                (Target::Arrow(specs[j].id.clone()), levels[j] + 1)
            }
        } else {
            let c = copies[rng.gen_range(0..copies.len())].clone();
            (Target::Point(c), 1)
        };
        let id = format!("r{i}");
        specs.push(ArrowSpec::new(&id, &id, 0, origin, target));
        levels.push(level);
    }
    Structure::build(points.iter().cloned(), copies, specs, max_level)
        .expect("generated structure is valid")
}

/// Calls `f` with every index vector `idx` where `idx[i] < lens[i]`.
pub fn odometer(lens: &[usize], mut f: impl FnMut(&[usize])) {
    if lens.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; lens.len()];
    loop {
        f(&idx);
        let mut pos = 0;
        while pos < lens.len() {
            idx[pos] += 1;
            if idx[pos] < lens[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == lens.len() {
            return;
        }
    }
}

/// All `μ`-tables over `𝒴 = 𝒫(U)` satisfying `(μ⊆)`, enumerated
/// deterministically (one independent subset choice per family member).
pub fn all_mu_subset_tables(universe: &PointSet) -> Vec<MuTable> {
    let family = powerset(universe);
    let options: Vec<Vec<PointSet>> = family.iter().map(powerset).collect();
    let mut out = Vec::new();
    odometer(
        &options.iter().map(Vec::len).collect::<Vec<_>>(),
        |idx| {
            let values: BTreeMap<PointSet, PointSet> = family
                .iter()
                .enumerate()
                .map(|(i, x)| (x.clone(), options[i][idx[i]].clone()))
                .collect();
            out.push(MuTable::new(universe.clone(), values, None).unwrap());
        },
    );
    out
}

/// A random table over `𝒴 = 𝒫(U)`; when `mu_subset` is set, values are
/// subsets of their arguments.
pub fn random_table(rng: &mut ChaCha8Rng, universe: &PointSet, mu_subset: bool) -> MuTable {
    let mut values = BTreeMap::new();
    for x in powerset(universe) {
        let pool = if mu_subset { x.clone() } else { universe.clone() };
        let v = random_subset(rng, &pool);
        values.insert(x, v);
    }
    MuTable::new(universe.clone(), values, None).unwrap()
}

/// A random `(η,ρ)` table over `𝒴 = 𝒫(U)` with `ρ ⊆ η` pointwise and
/// `ρ(∅) = η(∅)`.
pub fn random_eta_rho_table(rng: &mut ChaCha8Rng, universe: &PointSet) -> MuTable {
    let mut eta = BTreeMap::new();
    let mut rho = BTreeMap::new();
    for x in powerset(universe) {
        let e = random_subset(rng, universe);
        let r = if x.is_empty() { e.clone() } else { random_subset(rng, &e) };
        eta.insert(x.clone(), e);
        rho.insert(x, r);
    }
    MuTable::new(universe.clone(), rho, Some(eta)).unwrap()
}

/// All `(η,ρ)` pairs with `ρ ⊆ η` over `𝒴 = 𝒫(U)` (and `ρ(∅)=η(∅)`).
pub fn all_eta_rho_tables(universe: &PointSet) -> Vec<MuTable> {
    let family = powerset(universe);
    // options per family member: (eta, rho) with rho ⊆ eta, rho = eta at ∅
    let mut options: Vec<Vec<(PointSet, PointSet)>> = Vec::new();
    for x in &family {
        let mut opts = Vec::new();
        for e in powerset(universe) {
            if x.is_empty() {
                opts.push((e.clone(), e));
            } else {
                for r in powerset(&e) {
                    opts.push((e.clone(), r));
                }
            }
        }
        options.push(opts);
    }
    let mut out = Vec::new();
    odometer(
        &options.iter().map(Vec::len).collect::<Vec<_>>(),
        |idx| {
            let mut eta = BTreeMap::new();
            let mut rho = BTreeMap::new();
            for (i, x) in family.iter().enumerate() {
                let (e, r) = &options[i][idx[i]];
                eta.insert(x.clone(), e.clone());
                rho.insert(x.clone(), r.clone());
            }
            out.push(MuTable::new(universe.clone(), rho, Some(eta)).unwrap());
        },
    );
    out
}

/// All families `𝒴 ⊆ 𝒫(U)` paired with all functions `f: 𝒴 → 𝒫(U)`
/// (unrestricted values). Only sensible for tiny universes.
pub fn all_tables_all_families(universe: &PointSet) -> Vec<MuTable> {
    let subsets = powerset(universe);
    let mut out = Vec::new();
    for fam_mask in 0u32..(1 << subsets.len()) {
        let family: Vec<&PointSet> = subsets
            .iter()
            .enumerate()
            .filter(|(i, _)| fam_mask & (1 << i) != 0)
            .map(|(_, s)| s)
            .collect();
        odometer(&vec![subsets.len(); family.len()], |idx| {
            let values: BTreeMap<PointSet, PointSet> = family
                .iter()
                .zip(idx.iter())
                .map(|(x, &i)| ((*x).clone(), subsets[i].clone()))
                .collect();
            out.push(MuTable::new(universe.clone(), values, None).unwrap());
        });
    }
    out
}

/// Deterministic universe of the first `n` lowercase names.
pub fn universe(n: usize) -> PointSet {
    ["a", "b", "c", "d", "e", "f"][..n]
        .iter()
        .map(|s| s.to_string())
        .collect()
}
