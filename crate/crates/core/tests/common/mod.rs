//! Shared test corpus and brute-force oracles. The oracles work on raw
//! permutations and hash sets, never on the group's multiplication table.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use wordnorm::{ElementSet, FiniteGroup, NormTable, Perm, Rational};

pub fn perm(text: &str, degree: usize) -> Perm {
    Perm::parse_cycles(text, degree).unwrap()
}

pub fn cyclic_gens(n: usize) -> Vec<Perm> {
    vec![Perm::cycle_on_block(n, 0, n).unwrap()]
}

pub fn dihedral_gens(n: usize) -> Vec<Perm> {
    let reflection: Vec<u32> = (0..n).map(|i| ((n - i) % n) as u32).collect();
    vec![Perm::cycle_on_block(n, 0, n).unwrap(), Perm::from_images(reflection).unwrap()]
}

pub fn symmetric_gens(n: usize) -> Vec<Perm> {
    vec![perm("(0 1)", n), Perm::cycle_on_block(n, 0, n).unwrap()]
}

/// Generators of a direct product acting on disjoint blocks.
pub fn product_gens(a: &[Perm], b: &[Perm]) -> Vec<Perm> {
    let da = a[0].degree();
    let db = b[0].degree();
    a.iter()
        .map(|p| p.direct_sum(&Perm::identity(db)))
        .chain(b.iter().map(|q| Perm::identity(da).direct_sum(q)))
        .collect()
}

pub struct Named {
    pub name: String,
    pub group: Arc<FiniteGroup>,
}

fn named(name: impl Into<String>, gens: Vec<Perm>) -> Named {
    Named {
        name: name.into(),
        group: FiniteGroup::enumerate(&gens, 1000).unwrap(),
    }
}

/// Cyclic, dihedral, symmetric and alternating groups and direct products.
/// Everything has order at most 60 except the symmetric group on five points.
pub fn corpus() -> Vec<Named> {
    let mut out = Vec::new();
    for n in 1..=12 {
        out.push(named(format!("C{n}"), cyclic_gens(n)));
    }
    for n in 3..=6 {
        out.push(named(format!("D{n}"), dihedral_gens(n)));
    }
    out.push(named("S3", symmetric_gens(3)));
    out.push(named("S4", symmetric_gens(4)));
    out.push(named("A4", vec![perm("(0 1 2)", 4), perm("(1 2 3)", 4)]));
    out.push(named("A5", vec![perm("(0 1 2)", 5), perm("(0 1 2 3 4)", 5)]));
    out.push(named("S5", symmetric_gens(5)));
    out.push(named("C2xC2", product_gens(&cyclic_gens(2), &cyclic_gens(2))));
    out.push(named("C2xC4", product_gens(&cyclic_gens(2), &cyclic_gens(4))));
    out.push(named("C3xC3", product_gens(&cyclic_gens(3), &cyclic_gens(3))));
    out.push(named("C4xC4", product_gens(&cyclic_gens(4), &cyclic_gens(4))));
    out.push(named("S3xC2", product_gens(&symmetric_gens(3), &cyclic_gens(2))));
    out.push(named("S3xC3", product_gens(&symmetric_gens(3), &cyclic_gens(3))));
    out.push(named("D4xC2", product_gens(&dihedral_gens(4), &cyclic_gens(2))));
    out.push(named("A4xC2", product_gens(&[perm("(0 1 2)", 4), perm("(1 2 3)", 4)], &cyclic_gens(2))));
    out.push(named("S3xS3", product_gens(&symmetric_gens(3), &symmetric_gens(3))));
    out
}

/// The small part of the corpus, for loops that do per-element work.
pub fn small_corpus() -> Vec<Named> {
    corpus().into_iter().filter(|g| g.group.order() <= 36).collect()
}

pub fn mul(a: &Perm, b: &Perm) -> Perm {
    a.then(b)
}

/// All `h⁻¹ s h` for `s` in the set (together with inverses), by direct multiplication.
pub fn conjugacy_closure_oracle(all: &[Perm], set: &[Perm]) -> HashSet<Perm> {
    let mut out = HashSet::new();
    for s in set {
        for t in [s.clone(), s.inverse()] {
            for h in all {
                out.insert(h.inverse().then(&t).then(h));
            }
        }
    }
    out
}

/// Word lengths over `letters` by iterated set products `{1}, L, L², …`;
/// unreached elements are absent.
pub fn iterated_product_oracle(letters: &HashSet<Perm>, degree: usize) -> HashMap<Perm, u64> {
    let mut dist = HashMap::new();
    let mut layer: HashSet<Perm> = HashSet::from([Perm::identity(degree)]);
    let mut k = 0;
    while !layer.is_empty() {
        for p in &layer {
            dist.entry(p.clone()).or_insert(k);
        }
        let next: HashSet<Perm> = layer
            .iter()
            .flat_map(|p| letters.iter().map(move |l| p.then(l)))
            .filter(|p| !dist.contains_key(p))
            .collect();
        layer = next;
        k += 1;
    }
    dist
}

/// `min { ℓ(g n) : n ∈ N }` for every `g`, by direct multiplication.
pub fn coset_minimum_oracle(t: &NormTable<Rational>, normal: &[Perm]) -> HashMap<Perm, Rational> {
    let g = t.group();
    g.elements()
        .iter()
        .map(|x| {
            let m = normal
                .iter()
                .map(|n| *t.value(g.id_of(&x.then(n)).unwrap()))
                .min()
                .unwrap();
            (x.clone(), m)
        })
        .collect()
}

pub fn perms_of(set: &ElementSet) -> Vec<Perm> {
    set.iter().map(|g| set.group().element(g).clone()).collect()
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn ratio(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}
