use std::sync::Arc;

use super::{NormTable, ValueDomain};
use crate::error::Result;
use crate::group::{CosetGroup, ElementId, ElementSet, FiniteGroup};
use crate::scalar::NormValue;

/// A norm restricted to a subgroup, with the embedding back into the ambient group.
#[derive(Clone)]
pub struct RestrictedNorm<T> {
    pub table: NormTable<T>,
    pub embedding: Vec<ElementId>,
}

impl<T: NormValue> RestrictedNorm<T> {
    pub fn subgroup(&self) -> &Arc<FiniteGroup> {
        self.table.group()
    }
}

pub fn restrict_norm<T: NormValue>(t: &NormTable<T>, subgroup: &ElementSet) -> Result<RestrictedNorm<T>> {
    let (sub, embedding) = t.group().subgroup_as_group(subgroup)?;
    let values = embedding.iter().map(|&g| t.value(g).clone()).collect();
    let table = NormTable::new(&sub, values, t.domain().clone())?;
    Ok(RestrictedNorm { table, embedding })
}

/// The quotient norm on `G/N`, with the coset group it lives on.
#[derive(Clone)]
pub struct QuotientNorm<T> {
    pub table: NormTable<T>,
    pub cosets: CosetGroup,
}

/// `ℓ(gN) = min{ℓ(gh) : h ∈ N}`; all carriers are finite so the infimum is a minimum.
pub fn quotient_norm<T: NormValue>(t: &NormTable<T>, normal: &ElementSet) -> Result<QuotientNorm<T>> {
    let cosets = t.group().coset_group(normal)?;
    let mut values: Vec<Option<T>> = vec![None; cosets.quotient.order()];
    for (g, &q) in cosets.projection.iter().enumerate() {
        let v = t.value(g);
        match &values[q] {
            Some(cur) if cur <= v => {}
            _ => values[q] = Some(v.clone()),
        }
    }
    let values = values
        .into_iter()
        .map(|v| v.expect("projection is onto"))
        .collect();
    let table = NormTable::new(&cosets.quotient, values, t.domain().clone())?;
    Ok(QuotientNorm { table, cosets })
}

/// Rounds a non-negative norm to an integer-valued one: integral values stay,
/// any value `v` with `n < v < n + 1` becomes `n + 1`.
pub fn round_norm<T: NormValue>(t: &NormTable<T>) -> NormTable<T> {
    NormTable::from_fn(t.group(), ValueDomain::Naturals, |g| {
        let v = t.value(g);
        if v.is_integral() {
            v.clone()
        } else {
            v.floor() + T::one()
        }
    })
}
