use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::sync::Arc;

use super::{NormTable, ValueDomain};
use crate::error::{Error, Result};
use crate::group::{ElementId, ElementSet, FiniteGroup};
use crate::scalar::NormValue;

/// Which letters a word norm may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// All conjugates of the generators and their inverses (bi-invariant norm).
    Conjugacy,
    /// Generators and their inverses only.
    Plain,
}

/// What to do with elements the generators cannot reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    /// Unreachable elements are a contract error.
    Forbid,
    /// Unreachable elements get `(|G| + 1) · max weight`.
    Pad,
}

fn letters(group: &Arc<FiniteGroup>, gens: &ElementSet, closure: Closure) -> Result<ElementSet> {
    group.check_owns(gens)?;
    let mut sym = gens.clone();
    for g in gens.iter() {
        sym.insert(group.inv(g));
    }
    let mut out = match closure {
        Closure::Conjugacy => group.class_closure(&sym)?,
        Closure::Plain => sym,
    };
    // the identity never shortens a product
    out.remove(0);
    Ok(out)
}

/// Word norm: minimal number of letters (from the conjugacy closure of
/// `gens ∪ gens⁻¹`, or from `gens ∪ gens⁻¹` alone) whose product is `g`.
pub fn word_norm<T: NormValue>(
    group: &Arc<FiniteGroup>,
    gens: &ElementSet,
    closure: Closure,
    padding: Padding,
) -> Result<NormTable<T>> {
    let alphabet: Vec<ElementId> = letters(group, gens, closure)?.iter().collect();
    let n = group.order();
    let mut dist = vec![usize::MAX; n];
    dist[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for &s in &alphabet {
            let y = group.mul(x, s);
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let unreached = dist.iter().filter(|&&d| d == usize::MAX).count();
    if unreached > 0 && padding == Padding::Forbid {
        return Err(Error::contract(format!(
            "generators reach only {} of {} elements",
            n - unreached,
            n
        )));
    }
    let pad = n + 1;
    let values = dist
        .into_iter()
        .map(|d| T::from_count(if d == usize::MAX { pad } else { d }))
        .collect();
    NormTable::new(group, values, ValueDomain::Naturals)
}

/// Generators with positive weights, closed under inversion with equal weight.
#[derive(Debug, Clone)]
pub struct WeightedGenSet<T> {
    group: Arc<FiniteGroup>,
    entries: Vec<(ElementId, T)>,
}

impl<T: NormValue> WeightedGenSet<T> {
    /// Validates positivity and inverse-closure.
    pub fn new(group: &Arc<FiniteGroup>, entries: Vec<(ElementId, T)>) -> Result<Self> {
        for (g, w) in &entries {
            if *g >= group.order() {
                return Err(Error::contract(format!("element id {g} out of range")));
            }
            if *w <= T::zero() {
                return Err(Error::contract(format!("weight {w} is not positive")));
            }
            let gi = group.inv(*g);
            if !entries.iter().any(|(h, v)| *h == gi && v == w) {
                return Err(Error::contract(format!(
                    "inverse of {} is missing or weighted differently",
                    group.element(*g)
                )));
            }
        }
        Ok(WeightedGenSet {
            group: Arc::clone(group),
            entries,
        })
    }

    /// Adds each inverse with the weight of its generator.
    pub fn symmetrize(group: &Arc<FiniteGroup>, entries: Vec<(ElementId, T)>) -> Result<Self> {
        let mut all = entries.clone();
        for (g, w) in entries {
            all.push((group.inv(g), w));
        }
        Self::new(group, all)
    }

    pub fn entries(&self) -> &[(ElementId, T)] {
        &self.entries
    }
}

struct Frontier<T> {
    dist: T,
    id: ElementId,
}

impl<T: PartialOrd> PartialEq for Frontier<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: PartialOrd> Eq for Frontier<T> {}

impl<T: PartialOrd> PartialOrd for Frontier<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for Frontier<T> {
    // min-heap on distance, ties by element id
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Minimal total weight over factorizations into (conjugates of) weighted generators.
///
/// Each letter carries the least weight among the generators whose class
/// (or, for [`Closure::Plain`], which) contains it; distances come from a
/// shortest-path search on the resulting weighted Cayley graph.
pub fn weighted_word_norm<T: NormValue>(
    gens: &WeightedGenSet<T>,
    closure: Closure,
    padding: Padding,
) -> Result<NormTable<T>> {
    let group = &gens.group;
    let n = group.order();
    let mut letter_weight: Vec<Option<T>> = vec![None; n];
    for (g, w) in &gens.entries {
        let members: Vec<ElementId> = match closure {
            Closure::Conjugacy => group.conjugacy_class(*g).iter().collect(),
            Closure::Plain => vec![*g],
        };
        for x in members {
            if x == 0 {
                continue;
            }
            match &letter_weight[x] {
                Some(cur) if cur <= w => {}
                _ => letter_weight[x] = Some(w.clone()),
            }
        }
    }
    let alphabet: Vec<(ElementId, T)> = letter_weight
        .into_iter()
        .enumerate()
        .filter_map(|(x, w)| w.map(|w| (x, w)))
        .collect();
    let max_weight = alphabet
        .iter()
        .map(|(_, w)| w.clone())
        .fold(T::one(), |a, b| if b > a { b } else { a });

    let mut dist: Vec<Option<T>> = vec![None; n];
    let mut done = vec![false; n];
    dist[0] = Some(T::zero());
    let mut heap = BinaryHeap::from([Frontier { dist: T::zero(), id: 0 }]);
    while let Some(Frontier { dist: d, id: x }) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for (s, w) in &alphabet {
            let y = group.mul(x, *s);
            let cand = d.clone() + w.clone();
            let better = match &dist[y] {
                None => true,
                Some(cur) => cand < *cur,
            };
            if better && !done[y] {
                dist[y] = Some(cand.clone());
                heap.push(Frontier { dist: cand, id: y });
            }
        }
    }
    if dist.iter().any(Option::is_none) && padding == Padding::Forbid {
        return Err(Error::contract("weighted generators do not generate the group"));
    }
    let pad = T::from_count(n + 1) * max_weight;
    let values = dist.into_iter().map(|d| d.unwrap_or_else(|| pad.clone())).collect();
    NormTable::new(group, values, ValueDomain::NonNegative)
}

/// Recognizes word norms from their balls: an integer-valued norm is the word
/// norm over `B_1(1) \ {1}` iff that set generates and every `B_n(1)` lies in
/// `B_1(1)^n`.
pub fn is_word_norm<T: NormValue>(t: &NormTable<T>) -> Result<bool> {
    if !t.is_integral() {
        return Err(Error::contract("word norm recognition needs an integer-valued table"));
    }
    let group = t.group();
    let mut unit = ElementSet::empty(group);
    for g in 1..group.order() {
        if *t.value(g) <= T::one() {
            unit.insert(g);
        }
    }
    let candidate: NormTable<T> = match word_norm(group, &unit, Closure::Plain, Padding::Forbid) {
        Ok(c) => c,
        Err(Error::Contract(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    Ok(candidate.values() == t.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;
    use crate::scalar::Rational;

    fn cyclic(n: usize) -> Arc<FiniteGroup> {
        FiniteGroup::enumerate(&[Perm::cycle_on_block(n, 0, n).unwrap()], 1000).unwrap()
    }

    fn s3() -> Arc<FiniteGroup> {
        FiniteGroup::enumerate(
            &[Perm::parse_cycles("(0 1)", 3).unwrap(), Perm::parse_cycles("(1 2)", 3).unwrap()],
            100,
        )
        .unwrap()
    }

    #[test]
    fn transpositions_in_s3() {
        let g = s3();
        let t = ElementSet::singleton(&g, g.id_of(&Perm::parse_cycles("(0 1)", 3).unwrap()).unwrap());
        let table: NormTable<i64> = word_norm(&g, &t, Closure::Conjugacy, Padding::Forbid).unwrap();
        for x in 0..g.order() {
            let p = g.element(x);
            let expected = match p.cycles().iter().map(Vec::len).max().unwrap_or(1) {
                1 => 0,
                2 => 1,
                _ => 2,
            };
            assert_eq!(*table.value(x), expected, "{p}");
        }
    }

    #[test]
    fn cyclic_six() {
        let g = cyclic(6);
        let x = g.generator_ids()[0];
        let table: NormTable<i64> =
            word_norm(&g, &ElementSet::singleton(&g, x), Closure::Conjugacy, Padding::Forbid).unwrap();
        let by_power: Vec<i64> = (0..6).map(|k| *table.value(g.pow(x, k))).collect();
        assert_eq!(by_power, vec![0, 1, 2, 3, 2, 1]);
    }

    #[test]
    fn padding_and_forbid() {
        let g = cyclic(6);
        let x2 = g.pow(g.generator_ids()[0], 2);
        let gens = ElementSet::singleton(&g, x2);
        assert!(word_norm::<i64>(&g, &gens, Closure::Conjugacy, Padding::Forbid).is_err());
        let table: NormTable<i64> = word_norm(&g, &gens, Closure::Conjugacy, Padding::Pad).unwrap();
        assert_eq!(*table.value(g.generator_ids()[0]), 7);
        assert_eq!(*table.value(x2), 1);
    }

    #[test]
    fn weighted_cyclic_four() {
        let g = cyclic(4);
        let x = g.generator_ids()[0];
        let x2 = g.pow(x, 2);
        let gens = WeightedGenSet::symmetrize(
            &g,
            vec![(x, Rational::new(1, 1)), (x2, Rational::new(1, 4))],
        )
        .unwrap();
        let table = weighted_word_norm(&gens, Closure::Conjugacy, Padding::Forbid).unwrap();
        let by_power: Vec<Rational> = (0..4).map(|k| *table.value(g.pow(x, k))).collect();
        assert_eq!(
            by_power,
            vec![Rational::new(0, 1), Rational::new(1, 1), Rational::new(1, 4), Rational::new(1, 1)]
        );
    }

    #[test]
    fn weighted_rejects_bad_weights() {
        let g = cyclic(4);
        let x = g.generator_ids()[0];
        assert!(WeightedGenSet::new(&g, vec![(x, Rational::new(1, 1))]).is_err());
        assert!(WeightedGenSet::symmetrize(&g, vec![(x, Rational::new(0, 1))]).is_err());
    }

    #[test]
    fn recognizes_word_norms() {
        let g = cyclic(3);
        let yes = NormTable::new(&g, vec![0i64, 1, 1], ValueDomain::Naturals).unwrap();
        let no = NormTable::new(&g, vec![0i64, 2, 2], ValueDomain::Naturals).unwrap();
        assert!(is_word_norm(&yes).unwrap());
        assert!(!is_word_norm(&no).unwrap());
        let frac = NormTable::new(&g, vec![Rational::new(0, 1), Rational::new(1, 2), Rational::new(1, 2)], ValueDomain::NonNegative)
            .unwrap();
        assert!(is_word_norm(&frac).is_err());
    }
}
