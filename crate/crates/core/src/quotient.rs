//! Homomorphisms from a free group onto finite permutation groups.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ElementId, ElementSet, FiniteGroup, DEFAULT_ORDER_CAP};
use crate::perm::Perm;
use crate::words::ReducedWord;

/// An assignment of permutations to the free generators.
///
/// Defines `ψ: F → H` onto the image group `H = ⟨images⟩`; the kernel is
/// never materialized.
#[derive(Clone)]
pub struct QuotientSpec {
    rank: usize,
    images: Vec<Perm>,
    group: Arc<FiniteGroup>,
}

impl fmt::Debug for QuotientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuotientSpec")
            .field("rank", &self.rank)
            .field("images", &self.images.iter().map(|p| p.to_string()).collect::<Vec<_>>())
            .field("order", &self.group.order())
            .finish()
    }
}

impl PartialEq for QuotientSpec {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.images == other.images
    }
}

/// Serializable form of a [`QuotientSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientSpecRecord {
    pub rank: usize,
    pub degree: usize,
    pub images: Vec<String>,
}

impl QuotientSpec {
    pub fn new(images: Vec<Perm>) -> Result<Self> {
        Self::with_cap(images, DEFAULT_ORDER_CAP)
    }

    pub fn with_cap(images: Vec<Perm>, cap: usize) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::contract("a quotient spec needs rank >= 1"));
        }
        let group = FiniteGroup::enumerate(&images, cap)?;
        Ok(QuotientSpec {
            rank: images.len(),
            images,
            group,
        })
    }

    /// `ψ(x_i) = ` an `orders[i]`-cycle on its own block of points, so the
    /// image is the direct product of cyclic groups of the given orders.
    pub fn cyclic_product(orders: &[usize]) -> Result<Self> {
        let degree: usize = orders.iter().map(|&n| n.max(1)).sum();
        let mut offset = 0;
        let mut images = Vec::with_capacity(orders.len());
        for &n in orders {
            images.push(Perm::cycle_on_block(degree, offset, n)?);
            offset += n.max(1);
        }
        Self::new(images)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Perm] {
        &self.images
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    /// The image group `H`.
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Evaluates `ψ(w)`.
    pub fn apply_word(&self, w: &ReducedWord) -> Result<ElementId> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: w.rank(),
            });
        }
        let g = &self.group;
        let mut acc = g.identity();
        for &l in w.letters() {
            let k = l.unsigned_abs() as usize - 1;
            acc = if l > 0 { g.mul_gen(acc, k) } else { g.mul_gen_inv(acc, k) };
        }
        Ok(acc)
    }

    /// `ψ(r) = 1` for every word.
    pub fn kills_all(&self, words: &[ReducedWord]) -> Result<bool> {
        for r in words {
            if self.apply_word(r)? != self.group.identity() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `{ψ(w) : w ∈ words}` as an element set of `H`.
    pub fn image_set<'a>(&self, words: impl IntoIterator<Item = &'a ReducedWord>) -> Result<ElementSet> {
        let mut set = ElementSet::empty(&self.group);
        for w in words {
            set.insert(self.apply_word(w)?);
        }
        Ok(set)
    }

    pub fn to_record(&self) -> QuotientSpecRecord {
        QuotientSpecRecord {
            rank: self.rank,
            degree: self.degree(),
            images: self.images.iter().map(|p| p.to_string()).collect(),
        }
    }

    pub fn from_record(record: &QuotientSpecRecord) -> Result<Self> {
        let images = record
            .images
            .iter()
            .map(|s| Perm::parse_cycles(s, record.degree))
            .collect::<Result<Vec<_>>>()?;
        if images.len() != record.rank {
            return Err(Error::RankMismatch {
                left: record.rank,
                right: images.len(),
            });
        }
        Self::new(images)
    }
}

/// Decides `ker(a) ⊆ ker(b)` without leaving finite data.
///
/// The subgroup of `H_a × H_b` generated by the paired generator images is the
/// graph of a map `H_a → H_b` exactly when the kernel containment holds, i.e.
/// when it has no element `(1, h)` with `h ≠ 1`.
pub fn kernel_contained(a: &QuotientSpec, b: &QuotientSpec, cap: usize) -> Result<bool> {
    if a.rank != b.rank {
        return Err(Error::RankMismatch {
            left: a.rank,
            right: b.rank,
        });
    }
    let paired: Vec<Perm> = a
        .images
        .iter()
        .zip(&b.images)
        .map(|(x, y)| x.direct_sum(y))
        .collect();
    let graph = FiniteGroup::enumerate(&paired, cap)?;
    let da = a.degree();
    for p in graph.elements() {
        let imgs = p.images();
        let left_trivial = imgs[..da].iter().enumerate().all(|(i, &im)| i as u32 == im);
        let right_trivial = imgs[da..]
            .iter()
            .enumerate()
            .all(|(i, &im)| (i + da) as u32 == im);
        if left_trivial && !right_trivial {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(cycles: &[&str], degree: usize) -> QuotientSpec {
        QuotientSpec::new(
            cycles
                .iter()
                .map(|c| Perm::parse_cycles(c, degree).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn apply_word_examples() {
        let s = spec(&["(0 1)", "(0 2)"], 3);
        assert_eq!(s.apply_word(&ReducedWord::identity(2)).unwrap(), 0);
        let comm = ReducedWord::parse("1 2 -1 -2", 2).unwrap();
        let image = s.group().element(s.apply_word(&comm).unwrap()).clone();
        // direct composition (0 1)(0 2)(0 1)(0 2), inverses of involutions are themselves
        let a = Perm::parse_cycles("(0 1)", 3).unwrap();
        let b = Perm::parse_cycles("(0 2)", 3).unwrap();
        let direct = a.then(&b).then(&a).then(&b);
        assert_eq!(image, direct);
        assert_eq!(image.cycles().len(), 1);
        assert_eq!(image.cycles()[0].len(), 3);

        let t = spec(&["(0 1)"], 2);
        assert_eq!(t.apply_word(&ReducedWord::parse("1 1", 1).unwrap()).unwrap(), 0);
        assert!(t.apply_word(&comm).is_err());
    }

    #[test]
    fn kernel_containment_examples() {
        let four = spec(&["(0 1 2 3)"], 4);
        let two = spec(&["(0 1)"], 2);
        assert!(kernel_contained(&four, &two, 1000).unwrap());
        assert!(!kernel_contained(&two, &four, 1000).unwrap());
        assert!(kernel_contained(&four, &four, 1000).unwrap());
    }

    #[test]
    fn kernel_containment_matches_divisibility() {
        for m in 1..=12usize {
            for n in 1..=12usize {
                let a = QuotientSpec::cyclic_product(&[m]).unwrap();
                let b = QuotientSpec::cyclic_product(&[n]).unwrap();
                assert_eq!(kernel_contained(&a, &b, 1000).unwrap(), m % n == 0, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn record_round_trip() {
        let s = spec(&["(0 1 2)", "(3 4)"], 5);
        let back = QuotientSpec::from_record(&s.to_record()).unwrap();
        assert_eq!(back, s);
    }
}
