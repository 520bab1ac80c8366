use super::{NormTable, ValueDomain};
use crate::error::{Error, Result};
use crate::group::ElementId;
use crate::quotient::{kernel_contained, QuotientSpec};
use crate::scalar::NormValue;
use crate::words::ReducedWord;

/// A descending chain of finite-index normal subgroups `N_1 ⊇ N_2 ⊇ …`,
/// each given as the kernel of a quotient spec.
#[derive(Debug, Clone)]
pub struct QuotientChain {
    levels: Vec<QuotientSpec>,
}

/// Value of the chain norm at a word.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainValue<T> {
    pub value: T,
    /// First level (1-based) whose kernel misses the word.
    pub level: Option<usize>,
    /// The word lies in every listed kernel, so the value is 0 only because
    /// the chain is finite: the result is a pseudo-norm at this depth.
    pub finite_depth_zero: bool,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl QuotientChain {
    pub fn new(levels: Vec<QuotientSpec>, cap: usize) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::contract("a chain needs at least one level"));
        }
        for (s, pair) in levels.windows(2).enumerate() {
            if !kernel_contained(&pair[1], &pair[0], cap)? {
                return Err(Error::contract(format!(
                    "chain is not descending: kernel of level {} is not inside kernel of level {}",
                    s + 2,
                    s + 1
                )));
            }
        }
        Ok(QuotientChain { levels })
    }

    pub fn levels(&self) -> &[QuotientSpec] {
        &self.levels
    }

    pub fn rank(&self) -> usize {
        self.levels[0].rank()
    }

    fn value_from_level<T: NormValue>(p: u64, level: Option<usize>) -> Result<T> {
        match level {
            None => Ok(T::zero()),
            Some(s) => {
                let denom = u32::try_from(s)
                    .ok()
                    .and_then(|e| p.checked_pow(e))
                    .and_then(|d| usize::try_from(d).ok())
                    .ok_or(Error::ResourceCap {
                        what: "chain norm denominator",
                        cap: usize::MAX,
                    })?;
                Ok(T::one() / T::from_count(denom))
            }
        }
    }

    /// Per-element values on the deepest quotient `F/N_last`, through which
    /// the chain norm factors. On that finite group it is an invariant norm.
    pub fn table_on_deepest<T: NormValue>(&self, p: u64) -> Result<NormTable<T>> {
        if !is_prime(p) {
            return Err(Error::contract(format!("{p} is not prime")));
        }
        let deepest = self.levels.last().expect("nonempty");
        let h = deepest.group();
        // projections H_last → H_s, well defined because the chain descends
        let projections: Vec<Vec<ElementId>> = self
            .levels
            .iter()
            .map(|spec| {
                let target = spec.group();
                let mut proj = vec![0usize; h.order()];
                // walk the generator tree of H_last
                let mut done = vec![false; h.order()];
                done[0] = true;
                let mut queue = std::collections::VecDeque::from([0usize]);
                while let Some(x) = queue.pop_front() {
                    for k in 0..spec.rank() {
                        let y = h.mul_gen(x, k);
                        if !done[y] {
                            done[y] = true;
                            proj[y] = target.mul_gen(proj[x], k);
                            queue.push_back(y);
                        }
                    }
                }
                proj
            })
            .collect();
        let mut values = Vec::with_capacity(h.order());
        for g in 0..h.order() {
            let level = projections.iter().position(|proj| proj[g] != 0).map(|s| s + 1);
            values.push(Self::value_from_level::<T>(p, level)?);
        }
        NormTable::new(h, values, ValueDomain::Interval(T::one()))
    }
}

/// `ℓ(w) = max{1/p^s : w ∉ N_s}`, levels counted from 1.
pub fn chain_norm<T: NormValue>(chain: &QuotientChain, p: u64, w: &ReducedWord) -> Result<ChainValue<T>> {
    if !is_prime(p) {
        return Err(Error::contract(format!("{p} is not prime")));
    }
    let mut level = None;
    for (s, spec) in chain.levels.iter().enumerate() {
        if spec.apply_word(w)? != 0 {
            level = Some(s + 1);
            break;
        }
    }
    Ok(ChainValue {
        value: QuotientChain::value_from_level(p, level)?,
        level,
        finite_depth_zero: level.is_none() && !w.is_identity(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ORDER_CAP;
    use crate::scalar::Rational;

    fn chain(orders: &[usize]) -> QuotientChain {
        let levels = orders
            .iter()
            .map(|&n| QuotientSpec::cyclic_product(&[n]).unwrap())
            .collect();
        QuotientChain::new(levels, DEFAULT_ORDER_CAP).unwrap()
    }

    #[test]
    fn powers_of_three() {
        let c = chain(&[3, 9, 27]);
        let x = ReducedWord::generator(1, 0).unwrap();
        let v: ChainValue<Rational> = chain_norm(&c, 2, &x.pow(9)).unwrap();
        assert_eq!(v.value, Rational::new(1, 8));
        assert_eq!(v.level, Some(3));
        let v: ChainValue<Rational> = chain_norm(&c, 2, &x).unwrap();
        assert_eq!(v.value, Rational::new(1, 2));
        let v: ChainValue<Rational> = chain_norm(&c, 2, &ReducedWord::identity(1)).unwrap();
        assert_eq!(v.value, Rational::new(0, 1));
        assert!(!v.finite_depth_zero);
        let v: ChainValue<Rational> = chain_norm(&c, 2, &x.pow(27)).unwrap();
        assert_eq!(v.value, Rational::new(0, 1));
        assert!(v.finite_depth_zero);
    }

    #[test]
    fn rejects_bad_input() {
        let c = chain(&[3, 9]);
        assert!(chain_norm::<Rational>(&c, 4, &ReducedWord::identity(1)).is_err());
        let levels = vec![
            QuotientSpec::cyclic_product(&[2]).unwrap(),
            QuotientSpec::cyclic_product(&[3]).unwrap(),
        ];
        assert!(QuotientChain::new(levels, DEFAULT_ORDER_CAP).is_err());
    }

    #[test]
    fn deepest_table_matches_words() {
        let c = chain(&[3, 9, 27]);
        let t: NormTable<Rational> = c.table_on_deepest(3).unwrap();
        let deepest = &c.levels()[2];
        let x = ReducedWord::generator(1, 0).unwrap();
        for k in 0..27 {
            let w = x.pow(k);
            let v: ChainValue<Rational> = chain_norm(&c, 3, &w).unwrap();
            assert_eq!(*t.value(deepest.apply_word(&w).unwrap()), v.value);
        }
    }
}
