//! Groups given as `F/N`: a free group, a symmetric generating set for the
//! word norm, and relators normally generating `N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{ReducedWord, SymmetricWordSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: SymmetricWordSet,
    pub relators: Vec<ReducedWord>,
}

impl Presentation {
    pub fn new(generators: SymmetricWordSet, relators: Vec<ReducedWord>) -> Result<Self> {
        for r in &relators {
            if r.rank() != generators.rank() {
                return Err(Error::RankMismatch {
                    left: generators.rank(),
                    right: r.rank(),
                });
            }
        }
        Ok(Presentation { generators, relators })
    }

    /// The free group with the norm of its free basis and no relators.
    pub fn free(rank: usize) -> Self {
        Presentation {
            generators: SymmetricWordSet::free_basis(rank),
            relators: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.generators.rank()
    }
}

/// One conjugate of a relator or its inverse: `(r^{±1})^u`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelatorFactor {
    pub relator: usize,
    pub inverse: bool,
    pub conjugator: ReducedWord,
}

impl RelatorFactor {
    pub fn evaluate(&self, relators: &[ReducedWord]) -> Result<ReducedWord> {
        let r = relators
            .get(self.relator)
            .ok_or_else(|| Error::contract(format!("no relator with index {}", self.relator)))?;
        let base = if self.inverse { r.inverse() } else { r.clone() };
        base.conjugate(&self.conjugator)
    }
}

/// Multiplies out a product of relator conjugates; by construction the result lies in `N`.
pub fn kernel_product(rank: usize, relators: &[ReducedWord], factors: &[RelatorFactor]) -> Result<ReducedWord> {
    let mut acc = ReducedWord::identity(rank);
    for f in factors {
        acc = acc.mul(&f.evaluate(relators)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_products_multiply_out() {
        let comm = ReducedWord::parse("1 2 -1 -2", 2).unwrap();
        let rels = vec![comm.clone()];
        let f = RelatorFactor {
            relator: 0,
            inverse: true,
            conjugator: ReducedWord::parse("1", 2).unwrap(),
        };
        let prod = kernel_product(2, &rels, &[f.clone()]).unwrap();
        assert_eq!(prod, comm.inverse().conjugate(&ReducedWord::parse("1", 2).unwrap()).unwrap());
        let bad = RelatorFactor { relator: 3, ..f };
        assert!(kernel_product(2, &rels, &[bad]).is_err());
    }

    #[test]
    fn serde_rejects_unreduced_words() {
        let ok: ReducedWord = serde_json::from_str(r#"{"letters":[1,2],"rank":2}"#).unwrap();
        assert_eq!(ok.letters(), &[1, 2]);
        assert!(serde_json::from_str::<ReducedWord>(r#"{"letters":[1,-1],"rank":2}"#).is_err());
        assert!(serde_json::from_str::<ReducedWord>(r#"{"letters":[3],"rank":2}"#).is_err());
    }
}
