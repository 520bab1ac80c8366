//! Bounds on the conjugation-invariant word norm `‖w‖` of a free group
//! (optionally modulo a normal subgroup given by relators).
//!
//! Upper bounds come from explicit factorizations into conjugates of
//! generators, found by a level-wise search over a bounded conjugator ball.
//! Lower bounds come from the abelianization and from finite quotients,
//! where a homomorphism onto a finite group cannot increase the norm of the
//! image generating set.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{word_norm, Closure, Padding};
use crate::presentation::{kernel_product, Presentation, RelatorFactor};
use crate::quotient::QuotientSpec;
use crate::words::{enumerate_ball, AbelianVector, ReducedWord};

/// Resource limits for [`upper_bound`] and [`estimate_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Largest number of conjugated generators tried.
    pub max_factors: usize,
    /// Conjugators range over the free ball of this radius.
    pub max_conjugator_len: usize,
    /// Relator conjugates allowed in a factorization (relator mode only).
    pub max_relator_factors: usize,
    /// Cap on stored partial products per level.
    pub max_states: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_factors: 4,
            max_conjugator_len: 2,
            max_relator_factors: 1,
            max_states: 2_000_000,
        }
    }
}

/// A conjugated generator `conjugator⁻¹ · generator · conjugator`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub generator: ReducedWord,
    pub conjugator: ReducedWord,
}

impl Factor {
    pub fn value(&self) -> Result<ReducedWord> {
        self.generator.conjugate(&self.conjugator)
    }
}

/// `w = f_1 ⋯ f_k · n` with each `f_i` a conjugated generator and `n` a
/// product of relator conjugates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub factors: Vec<Factor>,
    pub kernel: Vec<RelatorFactor>,
}

impl Factorization {
    /// Multiplies the certificate out; callers compare against `w`.
    pub fn evaluate(&self, presentation: &Presentation) -> Result<ReducedWord> {
        let rank = presentation.rank();
        let mut acc = ReducedWord::identity(rank);
        for f in &self.factors {
            if !presentation.generators.contains(&f.generator) {
                return Err(Error::contract(format!("{} is not a generator", f.generator)));
            }
            acc = acc.mul(&f.value()?)?;
        }
        acc.mul(&kernel_product(rank, &presentation.relators, &self.kernel)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LowerWitness {
    /// Nothing better than the trivial bound.
    Trivial,
    Abelianization,
    /// Index into the probe list.
    Probe(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormBound {
    pub word: ReducedWord,
    pub lower: u64,
    pub lower_witness: LowerWitness,
    pub upper: Option<u64>,
    pub certificate: Option<Factorization>,
    pub exact: bool,
}

impl fmt::Display for NormBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "word: {}", self.word)?;
        writeln!(f, "lower: {}", self.lower)?;
        let witness = match self.lower_witness {
            LowerWitness::Trivial => "trivial".to_string(),
            LowerWitness::Abelianization => "abelianization".to_string(),
            LowerWitness::Probe(i) => format!("probe {i}"),
        };
        writeln!(f, "lower-witness: {witness}")?;
        match self.upper {
            Some(u) => writeln!(f, "upper: {u}")?,
            None => writeln!(f, "upper: unknown")?,
        }
        writeln!(f, "exact: {}", self.exact)?;
        if let Some(cert) = &self.certificate {
            for fac in &cert.factors {
                writeln!(f, "factor: ({})^({})", fac.generator, fac.conjugator)?;
            }
            for k in &cert.kernel {
                writeln!(
                    f,
                    "kernel: relator {}{} conjugated by ({})",
                    k.relator,
                    if k.inverse { "^-1" } else { "" },
                    k.conjugator
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperBound {
    pub upper: Option<u64>,
    pub certificate: Option<Factorization>,
}

/// Conjugated generators `s^u`, `|u| ≤ L`, deduplicated by value and kept in
/// lexicographic order of `(s, u)`.
fn conjugated_letters(presentation: &Presentation, radius: usize, cap: usize) -> Result<Vec<(Factor, ReducedWord)>> {
    let ball = enumerate_ball(presentation.rank(), radius, cap)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for s in presentation.generators.iter() {
        for u in &ball {
            let f = Factor {
                generator: s.clone(),
                conjugator: u.clone(),
            };
            let v = f.value()?;
            if seen.insert(v.clone()) {
                out.push((f, v));
            }
        }
    }
    Ok(out)
}

/// Targets `w · n⁻¹` for `n` a product of at most `R` relator conjugates, in
/// order of increasing `R` and then lexicographic factor order.
fn kernel_targets(
    w: &ReducedWord,
    presentation: &Presentation,
    budget: &SearchBudget,
) -> Result<Vec<(ReducedWord, Vec<RelatorFactor>)>> {
    let mut targets = vec![(w.clone(), Vec::new())];
    if presentation.relators.is_empty() || budget.max_relator_factors == 0 {
        return Ok(targets);
    }
    let ball = enumerate_ball(presentation.rank(), budget.max_conjugator_len, budget.max_states)?;
    let mut singles = Vec::new();
    for relator in 0..presentation.relators.len() {
        for inverse in [false, true] {
            for u in &ball {
                singles.push(RelatorFactor {
                    relator,
                    inverse,
                    conjugator: u.clone(),
                });
            }
        }
    }
    let mut layer: Vec<Vec<RelatorFactor>> = vec![Vec::new()];
    for _ in 0..budget.max_relator_factors {
        let mut next = Vec::new();
        for seq in &layer {
            for f in &singles {
                let mut s = seq.clone();
                s.push(f.clone());
                next.push(s);
            }
            if next.len() > budget.max_states {
                return Err(Error::ResourceCap {
                    what: "relator conjugate products",
                    cap: budget.max_states,
                });
            }
        }
        for seq in &next {
            let n = kernel_product(presentation.rank(), &presentation.relators, seq)?;
            targets.push((w.mul(&n.inverse())?, seq.clone()));
        }
        layer = next;
    }
    Ok(targets)
}

/// Searches for the shortest factorization of `w` into conjugated generators.
///
/// Level `j` stores, for every product of `j` letters, the lexicographically
/// least letter sequence reaching it. The last level is never stored: a
/// target `t` is reached in `k` letters when `t · c⁻¹` sits on level `k - 1`.
/// `upper = None` means no factorization was found within the budget.
pub fn upper_bound(w: &ReducedWord, presentation: &Presentation, budget: &SearchBudget) -> Result<UpperBound> {
    if w.rank() != presentation.rank() {
        return Err(Error::RankMismatch {
            left: presentation.rank(),
            right: w.rank(),
        });
    }
    let targets = kernel_targets(w, presentation, budget)?;
    if let Some((_, kernel)) = targets.iter().find(|(t, _)| t.is_identity()) {
        return Ok(UpperBound {
            upper: Some(0),
            certificate: Some(Factorization {
                factors: Vec::new(),
                kernel: kernel.clone(),
            }),
        });
    }
    let letters = conjugated_letters(presentation, budget.max_conjugator_len, budget.max_states)?;
    let inverses: Vec<ReducedWord> = letters.iter().map(|(_, v)| v.inverse()).collect();

    let rank = presentation.rank();
    let mut level: HashMap<ReducedWord, Vec<u32>> = HashMap::from([(ReducedWord::identity(rank), Vec::new())]);
    for k in 1..=budget.max_factors {
        let mut best: Option<(Vec<u32>, usize)> = None;
        for (ti, (t, _)) in targets.iter().enumerate() {
            for (ci, cinv) in inverses.iter().enumerate() {
                let q = t.mul(cinv)?;
                if let Some(seq) = level.get(&q) {
                    let mut cand = seq.clone();
                    cand.push(ci as u32);
                    let better = match &best {
                        None => true,
                        Some((b, bt)) => (&cand, ti) < (b, *bt),
                    };
                    if better {
                        best = Some((cand, ti));
                    }
                }
            }
        }
        if let Some((seq, ti)) = best {
            return Ok(UpperBound {
                upper: Some(k as u64),
                certificate: Some(Factorization {
                    factors: seq.iter().map(|&i| letters[i as usize].0.clone()).collect(),
                    kernel: targets[ti].1.clone(),
                }),
            });
        }
        if k == budget.max_factors {
            break;
        }
        let mut next: HashMap<ReducedWord, Vec<u32>> = HashMap::new();
        for (q, seq) in &level {
            for (ci, (_, c)) in letters.iter().enumerate() {
                let p = q.mul(c)?;
                let mut cand = seq.clone();
                cand.push(ci as u32);
                match next.get_mut(&p) {
                    Some(existing) if *existing <= cand => {}
                    Some(existing) => *existing = cand,
                    None => {
                        next.insert(p, cand);
                    }
                }
            }
            if next.len() > budget.max_states {
                return Ok(UpperBound {
                    upper: None,
                    certificate: None,
                });
            }
        }
        level = next;
    }
    Ok(UpperBound {
        upper: None,
        certificate: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBound {
    pub lower: u64,
    pub witness: LowerWitness,
    /// Bound from each probe, `None` when the probe does not apply.
    pub per_probe: Vec<Option<u64>>,
}

/// Depth beyond which the abelianization search gives up and reports `cap + 1`.
const ABELIAN_DEPTH_CAP: u64 = 256;
const ABELIAN_STATE_CAP: usize = 1_000_000;

/// Least `k` with `target` a sum of `k` vectors from `steps`, searching in `Z^n`.
/// Gives `cap + 1` (still a valid lower bound) when the search is cut off.
fn abelian_length(target: &AbelianVector, steps: &[AbelianVector]) -> u64 {
    if target.is_zero() {
        return 0;
    }
    let zero = AbelianVector::zero(target.0.len());
    let mut seen = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([(zero, 0u64)]);
    while let Some((v, d)) = queue.pop_front() {
        if d >= ABELIAN_DEPTH_CAP || seen.len() > ABELIAN_STATE_CAP {
            return d + 1;
        }
        for s in steps {
            let next = &v + s;
            if next == *target {
                return d + 1;
            }
            if seen.insert(next.clone()) {
                queue.push_back((next, d + 1));
            }
        }
    }
    // The reachable lattice is finite only when every step is zero.
    ABELIAN_DEPTH_CAP + 1
}

/// Lower bound from the abelianization and from every applicable probe.
///
/// A probe applies when it has the right rank and kills all relators; its
/// bound is the conjugation-invariant word norm of `ψ(w)` with respect to
/// `ψ(S)`, padded by `|H| + 1` when `ψ(w)` is out of reach.
pub fn lower_bound(w: &ReducedWord, presentation: &Presentation, probes: &[QuotientSpec]) -> Result<LowerBound> {
    if w.rank() != presentation.rank() {
        return Err(Error::RankMismatch {
            left: presentation.rank(),
            right: w.rank(),
        });
    }
    let mut lower = 0;
    let mut witness = LowerWitness::Trivial;
    if presentation.relators.iter().all(|r| r.abelianize().is_zero()) {
        let steps: Vec<AbelianVector> = presentation
            .generators
            .iter()
            .map(|s| s.abelianize())
            .filter(|v| !v.is_zero())
            .collect();
        let a = abelian_length(&w.abelianize(), &steps);
        if a > lower {
            lower = a;
            witness = LowerWitness::Abelianization;
        }
    }
    let mut per_probe = Vec::with_capacity(probes.len());
    for (i, spec) in probes.iter().enumerate() {
        if spec.rank() != presentation.rank() || !spec.kills_all(&presentation.relators)? {
            per_probe.push(None);
            continue;
        }
        let gens = spec.image_set(presentation.generators.iter())?;
        let table = word_norm::<i64>(spec.group(), &gens, Closure::Conjugacy, Padding::Pad)?;
        let v = *table.value(spec.apply_word(w)?) as u64;
        per_probe.push(Some(v));
        if v > lower {
            lower = v;
            witness = LowerWitness::Probe(i);
        }
    }
    Ok(LowerBound {
        lower,
        witness,
        per_probe,
    })
}

/// Combines [`lower_bound`] and [`upper_bound`].
pub fn estimate_norm(
    w: &ReducedWord,
    presentation: &Presentation,
    probes: &[QuotientSpec],
    budget: &SearchBudget,
) -> Result<NormBound> {
    let lo = lower_bound(w, presentation, probes)?;
    let up = upper_bound(w, presentation, budget)?;
    if let Some(u) = up.upper {
        if u < lo.lower {
            return Err(Error::contract(format!(
                "upper bound {u} below lower bound {} for {w}; the probes are inconsistent",
                lo.lower
            )));
        }
    }
    Ok(NormBound {
        word: w.clone(),
        lower: lo.lower,
        lower_witness: lo.witness,
        exact: up.upper == Some(lo.lower),
        upper: up.upper,
        certificate: up.certificate,
    })
}
