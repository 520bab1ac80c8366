//! Finite-quotient probes for profinite separation questions.
//!
//! A quotient `ψ: F → H` separates `w` from a set `X` when `ψ(w) ∉ ψ(X)`.
//! Every positive answer comes with a [`SeparationCertificate`] that can be
//! replayed from its serialized form. A finite catalog can only certify
//! separations; running out of quotients proves nothing.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_bounds::Factorization;
use crate::group::{ElementId, ElementSet, FiniteGroup};
use crate::perm::Perm;
use crate::presentation::{kernel_product, Presentation, RelatorFactor};
use crate::quotient::{QuotientSpec, QuotientSpecRecord};
use crate::scalar::NormValue;
use crate::witness::{build_lef_witness, LefWitness, ThresholdSet};
use crate::words::ReducedWord;

/// Caveat attached to every exhaustion report.
pub const EXHAUSTION_CAVEAT: &str = "no quotient in the catalog achieved the goal; a finite catalog can only \
     certify separations, so this says nothing about closedness in the profinite topology";

/// An element of `N` with its certificate: a product of relator conjugates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelWord {
    pub word: ReducedWord,
    pub factors: Vec<RelatorFactor>,
}

/// An element of norm at most 1 modulo `N`: `generator^conjugator · n` with
/// `n` a certified kernel element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassWord {
    pub word: ReducedWord,
    pub generator: ReducedWord,
    pub conjugator: ReducedWord,
    pub kernel: Vec<RelatorFactor>,
}

/// One separation question: is `w` outside the closure of `B_m(1) N`, or of
/// the product of the classes of `class_words` and `kernel_words`?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem")]
pub struct ProbeProblem {
    pub presentation: Presentation,
    pub w: ReducedWord,
    pub m: usize,
    pub kernel_words: Vec<KernelWord>,
    pub class_words: Vec<ClassWord>,
}

#[derive(Deserialize)]
struct RawProblem {
    presentation: Presentation,
    w: ReducedWord,
    m: usize,
    kernel_words: Vec<KernelWord>,
    class_words: Vec<ClassWord>,
}

impl TryFrom<RawProblem> for ProbeProblem {
    type Error = Error;

    fn try_from(raw: RawProblem) -> Result<Self> {
        ProbeProblem::new(raw.presentation, raw.w, raw.m, raw.kernel_words, raw.class_words)
    }
}

impl ProbeProblem {
    /// Validates every certificate by multiplying it out.
    pub fn new(
        presentation: Presentation,
        w: ReducedWord,
        m: usize,
        kernel_words: Vec<KernelWord>,
        class_words: Vec<ClassWord>,
    ) -> Result<Self> {
        let rank = presentation.rank();
        let rels = &presentation.relators;
        if w.rank() != rank {
            return Err(Error::RankMismatch {
                left: rank,
                right: w.rank(),
            });
        }
        for (i, k) in kernel_words.iter().enumerate() {
            if kernel_product(rank, rels, &k.factors)? != k.word {
                return Err(Error::contract(format!(
                    "kernel word {i} ({}) does not match its certificate",
                    k.word
                )));
            }
        }
        for (i, c) in class_words.iter().enumerate() {
            if !presentation.generators.contains(&c.generator) {
                return Err(Error::contract(format!(
                    "class word {i}: {} is not in the generating set",
                    c.generator
                )));
            }
            let value = c.generator.conjugate(&c.conjugator)?.mul(&kernel_product(rank, rels, &c.kernel)?)?;
            if value != c.word {
                return Err(Error::contract(format!(
                    "class word {i} ({}) does not match its certificate",
                    c.word
                )));
            }
        }
        Ok(ProbeProblem {
            presentation,
            w,
            m,
            kernel_words,
            class_words,
        })
    }

    /// A problem with no class or kernel words.
    pub fn simple(presentation: Presentation, w: ReducedWord, m: usize) -> Result<Self> {
        Self::new(presentation, w, m, Vec::new(), Vec::new())
    }

    pub fn rank(&self) -> usize {
        self.presentation.rank()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    Rf,
    Product,
    Lef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparationVerdict {
    Separated,
    Contained,
    Inconclusive,
}

impl fmt::Display for SeparationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeparationVerdict::Separated => "separated",
            SeparationVerdict::Contained => "contained",
            SeparationVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// A probe result with everything needed to recompute it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub kind: ProbeKind,
    pub spec: QuotientSpecRecord,
    pub problem: ProbeProblem,
    /// The partial-isomorphism domain (LEF probes only).
    pub domain: Vec<ReducedWord>,
    pub image_of_w: String,
    /// The computed image set, as permutations in element-id order.
    pub checked_set: Vec<String>,
    pub verdict: SeparationVerdict,
    /// Named sub-verdicts.
    pub axes: Vec<(String, bool)>,
    pub reason: Option<String>,
    pub caveat: Option<String>,
}

impl SeparationCertificate {
    /// Recomputes the certificate from its own inputs and compares everything.
    pub fn replay(&self) -> Result<bool> {
        let spec = QuotientSpec::from_record(&self.spec)?;
        let again = match self.kind {
            ProbeKind::Rf => separation_check_rf(&self.problem, &spec)?,
            ProbeKind::Product => closure_product_check(&self.problem, &spec)?,
            ProbeKind::Lef => lef_separation_check(&self.problem, &self.domain, &spec)?,
        };
        Ok(again == *self)
    }

    pub fn axis(&self, name: &str) -> Option<bool> {
        self.axes.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

impl fmt::Display for SeparationCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ProbeKind::Rf => "rf",
            ProbeKind::Product => "product",
            ProbeKind::Lef => "lef",
        };
        writeln!(f, "probe: {kind}")?;
        writeln!(f, "verdict: {}", self.verdict)?;
        writeln!(f, "quotient: {}", self.spec.images.join(" ; "))?;
        writeln!(f, "w: {}  m: {}", self.problem.w, self.problem.m)?;
        writeln!(f, "image of w: {}", self.image_of_w)?;
        writeln!(f, "checked set ({}): {}", self.checked_set.len(), self.checked_set.join(" "))?;
        for (name, v) in &self.axes {
            writeln!(f, "{name}: {}", if *v { "yes" } else { "no" })?;
        }
        if let Some(r) = &self.reason {
            writeln!(f, "reason: {r}")?;
        }
        if let Some(c) = &self.caveat {
            writeln!(f, "caveat: {c}")?;
        }
        Ok(())
    }
}

fn check_rank(spec: &QuotientSpec, rank: usize) -> Result<()> {
    if spec.rank() != rank {
        return Err(Error::RankMismatch {
            left: rank,
            right: spec.rank(),
        });
    }
    Ok(())
}

/// `{1} ∪ ψ(S)^H`: the image of the unit ball of the word norm.
fn unit_ball_image(spec: &QuotientSpec, presentation: &Presentation) -> Result<ElementSet> {
    let group = spec.group();
    let mut unit = group.class_closure(&spec.image_set(presentation.generators.iter())?)?;
    unit.insert(group.identity());
    Ok(unit)
}

fn power(set: &ElementSet, m: usize) -> Result<ElementSet> {
    let mut acc = ElementSet::singleton(set.group(), set.group().identity());
    for _ in 0..m {
        let next = acc.product(set)?;
        if next == acc {
            break;
        }
        acc = next;
    }
    Ok(acc)
}

/// The image `ψ(B_m(1) N)`, computed as `({1} ∪ ψ(S)^H)^m · ⟨⟨ψ(relators)⟩⟩`.
///
/// Since `ψ` is onto `H`, conjugating by `F` becomes conjugating by `H`.
pub fn ball_image(spec: &QuotientSpec, presentation: &Presentation, m: usize) -> Result<ElementSet> {
    check_rank(spec, presentation.rank())?;
    let group = spec.group();
    let unit = unit_ball_image(spec, presentation)?;
    let normal = group.normal_closure(&spec.image_set(presentation.relators.iter())?)?;
    power(&unit, m)?.product(&normal)
}

struct Evaluated {
    image: ElementId,
    set: ElementSet,
}

fn certificate(
    kind: ProbeKind,
    spec: &QuotientSpec,
    problem: &ProbeProblem,
    domain: &[ReducedWord],
    ev: &Evaluated,
    verdict: SeparationVerdict,
) -> SeparationCertificate {
    SeparationCertificate {
        kind,
        spec: spec.to_record(),
        problem: problem.clone(),
        domain: domain.to_vec(),
        image_of_w: spec.group().element(ev.image).to_string(),
        checked_set: ev.set.to_perm_strings(),
        verdict,
        axes: Vec::new(),
        reason: None,
        caveat: None,
    }
}

/// Residual-finiteness probe: separated iff `ψ(w) ∉ ψ(B_m(1) N)`.
/// Inconclusive when `ψ` does not kill every relator.
pub fn separation_check_rf(problem: &ProbeProblem, spec: &QuotientSpec) -> Result<SeparationCertificate> {
    let p = &problem.presentation;
    check_rank(spec, p.rank())?;
    let ev = Evaluated {
        image: spec.apply_word(&problem.w)?,
        set: ball_image(spec, p, problem.m)?,
    };
    if let Some(r) = p.relators.iter().find(|r| spec.apply_word(r).map_or(true, |g| g != 0)) {
        let mut cert = certificate(ProbeKind::Rf, spec, problem, &[], &ev, SeparationVerdict::Inconclusive);
        cert.reason = Some(format!("the quotient does not kill relator {r}"));
        return Ok(cert);
    }
    let verdict = if ev.set.contains(ev.image) {
        SeparationVerdict::Contained
    } else {
        SeparationVerdict::Separated
    };
    Ok(certificate(ProbeKind::Rf, spec, problem, &[], &ev, verdict))
}

/// Class-product probe with three reported axes:
///
/// * `membership`: `ψ(w)` lies in `ψ(g_1)^H ⋯ ψ(g_k)^H · ψ(h_1)^H ⋯ ψ(h_l)^H`;
/// * `containment`: that product lies in `ψ(B_m(1) N)`. Images only shrink
///   sets, so a failure here is a consistency signal and refutes nothing;
/// * `dagger`: `ψ(w) ∉ ψ(B_1(1))^m · ψ(h_1)^H ⋯ ψ(h_l)^H`.
///
/// The verdict is separated iff membership fails.
pub fn closure_product_check(problem: &ProbeProblem, spec: &QuotientSpec) -> Result<SeparationCertificate> {
    let p = &problem.presentation;
    check_rank(spec, p.rank())?;
    let group = spec.group();
    let class_of = |w: &ReducedWord| -> Result<ElementSet> { Ok(group.conjugacy_class(spec.apply_word(w)?)) };
    let mut kernel_part = ElementSet::singleton(group, group.identity());
    for k in &problem.kernel_words {
        kernel_part = kernel_part.product(&class_of(&k.word)?)?;
    }
    let mut product = ElementSet::singleton(group, group.identity());
    for c in &problem.class_words {
        product = product.product(&class_of(&c.word)?)?;
    }
    let product = product.product(&kernel_part)?;
    let image = spec.apply_word(&problem.w)?;
    let membership = product.contains(image);
    let containment = product.is_subset(&ball_image(spec, p, problem.m)?)?;
    let dagger_set = power(&unit_ball_image(spec, p)?, problem.m)?.product(&kernel_part)?;
    let dagger = !dagger_set.contains(image);
    let ev = Evaluated { image, set: product };
    let verdict = if membership {
        SeparationVerdict::Contained
    } else {
        SeparationVerdict::Separated
    };
    let mut cert = certificate(ProbeKind::Product, spec, problem, &[], &ev, verdict);
    cert.axes = vec![
        ("membership".to_string(), membership),
        ("containment".to_string(), containment),
        ("dagger".to_string(), dagger),
    ];
    if !containment {
        cert.caveat = Some(
            "the class product is not inside the ball image in this quotient; images only shrink sets, \
             so this refutes nothing about the closure in F"
                .to_string(),
        );
    }
    Ok(cert)
}

/// Partial-isomorphism clause on `D`: distinct images, and
/// `ψ(d_i) ψ(d_j) = ψ(d_k)` exactly when `d_i d_j = d_k`. The converse
/// direction is only decidable, and only checked, without relators.
fn partial_isomorphism(spec: &QuotientSpec, presentation: &Presentation, domain: &[ReducedWord]) -> Result<Option<String>> {
    let group = spec.group();
    let images = domain.iter().map(|d| spec.apply_word(d)).collect::<Result<Vec<_>>>()?;
    let mut by_image: HashMap<ElementId, usize> = HashMap::new();
    for (i, &g) in images.iter().enumerate() {
        if let Some(&j) = by_image.get(&g) {
            return Ok(Some(format!("{} and {} have the same image", domain[j], domain[i])));
        }
        by_image.insert(g, i);
    }
    let index: HashMap<&ReducedWord, usize> = domain.iter().enumerate().map(|(i, d)| (d, i)).collect();
    for (i, a) in domain.iter().enumerate() {
        for (j, b) in domain.iter().enumerate() {
            let prod = a.mul(b)?;
            let img = group.mul(images[i], images[j]);
            if let Some(&k) = index.get(&prod) {
                if images[k] != img {
                    return Ok(Some(format!("not multiplicative on {a} · {b}")));
                }
            } else if presentation.relators.is_empty() {
                if let Some(&k) = by_image.get(&img) {
                    return Ok(Some(format!("{a} · {b} and {} have the same image", domain[k])));
                }
            }
        }
    }
    Ok(None)
}

/// LEF probe: separated iff the map `D → H` is a partial isomorphism and
/// `ψ(w) ∉ ψ(B_m(1) N)`. Relators need not be killed. When only the
/// partial-isomorphism clause fails the verdict is inconclusive.
pub fn lef_separation_check(
    problem: &ProbeProblem,
    domain: &[ReducedWord],
    spec: &QuotientSpec,
) -> Result<SeparationCertificate> {
    let p = &problem.presentation;
    check_rank(spec, p.rank())?;
    if let Some(d) = domain.iter().find(|d| d.rank() != p.rank()) {
        return Err(Error::RankMismatch {
            left: p.rank(),
            right: d.rank(),
        });
    }
    let ev = Evaluated {
        image: spec.apply_word(&problem.w)?,
        set: ball_image(spec, p, problem.m)?,
    };
    let failure = partial_isomorphism(spec, p, domain)?;
    let separated = !ev.set.contains(ev.image);
    let verdict = match (failure.is_none(), separated) {
        (true, true) => SeparationVerdict::Separated,
        (_, false) => SeparationVerdict::Contained,
        (false, true) => SeparationVerdict::Inconclusive,
    };
    let mut cert = certificate(ProbeKind::Lef, spec, problem, domain, &ev, verdict);
    cert.axes = vec![
        ("partial-isomorphism".to_string(), failure.is_none()),
        ("separation".to_string(), separated),
    ];
    cert.reason = failure;
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchGoal {
    RfSeparation,
    LefSeparation(Vec<ReducedWord>),
    ProductMembershipNo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    pub verdicts: Vec<SeparationVerdict>,
    pub caveat: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found {
        index: usize,
        certificate: Box<SeparationCertificate>,
        /// Verdicts of the specs scanned before the success.
        earlier: Vec<SeparationVerdict>,
    },
    Exhausted(ExhaustionReport),
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&SeparationCertificate> {
        match self {
            SearchOutcome::Found { certificate, .. } => Some(certificate),
            SearchOutcome::Exhausted(_) => None,
        }
    }
}

/// Scans the catalog in order; the first quotient achieving the goal wins.
pub fn quotient_search(problem: &ProbeProblem, catalog: &[QuotientSpec], goal: &SearchGoal) -> Result<SearchOutcome> {
    let mut verdicts = Vec::new();
    for (index, spec) in catalog.iter().enumerate() {
        let cert = match goal {
            SearchGoal::RfSeparation => separation_check_rf(problem, spec)?,
            SearchGoal::LefSeparation(domain) => lef_separation_check(problem, domain, spec)?,
            SearchGoal::ProductMembershipNo => closure_product_check(problem, spec)?,
        };
        if cert.verdict == SeparationVerdict::Separated {
            return Ok(SearchOutcome::Found {
                index,
                certificate: Box::new(cert),
                earlier: verdicts,
            });
        }
        verdicts.push(cert.verdict);
    }
    Ok(SearchOutcome::Exhausted(ExhaustionReport {
        verdicts,
        caveat: EXHAUSTION_CAVEAT.to_string(),
    }))
}

pub enum WitnessSearchOutcome<T> {
    Found { index: usize, witness: LefWitness<T> },
    Exhausted(ExhaustionReport),
}

/// Scans the catalog for a quotient inducing a passing metric RF witness
/// (see [`build_lef_witness`]). Quotients not killing every relator are
/// skipped and recorded as inconclusive.
pub fn find_lef_witness<T: NormValue>(
    presentation: &Presentation,
    domain: &[(ReducedWord, T)],
    q: &ThresholdSet<T>,
    catalog: &[QuotientSpec],
) -> Result<WitnessSearchOutcome<T>> {
    let mut verdicts = Vec::new();
    for (index, spec) in catalog.iter().enumerate() {
        check_rank(spec, presentation.rank())?;
        if !spec.kills_all(&presentation.relators)? {
            verdicts.push(SeparationVerdict::Inconclusive);
            continue;
        }
        let witness = build_lef_witness(presentation, domain, q, spec)?;
        if witness.report.passed() {
            return Ok(WitnessSearchOutcome::Found { index, witness });
        }
        verdicts.push(SeparationVerdict::Contained);
    }
    Ok(WitnessSearchOutcome::Exhausted(ExhaustionReport {
        verdicts,
        caveat: EXHAUSTION_CAVEAT.to_string(),
    }))
}

/// `(Z/n)^rank` for each `n` in `orders`, each generator an `n`-cycle on its own block.
pub fn cyclic_power_catalog(rank: usize, orders: impl IntoIterator<Item = usize>) -> Result<Vec<QuotientSpec>> {
    orders
        .into_iter()
        .map(|n| QuotientSpec::cyclic_product(&vec![n; rank]))
        .collect()
}

/// A generated catalog and whether the enumeration budget cut it short.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub specs: Vec<QuotientSpec>,
    pub truncated: bool,
}

/// All homomorphisms `F → T` into the given target groups that kill the
/// relators, one spec per generator-image tuple. Tuples are enumerated
/// lexicographically by element id; at most `budget` tuples are examined.
pub fn homomorphism_catalog(
    rank: usize,
    targets: &[Arc<FiniteGroup>],
    relators: &[ReducedWord],
    budget: usize,
    order_cap: usize,
) -> Result<Catalog> {
    if rank == 0 {
        return Err(Error::contract("rank must be positive"));
    }
    let mut specs = Vec::new();
    let mut examined = 0usize;
    for target in targets {
        let n = target.order();
        let mut tuple = vec![0usize; rank];
        loop {
            if examined == budget {
                return Ok(Catalog { specs, truncated: true });
            }
            examined += 1;
            let eval = |w: &ReducedWord| {
                w.letters().iter().fold(target.identity(), |acc, &l| {
                    let g = tuple[(l.unsigned_abs() - 1) as usize];
                    target.mul(acc, if l > 0 { g } else { target.inv(g) })
                })
            };
            if relators.iter().all(|r| eval(r) == target.identity()) {
                let images: Vec<Perm> = tuple.iter().map(|&g| target.element(g).clone()).collect();
                specs.push(QuotientSpec::with_cap(images, order_cap)?);
            }
            // odometer step, last coordinate fastest
            let mut pos = rank;
            let wrapped = loop {
                if pos == 0 {
                    break true;
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < n {
                    break false;
                }
                tuple[pos] = 0;
            };
            if wrapped {
                break;
            }
        }
    }
    Ok(Catalog { specs, truncated: false })
}

/// Cross-checks a batch of certificates: each must replay, and certificates
/// for identical inputs must agree. Returns the problems found.
pub fn audit_certificates(certs: &[SeparationCertificate]) -> Result<Vec<String>> {
    let mut problems = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, c) in certs.iter().enumerate() {
        if !c.replay()? {
            problems.push(format!("certificate {i} does not replay"));
        }
        let key = serde_json::to_string(&(&c.kind, &c.spec, &c.problem, &c.domain)).expect("serializable");
        match seen.get(&key) {
            Some(&j) if certs[j].verdict != c.verdict || certs[j].checked_set != c.checked_set => {
                problems.push(format!("certificates {j} and {i} disagree on identical inputs"));
            }
            Some(_) => {}
            None => {
                seen.insert(key, i);
            }
        }
    }
    Ok(problems)
}

/// A separated RF certificate for `(w, m)` excludes any factorization of `w`
/// into at most `m` conjugated generators times a kernel element. Returns
/// `true` when the two contradict each other.
pub fn contradicts(cert: &SeparationCertificate, factorization: &Factorization) -> Result<bool> {
    if cert.kind != ProbeKind::Rf || cert.verdict != SeparationVerdict::Separated {
        return Ok(false);
    }
    let p = &cert.problem.presentation;
    Ok(factorization.factors.len() <= cert.problem.m && factorization.evaluate(p)? == cert.problem.w)
}
