//! Checkers for approximation witnesses: finite maps from a normed group into
//! a finite invariantly normed group, tested against the conditions of
//! (metric) weak soficity, almost-homomorphisms, metric LEF / RF, and LEF
//! stability of free groups.
//!
//! Failing conditions are reported as violations; only malformed input is an
//! error.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{ElementId, ElementSet, FiniteGroup};
use crate::norms::{word_norm, Closure, NormTable, Padding};
use crate::presentation::Presentation;
use crate::quotient::QuotientSpec;
use crate::report::WitnessReport;
use crate::scalar::NormValue;
use crate::words::ReducedWord;

/// Multiplication over domain descriptors.
///
/// For free sources the product is the reduced free product; a triple is
/// only detected when that exact word is itself in the domain.
pub trait SourceGroup {
    type Elem: Clone + Eq + Hash + Debug;

    fn product(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;

    fn is_identity(&self, a: &Self::Elem) -> bool;

    fn describe(&self, a: &Self::Elem) -> String;
}

/// Words in a free group of the given rank (or representatives modulo relators).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeSource {
    pub rank: usize,
}

impl SourceGroup for FreeSource {
    type Elem = ReducedWord;

    fn product(&self, a: &ReducedWord, b: &ReducedWord) -> Result<ReducedWord> {
        a.mul(b)
    }

    fn is_identity(&self, a: &ReducedWord) -> bool {
        a.is_identity()
    }

    fn describe(&self, a: &ReducedWord) -> String {
        a.to_string()
    }
}

impl SourceGroup for FiniteGroup {
    type Elem = ElementId;

    fn product(&self, a: &ElementId, b: &ElementId) -> Result<ElementId> {
        if *a >= self.order() || *b >= self.order() {
            return Err(Error::contract("element id out of range"));
        }
        Ok(self.mul(*a, *b))
    }

    fn is_identity(&self, a: &ElementId) -> bool {
        *a == self.identity()
    }

    fn describe(&self, a: &ElementId) -> String {
        self.element(*a).to_string()
    }
}

/// A map from finitely many source elements into a finite target group,
/// together with the source norm of every domain entry.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialMap<E, T> {
    domain: Vec<E>,
    images: Vec<ElementId>,
    source_norms: Vec<T>,
}

impl<E: Clone + Eq + Hash + Debug, T: NormValue> PartialMap<E, T> {
    /// Domain entries must be pairwise distinct descriptors; whether they are
    /// distinct as group elements is the caller's responsibility for
    /// infinite sources.
    pub fn new(domain: Vec<E>, images: Vec<ElementId>, source_norms: Vec<T>) -> Result<Self> {
        if domain.len() != images.len() || domain.len() != source_norms.len() {
            return Err(Error::contract(format!(
                "partial map has {} domain entries, {} images and {} norms",
                domain.len(),
                images.len(),
                source_norms.len()
            )));
        }
        let mut seen = HashMap::new();
        for (i, d) in domain.iter().enumerate() {
            if let Some(j) = seen.insert(d.clone(), i) {
                return Err(Error::contract(format!("domain entries {j} and {i} coincide: {d:?}")));
            }
        }
        if let Some(v) = source_norms.iter().find(|v| **v < T::zero()) {
            return Err(Error::contract(format!("negative source norm {v}")));
        }
        Ok(PartialMap {
            domain,
            images,
            source_norms,
        })
    }

    pub fn domain(&self) -> &[E] {
        &self.domain
    }

    pub fn images(&self) -> &[ElementId] {
        &self.images
    }

    pub fn source_norms(&self) -> &[T] {
        &self.source_norms
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    fn check_target(&self, target: &FiniteGroup) -> Result<()> {
        match self.images.iter().find(|&&g| g >= target.order()) {
            Some(g) => Err(Error::contract(format!(
                "image id {g} outside the target group of order {}",
                target.order()
            ))),
            None => Ok(()),
        }
    }

    /// Index triples `(i, j, k)` with `d_i · d_j = d_k`.
    fn triples<S: SourceGroup<Elem = E>>(&self, source: &S) -> Result<Vec<(usize, usize, usize)>> {
        let index: HashMap<&E, usize> = self.domain.iter().enumerate().map(|(i, d)| (d, i)).collect();
        let mut out = Vec::new();
        for (i, a) in self.domain.iter().enumerate() {
            for (j, b) in self.domain.iter().enumerate() {
                if let Some(&k) = index.get(&source.product(a, b)?) {
                    out.push((i, j, k));
                }
            }
        }
        Ok(out)
    }

    /// Pairs of domain entries with the same image.
    fn collisions(&self) -> Vec<(usize, usize)> {
        let mut first: HashMap<ElementId, usize> = HashMap::new();
        let mut out = Vec::new();
        for (i, &g) in self.images.iter().enumerate() {
            match first.get(&g) {
                Some(&j) => out.push((j, i)),
                None => {
                    first.insert(g, i);
                }
            }
        }
        out
    }
}

/// Thresholds for almost-homomorphisms: a finite set of non-negative values containing 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet<T> {
    values: Vec<T>,
}

impl<T: NormValue> ThresholdSet<T> {
    pub fn new(values: impl IntoIterator<Item = T>) -> Result<Self> {
        let mut values: Vec<T> = values.into_iter().collect();
        if values.iter().any(|v| *v < T::zero()) {
            return Err(Error::contract("thresholds must be non-negative"));
        }
        if !values.iter().any(|v| v.is_zero()) {
            return Err(Error::contract("thresholds must contain 0"));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("comparable thresholds"));
        values.dedup();
        Ok(ThresholdSet { values })
    }

    /// `{0, 1, …, n}`.
    pub fn up_to(n: usize) -> Self {
        ThresholdSet {
            values: (0..=n).map(T::from_count).collect(),
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn contains(&self, v: &T) -> bool {
        self.values.iter().any(|q| q == v)
    }
}

impl<T: NormValue> std::fmt::Display for ThresholdSet<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_ratio_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Which definition [`check_mws_witness`] tests.
#[derive(Debug, Clone, PartialEq)]
pub enum MwsMode<T> {
    /// Metric weak soficity: `|ℓ(g) − ℓ_C(φ(g))| < ε`.
    Metric,
    /// Weak soficity: `ℓ_C(φ(g)) > r` for `g ≠ 1`.
    Weak { r: T },
}

fn same_group(table: &NormTable<impl NormValue>, group: &Arc<FiniteGroup>) -> Result<()> {
    if Arc::ptr_eq(table.group(), group) || table.group().elements() == group.elements() {
        Ok(())
    } else {
        Err(Error::GroupMismatch)
    }
}

/// Checks every condition of an ε-witness over the whole domain.
pub fn check_mws_witness<S: SourceGroup, T: NormValue>(
    source: &S,
    map: &PartialMap<S::Elem, T>,
    eps: &T,
    target: &NormTable<T>,
    mode: &MwsMode<T>,
) -> Result<WitnessReport> {
    if *eps <= T::zero() {
        return Err(Error::contract("ε must be positive"));
    }
    let group = target.group();
    map.check_target(group)?;
    if let Some((i, j)) = map.collisions().first() {
        return Err(Error::contract(format!(
            "map is not injective: {} and {} share an image",
            source.describe(&map.domain[*i]),
            source.describe(&map.domain[*j])
        )));
    }
    let mut report = WitnessReport::new();
    report.param("epsilon", eps.to_ratio_string());
    match mode {
        MwsMode::Metric => report.param("mode", "metric"),
        MwsMode::Weak { r } => report.param("mode", "weak").param("r", r.to_ratio_string()),
    };
    let im = &map.images;
    for (i, j, k) in map.triples(source)? {
        let defect = match mode {
            // φ(gh)⁻¹ φ(g) φ(h)
            MwsMode::Metric => group.mul(group.inv(im[k]), group.mul(im[i], im[j])),
            // φ(hg) (φ(h) φ(g))⁻¹
            MwsMode::Weak { .. } => group.mul(im[k], group.inv(group.mul(im[i], im[j]))),
        };
        let v = target.value(defect);
        if v >= eps {
            report.violate(
                "multiplicativity",
                [i, j, k].map(|x| source.describe(&map.domain[x])),
                v.to_ratio_string(),
            );
        }
    }
    for (i, d) in map.domain.iter().enumerate() {
        let v = target.value(im[i]);
        let identity = source.is_identity(d);
        if identity && v >= eps {
            report.violate("identity", [source.describe(d)], v.to_ratio_string());
        }
        match mode {
            MwsMode::Metric => {
                let diff = map.source_norms[i].abs_diff(v);
                if diff >= *eps {
                    report.violate("norm", [source.describe(d)], diff.to_ratio_string());
                }
            }
            MwsMode::Weak { r } => {
                if !identity && v <= r {
                    report.violate("separation", [source.describe(d)], v.to_ratio_string());
                }
            }
        }
    }
    Ok(report.finish())
}

/// A group homomorphism into a finite group, evaluated pointwise.
pub trait Homomorphism<E> {
    fn target(&self) -> &Arc<FiniteGroup>;

    fn image(&self, e: &E) -> Result<ElementId>;
}

impl Homomorphism<ReducedWord> for QuotientSpec {
    fn target(&self) -> &Arc<FiniteGroup> {
        self.group()
    }

    fn image(&self, e: &ReducedWord) -> Result<ElementId> {
        self.apply_word(e)
    }
}

/// A homomorphism between finite groups, stored as a full table.
#[derive(Debug, Clone)]
pub struct FiniteHom {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    map: Vec<ElementId>,
}

impl FiniteHom {
    /// Extends images of the source's generators; fails unless the
    /// extension is a homomorphism (checked on every Cayley graph edge).
    pub fn from_generator_images(
        source: &Arc<FiniteGroup>,
        target: &Arc<FiniteGroup>,
        images: &[ElementId],
    ) -> Result<Self> {
        let k = source.generator_ids().len();
        if images.len() != k {
            return Err(Error::contract(format!("expected {k} generator images, got {}", images.len())));
        }
        if images.iter().any(|&g| g >= target.order()) {
            return Err(Error::contract("generator image out of range"));
        }
        let n = source.order();
        let mut map = vec![usize::MAX; n];
        map[0] = target.identity();
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for (j, &img) in images.iter().enumerate() {
                let y = source.mul_gen(x, j);
                if map[y] == usize::MAX {
                    map[y] = target.mul(map[x], img);
                    queue.push_back(y);
                }
            }
        }
        for x in 0..n {
            for (j, &img) in images.iter().enumerate() {
                if map[source.mul_gen(x, j)] != target.mul(map[x], img) {
                    return Err(Error::contract("generator images do not extend to a homomorphism"));
                }
            }
        }
        Ok(FiniteHom {
            source: Arc::clone(source),
            target: Arc::clone(target),
            map,
        })
    }

    pub fn identity(group: &Arc<FiniteGroup>) -> Self {
        FiniteHom {
            source: Arc::clone(group),
            target: Arc::clone(group),
            map: (0..group.order()).collect(),
        }
    }

    /// The projection `G → G/N` of a coset group.
    pub fn projection(source: &Arc<FiniteGroup>, cosets: &crate::group::CosetGroup) -> Self {
        FiniteHom {
            source: Arc::clone(source),
            target: Arc::clone(&cosets.quotient),
            map: cosets.projection.clone(),
        }
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn table(&self) -> &[ElementId] {
        &self.map
    }
}

impl Homomorphism<ElementId> for FiniteHom {
    fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    fn image(&self, e: &ElementId) -> Result<ElementId> {
        self.map
            .get(*e)
            .copied()
            .ok_or_else(|| Error::contract(format!("element id {e} out of range")))
    }
}

/// Checks `ℓ_C(φ(h)) ≤ ℓ_G(h)` (or `=` when isometric) on a finite check set.
/// Isometric mode also verifies injectivity there rather than assuming it.
pub fn check_metric_hom<E: Clone + Eq + Hash + Debug, T: NormValue>(
    hom: &dyn Homomorphism<E>,
    check_set: &[(E, T)],
    target: &NormTable<T>,
    isometric: bool,
) -> Result<WitnessReport> {
    same_group(target, hom.target())?;
    let mut report = WitnessReport::new();
    report.param("isometric", isometric);
    let mut first: HashMap<ElementId, usize> = HashMap::new();
    for (i, (e, norm)) in check_set.iter().enumerate() {
        let img = hom.image(e)?;
        let v = target.value(img);
        let ok = if isometric { v == norm } else { v <= norm };
        if !ok {
            report.violate(
                if isometric { "isometry" } else { "norm-inequality" },
                [format!("{e:?}")],
                format!("{} vs {}", v.to_ratio_string(), norm.to_ratio_string()),
            );
        }
        if isometric {
            match first.get(&img) {
                Some(&j) if check_set[j].0 != *e => {
                    report.violate(
                        "injectivity",
                        [format!("{:?}", check_set[j].0), format!("{e:?}")],
                        target.group().element(img),
                    );
                }
                Some(_) => {}
                None => {
                    first.insert(img, i);
                }
            }
        }
    }
    Ok(report.finish())
}

fn threshold_symbol<T: PartialOrd>(v: &T, q: &T) -> [bool; 3] {
    [v < q, v > q, v == q]
}

const SYMBOLS: [&str; 3] = ["<", ">", "="];

/// Checks injectivity, exact multiplicativity on triples, and that every
/// comparison of a norm against a threshold is preserved.
///
/// When every source norm on the domain is itself a threshold the threshold
/// clauses reduce to `ℓ_G(g) = ℓ_C(φ(g))`; that equality is checked directly
/// and a failure is reported at `q = ℓ_G(g)` with symbol `=`.
pub fn check_almost_hom<S: SourceGroup, T: NormValue>(
    source: &S,
    map: &PartialMap<S::Elem, T>,
    q: &ThresholdSet<T>,
    target: &NormTable<T>,
) -> Result<WitnessReport> {
    let fast = map.source_norms.iter().all(|v| q.contains(v));
    almost_hom(source, map, q, target, fast)
}

/// [`check_almost_hom`] with the fast path forced on or off.
pub fn check_almost_hom_with<S: SourceGroup, T: NormValue>(
    source: &S,
    map: &PartialMap<S::Elem, T>,
    q: &ThresholdSet<T>,
    target: &NormTable<T>,
    fast_path: bool,
) -> Result<WitnessReport> {
    if fast_path && !map.source_norms.iter().all(|v| q.contains(v)) {
        return Err(Error::contract("fast path needs every source norm in the threshold set"));
    }
    almost_hom(source, map, q, target, fast_path)
}

fn almost_hom<S: SourceGroup, T: NormValue>(
    source: &S,
    map: &PartialMap<S::Elem, T>,
    q: &ThresholdSet<T>,
    target: &NormTable<T>,
    fast: bool,
) -> Result<WitnessReport> {
    let group = target.group();
    map.check_target(group)?;
    let mut report = WitnessReport::new();
    report.param("thresholds", q);
    let d = |i: usize| source.describe(&map.domain[i]);
    for (i, j) in map.collisions() {
        report.violate("injectivity", [d(i), d(j)], group.element(map.images[i]));
    }
    let im = &map.images;
    for (i, j, k) in map.triples(source)? {
        let prod = group.mul(im[i], im[j]);
        if prod != im[k] {
            report.violate("multiplicativity", [d(i), d(j), d(k)], group.element(prod));
        }
    }
    for i in 0..map.len() {
        let l1 = &map.source_norms[i];
        let l2 = target.value(im[i]);
        if fast {
            if l1 != l2 {
                report.violate(
                    "threshold",
                    [d(i), l1.to_ratio_string(), "=".to_string()],
                    format!("{} vs {}", l1.to_ratio_string(), l2.to_ratio_string()),
                );
            }
            continue;
        }
        for qv in q.values() {
            let a = threshold_symbol(l1, qv);
            let b = threshold_symbol(l2, qv);
            for s in 0..3 {
                if a[s] != b[s] {
                    report.violate(
                        "threshold",
                        [d(i), qv.to_ratio_string(), SYMBOLS[s].to_string()],
                        format!("{} vs {}", l1.to_ratio_string(), l2.to_ratio_string()),
                    );
                }
            }
        }
    }
    if fast {
        report.note("all source norms are thresholds: checked norm equality directly");
    }
    Ok(report.finish())
}

/// Which flavor of [`check_lef_witness`] to run.
pub struct LefOptions<'a, E, T> {
    /// Require the map to be the restriction of this homomorphism.
    pub extension: Option<&'a dyn Homomorphism<E>>,
    /// Elements that must die under the extension (relators of the source).
    pub relators: &'a [E],
    /// Metric flavor: elements with upper bounds on their source norm at
    /// which the extension must not increase the norm. Certifying the
    /// generators with bound 1 certifies the whole group.
    pub metric_check: Option<&'a [(E, T)]>,
    /// Relax the norm clause to `ℓ_C(φ(g)) ≤ ℓ_G(g)`.
    pub weak_inequality: bool,
}

impl<E, T> Default for LefOptions<'_, E, T> {
    fn default() -> Self {
        LefOptions {
            extension: None,
            relators: &[],
            metric_check: None,
            weak_inequality: false,
        }
    }
}

/// Composite check for metric LEF (no extension) or metric RF (with an
/// extension, optionally in the metric flavor) witnesses.
pub fn check_lef_witness<S: SourceGroup, T: NormValue>(
    source: &S,
    map: &PartialMap<S::Elem, T>,
    q: &ThresholdSet<T>,
    target: &NormTable<T>,
    options: &LefOptions<'_, S::Elem, T>,
) -> Result<WitnessReport> {
    let mut report = if options.weak_inequality {
        weak_lef(source, map, target)?
    } else {
        check_almost_hom(source, map, q, target)?
    };
    report.param("hom_required", options.extension.is_some());
    report.param("weak_inequality", options.weak_inequality);
    match (options.extension, options.metric_check) {
        (None, Some(_)) => return Err(Error::contract("the metric flavor needs an extension homomorphism")),
        (None, None) => {}
        (Some(hom), metric) => {
            same_group(target, hom.target())?;
            let mut ext = WitnessReport::new();
            for (i, e) in map.domain.iter().enumerate() {
                let img = hom.image(e)?;
                if img != map.images[i] {
                    ext.violate("extension", [source.describe(e)], target.group().element(img));
                }
            }
            for r in options.relators {
                let img = hom.image(r)?;
                if img != target.group().identity() {
                    ext.violate("relator", [source.describe(r)], target.group().element(img));
                }
            }
            report.absorb("", ext);
            if let Some(check) = metric {
                let mut with_domain: Vec<(S::Elem, T)> = check.to_vec();
                with_domain.extend(map.domain.iter().cloned().zip(map.source_norms.iter().cloned()));
                let m = check_metric_hom(hom, &with_domain, target, false)?;
                report.absorb("metric-", m);
            }
        }
    }
    Ok(report.finish())
}

fn weak_lef<S: SourceGroup, T: NormValue>(
    source: &S,
    map: &PartialMap<S::Elem, T>,
    target: &NormTable<T>,
) -> Result<WitnessReport> {
    let group = target.group();
    map.check_target(group)?;
    let mut report = WitnessReport::new();
    let d = |i: usize| source.describe(&map.domain[i]);
    for (i, j) in map.collisions() {
        report.violate("injectivity", [d(i), d(j)], group.element(map.images[i]));
    }
    for (i, j, k) in map.triples(source)? {
        let prod = group.mul(map.images[i], map.images[j]);
        if prod != map.images[k] {
            report.violate("multiplicativity", [d(i), d(j), d(k)], group.element(prod));
        }
    }
    for i in 0..map.len() {
        let v = target.value(map.images[i]);
        if *v > map.source_norms[i] {
            report.violate(
                "weak-norm",
                [d(i)],
                format!("{} > {}", v.to_ratio_string(), map.source_norms[i].to_ratio_string()),
            );
        }
    }
    Ok(report)
}

/// Output of [`build_lef_witness`].
#[derive(Clone)]
pub struct LefWitness<T> {
    /// Conjugation-invariant word norm on the image group, generated by the
    /// images of the presentation's generating set.
    pub norm: NormTable<T>,
    pub map: PartialMap<ReducedWord, T>,
    pub report: WitnessReport,
}

/// Builds the candidate metric RF witness induced by a finite quotient and checks it.
///
/// `domain` pairs each word with its norm in `F/N`; distinctness modulo `N`
/// is the caller's claim. Entries colliding in the quotient are reported as
/// an injectivity failure.
pub fn build_lef_witness<T: NormValue>(
    presentation: &Presentation,
    domain: &[(ReducedWord, T)],
    q: &ThresholdSet<T>,
    spec: &QuotientSpec,
) -> Result<LefWitness<T>> {
    if spec.rank() != presentation.rank() {
        return Err(Error::RankMismatch {
            left: presentation.rank(),
            right: spec.rank(),
        });
    }
    for r in &presentation.relators {
        if spec.apply_word(r)? != 0 {
            return Err(Error::contract(format!("the quotient does not kill relator {r}")));
        }
    }
    let group = spec.group();
    let gens: ElementSet = spec.image_set(presentation.generators.iter())?;
    let norm: NormTable<T> = word_norm(group, &gens, Closure::Conjugacy, Padding::Pad)?;
    let images = domain.iter().map(|(w, _)| spec.apply_word(w)).collect::<Result<Vec<_>>>()?;
    let map = PartialMap::new(
        domain.iter().map(|(w, _)| w.clone()).collect(),
        images,
        domain.iter().map(|(_, v)| v.clone()).collect(),
    )?;
    let generator_bounds: Vec<(ReducedWord, T)> =
        presentation.generators.iter().map(|s| (s.clone(), T::one())).collect();
    let options = LefOptions {
        extension: Some(spec as &dyn Homomorphism<ReducedWord>),
        relators: &presentation.relators,
        metric_check: Some(&generator_bounds),
        weak_inequality: false,
    };
    let source = FreeSource {
        rank: presentation.rank(),
    };
    let mut report = check_lef_witness(&source, &map, q, &norm, &options)?;
    report.param("target_order", group.order());
    Ok(LefWitness { norm, map, report })
}

/// Measurements from [`stability_extend`].
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityOutcome<T> {
    /// Least `k` with the domain inside the free ball of radius `k`.
    pub radius: usize,
    /// Number of basis elements the domain uses.
    pub basis_segment: usize,
    pub bound: T,
    /// Per-entry `|‖v‖ − ℓ_C(ψ(v))|`, absent where no exact norm was supplied.
    pub defects: Vec<Option<T>>,
    pub max_defect: Option<T>,
    pub report: WitnessReport,
}

/// Extends basis images to the homomorphism `ψ` on the free group and
/// measures `|‖v‖ − ℓ_C(ψ(v))|` against the bound `3kε` on the domain.
///
/// An entry passes when its defect is below the bound, or when both are 0
/// (the `ε = 0` and `v = 1` cases). The bound is only guaranteed when the
/// domain is closed under subwords and contains the identity and the basis
/// letters it uses; the report notes whether that holds.
pub fn stability_extend<T: NormValue>(
    basis_images: &[ElementId],
    domain: &[(ReducedWord, Option<T>)],
    target: &NormTable<T>,
    eps: &T,
) -> Result<StabilityOutcome<T>> {
    if *eps < T::zero() {
        return Err(Error::contract("ε must be non-negative"));
    }
    let group = target.group();
    if basis_images.iter().any(|&g| g >= group.order()) {
        return Err(Error::contract("basis image out of range"));
    }
    let rank = domain.first().map(|(w, _)| w.rank());
    if let Some(rank) = rank {
        if let Some((w, _)) = domain.iter().find(|(w, _)| w.rank() != rank) {
            return Err(Error::RankMismatch {
                left: rank,
                right: w.rank(),
            });
        }
    }
    let radius = domain.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
    let segment = domain.iter().map(|(w, _)| w.support()).max().unwrap_or(0);
    if segment > basis_images.len() {
        return Err(Error::contract(format!(
            "domain uses {segment} basis elements but only {} images were given",
            basis_images.len()
        )));
    }
    let psi = |w: &ReducedWord| -> ElementId {
        w.letters().iter().fold(group.identity(), |acc, &l| {
            let img = basis_images[(l.unsigned_abs() - 1) as usize];
            if l > 0 {
                group.mul(acc, img)
            } else {
                group.mul(acc, group.inv(img))
            }
        })
    };
    let three_k = T::from_count(3 * radius);
    let bound = three_k * eps.clone();

    let mut report = WitnessReport::new();
    report
        .param("epsilon", eps.to_ratio_string())
        .param("k", radius)
        .param("basis_segment", segment)
        .param("bound", bound.to_ratio_string());
    report.note("k is the least radius of a free-length ball around 1 containing the domain");

    let images: Vec<ElementId> = domain.iter().map(|(w, _)| psi(w)).collect();
    let index: HashMap<&ReducedWord, usize> = domain.iter().enumerate().map(|(i, (w, _))| (w, i)).collect();
    for (i, (a, _)) in domain.iter().enumerate() {
        for (j, (b, _)) in domain.iter().enumerate() {
            if let Some(&k) = index.get(&a.mul(b)?) {
                if group.mul(images[i], images[j]) != images[k] {
                    report.violate("multiplicativity", [a.to_string(), b.to_string()], group.element(images[k]));
                }
            }
        }
    }

    let mut defects = Vec::with_capacity(domain.len());
    let mut max_defect: Option<T> = None;
    let mut missing = 0;
    for (i, (w, norm)) in domain.iter().enumerate() {
        let Some(norm) = norm else {
            missing += 1;
            defects.push(None);
            continue;
        };
        let defect = norm.abs_diff(target.value(images[i]));
        let ok = defect < bound || (bound.is_zero() && defect.is_zero());
        if !ok {
            report.violate(
                "stability-bound",
                [w.to_string()],
                format!("{} vs {}", defect.to_ratio_string(), bound.to_ratio_string()),
            );
        }
        if max_defect.as_ref().map_or(true, |m| defect > *m) {
            max_defect = Some(defect.clone());
        }
        defects.push(Some(defect));
    }
    if let Some(m) = &max_defect {
        report.param("max_defect", m.to_ratio_string());
    }
    if !subword_closed(domain, segment) {
        report.note("domain is not closed under subwords with 1 and the used basis; the 3kε bound is not guaranteed");
    }
    if missing > 0 {
        report.inconclusive(format!("{missing} domain entries have no exact norm value"));
    }
    Ok(StabilityOutcome {
        radius,
        basis_segment: segment,
        bound,
        defects,
        max_defect,
        report: report.finish(),
    })
}

fn subword_closed<T>(domain: &[(ReducedWord, Option<T>)], segment: usize) -> bool {
    let Some(rank) = domain.first().map(|(w, _)| w.rank()) else {
        return true;
    };
    let words: std::collections::HashSet<&ReducedWord> = domain.iter().map(|(w, _)| w).collect();
    let has = |w: &ReducedWord| words.contains(w);
    if !has(&ReducedWord::identity(rank)) {
        return false;
    }
    for i in 0..segment {
        match ReducedWord::generator(rank, i) {
            Ok(x) if has(&x) => {}
            _ => return false,
        }
    }
    domain.iter().all(|(w, _)| w.subwords().iter().all(has))
}
