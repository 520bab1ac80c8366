//! Norm tables on finite groups and the constructions that produce them.

mod chain;
mod derived;
mod word;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{ElementId, ElementSet, FiniteGroup};
use crate::report::WitnessReport;
use crate::scalar::{parse_rational, NormValue};

pub use chain::{chain_norm, ChainValue, QuotientChain};
pub use derived::{quotient_norm, restrict_norm, round_norm, QuotientNorm, RestrictedNorm};
pub use word::{is_word_norm, weighted_word_norm, word_norm, Closure, Padding, WeightedGenSet};

/// The value set a norm is allowed to take.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueDomain<T> {
    NonNegative,
    Naturals,
    /// `[0, c]`
    Interval(T),
}

impl<T: NormValue> ValueDomain<T> {
    pub fn contains(&self, v: &T) -> bool {
        if *v < T::zero() {
            return false;
        }
        match self {
            ValueDomain::NonNegative => true,
            ValueDomain::Naturals => v.is_integral(),
            ValueDomain::Interval(c) => v <= c,
        }
    }
}

/// A total map from element ids to norm values.
#[derive(Clone)]
pub struct NormTable<T> {
    group: Arc<FiniteGroup>,
    values: Vec<T>,
    domain: ValueDomain<T>,
}

impl<T: NormValue> fmt::Debug for NormTable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NormTable")
            .field("order", &self.group.order())
            .field("values", &self.values)
            .field("domain", &self.domain)
            .finish()
    }
}

/// Which axioms `validate_norm` enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Pseudo,
    Norm,
}

const MAX_REPORTED_PER_CONDITION: usize = 16;

impl<T: NormValue> NormTable<T> {
    pub fn new(group: &Arc<FiniteGroup>, values: Vec<T>, domain: ValueDomain<T>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::contract(format!(
                "norm table has {} values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        Ok(NormTable {
            group: Arc::clone(group),
            values,
            domain,
        })
    }

    pub fn from_fn(group: &Arc<FiniteGroup>, domain: ValueDomain<T>, f: impl FnMut(ElementId) -> T) -> Self {
        NormTable {
            group: Arc::clone(group),
            values: (0..group.order()).map(f).collect(),
            domain,
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, g: ElementId) -> &T {
        &self.values[g]
    }

    pub fn domain(&self) -> &ValueDomain<T> {
        &self.domain
    }

    pub fn with_domain(mut self, domain: ValueDomain<T>) -> Self {
        self.domain = domain;
        self
    }

    pub fn max_value(&self) -> T {
        self.values
            .iter()
            .cloned()
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|v| v.is_integral())
    }

    /// Induced distance `d(g, h) = ℓ(g h^{-1})`.
    pub fn distance(&self, g: ElementId, h: ElementId) -> &T {
        &self.values[self.group.mul(g, self.group.inv(h))]
    }

    /// `B_r(g) = {h : d(h, g) ≤ r}`, or the strict ball `B_{<r}(g)`.
    pub fn ball(&self, radius: &T, center: ElementId, strict: bool) -> ElementSet {
        let mut out = ElementSet::empty(&self.group);
        for h in 0..self.group.order() {
            let d = self.distance(h, center);
            if (strict && d < radius) || (!strict && d <= radius) {
                out.insert(h);
            }
        }
        out
    }

    fn describe(&self, g: ElementId) -> String {
        self.group.element(g).to_string()
    }

    /// Two-column text: `<permutation>\t<p/q>`, one line per element id.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (g, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{}\t{}\n", self.describe(g), v.to_ratio_string()));
        }
        out
    }

    /// Reads the two-column format; the first column is an element id or a
    /// permutation in cycle notation.
    pub fn parse_text(group: &Arc<FiniteGroup>, text: &str, domain: ValueDomain<T>) -> Result<Self> {
        let mut values: Vec<Option<T>> = vec![None; group.order()];
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |column: usize, message: String| Error::Parse {
                line: idx + 1,
                column,
                message,
            };
            let split = line
                .rfind(|c: char| c.is_whitespace())
                .ok_or_else(|| perr(1, "expected two columns".into()))?;
            let (key, val) = (line[..split].trim(), line[split..].trim());
            let id = if key.starts_with('(') {
                let p = crate::perm::Perm::parse_cycles(key, group.degree())
                    .map_err(|e| perr(1, e.to_string()))?;
                group
                    .id_of(&p)
                    .ok_or_else(|| perr(1, format!("{p} is not a group element")))?
            } else {
                key.parse::<usize>()
                    .ok()
                    .filter(|&i| i < group.order())
                    .ok_or_else(|| perr(1, format!("bad element id `{key}`")))?
            };
            let r = parse_rational(val).ok_or_else(|| perr(split + 2, format!("bad value `{val}`")))?;
            let v = T::from_rational(&r)
                .ok_or_else(|| perr(split + 2, format!("value `{val}` not representable")))?;
            if values[id].is_some() {
                return Err(perr(1, format!("element {key} listed twice")));
            }
            values[id] = Some(v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(g, v)| v.ok_or_else(|| Error::contract(format!("no value for element {g}"))))
            .collect::<Result<Vec<_>>>()?;
        NormTable::new(group, values, domain)
    }
}

/// Exhaustively checks the (pseudo-)norm axioms and, optionally, conjugation invariance.
pub fn validate_norm<T: NormValue>(t: &NormTable<T>, kind: NormKind, require_invariant: bool) -> WitnessReport {
    let g = &t.group;
    let n = g.order();
    let mut report = WitnessReport::new();
    report.param("kind", match kind {
        NormKind::Pseudo => "pseudo-norm",
        NormKind::Norm => "norm",
    });
    report.param("invariant", require_invariant);
    let mut counts = std::collections::BTreeMap::<&'static str, usize>::new();
    let mut record = |report: &mut WitnessReport, tag: &'static str, subjects: Vec<String>, measured: String| {
        let c = counts.entry(tag).or_insert(0);
        *c += 1;
        if *c <= MAX_REPORTED_PER_CONDITION {
            report.violate(tag, subjects, measured);
        }
    };

    for (x, v) in t.values.iter().enumerate() {
        if !t.domain.contains(v) {
            record(&mut report, "domain", vec![t.describe(x)], v.to_ratio_string());
        }
    }
    if !t.values[0].is_zero() {
        record(&mut report, "identity", vec![t.describe(0)], t.values[0].to_ratio_string());
    }
    if kind == NormKind::Norm {
        for x in 1..n {
            if t.values[x].is_zero() {
                record(&mut report, "definiteness", vec![t.describe(x)], "0/1".into());
            }
        }
    }
    for x in 0..n {
        let xi = g.inv(x);
        if x < xi && t.values[x] != t.values[xi] {
            record(
                &mut report,
                "symmetry",
                vec![t.describe(x), t.describe(xi)],
                format!("{} vs {}", t.values[x].to_ratio_string(), t.values[xi].to_ratio_string()),
            );
        }
    }
    for x in 0..n {
        for y in 0..n {
            let xy = g.mul(x, y);
            let bound = t.values[x].clone() + t.values[y].clone();
            if t.values[xy] > bound {
                record(
                    &mut report,
                    "triangle",
                    vec![t.describe(x), t.describe(y)],
                    format!("{} > {}", t.values[xy].to_ratio_string(), bound.to_ratio_string()),
                );
            }
        }
    }
    if require_invariant {
        for x in 0..n {
            for (k, &s) in g.generator_ids().iter().enumerate() {
                let c = g.mul_gen(g.mul(g.inv(s), x), k);
                if t.values[c] != t.values[x] {
                    record(
                        &mut report,
                        "invariance",
                        vec![t.describe(x), t.describe(s)],
                        format!("{} vs {}", t.values[c].to_ratio_string(), t.values[x].to_ratio_string()),
                    );
                }
            }
        }
    }
    for (tag, c) in counts {
        if c > MAX_REPORTED_PER_CONDITION {
            report.note(format!("{tag}: {c} violations in total, first {MAX_REPORTED_PER_CONDITION} listed"));
        }
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;
    use crate::scalar::Rational;

    fn cyclic(n: usize) -> Arc<FiniteGroup> {
        FiniteGroup::enumerate(&[Perm::cycle_on_block(n, 0, n).unwrap()], 1000).unwrap()
    }

    #[test]
    fn degenerate_zero_fails_definiteness() {
        let c3 = cyclic(3);
        let t = NormTable::new(&c3, vec![0i64, 0, 0], ValueDomain::Naturals).unwrap();
        let r = validate_norm(&t, NormKind::Norm, true);
        assert!(!r.passed());
        assert!(r.has_violation("definiteness"));
        assert!(validate_norm(&t, NormKind::Pseudo, true).passed());
    }

    #[test]
    fn asymmetric_table_fails_symmetry() {
        let c3 = cyclic(3);
        // ids: 0 = e, 1 = g, 2 = g^2 = g^{-1}
        let t = NormTable::new(&c3, vec![0i64, 1, 2], ValueDomain::Naturals).unwrap();
        let r = validate_norm(&t, NormKind::Norm, false);
        assert!(r.has_violation("symmetry"), "{r}");
    }

    #[test]
    fn triangle_and_domain_violations() {
        let c4 = cyclic(4);
        let g = c4.generator_ids()[0];
        let g2 = c4.pow(g, 2);
        let mut vals = vec![Rational::from_integer(1); 4];
        vals[0] = Rational::from_integer(0);
        vals[g2] = Rational::from_integer(5);
        let t = NormTable::new(&c4, vals, ValueDomain::Interval(Rational::from_integer(4))).unwrap();
        let r = validate_norm(&t, NormKind::Norm, true);
        assert!(r.has_violation("triangle"));
        assert!(r.has_violation("domain"));
    }

    #[test]
    fn text_round_trip() {
        let c3 = cyclic(3);
        let t = NormTable::new(
            &c3,
            vec![Rational::from_integer(0), Rational::new(1, 2), Rational::new(1, 2)],
            ValueDomain::NonNegative,
        )
        .unwrap();
        let text = t.to_text();
        assert!(text.contains("1/2"));
        let back = NormTable::<Rational>::parse_text(&c3, &text, ValueDomain::NonNegative).unwrap();
        assert_eq!(back.values(), t.values());
        let by_id = NormTable::<Rational>::parse_text(&c3, "0 0\n1 1/2\n2 1/2\n", ValueDomain::NonNegative).unwrap();
        assert_eq!(by_id.values(), t.values());
        assert!(NormTable::<Rational>::parse_text(&c3, "0 0\n", ValueDomain::NonNegative).is_err());
        assert!(matches!(
            NormTable::<Rational>::parse_text(&c3, "0 0\n9 1\n", ValueDomain::NonNegative),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn balls() {
        let c6 = cyclic(6);
        let g = c6.generator_ids()[0];
        let vals: Vec<i64> = (0..6)
            .map(|x| {
                let k = (0..6).find(|&k| c6.pow(g, k) == x).unwrap();
                k.min(6 - k)
            })
            .collect();
        let t = NormTable::new(&c6, vals, ValueDomain::Naturals).unwrap();
        assert_eq!(t.ball(&0, 0, false).len(), 1);
        assert_eq!(t.ball(&1, 0, false).len(), 3);
        assert_eq!(t.ball(&1, 0, true).len(), 1);
        assert_eq!(t.ball(&3, 0, false).len(), 6);
        // translation: B_r(h) = h·B_r(1) for an invariant norm
        for h in 0..6 {
            assert_eq!(t.ball(&1, h, false), t.ball(&1, 0, false).left_translate(h));
        }
    }
}
