//! TOML input files and their conversion into validated library objects.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use wordnorm::norms::{weighted_word_norm, word_norm, Closure, NormTable, Padding, WeightedGenSet};
use wordnorm::probe::{ClassWord, KernelWord};
use wordnorm::scalar::parse_rational;
use wordnorm::{ElementSet, FiniteGroup, Perm, Presentation, QuotientSpec, Rational, ReducedWord, RelatorFactor};
use wordnorm::{SymmetricWordSet, ThresholdSet};

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Parses TOML, reporting the line and column of any error.
pub fn parse_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_file(path)?;
    toml::from_str(&text).map_err(|e| {
        let (line, column) = match e.span() {
            Some(span) => line_column(&text, span.start),
            None => (0, 0),
        };
        anyhow!("{}:{line}:{column}: {}", path.display(), e.message())
    })
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// A permutation written in cycle notation, `"(0 1)(2 3)"`, or as an image list, `"[1, 0, 3, 2]"`.
pub fn parse_perm(text: &str, degree: usize) -> Result<Perm> {
    let t = text.trim();
    parse_perm_inner(t, degree).with_context(|| format!("in permutation `{t}`"))
}

fn parse_perm_inner(t: &str, degree: usize) -> Result<Perm> {
    if let Some(body) = t.strip_prefix('[') {
        let body = body.strip_suffix(']').ok_or_else(|| anyhow!("unterminated image list `{t}`"))?;
        let images = body
            .split([',', ' '])
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u32>().map_err(|_| anyhow!("bad image point `{s}` in `{t}`")))
            .collect::<Result<Vec<_>>>()?;
        if images.len() != degree {
            bail!("image list `{t}` has {} points, expected degree {degree}", images.len());
        }
        return Ok(Perm::from_images(images)?);
    }
    Ok(Perm::parse_cycles(t, degree)?)
}

pub fn parse_perms(texts: &[String], degree: usize) -> Result<Vec<Perm>> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| parse_perm(t, degree).with_context(|| format!("entry {}", i + 1)))
        .collect()
}

pub fn parse_value(text: &str) -> Result<Rational> {
    parse_rational(text.trim()).ok_or_else(|| anyhow!("`{text}` is not a rational number"))
}

pub fn parse_word(text: &str, rank: usize) -> Result<ReducedWord> {
    ReducedWord::parse(text, rank).with_context(|| format!("in word `{text}`"))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSection {
    /// Generating set; inverses are added.
    pub set: Vec<String>,
    /// Per-generator weights for a weighted word norm.
    pub weights: Option<Vec<String>>,
    #[serde(default = "conjugacy")]
    pub closure: String,
    #[serde(default = "forbid")]
    pub padding: String,
}

fn conjugacy() -> String {
    "conjugacy".into()
}

fn forbid() -> String {
    "forbid".into()
}

impl NormSection {
    pub fn build(&self, group: &Arc<FiniteGroup>) -> Result<NormTable<Rational>> {
        let closure = match self.closure.as_str() {
            "conjugacy" => Closure::Conjugacy,
            "plain" => Closure::Plain,
            other => bail!("closure must be `conjugacy` or `plain`, got `{other}`"),
        };
        let padding = match self.padding.as_str() {
            "forbid" => Padding::Forbid,
            "pad" => Padding::Pad,
            other => bail!("padding must be `forbid` or `pad`, got `{other}`"),
        };
        let perms = parse_perms(&self.set, group.degree())?;
        match &self.weights {
            None => {
                let set = ElementSet::from_perms(group, &perms)?;
                Ok(word_norm(group, &set, closure, padding)?)
            }
            Some(weights) => {
                if weights.len() != perms.len() {
                    bail!("{} weights for {} generators", weights.len(), perms.len());
                }
                let mut entries = Vec::new();
                for (p, w) in perms.iter().zip(weights) {
                    let id = group.id_of(p).ok_or_else(|| anyhow!("{p} is not in the group"))?;
                    entries.push((id, parse_value(w)?));
                }
                let gens = WeightedGenSet::symmetrize(group, entries)?;
                Ok(weighted_word_norm(&gens, closure, padding)?)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub degree: usize,
    pub generators: Vec<String>,
}

impl GroupSection {
    pub fn build(&self, cap: usize) -> Result<Arc<FiniteGroup>> {
        Ok(FiniteGroup::enumerate(&parse_perms(&self.generators, self.degree)?, cap)?)
    }
}

/// A finite group with an optional norm and subgroups to act on it.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub degree: usize,
    pub generators: Vec<String>,
    pub norm: Option<NormSection>,
    /// Normal subgroup, given by elements whose normal closure it is.
    pub normal: Option<Vec<String>>,
}

impl GroupFile {
    pub fn group(&self, cap: usize) -> Result<Arc<FiniteGroup>> {
        Ok(FiniteGroup::enumerate(&parse_perms(&self.generators, self.degree)?, cap)?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecSection {
    pub degree: usize,
    pub images: Vec<String>,
}

impl SpecSection {
    pub fn build(&self, cap: usize) -> Result<QuotientSpec> {
        Ok(QuotientSpec::with_cap(parse_perms(&self.images, self.degree)?, cap)?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub p: u64,
    pub levels: Vec<SpecSection>,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSection {
    pub relator: usize,
    #[serde(default)]
    pub inverse: bool,
    #[serde(default)]
    pub conjugator: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelWordSection {
    pub word: String,
    pub factors: Vec<FactorSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassWordSection {
    pub word: String,
    pub generator: String,
    #[serde(default)]
    pub conjugator: String,
    #[serde(default)]
    pub kernel: Vec<FactorSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainEntry {
    pub word: String,
    pub norm: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogSection {
    /// `[lo, hi]`: the specs `(Z/n)^rank` for `lo ≤ n ≤ hi`.
    pub cyclic: Option<[usize; 2]>,
    #[serde(default)]
    pub specs: Vec<SpecSection>,
    /// Homomorphisms into these groups that kill the relators.
    #[serde(default)]
    pub groups: Vec<GroupSection>,
    #[serde(default = "default_catalog_budget")]
    pub budget: usize,
}

fn default_catalog_budget() -> usize {
    100_000
}

/// Problems over `F/N`: probes, searches, free-norm estimates and LEF witnesses.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub rank: usize,
    /// Words generating the norm; the free basis when absent.
    pub generators: Option<Vec<String>>,
    #[serde(default)]
    pub relators: Vec<String>,
    pub w: Option<String>,
    pub m: Option<usize>,
    #[serde(default)]
    pub words: Vec<String>,
    #[serde(default)]
    pub domain: Vec<DomainEntry>,
    pub thresholds: Option<Vec<String>>,
    #[serde(default)]
    pub kernel_words: Vec<KernelWordSection>,
    #[serde(default)]
    pub class_words: Vec<ClassWordSection>,
    pub quotient: Option<SpecSection>,
    #[serde(default)]
    pub probes: Vec<SpecSection>,
    pub catalog: Option<CatalogSection>,
}

fn factors(sections: &[FactorSection], rank: usize) -> Result<Vec<RelatorFactor>> {
    sections
        .iter()
        .map(|f| {
            Ok(RelatorFactor {
                relator: f.relator,
                inverse: f.inverse,
                conjugator: parse_word(&f.conjugator, rank)?,
            })
        })
        .collect()
}

impl ProblemFile {
    pub fn presentation(&self) -> Result<Presentation> {
        let generators = match &self.generators {
            None => SymmetricWordSet::free_basis(self.rank),
            Some(ws) => {
                let words = ws.iter().map(|w| parse_word(w, self.rank)).collect::<Result<Vec<_>>>()?;
                SymmetricWordSet::symmetrize(self.rank, words)?
            }
        };
        let relators = self
            .relators
            .iter()
            .map(|r| parse_word(r, self.rank))
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation::new(generators, relators)?)
    }

    pub fn target_word(&self) -> Result<ReducedWord> {
        let w = self.w.as_ref().ok_or_else(|| anyhow!("the problem needs `w`"))?;
        parse_word(w, self.rank)
    }

    pub fn radius(&self) -> Result<usize> {
        self.m.ok_or_else(|| anyhow!("the problem needs `m`"))
    }

    pub fn kernel_words(&self) -> Result<Vec<KernelWord>> {
        self.kernel_words
            .iter()
            .map(|k| {
                Ok(KernelWord {
                    word: parse_word(&k.word, self.rank)?,
                    factors: factors(&k.factors, self.rank)?,
                })
            })
            .collect()
    }

    pub fn class_words(&self) -> Result<Vec<ClassWord>> {
        self.class_words
            .iter()
            .map(|c| {
                Ok(ClassWord {
                    word: parse_word(&c.word, self.rank)?,
                    generator: parse_word(&c.generator, self.rank)?,
                    conjugator: parse_word(&c.conjugator, self.rank)?,
                    kernel: factors(&c.kernel, self.rank)?,
                })
            })
            .collect()
    }

    pub fn domain_words(&self) -> Result<Vec<ReducedWord>> {
        self.domain.iter().map(|d| parse_word(&d.word, self.rank)).collect()
    }

    /// Domain entries that must all carry a norm value.
    pub fn normed_domain(&self) -> Result<Vec<(ReducedWord, Rational)>> {
        self.domain
            .iter()
            .map(|d| {
                let norm = d
                    .norm
                    .as_ref()
                    .ok_or_else(|| anyhow!("domain entry `{}` needs a norm", d.word))?;
                Ok((parse_word(&d.word, self.rank)?, parse_value(norm)?))
            })
            .collect()
    }

    pub fn thresholds(&self) -> Result<ThresholdSet<Rational>> {
        let values = self.thresholds.as_ref().ok_or_else(|| anyhow!("the problem needs `thresholds`"))?;
        Ok(ThresholdSet::new(values.iter().map(|v| parse_value(v)).collect::<Result<Vec<_>>>()?)?)
    }

    pub fn quotient(&self, cap: usize) -> Result<QuotientSpec> {
        self.quotient
            .as_ref()
            .ok_or_else(|| anyhow!("the problem needs a [quotient] section"))?
            .build(cap)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    pub degree: usize,
    /// Generators of the target group; taken from the extension when absent.
    pub generators: Option<Vec<String>>,
    pub norm: NormSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessEntry {
    /// A word when the source is free, a permutation when it is finite.
    pub element: String,
    /// Target permutation; computed from the extension when absent.
    pub image: Option<String>,
    pub norm: Option<String>,
}

/// A candidate witness map with the definition to check it against.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    /// `mws`, `weak`, `almost-hom`, `lef`, `weak-lef`, `rf` or `stability`.
    pub kind: String,
    /// Rank of a free source.
    pub rank: Option<usize>,
    /// A finite source group instead.
    pub source: Option<GroupSection>,
    #[serde(default)]
    pub relators: Vec<String>,
    pub epsilon: Option<String>,
    pub r: Option<String>,
    pub thresholds: Option<Vec<String>>,
    pub target: TargetSection,
    /// Images of the free generators (`rf`) or the free basis (`stability`).
    pub extension: Option<Vec<String>>,
    /// Check the extension as a metric homomorphism (`rf` only).
    #[serde(default = "yes")]
    pub metric: bool,
    pub entries: Vec<WitnessEntry>,
}

fn yes() -> bool {
    true
}

impl WitnessFile {
    pub fn epsilon(&self) -> Result<Rational> {
        parse_value(self.epsilon.as_ref().ok_or_else(|| anyhow!("`{}` needs `epsilon`", self.kind))?)
    }

    pub fn thresholds(&self) -> Result<ThresholdSet<Rational>> {
        let values = self
            .thresholds
            .as_ref()
            .ok_or_else(|| anyhow!("`{}` needs `thresholds`", self.kind))?;
        Ok(ThresholdSet::new(values.iter().map(|v| parse_value(v)).collect::<Result<Vec<_>>>()?)?)
    }
}
