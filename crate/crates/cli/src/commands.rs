//! One function per subcommand. Each returns the text report, the JSON
//! records and the verdict class that decides the exit code.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Result};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use wordnorm::norms::{
    chain_norm, quotient_norm, round_norm, word_norm, ChainValue, Closure, NormTable, Padding, QuotientChain,
    ValueDomain,
};
use wordnorm::probe::{
    cyclic_power_catalog, find_lef_witness, homomorphism_catalog, ExhaustionReport, WitnessSearchOutcome,
};
use wordnorm::witness::Homomorphism;
use wordnorm::scalar::format_rational;
use wordnorm::{
    ball_image, build_lef_witness, check_almost_hom, check_lef_witness, check_mws_witness, closure_product_check,
    estimate_norm, lef_separation_check, quotient_search, separation_check_rf, stability_extend, validate_norm,
    ElementId, ElementSet, FiniteGroup, FreeSource, LefOptions, MwsMode, NormBound, NormKind, PartialMap, Perm,
    ProbeProblem, QuotientSpec, Rational, ReducedWord, SearchBudget, SearchGoal, SearchOutcome,
    SeparationCertificate, SeparationVerdict, Verdict, WitnessReport,
};

use crate::input::{
    parse_perm, parse_toml, parse_value, parse_word, read_file, ChainFile, GroupFile, ProblemFile, WitnessFile,
};

/// Verdict class; the exit code is its discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Negative = 1,
    Inconclusive = 2,
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Status::Success,
            Verdict::Fail => Status::Negative,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

impl From<SeparationVerdict> for Status {
    fn from(v: SeparationVerdict) -> Self {
        match v {
            SeparationVerdict::Separated => Status::Success,
            SeparationVerdict::Contained => Status::Negative,
            SeparationVerdict::Inconclusive => Status::Inconclusive,
        }
    }
}

pub struct Output {
    pub status: Status,
    pub text: String,
    pub records: Vec<Value>,
}

impl Output {
    fn new(status: Status) -> Self {
        Output {
            status,
            text: String::new(),
            records: Vec::new(),
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        if !s.as_ref().ends_with('\n') {
            self.text.push('\n');
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub cap_order: usize,
    pub budget: SearchBudget,
    pub seed: u64,
}

fn table_records(t: &NormTable<Rational>) -> Vec<Value> {
    (0..t.group().order())
        .map(|g| json!({"element": t.group().element(g).to_string(), "value": format_rational(t.value(g))}))
        .collect()
}

fn report_record(r: &WitnessReport) -> Value {
    json!({ "report": r })
}

fn load_table(gf: &GroupFile, group: &Arc<FiniteGroup>, table: Option<&Path>) -> Result<NormTable<Rational>> {
    match (table, &gf.norm) {
        (Some(path), _) => Ok(NormTable::parse_text(group, &read_file(path)?, ValueDomain::NonNegative)?),
        (None, Some(section)) => section.build(group),
        (None, None) => bail!("give a norm table with --table or a [norm] section"),
    }
}

fn table_output(t: &NormTable<Rational>, report: WitnessReport) -> Output {
    let mut out = Output::new(report.verdict.into());
    out.line(t.to_text());
    out.line(report.to_string());
    out.records = table_records(t);
    out.records.push(report_record(&report));
    out
}

pub fn norm(path: &Path, table: Option<&Path>, s: &Settings) -> Result<Output> {
    let gf: GroupFile = parse_toml(path)?;
    let group = gf.group(s.cap_order)?;
    let t = load_table(&gf, &group, table)?;
    Ok(table_output(&t, validate_norm(&t, NormKind::Norm, true)))
}

pub fn quotient(path: &Path, table: Option<&Path>, s: &Settings) -> Result<Output> {
    let gf: GroupFile = parse_toml(path)?;
    let group = gf.group(s.cap_order)?;
    let t = load_table(&gf, &group, table)?;
    let seeds = gf.normal.as_ref().ok_or_else(|| anyhow!("quotient-norm needs `normal`"))?;
    let perms = seeds.iter().map(|p| parse_perm(p, gf.degree)).collect::<Result<Vec<Perm>>>()?;
    let normal = group.normal_closure(&ElementSet::from_perms(&group, &perms)?)?;
    let q = quotient_norm(&t, &normal)?;
    let report = validate_norm(&q.table, NormKind::Norm, true);
    let mut out = Output::new(report.verdict.into());
    out.line(format!("normal subgroup order {}, quotient order {}", normal.len(), q.table.group().order()));
    for c in 0..q.table.group().order() {
        let rep = (0..group.order()).find(|&g| q.cosets.projection[g] == c).expect("onto");
        let value = format_rational(q.table.value(c));
        out.line(format!("{}N\t{}", group.element(rep), value));
        out.records.push(json!({"coset_rep": group.element(rep).to_string(), "value": value}));
    }
    out.line(report.to_string());
    out.records.push(report_record(&report));
    Ok(out)
}

pub fn round(path: &Path, table: Option<&Path>, s: &Settings) -> Result<Output> {
    let gf: GroupFile = parse_toml(path)?;
    let group = gf.group(s.cap_order)?;
    let t = load_table(&gf, &group, table)?;
    let r = round_norm(&t);
    Ok(table_output(&r, validate_norm(&r, NormKind::Norm, true)))
}

pub fn chain(path: &Path, s: &Settings) -> Result<Output> {
    let cf: ChainFile = parse_toml(path)?;
    let levels = cf.levels.iter().map(|l| l.build(s.cap_order)).collect::<Result<Vec<_>>>()?;
    let c = QuotientChain::new(levels, s.cap_order)?;
    let mut out = Output::new(Status::Success);
    for w in &cf.words {
        let word = parse_word(w, c.rank())?;
        let v: ChainValue<Rational> = chain_norm(&c, cf.p, &word)?;
        let level = v.level.map_or("none".to_string(), |l| l.to_string());
        out.line(format!("{word}\t{}\tlevel {level}", format_rational(&v.value)));
        if v.finite_depth_zero {
            out.line("  (in every listed kernel: 0 only at this finite depth)");
        }
        out.records.push(json!({
            "word": word.to_string(),
            "value": format_rational(&v.value),
            "level": v.level,
            "finite_depth_zero": v.finite_depth_zero,
        }));
    }
    Ok(out)
}

pub fn ball(path: &Path, s: &Settings) -> Result<Output> {
    let pf: ProblemFile = parse_toml(path)?;
    let p = pf.presentation()?;
    let spec = pf.quotient(s.cap_order)?;
    let m = pf.radius()?;
    let set = ball_image(&spec, &p, m)?;
    let mut out = Output::new(Status::Success);
    let members = set.to_perm_strings();
    out.line(format!("ball image of radius {m}: {} of {} elements", set.len(), spec.group().order()));
    out.line(members.join(" "));
    out.records.push(json!({"m": m, "size": set.len(), "order": spec.group().order(), "elements": members}));
    Ok(out)
}

fn bound_record(b: &NormBound) -> Value {
    let witness = serde_json::to_value(b.lower_witness).expect("serializable");
    let factors: Vec<Value> = b
        .certificate
        .iter()
        .flat_map(|c| c.factors.iter())
        .map(|f| json!({"generator": f.generator.to_string(), "conjugator": f.conjugator.to_string()}))
        .collect();
    let kernel: Vec<Value> = b
        .certificate
        .iter()
        .flat_map(|c| c.kernel.iter())
        .map(|k| json!({"relator": k.relator, "inverse": k.inverse, "conjugator": k.conjugator.to_string()}))
        .collect();
    json!({
        "word": b.word.to_string(),
        "lower": b.lower,
        "upper": b.upper,
        "exact": b.exact,
        "lower_witness": witness,
        "factors": factors,
        "kernel": kernel,
    })
}

pub fn estimate(path: &Path, s: &Settings) -> Result<Output> {
    let pf: ProblemFile = parse_toml(path)?;
    let p = pf.presentation()?;
    let probes = pf.probes.iter().map(|sp| sp.build(s.cap_order)).collect::<Result<Vec<_>>>()?;
    let mut words = pf.words.iter().map(|w| parse_word(w, pf.rank)).collect::<Result<Vec<_>>>()?;
    if let Some(w) = &pf.w {
        words.push(parse_word(w, pf.rank)?);
    }
    if words.is_empty() {
        bail!("give `words` or `w`");
    }
    let mut out = Output::new(Status::Success);
    for w in &words {
        let b = estimate_norm(w, &p, &probes, &s.budget)?;
        if !b.exact {
            out.status = Status::Inconclusive;
        }
        out.line(b.to_string());
        out.records.push(bound_record(&b));
    }
    Ok(out)
}

fn target_group(wf: &WitnessFile, s: &Settings) -> Result<(Arc<FiniteGroup>, Option<QuotientSpec>)> {
    let t = &wf.target;
    match (&t.generators, &wf.extension, wf.kind.as_str()) {
        (Some(_), Some(_), "rf") => bail!("with an extension the target group is its image; drop target.generators"),
        (None, Some(ext), "rf") => {
            let perms = ext.iter().map(|p| parse_perm(p, t.degree)).collect::<Result<Vec<_>>>()?;
            let spec = QuotientSpec::with_cap(perms, s.cap_order)?;
            Ok((Arc::clone(spec.group()), Some(spec)))
        }
        (Some(gens), _, _) => {
            let perms = gens.iter().map(|p| parse_perm(p, t.degree)).collect::<Result<Vec<_>>>()?;
            Ok((FiniteGroup::enumerate(&perms, s.cap_order)?, None))
        }
        (None, _, _) => bail!("target.generators is required for `{}`", wf.kind),
    }
}

fn element_id(group: &FiniteGroup, text: &str) -> Result<ElementId> {
    let p = parse_perm(text, group.degree())?;
    group.id_of(&p).ok_or_else(|| anyhow!("{p} is not in the target group"))
}

fn entry_norm(norm: &Option<String>, element: &str) -> Result<Rational> {
    parse_value(norm.as_ref().ok_or_else(|| anyhow!("entry `{element}` needs a norm"))?)
}

fn finish_witness(report: WitnessReport) -> Output {
    let mut out = Output::new(report.verdict.into());
    out.line(report.to_string());
    out.records.push(report_record(&report));
    out
}

pub fn check_witness(path: &Path, s: &Settings) -> Result<Output> {
    let wf: WitnessFile = parse_toml(path)?;
    let (group, spec) = target_group(&wf, s)?;
    let table = wf.target.norm.build(&group)?;
    let kind = wf.kind.as_str();

    if kind == "stability" {
        let rank = wf.rank.ok_or_else(|| anyhow!("stability needs the free `rank`"))?;
        let basis = wf.extension.as_ref().ok_or_else(|| anyhow!("stability needs basis images in `extension`"))?;
        let basis = basis.iter().map(|b| element_id(&group, b)).collect::<Result<Vec<_>>>()?;
        let domain = wf
            .entries
            .iter()
            .map(|e| Ok((parse_word(&e.element, rank)?, e.norm.as_deref().map(parse_value).transpose()?)))
            .collect::<Result<Vec<_>>>()?;
        let outcome = stability_extend(&basis, &domain, &table, &wf.epsilon()?)?;
        return Ok(finish_witness(outcome.report));
    }

    match (wf.rank, &wf.source) {
        (Some(rank), None) => {
            let source = FreeSource { rank };
            let mut words = Vec::new();
            let mut images = Vec::new();
            let mut norms = Vec::new();
            for e in &wf.entries {
                let w = parse_word(&e.element, rank)?;
                let img = match (&e.image, &spec) {
                    (Some(i), _) => element_id(&group, i)?,
                    (None, Some(spec)) => spec.apply_word(&w)?,
                    (None, None) => bail!("entry `{}` needs an image", e.element),
                };
                norms.push(entry_norm(&e.norm, &e.element)?);
                words.push(w);
                images.push(img);
            }
            let map = PartialMap::new(words, images, norms)?;
            let relators = wf.relators.iter().map(|r| parse_word(r, rank)).collect::<Result<Vec<_>>>()?;
            let bounds: Vec<(ReducedWord, Rational)> = (0..rank)
                .flat_map(|i| {
                    let x = ReducedWord::generator(rank, i).expect("in range");
                    [x.inverse(), x]
                })
                .map(|x| (x, Rational::from_integer(1)))
                .collect();
            run_kind(kind, &source, &map, &table, &wf, spec.as_ref().map(|sp| sp as &dyn Homomorphism<ReducedWord>), &relators, &bounds)
        }
        (None, Some(src)) => {
            let sgroup = src.build(s.cap_order)?;
            let mut ids = Vec::new();
            let mut images = Vec::new();
            let mut norms = Vec::new();
            for e in &wf.entries {
                let id = element_id(&sgroup, &e.element)?;
                let img = e
                    .image
                    .as_ref()
                    .ok_or_else(|| anyhow!("entry `{}` needs an image", e.element))?;
                ids.push(id);
                images.push(element_id(&group, img)?);
                norms.push(entry_norm(&e.norm, &e.element)?);
            }
            let map = PartialMap::new(ids, images, norms)?;
            if kind == "rf" {
                bail!("`rf` needs a free source");
            }
            run_kind::<FiniteGroup>(kind, &sgroup, &map, &table, &wf, None, &[], &[])
        }
        _ => bail!("give exactly one of `rank` (free source) or [source] (finite source)"),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_kind<S: wordnorm::witness::SourceGroup>(
    kind: &str,
    source: &S,
    map: &PartialMap<S::Elem, Rational>,
    table: &NormTable<Rational>,
    wf: &WitnessFile,
    extension: Option<&dyn Homomorphism<S::Elem>>,
    relators: &[S::Elem],
    bounds: &[(S::Elem, Rational)],
) -> Result<Output> {
    let report = match kind {
        "mws" => check_mws_witness(source, map, &wf.epsilon()?, table, &MwsMode::Metric)?,
        "weak" => {
            let r = parse_value(wf.r.as_ref().ok_or_else(|| anyhow!("`weak` needs `r`"))?)?;
            check_mws_witness(source, map, &wf.epsilon()?, table, &MwsMode::Weak { r })?
        }
        "almost-hom" => check_almost_hom(source, map, &wf.thresholds()?, table)?,
        "lef" => check_lef_witness(source, map, &wf.thresholds()?, table, &LefOptions::default())?,
        "weak-lef" => {
            let options = LefOptions {
                weak_inequality: true,
                ..LefOptions::default()
            };
            check_lef_witness(source, map, &wf.thresholds()?, table, &options)?
        }
        "rf" => {
            let ext = extension.ok_or_else(|| anyhow!("`rf` needs `extension`"))?;
            let options = LefOptions {
                extension: Some(ext),
                relators,
                metric_check: wf.metric.then_some(bounds),
                weak_inequality: false,
            };
            check_lef_witness(source, map, &wf.thresholds()?, table, &options)?
        }
        other => bail!("unknown witness kind `{other}`"),
    };
    Ok(finish_witness(report))
}

pub fn build_lef(path: &Path, s: &Settings) -> Result<Output> {
    let pf: ProblemFile = parse_toml(path)?;
    let p = pf.presentation()?;
    let spec = pf.quotient(s.cap_order)?;
    let wit = build_lef_witness(&p, &pf.normed_domain()?, &pf.thresholds()?, &spec)?;
    let mut out = Output::new(wit.report.verdict.into());
    out.line(format!("norm on the image group (order {}):", spec.group().order()));
    out.line(wit.norm.to_text());
    out.line("map:");
    for ((w, &img), v) in wit.map.domain().iter().zip(wit.map.images()).zip(wit.map.source_norms()) {
        let perm = spec.group().element(img);
        out.line(format!("{w}\t{perm}\t{} -> {}", format_rational(v), format_rational(wit.norm.value(img))));
        out.records.push(json!({
            "word": w.to_string(),
            "image": perm.to_string(),
            "source_norm": format_rational(v),
            "target_norm": format_rational(wit.norm.value(img)),
        }));
    }
    out.line(wit.report.to_string());
    out.records.push(report_record(&wit.report));
    Ok(out)
}

fn problem(pf: &ProblemFile) -> Result<ProbeProblem> {
    Ok(ProbeProblem::new(
        pf.presentation()?,
        pf.target_word()?,
        pf.radius()?,
        pf.kernel_words()?,
        pf.class_words()?,
    )?)
}

fn certificate_output(cert: &SeparationCertificate) -> Output {
    let mut out = Output::new(cert.verdict.into());
    out.line(cert.to_string());
    out.records.push(serde_json::to_value(cert).expect("serializable"));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProbeMode {
    Rf,
    Product,
    Lef,
}

pub fn probe(path: &Path, mode: ProbeMode, s: &Settings) -> Result<Output> {
    let pf: ProblemFile = parse_toml(path)?;
    let prob = problem(&pf)?;
    let spec = pf.quotient(s.cap_order)?;
    let cert = match mode {
        ProbeMode::Rf => separation_check_rf(&prob, &spec)?,
        ProbeMode::Product => closure_product_check(&prob, &spec)?,
        ProbeMode::Lef => lef_separation_check(&prob, &pf.domain_words()?, &spec)?,
    };
    Ok(certificate_output(&cert))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Goal {
    Rf,
    Lef,
    Product,
    LefWitness,
}

fn catalog(pf: &ProblemFile, s: &Settings) -> Result<Vec<QuotientSpec>> {
    let section = pf.catalog.as_ref().ok_or_else(|| anyhow!("search needs a [catalog] section"))?;
    let mut specs = Vec::new();
    if let Some([lo, hi]) = section.cyclic {
        specs.extend(cyclic_power_catalog(pf.rank, lo..=hi)?);
    }
    for sp in &section.specs {
        specs.push(sp.build(s.cap_order)?);
    }
    if !section.groups.is_empty() {
        let groups = section.groups.iter().map(|g| g.build(s.cap_order)).collect::<Result<Vec<_>>>()?;
        let relators = pf.presentation()?.relators;
        let generated = homomorphism_catalog(pf.rank, &groups, &relators, section.budget, s.cap_order)?;
        specs.extend(generated.specs);
    }
    Ok(specs)
}

fn exhausted(out: &mut Output, report: &ExhaustionReport) {
    out.status = Status::Inconclusive;
    let verdicts: Vec<String> = report.verdicts.iter().map(|v| v.to_string()).collect();
    out.line(format!("exhausted {} quotients: {}", verdicts.len(), verdicts.join(" ")));
    out.line(format!("caveat: {}", report.caveat));
    out.records.push(json!({"exhausted": report}));
}

pub fn search(path: &Path, goal: Goal, s: &Settings) -> Result<Output> {
    let pf: ProblemFile = parse_toml(path)?;
    let specs = catalog(&pf, s)?;
    let mut out = Output::new(Status::Success);
    if goal == Goal::LefWitness {
        let p = pf.presentation()?;
        match find_lef_witness(&p, &pf.normed_domain()?, &pf.thresholds()?, &specs)? {
            WitnessSearchOutcome::Found { index, witness } => {
                out.line(format!("found at catalog index {index}"));
                out.line(format!("quotient: {}", specs[index].to_record().images.join(" ; ")));
                out.line(witness.report.to_string());
                out.records.push(json!({"index": index, "spec": specs[index].to_record(), "report": witness.report}));
            }
            WitnessSearchOutcome::Exhausted(report) => exhausted(&mut out, &report),
        }
        return Ok(out);
    }
    let prob = problem(&pf)?;
    let goal = match goal {
        Goal::Rf => SearchGoal::RfSeparation,
        Goal::Product => SearchGoal::ProductMembershipNo,
        Goal::Lef => SearchGoal::LefSeparation(pf.domain_words()?),
        Goal::LefWitness => unreachable!(),
    };
    match quotient_search(&prob, &specs, &goal)? {
        SearchOutcome::Found { index, certificate, .. } => {
            out.line(format!("found at catalog index {index}"));
            out.line(certificate.to_string());
            out.records.push(serde_json::to_value(&*certificate).expect("serializable"));
        }
        SearchOutcome::Exhausted(report) => exhausted(&mut out, &report),
    }
    Ok(out)
}

pub fn verify(path: &Path) -> Result<Output> {
    let text = read_file(path)?;
    let mut out = Output::new(Status::Success);
    let mut any = false;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        any = true;
        let cert = SeparationCertificate::from_json(line).map_err(|e| anyhow!("{}:{}: {e}", path.display(), i + 1))?;
        let ok = cert.replay()?;
        if !ok {
            out.status = Status::Negative;
        }
        out.line(format!(
            "certificate {}: {} ({})",
            i + 1,
            if ok { "replays" } else { "does NOT replay" },
            cert.verdict
        ));
        out.records.push(json!({"line": i + 1, "replays": ok, "verdict": cert.verdict}));
    }
    if !any {
        bail!("{} holds no certificates", path.display());
    }
    Ok(out)
}

/// Randomized axiom checks on small groups, reproducible from the seed.
pub fn selfcheck(trials: usize, s: &Settings) -> Result<Output> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let pool: Vec<Arc<FiniteGroup>> = [
        vec![Perm::cycle_on_block(6, 0, 6)?],
        vec![Perm::parse_cycles("(0 1)", 3)?, Perm::parse_cycles("(1 2)", 3)?],
        vec![Perm::parse_cycles("(0 1 2 3)", 4)?, Perm::parse_cycles("(0 2)", 4)?],
        vec![Perm::parse_cycles("(0 1)", 4)?, Perm::parse_cycles("(0 1 2 3)", 4)?],
        vec![Perm::parse_cycles("(0 1 2)", 5)?, Perm::parse_cycles("(3 4)", 5)?],
    ]
    .iter()
    .map(|gens| FiniteGroup::enumerate(gens, s.cap_order))
    .collect::<Result<_, _>>()?;
    let mut out = Output::new(Status::Success);
    let mut failures = 0;
    for trial in 0..trials {
        let group = &pool[rng.random_range(0..pool.len())];
        let mut set = ElementSet::empty(group);
        for _ in 0..rng.random_range(1..=3) {
            set.insert(rng.random_range(1..group.order()));
        }
        let t: NormTable<Rational> = word_norm(group, &set, Closure::Conjugacy, Padding::Pad)?;
        let classes = group.conjugacy_classes();
        let normal = group.normal_closure(&classes[rng.random_range(0..classes.len())])?;
        let q = quotient_norm(&t, &normal)?;
        for (name, table) in [("word", &t), ("quotient", &q.table)] {
            let r = validate_norm(table, NormKind::Norm, true);
            if !r.passed() {
                failures += 1;
                out.line(format!("trial {trial}: {name} norm on a group of order {} failed", group.order()));
                out.line(r.to_string());
            }
        }
    }
    out.line(format!("seed {}: {trials} trials, {failures} failures", s.seed));
    out.records.push(json!({"seed": s.seed, "trials": trials, "failures": failures}));
    if failures > 0 {
        out.status = Status::Negative;
    }
    Ok(out)
}
