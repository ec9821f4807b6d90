//! Seeded synthetic corpora, fixtures that encode published counts, and
//! brute-force oracles used to cross-check the indexed computations.
//!
//! Generation is single-threaded and driven by [`ChaCha8Rng`], so a
//! scenario and seed always produce the same corpus on every platform.

pub mod crosscheck;
pub mod fixtures;
pub mod oracle;
pub mod presets;
pub mod random;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, LogNormal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, CorpusBuilder, DocumentType, JournalEntry, PaperRecord, RawReference, RecordError, Year};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("generated corpus failed validation ({} record errors)", .0.len())]
    Build(Vec<RecordError>),
}

/// Lifetime citation count drawn for each cited paper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CitationDistribution {
    /// `floor(exp(N(mu, sigma)))`
    Lognormal { mu: f64, sigma: f64 },
    /// Failures before `r` successes with success probability `p`, drawn as a
    /// gamma-Poisson mixture. Mean `r (1 - p) / p`.
    Negbinomial { r: f64, p: f64 },
    Fixed { k: u64 },
}

impl CitationDistribution {
    /// Lognormal whose floored samples have mean close to `mean`.
    pub fn lognormal_with_mean(mean: f64, sigma: f64) -> Self {
        CitationDistribution::Lognormal {
            mu: (mean + 0.5).ln() - sigma * sigma / 2.0,
            sigma,
        }
    }

    fn validate(&self) -> Result<(), String> {
        match *self {
            CitationDistribution::Lognormal { mu, sigma } if !mu.is_finite() || !(sigma >= 0.0) || !sigma.is_finite() => {
                Err(format!("lognormal needs finite mu and sigma >= 0, got ({mu}, {sigma})"))
            }
            CitationDistribution::Negbinomial { r, p } if !(r > 0.0) || !r.is_finite() || !(p > 0.0 && p <= 1.0) => {
                Err(format!("negbinomial needs r > 0 and p in (0, 1], got ({r}, {p})"))
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            CitationDistribution::Lognormal { mu, sigma } => {
                let x: f64 = LogNormal::new(mu, sigma).expect("validated").sample(rng);
                x.floor().min(u32::MAX as f64) as u64
            }
            CitationDistribution::Negbinomial { r, p } => {
                if p >= 1.0 {
                    return 0;
                }
                let lambda: f64 = Gamma::new(r, (1.0 - p) / p).expect("validated").sample(rng);
                poisson(lambda, rng)
            }
            CitationDistribution::Fixed { k } => k,
        }
    }
}

fn poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let x: f64 = Poisson::new(lambda).expect("positive rate").sample(rng);
    x as u64
}

/// Citation-generating behavior of a journal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JournalProfile {
    pub n_papers_per_year: u32,
    pub citable_fraction: f64,
    pub citation_distribution: CitationDistribution,
    pub self_citation_rate: f64,
    /// Share of citations written as a bare "NAME YEAR" string without a
    /// linked paper.
    pub unmatched_fraction: f64,
    pub discipline: String,
    /// Relative weight of each citation age (years after publication),
    /// starting at age 0.
    pub ref_age_profile: Vec<f64>,
    /// Mean number of extra references per paper to sources outside the
    /// corpus.
    pub unindexed_refs_per_paper: f64,
}

impl Default for JournalProfile {
    fn default() -> Self {
        JournalProfile {
            n_papers_per_year: 50,
            citable_fraction: 0.8,
            citation_distribution: CitationDistribution::lognormal_with_mean(10.0, 1.16),
            self_citation_rate: 0.12,
            unmatched_fraction: 0.05,
            discipline: "General".into(),
            ref_age_profile: vec![0.04, 0.14, 0.17, 0.15, 0.12, 0.1, 0.08, 0.07, 0.05, 0.04, 0.04],
            unindexed_refs_per_paper: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InjectionKind {
    /// Raise the target's self-citation share among census-year citations to
    /// its two-year window to `magnitude` times its generated share.
    SelfCitationBoost,
    /// Make `donor` supply a `magnitude` share of the target's census-year
    /// citations to its two-year window.
    CitationStacking,
}

/// Post-pass that only adds references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Injection {
    pub kind: InjectionKind,
    pub target: String,
    #[serde(default)]
    pub donor: Option<String>,
    pub magnitude: f64,
    /// Census years in which the behavior occurs.
    pub years: Vec<Year>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub first_year: Year,
    pub last_year: Year,
    pub n_journals: u32,
    /// Assigned to journals in turn; journal `i` gets `journals[i % len]`.
    pub journals: Vec<JournalProfile>,
    /// Growth of citation volume per publication year, e.g. 0.03.
    #[serde(default)]
    pub refs_growth_per_year: f64,
    #[serde(default)]
    pub injections: Vec<Injection>,
}

/// Identifier of generated journal `i` (zero-based).
pub fn journal_id(i: usize) -> String {
    format!("SJ{:05}", i + 1)
}

/// Name of generated journal `i`: a letter code, so names carry no digits
/// that could be mistaken for years.
pub fn journal_name(i: usize) -> String {
    let mut code = Vec::new();
    let mut n = i + 1;
    while n > 0 {
        n -= 1;
        code.push(b'A' + (n % 26) as u8);
        n /= 26;
    }
    code.reverse();
    format!("Synth Journal {}", String::from_utf8(code).expect("ascii"))
}

fn unit(x: f64, what: &str) -> Result<(), String> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(format!("{what} must lie in [0, 1], got {x}"))
    }
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        self.check().map_err(SynthError::InvalidSpec)
    }

    fn check(&self) -> Result<(), String> {
        if self.first_year > self.last_year {
            return Err("first_year is after last_year".into());
        }
        if self.n_journals == 0 {
            return Err("n_journals must be positive".into());
        }
        if self.journals.is_empty() {
            return Err("at least one journal profile is required".into());
        }
        if !(self.refs_growth_per_year > -1.0) || !self.refs_growth_per_year.is_finite() {
            return Err("refs_growth_per_year must be finite and above -1".into());
        }
        for p in &self.journals {
            if p.n_papers_per_year == 0 {
                return Err("n_papers_per_year must be positive".into());
            }
            unit(p.citable_fraction, "citable_fraction")?;
            unit(p.self_citation_rate, "self_citation_rate")?;
            unit(p.unmatched_fraction, "unmatched_fraction")?;
            p.citation_distribution.validate()?;
            if p.ref_age_profile.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) || p.ref_age_profile.iter().sum::<f64>() <= 0.0 {
                return Err("ref_age_profile needs non-negative weights with a positive sum".into());
            }
            if !(p.unindexed_refs_per_paper >= 0.0) || !p.unindexed_refs_per_paper.is_finite() {
                return Err("unindexed_refs_per_paper must be non-negative".into());
            }
        }
        let known = |id: &str| (0..self.n_journals as usize).any(|i| journal_id(i) == id);
        for inj in &self.injections {
            if !known(&inj.target) {
                return Err(format!("injection target `{}` is not a generated journal", inj.target));
            }
            if !(inj.magnitude > 0.0) || !inj.magnitude.is_finite() {
                return Err("injection magnitude must be positive".into());
            }
            if let Some(y) = inj.years.iter().find(|y| !(self.first_year..=self.last_year).contains(*y)) {
                return Err(format!("injection year {y} is outside the scenario years"));
            }
            if inj.kind == InjectionKind::CitationStacking {
                let donor = inj.donor.as_deref().ok_or("citation stacking needs a donor")?;
                if !known(donor) || donor == inj.target {
                    return Err(format!("invalid stacking donor `{donor}`"));
                }
                if inj.magnitude >= 1.0 {
                    return Err("stacking magnitude is a share and must be below 1".into());
                }
            }
        }
        Ok(())
    }
}

// Compact per-reference facts used by the injection post-passes.
#[derive(Clone, Copy)]
struct RefMeta {
    citing_journal: u32,
    citing_year: Year,
    // u32::MAX for references outside the corpus
    cited_journal: u32,
    cited_year: Year,
}

struct Generator<'s> {
    spec: &'s ScenarioSpec,
    rng: ChaCha8Rng,
    names: Vec<String>,
    papers: Vec<PaperRecord>,
    // per journal, per year offset: first paper index
    first_paper: Vec<Vec<usize>>,
    citable_count: Vec<u32>,
    references: Vec<RawReference>,
    meta: Vec<RefMeta>,
}

impl Generator<'_> {
    fn profile(&self, j: usize) -> &JournalProfile {
        &self.spec.journals[j % self.spec.journals.len()]
    }

    fn year_offset(&self, year: Year) -> usize {
        (year - self.spec.first_year) as usize
    }

    fn random_paper(&mut self, j: usize, year: Year, citable_only: bool) -> usize {
        let n = if citable_only {
            self.citable_count[j]
        } else {
            self.profile(j).n_papers_per_year
        };
        self.first_paper[j][self.year_offset(year)] + self.rng.random_range(0..n as usize)
    }

    fn push_reference(&mut self, citing: usize, cited: Option<usize>, raw: String, cited_year: Option<Year>, meta: RefMeta) {
        self.references.push(RawReference {
            citing_paper_id: self.papers[citing].paper_id.clone(),
            raw_cited_string: raw,
            cited_paper_id: cited.map(|p| self.papers[p].paper_id.clone()),
            cited_journal_id: None,
            cited_year,
        });
        self.meta.push(meta);
    }
}

fn doc_type_for(k: u32, citable: u32) -> DocumentType {
    if k < citable {
        if k % 10 == 9 {
            DocumentType::Review
        } else {
            DocumentType::Article
        }
    } else {
        [DocumentType::Editorial, DocumentType::Letter, DocumentType::NewsItem][(k - citable) as usize % 3]
    }
}

fn growth_factor(spec: &ScenarioSpec, year: Year) -> f64 {
    (1.0 + spec.refs_growth_per_year).powi(year - spec.first_year)
}

// Rounds `x` up with probability equal to its fractional part.
fn stochastic_round<R: Rng + ?Sized>(x: f64, rng: &mut R) -> u64 {
    let floor = x.floor();
    floor as u64 + u64::from(rng.random::<f64>() < x - floor)
}

/// Generates the corpus a scenario describes.
pub fn generate(spec: &ScenarioSpec) -> Result<Corpus, SynthError> {
    spec.validate()?;
    let n = spec.n_journals as usize;
    let years: Vec<Year> = (spec.first_year..=spec.last_year).collect();
    let mut g = Generator {
        spec,
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        names: (0..n).map(journal_name).collect(),
        papers: Vec::new(),
        first_paper: vec![Vec::with_capacity(years.len()); n],
        citable_count: Vec::with_capacity(n),
        references: Vec::new(),
        meta: Vec::new(),
    };

    let mut builder = CorpusBuilder::new();
    for j in 0..n {
        let profile = g.profile(j).clone();
        builder.add_journal(JournalEntry {
            journal_id: journal_id(j),
            canonical_name: g.names[j].clone(),
            name_variants: Vec::new(),
            discipline: profile.discipline.clone(),
            specialty: None,
        });
        let per_year = profile.n_papers_per_year;
        let citable = ((per_year as f64 * profile.citable_fraction).round() as u32).min(per_year);
        g.citable_count.push(citable);
        for &year in &years {
            g.first_paper[j].push(g.papers.len());
            for k in 0..per_year {
                g.papers.push(PaperRecord {
                    paper_id: format!("{}-{year}-{k:04}", journal_id(j)),
                    journal_id: journal_id(j),
                    pub_year: year,
                    doc_type: doc_type_for(k, citable),
                });
            }
        }
    }

    for j in 0..n {
        let profile = g.profile(j).clone();
        let ages = WeightedIndex::new(&profile.ref_age_profile).expect("validated weights");
        for &year in &years {
            let growth = growth_factor(spec, year);
            for k in 0..profile.n_papers_per_year {
                let cited = g.first_paper[j][g.year_offset(year)] + k as usize;
                let mut count = profile.citation_distribution.sample(&mut g.rng);
                if k >= g.citable_count[j] {
                    count /= 4;
                }
                let count = stochastic_round(count as f64 * growth, &mut g.rng);
                for _ in 0..count {
                    let citing_year = year + ages.sample(&mut g.rng) as Year;
                    if citing_year > spec.last_year {
                        continue;
                    }
                    let citing_journal = if n == 1 || g.rng.random::<f64>() < profile.self_citation_rate {
                        j
                    } else {
                        let other = g.rng.random_range(0..n - 1);
                        other + usize::from(other >= j)
                    };
                    let citing = g.random_paper(citing_journal, citing_year, false);
                    if citing == cited {
                        continue;
                    }
                    let unmatched = g.rng.random::<f64>() < profile.unmatched_fraction;
                    let raw = format!("{} {year}", g.names[j]);
                    let meta = RefMeta {
                        citing_journal: citing_journal as u32,
                        citing_year,
                        cited_journal: j as u32,
                        cited_year: year,
                    };
                    g.push_reference(citing, (!unmatched).then_some(cited), raw, None, meta);
                }
            }
        }
    }

    for j in 0..n {
        let profile = g.profile(j).clone();
        if profile.unindexed_refs_per_paper <= 0.0 {
            continue;
        }
        let ages = WeightedIndex::new(&profile.ref_age_profile).expect("validated weights");
        for &year in &years {
            let lambda = profile.unindexed_refs_per_paper * growth_factor(spec, year);
            for k in 0..profile.n_papers_per_year as usize {
                let citing = g.first_paper[j][g.year_offset(year)] + k;
                for _ in 0..poisson(lambda, &mut g.rng) {
                    let cited_year = year - ages.sample(&mut g.rng) as Year;
                    let meta = RefMeta {
                        citing_journal: j as u32,
                        citing_year: year,
                        cited_journal: u32::MAX,
                        cited_year,
                    };
                    g.push_reference(citing, None, format!("Unindexed Monograph {cited_year}"), Some(cited_year), meta);
                }
            }
        }
    }

    for injection in &spec.injections {
        inject(&mut g, injection);
    }

    let Generator { papers, references, .. } = g;
    builder.reserve_references(references.len());
    for p in papers {
        builder.add_paper(p);
    }
    for r in references {
        builder.add_reference(r);
    }
    builder.build().map_err(SynthError::Build)
}

fn inject(g: &mut Generator<'_>, injection: &Injection) {
    let index = |id: &str| (0..g.spec.n_journals as usize).find(|&i| journal_id(i) == id).expect("validated");
    let target = index(&injection.target);
    let donor = injection.donor.as_deref().map(index);
    for &year in &injection.years {
        if year - 2 < g.spec.first_year || g.citable_count[target] == 0 {
            continue;
        }
        let (mut total, mut from_source) = (0u64, 0u64);
        let source = match injection.kind {
            InjectionKind::SelfCitationBoost => target,
            InjectionKind::CitationStacking => donor.expect("validated"),
        };
        for m in &g.meta {
            if m.cited_journal == target as u32 && m.citing_year == year && (1..=2).contains(&(year - m.cited_year)) {
                total += 1;
                from_source += u64::from(m.citing_journal == source as u32);
            }
        }
        let share = match injection.kind {
            InjectionKind::SelfCitationBoost if total > 0 => (injection.magnitude * from_source as f64 / total as f64).min(0.95),
            InjectionKind::SelfCitationBoost => continue,
            InjectionKind::CitationStacking => injection.magnitude,
        };
        let needed = (share * total as f64 - from_source as f64) / (1.0 - share);
        if needed <= 0.0 {
            continue;
        }
        for _ in 0..needed.ceil() as u64 {
            let cited_year = year - g.rng.random_range(1..=2);
            let cited = g.random_paper(target, cited_year, true);
            let citing = g.random_paper(source, year, false);
            let raw = format!("{} {cited_year}", g.names[target]);
            let meta = RefMeta {
                citing_journal: source as u32,
                citing_year: year,
                cited_journal: target as u32,
                cited_year,
            };
            g.push_reference(citing, Some(cited), raw, None, meta);
        }
    }
}
