//! Brute-force recounts used to check the indexed computations.
//!
//! Everything here works from the raw [`Corpus`] records with linear scans
//! and its own reference classification. It deliberately shares no counting
//! code with `matcher`, `indicators`, `network` or `distributions`; only
//! the name normalizer and the output types are reused.

use std::collections::BTreeMap;

use crate::corpus::{Corpus, PaperRecord, Year};
use crate::distributions::{DisciplineProfile, DistributionSummary};
use crate::indicators::CitationTally;
use crate::matcher::{CitationClass, Normalizer};

/// What a reference points to, as decided by the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleClass {
    pub class: CitationClass,
    pub journal_id: Option<String>,
    pub year: Option<Year>,
    pub paper_id: Option<String>,
}

pub struct Oracle<'a> {
    corpus: &'a Corpus,
    classes: Vec<OracleClass>,
}

fn find_paper<'c>(corpus: &'c Corpus, id: &str) -> Option<&'c PaperRecord> {
    corpus.papers().iter().find(|p| p.paper_id == id)
}

fn first_year_in(text: &str) -> Option<Year> {
    let mut digits = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_ascii_digit() {
            digits.push(c);
            continue;
        }
        if digits.len() == 4 {
            let y: Year = digits.parse().ok()?;
            if (1800..=2100).contains(&y) {
                return Some(y);
            }
        }
        digits.clear();
    }
    None
}

fn classify(corpus: &Corpus, normalizer: &Normalizer, r: usize) -> OracleClass {
    let raw = &corpus.references()[r];
    if let Some(paper) = raw.cited_paper_id.as_deref().and_then(|id| find_paper(corpus, id)) {
        return OracleClass {
            class: if paper.doc_type.is_citable() {
                CitationClass::MatchedCitable
            } else {
                CitationClass::MatchedNonCitable
            },
            journal_id: Some(paper.journal_id.clone()),
            year: Some(paper.pub_year),
            paper_id: Some(paper.paper_id.clone()),
        };
    }
    let unresolved = OracleClass {
        class: CitationClass::Unresolved,
        journal_id: None,
        year: None,
        paper_id: None,
    };
    let tokens: Vec<String> = normalizer.normalize(&raw.raw_cited_string).split_whitespace().map(str::to_string).collect();
    let mut best_len = 0;
    let mut best: Vec<&str> = Vec::new();
    for journal in corpus.journals() {
        for name in std::iter::once(&journal.canonical_name).chain(&journal.name_variants) {
            let key: Vec<String> = normalizer.normalize(name).split_whitespace().map(str::to_string).collect();
            if key.is_empty() || key.len() > tokens.len() || key[..] != tokens[..key.len()] {
                continue;
            }
            if key.len() > best_len {
                best_len = key.len();
                best.clear();
            }
            if key.len() == best_len && !best.contains(&journal.journal_id.as_str()) {
                best.push(&journal.journal_id);
            }
        }
    }
    if best.len() != 1 {
        return unresolved;
    }
    match raw.cited_year.or_else(|| first_year_in(&raw.raw_cited_string)) {
        Some(year) => OracleClass {
            class: CitationClass::UnmatchedJournal,
            journal_id: Some(best[0].to_string()),
            year: Some(year),
            paper_id: None,
        },
        None => unresolved,
    }
}

impl<'a> Oracle<'a> {
    pub fn new(corpus: &'a Corpus, normalizer: &Normalizer) -> Self {
        let classes = (0..corpus.references().len()).map(|r| classify(corpus, normalizer, r)).collect();
        Oracle { corpus, classes }
    }

    pub fn classes(&self) -> &[OracleClass] {
        &self.classes
    }

    fn citing_paper(&self, r: usize) -> &PaperRecord {
        find_paper(self.corpus, &self.corpus.references()[r].citing_paper_id).expect("validated corpus")
    }

    fn in_window(year: Year, census_year: Year, window_years: u32) -> bool {
        year < census_year && year >= census_year - window_years as Year
    }

    pub fn tally(&self, journal_id: &str, census_year: Year, window_years: u32) -> CitationTally {
        let mut t = CitationTally::empty(journal_id, census_year, window_years);
        for (r, c) in self.classes.iter().enumerate() {
            if c.journal_id.as_deref() != Some(journal_id) {
                continue;
            }
            let citing = self.citing_paper(r);
            if citing.pub_year != census_year || !Self::in_window(c.year.expect("attributed"), census_year, window_years) {
                continue;
            }
            match c.class {
                CitationClass::MatchedCitable => t.cites_matched_citable += 1,
                CitationClass::MatchedNonCitable => t.cites_matched_noncitable += 1,
                CitationClass::UnmatchedJournal => t.cites_unmatched += 1,
                CitationClass::Unresolved => unreachable!("unresolved references have no journal"),
            }
            if citing.journal_id == journal_id {
                t.self_citations += 1;
            }
        }
        for p in self.corpus.papers() {
            if p.journal_id == journal_id && Self::in_window(p.pub_year, census_year, window_years) {
                t.n_all_items += 1;
                if p.doc_type.is_citable() {
                    t.n_citable_items += 1;
                }
            }
        }
        t
    }

    /// Dense journal-to-journal counts in journal order (`[citing][cited]`)
    /// and citable items per journal in the window.
    pub fn matrix(&self, census_year: Year, window_years: u32) -> (Vec<Vec<u64>>, Vec<u64>) {
        let journals = self.corpus.journals();
        let position = |id: &str| journals.iter().position(|j| j.journal_id == id).expect("known journal");
        let mut m = vec![vec![0u64; journals.len()]; journals.len()];
        for (r, c) in self.classes.iter().enumerate() {
            let Some(cited) = c.journal_id.as_deref() else { continue };
            let citing = self.citing_paper(r);
            if citing.pub_year == census_year && Self::in_window(c.year.expect("attributed"), census_year, window_years) {
                m[position(&citing.journal_id)][position(cited)] += 1;
            }
        }
        let articles = journals
            .iter()
            .map(|j| {
                self.corpus
                    .papers()
                    .iter()
                    .filter(|p| {
                        p.journal_id == j.journal_id && p.doc_type.is_citable() && Self::in_window(p.pub_year, census_year, window_years)
                    })
                    .count() as u64
            })
            .collect();
        (m, articles)
    }

    /// Citations per citable window item, in corpus paper order.
    pub fn per_paper_counts(&self, journal_id: &str, census_year: Year, window_years: u32) -> Vec<u64> {
        let mut out = Vec::new();
        for p in self.corpus.papers() {
            if p.journal_id != journal_id || !p.doc_type.is_citable() || !Self::in_window(p.pub_year, census_year, window_years) {
                continue;
            }
            let mut n = 0;
            for (r, c) in self.classes.iter().enumerate() {
                if c.paper_id.as_deref() == Some(p.paper_id.as_str()) && self.citing_paper(r).pub_year == census_year {
                    n += 1;
                }
            }
            out.push(n);
        }
        out
    }

    pub fn median_cites(&self, journal_id: &str, census_year: Year, window_years: u32) -> Option<f64> {
        naive_median(self.per_paper_counts(journal_id, census_year, window_years))
    }

    pub fn distribution(&self, journal_id: &str, census_year: Year, window_years: u32, jif_value: f64) -> Option<DistributionSummary> {
        let counts = self.per_paper_counts(journal_id, census_year, window_years);
        if counts.is_empty() {
            return None;
        }
        let mut histogram = BTreeMap::new();
        let mut sum = 0u64;
        let mut at_or_above = 0u64;
        for &c in &counts {
            *histogram.entry(c).or_insert(0) += 1;
            sum += c;
            if c as f64 >= jif_value {
                at_or_above += 1;
            }
        }
        let n = counts.len() as u64;
        Some(DistributionSummary {
            journal_id: journal_id.to_string(),
            census_year,
            histogram,
            mean: sum as f64 / n as f64,
            median: naive_median(counts).expect("non-empty"),
            jif_value,
            share_at_or_above_jif: at_or_above as f64 / n as f64,
            n_at_or_above_jif: at_or_above,
            n_papers: n,
        })
    }

    pub fn discipline_profile(&self, discipline: &str, census_year: Year) -> Option<DisciplineProfile> {
        let journals: Vec<&str> = self
            .corpus
            .journals()
            .iter()
            .filter(|j| j.discipline == discipline)
            .map(|j| j.journal_id.as_str())
            .collect();
        let mut jifs = Vec::new();
        for &j in &journals {
            let t = self.tally(j, census_year, 2);
            if t.n_citable_items > 0 {
                let numerator = t.cites_matched_citable + t.cites_matched_noncitable + t.cites_unmatched;
                jifs.push(numerator as f64 / t.n_citable_items as f64);
            }
        }
        let (mut papers, mut refs, mut indexed, mut dated, mut age_sum) = (0u64, 0u64, 0u64, 0u64, 0i64);
        for p in self.corpus.papers() {
            if p.pub_year != census_year || !journals.contains(&p.journal_id.as_str()) {
                continue;
            }
            papers += 1;
            for (r, raw) in self.corpus.references().iter().enumerate() {
                if raw.citing_paper_id != p.paper_id {
                    continue;
                }
                refs += 1;
                let c = &self.classes[r];
                if c.class != CitationClass::Unresolved {
                    indexed += 1;
                }
                if let Some(year) = c.year.or(raw.cited_year) {
                    dated += 1;
                    age_sum += (p.pub_year - year) as i64;
                }
            }
        }
        if journals.is_empty() || papers == 0 {
            return None;
        }
        let mut max_jif: Option<f64> = None;
        for &v in &jifs {
            max_jif = Some(max_jif.map_or(v, |m| if v > m { v } else { m }));
        }
        Some(DisciplineProfile {
            discipline: discipline.to_string(),
            census_year,
            n_journals: journals.len() as u64,
            n_journals_with_jif: jifs.len() as u64,
            n_papers: papers,
            mean_jif: if jifs.is_empty() { None } else { Some(jifs.iter().sum::<f64>() / jifs.len() as f64) },
            max_jif,
            mean_refs: refs as f64 / papers as f64,
            mean_refs_to_indexed: indexed as f64 / papers as f64,
            mean_ref_age: if dated == 0 { None } else { Some(age_sum as f64 / dated as f64) },
            ref_age_coverage: if refs == 0 { 0.0 } else { dated as f64 / refs as f64 },
        })
    }
}

fn naive_median(mut values: Vec<u64>) -> Option<f64> {
    // insertion sort keeps this independent of the library sort paths
    for i in 1..values.len() {
        let mut k = i;
        while k > 0 && values[k - 1] > values[k] {
            values.swap(k - 1, k);
            k -= 1;
        }
    }
    let n = values.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(values[n / 2] as f64),
        _ => Some((values[n / 2 - 1] + values[n / 2]) as f64 / 2.0),
    }
}

/// Pearson correlation by the textbook single-pass sums formula.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let denominator = ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
    (denominator > 0.0).then(|| (n * sxy - sx * sy) / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn year_scan() {
        assert_eq!(first_year_in("Cell 2015"), Some(2015));
        assert_eq!(first_year_in("vol 12345 (1999)"), Some(1999));
        assert_eq!(first_year_in("page 0042 of 3000"), None);
        assert_eq!(first_year_in(""), None);
    }

    #[test]
    fn naive_median_cases() {
        assert_eq!(naive_median(vec![3, 1, 2]), Some(2.0));
        assert_eq!(naive_median(vec![4, 1, 3, 2]), Some(2.5));
        assert_eq!(naive_median(Vec::new()), None);
    }
}
