//! Ratio indicators for one journal and census year.
//!
//! Every indicator is computed from integer tallies followed by one division.
//! A citation window of `n` years covers publication years
//! `census_year - n ..= census_year - 1`; only citations made by papers
//! published in the census year are counted.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{JournalIdx, PaperIdx, Year};
use crate::matcher::{CitationClass, ResolvedCorpus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndicatorError {
    #[error("unknown journal `{0}`")]
    UnknownJournal(String),
    #[error("citation window must be at least one year")]
    InvalidWindow,
    #[error("census year {year} is outside the corpus year range")]
    YearOutOfRange { year: Year },
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("journal received no citations")]
    NoCitations,
    #[error("journal has no citable items in the window")]
    EmptyWindow,
}

/// Publication years counted for a census year.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub census_year: Year,
    pub years: u32,
}

impl Window {
    pub fn new(census_year: Year, years: u32) -> Self {
        Window { census_year, years }
    }

    #[inline]
    pub fn first_year(&self) -> Year {
        self.census_year - self.years as Year
    }

    #[inline]
    pub fn last_year(&self) -> Year {
        self.census_year - 1
    }

    #[inline]
    pub fn contains(&self, year: Year) -> bool {
        year >= self.first_year() && year <= self.last_year()
    }
}

/// Citation and item counts for one journal, census year and window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CitationTally {
    pub journal_id: String,
    pub census_year: Year,
    pub window_years: u32,
    pub cites_matched_citable: u64,
    pub cites_matched_noncitable: u64,
    pub cites_unmatched: u64,
    pub n_citable_items: u64,
    pub n_all_items: u64,
    /// Citations made by papers of the same journal, any attributable class.
    pub self_citations: u64,
}

impl CitationTally {
    pub fn empty(journal_id: impl Into<String>, census_year: Year, window_years: u32) -> Self {
        CitationTally {
            journal_id: journal_id.into(),
            census_year,
            window_years,
            cites_matched_citable: 0,
            cites_matched_noncitable: 0,
            cites_unmatched: 0,
            n_citable_items: 0,
            n_all_items: 0,
            self_citations: 0,
        }
    }

    pub fn total_cites(&self) -> u64 {
        self.cites_matched_citable + self.cites_matched_noncitable + self.cites_unmatched
    }

    pub fn cites_matched(&self) -> u64 {
        self.cites_matched_citable + self.cites_matched_noncitable
    }
}

fn checked_journal(resolved: &ResolvedCorpus<'_>, journal_id: &str) -> Result<JournalIdx, IndicatorError> {
    resolved
        .corpus()
        .journal_idx(journal_id)
        .ok_or_else(|| IndicatorError::UnknownJournal(journal_id.to_string()))
}

fn check_year(resolved: &ResolvedCorpus<'_>, year: Year) -> Result<(), IndicatorError> {
    match resolved.corpus().year_range() {
        Some((lo, hi)) if (lo..=hi).contains(&year) => Ok(()),
        _ => Err(IndicatorError::YearOutOfRange { year }),
    }
}

/// Counts citations received in `census_year` by items the journal published
/// in the window, split by citation class, plus the window's item counts.
///
/// A journal that published nothing in the window gets a tally with zero
/// items; the ratio functions then report [`IndicatorError::ZeroDenominator`].
pub fn tally(
    resolved: &ResolvedCorpus<'_>,
    journal_id: &str,
    census_year: Year,
    window_years: u32,
) -> Result<CitationTally, IndicatorError> {
    if window_years == 0 {
        return Err(IndicatorError::InvalidWindow);
    }
    let journal = checked_journal(resolved, journal_id)?;
    check_year(resolved, census_year)?;
    Ok(tally_idx(resolved, journal, Window::new(census_year, window_years)))
}

pub(crate) fn tally_idx(resolved: &ResolvedCorpus<'_>, journal: JournalIdx, window: Window) -> CitationTally {
    let corpus = resolved.corpus();
    let mut t = CitationTally::empty(&corpus.journal(journal).journal_id, window.census_year, window.years);
    for &r in resolved.incoming(journal) {
        let r = r as usize;
        let c = resolved.classification(r);
        let Some(year) = c.cited_year() else { continue };
        if !window.contains(year) || resolved.citing_year(r) != window.census_year {
            continue;
        }
        match c.class() {
            CitationClass::MatchedCitable => t.cites_matched_citable += 1,
            CitationClass::MatchedNonCitable => t.cites_matched_noncitable += 1,
            CitationClass::UnmatchedJournal => t.cites_unmatched += 1,
            CitationClass::Unresolved => continue,
        }
        if resolved.citing_journal(r) == journal {
            t.self_citations += 1;
        }
    }
    for &p in corpus.papers_of(journal) {
        let paper = corpus.paper(p);
        if window.contains(paper.pub_year) {
            t.n_all_items += 1;
            t.n_citable_items += u64::from(paper.doc_type.is_citable());
        }
    }
    t
}

fn ratio(numerator: u64, denominator: u64) -> Result<f64, IndicatorError> {
    if denominator == 0 {
        return Err(IndicatorError::ZeroDenominator);
    }
    Ok(numerator as f64 / denominator as f64)
}

/// All attributable citations (matched to any item type, or unmatched) per
/// citable item.
pub fn jif_wos_derived(tally: &CitationTally) -> Result<f64, IndicatorError> {
    ratio(tally.total_cites(), tally.n_citable_items)
}

/// Only citations matched to citable items, per citable item.
pub fn symmetric_if(tally: &CitationTally) -> Result<f64, IndicatorError> {
    ratio(tally.cites_matched_citable, tally.n_citable_items)
}

pub fn jif_no_self(tally: &CitationTally) -> Result<f64, IndicatorError> {
    ratio(tally.total_cites() - tally.self_citations, tally.n_citable_items)
}

pub fn self_citation_rate(tally: &CitationTally) -> Result<f64, IndicatorError> {
    if tally.total_cites() == 0 {
        return Err(IndicatorError::NoCitations);
    }
    ratio(tally.self_citations, tally.total_cites())
}

/// Percentage by which `reference_jif` exceeds the symmetric impact factor.
pub fn pct_increase(reference_jif: f64, symmetric: f64) -> Result<f64, IndicatorError> {
    if symmetric == 0.0 {
        return Err(IndicatorError::ZeroDenominator);
    }
    Ok(100.0 * (reference_jif - symmetric) / symmetric)
}

pub fn jif5(resolved: &ResolvedCorpus<'_>, journal_id: &str, census_year: Year) -> Result<f64, IndicatorError> {
    jif_wos_derived(&tally(resolved, journal_id, census_year, 5)?)
}

/// Matched citations to items of every document type over the three-year
/// window, divided by all items published in it.
pub fn citescore(resolved: &ResolvedCorpus<'_>, journal_id: &str, census_year: Year) -> Result<f64, IndicatorError> {
    let t = tally(resolved, journal_id, census_year, 3)?;
    ratio(t.cites_matched(), t.n_all_items)
}

/// Per-paper citation counts for the journal's citable items in the window,
/// in corpus order. Unmatched citations have no target paper and are left
/// out.
pub fn per_paper_counts(
    resolved: &ResolvedCorpus<'_>,
    journal_id: &str,
    census_year: Year,
    window_years: u32,
) -> Result<Vec<u64>, IndicatorError> {
    if window_years == 0 {
        return Err(IndicatorError::InvalidWindow);
    }
    let journal = checked_journal(resolved, journal_id)?;
    check_year(resolved, census_year)?;
    Ok(per_paper_counts_idx(resolved, journal, Window::new(census_year, window_years)))
}

pub(crate) fn per_paper_counts_idx(resolved: &ResolvedCorpus<'_>, journal: JournalIdx, window: Window) -> Vec<u64> {
    let corpus = resolved.corpus();
    let mut cited: Vec<PaperIdx> = resolved
        .incoming(journal)
        .iter()
        .map(|&r| r as usize)
        .filter(|&r| resolved.citing_year(r) == window.census_year)
        .filter_map(|r| resolved.classification(r).cited_paper())
        .collect();
    cited.sort_unstable();

    // papers_of() is in ascending index order, so both sides merge linearly.
    let mut counts = Vec::new();
    let mut cursor = 0;
    for &p in corpus.papers_of(journal) {
        let paper = corpus.paper(p);
        while cursor < cited.len() && cited[cursor] < p {
            cursor += 1;
        }
        let start = cursor;
        while cursor < cited.len() && cited[cursor] == p {
            cursor += 1;
        }
        if paper.doc_type.is_citable() && window.contains(paper.pub_year) {
            counts.push((cursor - start) as u64);
        }
    }
    counts
}

/// Median of the per-paper citation counts of the window's citable items.
pub fn median_cites(
    resolved: &ResolvedCorpus<'_>,
    journal_id: &str,
    census_year: Year,
    window_years: u32,
) -> Result<f64, IndicatorError> {
    let mut counts = per_paper_counts(resolved, journal_id, census_year, window_years)?;
    median(&mut counts).ok_or(IndicatorError::EmptyWindow)
}

/// Median of `values`; even lengths average the two central values.
pub fn median(values: &mut [u64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid] as f64
    } else {
        (values[mid - 1] as f64 + values[mid] as f64) / 2.0
    })
}

/// Every ratio indicator for one journal-year. `None` marks a value that is
/// undefined for the journal, e.g. no citable items in the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub journal_id: String,
    pub census_year: Year,
    pub jif2: Option<f64>,
    pub jif5: Option<f64>,
    pub jif_wos_derived: Option<f64>,
    pub symmetric_if: Option<f64>,
    pub jif_no_self: Option<f64>,
    pub citescore: Option<f64>,
    pub median_cites: Option<f64>,
    pub self_citation_rate: Option<f64>,
    pub pct_increase: Option<f64>,
}

pub const REPORT_HEADER: &str = "journal_id,census_year,jif2,jif5,jif_wos_derived,symmetric_if,jif_no_self,citescore,median_cites,self_citation_rate,pct_increase";

/// Builds the report for one journal. `window_years` drives the
/// WOS-derived, symmetric, self-citation and median columns; `jif2`, `jif5`
/// and `citescore` use their fixed windows.
pub fn report(
    resolved: &ResolvedCorpus<'_>,
    journal_id: &str,
    census_year: Year,
    window_years: u32,
) -> Result<IndicatorReport, IndicatorError> {
    if window_years == 0 {
        return Err(IndicatorError::InvalidWindow);
    }
    let journal = checked_journal(resolved, journal_id)?;
    check_year(resolved, census_year)?;
    Ok(report_idx(resolved, journal, census_year, window_years))
}

/// Reports for every journal of the corpus, in registry order.
pub fn report_all(
    resolved: &ResolvedCorpus<'_>,
    census_year: Year,
    window_years: u32,
) -> Result<Vec<IndicatorReport>, IndicatorError> {
    if window_years == 0 {
        return Err(IndicatorError::InvalidWindow);
    }
    check_year(resolved, census_year)?;
    let journals: Vec<JournalIdx> = resolved.corpus().journal_indices().collect();
    Ok(journals
        .into_par_iter()
        .map(|j| report_idx(resolved, j, census_year, window_years))
        .collect())
}

fn report_idx(resolved: &ResolvedCorpus<'_>, journal: JournalIdx, census_year: Year, window_years: u32) -> IndicatorReport {
    let main = tally_idx(resolved, journal, Window::new(census_year, window_years));
    let jif_for = |years: u32| {
        if years == window_years {
            jif_wos_derived(&main).ok()
        } else {
            jif_wos_derived(&tally_idx(resolved, journal, Window::new(census_year, years))).ok()
        }
    };
    let three = tally_idx(resolved, journal, Window::new(census_year, 3));
    let jif_wos = jif_wos_derived(&main).ok();
    let symmetric = symmetric_if(&main).ok();
    let median_value = if main.n_citable_items > 0 {
        median(&mut per_paper_counts_idx(resolved, journal, Window::new(census_year, window_years)))
    } else {
        None
    };
    IndicatorReport {
        journal_id: main.journal_id.clone(),
        census_year,
        jif2: jif_for(2),
        jif5: jif_for(5),
        jif_wos_derived: jif_wos,
        symmetric_if: symmetric,
        jif_no_self: jif_no_self(&main).ok(),
        citescore: ratio(three.cites_matched(), three.n_all_items).ok(),
        median_cites: median_value,
        self_citation_rate: self_citation_rate(&main).ok(),
        pct_increase: match (jif_wos, symmetric) {
            (Some(jif), Some(sym)) => pct_increase(jif, sym).ok(),
            _ => None,
        },
    }
}

/// Number of decimals used when rendering indicator values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Decimals {
    One,
    #[default]
    Three,
}

impl Decimals {
    pub fn from_count(n: u32) -> Option<Decimals> {
        match n {
            1 => Some(Decimals::One),
            3 => Some(Decimals::Three),
            _ => None,
        }
    }

    pub fn count(self) -> usize {
        match self {
            Decimals::One => 1,
            Decimals::Three => 3,
        }
    }
}

/// Renders `value` with the requested decimals, rounding the exact binary
/// value half-to-even.
pub fn format_value(value: f64, decimals: Decimals) -> String {
    if value.is_infinite() {
        return if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.*}", decimals.count(), value)
}

pub fn format_optional(value: Option<f64>, decimals: Decimals) -> String {
    value.map(|v| format_value(v, decimals)).unwrap_or_default()
}

/// Rounds to the rendered precision; used for JSON output so both formats
/// agree.
pub fn round_to(value: f64, decimals: Decimals) -> f64 {
    format_value(value, decimals).parse().unwrap_or(value)
}

pub fn write_reports_csv<W: Write>(reports: &[IndicatorReport], decimals: Decimals, mut out: W) -> io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in reports {
        let values = [
            r.jif2,
            r.jif5,
            r.jif_wos_derived,
            r.symmetric_if,
            r.jif_no_self,
            r.citescore,
            r.median_cites,
            r.self_citation_rate,
            r.pct_increase,
        ];
        write!(out, "{},{}", csv_field(&r.journal_id), r.census_year)?;
        for v in values {
            write!(out, ",{}", format_optional(v, decimals))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_reports_json<W: Write>(reports: &[IndicatorReport], decimals: Decimals, out: W) -> io::Result<()> {
    let rounded: Vec<IndicatorReport> = reports
        .iter()
        .map(|r| {
            let round = |v: Option<f64>| v.map(|x| round_to(x, decimals));
            IndicatorReport {
                journal_id: r.journal_id.clone(),
                census_year: r.census_year,
                jif2: round(r.jif2),
                jif5: round(r.jif5),
                jif_wos_derived: round(r.jif_wos_derived),
                symmetric_if: round(r.symmetric_if),
                jif_no_self: round(r.jif_no_self),
                citescore: round(r.citescore),
                median_cites: round(r.median_cites),
                self_citation_rate: round(r.self_citation_rate),
                pct_increase: round(r.pct_increase),
            }
        })
        .collect();
    serde_json::to_writer_pretty(out, &rounded).map_err(io::Error::other)
}

/// Quotes a CSV field when it contains a delimiter, quote or newline.
pub fn csv_field(s: &str) -> std::borrow::Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\"")).into()
    } else {
        s.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tally_of(citable: u64, noncitable: u64, unmatched: u64, items: u64, self_cites: u64) -> CitationTally {
        CitationTally {
            cites_matched_citable: citable,
            cites_matched_noncitable: noncitable,
            cites_unmatched: unmatched,
            n_citable_items: items,
            n_all_items: items,
            self_citations: self_cites,
            ..CitationTally::empty("j", 2016, 2)
        }
    }

    #[test]
    fn table_ratios() {
        // Cell: 20,885 + 3,068 to citable items, 601 to front matter, 2,016 unmatched.
        let cell = tally_of(20_885 + 3_068, 601, 2_016, 869, 0);
        assert_eq!(format_value(jif_wos_derived(&cell).unwrap(), Decimals::Three), "30.575");
        assert_eq!(format_value(symmetric_if(&cell).unwrap(), Decimals::Three), "27.564");
        let faseb = tally_of(3_650 + 235, 203, 802, 881, 0);
        assert_eq!(format_value(jif_wos_derived(&faseb).unwrap(), Decimals::Three), "5.551");
        assert_eq!(jif_wos_derived(&tally_of(0, 0, 0, 10, 0)).unwrap(), 0.0);
        assert_eq!(jif_wos_derived(&tally_of(5, 0, 0, 0, 0)), Err(IndicatorError::ZeroDenominator));
    }

    #[test]
    fn pct_increase_examples() {
        assert_eq!(format_value(pct_increase(30.410, 27.564).unwrap(), Decimals::One), "10.3");
        assert_eq!(format_value(pct_increase(37.210, 29.398).unwrap(), Decimals::One), "26.6");
        assert_eq!(pct_increase(4.2, 4.2).unwrap(), 0.0);
        assert_eq!(pct_increase(1.0, 0.0), Err(IndicatorError::ZeroDenominator));
    }

    #[test]
    fn self_citation_ratios() {
        let jhep = tally_of(18_651, 0, 0, 3_600, 9_285);
        assert_eq!(format_value(self_citation_rate(&jhep).unwrap(), Decimals::Three), "0.498");
        let expected = (18_651 - 9_285) as f64 / 3_600.0;
        assert_eq!(jif_no_self(&jhep).unwrap(), expected);
        let none = tally_of(40, 2, 3, 10, 0);
        assert_eq!(jif_no_self(&none), jif_wos_derived(&none));
        assert_eq!(self_citation_rate(&tally_of(7, 0, 0, 1, 7)).unwrap(), 1.0);
        assert_eq!(self_citation_rate(&tally_of(0, 0, 0, 1, 0)), Err(IndicatorError::NoCitations));
    }

    #[test]
    fn median_rules() {
        assert_eq!(median(&mut [0, 0, 1, 5, 100]), Some(1.0));
        assert_eq!(median(&mut [4, 2]), Some(3.0));
        assert_eq!(median(&mut []), None);
    }

    #[test]
    fn rendering_rounds_half_to_even() {
        // 0.125 and 0.375 are exact binary ties.
        assert_eq!(format!("{:.2}", 0.125), "0.12");
        assert_eq!(format!("{:.2}", 0.375), "0.38");
        assert_eq!(format_value(0.25, Decimals::One), "0.2");
        assert_eq!(format_value(30.575373993, Decimals::One), "30.6");
        assert_eq!(format_value(f64::INFINITY, Decimals::Three), "inf");
        assert_eq!(format_optional(None, Decimals::Three), "");
        assert_eq!(round_to(30.57537, Decimals::Three), 30.575);
    }

    #[test]
    fn window_bounds() {
        let w = Window::new(2016, 2);
        assert!(!w.contains(2013));
        assert!(w.contains(2014));
        assert!(w.contains(2015));
        assert!(!w.contains(2016));
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
