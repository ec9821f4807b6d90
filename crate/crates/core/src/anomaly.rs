//! Statistical flags for impact-factor engineering: excessive journal
//! self-citation, self-citation concentrated in the impact-factor window
//! (IFBSCP) and citation stacking by a single donor journal.
//!
//! A flag says a statistic crossed a configurable threshold. It is not
//! evidence of intent, and every flag can be recomputed from the corpus.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{JournalIdx, Year};
use crate::indicators::{self, format_value, CitationTally, Decimals, IndicatorError, Window};
use crate::matcher::ResolvedCorpus;
use crate::network::{build_matrix, JournalCitationMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnomalyError {
    #[error("unknown journal `{0}`")]
    UnknownJournal(String),
    #[error("not enough citations in one of the comparison windows")]
    InsufficientHistory,
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AnomalyKind {
    SelfCitationExcess,
    IfbscpBias,
    CitationStacking,
}

impl AnomalyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnomalyKind::SelfCitationExcess => "SelfCitationExcess",
            AnomalyKind::IfbscpBias => "IfbscpBias",
            AnomalyKind::CitationStacking => "CitationStacking",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyFlag {
    pub journal_id: String,
    pub census_year: Year,
    pub kind: AnomalyKind,
    /// May be infinite when the comparison base is zero.
    pub statistic: f64,
    pub threshold: f64,
    /// Donor journal for citation stacking.
    pub evidence: Option<String>,
}

pub const FLAGS_HEADER: &str = "journal_id,census_year,kind,statistic,threshold,evidence";

pub fn write_flags_csv<W: Write>(flags: &[AnomalyFlag], mut out: W) -> io::Result<()> {
    writeln!(out, "{FLAGS_HEADER}")?;
    for f in flags {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            indicators::csv_field(&f.journal_id),
            f.census_year,
            f.kind.as_str(),
            format_value(f.statistic, Decimals::Three),
            format_value(f.threshold, Decimals::Three),
            f.evidence.as_deref().map(indicators::csv_field).unwrap_or_default(),
        )?;
    }
    Ok(())
}

/// Thresholds for all detectors. Deserializes from partial JSON; missing
/// keys keep their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub rate_threshold: f64,
    pub distortion_threshold: f64,
    pub donor_share_threshold: f64,
    /// Minimum incoming window citations before stacking is assessed.
    pub min_citations: u64,
    pub ifbscp_threshold: f64,
    /// Minimum citations in each IFBSCP window before the ratio is assessed.
    pub ifbscp_min_citations: u64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            rate_threshold: 0.20,
            distortion_threshold: 0.25,
            donor_share_threshold: 0.25,
            min_citations: 50,
            ifbscp_threshold: 1.5,
            ifbscp_min_citations: 50,
        }
    }
}

/// Self and total citations to the recent window (`y-2..=y-1`) and the
/// preceding window (`y-7..=y-3`), counted from census-year citing papers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IfbscpCounts {
    pub self_recent: u64,
    pub total_recent: u64,
    pub self_preceding: u64,
    pub total_preceding: u64,
}

impl IfbscpCounts {
    /// Ratio of the recent self-citation share to the preceding one.
    pub fn ratio(&self) -> Result<f64, AnomalyError> {
        if self.total_recent == 0 || self.total_preceding == 0 || self.self_preceding == 0 {
            return Err(AnomalyError::InsufficientHistory);
        }
        let recent = self.self_recent as f64 / self.total_recent as f64;
        let preceding = self.self_preceding as f64 / self.total_preceding as f64;
        Ok(recent / preceding)
    }
}

pub fn ifbscp_counts(resolved: &ResolvedCorpus<'_>, journal_id: &str, census_year: Year) -> Result<IfbscpCounts, AnomalyError> {
    let j = journal_index(resolved, journal_id)?;
    Ok(ifbscp_counts_idx(resolved, j, census_year))
}

fn ifbscp_counts_idx(resolved: &ResolvedCorpus<'_>, j: JournalIdx, census_year: Year) -> IfbscpCounts {
    let mut counts = IfbscpCounts::default();
    for &r in resolved.incoming(j) {
        let r = r as usize;
        if resolved.citing_year(r) != census_year {
            continue;
        }
        let c = resolved.classification(r);
        let Some(age) = c.cited_year().map(|y| census_year - y) else {
            continue;
        };
        let is_self = u64::from(resolved.citing_journal(r) == j);
        match age {
            1..=2 => {
                counts.total_recent += 1;
                counts.self_recent += is_self;
            }
            3..=7 => {
                counts.total_preceding += 1;
                counts.self_preceding += is_self;
            }
            _ => {}
        }
    }
    counts
}

/// Self-citation share among census-year citations to the two-year window,
/// divided by the share among citations to the five years before it.
pub fn ifbscp(resolved: &ResolvedCorpus<'_>, journal_id: &str, census_year: Year) -> Result<f64, AnomalyError> {
    ifbscp_counts(resolved, journal_id, census_year)?.ratio()
}

/// Flags a journal whose self-citation rate and self-citation distortion of
/// the JIF both exceed their thresholds. Distortion is
/// `(jif - jif_no_self) / jif_no_self`; when every citation is a
/// self-citation it is infinite and the flag is raised.
pub fn self_citation_flag(tally: &CitationTally, distortion_threshold: f64, rate_threshold: f64) -> Option<AnomalyFlag> {
    let total = tally.total_cites();
    if tally.self_citations == 0 || total == 0 {
        return None;
    }
    let rate = tally.self_citations as f64 / total as f64;
    let others = total - tally.self_citations;
    let distortion = if others == 0 {
        f64::INFINITY
    } else {
        tally.self_citations as f64 / others as f64
    };
    (others == 0 || (rate > rate_threshold && distortion > distortion_threshold)).then(|| AnomalyFlag {
        journal_id: tally.journal_id.clone(),
        census_year: tally.census_year,
        kind: AnomalyKind::SelfCitationExcess,
        statistic: distortion,
        threshold: distortion_threshold,
        evidence: None,
    })
}

/// Flags every (recipient, donor) pair where one other journal supplies more
/// than `donor_share_threshold` of the recipient's incoming citations
/// (self-citations included in the total).
pub fn stacking_detector(matrix: &JournalCitationMatrix, donor_share_threshold: f64, min_citations: u64) -> Vec<AnomalyFlag> {
    let incoming = matrix.column_sums();
    let ids = matrix.journal_ids();
    let mut flags: Vec<AnomalyFlag> = matrix
        .entries()
        .iter()
        .filter(|&&(i, j, _)| i != j && incoming[j as usize] >= min_citations)
        .filter_map(|&(i, j, count)| {
            let share = count as f64 / incoming[j as usize] as f64;
            (share > donor_share_threshold).then(|| AnomalyFlag {
                journal_id: ids[j as usize].clone(),
                census_year: matrix.census_year(),
                kind: AnomalyKind::CitationStacking,
                statistic: share,
                threshold: donor_share_threshold,
                evidence: Some(ids[i as usize].clone()),
            })
        })
        .collect();
    flags.sort_by(|a, b| (&a.journal_id, &a.evidence).cmp(&(&b.journal_id, &b.evidence)));
    flags
}

/// `jif_b / jif_a`.
pub fn burst_ratio(jif_a: f64, jif_b: f64) -> Result<f64, AnomalyError> {
    if jif_a == 0.0 {
        return Err(AnomalyError::ZeroDenominator);
    }
    Ok(jif_b / jif_a)
}

/// Ratio of a journal's two-year JIF in `year_b` to that in `year_a`.
pub fn editor_burst(resolved: &ResolvedCorpus<'_>, journal_id: &str, year_a: Year, year_b: Year) -> Result<f64, AnomalyError> {
    let j = journal_index(resolved, journal_id)?;
    let jif = |year| indicators::jif_wos_derived(&indicators::tally_idx(resolved, j, Window::new(year, 2)));
    let a = jif(year_a).map_err(|_| AnomalyError::ZeroDenominator)?;
    burst_ratio(a, jif(year_b)?)
}

fn journal_index(resolved: &ResolvedCorpus<'_>, journal_id: &str) -> Result<JournalIdx, AnomalyError> {
    resolved
        .corpus()
        .journal_idx(journal_id)
        .ok_or_else(|| AnomalyError::UnknownJournal(journal_id.to_string()))
}

/// Runs every detector over all journals for one census year. Flags are
/// ordered by journal, kind and donor.
pub fn detect_all(resolved: &ResolvedCorpus<'_>, census_year: Year, config: &DetectorConfig) -> Vec<AnomalyFlag> {
    let corpus = resolved.corpus();
    let journals: Vec<JournalIdx> = corpus.journal_indices().collect();
    let mut flags: Vec<AnomalyFlag> = journals
        .par_iter()
        .flat_map_iter(|&j| {
            let tally = indicators::tally_idx(resolved, j, Window::new(census_year, 2));
            let self_flag = self_citation_flag(&tally, config.distortion_threshold, config.rate_threshold);
            let counts = ifbscp_counts_idx(resolved, j, census_year);
            let enough = counts.total_recent >= config.ifbscp_min_citations
                && counts.total_preceding >= config.ifbscp_min_citations;
            let ifbscp_flag = counts
                .ratio()
                .ok()
                .filter(|&ratio| enough && ratio > config.ifbscp_threshold)
                .map(|ratio| AnomalyFlag {
                    journal_id: tally.journal_id.clone(),
                    census_year,
                    kind: AnomalyKind::IfbscpBias,
                    statistic: ratio,
                    threshold: config.ifbscp_threshold,
                    evidence: None,
                });
            self_flag.into_iter().chain(ifbscp_flag)
        })
        .collect();
    let matrix = build_matrix(resolved, census_year, 2);
    flags.extend(stacking_detector(&matrix, config.donor_share_threshold, config.min_citations));
    flags.sort_by(|a, b| (&a.journal_id, a.kind, &a.evidence).cmp(&(&b.journal_id, b.kind, &b.evidence)));
    flags
}
