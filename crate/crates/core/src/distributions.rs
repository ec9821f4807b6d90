//! Per-paper citation distributions, cohort citation curves, discipline
//! profiles, indicator inflation over time and correlation.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{JournalIdx, Year};
use crate::indicators::{self, IndicatorError, IndicatorReport, Window};
use crate::matcher::ResolvedCorpus;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("journal has no citable items in the window")]
    EmptyWindow,
    #[error("discipline `{0}` has no papers in the cohort year")]
    EmptyCohort(String),
    #[error("discipline `{0}` has no journals or no papers in the census year")]
    EmptyDiscipline(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("at least two snapshots are needed, got {0}")]
    TooFewSnapshots(usize),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
}

/// Citation distribution of a journal's citable items in one window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub journal_id: String,
    pub census_year: Year,
    /// citation count -> number of papers with that count
    pub histogram: BTreeMap<u64, u64>,
    pub mean: f64,
    pub median: f64,
    pub jif_value: f64,
    pub share_at_or_above_jif: f64,
    pub n_at_or_above_jif: u64,
    pub n_papers: u64,
}

impl DistributionSummary {
    /// Summarizes per-paper citation counts against a reference JIF.
    pub fn from_counts(
        journal_id: impl Into<String>,
        census_year: Year,
        counts: &[u64],
        jif_value: f64,
    ) -> Result<Self, DistributionError> {
        if counts.is_empty() {
            return Err(DistributionError::EmptyWindow);
        }
        let mut histogram = BTreeMap::new();
        for &c in counts {
            *histogram.entry(c).or_insert(0u64) += 1;
        }
        let n = counts.len() as u64;
        let total: u64 = counts.iter().sum();
        let at_or_above = counts.iter().filter(|&&c| c as f64 >= jif_value).count() as u64;
        let mut sorted = counts.to_vec();
        Ok(DistributionSummary {
            journal_id: journal_id.into(),
            census_year,
            histogram,
            mean: total as f64 / n as f64,
            median: indicators::median(&mut sorted).expect("non-empty"),
            jif_value,
            share_at_or_above_jif: at_or_above as f64 / n as f64,
            n_at_or_above_jif: at_or_above,
            n_papers: n,
        })
    }

    /// `citations,paper_count` rows in ascending citation order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "citations,paper_count")?;
        for (citations, papers) in &self.histogram {
            writeln!(out, "{citations},{papers}")?;
        }
        Ok(())
    }
}

/// Per-paper distribution of a journal's citable items, compared with
/// `jif_value` (papers at or above it count towards the share).
pub fn distribution(
    resolved: &ResolvedCorpus<'_>,
    journal_id: &str,
    census_year: Year,
    window_years: u32,
    jif_value: f64,
) -> Result<DistributionSummary, DistributionError> {
    let counts = indicators::per_paper_counts(resolved, journal_id, census_year, window_years)?;
    DistributionSummary::from_counts(journal_id, census_year, &counts, jif_value)
}

pub const SHARE_BUCKETS: usize = 20;

/// Journals bucketed by their share of papers at or above the JIF, in
/// half-open buckets five percentage points wide. A share of exactly 1 falls
/// in the last bucket.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShareHistogram {
    pub counts: [u64; SHARE_BUCKETS],
    pub n_journals: u64,
    pub n_at_least_half: u64,
}

impl ShareHistogram {
    /// `[lower, upper)` in percent for bucket `i`.
    pub fn bucket_bounds(i: usize) -> (u32, u32) {
        let lower = 5 * i as u32;
        (lower, lower + 5)
    }

    pub fn bucket_of(summary: &DistributionSummary) -> usize {
        // exact integer arithmetic: floor(20 * k / n)
        let idx = (SHARE_BUCKETS as u64 * summary.n_at_or_above_jif / summary.n_papers.max(1)) as usize;
        idx.min(SHARE_BUCKETS - 1)
    }

    pub fn fraction(&self, bucket: usize) -> f64 {
        self.counts[bucket] as f64 / self.n_journals as f64
    }

    /// Fraction of journals in buckets lying within `[lower_pct, upper_pct)`.
    pub fn fraction_between(&self, lower_pct: u32, upper_pct: u32) -> f64 {
        let inside: u64 = (0..SHARE_BUCKETS)
            .filter(|&i| {
                let (lo, hi) = Self::bucket_bounds(i);
                lo >= lower_pct && hi <= upper_pct
            })
            .map(|i| self.counts[i])
            .sum();
        inside as f64 / self.n_journals as f64
    }

    pub fn fraction_at_least_half(&self) -> f64 {
        self.n_at_least_half as f64 / self.n_journals as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "bucket_lower_pct,bucket_upper_pct,journals,fraction")?;
        for i in 0..SHARE_BUCKETS {
            let (lo, hi) = Self::bucket_bounds(i);
            writeln!(out, "{lo},{hi},{},{:.6}", self.counts[i], self.fraction(i))?;
        }
        Ok(())
    }
}

pub fn jcr_share_histogram(summaries: &[DistributionSummary]) -> ShareHistogram {
    let mut counts = [0u64; SHARE_BUCKETS];
    let mut at_least_half = 0;
    for s in summaries {
        counts[ShareHistogram::bucket_of(s)] += 1;
        if 2 * s.n_at_or_above_jif >= s.n_papers {
            at_least_half += 1;
        }
    }
    ShareHistogram {
        counts,
        n_journals: summaries.len() as u64,
        n_at_least_half: at_least_half,
    }
}

/// Citations received by one publication-year cohort, by years since
/// publication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortCurve {
    pub label: String,
    pub pub_year: Year,
    pub n_papers: u64,
    /// index k: citations made in `pub_year + k`, for k in `0..=horizon`
    pub per_year_citations: Vec<u64>,
    /// cumulative share of all citations the cohort ever received
    pub cumulative_fraction: Vec<f64>,
    pub total_citations: u64,
    /// Share received up to two years after publication.
    pub first_two_year_share: f64,
    /// First k whose cumulative share reaches one half.
    pub years_to_half: Option<u32>,
    /// The horizon misses part of the citations.
    pub truncated: bool,
}

impl CohortCurve {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "years_since_publication,citations,cumulative_fraction")?;
        for (k, (c, f)) in self.per_year_citations.iter().zip(&self.cumulative_fraction).enumerate() {
            writeln!(out, "{k},{c},{f:.6}")?;
        }
        Ok(())
    }
}

fn discipline_journals(resolved: &ResolvedCorpus<'_>, discipline: &str) -> Vec<JournalIdx> {
    let corpus = resolved.corpus();
    corpus
        .journal_indices()
        .filter(|&j| corpus.journal(j).discipline == discipline)
        .collect()
}

/// Matched citations to papers a discipline published in `pub_year`.
pub fn cohort_curve(
    resolved: &ResolvedCorpus<'_>,
    discipline: &str,
    pub_year: Year,
    horizon_years: u32,
) -> Result<CohortCurve, DistributionError> {
    let corpus = resolved.corpus();
    let journals = discipline_journals(resolved, discipline);
    let n_papers = journals
        .iter()
        .flat_map(|&j| corpus.papers_of(j))
        .filter(|&&p| corpus.paper(p).pub_year == pub_year)
        .count() as u64;
    if n_papers == 0 {
        return Err(DistributionError::EmptyCohort(discipline.to_string()));
    }

    let mut per_year = vec![0u64; horizon_years as usize + 1];
    let mut total = 0u64;
    for &j in &journals {
        for &r in resolved.incoming(j) {
            let r = r as usize;
            let c = resolved.classification(r);
            if c.cited_paper().is_none() || c.cited_year() != Some(pub_year) {
                continue;
            }
            let age = resolved.citing_year(r) - pub_year;
            if age < 0 {
                continue;
            }
            total += 1;
            if let Some(slot) = per_year.get_mut(age as usize) {
                *slot += 1;
            }
        }
    }

    let mut running = 0u64;
    let cumulative: Vec<f64> = per_year
        .iter()
        .map(|&c| {
            running += c;
            if total == 0 {
                0.0
            } else {
                running as f64 / total as f64
            }
        })
        .collect();
    let first_two = cumulative[cumulative.len().min(3) - 1];
    let years_to_half = (total > 0)
        .then(|| cumulative.iter().position(|&f| f >= 0.5).map(|k| k as u32))
        .flatten();
    Ok(CohortCurve {
        label: discipline.to_string(),
        pub_year,
        n_papers,
        truncated: running < total,
        per_year_citations: per_year,
        cumulative_fraction: cumulative,
        total_citations: total,
        first_two_year_share: first_two,
        years_to_half,
    })
}

/// Indicator values of every journal for one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub year: Year,
    pub reports: Vec<IndicatorReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InflationPoint {
    pub year: Year,
    pub mean_jif: f64,
    /// aligned with [`InflationSeries::thresholds`]
    pub count_above_threshold: Vec<u64>,
    pub journal_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InflationSeries {
    pub thresholds: Vec<f64>,
    pub points: Vec<InflationPoint>,
    /// Among journals with a JIF in the first and last snapshot, the share
    /// whose JIF rose.
    pub share_increased: f64,
    /// Per journal and snapshot: share of that snapshot's journals with a
    /// strictly lower JIF.
    pub rank_trajectories: BTreeMap<String, Vec<Option<f64>>>,
}

impl InflationSeries {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "year,mean_jif,journal_count")?;
        for t in &self.thresholds {
            write!(out, ",above_{t}")?;
        }
        writeln!(out)?;
        for p in &self.points {
            write!(out, "{},{:.3},{}", p.year, p.mean_jif, p.journal_count)?;
            for c in &p.count_above_threshold {
                write!(out, ",{c}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn snapshot_jif(report: &IndicatorReport) -> Option<f64> {
    report.jif2.or(report.jif_wos_derived)
}

/// Mean JIF and counts strictly above each threshold per snapshot, using
/// `jif2` (or the WOS-derived JIF when `jif2` is missing).
pub fn inflation_series(snapshots: &[Snapshot], thresholds: &[f64]) -> Result<InflationSeries, DistributionError> {
    if snapshots.len() < 2 {
        return Err(DistributionError::TooFewSnapshots(snapshots.len()));
    }
    let mut points = Vec::with_capacity(snapshots.len());
    let mut rank_trajectories: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
    for (s, snapshot) in snapshots.iter().enumerate() {
        let values: Vec<(&str, f64)> = snapshot
            .reports
            .iter()
            .filter_map(|r| snapshot_jif(r).map(|v| (r.journal_id.as_str(), v)))
            .collect();
        let n = values.len() as u64;
        let mean = if n == 0 {
            0.0
        } else {
            values.iter().map(|(_, v)| v).sum::<f64>() / n as f64
        };
        let counts = thresholds
            .iter()
            .map(|&t| values.iter().filter(|(_, v)| *v > t).count() as u64)
            .collect();
        points.push(InflationPoint {
            year: snapshot.year,
            mean_jif: mean,
            count_above_threshold: counts,
            journal_count: n,
        });

        let mut sorted: Vec<f64> = values.iter().map(|(_, v)| *v).collect();
        sorted.sort_by(f64::total_cmp);
        for (id, v) in &values {
            let below = sorted.partition_point(|x| x < v);
            let trajectory = rank_trajectories
                .entry((*id).to_string())
                .or_insert_with(|| vec![None; snapshots.len()]);
            trajectory[s] = Some(below as f64 / n as f64);
        }
    }

    let first: HashMap<&str, f64> = jif_map(&snapshots[0]);
    let last: HashMap<&str, f64> = jif_map(snapshots.last().expect("len >= 2"));
    let (mut both, mut rose) = (0u64, 0u64);
    for (id, v0) in &first {
        if let Some(v1) = last.get(id) {
            both += 1;
            rose += u64::from(v1 > v0);
        }
    }
    Ok(InflationSeries {
        thresholds: thresholds.to_vec(),
        points,
        share_increased: if both == 0 { 0.0 } else { rose as f64 / both as f64 },
        rank_trajectories,
    })
}

fn jif_map(snapshot: &Snapshot) -> HashMap<&str, f64> {
    snapshot
        .reports
        .iter()
        .filter_map(|r| snapshot_jif(r).map(|v| (r.journal_id.as_str(), v)))
        .collect()
}

/// Citing practices and JIF level of one discipline in a census year.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisciplineProfile {
    pub discipline: String,
    pub census_year: Year,
    pub n_journals: u64,
    /// journals with a defined two-year JIF
    pub n_journals_with_jif: u64,
    /// papers published in the census year, whose references are profiled
    pub n_papers: u64,
    pub mean_jif: Option<f64>,
    pub max_jif: Option<f64>,
    pub mean_refs: f64,
    /// references attributed to an indexed journal (any class but unresolved)
    pub mean_refs_to_indexed: f64,
    pub mean_ref_age: Option<f64>,
    /// share of references whose cited year is known
    pub ref_age_coverage: f64,
}

/// Aggregates for one discipline: JIF over its journals, and reference-list
/// length and age over papers it published in the census year. A reference's
/// year comes from its classification, else from its `cited_year` field.
pub fn discipline_profile(
    resolved: &ResolvedCorpus<'_>,
    discipline: &str,
    census_year: Year,
) -> Result<DisciplineProfile, DistributionError> {
    let corpus = resolved.corpus();
    let journals = discipline_journals(resolved, discipline);
    let empty = || DistributionError::EmptyDiscipline(discipline.to_string());
    if journals.is_empty() {
        return Err(empty());
    }

    let jifs: Vec<f64> = journals
        .iter()
        .filter_map(|&j| indicators::jif_wos_derived(&indicators::tally_idx(resolved, j, Window::new(census_year, 2))).ok())
        .collect();

    let (mut n_papers, mut refs, mut indexed, mut dated, mut age_sum) = (0u64, 0u64, 0u64, 0u64, 0i64);
    for &j in &journals {
        for &p in corpus.papers_of(j) {
            if corpus.paper(p).pub_year != census_year {
                continue;
            }
            n_papers += 1;
            for &r in corpus.references_of(p) {
                let r = r as usize;
                refs += 1;
                let c = resolved.classification(r);
                indexed += u64::from(c.journal().is_some());
                if let Some(year) = c.cited_year().or(corpus.references()[r].cited_year) {
                    dated += 1;
                    age_sum += i64::from(census_year - year);
                }
            }
        }
    }
    if n_papers == 0 {
        return Err(empty());
    }
    Ok(DisciplineProfile {
        discipline: discipline.to_string(),
        census_year,
        n_journals: journals.len() as u64,
        n_journals_with_jif: jifs.len() as u64,
        n_papers,
        mean_jif: (!jifs.is_empty()).then(|| jifs.iter().sum::<f64>() / jifs.len() as f64),
        max_jif: jifs.iter().copied().reduce(f64::max),
        mean_refs: refs as f64 / n_papers as f64,
        mean_refs_to_indexed: indexed as f64 / n_papers as f64,
        mean_ref_age: (dated > 0).then(|| age_sum as f64 / dated as f64),
        ref_age_coverage: if refs == 0 { 0.0 } else { dated as f64 / refs as f64 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub pearson_r: f64,
    pub r_squared: f64,
}

/// Pearson correlation of paired samples.
pub fn correlate(xs: &[f64], ys: &[f64]) -> Result<Correlation, DistributionError> {
    if xs.len() != ys.len() {
        return Err(DistributionError::DegenerateInput("samples differ in length"));
    }
    if xs.len() < 3 {
        return Err(DistributionError::DegenerateInput("need at least three pairs"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(DistributionError::DegenerateInput("zero variance"));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(Correlation {
        pearson_r: r,
        r_squared: r * r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(counts: &[u64], jif: f64) -> DistributionSummary {
        DistributionSummary::from_counts("j", 2016, counts, jif).unwrap()
    }

    #[test]
    fn share_at_or_above() {
        let s = summary(&[0, 1, 2, 3, 4], 2.0);
        assert_eq!(s.share_at_or_above_jif, 0.6);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.median, 2.0);
        assert_eq!(s.histogram.values().sum::<u64>(), s.n_papers);
        assert_eq!(summary(&[7], 7.0).share_at_or_above_jif, 1.0);
        assert_eq!(
            DistributionSummary::from_counts("j", 2016, &[], 1.0),
            Err(DistributionError::EmptyWindow)
        );
    }

    #[test]
    fn distribution_csv() {
        let mut out = Vec::new();
        summary(&[0, 0, 3], 1.0).write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "citations,paper_count\n0,2\n3,1\n");
    }

    #[test]
    fn share_buckets_are_half_open() {
        // 3 of 10 at or above: share 0.30 sits at the lower edge of [30, 35).
        let all_thirty: Vec<_> = (0..4)
            .map(|_| summary(&[9, 9, 9, 0, 0, 0, 0, 0, 0, 0], 2.7))
            .collect();
        let h = jcr_share_histogram(&all_thirty);
        assert_eq!(h.counts[6], 4);
        assert_eq!(h.fraction(6), 1.0);
        assert_eq!(ShareHistogram::bucket_bounds(6), (30, 35));

        let edges = [
            summary(&[1, 0, 0, 0, 0], 1.0),             // 0.20 -> [20, 25)
            summary(&[1, 1, 1, 1, 0, 0, 0, 0, 0, 0], 1.0), // 0.40 -> [40, 45)
            summary(&[1, 1], 1.0),                      // 1.00 -> last bucket
            summary(&[1, 0], 1.0),                      // 0.50 -> [50, 55)
        ];
        let h = jcr_share_histogram(&edges);
        assert_eq!(h.counts[4], 1);
        assert_eq!(h.counts[8], 1);
        assert_eq!(h.counts[19], 1);
        assert_eq!(h.counts[10], 1);
        assert_eq!(h.fraction_at_least_half(), 0.5);
        assert_eq!(h.fraction_between(20, 40), 0.25);
    }

    #[test]
    fn correlation_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let doubled: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let c = correlate(&xs, &doubled).unwrap();
        assert!((c.pearson_r - 1.0).abs() < 1e-15 && (c.r_squared - 1.0).abs() < 1e-15);
        let negated: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((correlate(&xs, &negated).unwrap().pearson_r + 1.0).abs() < 1e-15);
        assert!(correlate(&xs[..2], &doubled[..2]).is_err());
        assert!(correlate(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(correlate(&xs, &doubled[..3]).is_err());
    }

    fn report(id: &str, jif: f64) -> IndicatorReport {
        IndicatorReport {
            journal_id: id.into(),
            census_year: 2016,
            jif2: Some(jif),
            jif5: None,
            jif_wos_derived: None,
            symmetric_if: None,
            jif_no_self: None,
            citescore: None,
            median_cites: None,
            self_citation_rate: None,
            pct_increase: None,
        }
    }

    #[test]
    fn flat_inflation() {
        let reports = vec![report("a", 1.0), report("b", 12.0), report("c", 3.0)];
        let snapshots = vec![
            Snapshot {
                year: 2015,
                reports: reports.clone(),
            },
            Snapshot { year: 2016, reports },
        ];
        let series = inflation_series(&snapshots, &[10.0]).unwrap();
        assert_eq!(series.points[0].mean_jif, series.points[1].mean_jif);
        assert_eq!(series.points[0].mean_jif, 16.0 / 3.0);
        assert_eq!(series.points[1].count_above_threshold, vec![1]);
        assert_eq!(series.share_increased, 0.0);
        assert_eq!(series.rank_trajectories["b"], vec![Some(2.0 / 3.0), Some(2.0 / 3.0)]);
        assert_eq!(
            inflation_series(&snapshots[..1], &[10.0]),
            Err(DistributionError::TooFewSnapshots(1))
        );
    }
}
