//! Journal-to-journal citation matrix and network indicators: Eigenfactor,
//! Article Influence, SJR-style prestige and SNIP.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{JournalIdx, PaperIdx, Year};
use crate::indicators::{csv_field, Window};
use crate::matcher::{CitationClass, ResolvedCorpus};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("matrix has no citations between distinct journals")]
    NoCitations,
    #[error("iteration did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("no journal has articles in the window")]
    ZeroArticles,
    #[error("expected a {expected}-year window, got {found}")]
    InvalidWindow { expected: u32, found: u32 },
    #[error("matrix dimensions are inconsistent: {0}")]
    Dimension(String),
    #[error("unknown journal `{0}`")]
    UnknownJournal(String),
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("journal is not cited, citation potential is undefined")]
    NoCitingPapers,
    #[error("invalid ranking parameter: {0}")]
    InvalidParams(&'static str),
}

/// Tuning constants for the iterative rankings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct RankingParams {
    pub damping: f64,
    /// L1 distance between successive iterates below which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Largest share of a journal's incoming citations one other journal may
    /// contribute to SJR.
    pub sjr_single_journal_cap: f64,
    /// Largest share of a journal's incoming citations that may be
    /// self-citations for SJR.
    pub sjr_self_citation_cap: f64,
}

impl Default for RankingParams {
    fn default() -> Self {
        RankingParams {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 10_000,
            sjr_single_journal_cap: 0.10,
            sjr_self_citation_cap: 0.33,
        }
    }
}

impl RankingParams {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(NetworkError::InvalidParams("damping must lie in (0, 1)"));
        }
        if !(self.tolerance > 0.0) {
            return Err(NetworkError::InvalidParams("tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(NetworkError::InvalidParams("max_iterations must be positive"));
        }
        for cap in [self.sjr_single_journal_cap, self.sjr_self_citation_cap] {
            if !(0.0..=1.0).contains(&cap) {
                return Err(NetworkError::InvalidParams("caps must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Citation counts between journals for one census year and window.
/// Entry `(i, j)` counts citations from papers of journal `i` published in the
/// census year to journal `j`'s window items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JournalCitationMatrix {
    journal_ids: Vec<String>,
    // nonzero entries sorted by (citing, cited)
    entries: Vec<(u32, u32, u64)>,
    article_counts: Vec<u64>,
    census_year: Year,
    window_years: u32,
}

impl JournalCitationMatrix {
    /// Builds a matrix from dense rows (`counts[i][j]`: `i` cites `j`).
    pub fn from_dense(
        journal_ids: Vec<String>,
        counts: &[Vec<u64>],
        article_counts: Vec<u64>,
        census_year: Year,
        window_years: u32,
    ) -> Result<Self, NetworkError> {
        let n = journal_ids.len();
        if counts.len() != n || counts.iter().any(|row| row.len() != n) {
            return Err(NetworkError::Dimension(format!("counts must be {n}x{n}")));
        }
        if article_counts.len() != n {
            return Err(NetworkError::Dimension(format!("expected {n} article counts")));
        }
        let entries = counts
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, c)| **c > 0)
                    .map(move |(j, c)| (i as u32, j as u32, *c))
            })
            .collect();
        Ok(JournalCitationMatrix {
            journal_ids,
            entries,
            article_counts,
            census_year,
            window_years,
        })
    }

    pub fn n(&self) -> usize {
        self.journal_ids.len()
    }

    pub fn journal_ids(&self) -> &[String] {
        &self.journal_ids
    }

    pub fn article_counts(&self) -> &[u64] {
        &self.article_counts
    }

    pub fn census_year(&self) -> Year {
        self.census_year
    }

    pub fn window_years(&self) -> u32 {
        self.window_years
    }

    /// Nonzero `(citing, cited, count)` entries in row-major order.
    pub fn entries(&self) -> &[(u32, u32, u64)] {
        &self.entries
    }

    pub fn get(&self, citing: usize, cited: usize) -> u64 {
        self.entries
            .binary_search_by_key(&(citing as u32, cited as u32), |&(i, j, _)| (i, j))
            .map_or(0, |k| self.entries[k].2)
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut dense = vec![vec![0; self.n()]; self.n()];
        for &(i, j, c) in &self.entries {
            dense[i as usize][j as usize] = c;
        }
        dense
    }

    /// Citations made by each journal.
    pub fn row_sums(&self) -> Vec<u64> {
        let mut sums = vec![0; self.n()];
        for &(i, _, c) in &self.entries {
            sums[i as usize] += c;
        }
        sums
    }

    /// Citations received by each journal.
    pub fn column_sums(&self) -> Vec<u64> {
        let mut sums = vec![0; self.n()];
        for &(_, j, c) in &self.entries {
            sums[j as usize] += c;
        }
        sums
    }

    pub fn index_of(&self, journal_id: &str) -> Option<usize> {
        self.journal_ids.iter().position(|id| id == journal_id)
    }

    /// Same matrix with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        JournalCitationMatrix {
            entries: self.entries.iter().map(|&(i, j, c)| (i, j, c * factor)).collect(),
            ..self.clone()
        }
    }

    /// CSV with a header row and first column of journal ids; rows cite
    /// columns.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "journal_id")?;
        for id in &self.journal_ids {
            write!(out, ",{}", csv_field(id))?;
        }
        writeln!(out)?;
        let mut entries = self.entries.iter().peekable();
        for (i, id) in self.journal_ids.iter().enumerate() {
            write!(out, "{}", csv_field(id))?;
            for j in 0..self.n() {
                let value = match entries.peek() {
                    Some(&&(ei, ej, c)) if ei as usize == i && ej as usize == j => {
                        entries.next();
                        c
                    }
                    _ => 0,
                };
                write!(out, ",{value}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Counts matched and unmatched citations between every pair of journals.
/// Unresolved references have no target journal and are skipped.
pub fn build_matrix(resolved: &ResolvedCorpus<'_>, census_year: Year, window_years: u32) -> JournalCitationMatrix {
    let corpus = resolved.corpus();
    let window = Window::new(census_year, window_years);
    let journals: Vec<JournalIdx> = corpus.journal_indices().collect();
    let columns: Vec<Vec<(u32, u32, u64)>> = journals
        .par_iter()
        .map(|&cited| {
            let mut counts: HashMap<u32, u64> = HashMap::new();
            for &r in resolved.incoming(cited) {
                let r = r as usize;
                let c = resolved.classification(r);
                if c.class() == CitationClass::Unresolved {
                    continue;
                }
                let in_window = c.cited_year().is_some_and(|y| window.contains(y));
                if in_window && resolved.citing_year(r) == census_year {
                    *counts.entry(resolved.citing_journal(r).0).or_default() += 1;
                }
            }
            counts.into_iter().map(|(i, c)| (i, cited.0, c)).collect()
        })
        .collect();
    let mut entries: Vec<(u32, u32, u64)> = columns.into_iter().flatten().collect();
    entries.sort_unstable_by_key(|&(i, j, _)| (i, j));

    let article_counts = journals
        .iter()
        .map(|&j| {
            corpus
                .papers_of(j)
                .iter()
                .map(|&p| corpus.paper(p))
                .filter(|p| p.doc_type.is_citable() && window.contains(p.pub_year))
                .count() as u64
        })
        .collect();

    JournalCitationMatrix {
        journal_ids: corpus.journals().iter().map(|j| j.journal_id.clone()).collect(),
        entries,
        article_counts,
        census_year,
        window_years,
    }
}

fn article_shares(article_counts: &[u64]) -> Result<Vec<f64>, NetworkError> {
    let total: u64 = article_counts.iter().sum();
    if total == 0 {
        return Err(NetworkError::ZeroArticles);
    }
    Ok(article_counts.iter().map(|&a| a as f64 / total as f64).collect())
}

/// Damped power iteration over a row-stochastic transition given as weighted
/// edges. Rows without outgoing weight, and the teleport step, redistribute
/// mass along `teleport`.
fn damped_stationary(
    n: usize,
    edges: &[(usize, usize, f64)],
    teleport: &[f64],
    params: &RankingParams,
) -> Result<Vec<f64>, NetworkError> {
    let mut out = vec![0.0; n];
    for &(i, _, w) in edges {
        out[i] += w;
    }
    let transitions: Vec<(usize, usize, f64)> = edges
        .iter()
        .filter(|&&(i, _, w)| w > 0.0 && out[i] > 0.0)
        .map(|&(i, j, w)| (i, j, w / out[i]))
        .collect();
    let dangling: Vec<usize> = (0..n).filter(|&i| out[i] == 0.0).collect();
    let alpha = params.damping;

    let mut current = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..params.max_iterations {
        let dangling_mass: f64 = dangling.iter().map(|&i| current[i]).sum();
        let base = alpha * dangling_mass + (1.0 - alpha);
        for (slot, &t) in next.iter_mut().zip(teleport) {
            *slot = base * t;
        }
        for &(i, j, p) in &transitions {
            next[j] += alpha * current[i] * p;
        }
        let diff: f64 = next.iter().zip(&current).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut current, &mut next);
        if diff < params.tolerance {
            let total: f64 = current.iter().sum();
            return Ok(current.into_iter().map(|x| x / total).collect());
        }
    }
    Err(NetworkError::NonConvergence {
        iterations: params.max_iterations,
    })
}

/// Eigenfactor-style scores summing to 100.
///
/// Self-citations are dropped, each journal's outgoing citations are
/// normalized, journals citing nothing and the teleport step follow the
/// article-count distribution.
pub fn eigenfactor(matrix: &JournalCitationMatrix, params: &RankingParams) -> Result<BTreeMap<String, f64>, NetworkError> {
    let scores = eigenfactor_vector(matrix, params)?;
    Ok(matrix.journal_ids.iter().cloned().zip(scores).collect())
}

/// [`eigenfactor`] aligned with [`JournalCitationMatrix::journal_ids`].
pub fn eigenfactor_vector(matrix: &JournalCitationMatrix, params: &RankingParams) -> Result<Vec<f64>, NetworkError> {
    params.validate()?;
    let edges: Vec<(usize, usize, f64)> = matrix
        .entries
        .iter()
        .filter(|&&(i, j, _)| i != j)
        .map(|&(i, j, c)| (i as usize, j as usize, c as f64))
        .collect();
    if edges.is_empty() {
        return Err(NetworkError::NoCitations);
    }
    let teleport = article_shares(&matrix.article_counts)?;
    let stationary = damped_stationary(matrix.n(), &edges, &teleport, params)?;
    Ok(stationary.into_iter().map(|x| 100.0 * x).collect())
}

/// Eigenfactor per article, scaled so the article-weighted mean is 1.
/// Journals without articles are left out with a warning.
pub fn article_influence(
    ef_scores: &BTreeMap<String, f64>,
    article_counts: &BTreeMap<String, u64>,
) -> Result<BTreeMap<String, f64>, NetworkError> {
    let mut included = Vec::new();
    for (id, &ef) in ef_scores {
        match article_counts.get(id) {
            Some(&a) if a > 0 => included.push((id, ef, a)),
            _ => log::warn!("journal `{id}` has no articles in the window, no article influence"),
        }
    }
    let total_ef: f64 = included.iter().map(|&(_, ef, _)| ef).sum();
    let total_articles: u64 = included.iter().map(|&(_, _, a)| a).sum();
    if total_articles == 0 {
        return Err(NetworkError::ZeroArticles);
    }
    if total_ef == 0.0 {
        return Err(NetworkError::NoCitations);
    }
    let mean_per_article = total_ef / total_articles as f64;
    Ok(included
        .into_iter()
        .map(|(id, ef, a)| (id.clone(), ef / a as f64 / mean_per_article))
        .collect())
}

/// Article counts of a matrix keyed by journal id.
pub fn article_count_map(matrix: &JournalCitationMatrix) -> BTreeMap<String, u64> {
    matrix
        .journal_ids
        .iter()
        .cloned()
        .zip(matrix.article_counts.iter().copied())
        .collect()
}

/// Applies the SJR caps to a matrix: each journal's self-citations are capped
/// at `sjr_self_citation_cap` of its incoming total and each donor's entry at
/// `sjr_single_journal_cap` of it.
pub fn sjr_capped_weights(matrix: &JournalCitationMatrix, params: &RankingParams) -> Vec<(usize, usize, f64)> {
    let incoming = matrix.column_sums();
    matrix
        .entries
        .iter()
        .map(|&(i, j, c)| {
            let cap = if i == j {
                params.sjr_self_citation_cap
            } else {
                params.sjr_single_journal_cap
            };
            let limit = cap * incoming[j as usize] as f64;
            (i as usize, j as usize, (c as f64).min(limit))
        })
        .filter(|&(_, _, w)| w > 0.0)
        .collect()
}

/// SJR-style prestige per paper for journals with citable items in the
/// three-year window.
///
/// Prestige flows along capped citation links; the teleport step and
/// journals citing nothing distribute prestige by share of citable documents.
/// The stationary prestige is divided by that share, so a journal whose
/// prestige is proportional to its size scores 1.
pub fn sjr(matrix: &JournalCitationMatrix, params: &RankingParams) -> Result<BTreeMap<String, f64>, NetworkError> {
    if matrix.window_years != 3 {
        return Err(NetworkError::InvalidWindow {
            expected: 3,
            found: matrix.window_years,
        });
    }
    params.validate()?;
    if matrix.entries.is_empty() {
        return Err(NetworkError::NoCitations);
    }
    let shares = article_shares(&matrix.article_counts)?;
    let edges = sjr_capped_weights(matrix, params);
    let prestige = damped_stationary(matrix.n(), &edges, &shares, params)?;
    Ok(matrix
        .journal_ids
        .iter()
        .zip(prestige.iter().zip(&shares))
        .filter(|(_, (_, &s))| s > 0.0)
        .map(|(id, (&p, &s))| (id.clone(), p / s))
        .collect())
}

/// Raw impact per paper over the three-year window divided by the citation
/// potential of the citing papers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnipComponents {
    pub raw_impact_per_paper: f64,
    pub citation_potential: f64,
    pub citing_papers: usize,
}

impl SnipComponents {
    pub fn snip(&self) -> f64 {
        self.raw_impact_per_paper / self.citation_potential
    }
}

/// SNIP for one journal: citations in the census year to its citable items
/// of the three preceding years, per citable item, divided by the mean number
/// of in-window references to indexed papers made by the citing papers.
/// Self-citations are included.
pub fn snip(resolved: &ResolvedCorpus<'_>, journal_id: &str, census_year: Year) -> Result<f64, NetworkError> {
    Ok(snip_components(resolved, journal_id, census_year)?.snip())
}

pub fn snip_components(
    resolved: &ResolvedCorpus<'_>,
    journal_id: &str,
    census_year: Year,
) -> Result<SnipComponents, NetworkError> {
    let corpus = resolved.corpus();
    let journal = corpus
        .journal_idx(journal_id)
        .ok_or_else(|| NetworkError::UnknownJournal(journal_id.to_string()))?;
    let window = Window::new(census_year, 3);
    let citable_items = corpus
        .papers_of(journal)
        .iter()
        .map(|&p| corpus.paper(p))
        .filter(|p| p.doc_type.is_citable() && window.contains(p.pub_year))
        .count();
    if citable_items == 0 {
        return Err(NetworkError::ZeroDenominator);
    }

    let mut citations = 0u64;
    let mut citing: HashSet<PaperIdx> = HashSet::new();
    for &r in resolved.incoming(journal) {
        let r = r as usize;
        let c = resolved.classification(r);
        if c.class() == CitationClass::MatchedCitable
            && c.cited_year().is_some_and(|y| window.contains(y))
            && resolved.citing_year(r) == census_year
        {
            citations += 1;
            citing.insert(corpus.citing_paper(r));
        }
    }
    if citing.is_empty() {
        return Err(NetworkError::NoCitingPapers);
    }

    let indexed_refs: u64 = citing
        .iter()
        .map(|&p| {
            corpus
                .references_of(p)
                .iter()
                .filter(|&&r| {
                    let c = resolved.classification(r as usize);
                    c.cited_paper().is_some() && c.cited_year().is_some_and(|y| window.contains(y))
                })
                .count() as u64
        })
        .sum();

    Ok(SnipComponents {
        raw_impact_per_paper: citations as f64 / citable_items as f64,
        citation_potential: indexed_refs as f64 / citing.len() as f64,
        citing_papers: citing.len(),
    })
}

/// One row of the ranking report; `None` where an indicator is undefined.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RankingRow {
    pub journal_id: String,
    pub eigenfactor: Option<f64>,
    pub article_influence: Option<f64>,
    pub sjr: Option<f64>,
    pub snip: Option<f64>,
}

pub const RANKING_HEADER: &str = "journal_id,eigenfactor,article_influence,sjr,snip";

/// Eigenfactor and Article Influence on the five-year matrix, SJR and SNIP
/// on the three-year window. Only non-convergence and invalid parameters are
/// errors; indicators undefined for the corpus come back as `None`.
pub fn ranking_report(
    resolved: &ResolvedCorpus<'_>,
    census_year: Year,
    params: &RankingParams,
) -> Result<Vec<RankingRow>, NetworkError> {
    let five = build_matrix(resolved, census_year, 5);
    let three = build_matrix(resolved, census_year, 3);

    let soften = |result: Result<BTreeMap<String, f64>, NetworkError>| match result {
        Ok(map) => Ok(map),
        Err(e @ (NetworkError::NonConvergence { .. } | NetworkError::InvalidParams(_))) => Err(e),
        Err(e) => {
            log::warn!("ranking indicator undefined for census year {census_year}: {e}");
            Ok(BTreeMap::new())
        }
    };
    let ef = soften(eigenfactor(&five, params))?;
    let ais = if ef.is_empty() {
        BTreeMap::new()
    } else {
        soften(article_influence(&ef, &article_count_map(&five)))?
    };
    let sjr_scores = soften(sjr(&three, params))?;

    let journal_ids: Vec<String> = resolved.corpus().journals().iter().map(|j| j.journal_id.clone()).collect();
    Ok(journal_ids
        .par_iter()
        .map(|id| RankingRow {
            journal_id: id.clone(),
            eigenfactor: ef.get(id).copied(),
            article_influence: ais.get(id).copied(),
            sjr: sjr_scores.get(id).copied(),
            snip: snip(resolved, id, census_year).ok(),
        })
        .collect())
}

pub fn write_ranking_csv<W: Write>(
    rows: &[RankingRow],
    decimals: crate::indicators::Decimals,
    mut out: W,
) -> io::Result<()> {
    use crate::indicators::format_optional;
    writeln!(out, "{RANKING_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            csv_field(&row.journal_id),
            format_optional(row.eigenfactor, decimals),
            format_optional(row.article_influence, decimals),
            format_optional(row.sjr, decimals),
            format_optional(row.snip, decimals)
        )?;
    }
    Ok(())
}
