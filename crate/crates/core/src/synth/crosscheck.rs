//! Compares the indexed computations with [`Oracle`] recounts on one corpus.

use super::oracle::Oracle;
use crate::corpus::Corpus;
use crate::distributions::{self, DisciplineProfile, DistributionSummary};
use crate::indicators;
use crate::matcher::{resolve, Normalizer};
use crate::network::build_matrix;

/// Largest absolute difference accepted between two divisions of equal
/// integers computed along different paths.
pub const RATIO_TOLERANCE: f64 = 1e-12;

/// Windows checked for every census year.
pub const WINDOWS: [u32; 3] = [2, 3, 5];

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= RATIO_TOLERANCE
}

fn close_opt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => close(x, y),
        (None, None) => true,
        _ => false,
    }
}

fn same_summary(a: &DistributionSummary, b: &DistributionSummary) -> bool {
    a.histogram == b.histogram
        && a.n_papers == b.n_papers
        && a.n_at_or_above_jif == b.n_at_or_above_jif
        && close(a.mean, b.mean)
        && close(a.median, b.median)
        && close(a.share_at_or_above_jif, b.share_at_or_above_jif)
}

fn same_profile(a: &DisciplineProfile, b: &DisciplineProfile) -> bool {
    a.n_journals == b.n_journals
        && a.n_journals_with_jif == b.n_journals_with_jif
        && a.n_papers == b.n_papers
        && close_opt(a.mean_jif, b.mean_jif)
        && close_opt(a.max_jif, b.max_jif)
        && close(a.mean_refs, b.mean_refs)
        && close(a.mean_refs_to_indexed, b.mean_refs_to_indexed)
        && close_opt(a.mean_ref_age, b.mean_ref_age)
        && close(a.ref_age_coverage, b.ref_age_coverage)
}

/// Checks reference classes, then for the middle and last corpus year and
/// every window in [`WINDOWS`]: the citation matrix, and per journal the
/// tally, per-paper counts, median and distribution; per discipline the
/// profile. Counts must agree exactly and ratios within
/// [`RATIO_TOLERANCE`]. Returns the number of comparisons made, or a
/// description of the first disagreement.
pub fn cross_check(corpus: &Corpus, normalizer: &Normalizer) -> Result<usize, String> {
    let resolved = resolve(corpus, normalizer);
    let oracle = Oracle::new(corpus, normalizer);
    let mut checks = 0usize;
    for (r, class) in oracle.classes().iter().enumerate() {
        let found = resolved.classification(r).class();
        if found != class.class {
            return Err(format!("reference {r}: class {found} vs oracle {}", class.class));
        }
        checks += 1;
    }
    let Some((lo, hi)) = corpus.year_range() else {
        return Ok(checks);
    };
    let mut disciplines: Vec<&str> = corpus.journals().iter().map(|j| j.discipline.as_str()).collect();
    disciplines.sort_unstable();
    disciplines.dedup();

    for census in [(lo + hi) / 2, hi] {
        for window in WINDOWS {
            let (dense, articles) = oracle.matrix(census, window);
            let m = build_matrix(&resolved, census, window);
            if m.to_dense() != dense || m.article_counts() != &articles[..] {
                return Err(format!("matrix {census}/{window} differs"));
            }
            checks += 1;

            for j in corpus.journals() {
                let id = &j.journal_id;
                let at = || format!("{id} {census}/{window}");
                let tally = indicators::tally(&resolved, id, census, window).map_err(|e| format!("{}: {e}", at()))?;
                let expected = oracle.tally(id, census, window);
                if tally != expected {
                    return Err(format!("{}: tally {tally:?} vs oracle {expected:?}", at()));
                }
                let counts = indicators::per_paper_counts(&resolved, id, census, window).map_err(|e| format!("{}: {e}", at()))?;
                if counts != oracle.per_paper_counts(id, census, window) {
                    return Err(format!("{}: per-paper counts differ", at()));
                }
                let median = indicators::median_cites(&resolved, id, census, window).ok();
                if !close_opt(median, oracle.median_cites(id, census, window)) {
                    return Err(format!("{}: median differs", at()));
                }
                let jif = indicators::jif_wos_derived(&tally).unwrap_or(1.0);
                let fast = distributions::distribution(&resolved, id, census, window, jif).ok();
                let slow = oracle.distribution(id, census, window, jif);
                let agree = match (&fast, &slow) {
                    (Some(a), Some(b)) => same_summary(a, b),
                    (None, None) => true,
                    _ => false,
                };
                if !agree {
                    return Err(format!("{}: distribution {fast:?} vs oracle {slow:?}", at()));
                }
                checks += 4;
            }
        }
        for &discipline in &disciplines {
            let fast = distributions::discipline_profile(&resolved, discipline, census).ok();
            let slow = oracle.discipline_profile(discipline, census);
            let agree = match (&fast, &slow) {
                (Some(a), Some(b)) => same_profile(a, b),
                (None, None) => true,
                _ => false,
            };
            if !agree {
                return Err(format!("{discipline} {census}: profile {fast:?} vs oracle {slow:?}"));
            }
            checks += 1;
        }
    }
    Ok(checks)
}
