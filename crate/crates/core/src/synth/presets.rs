//! Ready-made scenarios used by the tests, benches and the `gen` command.

use super::{journal_id, CitationDistribution, Injection, InjectionKind, JournalProfile, ScenarioSpec};
use crate::corpus::Year;

/// Census year of every preset.
pub const CENSUS_YEAR: Year = 2016;

/// Eight journals with identical, well-mixed citation behavior and 12%
/// self-citation over 2009–2016. Citations spread evenly over ages 1–7, so
/// both IFBSCP windows are well populated in the census year.
pub fn homogeneous(seed: u64) -> ScenarioSpec {
    ScenarioSpec {
        seed,
        first_year: CENSUS_YEAR - 7,
        last_year: CENSUS_YEAR,
        n_journals: 8,
        journals: vec![JournalProfile {
            n_papers_per_year: 200,
            citable_fraction: 1.0,
            citation_distribution: CitationDistribution::Fixed { k: 24 },
            self_citation_rate: 0.12,
            unmatched_fraction: 0.05,
            discipline: "General".into(),
            ref_age_profile: vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            unindexed_refs_per_paper: 0.0,
        }],
        refs_growth_per_year: 0.0,
        injections: Vec::new(),
    }
}

/// [`homogeneous`] with the self-citation share in the two-year window of
/// each journal in `targets` raised `magnitude`-fold in the census year.
pub fn coercion(seed: u64, targets: &[usize], magnitude: f64) -> ScenarioSpec {
    let mut spec = homogeneous(seed);
    spec.injections = targets
        .iter()
        .map(|&t| Injection {
            kind: InjectionKind::SelfCitationBoost,
            target: journal_id(t),
            donor: None,
            magnitude,
            years: vec![CENSUS_YEAR],
        })
        .collect();
    spec
}

/// [`homogeneous`] where the first two journals each supply 80% of the
/// other's census-year citations to its two-year window.
pub fn cartel(seed: u64) -> ScenarioSpec {
    let mut spec = homogeneous(seed);
    let stack = |target: usize, donor: usize| Injection {
        kind: InjectionKind::CitationStacking,
        target: journal_id(target),
        donor: Some(journal_id(donor)),
        magnitude: 0.8,
        years: vec![CENSUS_YEAR],
    };
    spec.injections = vec![stack(0, 1), stack(1, 0)];
    spec
}

/// Citation-age weights (ages 0–30) shaped like a biomedical cohort: about
/// 15% of citations arrive by the end of the second year after publication
/// and half by the eighth.
pub fn biomedical_age_profile() -> Vec<f64> {
    let mut w = vec![0.01, 0.05, 0.09, 0.065, 0.065, 0.065, 0.06, 0.055, 0.055];
    let tail_mass = 1.0 - w.iter().sum::<f64>();
    let ratio: f64 = 0.9;
    let tail_len = 22;
    let norm = (1.0 - ratio.powi(tail_len)) / (1.0 - ratio);
    w.extend((0..tail_len).map(|k| tail_mass * ratio.powi(k) / norm));
    w
}

/// Publication year of the cohort followed by [`biomedical_cohort`].
pub const COHORT_YEAR: Year = CENSUS_YEAR - 31;

/// Ten biomedical journals over 1985–2016; the 1985 cohort is observed for
/// the full 31 years of its age profile.
pub fn biomedical_cohort(seed: u64) -> ScenarioSpec {
    ScenarioSpec {
        seed,
        first_year: COHORT_YEAR,
        last_year: CENSUS_YEAR,
        n_journals: 10,
        journals: vec![JournalProfile {
            n_papers_per_year: 40,
            citable_fraction: 0.9,
            citation_distribution: CitationDistribution::lognormal_with_mean(20.0, 1.0),
            self_citation_rate: 0.1,
            unmatched_fraction: 0.05,
            discipline: "Biomedical Research".into(),
            ref_age_profile: biomedical_age_profile(),
            unindexed_refs_per_paper: 0.0,
        }],
        refs_growth_per_year: 0.0,
        injections: Vec::new(),
    }
}

/// Citation volume growing by `growth` per publication year over 2010–2016.
/// Fixed per-paper counts cited only at ages 1 and 2 keep sampling noise
/// well below a few percent per year.
pub fn growing(seed: u64, growth: f64) -> ScenarioSpec {
    ScenarioSpec {
        seed,
        first_year: CENSUS_YEAR - 6,
        last_year: CENSUS_YEAR,
        n_journals: 5,
        journals: vec![JournalProfile {
            n_papers_per_year: 200,
            citable_fraction: 1.0,
            citation_distribution: CitationDistribution::Fixed { k: 20 },
            ref_age_profile: vec![0.0, 0.5, 0.5],
            ..JournalProfile::default()
        }],
        refs_growth_per_year: growth,
        injections: Vec::new(),
    }
}

/// Several disciplines and a few hundred thousand references per seed;
/// about 1.1 million references with `scale` 5.
pub fn large(seed: u64, scale: u32) -> ScenarioSpec {
    let discipline = |name: &str, mean: f64, self_rate: f64| JournalProfile {
        n_papers_per_year: 20 * scale,
        citable_fraction: 0.8,
        citation_distribution: CitationDistribution::lognormal_with_mean(mean, 1.16),
        self_citation_rate: self_rate,
        unmatched_fraction: 0.06,
        discipline: name.into(),
        ref_age_profile: JournalProfile::default().ref_age_profile,
        unindexed_refs_per_paper: 2.0,
    };
    ScenarioSpec {
        seed,
        first_year: CENSUS_YEAR - 9,
        last_year: CENSUS_YEAR,
        n_journals: 200,
        journals: vec![
            discipline("Biomedical Research", 9.0, 0.08),
            discipline("Chemistry", 7.0, 0.12),
            discipline("Mathematics", 3.0, 0.2),
            discipline("Physics", 6.0, 0.15),
        ],
        refs_growth_per_year: 0.03,
        injections: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biomedical_profile_shape() {
        let w = biomedical_age_profile();
        assert_eq!(w.len(), 31);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let cum = |k: usize| w[..=k].iter().sum::<f64>();
        assert!((cum(2) - 0.15).abs() < 1e-12);
        assert!(cum(7) < 0.5 && cum(8) > 0.5);
    }
}
