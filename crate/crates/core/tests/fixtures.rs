use citemetrics_core::anomaly::{self, AnomalyKind, DetectorConfig};
use citemetrics_core::distributions::{self, discipline_profile, inflation_series};
use citemetrics_core::indicators::{self, format_value, Decimals};
use citemetrics_core::matcher::{resolve, CitationClass, Normalizer};
use citemetrics_core::synth::fixtures::{self, FIXTURE_CENSUS_YEAR as Y, MATHEMATICS, TABLE1_ROWS};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn table1_counts_are_encoded_exactly() {
    let corpus = fixtures::fixture_table1();
    let resolved = resolve(&corpus, &Normalizer::default());
    for row in &TABLE1_ROWS {
        let t = indicators::tally(&resolved, row.journal_id, Y, 2).unwrap();
        assert_eq!(t.cites_matched_citable, row.article_cites + row.review_cites, "{}", row.journal_id);
        assert_eq!(t.cites_matched_noncitable, row.noncitable_cites);
        assert_eq!(t.cites_unmatched, row.unmatched_cites);
        assert_eq!(t.n_citable_items, row.citable_items);
        assert_eq!(t.n_all_items, row.citable_items + row.noncitable_items);
        assert_eq!(t.self_citations, row.self_citations);
    }
    // every reference resolves; no unresolved strings in the fixture
    assert_eq!(resolved.totals().get(CitationClass::Unresolved), 0);
}

#[test]
fn wos_derived_jif_matches_published_values() {
    let corpus = fixtures::fixture_table1();
    let resolved = resolve(&corpus, &Normalizer::default());
    for (id, expected) in [("cell", 30.575), ("ncb", 15.724), ("plosbiol", 9.430), ("fasebj", 5.551)] {
        let t = indicators::tally(&resolved, id, Y, 2).unwrap();
        let jif = indicators::jif_wos_derived(&t).unwrap();
        assert!(close(jif, expected, 0.0005), "{id}: {jif}");
        assert_eq!(format_value(jif, Decimals::Three), format!("{expected:.3}"));
    }
    let cell = indicators::jif_wos_derived(&indicators::tally(&resolved, "cell", Y, 2).unwrap()).unwrap();
    assert_eq!(format_value(cell, Decimals::One), "30.6");
}

#[test]
fn symmetric_if_and_increase_match_published_values() {
    let corpus = fixtures::fixture_table1();
    let resolved = resolve(&corpus, &Normalizer::default());
    let expected = [
        ("cell", 27.564, 10.3),
        ("ncb", 13.586, 10.9),
        ("plosbiol", 8.057, 21.6),
        ("fasebj", 4.410, 24.7),
        ("nature", 33.243, 20.7),
        ("science", 29.398, 26.6),
    ];
    for (id, sym_expected, pct_expected) in expected {
        let t = indicators::tally(&resolved, id, Y, 2).unwrap();
        let sym = indicators::symmetric_if(&t).unwrap();
        assert!(close(sym, sym_expected, 0.0005), "{id}: {sym}");
        let jcr = fixtures::table1_row(id).unwrap().jcr_jif.unwrap();
        let pct = indicators::pct_increase(jcr, sym).unwrap();
        assert!(close(pct, pct_expected, 0.05), "{id}: {pct}");
    }
}

#[test]
fn jhep_self_citation() {
    let corpus = fixtures::fixture_table1();
    let resolved = resolve(&corpus, &Normalizer::default());
    let t = indicators::tally(&resolved, fixtures::JHEP_ID, Y, 2).unwrap();
    assert_eq!((t.total_cites(), t.self_citations), (18_651, 9_285));
    let rate = indicators::self_citation_rate(&t).unwrap();
    assert!(close(rate, 0.498, 0.0005), "{rate}");
    let d = DetectorConfig::default();
    let flag = anomaly::self_citation_flag(&t, d.distortion_threshold, d.rate_threshold).unwrap();
    assert!(close(flag.statistic, 18_651.0 / 9_366.0 - 1.0, 1e-12));

    let flags = anomaly::detect_all(&resolved, Y, &d);
    assert!(flags
        .iter()
        .any(|f| f.journal_id == fixtures::JHEP_ID && f.kind == AnomalyKind::SelfCitationExcess));
    // the single citing pool supplies all of Cell's citations, so only a
    // stacking flag may appear for it
    assert!(flags
        .iter()
        .filter(|f| f.journal_id == "cell")
        .all(|f| f.kind == AnomalyKind::CitationStacking && f.evidence.as_deref() == Some(fixtures::POOL_ID)));
}

#[test]
fn cell_skew_is_near_published_share() {
    let corpus = fixtures::fixture_table1();
    let resolved = resolve(&corpus, &Normalizer::default());
    let s = distributions::distribution(&resolved, "cell", Y, 2, 30.410).unwrap();
    assert_eq!(s.n_papers, 869);
    assert!((0.2..0.35).contains(&s.share_at_or_above_jif), "{}", s.share_at_or_above_jif);
    assert!(s.mean > s.median);
}

#[test]
fn mathematics_profile() {
    let corpus = fixtures::fixture_mathematics();
    let resolved = resolve(&corpus, &Normalizer::default());
    let p = discipline_profile(&resolved, MATHEMATICS, Y).unwrap();
    assert_eq!(p.n_papers, 500);
    assert!(close(p.mean_refs, 26.56, 1e-12));
    assert!(close(p.mean_refs_to_indexed, 16.53, 1e-12));
    assert!(close(p.mean_ref_age.unwrap(), 16.65, 1e-12));
    assert!(close(p.mean_jif.unwrap(), 1.017, 1e-12));
    assert!(close(p.max_jif.unwrap(), 9.44, 1e-12));
    assert_eq!(p.ref_age_coverage, 1.0);
}

#[test]
fn inflation_fixture_reproduces_aggregates() {
    let snapshots = fixtures::fixture_inflation();
    let series = inflation_series(&snapshots, &[10.0]).unwrap();
    for (k, point) in series.points.iter().enumerate() {
        assert_eq!(point.year, fixtures::INFLATION_YEARS[k]);
        assert_eq!(point.journal_count, fixtures::INFLATION_JOURNALS[k] as u64);
        assert!(close(point.mean_jif, fixtures::INFLATION_MEANS[k], 1e-9), "{}", point.mean_jif);
        assert_eq!(format_value(point.mean_jif, Decimals::Three), format!("{:.3}", fixtures::INFLATION_MEANS[k]));
        assert_eq!(point.count_above_threshold, vec![fixtures::INFLATION_ABOVE_TEN[k]]);
    }
    let shares: Vec<String> = series
        .points
        .iter()
        .map(|p| format!("{:.1}", 100.0 * p.count_above_threshold[0] as f64 / p.journal_count as f64))
        .collect();
    assert_eq!(shares, ["0.8", "1.3", "1.8"]);
}
