//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Criterion 10 re-runs this binary as a child so
//! its peak memory covers only ingest, resolution and the report.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use citemetrics_core::anomaly::{self, AnomalyKind, DetectorConfig};
use citemetrics_core::corpus::{CorpusBuilder, DocumentType, JournalEntry, PaperRecord, RawReference};
use citemetrics_core::distributions::{cohort_curve, inflation_series, DistributionSummary};
use citemetrics_core::indicators::{self, format_value, Decimals};
use citemetrics_core::network::{build_matrix, eigenfactor_vector, JournalCitationMatrix, RankingParams};
use citemetrics_core::synth::crosscheck::cross_check;
use citemetrics_core::synth::presets::{self, CENSUS_YEAR};
use citemetrics_core::synth::random::random_corpus;
use citemetrics_core::synth::{fixtures, generate, journal_id, CitationDistribution};
use citemetrics_core::{resolve, Normalizer};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol + 1e-12
}

fn within_time(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn table1_jif() -> Outcome {
    let start = Instant::now();
    let corpus = fixtures::fixture_table1();
    let resolved = resolve(&corpus, &Normalizer::default());
    let mut shown = Vec::new();
    for (id, expected) in [("cell", 30.575), ("ncb", 15.724), ("plosbiol", 9.430), ("fasebj", 5.551)] {
        let t = indicators::tally(&resolved, id, fixtures::FIXTURE_CENSUS_YEAR, 2).map_err(|e| e.to_string())?;
        let jif = indicators::jif_wos_derived(&t).map_err(|e| e.to_string())?;
        ensure(within(jif, expected, 0.001), || format!("{id}: {jif} vs {expected}"))?;
        shown.push(format!("{id} {}", format_value(jif, Decimals::Three)));
    }
    within_time(start.elapsed(), 1.0)?;
    Ok(format!("{} in {:.2} s", shown.join(", "), start.elapsed().as_secs_f64()))
}

fn table2_symmetric() -> Outcome {
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
    let mut worst = (0.0f64, 0.0f64);
    for (id, sym_expected, pct_expected) in expected {
        let t = indicators::tally(&resolved, id, fixtures::FIXTURE_CENSUS_YEAR, 2).map_err(|e| e.to_string())?;
        let sym = indicators::symmetric_if(&t).map_err(|e| e.to_string())?;
        let jcr = fixtures::table1_row(id).and_then(|r| r.jcr_jif).ok_or("missing JCR value")?;
        let pct = indicators::pct_increase(jcr, sym).map_err(|e| e.to_string())?;
        ensure(within(sym, sym_expected, 0.001), || format!("{id}: symmetric {sym} vs {sym_expected}"))?;
        ensure(within(pct, pct_expected, 0.1), || format!("{id}: increase {pct} vs {pct_expected}"))?;
        worst = (worst.0.max((sym - sym_expected).abs()), worst.1.max((pct - pct_expected).abs()));
    }
    Ok(format!(
        "six journals; max error {:.4} (symmetric IF), {:.3} pp (increase)",
        worst.0, worst.1
    ))
}

fn jhep_self_citation() -> Outcome {
    let corpus = fixtures::fixture_table1();
    let resolved = resolve(&corpus, &Normalizer::default());
    let t = indicators::tally(&resolved, fixtures::JHEP_ID, fixtures::FIXTURE_CENSUS_YEAR, 2).map_err(|e| e.to_string())?;
    let rate = indicators::self_citation_rate(&t).map_err(|e| e.to_string())?;
    ensure(within(rate, 0.498, 0.001), || format!("rate {rate}"))?;
    let flags = anomaly::detect_all(&resolved, fixtures::FIXTURE_CENSUS_YEAR, &DetectorConfig::default());
    let flag = flags
        .iter()
        .find(|f| f.journal_id == fixtures::JHEP_ID && f.kind == AnomalyKind::SelfCitationExcess)
        .ok_or("no SelfCitationExcess flag")?;
    Ok(format!("rate {rate:.3}, flagged with distortion {:.3}", flag.statistic))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut checks = 0;
    for seed in 0..200u64 {
        let corpus = random_corpus(seed, 1_000);
        ensure(corpus.papers().len() <= 1_000, || format!("seed {seed}: too many papers"))?;
        checks += cross_check(&corpus, &Normalizer::default()).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    within_time(start.elapsed(), 60.0)?;
    Ok(format!("200 corpora, {checks} comparisons in {:.1} s", start.elapsed().as_secs_f64()))
}

fn skewness_bands() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_160);
    let (lo, hi) = (0.5f64.ln(), 30f64.ln());
    let (mut in_band, mut at_least_half) = (0usize, 0usize);
    let n_journals = 10_000;
    for k in 0..n_journals {
        let mean = rng.random_range(lo..=hi).exp();
        let n_papers = rng.random_range(100..=600);
        let d = CitationDistribution::lognormal_with_mean(mean, 1.16);
        let counts: Vec<u64> = (0..n_papers).map(|_| d.sample(&mut rng)).collect();
        // every item citable and every citation matched: the JIF is the mean count
        let jif = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
        let s = DistributionSummary::from_counts(format!("L{k}"), 2016, &counts, jif).map_err(|e| e.to_string())?;
        in_band += usize::from((0.20..=0.40).contains(&s.share_at_or_above_jif));
        at_least_half += usize::from(2 * s.n_at_or_above_jif >= s.n_papers);
    }
    let band = in_band as f64 / n_journals as f64;
    let half = at_least_half as f64 / n_journals as f64;
    ensure(band >= 0.70, || format!("{:.1}% in [0.20, 0.40]", 100.0 * band))?;
    ensure(half <= 0.03, || format!("{:.1}% at or above 0.5", 100.0 * half))?;
    within_time(start.elapsed(), 120.0)?;
    Ok(format!(
        "{:.1}% of journals in [0.20, 0.40], {:.2}% at or above 0.5, {:.1} s",
        100.0 * band,
        100.0 * half,
        start.elapsed().as_secs_f64()
    ))
}

fn dense_eigenfactor(counts: &[Vec<u64>], articles: &[u64], damping: f64) -> Vec<f64> {
    let n = counts.len();
    let total: u64 = articles.iter().sum();
    let t = DVector::from_iterator(n, articles.iter().map(|&a| a as f64 / total as f64));
    let mut p = DMatrix::<f64>::zeros(n, n);
    let mut dangling = DVector::<f64>::zeros(n);
    for i in 0..n {
        let out: u64 = (0..n).filter(|&j| j != i).map(|j| counts[i][j]).sum();
        if out == 0 {
            dangling[i] = 1.0;
        }
        for j in (0..n).filter(|&j| j != i && out > 0) {
            p[(i, j)] = counts[i][j] as f64 / out as f64;
        }
    }
    let system = DMatrix::identity(n, n) - p.transpose() * damping - &t * dangling.transpose() * damping;
    let pi = system.lu().solve(&(&t * (1.0 - damping))).expect("nonsingular");
    let sum = pi.sum();
    pi.iter().map(|x| 100.0 * x / sum).collect()
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("J{i}")).collect()
}

fn three_cycle_corpus(dir: &Path) -> Result<(), String> {
    let mut b = CorpusBuilder::new();
    for j in 0..3 {
        b.add_journal(JournalEntry {
            journal_id: format!("C{j}"),
            canonical_name: format!("Cycle Journal {j}"),
            name_variants: Vec::new(),
            discipline: "Cycles".into(),
            specialty: None,
        });
        for k in 0..(j + 1) * 4 {
            b.add_paper(PaperRecord {
                paper_id: format!("C{j}-{k}"),
                journal_id: format!("C{j}"),
                pub_year: 2014,
                doc_type: DocumentType::Article,
            });
        }
        b.add_paper(PaperRecord {
            paper_id: format!("C{j}-citing"),
            journal_id: format!("C{j}"),
            pub_year: 2016,
            doc_type: DocumentType::Editorial,
        });
    }
    for j in 0..3 {
        b.add_reference(RawReference {
            citing_paper_id: format!("C{j}-citing"),
            raw_cited_string: "Cycle 2014".into(),
            cited_paper_id: Some(format!("C{}-0", (j + 1) % 3)),
            cited_journal_id: None,
            cited_year: None,
        });
    }
    let corpus = b.build().map_err(|e| format!("{e:?}"))?;
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    corpus.write_jsonl(dir).map_err(|e| e.to_string())
}

fn eigenvector_suite() -> Outcome {
    let params = RankingParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_sum, mut worst_dense) = (0.0f64, 0.0f64);
    let mut solved = 0;
    for _ in 0..300 {
        let n = rng.random_range(2..=10);
        let counts: Vec<Vec<u64>> = (0..n)
            .map(|_| (0..n).map(|_| if rng.random_bool(0.4) { rng.random_range(1..50) } else { 0 }).collect())
            .collect();
        let articles: Vec<u64> = (0..n).map(|_| rng.random_range(1..80)).collect();
        let m = JournalCitationMatrix::from_dense(ids(n), &counts, articles.clone(), 2016, 5).map_err(|e| e.to_string())?;
        let Ok(scores) = eigenfactor_vector(&m, &params) else {
            continue;
        };
        solved += 1;
        worst_sum = worst_sum.max((scores.iter().sum::<f64>() - 100.0).abs());
        for (a, b) in scores.iter().zip(dense_eigenfactor(&counts, &articles, params.damping)) {
            worst_dense = worst_dense.max((a - b).abs());
        }
    }
    for seed in 0..20 {
        let corpus = random_corpus(seed, 1_000);
        let resolved = resolve(&corpus, &Normalizer::default());
        if let Ok(scores) = eigenfactor_vector(&build_matrix(&resolved, 2016, 5), &params) {
            worst_sum = worst_sum.max((scores.iter().sum::<f64>() - 100.0).abs());
        }
    }
    ensure(worst_sum <= 1e-9, || format!("sum off by {worst_sum:e}"))?;
    ensure(worst_dense <= 1e-6, || format!("dense solver differs by {worst_dense:e}"))?;

    let mut worst_ring = 0.0f64;
    for n in 2..=12 {
        let counts: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(j == (i + 1) % n) * 9).collect()).collect();
        let m = JournalCitationMatrix::from_dense(ids(n), &counts, vec![25; n], 2016, 5).map_err(|e| e.to_string())?;
        let scores = eigenfactor_vector(&m, &params).map_err(|e| e.to_string())?;
        for s in &scores {
            worst_ring = worst_ring.max((s - 100.0 / n as f64).abs());
        }
    }
    ensure(worst_ring <= 1e-12, || format!("ring scores differ by {worst_ring:e}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("cycle");
    three_cycle_corpus(&corpus)?;
    let thresholds = dir.path().join("thresholds.json");
    std::fs::write(&thresholds, r#"{"ranking": {"max_iterations": 1}}"#).map_err(|e| e.to_string())?;
    let code = citemetrics_cli::run([
        "citemetrics",
        "rank",
        "--in",
        corpus.to_str().ok_or("path")?,
        "--out",
        dir.path().join("out").to_str().ok_or("path")?,
        "--thresholds",
        thresholds.to_str().ok_or("path")?,
    ]);
    ensure(code == 3, || format!("rank exited {code} on the 3-cycle"))?;
    Ok(format!(
        "sum error {worst_sum:.1e}, dense-solver error {worst_dense:.1e} over {solved} matrices, ring error {worst_ring:.1e}, 3-cycle exit {code}"
    ))
}

fn ifbscp_injection() -> Outcome {
    let config = DetectorConfig::default();
    let (mut injected, mut caught, mut clean, mut false_flags) = (0, 0, 0, 0);
    for seed in 0..50u64 {
        let a = (seed % 8) as usize;
        let b = ((seed * 3 + 1) % 8) as usize;
        let targets: Vec<usize> = if a == b { vec![a] } else { vec![a, b] };
        let corpus = generate(&presets::coercion(1_000 + seed, &targets, 2.0)).map_err(|e| e.to_string())?;
        let resolved = resolve(&corpus, &Normalizer::default());
        let flags = anomaly::detect_all(&resolved, CENSUS_YEAR, &config);
        for j in 0..8 {
            let id = journal_id(j);
            let mine: Vec<_> = flags.iter().filter(|f| f.journal_id == id).collect();
            if targets.contains(&j) {
                injected += 1;
                caught += usize::from(mine.iter().any(|f| f.kind == AnomalyKind::IfbscpBias));
            } else {
                clean += 1;
                false_flags += usize::from(!mine.is_empty());
            }
        }
    }
    ensure(caught == injected, || format!("flagged {caught} of {injected} injected journals"))?;
    ensure(false_flags == 0, || format!("flagged {false_flags} of {clean} clean journals"))?;
    Ok(format!(
        "50 runs: {caught}/{injected} injected journals flagged, {false_flags}/{clean} clean journals flagged"
    ))
}

fn cohort_window() -> Outcome {
    let mut seen = Vec::new();
    for seed in 1..=5u64 {
        let corpus = generate(&presets::biomedical_cohort(seed)).map_err(|e| e.to_string())?;
        let resolved = resolve(&corpus, &Normalizer::default());
        let curve = cohort_curve(&resolved, "Biomedical Research", presets::COHORT_YEAR, 31).map_err(|e| e.to_string())?;
        let share = curve.first_two_year_share;
        ensure((0.13..=0.17).contains(&share), || format!("seed {seed}: first-two-year share {share:.3}"))?;
        let half = curve.years_to_half.ok_or("never reaches half")?;
        ensure((7..=9).contains(&half), || format!("seed {seed}: half after {half} years"))?;
        seen.push(format!("{share:.3}/{half}"));
    }
    Ok(format!("first-two-year share / years to half over 5 seeds: {}", seen.join(", ")))
}

fn inflation_fixture() -> Outcome {
    let series = inflation_series(&fixtures::fixture_inflation(), &[10.0]).map_err(|e| e.to_string())?;
    let means: Vec<f64> = series.points.iter().map(|p| p.mean_jif).collect();
    let counts: Vec<u64> = series.points.iter().map(|p| p.count_above_threshold[0]).collect();
    for (k, mean) in means.iter().enumerate() {
        let target = fixtures::INFLATION_MEANS[k];
        ensure(within(*mean, target, 1e-9), || format!("mean {mean} vs {target}"))?;
    }
    ensure(counts == [49, 105, 201], || format!("counts {counts:?}"))?;
    Ok(format!(
        "means {} and counts above 10 {:?}",
        means.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>().join(" / "),
        counts
    ))
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Child side of criterion 10: report on an on-disk corpus through the CLI.
fn performance_child(input: &str, output: &str) -> i32 {
    let start = Instant::now();
    let code = citemetrics_cli::run(["citemetrics", "report", "--in", input, "--out", output]);
    let elapsed = start.elapsed().as_secs_f64();
    println!("{code} {elapsed} {}", peak_rss_kib().unwrap_or(0));
    0
}

fn performance() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("large");
    let references = {
        let corpus = generate(&presets::large(1, 5)).map_err(|e| e.to_string())?;
        std::fs::create_dir_all(&input).map_err(|e| e.to_string())?;
        corpus.write_jsonl(&input).map_err(|e| e.to_string())?;
        corpus.references().len()
    };
    ensure(references >= 1_000_000, || format!("only {references} references generated"))?;
    let output = Command::new(std::env::current_exe().map_err(|e| e.to_string())?)
        .args(["--performance-child", input.to_str().ok_or("path")?, dir.path().join("out").to_str().ok_or("path")?])
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    let fields: Vec<&str> = stdout.split_whitespace().collect();
    let [code, elapsed, peak] = fields[..] else {
        return Err(format!("unexpected child output: {stdout} {}", String::from_utf8_lossy(&output.stderr)));
    };
    let elapsed: f64 = elapsed.parse().map_err(|_| "bad time")?;
    let peak_gib = peak.parse::<f64>().map_err(|_| "bad memory")? / (1024.0 * 1024.0);
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let summary = format!(
        "{references} references: ingest + resolve + report {elapsed:.1} s on {cores} core(s), peak memory {peak_gib:.2} GiB"
    );
    ensure(code == "0", || format!("report exited {code}"))?;
    ensure(elapsed < 30.0, || summary.clone())?;
    ensure(peak_gib < 4.0 * 1e9 / (1u64 << 30) as f64, || summary.clone())?;
    Ok(summary)
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.get(1).map(String::as_str) == Some("--performance-child") {
        std::process::exit(performance_child(&args[2], &args[3]));
    }
    panic::set_hook(Box::new(|_| {}));

    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("reference fixture WOS-derived JIF", table1_jif),
        ("symmetric IF and increase over JCR", table2_symmetric),
        ("JHEP self-citation", jhep_self_citation),
        ("oracle equivalence", oracle_equivalence),
        ("skewness bands", skewness_bands),
        ("eigenvector suite", eigenvector_suite),
        ("IFBSCP injection", ifbscp_injection),
        ("citation window cohort", cohort_window),
        ("inflation fixture", inflation_fixture),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {message}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1} s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1} s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
