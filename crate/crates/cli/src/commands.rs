use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::anyhow;
use citemetrics_core::anomaly::{self, AnomalyFlag, DetectorConfig};
use citemetrics_core::corpus::{citable_share, ingest_dir, Year};
use citemetrics_core::distributions::{
    self, cohort_curve, discipline_profile, inflation_series, jcr_share_histogram, CohortCurve, DisciplineProfile,
    DistributionError, DistributionSummary, InflationSeries, Snapshot,
};
use citemetrics_core::indicators::{self, csv_field, format_optional, format_value, report_all, round_to, Decimals};
use citemetrics_core::network::{build_matrix, ranking_report, write_ranking_csv, RankingParams, RankingRow};
use citemetrics_core::synth::{fixtures, generate, presets, ScenarioSpec};
use citemetrics_core::{resolve, CitationClass, Corpus, Normalizer};
use serde::Serialize;

use crate::{plot, read_json, CmdResult, Failure, Fixture, Format, Preset, RunConfig};

pub const SNAPSHOTS_FILE: &str = "snapshots.json";

fn load(config: &RunConfig) -> CmdResult<Corpus> {
    let dir = config
        .input
        .as_deref()
        .ok_or_else(|| Failure::invalid(anyhow!("--in DIR is required")))?;
    log::info!("ingesting {}", dir.display());
    Ok(ingest_dir(dir)?)
}

/// `--year` checked against the corpus, or the corpus' last year.
fn census(config: &RunConfig, corpus: &Corpus) -> CmdResult<Year> {
    let (lo, hi) = corpus
        .year_range()
        .ok_or_else(|| Failure::invalid(anyhow!("corpus has no papers")))?;
    match config.year {
        Some(y) if !(lo..=hi).contains(&y) => Err(Failure::invalid(anyhow!("year {y} is outside the corpus years {lo}-{hi}"))),
        Some(y) => Ok(y),
        None => Ok(hi),
    }
}

fn write_file(config: &RunConfig, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> CmdResult {
    let path = config.out.join(name);
    let result = File::create(&path).and_then(|f| {
        let mut w = BufWriter::new(f);
        body(&mut w)?;
        w.flush()
    });
    result.map_err(|e| Failure::io(anyhow!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize + ?Sized>(config: &RunConfig, name: &str, value: &T) -> CmdResult {
    write_file(config, name, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(io::Error::other)?;
        writeln!(w)
    })
}

fn round_opt(value: Option<f64>, decimals: Decimals) -> Option<f64> {
    value.map(|v| round_to(v, decimals))
}

#[derive(Serialize)]
struct IngestSummary {
    journals: usize,
    papers: usize,
    references: usize,
    first_year: Option<Year>,
    last_year: Option<Year>,
    citable_share: Option<f64>,
    classes: BTreeMap<&'static str, u64>,
}

pub fn ingest(config: &RunConfig) -> CmdResult {
    let corpus = load(config)?;
    let resolved = resolve(&corpus, &Normalizer::default());
    let totals = resolved.totals();
    let (papers, journals, references) = corpus.counts();
    let summary = IngestSummary {
        journals,
        papers,
        references,
        first_year: corpus.year_range().map(|r| r.0),
        last_year: corpus.year_range().map(|r| r.1),
        citable_share: citable_share(&corpus, ..).ok().map(|s| round_to(s, config.decimals())),
        classes: CitationClass::ALL.iter().map(|&c| (c.as_str(), totals.get(c))).collect(),
    };
    match config.format {
        Format::Json => write_json(config, "ingest.json", &summary),
        Format::Csv => write_file(config, "ingest.csv", |w| {
            writeln!(w, "field,value")?;
            writeln!(w, "journals,{}", summary.journals)?;
            writeln!(w, "papers,{}", summary.papers)?;
            writeln!(w, "references,{}", summary.references)?;
            let year = |y: Option<Year>| y.map(|y| y.to_string()).unwrap_or_default();
            writeln!(w, "first_year,{}", year(summary.first_year))?;
            writeln!(w, "last_year,{}", year(summary.last_year))?;
            writeln!(w, "citable_share,{}", format_optional(summary.citable_share, config.decimals()))?;
            for (class, n) in &summary.classes {
                writeln!(w, "{class},{n}")?;
            }
            Ok(())
        }),
    }
}

pub fn report(config: &RunConfig) -> CmdResult {
    let corpus = load(config)?;
    let year = census(config, &corpus)?;
    let resolved = resolve(&corpus, &Normalizer::default());
    let reports = report_all(&resolved, year, config.window)?;
    match config.format {
        Format::Csv => write_file(config, "indicators.csv", |w| {
            indicators::write_reports_csv(&reports, config.decimals(), w)
        }),
        Format::Json => write_file(config, "indicators.json", |w| {
            indicators::write_reports_json(&reports, config.decimals(), &mut *w)?;
            writeln!(w)
        }),
    }
}

pub fn rank(config: &RunConfig, params: &RankingParams) -> CmdResult {
    let corpus = load(config)?;
    let year = census(config, &corpus)?;
    let resolved = resolve(&corpus, &Normalizer::default());
    let rows = ranking_report(&resolved, year, params)?;
    let d = config.decimals();
    match config.format {
        Format::Csv => write_file(config, "rankings.csv", |w| write_ranking_csv(&rows, d, w)),
        Format::Json => {
            let rounded: Vec<RankingRow> = rows
                .into_iter()
                .map(|r| RankingRow {
                    eigenfactor: round_opt(r.eigenfactor, d),
                    article_influence: round_opt(r.article_influence, d),
                    sjr: round_opt(r.sjr, d),
                    snip: round_opt(r.snip, d),
                    journal_id: r.journal_id,
                })
                .collect();
            write_json(config, "rankings.json", &rounded)
        }
    }
}

pub fn net(config: &RunConfig) -> CmdResult {
    let corpus = load(config)?;
    let year = census(config, &corpus)?;
    let resolved = resolve(&corpus, &Normalizer::default());
    let matrix = build_matrix(&resolved, year, config.window);
    match config.format {
        Format::Csv => {
            write_file(config, "matrix.csv", |w| matrix.write_csv(w))?;
            write_file(config, "matrix_articles.csv", |w| {
                writeln!(w, "journal_id,articles")?;
                for (id, n) in matrix.journal_ids().iter().zip(matrix.article_counts()) {
                    writeln!(w, "{},{n}", csv_field(id))?;
                }
                Ok(())
            })
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Matrix<'a> {
                census_year: Year,
                window_years: u32,
                journal_ids: &'a [String],
                article_counts: &'a [u64],
                counts: Vec<Vec<u64>>,
            }
            write_json(
                config,
                "matrix.json",
                &Matrix {
                    census_year: matrix.census_year(),
                    window_years: matrix.window_years(),
                    journal_ids: matrix.journal_ids(),
                    article_counts: matrix.article_counts(),
                    counts: matrix.to_dense(),
                },
            )
        }
    }
}

pub fn dist(config: &RunConfig) -> CmdResult {
    let corpus = load(config)?;
    let year = census(config, &corpus)?;
    let resolved = resolve(&corpus, &Normalizer::default());
    let mut summaries: Vec<DistributionSummary> = Vec::new();
    for journal in corpus.journals() {
        let tally = indicators::tally(&resolved, &journal.journal_id, year, config.window)?;
        // journals without citable items in the window have no JIF to compare against
        let Ok(jif) = indicators::jif_wos_derived(&tally) else {
            continue;
        };
        match distributions::distribution(&resolved, &journal.journal_id, year, config.window, jif) {
            Ok(s) => summaries.push(s),
            Err(DistributionError::EmptyWindow) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let histogram = jcr_share_histogram(&summaries);
    let disciplines: BTreeSet<&str> = corpus.journals().iter().map(|j| j.discipline.as_str()).collect();
    let profiles: Vec<DisciplineProfile> = disciplines
        .into_iter()
        .filter_map(|d| discipline_profile(&resolved, d, year).ok())
        .collect();

    if config.plot {
        plot::emit(config, "share_histogram.svg", plot::share_histogram(&histogram));
    }
    let d = config.decimals();
    match config.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Dist<'a> {
                summaries: &'a [DistributionSummary],
                share_histogram: &'a distributions::ShareHistogram,
                disciplines: &'a [DisciplineProfile],
            }
            write_json(
                config,
                "dist.json",
                &Dist {
                    summaries: &summaries,
                    share_histogram: &histogram,
                    disciplines: &profiles,
                },
            )
        }
        Format::Csv => {
            write_file(config, "distributions.csv", |w| {
                writeln!(w, "journal_id,census_year,n_papers,mean,median,jif,n_at_or_above_jif,share_at_or_above_jif")?;
                for s in &summaries {
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{}",
                        csv_field(&s.journal_id),
                        s.census_year,
                        s.n_papers,
                        format_value(s.mean, d),
                        format_value(s.median, d),
                        format_value(s.jif_value, d),
                        s.n_at_or_above_jif,
                        format_value(s.share_at_or_above_jif, d)
                    )?;
                }
                Ok(())
            })?;
            write_file(config, "citation_counts.csv", |w| {
                writeln!(w, "journal_id,citations,paper_count")?;
                for s in &summaries {
                    for (c, n) in &s.histogram {
                        writeln!(w, "{},{c},{n}", csv_field(&s.journal_id))?;
                    }
                }
                Ok(())
            })?;
            write_file(config, "share_histogram.csv", |w| histogram.write_csv(w))?;
            write_file(config, "disciplines.csv", |w| {
                writeln!(
                    w,
                    "discipline,census_year,n_journals,n_journals_with_jif,n_papers,mean_jif,max_jif,mean_refs,mean_refs_to_indexed,mean_ref_age,ref_age_coverage"
                )?;
                for p in &profiles {
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        csv_field(&p.discipline),
                        p.census_year,
                        p.n_journals,
                        p.n_journals_with_jif,
                        p.n_papers,
                        format_optional(p.mean_jif, d),
                        format_optional(p.max_jif, d),
                        format_value(p.mean_refs, d),
                        format_value(p.mean_refs_to_indexed, d),
                        format_optional(p.mean_ref_age, d),
                        format_value(p.ref_age_coverage, d)
                    )?;
                }
                Ok(())
            })
        }
    }
}

pub fn cohort(config: &RunConfig, disciplines: &[String], horizon: Option<u32>) -> CmdResult {
    let corpus = load(config)?;
    let (lo, hi) = corpus
        .year_range()
        .ok_or_else(|| Failure::invalid(anyhow!("corpus has no papers")))?;
    let pub_year = match config.year {
        Some(y) if !(lo..=hi).contains(&y) => {
            return Err(Failure::invalid(anyhow!("year {y} is outside the corpus years {lo}-{hi}")))
        }
        Some(y) => y,
        None => lo,
    };
    let horizon = horizon.unwrap_or((hi - pub_year) as u32);
    let resolved = resolve(&corpus, &Normalizer::default());

    let curves: Vec<CohortCurve> = if disciplines.is_empty() {
        let all: BTreeSet<&str> = corpus.journals().iter().map(|j| j.discipline.as_str()).collect();
        all.into_iter()
            .filter_map(|d| match cohort_curve(&resolved, d, pub_year, horizon) {
                Ok(curve) => Some(curve),
                Err(e) => {
                    log::info!("skipping {d}: {e}");
                    None
                }
            })
            .collect()
    } else {
        disciplines
            .iter()
            .map(|d| cohort_curve(&resolved, d, pub_year, horizon))
            .collect::<Result<_, _>>()?
    };

    if config.plot {
        plot::emit(config, "cohort.svg", plot::cohort(&curves));
    }
    let d = config.decimals();
    match config.format {
        Format::Json => write_json(config, "cohort.json", &curves),
        Format::Csv => {
            write_file(config, "cohort.csv", |w| {
                writeln!(w, "discipline,years_since_publication,citations,cumulative_fraction")?;
                for c in &curves {
                    for (k, (n, f)) in c.per_year_citations.iter().zip(&c.cumulative_fraction).enumerate() {
                        writeln!(w, "{},{k},{n},{}", csv_field(&c.label), format_value(*f, d))?;
                    }
                }
                Ok(())
            })?;
            write_file(config, "cohort_summary.csv", |w| {
                writeln!(w, "discipline,pub_year,n_papers,total_citations,first_two_year_share,years_to_half,truncated")?;
                for c in &curves {
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{}",
                        csv_field(&c.label),
                        c.pub_year,
                        c.n_papers,
                        c.total_citations,
                        format_value(c.first_two_year_share, d),
                        c.years_to_half.map(|k| k.to_string()).unwrap_or_default(),
                        c.truncated
                    )?;
                }
                Ok(())
            })
        }
    }
}

/// Snapshots from `snapshots.json` when the input holds one, otherwise one
/// report per year from the second corpus year up to the census year.
fn snapshots(config: &RunConfig) -> CmdResult<Vec<Snapshot>> {
    if let Some(path) = config.input.as_deref().map(|dir| dir.join(SNAPSHOTS_FILE)).filter(|p| p.exists()) {
        return read_json(&path);
    }
    let corpus = load(config)?;
    let last = census(config, &corpus)?;
    let first = corpus.year_range().expect("census succeeded").0 + 1;
    let resolved = resolve(&corpus, &Normalizer::default());
    (first..=last)
        .map(|year| {
            Ok(Snapshot {
                year,
                reports: report_all(&resolved, year, config.window)?,
            })
        })
        .collect()
}

pub fn inflate(config: &RunConfig, thresholds: &[f64]) -> CmdResult {
    let series: InflationSeries = inflation_series(&snapshots(config)?, thresholds)?;
    if config.plot {
        plot::emit(config, "inflation.svg", plot::inflation(&series));
    }
    match config.format {
        Format::Json => write_json(config, "inflation.json", &series),
        Format::Csv => {
            write_file(config, "inflation.csv", |w| series.write_csv(w))?;
            write_file(config, "inflation_ranks.csv", |w| {
                write!(w, "journal_id")?;
                for p in &series.points {
                    write!(w, ",{}", p.year)?;
                }
                writeln!(w)?;
                for (id, trajectory) in &series.rank_trajectories {
                    write!(w, "{}", csv_field(id))?;
                    for v in trajectory {
                        write!(w, ",{}", format_optional(*v, config.decimals()))?;
                    }
                    writeln!(w)?;
                }
                Ok(())
            })
        }
    }
}

fn preset_spec(preset: Preset, seed: u64) -> ScenarioSpec {
    match preset {
        Preset::Homogeneous => presets::homogeneous(seed),
        Preset::Coercion => presets::coercion(seed, &[2, 5], 2.0),
        Preset::Cartel => presets::cartel(seed),
        Preset::Cohort => presets::biomedical_cohort(seed),
        Preset::Growing => presets::growing(seed, 0.03),
        Preset::Large => presets::large(seed, 5),
    }
}

pub fn gen(config: &RunConfig, fixture: Option<Fixture>, preset: Option<Preset>) -> CmdResult {
    let write_corpus = |corpus: &Corpus| {
        corpus
            .write_jsonl(&config.out)
            .map_err(|e| Failure::io(anyhow!("cannot write corpus to {}: {e}", config.out.display())))
    };
    let spec = match (fixture, preset, &config.scenario) {
        (Some(f), None, None) => {
            if config.seed.is_some() {
                log::warn!("fixtures are fixed; --seed is ignored");
            }
            return match f {
                Fixture::Table1 => write_corpus(&fixtures::fixture_table1()),
                Fixture::Mathematics => write_corpus(&fixtures::fixture_mathematics()),
                Fixture::Inflation => write_json(config, SNAPSHOTS_FILE, &fixtures::fixture_inflation()),
            };
        }
        (None, Some(p), None) => preset_spec(p, config.seed.unwrap_or(0)),
        (None, None, Some(path)) => {
            let mut spec: ScenarioSpec = read_json(path)?;
            if let Some(seed) = config.seed {
                spec.seed = seed;
            }
            spec
        }
        _ => {
            return Err(Failure::invalid(anyhow!(
                "gen needs exactly one of --fixture, --preset or --scenario"
            )))
        }
    };
    let corpus = generate(&spec)?;
    write_corpus(&corpus)?;
    write_json(config, "scenario.json", &spec)
}

pub fn detect(config: &RunConfig, detector: &DetectorConfig) -> CmdResult {
    let corpus = load(config)?;
    let year = census(config, &corpus)?;
    let resolved = resolve(&corpus, &Normalizer::default());
    let flags: Vec<AnomalyFlag> = anomaly::detect_all(&resolved, year, detector);
    log::info!("{} flag(s)", flags.len());
    match config.format {
        Format::Csv => write_file(config, "flags.csv", |w| anomaly::write_flags_csv(&flags, w)),
        Format::Json => write_json(config, "flags.json", &flags),
    }
}
