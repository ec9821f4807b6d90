//! Corpora and indicator snapshots that encode published counts exactly.

use crate::corpus::{Corpus, CorpusBuilder, DocumentType, JournalEntry, PaperRecord, RawReference, Year};
use crate::distributions::Snapshot;
use crate::indicators::IndicatorReport;

/// Census year of the citation-count fixtures.
pub const FIXTURE_CENSUS_YEAR: Year = 2016;

/// Census-year citations to one journal's 2014–2015 items, split by what
/// they point to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountsRow {
    pub journal_id: &'static str,
    pub name: &'static str,
    pub variant: Option<&'static str>,
    pub article_cites: u64,
    pub review_cites: u64,
    pub noncitable_cites: u64,
    pub unmatched_cites: u64,
    pub citable_items: u64,
    /// Reviews among the citable items.
    pub review_items: u64,
    pub noncitable_items: u64,
    /// Citations coming from the journal's own census-year papers.
    pub self_citations: u64,
    /// Impact factor published by the JCR for the same year.
    pub jcr_jif: Option<f64>,
}

impl CountsRow {
    pub fn total_cites(&self) -> u64 {
        self.article_cites + self.review_cites + self.noncitable_cites + self.unmatched_cites
    }
}

const fn row(
    journal_id: &'static str,
    name: &'static str,
    variant: Option<&'static str>,
    cites: [u64; 4],
    items: [u64; 3],
    jcr_jif: Option<f64>,
) -> CountsRow {
    CountsRow {
        journal_id,
        name,
        variant,
        article_cites: cites[0],
        review_cites: cites[1],
        noncitable_cites: cites[2],
        unmatched_cites: cites[3],
        citable_items: items[0],
        review_items: items[1],
        noncitable_items: items[2],
        self_citations: 0,
        jcr_jif,
    }
}

/// Six journals with published citation splits, followed by a high-energy
/// physics journal known for heavy self-citation. Item counts other than
/// the citable totals are not published and are set to plausible values.
pub const TABLE1_ROWS: [CountsRow; 7] = [
    row("cell", "Cell", None, [20_885, 3_068, 601, 2_016], [869, 90, 120], Some(30.410)),
    row(
        "ncb",
        "Nature Chemical Biology",
        Some("Nat. Chem. Biol."),
        [3_263, 378, 217, 356],
        [268, 30, 40],
        Some(15.066),
    ),
    row("plosbiol", "PLOS Biology", Some("PLOS Biol."), [3_088, 6, 237, 290], [384, 2, 90], Some(9.797)),
    row("fasebj", "The FASEB Journal", Some("FASEB J."), [3_650, 235, 203, 802], [881, 40, 120], Some(5.498)),
    row("nature", "Nature", None, [55_380, 3_925, 5_067, 6_047], [1_784, 120, 2_400], Some(40.140)),
    row("science", "Science", None, [45_708, 4_886, 5_657, 6_340], [1_721, 110, 2_300], Some(37.210)),
    CountsRow {
        self_citations: 9_285,
        ..row(
            "jhep",
            "Journal of High Energy Physics",
            Some("J. High Energy Phys."),
            [18_651, 0, 0, 0],
            [3_600, 0, 0],
            None,
        )
    },
];

pub const JHEP_ID: &str = "jhep";
pub const POOL_ID: &str = "pool";
const POOL_PAPERS: usize = 4_000;
const JHEP_CENSUS_PAPERS: usize = 1_800;

pub fn table1_row(journal_id: &str) -> Option<&'static CountsRow> {
    TABLE1_ROWS.iter().find(|r| r.journal_id == journal_id)
}

/// Splits `total` over `n` slots with weights `(k + 1)^-0.4` by largest
/// remainder. The resulting skew puts roughly 28% of a large journal's items
/// at or above their mean.
pub fn skewed_split(total: u64, n: usize) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let weights: Vec<f64> = (0..n).map(|k| ((k + 1) as f64).powf(-0.4)).collect();
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<u64> = exact.iter().map(|x| x.floor() as u64).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = total - counts.iter().sum::<u64>();
    for &k in order.iter().take(short as usize) {
        counts[k] += 1;
    }
    counts
}

fn window_year(k: usize) -> Year {
    FIXTURE_CENSUS_YEAR - 1 - (k % 2) as Year
}

/// Corpus reproducing the citation counts of [`TABLE1_ROWS`] for census
/// year 2016. Citations come from a pool journal's 2016 papers, except the
/// high-energy physics self-citations, which come from that journal's own
/// 2016 papers.
pub fn fixture_table1() -> Corpus {
    let mut b = CorpusBuilder::new();
    let mut refs: Vec<RawReference> = Vec::new();
    b.add_journal(JournalEntry {
        journal_id: POOL_ID.into(),
        canonical_name: "Citing Pool".into(),
        name_variants: Vec::new(),
        discipline: "Multidisciplinary".into(),
        specialty: None,
    });
    let pool_ids: Vec<String> = (0..POOL_PAPERS).map(|k| format!("pool-{k:04}")).collect();
    for id in &pool_ids {
        b.add_paper(PaperRecord {
            paper_id: id.clone(),
            journal_id: POOL_ID.into(),
            pub_year: FIXTURE_CENSUS_YEAR,
            doc_type: DocumentType::Article,
        });
    }
    let mut next_pool = 0usize;
    let mut pool_paper = || {
        next_pool += 1;
        pool_ids[(next_pool - 1) % POOL_PAPERS].clone()
    };

    for row in &TABLE1_ROWS {
        b.add_journal(JournalEntry {
            journal_id: row.journal_id.into(),
            canonical_name: row.name.into(),
            name_variants: row.variant.iter().map(|v| v.to_string()).collect(),
            discipline: if row.journal_id == JHEP_ID { "Physics" } else { "Biomedical Research" }.into(),
            specialty: None,
        });
        let label = row.variant.unwrap_or(row.name);
        let articles = row.citable_items - row.review_items;
        let groups = [
            ("a", DocumentType::Article, articles, row.article_cites),
            ("r", DocumentType::Review, row.review_items, row.review_cites),
            ("e", DocumentType::Editorial, row.noncitable_items, row.noncitable_cites),
        ];

        let self_papers: Vec<String> = if row.self_citations > 0 {
            (0..JHEP_CENSUS_PAPERS).map(|k| format!("{}-2016-{k:04}", row.journal_id)).collect()
        } else {
            Vec::new()
        };
        for id in &self_papers {
            b.add_paper(PaperRecord {
                paper_id: id.clone(),
                journal_id: row.journal_id.into(),
                pub_year: FIXTURE_CENSUS_YEAR,
                doc_type: DocumentType::Article,
            });
        }
        let mut self_left = row.self_citations;
        let mut next_self = 0usize;

        for (tag, doc_type, n_items, cites) in groups {
            let split = skewed_split(cites, n_items as usize);
            for (k, &c) in split.iter().enumerate() {
                let year = window_year(k);
                let paper_id = format!("{}-{tag}{k:04}", row.journal_id);
                b.add_paper(PaperRecord {
                    paper_id: paper_id.clone(),
                    journal_id: row.journal_id.into(),
                    pub_year: year,
                    doc_type,
                });
                for _ in 0..c {
                    let citing = if self_left > 0 {
                        self_left -= 1;
                        next_self += 1;
                        self_papers[(next_self - 1) % self_papers.len()].clone()
                    } else {
                        pool_paper()
                    };
                    refs.push(RawReference {
                        citing_paper_id: citing,
                        raw_cited_string: format!("{label} {year}"),
                        cited_paper_id: Some(paper_id.clone()),
                        cited_journal_id: None,
                        cited_year: None,
                    });
                }
            }
        }
        for k in 0..row.unmatched_cites as usize {
            refs.push(RawReference {
                citing_paper_id: pool_paper(),
                raw_cited_string: format!("{label}, {}", window_year(k)),
                cited_paper_id: None,
                cited_journal_id: None,
                cited_year: None,
            });
        }
    }
    b.reserve_references(refs.len());
    for r in refs {
        b.add_reference(r);
    }
    b.build().expect("fixture records are consistent")
}

/// Snapshot years, journal counts, mean JIFs and journals above 10 for the
/// inflation fixture.
pub const INFLATION_YEARS: [Year; 3] = [1997, 2007, 2016];
pub const INFLATION_JOURNALS: [usize; 3] = [6_125, 8_077, 11_167];
pub const INFLATION_MEANS: [f64; 3] = [1.125, 1.707, 2.178];
pub const INFLATION_ABOVE_TEN: [u64; 3] = [49, 105, 201];

/// JIF values in thousandths whose count, sum and number above 10.000
/// are exactly as requested.
pub fn milli_values(n: usize, mean_milli_total: u64, above_ten: usize) -> Vec<u64> {
    let high: Vec<u64> = (0..above_ten as u64).map(|i| 10_001 + (i * 7_919) % 8_000).collect();
    let low_n = (n - above_ten) as u64;
    let low_total = mean_milli_total - high.iter().sum::<u64>();
    let base = low_total / low_n;
    let extra = low_total % low_n;
    assert!((900..9_000).contains(&base), "fixture parameters out of range");
    let mut low: Vec<u64> = (0..low_n).map(|k| base + u64::from(k < extra)).collect();
    // opposite offsets on neighbouring entries keep the sum
    for pair in low.chunks_exact_mut(2) {
        let d = (pair[0] * 331) % 900;
        pair[0] += d;
        pair[1] -= d;
    }
    high.into_iter().chain(low).collect()
}

/// Three yearly snapshots of two-year JIFs whose means and counts above 10
/// match published JCR aggregates. Journal `k` of a smaller snapshot is
/// journal `k` of the later ones.
pub fn fixture_inflation() -> Vec<Snapshot> {
    INFLATION_YEARS
        .iter()
        .zip(INFLATION_JOURNALS)
        .zip(INFLATION_MEANS.iter().zip(INFLATION_ABOVE_TEN))
        .map(|((&year, n), (&mean, above))| {
            let total = (mean * n as f64 * 1000.0).round() as u64;
            let reports = milli_values(n, total, above as usize)
                .into_iter()
                .enumerate()
                .map(|(k, v)| IndicatorReport {
                    journal_id: format!("JCR{k:05}"),
                    census_year: year,
                    jif2: Some(v as f64 / 1000.0),
                    jif5: None,
                    jif_wos_derived: None,
                    symmetric_if: None,
                    jif_no_self: None,
                    citescore: None,
                    median_cites: None,
                    self_citation_rate: None,
                    pct_increase: None,
                })
                .collect();
            Snapshot { year, reports }
        })
        .collect()
}

/// Discipline label of [`fixture_mathematics`].
pub const MATHEMATICS: &str = "Mathematics";
const MATH_JOURNALS: usize = 10;
const MATH_WINDOW_ITEMS: usize = 100;
const MATH_CENSUS_PAPERS: usize = 500;
/// Reference totals for the census-year papers: all references, those to
/// indexed journals, and the summed reference age.
pub const MATH_REFS: usize = 13_280;
pub const MATH_INDEXED_REFS: usize = 8_265;
pub const MATH_AGE_SUM: u64 = 221_112;
/// Census-year citations to each journal's window items.
pub const MATH_WINDOW_CITES: [u64; MATH_JOURNALS] = [944, 8, 8, 8, 8, 8, 8, 8, 8, 9];

fn math_name(j: usize) -> String {
    format!("Synthetic Mathematics {}", (b'A' + j as u8) as char)
}

/// Ten mathematics journals whose 2016 papers cite 26.56 references on
/// average, 16.53 of them to indexed journals, with mean reference age
/// 16.65 years. Two-year JIFs average 1.017 with a maximum of 9.44.
pub fn fixture_mathematics() -> Corpus {
    let mut b = CorpusBuilder::new();
    let mut census_ids = Vec::with_capacity(MATH_CENSUS_PAPERS);
    let mut window_ids: Vec<Vec<(String, Year)>> = Vec::new();
    for j in 0..MATH_JOURNALS {
        let jid = format!("MATH{:02}", j + 1);
        b.add_journal(JournalEntry {
            journal_id: jid.clone(),
            canonical_name: math_name(j),
            name_variants: Vec::new(),
            discipline: MATHEMATICS.into(),
            specialty: None,
        });
        let mut items = Vec::new();
        for k in 0..MATH_WINDOW_ITEMS {
            let id = format!("{jid}-w{k:03}");
            let year = window_year(k);
            b.add_paper(PaperRecord {
                paper_id: id.clone(),
                journal_id: jid.clone(),
                pub_year: year,
                doc_type: DocumentType::Article,
            });
            items.push((id, year));
        }
        window_ids.push(items);
        for k in 0..MATH_CENSUS_PAPERS / MATH_JOURNALS {
            let id = format!("{jid}-c{k:03}");
            b.add_paper(PaperRecord {
                paper_id: id.clone(),
                journal_id: jid.clone(),
                pub_year: FIXTURE_CENSUS_YEAR,
                doc_type: DocumentType::Article,
            });
            census_ids.push(id);
        }
    }

    // (cited paper, raw string, cited_year field, age)
    let mut plan: Vec<(Option<String>, String, Option<Year>, u64)> = Vec::with_capacity(MATH_REFS);
    for (j, &cites) in MATH_WINDOW_CITES.iter().enumerate() {
        for k in 0..cites as usize {
            let (id, year) = &window_ids[j][k % MATH_WINDOW_ITEMS];
            plan.push((Some(id.clone()), format!("{} {year}", math_name(j)), None, (FIXTURE_CENSUS_YEAR - year) as u64));
        }
    }
    let window_age: u64 = plan.iter().map(|p| p.3).sum();
    let rest = (MATH_REFS - plan.len()) as u64;
    let rest_age = MATH_AGE_SUM - window_age;
    let (base, extra) = (rest_age / rest, rest_age % rest);
    for k in 0..rest {
        let age = base + u64::from(k < extra);
        let year = FIXTURE_CENSUS_YEAR - age as Year;
        if plan.len() < MATH_INDEXED_REFS {
            plan.push((None, format!("{} {year}", math_name(k as usize % MATH_JOURNALS)), None, age));
        } else {
            plan.push((None, format!("Unindexed Monograph {year}"), Some(year), age));
        }
    }

    b.reserve_references(plan.len());
    for (i, (cited, raw, cited_year, _)) in plan.into_iter().enumerate() {
        b.add_reference(RawReference {
            citing_paper_id: census_ids[i % MATH_CENSUS_PAPERS].clone(),
            raw_cited_string: raw,
            cited_paper_id: cited,
            cited_journal_id: None,
            cited_year,
        });
    }
    b.build().expect("fixture records are consistent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skewed_split_preserves_total() {
        let split = skewed_split(26_570, 869);
        assert_eq!(split.iter().sum::<u64>(), 26_570);
        assert!(split.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(skewed_split(6, 1), vec![6]);
        assert!(skewed_split(0, 3).iter().all(|&c| c == 0));
    }

    #[test]
    fn milli_values_hit_targets() {
        for ((n, mean), above) in INFLATION_JOURNALS.iter().zip(INFLATION_MEANS).zip(INFLATION_ABOVE_TEN) {
            let total = (mean * *n as f64 * 1000.0).round() as u64;
            let v = milli_values(*n, total, above as usize);
            assert_eq!(v.len(), *n);
            assert_eq!(v.iter().sum::<u64>(), total);
            assert_eq!(v.iter().filter(|&&x| x > 10_000).count() as u64, above);
        }
    }
}
