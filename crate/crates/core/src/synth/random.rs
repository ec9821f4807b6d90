//! Small random corpora with messy references: name variants,
//! abbreviations, missing years, unknown sources and front matter.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, CorpusBuilder, DocumentType, JournalEntry, PaperRecord, RawReference, Year};

const WORDS: [&str; 8] = ["Alpha", "Beta", "Gamma", "Delta", "Epsilon", "Zeta", "Theta", "Kappa"];
const DISCIPLINES: [&str; 3] = ["Biology", "Chemistry", "Mathematics"];
pub const RANDOM_FIRST_YEAR: Year = 2008;
pub const RANDOM_LAST_YEAR: Year = 2016;

/// A valid corpus of at most `max_papers` papers (and at most 1,000).
pub fn random_corpus(seed: u64, max_papers: usize) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_papers = max_papers.min(1_000);
    let n_journals = rng.random_range(2..=WORDS.len());
    let mut b = CorpusBuilder::new();
    let mut names: Vec<Vec<String>> = Vec::new();
    for (j, word) in WORDS.iter().take(n_journals).enumerate() {
        let canonical = format!("Journal of {word} Research");
        let variants = vec![format!("J. {word} Res."), format!("{word} Letters")];
        names.push(std::iter::once(canonical.clone()).chain(variants.iter().cloned()).collect());
        b.add_journal(JournalEntry {
            journal_id: format!("rj{j}"),
            canonical_name: canonical,
            name_variants: variants,
            discipline: DISCIPLINES[j % DISCIPLINES.len()].into(),
            specialty: None,
        });
    }

    let mut papers: Vec<PaperRecord> = Vec::new();
    'outer: for year in RANDOM_FIRST_YEAR..=RANDOM_LAST_YEAR {
        for j in 0..n_journals {
            for _ in 0..rng.random_range(0..=12) {
                if papers.len() == max_papers {
                    break 'outer;
                }
                let roll: f64 = rng.random();
                let doc_type = if roll < 0.65 {
                    DocumentType::Article
                } else if roll < 0.75 {
                    DocumentType::Review
                } else {
                    *[
                        DocumentType::Editorial,
                        DocumentType::Letter,
                        DocumentType::NewsItem,
                        DocumentType::Obituary,
                        DocumentType::Other,
                    ]
                    .choose(&mut rng)
                    .expect("non-empty")
                };
                papers.push(PaperRecord {
                    paper_id: format!("rp{:04}", papers.len()),
                    journal_id: format!("rj{j}"),
                    pub_year: year,
                    doc_type,
                });
            }
        }
    }

    let mut refs = Vec::new();
    for citing in &papers {
        for _ in 0..rng.random_range(0..=7) {
            let roll: f64 = rng.random();
            let reference = if roll < 0.55 {
                let cited = papers.choose(&mut rng).expect("citing paper exists");
                let journal = cited.journal_id[2..].parse::<usize>().expect("rj prefix");
                let name = names[journal].choose(&mut rng).expect("names");
                RawReference {
                    citing_paper_id: citing.paper_id.clone(),
                    raw_cited_string: format!("{name} {}", cited.pub_year),
                    cited_paper_id: Some(cited.paper_id.clone()),
                    cited_journal_id: rng.random_bool(0.3).then(|| cited.journal_id.clone()),
                    cited_year: rng.random_bool(0.3).then_some(cited.pub_year),
                }
            } else if roll < 0.85 {
                let journal = rng.random_range(0..n_journals);
                let name = names[journal].choose(&mut rng).expect("names").to_uppercase();
                let year = rng.random_range(2000..=RANDOM_LAST_YEAR);
                let (raw, field) = match rng.random_range(0..3) {
                    0 => (format!("{name}, {year}, vol. 12, p. 345"), None),
                    1 => (format!("{name} vol. 7"), Some(year)),
                    _ => (format!("{name} ({year}) 12:1-9"), None),
                };
                RawReference {
                    citing_paper_id: citing.paper_id.clone(),
                    raw_cited_string: raw,
                    cited_paper_id: None,
                    cited_journal_id: None,
                    cited_year: field,
                }
            } else {
                let raw = match rng.random_range(0..3) {
                    0 => format!("Unknown Proc. {}", rng.random_range(1990..=2016)),
                    1 => format!("{} Research", WORDS.choose(&mut rng).expect("words")),
                    _ => "personal communication".to_string(),
                };
                RawReference {
                    citing_paper_id: citing.paper_id.clone(),
                    raw_cited_string: raw,
                    cited_paper_id: None,
                    cited_journal_id: None,
                    cited_year: None,
                }
            };
            refs.push(reference);
        }
    }

    for p in papers {
        b.add_paper(p);
    }
    for r in refs {
        b.add_reference(r);
    }
    b.build().expect("random corpus is consistent by construction")
}
