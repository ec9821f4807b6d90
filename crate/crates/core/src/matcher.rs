//! Journal-name normalization and reference classification.
//!
//! Every [`RawReference`](crate::corpus::RawReference) ends up in exactly one
//! [`CitationClass`]. References linked to an indexed paper are matched;
//! references whose text starts with a known journal name and carries a year
//! are attributed to that journal without a target paper; the rest are
//! unresolved.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::{Corpus, JournalIdx, PaperIdx, Year};

const DEFAULT_ABBREVIATIONS: &str = include_str!("../data/abbreviations.tsv");

/// Years outside this range are not treated as publication years.
pub const YEAR_BOUNDS: (Year, Year) = (1800, 2100);

#[derive(Debug, Error)]
pub enum AbbreviationError {
    #[error("abbreviations line {line}: expected `token<TAB>expansion`")]
    BadLine { line: usize },
    #[error("cannot read abbreviation table: {0}")]
    Io(#[from] io::Error),
}

/// Maps raw journal-name strings onto comparable keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalizer {
    abbreviations: HashMap<String, String>,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer::from_tsv(DEFAULT_ABBREVIATIONS).expect("bundled abbreviation table is valid")
    }
}

impl Normalizer {
    /// A normalizer that folds case, punctuation and diacritics but expands
    /// nothing.
    pub fn without_abbreviations() -> Self {
        Normalizer {
            abbreviations: HashMap::new(),
        }
    }

    /// Parses `token<TAB>expansion` lines. Blank lines and lines starting with
    /// `#` are skipped.
    pub fn from_tsv(text: &str) -> Result<Self, AbbreviationError> {
        let mut normalizer = Normalizer::without_abbreviations();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (token, expansion) = line
                .split_once('\t')
                .ok_or(AbbreviationError::BadLine { line: i + 1 })?;
            if !normalizer.insert(token, expansion) {
                return Err(AbbreviationError::BadLine { line: i + 1 });
            }
        }
        Ok(normalizer)
    }

    pub fn load(path: &Path) -> Result<Self, AbbreviationError> {
        Normalizer::from_tsv(&std::fs::read_to_string(path)?)
    }

    /// Adds or replaces one abbreviation. Returns false when the token folds
    /// to nothing or to more than one word.
    pub fn insert(&mut self, token: &str, expansion: &str) -> bool {
        let key = fold(token);
        if key.is_empty() || key.contains(' ') {
            return false;
        }
        self.abbreviations.insert(key, fold(expansion));
        true
    }

    pub fn with_entry(mut self, token: &str, expansion: &str) -> Self {
        self.insert(token, expansion);
        self
    }

    /// Case-folds, strips diacritics and punctuation, collapses whitespace and
    /// expands abbreviations token by token.
    pub fn normalize(&self, raw: &str) -> String {
        let folded = fold(raw);
        let mut out = String::with_capacity(folded.len() + 16);
        for token in folded.split(' ').filter(|t| !t.is_empty()) {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(self.abbreviations.get(token).map_or(token, String::as_str));
        }
        out
    }
}

fn fold(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for c in raw.nfd().filter(|c| !is_combining_mark(*c)) {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.extend(c.to_lowercase());
        } else if !matches!(c, '\'' | '\u{2019}') {
            pending_space = true;
        }
    }
    out
}

/// First standalone four-digit number within [`YEAR_BOUNDS`].
pub fn extract_year(raw: &str) -> Option<Year> {
    let bytes = raw.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if !bytes[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i - start == 4 {
            let year: Year = raw[start..i].parse().expect("four ascii digits");
            if (YEAR_BOUNDS.0..=YEAR_BOUNDS.1).contains(&year) {
                return Some(year);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CitationClass {
    MatchedCitable,
    MatchedNonCitable,
    UnmatchedJournal,
    Unresolved,
}

impl CitationClass {
    pub const ALL: [CitationClass; 4] = [
        CitationClass::MatchedCitable,
        CitationClass::MatchedNonCitable,
        CitationClass::UnmatchedJournal,
        CitationClass::Unresolved,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CitationClass::MatchedCitable => "MatchedCitable",
            CitationClass::MatchedNonCitable => "MatchedNonCitable",
            CitationClass::UnmatchedJournal => "UnmatchedJournal",
            CitationClass::Unresolved => "Unresolved",
        }
    }
}

impl fmt::Display for CitationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of resolving one reference. Constructors keep the class and the
/// optional target fields consistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    class: CitationClass,
    journal: Option<JournalIdx>,
    cited_year: Option<Year>,
    cited_paper: Option<PaperIdx>,
}

impl Classification {
    pub fn matched(paper: PaperIdx, journal: JournalIdx, year: Year, citable: bool) -> Self {
        Classification {
            class: if citable {
                CitationClass::MatchedCitable
            } else {
                CitationClass::MatchedNonCitable
            },
            journal: Some(journal),
            cited_year: Some(year),
            cited_paper: Some(paper),
        }
    }

    pub fn unmatched(journal: JournalIdx, year: Year) -> Self {
        Classification {
            class: CitationClass::UnmatchedJournal,
            journal: Some(journal),
            cited_year: Some(year),
            cited_paper: None,
        }
    }

    pub const UNRESOLVED: Classification = Classification {
        class: CitationClass::Unresolved,
        journal: None,
        cited_year: None,
        cited_paper: None,
    };

    pub fn class(&self) -> CitationClass {
        self.class
    }

    pub fn journal(&self) -> Option<JournalIdx> {
        self.journal
    }

    pub fn cited_year(&self) -> Option<Year> {
        self.cited_year
    }

    pub fn cited_paper(&self) -> Option<PaperIdx> {
        self.cited_paper
    }

    /// Journal and year the citation is attributed to, for every class except
    /// `Unresolved`.
    #[inline]
    pub fn target(&self) -> Option<(JournalIdx, Year)> {
        Some((self.journal?, self.cited_year?))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassTotals {
    pub matched_citable: u64,
    pub matched_noncitable: u64,
    pub unmatched_journal: u64,
    pub unresolved: u64,
}

impl ClassTotals {
    pub fn get(&self, class: CitationClass) -> u64 {
        match class {
            CitationClass::MatchedCitable => self.matched_citable,
            CitationClass::MatchedNonCitable => self.matched_noncitable,
            CitationClass::UnmatchedJournal => self.unmatched_journal,
            CitationClass::Unresolved => self.unresolved,
        }
    }

    fn bump(&mut self, class: CitationClass) {
        match class {
            CitationClass::MatchedCitable => self.matched_citable += 1,
            CitationClass::MatchedNonCitable => self.matched_noncitable += 1,
            CitationClass::UnmatchedJournal => self.unmatched_journal += 1,
            CitationClass::Unresolved => self.unresolved += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.matched_citable + self.matched_noncitable + self.unmatched_journal + self.unresolved
    }

    /// `class,count` rows for the four classes followed by `total`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "class,count")?;
        for class in CitationClass::ALL {
            writeln!(out, "{},{}", class, self.get(class))?;
        }
        writeln!(out, "total,{}", self.total())
    }
}

#[derive(Debug, Clone, Copy)]
enum KeyOwner {
    Unique(JournalIdx),
    Ambiguous,
}

/// Normalized journal names of a corpus, looked up by longest token prefix.
#[derive(Debug, Clone)]
pub struct NameRegistry {
    normalizer: Normalizer,
    keys: HashMap<String, KeyOwner>,
    max_tokens: usize,
}

/// Result of looking up the journal-name prefix of a raw string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameMatch {
    Journal(JournalIdx),
    Ambiguous,
    None,
}

impl NameRegistry {
    pub fn new(corpus: &Corpus, normalizer: Normalizer) -> Self {
        let mut keys: HashMap<String, KeyOwner> = HashMap::new();
        let mut max_tokens = 0;
        for (i, journal) in corpus.journals().iter().enumerate() {
            let idx = JournalIdx(i as u32);
            for name in std::iter::once(&journal.canonical_name).chain(&journal.name_variants) {
                let key = normalizer.normalize(name);
                if key.is_empty() {
                    continue;
                }
                max_tokens = max_tokens.max(key.split(' ').count());
                keys.entry(key)
                    .and_modify(|owner| {
                        if !matches!(owner, KeyOwner::Unique(j) if *j == idx) {
                            *owner = KeyOwner::Ambiguous;
                        }
                    })
                    .or_insert(KeyOwner::Unique(idx));
            }
        }
        NameRegistry {
            normalizer,
            keys,
            max_tokens,
        }
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    /// Longest run of leading tokens of `normalize(raw)` that is a registry
    /// key.
    pub fn lookup(&self, raw: &str) -> NameMatch {
        let normalized = self.normalizer.normalize(raw);
        let ends: Vec<usize> = normalized
            .match_indices(' ')
            .map(|(i, _)| i)
            .chain(std::iter::once(normalized.len()))
            .take(self.max_tokens)
            .collect();
        for &end in ends.iter().rev() {
            if end == 0 {
                continue;
            }
            match self.keys.get(&normalized[..end]) {
                Some(KeyOwner::Unique(j)) => return NameMatch::Journal(*j),
                Some(KeyOwner::Ambiguous) => return NameMatch::Ambiguous,
                None => {}
            }
        }
        NameMatch::None
    }
}

/// A corpus together with one classification per reference, in reference
/// order.
#[derive(Debug, Clone)]
pub struct ResolvedCorpus<'a> {
    corpus: &'a Corpus,
    classifications: Vec<Classification>,
    totals: ClassTotals,
    // per journal: indices of attributable references targeting it
    incoming: Vec<Vec<u32>>,
}

impl<'a> ResolvedCorpus<'a> {
    /// Assembles a resolved corpus from precomputed classifications.
    ///
    /// # Panics
    /// If the lengths differ or a classification names an index outside the
    /// corpus.
    pub fn from_classifications(corpus: &'a Corpus, classifications: Vec<Classification>) -> Self {
        assert_eq!(classifications.len(), corpus.references().len());
        let mut totals = ClassTotals::default();
        let mut incoming = vec![Vec::new(); corpus.journals().len()];
        for (r, c) in classifications.iter().enumerate() {
            totals.bump(c.class);
            if let Some(journal) = c.journal {
                incoming[journal.get()].push(r as u32);
            }
        }
        ResolvedCorpus {
            corpus,
            classifications,
            totals,
            incoming,
        }
    }

    pub fn corpus(&self) -> &'a Corpus {
        self.corpus
    }

    pub fn classifications(&self) -> &[Classification] {
        &self.classifications
    }

    #[inline]
    pub fn classification(&self, reference: usize) -> &Classification {
        &self.classifications[reference]
    }

    pub fn totals(&self) -> ClassTotals {
        self.totals
    }

    /// References attributed to `journal` (any class but `Unresolved`).
    #[inline]
    pub fn incoming(&self, journal: JournalIdx) -> &[u32] {
        &self.incoming[journal.get()]
    }

    #[inline]
    pub fn citing_year(&self, reference: usize) -> Year {
        self.corpus.paper(self.corpus.citing_paper(reference)).pub_year
    }

    #[inline]
    pub fn citing_journal(&self, reference: usize) -> JournalIdx {
        self.corpus.paper_journal(self.corpus.citing_paper(reference))
    }
}

/// Classifies every reference of `corpus`.
pub fn resolve<'a>(corpus: &'a Corpus, normalizer: &Normalizer) -> ResolvedCorpus<'a> {
    let registry = NameRegistry::new(corpus, normalizer.clone());
    let ambiguous = AtomicUsize::new(0);
    let classifications: Vec<Classification> = (0..corpus.references().len())
        .into_par_iter()
        .map(|r| classify(corpus, &registry, r, &ambiguous))
        .collect();
    let ambiguous = ambiguous.into_inner();
    if ambiguous > 0 {
        log::warn!("{ambiguous} reference(s) match more than one journal name and were left unresolved");
    }
    ResolvedCorpus::from_classifications(corpus, classifications)
}

fn classify(corpus: &Corpus, registry: &NameRegistry, r: usize, ambiguous: &AtomicUsize) -> Classification {
    if let Some(paper) = corpus.cited_paper(r) {
        let record = corpus.paper(paper);
        return Classification::matched(
            paper,
            corpus.paper_journal(paper),
            record.pub_year,
            record.doc_type.is_citable(),
        );
    }
    let raw = &corpus.references()[r];
    let year = raw.cited_year.or_else(|| extract_year(&raw.raw_cited_string));
    match (registry.lookup(&raw.raw_cited_string), year) {
        (NameMatch::Journal(journal), Some(year)) => Classification::unmatched(journal, year),
        (NameMatch::Ambiguous, _) => {
            log::debug!("ambiguous journal name in `{}`", raw.raw_cited_string);
            ambiguous.fetch_add(1, Ordering::Relaxed);
            Classification::UNRESOLVED
        }
        _ => Classification::UNRESOLVED,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, DocumentType, JournalEntry, PaperRecord, RawReference};

    fn journal(id: &str, name: &str, variants: &[&str]) -> JournalEntry {
        JournalEntry {
            journal_id: id.into(),
            canonical_name: name.into(),
            name_variants: variants.iter().map(|v| v.to_string()).collect(),
            discipline: "Biomedical Research".into(),
            specialty: None,
        }
    }

    fn paper(id: &str, journal: &str, year: Year, doc_type: DocumentType) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            journal_id: journal.into(),
            pub_year: year,
            doc_type,
        }
    }

    fn reference(citing: &str, raw: &str, cited: Option<&str>) -> RawReference {
        RawReference {
            citing_paper_id: citing.into(),
            raw_cited_string: raw.into(),
            cited_paper_id: cited.map(Into::into),
            cited_journal_id: None,
            cited_year: None,
        }
    }

    #[test]
    fn normalize_examples() {
        let n = Normalizer::default();
        assert_eq!(n.normalize("Nat. Chem. Biol."), "nature chemical biology");
        assert_eq!(n.normalize("CELL"), "cell");
        assert_eq!(n.normalize("J.  High Energy Phys,"), "journal high energy physics");
        assert_eq!(n.normalize(""), "");
        assert_eq!(n.normalize("  .,;  "), "");
        assert_eq!(n.normalize("Zeitschrift für Physik"), "zeitschrift fur physik");
        assert_eq!(n.normalize("Children's Health"), "childrens health");
    }

    #[test]
    fn abbreviation_table_parsing() {
        let n = Normalizer::from_tsv("# comment\n\nJ.\tJournal\nPhys\tphysics\n").unwrap();
        assert_eq!(n.normalize("J Phys"), "journal physics");
        assert!(matches!(
            Normalizer::from_tsv("ok\tfine\nbroken line\n"),
            Err(AbbreviationError::BadLine { line: 2 })
        ));
    }

    #[test]
    fn year_extraction() {
        assert_eq!(extract_year("CELL 2015"), Some(2015));
        assert_eq!(extract_year("CELL V161 P1202 2015"), Some(2015));
        assert_eq!(extract_year("NATURE 12345 1750 2014"), Some(2014));
        assert_eq!(extract_year("CELL"), None);
        assert_eq!(extract_year("CELL 20150"), None);
    }

    fn corpus() -> Corpus {
        CorpusBuilder::new()
            .journal(journal("cell", "Cell", &[]))
            .journal(journal("ncb", "Nature Chemical Biology", &["Nat. Chem. Biol."]))
            .journal(journal("nature", "Nature", &[]))
            .paper(paper("r1", "cell", 2015, DocumentType::Review))
            .paper(paper("e1", "cell", 2015, DocumentType::Editorial))
            .paper(paper("c1", "nature", 2016, DocumentType::Article))
            .reference(reference("c1", "CELL 2015", Some("r1")))
            .reference(reference("c1", "CELL 2015", Some("e1")))
            .reference(reference("c1", "CELL 2015", None))
            .reference(reference("c1", "NAT CHEM BIOL 2014", None))
            .reference(reference("c1", "NATURE 2014", None))
            .reference(reference("c1", "NATURE", None))
            .reference(reference("c1", "PROC CONF GRAPHS 2014", None))
            .build()
            .unwrap()
    }

    #[test]
    fn resolve_classes() {
        let corpus = corpus();
        let resolved = resolve(&corpus, &Normalizer::default());
        let classes: Vec<_> = resolved.classifications().iter().map(|c| c.class()).collect();
        use CitationClass::*;
        assert_eq!(
            classes,
            vec![
                MatchedCitable,
                MatchedNonCitable,
                UnmatchedJournal,
                UnmatchedJournal,
                UnmatchedJournal,
                Unresolved,
                Unresolved
            ]
        );
        let cell = corpus.journal_idx("cell").unwrap();
        assert_eq!(resolved.classification(2).target(), Some((cell, 2015)));
        let ncb = corpus.journal_idx("ncb").unwrap();
        assert_eq!(resolved.classification(3).target(), Some((ncb, 2014)));
        let nature = corpus.journal_idx("nature").unwrap();
        assert_eq!(resolved.classification(4).target(), Some((nature, 2014)));
        assert_eq!(resolved.incoming(cell), &[0, 1, 2]);
        let totals = resolved.totals();
        assert_eq!(totals.total(), 7);
        let mut csv = Vec::new();
        totals.write_csv(&mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "class,count\nMatchedCitable,1\nMatchedNonCitable,1\nUnmatchedJournal,3\nUnresolved,2\ntotal,7\n"
        );
    }

    #[test]
    fn ambiguous_names_stay_unresolved() {
        let corpus = corpus();
        // Folding "nature" and "cell" together makes the two keys collide.
        let normalizer = Normalizer::default().with_entry("nature", "cell");
        let resolved = resolve(&corpus, &normalizer);
        assert_eq!(resolved.classification(2).class(), CitationClass::Unresolved);
        assert_eq!(resolved.classification(0).class(), CitationClass::MatchedCitable);
    }

    #[test]
    fn explicit_cited_year_wins_over_text() {
        let corpus = CorpusBuilder::new()
            .journal(journal("cell", "Cell", &[]))
            .paper(paper("c1", "cell", 2016, DocumentType::Article))
            .reference(RawReference {
                cited_year: Some(2014),
                ..reference("c1", "Cell", None)
            })
            .build()
            .unwrap();
        let resolved = resolve(&corpus, &Normalizer::default());
        assert_eq!(resolved.classification(0).cited_year(), Some(2014));
    }
}
