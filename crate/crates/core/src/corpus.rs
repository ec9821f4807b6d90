//! Paper, journal and reference records, and the validated immutable [`Corpus`].
//!
//! A corpus is loaded from three JSON-lines files (`papers.jsonl`,
//! `journals.jsonl`, `references.jsonl`). Loading is all-or-nothing: every
//! problem found in the file set is collected with its line number and the
//! whole load fails if there is at least one.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::ops::RangeBounds;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::matcher::Normalizer;

pub const PAPERS_FILE: &str = "papers.jsonl";
pub const JOURNALS_FILE: &str = "journals.jsonl";
pub const REFERENCES_FILE: &str = "references.jsonl";

pub type Year = i32;

/// Dense index of a paper inside a [`Corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PaperIdx(pub u32);

/// Dense index of a journal inside a [`Corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JournalIdx(pub u32);

impl PaperIdx {
    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl JournalIdx {
    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DocumentType {
    Article,
    Review,
    Editorial,
    Letter,
    NewsItem,
    Obituary,
    Other,
}

impl DocumentType {
    pub const ALL: [DocumentType; 7] = [
        DocumentType::Article,
        DocumentType::Review,
        DocumentType::Editorial,
        DocumentType::Letter,
        DocumentType::NewsItem,
        DocumentType::Obituary,
        DocumentType::Other,
    ];

    /// Articles and reviews are the only citable items.
    #[inline]
    pub fn is_citable(self) -> bool {
        matches!(self, DocumentType::Article | DocumentType::Review)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DocumentType::Article => "Article",
            DocumentType::Review => "Review",
            DocumentType::Editorial => "Editorial",
            DocumentType::Letter => "Letter",
            DocumentType::NewsItem => "NewsItem",
            DocumentType::Obituary => "Obituary",
            DocumentType::Other => "Other",
        }
    }

    /// Case-insensitive lookup against the fixed vocabulary. Returns `None`
    /// for strings outside it; callers decide whether that is worth a warning.
    pub fn from_label(label: &str) -> Option<DocumentType> {
        let key: String = label
            .chars()
            .filter(|c| !matches!(c, ' ' | '_' | '-'))
            .flat_map(char::to_lowercase)
            .collect();
        let kind = match key.as_str() {
            "article" | "researcharticle" => DocumentType::Article,
            "review" | "reviewarticle" => DocumentType::Review,
            "editorial" | "editorialmaterial" => DocumentType::Editorial,
            "letter" => DocumentType::Letter,
            "newsitem" | "news" => DocumentType::NewsItem,
            "obituary" => DocumentType::Obituary,
            "other" => DocumentType::Other,
            _ => return None,
        };
        Some(kind)
    }

    /// Like [`from_label`](Self::from_label) but maps unknown labels to
    /// `Other` and logs a warning.
    pub fn parse_lenient(label: &str) -> DocumentType {
        DocumentType::from_label(label).unwrap_or_else(|| {
            log::warn!("unknown doc_type `{label}`, treating as Other");
            DocumentType::Other
        })
    }
}

impl fmt::Display for DocumentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for DocumentType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for DocumentType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let label = <std::borrow::Cow<'de, str>>::deserialize(deserializer)?;
        Ok(DocumentType::parse_lenient(&label))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    pub journal_id: String,
    pub pub_year: Year,
    pub doc_type: DocumentType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalEntry {
    pub journal_id: String,
    pub canonical_name: String,
    #[serde(default)]
    pub name_variants: Vec<String>,
    pub discipline: String,
    #[serde(default)]
    pub specialty: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawReference {
    pub citing_paper_id: String,
    pub raw_cited_string: String,
    #[serde(default)]
    pub cited_paper_id: Option<String>,
    #[serde(default)]
    pub cited_journal_id: Option<String>,
    #[serde(default)]
    pub cited_year: Option<Year>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFile {
    Papers,
    Journals,
    References,
}

impl fmt::Display for SourceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceFile::Papers => PAPERS_FILE,
            SourceFile::Journals => JOURNALS_FILE,
            SourceFile::References => REFERENCES_FILE,
        })
    }
}

/// One problem found while validating a record set.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("{file}:{line}: malformed record: {message}")]
    MalformedRecord {
        file: SourceFile,
        line: usize,
        message: String,
    },
    #[error("{file}:{line}: duplicate id `{id}`")]
    DuplicateId {
        file: SourceFile,
        line: usize,
        id: String,
    },
    #[error("{file}:{line}: citing paper `{citing_paper_id}` is not in the corpus", file = SourceFile::References)]
    DanglingReference {
        line: usize,
        citing_paper_id: String,
    },
    #[error("{file}:{line}: cited paper `{cited_paper_id}` is not in the corpus", file = SourceFile::References)]
    DanglingCitedPaper { line: usize, cited_paper_id: String },
    #[error("{file}:{line}: {field} disagrees with cited paper `{cited_paper_id}`", file = SourceFile::References)]
    InconsistentReference {
        line: usize,
        cited_paper_id: String,
        field: &'static str,
    },
    #[error("{file}:{line}: unknown journal `{journal_id}`")]
    UnknownJournal {
        file: SourceFile,
        line: usize,
        journal_id: String,
    },
    #[error("journal name `{name}` normalizes to a key shared by `{journal_a}` and `{journal_b}`")]
    VariantCollision {
        name: String,
        journal_a: String,
        journal_b: String,
    },
    #[error("{file}:{line}: journal `{journal_id}` has an empty canonical name", file = SourceFile::Journals)]
    EmptyName { line: usize, journal_id: String },
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{} invalid record(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<RecordError>),
}

impl IngestError {
    pub fn records(&self) -> &[RecordError] {
        match self {
            IngestError::Invalid(errors) => errors,
            IngestError::Io { .. } => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no papers match the selection")]
pub struct EmptySelection;

/// Validated, immutable collection of journals, papers and references.
///
/// There is no way to mutate a finalized corpus:
///
/// ```compile_fail
/// # use citemetrics_core::corpus::CorpusBuilder;
/// let corpus = CorpusBuilder::new().build().unwrap();
/// corpus.papers_mut();
/// ```
#[derive(Debug, Clone)]
pub struct Corpus {
    journals: Vec<JournalEntry>,
    journal_index: HashMap<String, JournalIdx>,
    papers: Vec<PaperRecord>,
    paper_index: HashMap<String, PaperIdx>,
    paper_journal: Vec<JournalIdx>,
    papers_by_journal: Vec<Vec<PaperIdx>>,
    references: Vec<RawReference>,
    ref_citing: Vec<PaperIdx>,
    ref_cited: Vec<Option<PaperIdx>>,
    // references grouped by citing paper, CSR layout
    outgoing_offsets: Vec<u32>,
    outgoing: Vec<u32>,
    year_range: Option<(Year, Year)>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.journals == other.journals
            && self.papers == other.papers
            && self.references == other.references
    }
}

impl Eq for Corpus {}

impl Corpus {
    pub fn journals(&self) -> &[JournalEntry] {
        &self.journals
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn references(&self) -> &[RawReference] {
        &self.references
    }

    /// `(papers, journals, references)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.papers.len(), self.journals.len(), self.references.len())
    }

    /// Inclusive `(min, max)` publication year, `None` for a paperless corpus.
    pub fn year_range(&self) -> Option<(Year, Year)> {
        self.year_range
    }

    pub fn journal_idx(&self, journal_id: &str) -> Option<JournalIdx> {
        self.journal_index.get(journal_id).copied()
    }

    pub fn paper_idx(&self, paper_id: &str) -> Option<PaperIdx> {
        self.paper_index.get(paper_id).copied()
    }

    pub fn journal(&self, idx: JournalIdx) -> &JournalEntry {
        &self.journals[idx.get()]
    }

    pub fn paper(&self, idx: PaperIdx) -> &PaperRecord {
        &self.papers[idx.get()]
    }

    pub fn paper_journal(&self, idx: PaperIdx) -> JournalIdx {
        self.paper_journal[idx.get()]
    }

    pub fn papers_of(&self, journal: JournalIdx) -> &[PaperIdx] {
        &self.papers_by_journal[journal.get()]
    }

    pub fn citing_paper(&self, reference: usize) -> PaperIdx {
        self.ref_citing[reference]
    }

    pub fn cited_paper(&self, reference: usize) -> Option<PaperIdx> {
        self.ref_cited[reference]
    }

    /// Indices into [`references`](Self::references) made by `paper`.
    pub fn references_of(&self, paper: PaperIdx) -> &[u32] {
        let lo = self.outgoing_offsets[paper.get()] as usize;
        let hi = self.outgoing_offsets[paper.get() + 1] as usize;
        &self.outgoing[lo..hi]
    }

    pub fn journal_indices(&self) -> impl ExactSizeIterator<Item = JournalIdx> {
        (0..self.journals.len() as u32).map(JournalIdx)
    }

    /// Writes the three JSON-lines files into `dir`, creating it if needed.
    pub fn write_jsonl(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        write_lines(&dir.join(JOURNALS_FILE), &self.journals)?;
        write_lines(&dir.join(PAPERS_FILE), &self.papers)?;
        write_lines(&dir.join(REFERENCES_FILE), &self.references)
    }
}

fn write_lines<T: Serialize>(path: &Path, records: &[T]) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Fraction of papers in the year selection whose document type is citable.
pub fn citable_share(corpus: &Corpus, years: impl RangeBounds<Year>) -> Result<f64, EmptySelection> {
    let (mut total, mut citable) = (0u64, 0u64);
    for paper in corpus.papers().iter().filter(|p| years.contains(&p.pub_year)) {
        total += 1;
        citable += u64::from(paper.doc_type.is_citable());
    }
    if total == 0 {
        return Err(EmptySelection);
    }
    Ok(citable as f64 / total as f64)
}

/// Accumulates records and validates them into a [`Corpus`].
#[derive(Debug, Default)]
pub struct CorpusBuilder {
    journals: Vec<(usize, JournalEntry)>,
    papers: Vec<(usize, PaperRecord)>,
    references: Vec<(usize, RawReference)>,
    errors: Vec<RecordError>,
    normalizer: Option<Normalizer>,
}

impl CorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Normalizer used to detect journal name collisions. Defaults to
    /// [`Normalizer::default`].
    pub fn with_normalizer(mut self, normalizer: Normalizer) -> Self {
        self.normalizer = Some(normalizer);
        self
    }

    pub fn journal(mut self, entry: JournalEntry) -> Self {
        self.add_journal(entry);
        self
    }

    pub fn paper(mut self, record: PaperRecord) -> Self {
        self.add_paper(record);
        self
    }

    pub fn reference(mut self, reference: RawReference) -> Self {
        self.add_reference(reference);
        self
    }

    pub fn add_journal(&mut self, entry: JournalEntry) {
        let line = self.journals.len() + 1;
        self.journals.push((line, entry));
    }

    pub fn add_paper(&mut self, record: PaperRecord) {
        let line = self.papers.len() + 1;
        self.papers.push((line, record));
    }

    pub fn add_reference(&mut self, reference: RawReference) {
        let line = self.references.len() + 1;
        self.references.push((line, reference));
    }

    pub fn reserve_references(&mut self, additional: usize) {
        self.references.reserve(additional);
    }

    fn malformed(&mut self, file: SourceFile, line: usize, message: String) {
        self.errors.push(RecordError::MalformedRecord { file, line, message });
    }

    /// Validates everything added so far. On failure every problem is
    /// returned, not just the first.
    pub fn build(self) -> Result<Corpus, Vec<RecordError>> {
        let CorpusBuilder {
            journals: raw_journals,
            papers: raw_papers,
            references: raw_refs,
            mut errors,
            normalizer,
        } = self;
        let normalizer = normalizer.unwrap_or_default();

        let mut journals = Vec::with_capacity(raw_journals.len());
        let mut journal_index = HashMap::with_capacity(raw_journals.len());
        let mut name_owner: HashMap<String, usize> = HashMap::new();
        for (line, entry) in raw_journals {
            if journal_index.contains_key(&entry.journal_id) {
                errors.push(RecordError::DuplicateId {
                    file: SourceFile::Journals,
                    line,
                    id: entry.journal_id,
                });
                continue;
            }
            if entry.canonical_name.trim().is_empty() {
                errors.push(RecordError::EmptyName {
                    line,
                    journal_id: entry.journal_id,
                });
                continue;
            }
            let idx = journals.len();
            for name in std::iter::once(&entry.canonical_name).chain(&entry.name_variants) {
                let key = normalizer.normalize(name);
                if key.is_empty() {
                    continue;
                }
                match name_owner.get(&key) {
                    Some(&owner) if owner != idx => errors.push(RecordError::VariantCollision {
                        name: name.clone(),
                        journal_a: journals_id(&journals, owner),
                        journal_b: entry.journal_id.clone(),
                    }),
                    Some(_) => {}
                    None => {
                        name_owner.insert(key, idx);
                    }
                }
            }
            journal_index.insert(entry.journal_id.clone(), JournalIdx(idx as u32));
            journals.push(entry);
        }

        let mut papers = Vec::with_capacity(raw_papers.len());
        let mut paper_index = HashMap::with_capacity(raw_papers.len());
        let mut paper_journal = Vec::with_capacity(raw_papers.len());
        for (line, record) in raw_papers {
            if paper_index.contains_key(&record.paper_id) {
                errors.push(RecordError::DuplicateId {
                    file: SourceFile::Papers,
                    line,
                    id: record.paper_id,
                });
                continue;
            }
            let Some(&journal) = journal_index.get(&record.journal_id) else {
                errors.push(RecordError::UnknownJournal {
                    file: SourceFile::Papers,
                    line,
                    journal_id: record.journal_id,
                });
                continue;
            };
            paper_index.insert(record.paper_id.clone(), PaperIdx(papers.len() as u32));
            paper_journal.push(journal);
            papers.push(record);
        }

        let mut references = Vec::with_capacity(raw_refs.len());
        let mut ref_citing = Vec::with_capacity(raw_refs.len());
        let mut ref_cited = Vec::with_capacity(raw_refs.len());
        for (line, reference) in raw_refs {
            let Some(&citing) = paper_index.get(&reference.citing_paper_id) else {
                errors.push(RecordError::DanglingReference {
                    line,
                    citing_paper_id: reference.citing_paper_id,
                });
                continue;
            };
            let cited = match &reference.cited_paper_id {
                None => None,
                Some(id) => match paper_index.get(id) {
                    Some(&idx) => Some(idx),
                    None => {
                        errors.push(RecordError::DanglingCitedPaper {
                            line,
                            cited_paper_id: id.clone(),
                        });
                        continue;
                    }
                },
            };
            if let Some(cited) = cited {
                let target = &papers[cited.get()];
                let inconsistent = if reference
                    .cited_journal_id
                    .as_ref()
                    .is_some_and(|j| *j != target.journal_id)
                {
                    Some("cited_journal_id")
                } else if reference.cited_year.is_some_and(|y| y != target.pub_year) {
                    Some("cited_year")
                } else {
                    None
                };
                if let Some(field) = inconsistent {
                    errors.push(RecordError::InconsistentReference {
                        line,
                        cited_paper_id: target.paper_id.clone(),
                        field,
                    });
                    continue;
                }
            } else if let Some(journal_id) = &reference.cited_journal_id {
                if !journal_index.contains_key(journal_id) {
                    errors.push(RecordError::UnknownJournal {
                        file: SourceFile::References,
                        line,
                        journal_id: journal_id.clone(),
                    });
                    continue;
                }
            }
            ref_citing.push(citing);
            ref_cited.push(cited);
            references.push(reference);
        }

        if !errors.is_empty() {
            return Err(errors);
        }

        let mut papers_by_journal = vec![Vec::new(); journals.len()];
        for (i, journal) in paper_journal.iter().enumerate() {
            papers_by_journal[journal.get()].push(PaperIdx(i as u32));
        }

        let mut outgoing_offsets = vec![0u32; papers.len() + 1];
        for citing in &ref_citing {
            outgoing_offsets[citing.get() + 1] += 1;
        }
        for i in 0..papers.len() {
            outgoing_offsets[i + 1] += outgoing_offsets[i];
        }
        let mut cursor = outgoing_offsets.clone();
        let mut outgoing = vec![0u32; references.len()];
        for (r, citing) in ref_citing.iter().enumerate() {
            let slot = &mut cursor[citing.get()];
            outgoing[*slot as usize] = r as u32;
            *slot += 1;
        }

        let year_range = papers.iter().fold(None, |acc: Option<(Year, Year)>, p| {
            Some(match acc {
                None => (p.pub_year, p.pub_year),
                Some((lo, hi)) => (lo.min(p.pub_year), hi.max(p.pub_year)),
            })
        });

        Ok(Corpus {
            journals,
            journal_index,
            papers,
            paper_index,
            paper_journal,
            papers_by_journal,
            references,
            ref_citing,
            ref_cited,
            outgoing_offsets,
            outgoing,
            year_range,
        })
    }
}

fn journals_id(journals: &[JournalEntry], idx: usize) -> String {
    journals[idx].journal_id.clone()
}

/// Loads and validates a corpus from the three JSON-lines files.
pub fn ingest(papers_path: &Path, journals_path: &Path, references_path: &Path) -> Result<Corpus, IngestError> {
    ingest_with(papers_path, journals_path, references_path, Normalizer::default())
}

/// Loads `papers.jsonl`, `journals.jsonl` and `references.jsonl` from `dir`.
pub fn ingest_dir(dir: &Path) -> Result<Corpus, IngestError> {
    ingest(&dir.join(PAPERS_FILE), &dir.join(JOURNALS_FILE), &dir.join(REFERENCES_FILE))
}

pub fn ingest_with(
    papers_path: &Path,
    journals_path: &Path,
    references_path: &Path,
    normalizer: Normalizer,
) -> Result<Corpus, IngestError> {
    // Open everything up front so a missing file fails before any parsing.
    let journals = open(journals_path)?;
    let papers = open(papers_path)?;
    let references = open(references_path)?;

    let mut builder = CorpusBuilder::new().with_normalizer(normalizer);
    read_jsonl(journals, journals_path, SourceFile::Journals, &mut builder, |b, line, entry| {
        b.journals.push((line, entry));
    })?;
    read_jsonl(papers, papers_path, SourceFile::Papers, &mut builder, |b, line, record| {
        b.papers.push((line, record));
    })?;
    read_jsonl(references, references_path, SourceFile::References, &mut builder, |b, line, reference| {
        b.references.push((line, reference));
    })?;
    builder.build().map_err(IngestError::Invalid)
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(|f| BufReader::with_capacity(1 << 16, f))
        .map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn read_jsonl<T, F>(
    mut reader: BufReader<File>,
    path: &Path,
    file: SourceFile,
    builder: &mut CorpusBuilder,
    mut push: F,
) -> Result<(), IngestError>
where
    T: for<'de> Deserialize<'de>,
    F: FnMut(&mut CorpusBuilder, usize, T),
{
    let mut buf = String::new();
    let mut line = 0usize;
    loop {
        buf.clear();
        let read = reader.read_line(&mut buf).map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if read == 0 {
            return Ok(());
        }
        line += 1;
        let text = buf.trim();
        if text.is_empty() {
            continue;
        }
        match serde_json::from_str::<T>(text) {
            Ok(record) => push(builder, line, record),
            Err(e) => builder.malformed(file, line, e.to_string()),
        }
    }
}
