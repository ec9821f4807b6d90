//! Journal citation indicators computed from raw paper, journal and
//! reference records.
//!
//! The pipeline is: [`corpus`] ingests and validates records, [`matcher`]
//! resolves every reference to a citation class, then [`indicators`],
//! [`network`], [`distributions`] and [`anomaly`] compute journal-level
//! statistics from the resolved corpus. [`synth`] generates seeded corpora
//! and fixtures and holds brute-force oracles.

pub mod anomaly;
pub mod corpus;
pub mod distributions;
pub mod indicators;
pub mod matcher;
pub mod network;
pub mod synth;

pub use anomaly::{AnomalyError, AnomalyFlag, AnomalyKind, DetectorConfig};
pub use corpus::{
    Corpus, CorpusBuilder, DocumentType, IngestError, JournalEntry, JournalIdx, PaperIdx, PaperRecord, RawReference,
    RecordError, Year,
};
pub use distributions::{CohortCurve, DisciplineProfile, DistributionError, DistributionSummary, InflationSeries};
pub use indicators::{CitationTally, Decimals, IndicatorError, IndicatorReport, Window};
pub use matcher::{resolve, CitationClass, Classification, Normalizer, ResolvedCorpus};
pub use network::{JournalCitationMatrix, NetworkError, RankingParams, RankingRow};
pub use synth::{ScenarioSpec, SynthError};
