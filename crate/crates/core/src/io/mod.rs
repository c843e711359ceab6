//! Dataset files, real-text ingestion and statistics.

mod dataset;
mod ingest;
mod stats;

pub use dataset::{
    read_dataset, write_dataset, DatasetReader, DatasetRecord, DatasetWriter, Provenance,
};
pub use ingest::{
    assemble_documents, ingest_real_corpus, ingest_text, read_documents, split_sentences,
    write_documents, IngestPolicy,
};
pub use stats::{dataset_stats, nearest_rank, LengthSummary, StatsReport};
