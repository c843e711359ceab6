//! Deterministic factory for synthetic ("nonsense") summarization
//! pretraining corpora.
//!
//! * [`vocab`] and [`document`] sample base documents from an artificial
//!   three-letter vocabulary.
//! * [`step`] builds the denoising tasks (next sentence generation, sentence
//!   reordering, masked document generation).
//! * [`elementary`] plants and solves the 21 elementary summarization
//!   subtasks, each with an independent acceptance oracle.
//! * [`ensemble`] composes several elementary tasks into one pair.
//! * [`rouge`] scores candidate summaries.
//! * [`io`] reads and writes JSON-lines datasets, ingests real text and
//!   reports statistics; [`pipeline`] drives parallel generation.
//!
//! Every instance is a pure function of `(seed, stream, index)`, see
//! [`rng`].

pub mod document;
pub mod elementary;
pub mod ensemble;
pub mod error;
pub mod instance;
pub mod io;
pub mod pipeline;
pub mod rng;
pub mod rouge;
pub mod step;
pub mod vocab;

pub use document::{DocPolicy, Document, DocumentSampler, LengthRange, Sentence};
pub use elementary::{ElementaryKind, KeywordScheme, Oracle, TaskRecord};
pub use ensemble::EnsembleConfig;
pub use error::{Error, Result};
pub use instance::{verify_instance, TaskInstance, TaskMeta};
pub use rng::{derive_instance_rng, StreamKey};
pub use step::{MaskConfig, StepKind};
pub use vocab::{build_vocabulary, word_at, Vocabulary};
