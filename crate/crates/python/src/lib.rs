//! Python bindings. Structured results (records, reports) are returned as
//! plain dicts and lists decoded from their JSON form.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use nonsense_core::document::DocumentSampler;
use nonsense_core::elementary::generate_elementary as core_generate_elementary;
use nonsense_core::ensemble::compose;
use nonsense_core::io::{dataset_stats as core_dataset_stats, DatasetRecord, Provenance};
use nonsense_core::pipeline::{
    verify_dataset as core_verify_dataset, Generator as CoreGenerator, RunConfig, TaskSelection,
};
use nonsense_core::rouge::{score_texts, PairScores, Tokenization};
use nonsense_core::step::make_step as core_make_step;
use nonsense_core::{
    derive_instance_rng, instance, vocab, DocPolicy, ElementaryKind, EnsembleConfig, Error,
    KeywordScheme, MaskConfig, StepKind, TaskInstance, Vocabulary,
};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Consistency(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn load_scheme(path: Option<PathBuf>) -> PyResult<KeywordScheme> {
    match path {
        None => Ok(KeywordScheme::default()),
        Some(p) => KeywordScheme::load(p).map_err(to_py_err),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py_err)
}

fn instance_dict<'py>(
    py: Python<'py>,
    inst: &TaskInstance,
    seed: u64,
    stream: &str,
    index: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let record = DatasetRecord::from_instance(
        inst,
        &Provenance {
            seed,
            stream: stream.to_string(),
            index,
            config_digest: String::new(),
        },
    );
    to_py(py, &record)
}

/// The vocabulary word at `index`.
#[pyfunction]
fn word_at(index: usize) -> PyResult<String> {
    vocab::word_at(index).map_err(to_py_err)
}

/// Inverse of `word_at`; None for non-words.
#[pyfunction]
fn index_of(word: &str) -> Option<usize> {
    vocab::index_of(word)
}

/// The first `size` vocabulary words.
#[pyfunction]
#[pyo3(signature = (size = vocab::DEFAULT_VOCAB_SIZE))]
fn build_vocabulary(size: usize) -> PyResult<Vec<String>> {
    Ok(Vocabulary::new(size).map_err(to_py_err)?.words().to_vec())
}

#[pyfunction]
fn step_kinds() -> Vec<&'static str> {
    StepKind::ALL.iter().map(|k| k.tag()).collect()
}

#[pyfunction]
fn elementary_kinds() -> Vec<&'static str> {
    ElementaryKind::ALL.iter().map(|k| k.name()).collect()
}

/// Samples a nonsense document as a list of sentences (token lists).
/// `policy` is "sentences" (7 to 13 sentences) or "tokens" (512-token budget).
#[pyfunction]
#[pyo3(signature = (seed, index = 0, policy = "sentences", vocab_size = vocab::DEFAULT_VOCAB_SIZE))]
fn sample_document(
    seed: u64,
    index: u64,
    policy: &str,
    vocab_size: usize,
) -> PyResult<Vec<Vec<String>>> {
    let policy = match policy {
        "sentences" => DocPolicy::ELEMENTARY,
        "tokens" => DocPolicy::STEP,
        other => return Err(PyValueError::new_err(format!("unknown policy `{other}`"))),
    };
    let sampler = DocumentSampler::new(Vocabulary::new(vocab_size).map_err(to_py_err)?, policy);
    let mut rng = derive_instance_rng(seed, "python/document", index);
    let doc = sampler.sample(&mut rng).map_err(to_py_err)?;
    Ok(doc.sentences.iter().map(|s| s.to_tokens()).collect())
}

/// One denoising instance as a dataset record dict.
#[pyfunction]
#[pyo3(signature = (kind, seed, index = 0, mask_fraction = 0.15, per_token = true))]
fn make_step<'py>(
    py: Python<'py>,
    kind: &str,
    seed: u64,
    index: u64,
    mask_fraction: f64,
    per_token: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let kind: StepKind = parse(kind)?;
    let stream = format!("step/{}", kind.tag());
    let sampler = DocumentSampler::new(Vocabulary::default(), DocPolicy::STEP);
    let cfg = MaskConfig {
        mask_fraction,
        per_token,
        ..MaskConfig::default()
    };
    let mut rng = derive_instance_rng(seed, &stream, index);
    let doc = sampler.sample(&mut rng).map_err(to_py_err)?;
    let inst = core_make_step(kind, &mut rng, &doc, &cfg).map_err(to_py_err)?;
    let inst = TaskInstance::from_step(format!("{}-{index:08}", kind.tag()), inst);
    instance_dict(py, &inst, seed, &stream, index)
}

/// One elementary task instance as a dataset record dict.
#[pyfunction]
#[pyo3(signature = (kind, seed, index = 0, scheme = None))]
fn generate_elementary<'py>(
    py: Python<'py>,
    kind: &str,
    seed: u64,
    index: u64,
    scheme: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let kind: ElementaryKind = parse(kind)?;
    let scheme = load_scheme(scheme)?;
    let stream = format!("tasks/{}", kind.name());
    let sampler = DocumentSampler::new(Vocabulary::default(), DocPolicy::ELEMENTARY);
    let mut rng = derive_instance_rng(seed, &stream, index);
    let inst = core_generate_elementary(kind, &mut rng, &scheme, &sampler).map_err(to_py_err)?;
    let inst = TaskInstance::from_elementary(format!("{}-{index:08}", kind.name()), inst);
    instance_dict(py, &inst, seed, &stream, index)
}

/// One ensemble instance (three sampled kinds by default) as a record dict.
#[pyfunction]
#[pyo3(signature = (seed, index = 0, tasks_per_instance = 3, scheme = None))]
fn compose_ensemble<'py>(
    py: Python<'py>,
    seed: u64,
    index: u64,
    tasks_per_instance: usize,
    scheme: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let scheme = load_scheme(scheme)?;
    let cfg = EnsembleConfig {
        tasks_per_instance,
        ..EnsembleConfig::default()
    };
    let stream = "tasks/ensemble";
    let sampler = DocumentSampler::new(Vocabulary::default(), DocPolicy::ELEMENTARY);
    let mut rng = derive_instance_rng(seed, stream, index);
    let inst = compose(&mut rng, &scheme, &sampler, &cfg).map_err(to_py_err)?;
    let inst = TaskInstance::from_ensemble(format!("ensemble-{index:08}"), inst);
    instance_dict(py, &inst, seed, stream, index)
}

/// Replays a record's checks. Accepts a JSON line or a record dict.
#[pyfunction]
#[pyo3(signature = (record, scheme = None))]
fn verify_record(
    py: Python<'_>,
    record: &Bound<'_, PyAny>,
    scheme: Option<PathBuf>,
) -> PyResult<bool> {
    let text: String = match record.extract::<String>() {
        Ok(s) => s,
        Err(_) => PyModule::import(py, "json")?
            .call_method1("dumps", (record,))?
            .extract()?,
    };
    let rec: DatasetRecord =
        serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let scheme = load_scheme(scheme)?;
    let inst = rec.to_instance().map_err(to_py_err)?;
    Ok(instance::verify_instance(&inst, &scheme))
}

/// ROUGE-1/2/L of one candidate against one reference.
#[pyfunction]
#[pyo3(signature = (candidate, reference, real_text = false))]
fn rouge<'py>(
    py: Python<'py>,
    candidate: &str,
    reference: &str,
    real_text: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let tok = tokenization(real_text);
    let scores = PairScores::score(&tok.tokenize(candidate), &tok.tokenize(reference));
    to_py(py, &scores)
}

/// Corpus ROUGE report over aligned candidate and reference lists.
#[pyfunction]
#[pyo3(signature = (candidates, references, real_text = false))]
fn corpus_rouge<'py>(
    py: Python<'py>,
    candidates: Vec<String>,
    references: Vec<String>,
    real_text: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let report =
        score_texts(&candidates, &references, tokenization(real_text)).map_err(to_py_err)?;
    to_py(py, &report)
}

fn tokenization(real_text: bool) -> Tokenization {
    if real_text {
        Tokenization::RealText
    } else {
        Tokenization::Whitespace
    }
}

/// Writes a dataset; `task` is a denoising kind (nsg, sr, ...), an
/// elementary kind name, or "ensemble".
#[pyfunction]
#[pyo3(signature = (task, count, seed, out, vocab_size = vocab::DEFAULT_VOCAB_SIZE, scheme = None))]
fn generate_dataset<'py>(
    py: Python<'py>,
    task: &str,
    count: u64,
    seed: u64,
    out: PathBuf,
    vocab_size: usize,
    scheme: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let selection = if task.eq_ignore_ascii_case("ensemble") {
        TaskSelection::Ensemble {
            config: EnsembleConfig::default(),
        }
    } else if let Ok(kind) = task.parse::<StepKind>() {
        TaskSelection::Step { kind }
    } else {
        TaskSelection::Elementary { kind: parse(task)? }
    };
    let mut config = RunConfig::new(seed, count, selection);
    config.vocab_size = vocab_size;
    config.scheme = load_scheme(scheme)?;
    let generator = CoreGenerator::new(config).map_err(to_py_err)?;
    let summary = py.detach(|| generator.write(&out)).map_err(to_py_err)?;
    to_py(
        py,
        &serde_json::json!({
            "records": summary.records,
            "seconds": summary.elapsed.as_secs_f64(),
            "config_digest": summary.config_digest,
        }),
    )
}

#[pyfunction]
#[pyo3(signature = (path, scheme = None))]
fn verify_dataset<'py>(
    py: Python<'py>,
    path: PathBuf,
    scheme: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let scheme = load_scheme(scheme)?;
    let report = py
        .detach(|| core_verify_dataset(&path, &scheme))
        .map_err(to_py_err)?;
    to_py(py, &report)
}

#[pyfunction]
fn dataset_stats<'py>(py: Python<'py>, path: PathBuf) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &core_dataset_stats(&path).map_err(to_py_err)?)
}

#[pymodule]
fn nonsense(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(word_at, m)?)?;
    m.add_function(wrap_pyfunction!(index_of, m)?)?;
    m.add_function(wrap_pyfunction!(build_vocabulary, m)?)?;
    m.add_function(wrap_pyfunction!(step_kinds, m)?)?;
    m.add_function(wrap_pyfunction!(elementary_kinds, m)?)?;
    m.add_function(wrap_pyfunction!(sample_document, m)?)?;
    m.add_function(wrap_pyfunction!(make_step, m)?)?;
    m.add_function(wrap_pyfunction!(generate_elementary, m)?)?;
    m.add_function(wrap_pyfunction!(compose_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(verify_record, m)?)?;
    m.add_function(wrap_pyfunction!(rouge, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_rouge, m)?)?;
    m.add_function(wrap_pyfunction!(generate_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(dataset_stats, m)?)?;
    Ok(())
}
