//! Python bindings: corpus preparation, training, generation, metrics and SSML.

use std::fs::File;
use std::path::PathBuf;

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;

use wordlen::corpus::{
    encode_all, encode_sample, filter_by_alpha, fixture_vocabulary, parse_alignments, read_dataset_csv,
    write_dataset_csv, Dataset, EncodedSample, Emotion, PosTable, RelativeSequence,
};
use wordlen::eval::{self, FdMode, WarpPath};
use wordlen::fixtures::SENTENCES;
use wordlen::model::{Generator, ModelConfig};
use wordlen::ssml::{self, DEFAULT_VOICE};
use wordlen::training::{
    generate_padded, load_checkpoint, save_checkpoint, ImleConfig, ModelKind, TrainConfig, WganTrainer,
};

fn err(e: wordlen::Error) -> PyErr {
    match e {
        wordlen::Error::NonFiniteLoss { .. } | wordlen::Error::NonFiniteGradient(_) => {
            PyArithmeticError::new_err(e.to_string())
        }
        wordlen::Error::Io(_) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn value_err(msg: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(msg.to_string())
}

/// Converts an optional Python mapping to a config struct through JSON;
/// missing keys take their defaults.
fn config<T: DeserializeOwned + Default>(obj: Option<&Bound<'_, PyAny>>) -> PyResult<T> {
    let Some(obj) = obj else { return Ok(T::default()) };
    let json: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&json).map_err(value_err)
}

fn emotion(name: &str) -> PyResult<Emotion> {
    name.parse().map_err(value_err)
}

fn query(generator: &Generator, sentence_id: usize, emotion: Emotion, speaker_id: usize) -> PyResult<EncodedSample> {
    let n = ssml::sentence_words(sentence_id).map_err(err)?.len();
    let rel = RelativeSequence { sentence_id, emotion, speaker_id, values: vec![0.0; n] };
    encode_sample(&rel, &fixture_vocabulary(), generator.config.input_mode, &PosTable::builtin()).map_err(err)
}

fn sample_many(
    generator: &Generator,
    pad_to: Option<usize>,
    sentence_id: usize,
    emotion_name: &str,
    speaker_id: usize,
    count: usize,
    seed: u64,
) -> PyResult<Vec<Vec<f64>>> {
    let sample = query(generator, sentence_id, emotion(emotion_name)?, speaker_id)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| generate_padded(generator, &sample, pad_to, &mut rng).map(|s| s.values).map_err(err))
        .collect()
}

/// A prepared corpus: clips, per-word neutral references and relative lengths.
#[pyclass(name = "Dataset", module = "wordlen")]
pub struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    /// Reads an alignment CSV or aligner directory and keeps clips with
    /// `alpha >= alpha_threshold`.
    #[staticmethod]
    #[pyo3(signature = (path, alpha_threshold = 0.667))]
    fn from_alignments(path: PathBuf, alpha_threshold: f64) -> PyResult<Self> {
        let records = parse_alignments(&path).map_err(err)?;
        let inner = Dataset::from_records(filter_by_alpha(&records, alpha_threshold)).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        let f = File::open(&path).map_err(|e| PyOSError::new_err(e.to_string()))?;
        Ok(Self { inner: read_dataset_csv(f).map_err(err)? })
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        let f = File::create(&path).map_err(|e| PyOSError::new_err(e.to_string()))?;
        write_dataset_csv(f, &self.inner).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }

    /// `(sentence_id, emotion, speaker_id, values)` per clip.
    fn relative(&self) -> Vec<(usize, String, usize, Vec<f64>)> {
        self.inner.relative.iter().map(|r| (r.sentence_id, r.emotion.to_string(), r.speaker_id, r.values.clone())).collect()
    }

    /// Clips per emotion name.
    fn emotion_counts(&self) -> Vec<(String, usize)> {
        Emotion::ALL
            .iter()
            .map(|e| (e.to_string(), self.inner.records.iter().filter(|r| r.emotion == *e).count()))
            .filter(|(_, n)| *n > 0)
            .collect()
    }

    /// Keeps only clips of the given emotions.
    fn select(&self, emotions: Vec<String>) -> PyResult<Self> {
        let keep: Vec<Emotion> = emotions.iter().map(|e| emotion(e)).collect::<PyResult<_>>()?;
        let mut inner = Dataset { records: Vec::new(), references: Vec::new(), relative: Vec::new() };
        for i in 0..self.inner.records.len() {
            if keep.contains(&self.inner.records[i].emotion) {
                inner.records.push(self.inner.records[i].clone());
                inner.references.push(self.inner.references[i].clone());
                inner.relative.push(self.inner.relative[i].clone());
            }
        }
        Ok(Self { inner })
    }
}

fn encoded(data: &PyDataset, model: &ModelConfig) -> PyResult<Vec<EncodedSample>> {
    encode_all(&data.inner.relative, &fixture_vocabulary(), model.input_mode, &PosTable::builtin()).map_err(err)
}

/// WGAN trainer over a fixed dataset. `model` and `train` are dicts of
/// config fields; omitted fields keep their defaults.
#[pyclass(name = "GanTrainer", module = "wordlen")]
pub struct PyGanTrainer {
    inner: WganTrainer,
    data: Vec<EncodedSample>,
}

#[pymethods]
impl PyGanTrainer {
    #[new]
    #[pyo3(signature = (dataset, model = None, train = None))]
    fn new(dataset: &PyDataset, model: Option<&Bound<'_, PyAny>>, train: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let model: ModelConfig = config(model)?;
        let train: TrainConfig = config(train)?;
        let data = encoded(dataset, &model)?;
        Ok(Self { inner: WganTrainer::new(model, train).map_err(err)?, data })
    }

    /// Resumes from a checkpoint written by `save`.
    #[staticmethod]
    fn load(path: PathBuf, dataset: &PyDataset) -> PyResult<Self> {
        let ck = load_checkpoint(&path).map_err(err)?;
        let data = encoded(dataset, &ck.meta.model)?;
        Ok(Self { inner: WganTrainer::from_checkpoint(ck).map_err(err)?, data })
    }

    #[getter]
    fn epoch(&self) -> usize {
        self.inner.epoch
    }

    /// Runs one epoch; the result also reports the largest critic weight
    /// magnitude seen after any critic step.
    fn run_epoch<'py>(&mut self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let mut max_abs = 0.0f64;
        let s = self.inner.run_epoch(&self.data, &mut |i| max_abs = max_abs.max(i.critic_max_abs)).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("epoch", s.epoch)?;
        d.set_item("wasserstein", s.wasserstein)?;
        d.set_item("critic_loss", s.critic_loss)?;
        d.set_item("generator_loss", s.generator_loss)?;
        d.set_item("recon_loss", s.recon_loss)?;
        d.set_item("critic_max_abs", max_abs)?;
        Ok(d)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        save_checkpoint(&path, &self.inner.to_checkpoint()).map_err(err)
    }

    #[pyo3(signature = (sentence_id, emotion, speaker_id = 0, count = 1, seed = 0))]
    fn generate(&self, sentence_id: usize, emotion: &str, speaker_id: usize, count: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        sample_many(&self.inner.generator, self.inner.pad_to, sentence_id, emotion, speaker_id, count, seed)
    }
}

/// IMLE trainer (noise-free pretraining, then nearest-of-m updates).
#[pyclass(name = "ImleTrainer", module = "wordlen")]
pub struct PyImleTrainer {
    inner: wordlen::training::ImleTrainer,
    data: Vec<EncodedSample>,
}

#[pymethods]
impl PyImleTrainer {
    #[new]
    #[pyo3(signature = (dataset, model = None, imle = None))]
    fn new(dataset: &PyDataset, model: Option<&Bound<'_, PyAny>>, imle: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let model: ModelConfig = config(model)?;
        let imle: ImleConfig = config(imle)?;
        let data = encoded(dataset, &model)?;
        Ok(Self { inner: wordlen::training::ImleTrainer::new(model, imle).map_err(err)?, data })
    }

    #[getter]
    fn epoch(&self) -> usize {
        self.inner.epoch
    }

    #[getter]
    fn in_pretraining(&self) -> bool {
        self.inner.in_pretraining()
    }

    fn run_epoch(&mut self) -> PyResult<f64> {
        self.inner.run_epoch(&self.data).map_err(err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        save_checkpoint(&path, &self.inner.to_checkpoint()).map_err(err)
    }

    #[pyo3(signature = (sentence_id, emotion, speaker_id = 0, count = 1, seed = 0))]
    fn generate(&self, sentence_id: usize, emotion: &str, speaker_id: usize, count: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        sample_many(&self.inner.generator, None, sentence_id, emotion, speaker_id, count, seed)
    }
}

/// A trained generator loaded from a checkpoint, for sampling only.
#[pyclass(name = "Model", module = "wordlen")]
pub struct PyModel {
    generator: Generator,
    pad_to: Option<usize>,
    kind: ModelKind,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let ck = load_checkpoint(&path).map_err(err)?;
        let (kind, pad_to) = (ck.meta.kind, ck.meta.pad_to);
        Ok(Self { generator: Generator::from_params(ck.meta.model, ck.generator).map_err(err)?, pad_to, kind })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.kind {
            ModelKind::Gan => "gan",
            ModelKind::Imle => "imle",
        }
    }

    #[pyo3(signature = (sentence_id, emotion, speaker_id = 0, count = 1, seed = 0))]
    fn generate(&self, sentence_id: usize, emotion: &str, speaker_id: usize, count: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        sample_many(&self.generator, self.pad_to, sentence_id, emotion, speaker_id, count, seed)
    }
}

#[pyfunction]
fn sentences() -> Vec<&'static str> {
    SENTENCES.to_vec()
}

#[pyfunction]
fn sentence_words(sentence_id: usize) -> PyResult<Vec<String>> {
    ssml::sentence_words(sentence_id).map_err(err)
}

#[pyfunction]
fn relative_to_rate(r: f64) -> PyResult<u32> {
    ssml::relative_to_rate(r).map(|x| x.percent).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (tokens, rates, voice = DEFAULT_VOICE))]
fn emit_ssml(tokens: Vec<String>, rates: Vec<u32>, voice: &str) -> PyResult<String> {
    ssml::emit_ssml(&tokens, &rates, voice).map_err(err)
}

/// SSML for a fixture sentence from per-word relative lengths.
#[pyfunction]
#[pyo3(signature = (sentence_id, lengths, voice = DEFAULT_VOICE))]
fn ssml_for_sentence(sentence_id: usize, lengths: Vec<f64>, voice: &str) -> PyResult<String> {
    let words = ssml::sentence_words(sentence_id).map_err(err)?;
    let (doc, _) = ssml::SsmlDocument::from_relative(&words, &lengths, voice).map_err(err)?;
    Ok(doc.render())
}

#[pyfunction]
fn dtw(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, Vec<(usize, usize)>)> {
    let (d, path) = eval::dtw(&a, &b).map_err(err)?;
    Ok((d, path.0))
}

#[pyfunction]
#[pyo3(signature = (path, mode = "rms"))]
fn frame_disturbance(path: Vec<(usize, usize)>, mode: &str) -> PyResult<f64> {
    let mode: FdMode = mode.parse().map_err(value_err)?;
    Ok(eval::frame_disturbance(&WarpPath(path), mode))
}

#[pyfunction]
fn rmse(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    eval::rmse(&a, &b).map_err(err)
}

#[pyfunction]
fn pcc(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    eval::pcc(&a, &b).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (groups, alpha = 0.01))]
fn anova_oneway<'py>(py: Python<'py>, groups: Vec<Vec<f64>>, alpha: f64) -> PyResult<Bound<'py, PyDict>> {
    let a = eval::anova_oneway(&groups, alpha).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("f", a.f)?;
    d.set_item("df_between", a.df_between)?;
    d.set_item("df_within", a.df_within)?;
    d.set_item("p_value", a.p_value)?;
    d.set_item("significant", a.significant)?;
    Ok(d)
}

/// `(a, b, mean_diff, q, q_critical, significant)` for every group pair.
#[pyfunction]
#[pyo3(signature = (groups, alpha = 0.01))]
fn tukey_hsd(groups: Vec<Vec<f64>>, alpha: f64) -> PyResult<Vec<(usize, usize, f64, f64, f64, bool)>> {
    let pairs = eval::tukey_hsd(&groups, alpha).map_err(err)?;
    Ok(pairs.into_iter().map(|p| (p.a, p.b, p.mean_diff, p.q, p.q_critical, p.significant)).collect())
}

#[pymodule]
#[pyo3(name = "wordlen")]
fn wordlen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyGanTrainer>()?;
    m.add_class::<PyImleTrainer>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(sentences, m)?)?;
    m.add_function(wrap_pyfunction!(sentence_words, m)?)?;
    m.add_function(wrap_pyfunction!(relative_to_rate, m)?)?;
    m.add_function(wrap_pyfunction!(emit_ssml, m)?)?;
    m.add_function(wrap_pyfunction!(ssml_for_sentence, m)?)?;
    m.add_function(wrap_pyfunction!(dtw, m)?)?;
    m.add_function(wrap_pyfunction!(frame_disturbance, m)?)?;
    m.add_function(wrap_pyfunction!(rmse, m)?)?;
    m.add_function(wrap_pyfunction!(pcc, m)?)?;
    m.add_function(wrap_pyfunction!(anova_oneway, m)?)?;
    m.add_function(wrap_pyfunction!(tukey_hsd, m)?)?;
    Ok(())
}
