//! Python bindings for the `pubsolid` core library.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::pubsolid::corpus::{self, CorpusPaths, InterchangeFormat, IssnExtractor, DEFAULT_YEAR_RANGE};
use ::pubsolid::disruption::{disruption_counts, DisruptionOptions};
use ::pubsolid::impact::{journal_impact, market_shares};
use ::pubsolid::jnet::{self, Digraph, PageRankOptions};
use ::pubsolid::pipeline::{run_pipeline, RunConfig, StageStatus};
use ::pubsolid::selfcite::{solidarity_all, JournalCounts, SolidarityOptions, YearWindow};
use ::pubsolid::synth::{self, RewireConfig, Scenario, SynthConfig, DEFAULT_GRID};

fn err(e: ::pubsolid::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyfunction]
fn validate_issn(candidate: &str) -> bool {
    corpus::validate_issn(candidate)
}

#[pyfunction]
#[pyo3(signature = (text, case_insensitive = true))]
fn extract_issns(text: &str, case_insensitive: bool) -> Vec<String> {
    IssnExtractor { case_insensitive }.extract(text)
}

/// An indexed, immutable bibliographic corpus.
#[pyclass(name = "Corpus", frozen)]
struct PyCorpus {
    inner: corpus::Corpus,
}

impl PyCorpus {
    fn journal(&self, journal_id: &str) -> PyResult<u32> {
        self.inner
            .journal_idx(journal_id)
            .ok_or_else(|| PyValueError::new_err(format!("unknown journal {journal_id}")))
    }
}

#[pymethods]
impl PyCorpus {
    /// Loads `papers.jsonl` and the CSV tables.
    #[staticmethod]
    #[pyo3(signature = (papers, journals, publishers = None, authors = None, year_range = None))]
    fn load(
        papers: PathBuf,
        journals: PathBuf,
        publishers: Option<PathBuf>,
        authors: Option<PathBuf>,
        year_range: Option<(i32, i32)>,
    ) -> PyResult<Self> {
        let paths = CorpusPaths {
            papers,
            journals,
            publishers,
            authors,
        };
        let inner = corpus::load_corpus(&paths, InterchangeFormat::JsonlCsv, year_range.unwrap_or(DEFAULT_YEAR_RANGE))
            .map_err(err)?;
        Ok(Self { inner })
    }

    /// Loads the conventional file names from one directory.
    #[staticmethod]
    #[pyo3(signature = (dir, year_range = None))]
    fn from_dir(dir: PathBuf, year_range: Option<(i32, i32)>) -> PyResult<Self> {
        let inner = corpus::load_corpus(
            &CorpusPaths::in_dir(dir),
            InterchangeFormat::JsonlCsv,
            year_range.unwrap_or(DEFAULT_YEAR_RANGE),
        )
        .map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn paper_count(&self) -> usize {
        self.inner.paper_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn journal_ids(&self) -> Vec<String> {
        self.inner.journals().iter().map(|j| j.journal_id.clone()).collect()
    }

    /// Invariant violations; empty for a clean corpus.
    fn validate(&self) -> Vec<String> {
        corpus::validate_corpus(&self.inner)
            .violations
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn impact(&self, journal_id: &str, year: i32) -> PyResult<Option<f64>> {
        Ok(journal_impact(&self.inner, self.journal(journal_id)?, year).map(|i| i.value()))
    }

    /// Publisher id → share of the year's articles.
    fn market_shares(&self, year: i32) -> Vec<(String, f64)> {
        market_shares(&self.inner, year)
            .unwrap_or_default()
            .into_iter()
            .zip(self.inner.publishers())
            .map(|(s, p)| (p.publisher_id.clone(), s))
            .collect()
    }

    /// ψ of every journal over an optional year window; `None` where undefined.
    #[pyo3(signature = (start = None, end = None, include_self = true))]
    fn solidarity(&self, start: Option<i32>, end: Option<i32>, include_self: bool) -> Vec<(String, Option<f64>)> {
        let counts = JournalCounts::from_corpus(&self.inner, YearWindow { start, end });
        solidarity_all(&counts, SolidarityOptions { include_self })
            .into_iter()
            .zip(self.inner.journals())
            .map(|(r, j)| (j.journal_id.clone(), r.ok().map(|s| s.psi)))
            .collect()
    }

    #[pyo3(signature = (paper_id, citer_window_years = None))]
    fn disruptiveness(&self, paper_id: &str, citer_window_years: Option<u32>) -> PyResult<Option<f64>> {
        let p = self
            .inner
            .paper_idx(paper_id)
            .ok_or_else(|| PyValueError::new_err(format!("unknown paper {paper_id}")))?;
        Ok(disruption_counts(&self.inner, p, &DisruptionOptions { citer_window_years }).index())
    }
}

/// BC, CC, PR and PathCore of a weighted digraph given as `(from, to, weight)` edges.
#[pyfunction]
fn centralities<'py>(py: Python<'py>, n: usize, edges: Vec<(u32, u32, f64)>) -> PyResult<Bound<'py, PyDict>> {
    if let Some(e) = edges.iter().find(|e| e.0 as usize >= n || e.1 as usize >= n) {
        return Err(PyValueError::new_err(format!("edge {e:?} outside {n} nodes")));
    }
    let g = Digraph::from_edges(n, edges);
    let out = PyDict::new(py);
    out.set_item("bc", jnet::betweenness(&g))?;
    out.set_item("cc", jnet::closeness(&g))?;
    out.set_item("pr", jnet::pagerank(&g, PageRankOptions::default()).map_err(err)?)?;
    out.set_item("pathcore", jnet::pathcore(&g))?;
    Ok(out)
}

/// `(x, psi)` points of one analytic scenario (`"a"`, `"b"` or `"c"`).
#[pyfunction]
#[pyo3(signature = (scenario, grid = None))]
fn psi_scenario(scenario: &str, grid: Option<Vec<f64>>) -> PyResult<Vec<(f64, Option<f64>)>> {
    let s = Scenario::ALL
        .into_iter()
        .find(|s| s.as_str() == scenario)
        .ok_or_else(|| PyValueError::new_err(format!("unknown scenario {scenario}")))?;
    Ok(synth::psi_scenarios(s, grid.as_deref().unwrap_or(&DEFAULT_GRID)))
}

/// Runs the synthetic rewiring experiment; returns checkpoints and per-journal curves.
#[pyfunction]
#[pyo3(signature = (seed = 0, ensemble_count = 20))]
fn rewiring_experiment(py: Python<'_>, seed: u64, ensemble_count: usize) -> PyResult<Bound<'_, PyDict>> {
    let synth_config = SynthConfig {
        seed,
        ..SynthConfig::default()
    };
    let rewire = RewireConfig {
        seed,
        ensemble_count,
        ..RewireConfig::default()
    };
    let exp = py.detach(|| synth::psi_rewiring_experiment(&synth_config, &rewire));
    let out = PyDict::new(py);
    out.set_item("checkpoints", exp.checkpoints.clone())?;
    let curves: Vec<Bound<'_, PyDict>> = exp
        .curves
        .iter()
        .map(|c| -> PyResult<_> {
            let d = PyDict::new(py);
            d.set_item("journal", &c.journal)?;
            d.set_item("rate", c.rate)?;
            d.set_item("mean", c.mean.clone())?;
            d.set_item("std", c.std.clone())?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    out.set_item("curves", curves)?;
    Ok(out)
}

/// Runs every enabled stage of a TOML run configuration; returns stage → status.
#[pyfunction]
fn run(py: Python<'_>, config_path: PathBuf) -> PyResult<Vec<(String, String)>> {
    let config = RunConfig::load(&config_path).map_err(err)?;
    let report = py.detach(|| run_pipeline(&config)).map_err(err)?;
    Ok(report
        .stages
        .iter()
        .map(|r| {
            let status = match &r.status {
                StageStatus::Completed => "completed".to_string(),
                StageStatus::Failed(e) => format!("failed: {e}"),
                StageStatus::Skipped(e) => format!("skipped: {e}"),
                StageStatus::Disabled => "disabled".to_string(),
            };
            (r.stage.as_str().to_string(), status)
        })
        .collect())
}

#[pymodule(name = "pubsolid")]
fn pubsolid_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorpus>()?;
    m.add_function(wrap_pyfunction!(validate_issn, m)?)?;
    m.add_function(wrap_pyfunction!(extract_issns, m)?)?;
    m.add_function(wrap_pyfunction!(centralities, m)?)?;
    m.add_function(wrap_pyfunction!(psi_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(rewiring_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
