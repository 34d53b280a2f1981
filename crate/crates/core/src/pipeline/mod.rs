//! Run configuration, stage orchestration and figure tables.

mod report;
mod run;

pub use report::{emit_plot_data, FIGURES};
pub use run::{matching_diagnostic, run_pipeline, run_stages, run_synth, RunReport, Stage, StageRecord, StageStatus};

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::authors::SimilarityWeights;
use crate::corpus::{CorpusPaths, DEFAULT_YEAR_RANGE};
use crate::disruption::DisruptionOptions;
use crate::impact::DEFAULT_REFERENCE_YEAR;
use crate::jnet::{LinkType, Metric};
use crate::matching::SizeBinning;
use crate::novelty::{PairCounting, ShuffleConfig};
use crate::synth::{RewireConfig, SynthConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: CorpusSection,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stages: StageToggles,
    #[serde(default)]
    pub impact: ImpactSection,
    #[serde(default)]
    pub matching: MatchingSection,
    #[serde(default)]
    pub selfcite: SelfciteSection,
    #[serde(default)]
    pub jnet: JnetSection,
    #[serde(default)]
    pub novelty: NoveltySection,
    #[serde(default)]
    pub disruption: DisruptionOptions,
    #[serde(default)]
    pub authors: SimilarityWeights,
    #[serde(default)]
    pub synth: SynthConfig,
    #[serde(default)]
    pub rewire: RewireConfig,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSection {
    pub papers: PathBuf,
    pub journals: PathBuf,
    #[serde(default)]
    pub publishers: Option<PathBuf>,
    #[serde(default)]
    pub authors: Option<PathBuf>,
    #[serde(default)]
    pub year_range: Option<(i32, i32)>,
}

impl CorpusSection {
    pub fn paths(&self) -> CorpusPaths {
        CorpusPaths {
            papers: self.papers.clone(),
            journals: self.journals.clone(),
            publishers: self.publishers.clone(),
            authors: self.authors.clone(),
        }
    }

    pub fn year_range(&self) -> (i32, i32) {
        self.year_range.unwrap_or(DEFAULT_YEAR_RANGE)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StageToggles {
    pub impact: bool,
    pub market: bool,
    pub matching: bool,
    pub selfcite: bool,
    pub jnet: bool,
    pub novelty: bool,
    pub disruption: bool,
    pub authors: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self {
            impact: true,
            market: true,
            matching: true,
            selfcite: true,
            jnet: true,
            novelty: true,
            disruption: true,
            authors: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpactSection {
    /// Years to tabulate; every year of the corpus range when absent.
    pub years: Option<Vec<i32>>,
    pub reference_year: i32,
    /// A precomputed normalization table; derived from the corpus when absent.
    pub normalization: Option<PathBuf>,
}

impl Default for ImpactSection {
    fn default() -> Self {
        Self {
            years: None,
            reference_year: DEFAULT_REFERENCE_YEAR,
            normalization: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchingSection {
    /// Matching year; the last year of the corpus range when absent.
    pub year: Option<i32>,
    pub use_normalized: bool,
    pub binning: SizeBinning,
}

impl Default for MatchingSection {
    fn default() -> Self {
        Self {
            year: None,
            use_normalized: true,
            binning: SizeBinning::Terciles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfciteSection {
    /// Inclusive citing-year window; all years when absent.
    pub window: Option<(i32, i32)>,
    pub include_self: bool,
    /// CSV of rate queries answered into `rates.csv`.
    pub rate_queries: Option<PathBuf>,
}

impl Default for SelfciteSection {
    fn default() -> Self {
        Self {
            window: None,
            include_self: true,
            rate_queries: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JnetSection {
    /// Network year; the matching year when absent.
    pub year: Option<i32>,
    pub windows: Vec<i32>,
    pub link_types: Vec<LinkType>,
    pub metrics: Vec<Metric>,
    pub damping: f64,
    pub tol: f64,
}

impl Default for JnetSection {
    fn default() -> Self {
        Self {
            year: None,
            windows: vec![2, 5],
            link_types: vec![LinkType::Citation, LinkType::Reference],
            metrics: Metric::ALL.to_vec(),
            damping: 0.85,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoveltySection {
    pub ensemble_count: usize,
    pub swaps_per_edge: f64,
    pub counting: PairCounting,
}

impl Default for NoveltySection {
    fn default() -> Self {
        let d = ShuffleConfig::default();
        Self {
            ensemble_count: d.ensemble_count,
            swaps_per_edge: d.swaps_per_edge,
            counting: PairCounting::default(),
        }
    }
}

impl RunConfig {
    /// Parses TOML; relative paths are taken from `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.corpus.papers);
        join(&mut self.corpus.journals);
        self.corpus.publishers.iter_mut().for_each(join);
        self.corpus.authors.iter_mut().for_each(join);
        self.impact.normalization.iter_mut().for_each(join);
        self.selfcite.rate_queries.iter_mut().for_each(join);
        join(&mut self.out_dir);
    }

    /// Every referenced input exists and the numeric settings are usable.
    pub fn validate(&self) -> Result<()> {
        let c = &self.corpus;
        let inputs = [Some(&c.papers), Some(&c.journals), c.publishers.as_ref(), c.authors.as_ref()]
            .into_iter()
            .chain([self.impact.normalization.as_ref(), self.selfcite.rate_queries.as_ref()])
            .flatten();
        for p in inputs {
            if !p.exists() {
                return Err(Error::Config(format!("input file not found: {}", p.display())));
            }
        }
        let (lo, hi) = c.year_range();
        if lo > hi {
            return Err(Error::Config(format!("empty year range {lo}..={hi}")));
        }
        if self.novelty.ensemble_count == 0 || self.novelty.swaps_per_edge <= 0.0 {
            return Err(Error::Config("novelty needs ensemble_count >= 1 and swaps_per_edge > 0".into()));
        }
        if self.authors.pair_threshold <= 0.0 || self.authors.group_threshold <= 0.0 {
            return Err(Error::Config("author thresholds must be positive".into()));
        }
        if self.jnet.windows.iter().any(|&w| w < 1) {
            return Err(Error::Config("network windows must be at least one year".into()));
        }
        Ok(())
    }

    pub fn matching_year(&self) -> i32 {
        self.matching.year.unwrap_or(self.corpus.year_range().1)
    }

    pub fn network_year(&self) -> i32 {
        self.jnet.year.unwrap_or_else(|| self.matching_year())
    }

    pub fn shuffle_config(&self) -> ShuffleConfig {
        ShuffleConfig {
            ensemble_count: self.novelty.ensemble_count,
            swaps_per_edge: self.novelty.swaps_per_edge,
            seed: self.seed,
        }
    }

    /// SHA-256 over the canonical JSON form of every field.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
