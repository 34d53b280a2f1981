use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::RunConfig;
use crate::authors::{author_demographics, disambiguate, write_author_stats_csv, write_clusters_csv};
use crate::corpus::{load_corpus, Corpus, InterchangeFormat, JournalIdx};
use crate::disruption::{disruption_table, write_disruption_csv};
use crate::impact::{impact_table, write_impact_csv, write_market_share_csv, NormalizationTable};
use crate::jnet::{
    build_journal_network, centrality_comparison, centrality_file_name, compute_centrality, write_centrality_csv,
    write_comparison_csv, write_comparison_summary, PageRankOptions,
};
use crate::matching::{read_matches_csv, write_matches_csv, MatchOptions, MatchRecord, Matcher};
use crate::novelty::{novelty_table, pair_zscores, write_novelty_csv};
use crate::output::write_text;
use crate::selfcite::{
    answer_rate_queries, read_rate_queries, solidarity_all, write_rates_csv, write_solidarity_csv, JournalCounts,
    SolidarityOptions, YearWindow,
};
use crate::synth::{
    psi_rewiring_experiment, write_initial_psi_csv, write_rewire_csv, write_scenarios_csv, RewireConfig, SynthConfig,
    DEFAULT_GRID,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Corpus,
    Impact,
    Market,
    Matching,
    Selfcite,
    Jnet,
    Novelty,
    Disruption,
    Authors,
}

impl Stage {
    /// Dependency order.
    pub const ORDER: [Stage; 9] = [
        Stage::Corpus,
        Stage::Impact,
        Stage::Market,
        Stage::Matching,
        Stage::Selfcite,
        Stage::Jnet,
        Stage::Novelty,
        Stage::Disruption,
        Stage::Authors,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Corpus => "corpus",
            Stage::Impact => "impact",
            Stage::Market => "market",
            Stage::Matching => "matching",
            Stage::Selfcite => "selfcite",
            Stage::Jnet => "jnet",
            Stage::Novelty => "novelty",
            Stage::Disruption => "disruption",
            Stage::Authors => "authors",
        }
    }

    pub fn dependencies(&self) -> &'static [Stage] {
        match self {
            Stage::Corpus => &[],
            Stage::Matching => &[Stage::Corpus, Stage::Impact],
            Stage::Jnet | Stage::Authors => &[Stage::Corpus, Stage::Matching],
            _ => &[Stage::Corpus],
        }
    }

    fn enabled(&self, config: &RunConfig) -> bool {
        let t = &config.stages;
        match self {
            Stage::Corpus => true,
            Stage::Impact => t.impact,
            Stage::Market => t.market,
            Stage::Matching => t.matching,
            Stage::Selfcite => t.selfcite,
            Stage::Jnet => t.jnet,
            Stage::Novelty => t.novelty,
            Stage::Disruption => t.disruption,
            Stage::Authors => t.authors,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "lowercase")]
pub enum StageStatus {
    Completed,
    Failed(String),
    /// A dependency did not complete.
    Skipped(String),
    Disabled,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StageRecord {
    pub stage: Stage,
    #[serde(flatten)]
    pub status: StageStatus,
    pub seconds: f64,
    /// File names inside the output directory.
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunReport {
    pub config_hash: String,
    pub partial: bool,
    pub stages: Vec<StageRecord>,
}

impl RunReport {
    pub fn record(&self, stage: Stage) -> Option<&StageRecord> {
        self.stages.iter().find(|r| r.stage == stage)
    }
}

#[derive(serde::Serialize)]
struct Manifest<'a> {
    config_hash: &'a str,
    partial: bool,
    seed: u64,
    threads: usize,
    stages: &'a [StageRecord],
    config: &'a RunConfig,
}

pub(crate) fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every enabled stage and writes `manifest.json`.
///
/// Returns an error only for an invalid configuration; stage failures are
/// recorded in the report, which is then marked partial.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport> {
    run_stages(config, &Stage::ORDER)
}

/// Like [`run_pipeline`], restricted to `selection` (the corpus is always loaded).
pub fn run_stages(config: &RunConfig, selection: &[Stage]) -> Result<RunReport> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    let records = with_threads(config.threads, || execute(config, selection))?;
    let hash = config.hash();
    let partial = records
        .iter()
        .any(|r| matches!(r.status, StageStatus::Failed(_) | StageStatus::Skipped(_)));
    let manifest = Manifest {
        config_hash: &hash,
        partial,
        seed: config.seed,
        threads: config.threads,
        stages: &records,
        config,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    write_text(&config.out_dir.join("manifest.json"), &(json + "\n"))?;
    Ok(RunReport {
        config_hash: hash,
        partial,
        stages: records,
    })
}

struct Ctx<'a> {
    config: &'a RunConfig,
    corpus: &'a Corpus,
    out: &'a Path,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// Matches from an earlier matching run, when present.
    fn matches(&self) -> Result<Option<Vec<MatchRecord>>> {
        let p = self.path("matches.csv");
        if p.exists() {
            Ok(Some(read_matches_csv(&p, self.corpus)?))
        } else {
            Ok(None)
        }
    }
}

fn execute(config: &RunConfig, selection: &[Stage]) -> Vec<StageRecord> {
    let mut records: Vec<StageRecord> = Vec::new();
    let started = Instant::now();
    let loaded = load_corpus(&config.corpus.paths(), InterchangeFormat::JsonlCsv, config.corpus.year_range());
    let corpus = match loaded {
        Ok(c) => {
            records.push(StageRecord {
                stage: Stage::Corpus,
                status: StageStatus::Completed,
                seconds: started.elapsed().as_secs_f64(),
                outputs: Vec::new(),
            });
            Some(c)
        }
        Err(e) => {
            log::error!("corpus: {e}");
            records.push(StageRecord {
                stage: Stage::Corpus,
                status: StageStatus::Failed(e.to_string()),
                seconds: started.elapsed().as_secs_f64(),
                outputs: Vec::new(),
            });
            None
        }
    };

    for stage in Stage::ORDER.into_iter().skip(1) {
        let mut record = StageRecord {
            stage,
            status: StageStatus::Disabled,
            seconds: 0.0,
            outputs: Vec::new(),
        };
        if !selection.contains(&stage) || !stage.enabled(config) {
            records.push(record);
            continue;
        }
        let blocker = stage.dependencies().iter().find(|d| {
            records
                .iter()
                .any(|r| r.stage == **d && matches!(r.status, StageStatus::Failed(_) | StageStatus::Skipped(_)))
        });
        if let Some(d) = blocker {
            record.status = StageStatus::Skipped(format!("{} did not complete", d.as_str()));
            records.push(record);
            continue;
        }
        let corpus = corpus.as_ref().expect("corpus stage completed");
        let ctx = Ctx {
            config,
            corpus,
            out: &config.out_dir,
        };
        let t = Instant::now();
        log::info!("stage {}", stage.as_str());
        match run_stage(stage, &ctx) {
            Ok(files) => {
                record.status = StageStatus::Completed;
                record.outputs = files
                    .iter()
                    .filter_map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()))
                    .collect();
            }
            Err(e) => {
                log::error!("{}: {e}", stage.as_str());
                record.status = StageStatus::Failed(e.to_string());
            }
        }
        record.seconds = t.elapsed().as_secs_f64();
        records.push(record);
    }
    records
}

fn run_stage(stage: Stage, ctx: &Ctx) -> Result<Vec<PathBuf>> {
    match stage {
        Stage::Corpus => Ok(Vec::new()),
        Stage::Impact => impact_stage(ctx),
        Stage::Market => {
            let p = ctx.path("market_share.csv");
            write_market_share_csv(&p, ctx.corpus, &impact_years(ctx))?;
            Ok(vec![p])
        }
        Stage::Matching => matching_stage(ctx),
        Stage::Selfcite => selfcite_stage(ctx),
        Stage::Jnet => jnet_stage(ctx),
        Stage::Novelty => {
            let z = pair_zscores(ctx.corpus, &ctx.config.shuffle_config(), ctx.config.novelty.counting);
            log::info!("novelty: {} of {} journal pairs have no null spread", z.undefined_count(), z.pairs.len());
            let p = ctx.path("novelty.csv");
            write_novelty_csv(&p, ctx.corpus, &novelty_table(ctx.corpus, &z))?;
            Ok(vec![p])
        }
        Stage::Disruption => {
            let p = ctx.path("disruption.csv");
            write_disruption_csv(&p, ctx.corpus, &disruption_table(ctx.corpus, &ctx.config.disruption))?;
            Ok(vec![p])
        }
        Stage::Authors => authors_stage(ctx),
    }
}

fn impact_years(ctx: &Ctx) -> Vec<i32> {
    ctx.config.impact.years.clone().unwrap_or_else(|| ctx.corpus.years())
}

fn impact_stage(ctx: &Ctx) -> Result<Vec<PathBuf>> {
    let section = &ctx.config.impact;
    let table = match &section.normalization {
        Some(p) => Some(NormalizationTable::read_csv(p)?),
        None => match NormalizationTable::from_corpus(ctx.corpus, section.reference_year) {
            Ok(t) => Some(t),
            Err(e) => {
                log::warn!("impact: no normalization table ({e}); normalized impact left undefined");
                None
            }
        },
    };
    let p = ctx.path("impact.csv");
    write_impact_csv(&p, ctx.corpus, &impact_table(ctx.corpus, &impact_years(ctx), table.as_ref()))?;
    let mut files = vec![p];
    if let Some(t) = table {
        let p = ctx.path("normalization.csv");
        t.write_csv(&p)?;
        files.push(p);
    }
    Ok(files)
}

fn matching_stage(ctx: &Ctx) -> Result<Vec<PathBuf>> {
    let section = &ctx.config.matching;
    let table = if section.use_normalized {
        let p = match &ctx.config.impact.normalization {
            Some(p) => p.clone(),
            None => ctx.path("normalization.csv"),
        };
        if !p.exists() {
            return Err(Error::MissingStageOutput {
                stage: Stage::Impact.as_str().into(),
                path: p,
            });
        }
        Some(NormalizationTable::read_csv(&p)?)
    } else {
        None
    };
    let opts = MatchOptions {
        use_normalized: section.use_normalized,
        binning: section.binning,
    };
    let records = Matcher::new(ctx.corpus, ctx.config.matching_year(), table.as_ref(), opts)?.match_all();
    let p = ctx.path("matches.csv");
    write_matches_csv(&p, ctx.corpus, &records)?;
    Ok(vec![p])
}

fn selfcite_stage(ctx: &Ctx) -> Result<Vec<PathBuf>> {
    let section = &ctx.config.selfcite;
    let window = section.window.map_or(YearWindow::ALL, |(a, b)| YearWindow::years(a, b));
    let counts = JournalCounts::from_corpus(ctx.corpus, window);
    let scores = solidarity_all(
        &counts,
        SolidarityOptions {
            include_self: section.include_self,
        },
    );
    let p = ctx.path("solidarity.csv");
    write_solidarity_csv(&p, ctx.corpus, &counts, &scores)?;
    let mut files = vec![p];
    if let Some(q) = &section.rate_queries {
        let queries = read_rate_queries(q)?;
        let answers = answer_rate_queries(ctx.corpus, &queries)?;
        let p = ctx.path("rates.csv");
        write_rates_csv(&p, &queries, &answers)?;
        files.push(p);
    }
    Ok(files)
}

fn jnet_stage(ctx: &Ctx) -> Result<Vec<PathBuf>> {
    let section = &ctx.config.jnet;
    let year = ctx.config.network_year();
    let matches = ctx.matches()?;
    let pr = PageRankOptions {
        damping: section.damping,
        tol: section.tol,
        ..Default::default()
    };
    let mut files = Vec::new();
    let mut reports = Vec::new();
    for &window in &section.windows {
        for &link in &section.link_types {
            let net = build_journal_network(ctx.corpus, year, window, link);
            let suffix = format!("{year}_{window}{}", link.as_str());
            let p = ctx.path(&format!("network_{suffix}.csv"));
            net.write_edge_list(&p, ctx.corpus)?;
            files.push(p);
            if net.is_empty() {
                continue;
            }
            let vectors = section
                .metrics
                .iter()
                .map(|&m| compute_centrality(&net, m, pr))
                .collect::<Result<Vec<_>>>()?;
            for v in &vectors {
                let p = ctx.path(&centrality_file_name(&net, v.metric));
                write_centrality_csv(&p, ctx.corpus, &net, v)?;
                files.push(p);
            }
            if let Some(m) = &matches {
                let report = centrality_comparison(m, &net, &vectors);
                let p = ctx.path(&format!("comparison_{suffix}.csv"));
                write_comparison_csv(&p, ctx.corpus, &net, &report)?;
                files.push(p);
                reports.push((net, report));
            }
        }
    }
    if matches.is_some() {
        let p = ctx.path("centrality_summary.csv");
        let refs: Vec<_> = reports.iter().map(|(n, r)| (n, r)).collect();
        write_comparison_summary(&p, &refs)?;
        files.push(p);
    }
    Ok(files)
}

pub(crate) fn questioned_journals(corpus: &Corpus) -> HashSet<JournalIdx> {
    (0..corpus.journals().len() as JournalIdx)
        .filter(|&j| corpus.journal(j).questionable)
        .collect()
}

pub(crate) fn control_journals(matches: &[MatchRecord]) -> HashSet<JournalIdx> {
    matches.iter().filter_map(|m| m.uj).collect()
}

fn authors_stage(ctx: &Ctx) -> Result<Vec<PathBuf>> {
    let clusters = disambiguate(ctx.corpus, &ctx.config.authors);
    let p = ctx.path("clusters.csv");
    write_clusters_csv(&p, ctx.corpus, &clusters)?;
    let mut groups = vec![(
        "qj".to_string(),
        author_demographics(ctx.corpus, &clusters, &questioned_journals(ctx.corpus)),
    )];
    if let Some(m) = ctx.matches()? {
        groups.push(("uj".to_string(), author_demographics(ctx.corpus, &clusters, &control_journals(&m))));
    }
    let s = ctx.path("author_stats.csv");
    write_author_stats_csv(&s, &groups)?;
    Ok(vec![p, s])
}

/// The ψ validation experiments: scenario sweeps and the rewiring ensemble.
pub fn run_synth(synth: &SynthConfig, rewire: &RewireConfig, out_dir: &Path, threads: usize) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let scenarios = out_dir.join("synth_psi_scenarios.csv");
    write_scenarios_csv(&scenarios, &DEFAULT_GRID)?;
    let experiment = with_threads(threads, || psi_rewiring_experiment(synth, rewire))?;
    let curves = out_dir.join("synth_psi_rewire.csv");
    write_rewire_csv(&curves, &experiment)?;
    let initial = out_dir.join("synth_psi_initial.csv");
    write_initial_psi_csv(&initial, &experiment)?;
    Ok(vec![scenarios, curves, initial])
}

/// Size-binning comparison for the matching year, written to `binning_diagnostic.csv`.
pub fn matching_diagnostic(config: &RunConfig) -> Result<PathBuf> {
    let corpus = load_corpus(&config.corpus.paths(), InterchangeFormat::JsonlCsv, config.corpus.year_range())?;
    let use_normalized = config.matching.use_normalized;
    let table = if use_normalized {
        let p = config
            .impact
            .normalization
            .clone()
            .unwrap_or_else(|| config.out_dir.join("normalization.csv"));
        if !p.exists() {
            return Err(Error::MissingStageOutput {
                stage: Stage::Impact.as_str().into(),
                path: p,
            });
        }
        Some(NormalizationTable::read_csv(&p)?)
    } else {
        None
    };
    let summaries = with_threads(config.threads, || {
        crate::matching::binning_diagnostic(&corpus, config.matching_year(), table.as_ref(), use_normalized)
    })??;
    let p = config.out_dir.join("binning_diagnostic.csv");
    crate::matching::write_binning_csv(&p, &summaries)?;
    Ok(p)
}
