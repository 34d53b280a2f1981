use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use super::run::{control_journals, questioned_journals};
use super::{RunConfig, Stage};
use crate::corpus::{load_corpus, Corpus, InterchangeFormat, JournalIdx};
use crate::matching::read_matches_csv;
use crate::output::{cell, CsvOut};
use crate::{Error, Result};

/// Figure panels with a table contract.
pub const FIGURES: [&str; 9] = ["2E", "2F", "3", "4B", "4C", "4D", "S15", "S18", "S19"];

/// Writes the tidy table behind `figure_id` to `<out_dir>/figures/figure_<id>.csv`.
pub fn emit_plot_data(config: &RunConfig, figure_id: &str) -> Result<PathBuf> {
    let id = figure_id.trim().to_ascii_uppercase();
    if !FIGURES.contains(&id.as_str()) {
        return Err(Error::UnknownFigure(figure_id.to_string()));
    }
    let results = Results { dir: &config.out_dir };
    let target = config.out_dir.join("figures").join(format!("figure_{id}.csv"));
    match id.as_str() {
        "2E" => copy(&results.require("market_share.csv", "market")?, &target)?,
        "3" => copy(&results.require("centrality_summary.csv", Stage::Jnet.as_str())?, &target)?,
        "S15" => copy(&results.require("synth_psi_scenarios.csv", "synth")?, &target)?,
        "S18" => copy(&results.require("synth_psi_rewire.csv", "synth")?, &target)?,
        "2F" => figure_2f(config, &results, &target)?,
        "4D" => figure_4d(&results, &target)?,
        _ => {
            let groups = JournalGroups::load(config, &results)?;
            match id.as_str() {
                "4B" => figure_4b(&groups, &results, &target)?,
                "4C" => disruption_means(&groups, &results, &target, "team_size", "author_count")?,
                _ => disruption_means(&groups, &results, &target, "year", "year")?,
            }
        }
    }
    Ok(target)
}

struct Results<'a> {
    dir: &'a Path,
}

impl Results<'_> {
    fn require(&self, name: &str, stage: &str) -> Result<PathBuf> {
        let p = self.dir.join(name);
        if p.exists() {
            Ok(p)
        } else {
            Err(Error::MissingStageOutput {
                stage: stage.to_string(),
                path: p,
            })
        }
    }
}

fn copy(from: &Path, to: &Path) -> Result<()> {
    if let Some(parent) = to.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::copy(from, to).map_err(|e| Error::io(from, e))?;
    Ok(())
}

/// Header-addressed rows of a CSV file.
struct Table {
    columns: HashMap<String, usize>,
    rows: Vec<csv::StringRecord>,
    path: PathBuf,
}

impl Table {
    fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let columns = reader
            .headers()?
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_string(), i))
            .collect();
        let rows = reader.records().collect::<std::result::Result<_, _>>()?;
        Ok(Self {
            columns,
            rows,
            path: path.to_path_buf(),
        })
    }

    fn col(&self, name: &str) -> Result<usize> {
        self.columns.get(name).copied().ok_or_else(|| Error::Malformed {
            file: self.path.clone(),
            line: 1,
            field: name.to_string(),
            reason: "missing column".to_string(),
        })
    }
}

fn number(s: &str) -> Option<f64> {
    s.parse().ok()
}

/// Questioned journals and their matched controls.
struct JournalGroups {
    corpus: Corpus,
    qj: HashSet<JournalIdx>,
    uj: HashSet<JournalIdx>,
}

impl JournalGroups {
    fn load(config: &RunConfig, results: &Results) -> Result<Self> {
        let matches = results.require("matches.csv", Stage::Matching.as_str())?;
        let corpus = load_corpus(&config.corpus.paths(), InterchangeFormat::JsonlCsv, config.corpus.year_range())?;
        let uj = control_journals(&read_matches_csv(&matches, &corpus)?);
        let qj = questioned_journals(&corpus);
        Ok(Self { corpus, qj, uj })
    }

    fn of_paper(&self, paper_id: &str) -> Option<&'static str> {
        let j = self.corpus.paper_journal(self.corpus.paper_idx(paper_id)?)?;
        if self.qj.contains(&j) {
            Some("qj")
        } else if self.uj.contains(&j) {
            Some("uj")
        } else {
            None
        }
    }
}

/// `qj_id, psi_ratio, relative_publisher_size, qj_impact` per matched pair.
fn figure_2f(config: &RunConfig, results: &Results, target: &Path) -> Result<()> {
    let matches = Table::read(&results.require("matches.csv", Stage::Matching.as_str())?)?;
    let solidarity = Table::read(&results.require("solidarity.csv", Stage::Selfcite.as_str())?)?;
    let impact = Table::read(&results.require("impact.csv", Stage::Impact.as_str())?)?;

    let (sj, sp, st) = (
        solidarity.col("journal_id")?,
        solidarity.col("psi")?,
        solidarity.col("publisher_paper_total")?,
    );
    let psi: HashMap<&str, (Option<f64>, Option<f64>)> = solidarity
        .rows
        .iter()
        .map(|r| (&r[sj], (number(&r[sp]), number(&r[st]))))
        .collect();
    let year = config.matching_year().to_string();
    let (ij, iy, iv) = (impact.col("journal_id")?, impact.col("year")?, impact.col("impact")?);
    let impacts: HashMap<&str, Option<f64>> = impact
        .rows
        .iter()
        .filter(|r| r[iy] == year)
        .map(|r| (&r[ij], number(&r[iv])))
        .collect();

    let (mq, mu) = (matches.col("qj_id")?, matches.col("uj_id")?);
    let pairs: BTreeSet<(&str, &str)> = matches
        .rows
        .iter()
        .filter(|r| !r[mu].is_empty())
        .map(|r| (&r[mq], &r[mu]))
        .collect();
    let mut out = CsvOut::create(target, &["qj_id", "psi_ratio", "relative_publisher_size", "qj_impact"])?;
    for (q, u) in pairs {
        let (qpsi, qsize) = psi.get(q).copied().unwrap_or((None, None));
        let (upsi, usize_) = psi.get(u).copied().unwrap_or((None, None));
        let ratio = qpsi.zip(upsi).filter(|&(_, b)| b != 0.0).map(|(a, b)| a / b);
        let size = qsize.zip(usize_).filter(|&(_, b)| b != 0.0).map(|(a, b)| a / b);
        out.row([q.to_string(), cell(ratio), cell(size), cell(impacts.get(q).copied().flatten())])?;
    }
    out.finish()
}

/// Paper-level novelty of questioned and control journals.
fn figure_4b(groups: &JournalGroups, results: &Results, target: &Path) -> Result<()> {
    let novelty = Table::read(&results.require("novelty.csv", Stage::Novelty.as_str())?)?;
    let (pid, med, p10) = (novelty.col("paper_id")?, novelty.col("median_z")?, novelty.col("p10_z")?);
    let mut out = CsvOut::create(target, &["group", "paper_id", "median_z", "p10_z"])?;
    for r in &novelty.rows {
        if let Some(g) = groups.of_paper(&r[pid]) {
            out.row([g, &r[pid], &r[med], &r[p10]])?;
        }
    }
    out.finish()
}

/// Mean disruptiveness per group and `key_column` value of `disruption.csv`.
fn disruption_means(
    groups: &JournalGroups,
    results: &Results,
    target: &Path,
    key_name: &str,
    key_column: &str,
) -> Result<()> {
    let table = Table::read(&results.require("disruption.csv", Stage::Disruption.as_str())?)?;
    let (pid, d, key) = (table.col("paper_id")?, table.col("D")?, table.col(key_column)?);
    let mut sums: BTreeMap<(&str, i64), (f64, usize)> = BTreeMap::new();
    for r in &table.rows {
        let (Some(g), Some(v), Ok(k)) = (groups.of_paper(&r[pid]), number(&r[d]), r[key].parse::<i64>()) else {
            continue;
        };
        if key_column == "author_count" && k == 0 {
            continue;
        }
        let e = sums.entry((g, k)).or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }
    let mut out = CsvOut::create(target, &["group", key_name, "mean_d", "papers"])?;
    for ((g, k), (s, n)) in sums {
        out.row([g.to_string(), k.to_string(), (s / n as f64).to_string(), n.to_string()])?;
    }
    out.finish()
}

/// Group means of every author statistic.
fn figure_4d(results: &Results, target: &Path) -> Result<()> {
    let table = Table::read(&results.require("author_stats.csv", Stage::Authors.as_str())?)?;
    const STATS: [&str; 8] = [
        "academic_age",
        "paper_count",
        "self_cited_fraction",
        "self_citing_fraction",
        "group_self_cited",
        "group_self_citing",
        "group_cited_by_group",
        "group_citing_group",
    ];
    let g = table.col("group")?;
    let cols = STATS.iter().map(|s| table.col(s)).collect::<Result<Vec<_>>>()?;
    let mut by_group: BTreeMap<&str, (usize, Vec<f64>)> = BTreeMap::new();
    for r in &table.rows {
        let e = by_group.entry(&r[g]).or_insert((0, vec![0.0; STATS.len()]));
        e.0 += 1;
        for (k, &c) in cols.iter().enumerate() {
            e.1[k] += number(&r[c]).unwrap_or(0.0);
        }
    }
    let header: Vec<String> = ["group".to_string(), "authors".to_string()]
        .into_iter()
        .chain(STATS.iter().map(|s| format!("mean_{s}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut out = CsvOut::create(target, &header)?;
    for (group, (n, sums)) in by_group {
        let mut row = vec![group.to_string(), n.to_string()];
        row.extend(sums.iter().map(|s| (s / n as f64).to_string()));
        out.row(row)?;
    }
    out.finish()
}
