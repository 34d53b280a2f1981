//! Control-journal selection: for each category of a questioned journal,
//! the unquestioned active journal in the same size tercile whose impact is
//! closest.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{Corpus, JournalIdx};
use crate::impact::{journal_impact, NormalizationTable};
use crate::output::{cell, CsvOut};
use crate::{Error, Result};

/// Journals publishing fewer papers than this in a year are inactive.
pub const ACTIVE_MIN_PAPERS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tercile {
    Large,
    Moderate,
    Small,
}

impl Tercile {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tercile::Large => "large",
            Tercile::Moderate => "moderate",
            Tercile::Small => "small",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "large" => Some(Tercile::Large),
            "moderate" => Some(Tercile::Moderate),
            "small" => Some(Tercile::Small),
            _ => None,
        }
    }

    fn from_bin(bin: u8) -> Self {
        match bin {
            0 => Tercile::Large,
            1 => Tercile::Moderate,
            _ => Tercile::Small,
        }
    }
}

/// How journals of one category are divided by annual publication volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeBinning {
    Terciles,
    Quartiles,
    /// Above, within, or below one standard deviation of mean log size.
    LogSigma,
}

impl SizeBinning {
    pub fn as_str(&self) -> &'static str {
        match self {
            SizeBinning::Terciles => "terciles",
            SizeBinning::Quartiles => "quartiles",
            SizeBinning::LogSigma => "log_sigma",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TercileAssignment {
    pub category: String,
    pub year: i32,
    pub terciles: BTreeMap<JournalIdx, Tercile>,
    /// Fewer than three active journals: everything sits in one tercile.
    pub too_few: bool,
}

/// Active journals of `category` in `year`, largest first, ties by journal id.
pub fn active_journals(corpus: &Corpus, category: &str, year: i32) -> Vec<JournalIdx> {
    let mut active: Vec<JournalIdx> = corpus
        .journals()
        .iter()
        .enumerate()
        .filter(|(_, j)| j.papers_in(year) >= ACTIVE_MIN_PAPERS && j.categories.iter().any(|c| c == category))
        .map(|(i, _)| i as JournalIdx)
        .collect();
    active.sort_by(|&a, &b| {
        let (ja, jb) = (corpus.journal(a), corpus.journal(b));
        jb.papers_in(year)
            .cmp(&ja.papers_in(year))
            .then_with(|| ja.journal_id.cmp(&jb.journal_id))
    });
    active
}

fn size_bins(
    corpus: &Corpus,
    category: &str,
    year: i32,
    scheme: SizeBinning,
) -> BTreeMap<JournalIdx, u8> {
    let ranked = active_journals(corpus, category, year);
    let n = ranked.len();
    match scheme {
        SizeBinning::Terciles | SizeBinning::Quartiles => {
            let k = if scheme == SizeBinning::Terciles { 3 } else { 4 };
            ranked
                .iter()
                .enumerate()
                .map(|(rank, &j)| (j, ((k * rank) / n) as u8))
                .collect()
        }
        SizeBinning::LogSigma => {
            let logs: Vec<f64> = ranked
                .iter()
                .map(|&j| f64::from(corpus.journal(j).papers_in(year)).ln())
                .collect();
            let mean = crate::stats::mean(&logs).unwrap_or(0.0);
            let sigma = crate::stats::std_dev(&logs).unwrap_or(0.0);
            ranked
                .iter()
                .zip(&logs)
                .map(|(&j, &l)| {
                    let bin = if l > mean + sigma {
                        0
                    } else if l < mean - sigma {
                        2
                    } else {
                        1
                    };
                    (j, bin)
                })
                .collect()
        }
    }
}

/// Splits the active journals of a category into size terciles.
pub fn size_terciles(corpus: &Corpus, category: &str, year: i32) -> TercileAssignment {
    let bins = size_bins(corpus, category, year, SizeBinning::Terciles);
    let too_few = bins.len() < 3;
    if too_few && !bins.is_empty() {
        log::warn!("category {category} has {} active journals in {year}; terciles collapse", bins.len());
    }
    TercileAssignment {
        category: category.to_string(),
        year,
        terciles: bins
            .into_iter()
            .map(|(j, b)| (j, if too_few { Tercile::Large } else { Tercile::from_bin(b) }))
            .collect(),
        too_few,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchOptions {
    /// Compare normalized rather than raw impact.
    pub use_normalized: bool,
    pub binning: SizeBinning,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            use_normalized: true,
            binning: SizeBinning::Terciles,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchRecord {
    pub qj: JournalIdx,
    pub category: String,
    /// `None` when no eligible control exists in the category.
    pub uj: Option<JournalIdx>,
    pub impact_gap: Option<f64>,
    pub tercile: Option<Tercile>,
}

/// Impacts and size bins for one year, materialised once and shared by
/// every questioned journal.
#[derive(Debug)]
pub struct Matcher<'a> {
    corpus: &'a Corpus,
    year: i32,
    opts: MatchOptions,
    impacts: Vec<Option<f64>>,
    bins: BTreeMap<String, BTreeMap<JournalIdx, u8>>,
}

impl<'a> Matcher<'a> {
    pub fn new(
        corpus: &'a Corpus,
        year: i32,
        table: Option<&NormalizationTable>,
        opts: MatchOptions,
    ) -> Result<Self> {
        let factor = if opts.use_normalized {
            let table = table.ok_or_else(|| {
                Error::Config("normalized matching requires a normalization table".into())
            })?;
            table.factor(year)?
        } else {
            1.0
        };
        let impacts = (0..corpus.journals().len() as JournalIdx)
            .into_par_iter()
            .map(|j| journal_impact(corpus, j, year).map(|i| i.value() / factor))
            .collect();
        let categories: std::collections::BTreeSet<&str> = corpus
            .journals()
            .iter()
            .flat_map(|j| j.categories.iter().map(String::as_str))
            .collect();
        let bins = categories
            .into_iter()
            .map(|c| (c.to_string(), size_bins(corpus, c, year, opts.binning)))
            .collect();
        Ok(Self {
            corpus,
            year,
            opts,
            impacts,
            bins,
        })
    }

    pub fn impact(&self, journal: JournalIdx) -> Option<f64> {
        self.impacts[journal as usize]
    }

    /// Size bin of a journal within a category, if active there.
    pub fn bin(&self, category: &str, journal: JournalIdx) -> Option<u8> {
        self.bins.get(category)?.get(&journal).copied()
    }

    fn tercile_of(&self, category: &str, bin: u8) -> Tercile {
        let size = self.bins.get(category).map_or(0, BTreeMap::len);
        if self.opts.binning == SizeBinning::Terciles && size < 3 {
            Tercile::Large
        } else {
            Tercile::from_bin(bin)
        }
    }

    /// Whether `candidate` may serve as a control for `qj` in `category`.
    pub fn eligible(&self, qj: JournalIdx, category: &str, candidate: JournalIdx) -> bool {
        let c = self.corpus.journal(candidate);
        candidate != qj
            && !c.questionable
            && self.impacts[candidate as usize].is_some()
            && self.bin(category, qj).is_some()
            && self.bin(category, candidate) == self.bin(category, qj)
    }

    /// One record per category of `qj`.
    pub fn select_control(&self, qj: JournalIdx) -> Vec<MatchRecord> {
        let journal = self.corpus.journal(qj);
        let year = self.year;
        let qj_size = i64::from(journal.papers_in(year));
        let mut out = Vec::with_capacity(journal.categories.len());
        for category in &journal.categories {
            let Some(qj_impact) = self.impacts[qj as usize] else {
                log::warn!("{}: impact undefined in {year}; no control", journal.journal_id);
                out.push(unmatched(qj, category, None));
                continue;
            };
            let Some(bin) = self.bin(category, qj) else {
                log::warn!("{}: inactive in category {category} for {year}", journal.journal_id);
                out.push(unmatched(qj, category, None));
                continue;
            };
            let best = self.bins[category]
                .keys()
                .copied()
                .filter(|&c| self.eligible(qj, category, c))
                .map(|c| {
                    let gap = (self.impacts[c as usize].unwrap() - qj_impact).abs();
                    let size_gap = (i64::from(self.corpus.journal(c).papers_in(year)) - qj_size).abs();
                    (gap, size_gap, c)
                })
                .min_by(|a, b| {
                    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then_with(|| {
                        self.corpus
                            .journal(a.2)
                            .journal_id
                            .cmp(&self.corpus.journal(b.2).journal_id)
                    })
                });
            let tercile = Some(self.tercile_of(category, bin));
            match best {
                Some((gap, _, c)) => out.push(MatchRecord {
                    qj,
                    category: category.clone(),
                    uj: Some(c),
                    impact_gap: Some(gap),
                    tercile,
                }),
                None => {
                    log::warn!("{}: no eligible control in category {category}", journal.journal_id);
                    out.push(unmatched(qj, category, tercile));
                }
            }
        }
        out
    }

    /// Records for every questioned journal, in journal order.
    pub fn match_all(&self) -> Vec<MatchRecord> {
        let questioned: Vec<JournalIdx> = (0..self.corpus.journals().len() as JournalIdx)
            .filter(|&j| self.corpus.journal(j).questionable)
            .collect();
        questioned
            .par_iter()
            .flat_map_iter(|&q| self.select_control(q))
            .collect()
    }
}

fn unmatched(qj: JournalIdx, category: &str, tercile: Option<Tercile>) -> MatchRecord {
    MatchRecord {
        qj,
        category: category.to_string(),
        uj: None,
        impact_gap: None,
        tercile,
    }
}

/// Convenience wrapper building a [`Matcher`] for a single questioned journal.
pub fn select_control(
    corpus: &Corpus,
    qj: JournalIdx,
    year: i32,
    table: Option<&NormalizationTable>,
    opts: MatchOptions,
) -> Result<Vec<MatchRecord>> {
    Ok(Matcher::new(corpus, year, table, opts)?.select_control(qj))
}

/// Mean impact and size gaps of the matches produced under one binning scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct BinningSummary {
    pub scheme: SizeBinning,
    pub matched: usize,
    pub unmatched: usize,
    pub mean_impact_gap: Option<f64>,
    pub mean_size_gap: Option<f64>,
}

/// Compares terciles against quartiles and log-scale ±σ bins.
pub fn binning_diagnostic(
    corpus: &Corpus,
    year: i32,
    table: Option<&NormalizationTable>,
    use_normalized: bool,
) -> Result<Vec<BinningSummary>> {
    [SizeBinning::LogSigma, SizeBinning::Terciles, SizeBinning::Quartiles]
        .into_iter()
        .map(|scheme| {
            let m = Matcher::new(corpus, year, table, MatchOptions { use_normalized, binning: scheme })?;
            let records = m.match_all();
            let mut impact_gaps = Vec::new();
            let mut size_gaps = Vec::new();
            for r in &records {
                if let (Some(uj), Some(gap)) = (r.uj, r.impact_gap) {
                    impact_gaps.push(gap);
                    let a = f64::from(corpus.journal(r.qj).papers_in(year));
                    let b = f64::from(corpus.journal(uj).papers_in(year));
                    size_gaps.push((a - b).abs());
                }
            }
            Ok(BinningSummary {
                scheme,
                matched: impact_gaps.len(),
                unmatched: records.len() - impact_gaps.len(),
                mean_impact_gap: crate::stats::mean(&impact_gaps),
                mean_size_gap: crate::stats::mean(&size_gaps),
            })
        })
        .collect()
}

pub fn write_matches_csv(path: &Path, corpus: &Corpus, records: &[MatchRecord]) -> Result<()> {
    let mut out = CsvOut::create(path, &["qj_id", "category", "uj_id", "impact_gap", "tercile"])?;
    for r in records {
        out.row([
            corpus.journal(r.qj).journal_id.clone(),
            r.category.clone(),
            r.uj.map(|u| corpus.journal(u).journal_id.clone()).unwrap_or_default(),
            cell(r.impact_gap),
            r.tercile.map(|t| t.as_str().to_string()).unwrap_or_default(),
        ])?;
    }
    out.finish()
}

/// Reads records written by [`write_matches_csv`].
pub fn read_matches_csv(path: &Path, corpus: &Corpus) -> Result<Vec<MatchRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let field = |k: usize| row.get(k).unwrap_or("");
        let malformed = |name: &str, reason: &str| Error::Malformed {
            file: path.to_path_buf(),
            line: i + 2,
            field: name.to_string(),
            reason: reason.to_string(),
        };
        let journal = |id: &str| {
            corpus.journal_idx(id).ok_or_else(|| Error::UnknownId {
                kind: "journal",
                id: id.to_string(),
            })
        };
        let uj = match field(2) {
            "" => None,
            id => Some(journal(id)?),
        };
        let impact_gap = match field(3) {
            "" => None,
            g => Some(g.parse().map_err(|_| malformed("impact_gap", "expected a number"))?),
        };
        let tercile = match field(4) {
            "" => None,
            t => Some(Tercile::parse(t).ok_or_else(|| malformed("tercile", "unknown tercile"))?),
        };
        records.push(MatchRecord {
            qj: journal(field(0))?,
            category: field(1).to_string(),
            uj,
            impact_gap,
            tercile,
        });
    }
    Ok(records)
}

pub fn write_binning_csv(path: &Path, summaries: &[BinningSummary]) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &["scheme", "matched", "unmatched", "mean_impact_gap", "mean_size_gap"],
    )?;
    for s in summaries {
        out.row([
            s.scheme.as_str().to_string(),
            s.matched.to_string(),
            s.unmatched.to_string(),
            cell(s.mean_impact_gap),
            cell(s.mean_size_gap),
        ])?;
    }
    out.finish()
}
