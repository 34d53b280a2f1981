//! Citation and reference rates between journal groups, publisher
//! self-citation expectations and the publication solidarity index ψ.
//!
//! Everything here works on [`JournalCounts`]: a journal-by-journal citation
//! count table plus publisher membership and paper counts. It can be built
//! from a corpus over a year window, or directly from synthetic counts.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{Corpus, JournalIdx, PublisherIdx};
use crate::output::{cell, CsvOut};
use crate::{Error, Result};

/// Inclusive publication-year window; open ends are unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub struct YearWindow {
    pub start: Option<i32>,
    pub end: Option<i32>,
}

impl YearWindow {
    pub const ALL: YearWindow = YearWindow {
        start: None,
        end: None,
    };

    pub fn years(start: i32, end: i32) -> Self {
        Self {
            start: Some(start),
            end: Some(end),
        }
    }

    pub fn year(year: i32) -> Self {
        Self::years(year, year)
    }

    pub fn contains(&self, year: i32) -> bool {
        self.start.is_none_or(|s| year >= s) && self.end.is_none_or(|e| year <= e)
    }
}

/// Journal-level citation counts `C[citing][cited]` with publisher membership.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalCounts {
    rows: Vec<BTreeMap<JournalIdx, f64>>,
    made: Vec<f64>,
    received: Vec<f64>,
    journal_publisher: Vec<Option<PublisherIdx>>,
    publisher_journals: Vec<Vec<JournalIdx>>,
    paper_counts: Vec<u64>,
}

impl JournalCounts {
    /// An empty table for `journal_publisher.len()` journals.
    pub fn new(journal_publisher: Vec<Option<PublisherIdx>>, paper_counts: Vec<u64>) -> Self {
        assert_eq!(journal_publisher.len(), paper_counts.len());
        let n = journal_publisher.len();
        let publishers = journal_publisher
            .iter()
            .flatten()
            .map(|&p| p as usize + 1)
            .max()
            .unwrap_or(0);
        let mut publisher_journals = vec![Vec::new(); publishers];
        for (j, p) in journal_publisher.iter().enumerate() {
            if let Some(p) = p {
                publisher_journals[*p as usize].push(j as JournalIdx);
            }
        }
        Self {
            rows: vec![BTreeMap::new(); n],
            made: vec![0.0; n],
            received: vec![0.0; n],
            journal_publisher,
            publisher_journals,
            paper_counts,
        }
    }

    /// Counts every resolved citation whose citing paper falls in `window`;
    /// paper counts cover papers published in `window`.
    pub fn from_corpus(corpus: &Corpus, window: YearWindow) -> Self {
        let n = corpus.journals().len();
        let journal_publisher = (0..n as JournalIdx)
            .map(|j| corpus.journal_publisher(j))
            .collect();
        let paper_counts = corpus
            .journals()
            .iter()
            .map(|j| {
                j.paper_count_by_year
                    .iter()
                    .filter(|(y, _)| window.contains(**y))
                    .map(|(_, &c)| u64::from(c))
                    .sum()
            })
            .collect();
        let mut counts = Self::new(journal_publisher, paper_counts);
        // publishers without journals still occupy an index
        counts
            .publisher_journals
            .resize(corpus.publishers().len(), Vec::new());
        for (citing, cited) in corpus.edges() {
            if !window.contains(corpus.paper_year(citing)) {
                continue;
            }
            if let (Some(a), Some(b)) = (corpus.paper_journal(citing), corpus.paper_journal(cited)) {
                counts.add(a, b, 1.0);
            }
        }
        counts
    }

    pub fn journal_count(&self) -> usize {
        self.rows.len()
    }

    pub fn add(&mut self, citing: JournalIdx, cited: JournalIdx, weight: f64) {
        *self.rows[citing as usize].entry(cited).or_insert(0.0) += weight;
        self.made[citing as usize] += weight;
        self.received[cited as usize] += weight;
    }

    /// Overwrites one cell, keeping the totals consistent.
    pub fn set(&mut self, citing: JournalIdx, cited: JournalIdx, value: f64) {
        let old = self.count(citing, cited);
        self.add(citing, cited, value - old);
    }

    /// Every citation count multiplied by `k`; paper counts untouched.
    pub fn scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            for v in row.values_mut() {
                *v *= k;
            }
        }
        for v in out.made.iter_mut().chain(out.received.iter_mut()) {
            *v *= k;
        }
        out
    }

    pub fn count(&self, citing: JournalIdx, cited: JournalIdx) -> f64 {
        self.rows[citing as usize].get(&cited).copied().unwrap_or(0.0)
    }

    pub fn references_made(&self, journal: JournalIdx) -> f64 {
        self.made[journal as usize]
    }

    pub fn citations_received(&self, journal: JournalIdx) -> f64 {
        self.received[journal as usize]
    }

    pub fn publisher_of(&self, journal: JournalIdx) -> Option<PublisherIdx> {
        self.journal_publisher[journal as usize]
    }

    pub fn publisher_journals(&self, publisher: PublisherIdx) -> &[JournalIdx] {
        &self.publisher_journals[publisher as usize]
    }

    pub fn paper_count(&self, journal: JournalIdx) -> u64 {
        self.paper_counts[journal as usize]
    }

    /// Σ over `from` × `to` of `C[a][b]`.
    pub fn between(&self, from: &[JournalIdx], to: &[JournalIdx]) -> f64 {
        let mut sum = 0.0;
        for &a in from {
            let row = &self.rows[a as usize];
            for &b in to {
                if let Some(v) = row.get(&b) {
                    sum += v;
                }
            }
        }
        sum
    }

    /// Share of the citations received by `source` that come from `group`.
    pub fn citation_rate(&self, source: &[JournalIdx], group: &[JournalIdx]) -> Option<f64> {
        let total: f64 = source.iter().map(|&s| self.received[s as usize]).sum();
        (total > 0.0).then(|| self.between(group, source) / total)
    }

    /// Share of the references made by `source` that land in `group`.
    pub fn reference_rate(&self, source: &[JournalIdx], group: &[JournalIdx]) -> Option<f64> {
        let total: f64 = source.iter().map(|&s| self.made[s as usize]).sum();
        (total > 0.0).then(|| self.between(source, group) / total)
    }

    /// Publisher-wide self-reference (`q_r`) and self-citation (`q_c`) rates.
    pub fn publisher_expectations(&self, publisher: PublisherIdx) -> PublisherExpectation {
        let journals = self.publisher_journals(publisher);
        let internal = self.between(journals, journals);
        let made: f64 = journals.iter().map(|&j| self.made[j as usize]).sum();
        let received: f64 = journals.iter().map(|&j| self.received[j as usize]).sum();
        PublisherExpectation {
            publisher,
            q_r: (made > 0.0).then(|| internal / made),
            q_c: (received > 0.0).then(|| internal / received),
        }
    }

    /// The solidarity index of one journal.
    pub fn solidarity(
        &self,
        journal: JournalIdx,
        opts: SolidarityOptions,
    ) -> std::result::Result<SolidarityScore, PsiUnavailable> {
        let publisher = self.publisher_of(journal).ok_or(PsiUnavailable::NoPublisher)?;
        let members = self.publisher_journals(publisher);
        if members.len() < 2 {
            return Err(PsiUnavailable::Standalone);
        }
        let expectation = self.publisher_expectations(publisher);
        let q_r = expectation.q_r.filter(|&q| q > 0.0).ok_or(PsiUnavailable::ZeroExpectation)?;
        let q_c = expectation.q_c.filter(|&q| q > 0.0).ok_or(PsiUnavailable::ZeroExpectation)?;

        let group: Vec<JournalIdx> = if opts.include_self {
            members.to_vec()
        } else {
            members.iter().copied().filter(|&j| j != journal).collect()
        };
        let source = [journal];
        let reference_sum = self
            .reference_rate(&source, &group)
            .ok_or(PsiUnavailable::NoReferences)?;
        let citation_sum = self
            .citation_rate(&source, &group)
            .filter(|&r| r > 0.0)
            .ok_or(PsiUnavailable::NoPublisherCitations)?;
        let publisher_paper_total: u64 = members.iter().map(|&j| self.paper_count(j)).sum();
        if publisher_paper_total == 0 {
            return Err(PsiUnavailable::NoPapers);
        }

        let psi = (reference_sum / q_r) / (citation_sum / q_c) / publisher_paper_total as f64;
        Ok(SolidarityScore {
            journal,
            psi,
            q_r,
            q_c,
            publisher_paper_total,
            reference_rate_sum: reference_sum,
            citation_rate_sum: citation_sum,
        })
    }
}

/// Expected self-reference and self-citation rates of a publisher.
/// `None` marks a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublisherExpectation {
    pub publisher: PublisherIdx,
    pub q_r: Option<f64>,
    pub q_c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidarityOptions {
    /// Whether the journal itself counts as part of its publisher in the rate sums.
    pub include_self: bool,
}

impl Default for SolidarityOptions {
    fn default() -> Self {
        Self { include_self: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolidarityScore {
    pub journal: JournalIdx,
    pub psi: f64,
    pub q_r: f64,
    pub q_c: f64,
    /// Σ N_j over the publisher's journals.
    pub publisher_paper_total: u64,
    /// Σ_j R_r(i; j) over the publisher's journals.
    pub reference_rate_sum: f64,
    /// Σ_j R_c(i; j) over the publisher's journals.
    pub citation_rate_sum: f64,
}

/// Why ψ has no value for a journal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PsiUnavailable {
    #[error("journal has no publisher")]
    NoPublisher,
    #[error("standalone journal (publisher has fewer than two journals)")]
    Standalone,
    #[error("publisher self-citation expectation is zero or undefined")]
    ZeroExpectation,
    #[error("journal made no references")]
    NoReferences,
    #[error("journal received no citations from its publisher")]
    NoPublisherCitations,
    #[error("publisher has no papers in the window")]
    NoPapers,
}

impl PsiUnavailable {
    /// Standalone journals are excluded by definition rather than undefined.
    pub fn is_excluded(&self) -> bool {
        matches!(self, PsiUnavailable::Standalone | PsiUnavailable::NoPublisher)
    }
}

/// ψ of a questioned journal over ψ of its control; `None` if either is missing.
pub fn solidarity_ratio(
    questioned: Option<&SolidarityScore>,
    control: Option<&SolidarityScore>,
) -> Option<f64> {
    Some(questioned?.psi / control?.psi)
}

/// ψ for every journal, in journal order.
pub fn solidarity_all(
    counts: &JournalCounts,
    opts: SolidarityOptions,
) -> Vec<std::result::Result<SolidarityScore, PsiUnavailable>> {
    (0..counts.journal_count() as JournalIdx)
        .into_par_iter()
        .map(|j| counts.solidarity(j, opts))
        .collect()
}

pub fn write_solidarity_csv(
    path: &Path,
    corpus: &Corpus,
    counts: &JournalCounts,
    scores: &[std::result::Result<SolidarityScore, PsiUnavailable>],
) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &["journal_id", "psi", "Q_r", "Q_c", "publisher_paper_total"],
    )?;
    for (j, score) in scores.iter().enumerate() {
        let Some(publisher) = counts.publisher_of(j as JournalIdx) else {
            continue;
        };
        let exp = counts.publisher_expectations(publisher);
        let total: u64 = counts
            .publisher_journals(publisher)
            .iter()
            .map(|&m| counts.paper_count(m))
            .sum();
        out.row([
            corpus.journal(j as JournalIdx).journal_id.clone(),
            cell(score.as_ref().ok().map(|s| s.psi)),
            cell(exp.q_r),
            cell(exp.q_c),
            total.to_string(),
        ])?;
    }
    out.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Journal,
    Publisher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Journal,
    Journals,
    Publisher,
    Publishers,
}

impl SourceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceKind::Journal => "journal",
            SourceKind::Publisher => "publisher",
        }
    }
}

impl TargetKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TargetKind::Journal => "journal",
            TargetKind::Journals => "journals",
            TargetKind::Publisher => "publisher",
            TargetKind::Publishers => "publishers",
        }
    }
}

/// One line of a rate query file.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RateQuery {
    pub source_kind: SourceKind,
    pub source_id: String,
    pub target_kind: TargetKind,
    /// `;`-separated ids.
    pub target_ids: String,
    #[serde(default)]
    pub start_year: Option<i32>,
    #[serde(default)]
    pub end_year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateAnswer {
    pub citation_rate: Option<f64>,
    pub reference_rate: Option<f64>,
}

impl RateQuery {
    pub fn window(&self) -> YearWindow {
        YearWindow {
            start: self.start_year,
            end: self.end_year,
        }
    }

    fn journals_of(corpus: &Corpus, publisher_id: &str) -> Result<Vec<JournalIdx>> {
        let p = corpus.publisher_idx(publisher_id).ok_or_else(|| Error::UnknownId {
            kind: "publisher",
            id: publisher_id.to_string(),
        })?;
        Ok(corpus.publisher_journals(p).to_vec())
    }

    fn journal(corpus: &Corpus, id: &str) -> Result<JournalIdx> {
        corpus.journal_idx(id).ok_or_else(|| Error::UnknownId {
            kind: "journal",
            id: id.to_string(),
        })
    }

    /// Resolves (source journals, target journals).
    pub fn resolve(&self, corpus: &Corpus) -> Result<(Vec<JournalIdx>, Vec<JournalIdx>)> {
        let source = match self.source_kind {
            SourceKind::Journal => vec![Self::journal(corpus, &self.source_id)?],
            SourceKind::Publisher => Self::journals_of(corpus, &self.source_id)?,
        };
        let ids: Vec<&str> = self
            .target_ids
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if ids.is_empty() {
            return Err(Error::Config("rate query with an empty target group".into()));
        }
        let mut target = Vec::new();
        for id in ids {
            match self.target_kind {
                TargetKind::Journal | TargetKind::Journals => target.push(Self::journal(corpus, id)?),
                TargetKind::Publisher | TargetKind::Publishers => {
                    target.extend(Self::journals_of(corpus, id)?)
                }
            }
        }
        target.sort_unstable();
        target.dedup();
        Ok((source, target))
    }
}

pub fn read_rate_queries(path: &Path) -> Result<Vec<RateQuery>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Answers a batch of rate queries, building one count table per distinct window.
pub fn answer_rate_queries(corpus: &Corpus, queries: &[RateQuery]) -> Result<Vec<RateAnswer>> {
    let mut tables: HashMap<YearWindow, JournalCounts> = HashMap::new();
    let mut answers = Vec::with_capacity(queries.len());
    for q in queries {
        let (source, target) = q.resolve(corpus)?;
        let counts = tables
            .entry(q.window())
            .or_insert_with(|| JournalCounts::from_corpus(corpus, q.window()));
        answers.push(RateAnswer {
            citation_rate: counts.citation_rate(&source, &target),
            reference_rate: counts.reference_rate(&source, &target),
        });
    }
    Ok(answers)
}

pub fn write_rates_csv(path: &Path, queries: &[RateQuery], answers: &[RateAnswer]) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &[
            "source_kind",
            "source_id",
            "target_kind",
            "target_ids",
            "start_year",
            "end_year",
            "citation_rate",
            "reference_rate",
        ],
    )?;
    for (q, a) in queries.iter().zip(answers) {
        out.row([
            q.source_kind.as_str().to_string(),
            q.source_id.clone(),
            q.target_kind.as_str().to_string(),
            q.target_ids.clone(),
            q.start_year.map(|y| y.to_string()).unwrap_or_default(),
            q.end_year.map(|y| y.to_string()).unwrap_or_default(),
            cell(a.citation_rate),
            cell(a.reference_rate),
        ])?;
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Journals 0,1 in publisher 0; journal 2 in publisher 1; journal 3 in publisher 1.
    fn two_publishers() -> JournalCounts {
        JournalCounts::new(vec![Some(0), Some(0), Some(1), Some(1)], vec![50, 50, 50, 50])
    }

    #[test]
    fn citation_rate_examples() {
        let mut c = two_publishers();
        c.add(1, 0, 1.0);
        c.add(2, 0, 3.0);
        assert_eq!(c.citation_rate(&[0], &[1]), Some(0.25));
        assert_eq!(c.citation_rate(&[0], &[0, 1, 2, 3]), Some(1.0));
        assert_eq!(c.citation_rate(&[3], &[0]), None);
    }

    #[test]
    fn reference_rate_examples() {
        let mut c = two_publishers();
        c.add(0, 1, 3.0);
        c.add(0, 2, 7.0);
        assert_eq!(c.reference_rate(&[0], &[1]), Some(0.3));
        assert_eq!(c.reference_rate(&[0], &[0]), Some(0.0));
        assert_eq!(c.reference_rate(&[0], &[0, 1, 2, 3]), Some(1.0));
        assert_eq!(c.reference_rate(&[3], &[0]), None);
    }

    #[test]
    fn expectations_hand_count() {
        // 2 internal, 2 outbound, 2 inbound from outside
        let mut c = two_publishers();
        c.add(0, 1, 1.0);
        c.add(1, 0, 1.0);
        c.add(0, 2, 1.0);
        c.add(1, 2, 1.0);
        c.add(2, 0, 1.0);
        c.add(3, 1, 1.0);
        let e = c.publisher_expectations(0);
        assert_eq!(e.q_r, Some(0.5));
        assert_eq!(e.q_c, Some(0.5));
    }

    #[test]
    fn expectations_degenerate() {
        let mut c = two_publishers();
        c.add(0, 1, 4.0);
        c.add(1, 0, 2.0);
        assert_eq!(c.publisher_expectations(0).q_r, Some(1.0));
        let mut c = two_publishers();
        c.add(0, 2, 4.0);
        assert_eq!(c.publisher_expectations(0).q_c, None);
        assert_eq!(c.publisher_expectations(0).q_r, Some(0.0));
    }

    /// Journal 0 whose publisher shares match the publisher expectations exactly.
    fn neutral(papers_each: u64) -> JournalCounts {
        let mut c = JournalCounts::new(
            vec![Some(0), Some(0), Some(1), Some(1)],
            vec![papers_each, papers_each, 10, 10],
        );
        for (a, b) in [(0, 1), (1, 0), (0, 2), (1, 2), (2, 0), (3, 1)] {
            c.add(a, b, 1.0);
        }
        c
    }

    #[test]
    fn psi_is_size_normalizer_when_ratios_cancel() {
        let s = neutral(50).solidarity(0, SolidarityOptions::default()).unwrap();
        assert_eq!(s.reference_rate_sum, s.q_r);
        assert_eq!(s.citation_rate_sum, s.q_c);
        assert!((s.psi - 0.01).abs() < 1e-15);
        let s = neutral(500).solidarity(0, SolidarityOptions::default()).unwrap();
        assert!((s.psi - 0.001).abs() < 1e-15);
    }

    #[test]
    fn psi_unavailable_cases() {
        let c = JournalCounts::new(vec![Some(0), None], vec![5, 5]);
        assert_eq!(c.solidarity(0, Default::default()), Err(PsiUnavailable::Standalone));
        assert_eq!(c.solidarity(1, Default::default()), Err(PsiUnavailable::NoPublisher));
        let c = two_publishers();
        assert_eq!(
            c.solidarity(0, Default::default()),
            Err(PsiUnavailable::ZeroExpectation)
        );
        assert!(PsiUnavailable::Standalone.is_excluded());
    }

    #[test]
    fn ratio_propagates_undefined() {
        let s = neutral(50).solidarity(0, Default::default()).unwrap();
        let mut q = s.clone();
        q.psi = 0.02;
        assert_eq!(solidarity_ratio(Some(&s), Some(&s)), Some(1.0));
        assert_eq!(solidarity_ratio(Some(&q), Some(&s)), Some(2.0));
        assert_eq!(solidarity_ratio(Some(&q), None), None);
    }

    #[test]
    fn exclude_self_changes_level() {
        let mut c = neutral(50);
        c.add(0, 0, 3.0);
        let with = c.solidarity(0, SolidarityOptions { include_self: true }).unwrap();
        let without = c.solidarity(0, SolidarityOptions { include_self: false }).unwrap();
        assert!(with.reference_rate_sum > without.reference_rate_sum);
    }

    #[test]
    fn window_contains() {
        assert!(YearWindow::ALL.contains(1800));
        assert!(YearWindow::years(2000, 2001).contains(2001));
        assert!(!YearWindow::year(2000).contains(2001));
    }
}
