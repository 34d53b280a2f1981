//! The bibliographic corpus: papers, journals, publishers, author name
//! records and the citation indices every analysis reads from.
//!
//! A [`Corpus`] is immutable once built. Records are stored sorted by id so
//! that dense indices, and every float reduction walking them, do not depend
//! on input order.

mod issn;
mod load;
mod validate;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

pub use issn::{check_character, extract_issns, validate_issn, IssnExtractor, KEYWORD_WINDOW};
pub use load::{load_corpus, CorpusPaths, InterchangeFormat};
pub use validate::{validate_corpus, ValidationReport, Violation};

use crate::{Error, Result};

/// Dense paper index into [`Corpus::papers`].
pub type PaperIdx = u32;
/// Dense journal index into [`Corpus::journals`].
pub type JournalIdx = u32;
/// Dense publisher index into [`Corpus::publishers`].
pub type PublisherIdx = u32;

pub const DEFAULT_YEAR_RANGE: (i32, i32) = (1996, 2018);

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Paper {
    pub paper_id: String,
    pub journal_id: String,
    pub year: i32,
    #[serde(default)]
    pub author_keys: Vec<String>,
    #[serde(default)]
    pub references: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Journal {
    pub journal_id: String,
    pub issns: Vec<String>,
    pub publisher_id: Option<String>,
    /// Two-digit subject category codes.
    pub categories: Vec<String>,
    pub questionable: bool,
    /// Papers per publication year, derived from the paper records.
    pub paper_count_by_year: BTreeMap<i32, u32>,
}

impl Journal {
    pub fn new(journal_id: impl Into<String>) -> Self {
        Self {
            journal_id: journal_id.into(),
            issns: Vec::new(),
            publisher_id: None,
            categories: Vec::new(),
            questionable: false,
            paper_count_by_year: BTreeMap::new(),
        }
    }

    pub fn papers_in(&self, year: i32) -> u32 {
        self.paper_count_by_year.get(&year).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Publisher {
    pub publisher_id: String,
    pub name: Option<String>,
    /// Journals whose `publisher_id` names this publisher, sorted.
    pub journal_ids: Vec<String>,
}

/// A reference whose target paper id is not in the corpus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DanglingRef {
    pub citing: String,
    pub missing: String,
}

/// What the loader had to route around.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub dangling: Vec<DanglingRef>,
    /// Papers whose `journal_id` is not in the journal table.
    pub unknown_journal_papers: Vec<String>,
    /// Journals whose `publisher_id` is not in the publisher table.
    pub unknown_publisher_journals: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    papers: Vec<Paper>,
    paper_index: HashMap<String, PaperIdx>,
    journals: Vec<Journal>,
    journal_index: HashMap<String, JournalIdx>,
    publishers: Vec<Publisher>,
    publisher_index: HashMap<String, PublisherIdx>,
    author_names: BTreeMap<String, String>,
    paper_journal: Vec<Option<JournalIdx>>,
    journal_publisher: Vec<Option<PublisherIdx>>,
    publisher_journals: Vec<Vec<JournalIdx>>,
    journal_papers: Vec<Vec<PaperIdx>>,
    references: Vec<Vec<PaperIdx>>,
    citers: Vec<Vec<PaperIdx>>,
    year_range: (i32, i32),
    report: LoadReport,
}

impl Corpus {
    pub fn builder() -> CorpusBuilder {
        CorpusBuilder::default()
    }

    pub fn papers(&self) -> &[Paper] {
        &self.papers
    }

    pub fn paper(&self, idx: PaperIdx) -> &Paper {
        &self.papers[idx as usize]
    }

    pub fn paper_idx(&self, paper_id: &str) -> Option<PaperIdx> {
        self.paper_index.get(paper_id).copied()
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn journals(&self) -> &[Journal] {
        &self.journals
    }

    pub fn journal(&self, idx: JournalIdx) -> &Journal {
        &self.journals[idx as usize]
    }

    pub fn journal_idx(&self, journal_id: &str) -> Option<JournalIdx> {
        self.journal_index.get(journal_id).copied()
    }

    pub fn publishers(&self) -> &[Publisher] {
        &self.publishers
    }

    pub fn publisher(&self, idx: PublisherIdx) -> &Publisher {
        &self.publishers[idx as usize]
    }

    pub fn publisher_idx(&self, publisher_id: &str) -> Option<PublisherIdx> {
        self.publisher_index.get(publisher_id).copied()
    }

    /// Author display name for an author-record key, if a name record exists.
    pub fn author_name(&self, author_key: &str) -> Option<&str> {
        self.author_names.get(author_key).map(String::as_str)
    }

    pub fn author_names(&self) -> &BTreeMap<String, String> {
        &self.author_names
    }

    pub fn paper_journal(&self, paper: PaperIdx) -> Option<JournalIdx> {
        self.paper_journal[paper as usize]
    }

    pub fn paper_year(&self, paper: PaperIdx) -> i32 {
        self.papers[paper as usize].year
    }

    pub fn journal_publisher(&self, journal: JournalIdx) -> Option<PublisherIdx> {
        self.journal_publisher[journal as usize]
    }

    pub fn publisher_journals(&self, publisher: PublisherIdx) -> &[JournalIdx] {
        &self.publisher_journals[publisher as usize]
    }

    /// Papers of a journal, ascending.
    pub fn journal_papers(&self, journal: JournalIdx) -> &[PaperIdx] {
        &self.journal_papers[journal as usize]
    }

    /// Resolved outgoing references of a paper, ascending, no duplicates, no self.
    pub fn references(&self, paper: PaperIdx) -> &[PaperIdx] {
        &self.references[paper as usize]
    }

    /// Papers citing `paper`, ascending.
    pub fn citers(&self, paper: PaperIdx) -> &[PaperIdx] {
        &self.citers[paper as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.references.iter().map(Vec::len).sum()
    }

    /// All resolved citation edges `(citing, cited)` in index order.
    pub fn edges(&self) -> impl Iterator<Item = (PaperIdx, PaperIdx)> + '_ {
        self.references
            .iter()
            .enumerate()
            .flat_map(|(i, refs)| refs.iter().map(move |&r| (i as PaperIdx, r)))
    }

    pub fn year_range(&self) -> (i32, i32) {
        self.year_range
    }

    /// Publication years that have at least one paper, ascending.
    pub fn years(&self) -> Vec<i32> {
        self.papers
            .iter()
            .map(|p| p.year)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn load_report(&self) -> &LoadReport {
        &self.report
    }

    /// Text serialisation of the forward and inverted indices; identical
    /// input always produces identical bytes.
    pub fn serialize_index(&self) -> String {
        let mut out = String::new();
        for (i, paper) in self.papers.iter().enumerate() {
            let _ = write!(out, "{}\t>", paper.paper_id);
            for &r in &self.references[i] {
                let _ = write!(out, " {}", self.papers[r as usize].paper_id);
            }
            out.push_str("\t<");
            for &c in &self.citers[i] {
                let _ = write!(out, " {}", self.papers[c as usize].paper_id);
            }
            out.push('\n');
        }
        for d in &self.report.dangling {
            let _ = writeln!(out, "dangling\t{}\t{}", d.citing, d.missing);
        }
        out
    }
}

/// Assembles a [`Corpus`] from in-memory records.
#[derive(Debug, Default, Clone)]
pub struct CorpusBuilder {
    papers: Vec<Paper>,
    journals: Vec<Journal>,
    publishers: Vec<(String, Option<String>)>,
    author_names: BTreeMap<String, String>,
    year_range: Option<(i32, i32)>,
}

impl CorpusBuilder {
    pub fn year_range(mut self, first: i32, last: i32) -> Self {
        self.year_range = Some((first, last));
        self
    }

    pub fn journal(mut self, journal: Journal) -> Self {
        self.journals.push(journal);
        self
    }

    pub fn publisher(mut self, publisher_id: impl Into<String>, name: Option<String>) -> Self {
        self.publishers.push((publisher_id.into(), name));
        self
    }

    pub fn paper(mut self, paper: Paper) -> Self {
        self.papers.push(paper);
        self
    }

    pub fn author(mut self, author_key: impl Into<String>, name: impl Into<String>) -> Self {
        self.author_names.insert(author_key.into(), name.into());
        self
    }

    pub fn add_journal(&mut self, journal: Journal) {
        self.journals.push(journal);
    }

    pub fn add_publisher(&mut self, publisher_id: impl Into<String>, name: Option<String>) {
        self.publishers.push((publisher_id.into(), name));
    }

    pub fn add_paper(&mut self, paper: Paper) {
        self.papers.push(paper);
    }

    pub fn add_author(&mut self, author_key: impl Into<String>, name: impl Into<String>) {
        self.author_names.insert(author_key.into(), name.into());
    }

    /// Indexes everything. Fails on duplicate paper or journal ids.
    pub fn build(self) -> Result<Corpus> {
        let CorpusBuilder {
            mut papers,
            mut journals,
            mut publishers,
            author_names,
            year_range,
        } = self;

        papers.sort_by(|a, b| a.paper_id.cmp(&b.paper_id));
        if let Some(w) = papers.windows(2).find(|w| w[0].paper_id == w[1].paper_id) {
            return Err(Error::DuplicatePaper {
                file: "<memory>".into(),
                line: 0,
                paper_id: w[0].paper_id.clone(),
            });
        }
        journals.sort_by(|a, b| a.journal_id.cmp(&b.journal_id));
        if let Some(w) = journals.windows(2).find(|w| w[0].journal_id == w[1].journal_id) {
            return Err(Error::DuplicateJournal(w[0].journal_id.clone()));
        }
        publishers.sort();
        publishers.dedup_by(|a, b| a.0 == b.0);

        let paper_index: HashMap<String, PaperIdx> = papers
            .iter()
            .enumerate()
            .map(|(i, p)| (p.paper_id.clone(), i as PaperIdx))
            .collect();
        let journal_index: HashMap<String, JournalIdx> = journals
            .iter()
            .enumerate()
            .map(|(i, j)| (j.journal_id.clone(), i as JournalIdx))
            .collect();
        let publisher_index: HashMap<String, PublisherIdx> = publishers
            .iter()
            .enumerate()
            .map(|(i, p)| (p.0.clone(), i as PublisherIdx))
            .collect();

        let mut report = LoadReport::default();

        let mut journal_publisher = vec![None; journals.len()];
        let mut publisher_journals = vec![Vec::new(); publishers.len()];
        for (j, journal) in journals.iter_mut().enumerate() {
            journal.paper_count_by_year.clear();
            if let Some(pid) = &journal.publisher_id {
                match publisher_index.get(pid) {
                    Some(&p) => {
                        journal_publisher[j] = Some(p);
                        publisher_journals[p as usize].push(j as JournalIdx);
                    }
                    None => report.unknown_publisher_journals.push(journal.journal_id.clone()),
                }
            }
        }

        let mut paper_journal = Vec::with_capacity(papers.len());
        let mut journal_papers = vec![Vec::new(); journals.len()];
        let mut references = Vec::with_capacity(papers.len());
        let mut citers: Vec<Vec<PaperIdx>> = vec![Vec::new(); papers.len()];
        for (i, paper) in papers.iter().enumerate() {
            let j = journal_index.get(&paper.journal_id).copied();
            match j {
                Some(j) => {
                    journal_papers[j as usize].push(i as PaperIdx);
                    *journals[j as usize]
                        .paper_count_by_year
                        .entry(paper.year)
                        .or_insert(0) += 1;
                }
                None => report.unknown_journal_papers.push(paper.paper_id.clone()),
            }
            paper_journal.push(j);

            let mut resolved = Vec::with_capacity(paper.references.len());
            for r in &paper.references {
                match paper_index.get(r) {
                    Some(&t) if t as usize != i => resolved.push(t),
                    Some(_) => {}
                    None => report.dangling.push(DanglingRef {
                        citing: paper.paper_id.clone(),
                        missing: r.clone(),
                    }),
                }
            }
            resolved.sort_unstable();
            resolved.dedup();
            for &t in &resolved {
                citers[t as usize].push(i as PaperIdx);
            }
            references.push(resolved);
        }
        report.dangling.sort();
        report.dangling.dedup();

        let publishers = publishers
            .into_iter()
            .zip(&publisher_journals)
            .map(|((publisher_id, name), js)| Publisher {
                publisher_id,
                name,
                journal_ids: js.iter().map(|&j| journals[j as usize].journal_id.clone()).collect(),
            })
            .collect();

        Ok(Corpus {
            papers,
            paper_index,
            journals,
            journal_index,
            publishers,
            publisher_index,
            author_names,
            paper_journal,
            journal_publisher,
            publisher_journals,
            journal_papers,
            references,
            citers,
            year_range: year_range.unwrap_or(DEFAULT_YEAR_RANGE),
            report,
        })
    }
}
