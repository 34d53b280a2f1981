//! Journal-level citation timing metrics.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{Corpus, JournalIdx, PublisherIdx};
use crate::output::{cell, CsvOut};
use crate::stats::median;
use crate::{Error, Result};

pub const DEFAULT_REFERENCE_YEAR: i32 = 2017;

/// Journal impact kept as an exact quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Impact {
    pub citations: u64,
    /// Papers of the two preceding years; always positive.
    pub papers: u64,
}

impl Impact {
    pub fn value(&self) -> f64 {
        self.citations as f64 / self.papers as f64
    }
}

/// Citations made in `year` to the journal's papers from `year - 1` and
/// `year - 2`, over the number of those papers. `None` when the journal
/// published nothing in that window.
pub fn journal_impact(corpus: &Corpus, journal: JournalIdx, year: i32) -> Option<Impact> {
    let mut papers = 0u64;
    let mut citations = 0u64;
    for &p in corpus.journal_papers(journal) {
        let y = corpus.paper_year(p);
        if y == year - 1 || y == year - 2 {
            papers += 1;
            citations += corpus
                .citers(p)
                .iter()
                .filter(|&&c| corpus.paper_year(c) == year)
                .count() as u64;
        }
    }
    (papers > 0).then_some(Impact { citations, papers })
}

/// Citations received during `year` by papers published in `year`, per paper.
pub fn immediacy_index(corpus: &Corpus, journal: JournalIdx, year: i32) -> Option<f64> {
    let mut papers = 0u64;
    let mut citations = 0u64;
    for &p in corpus.journal_papers(journal) {
        if corpus.paper_year(p) == year {
            papers += 1;
            citations += corpus
                .citers(p)
                .iter()
                .filter(|&&c| corpus.paper_year(c) == year)
                .count() as u64;
        }
    }
    (papers > 0).then(|| citations as f64 / papers as f64)
}

/// Median age (citing year minus cited year) of the citations received by
/// the journal's papers published in `year`.
pub fn cited_half_life(corpus: &Corpus, journal: JournalIdx, year: i32) -> Option<f64> {
    let ages: Vec<f64> = corpus
        .journal_papers(journal)
        .iter()
        .filter(|&&p| corpus.paper_year(p) == year)
        .flat_map(|&p| {
            corpus
                .citers(p)
                .iter()
                .map(move |&c| f64::from(corpus.paper_year(c) - year))
        })
        .collect();
    median(&ages)
}

/// Median age of the references made by the journal's papers published in `year`.
pub fn citing_half_life(corpus: &Corpus, journal: JournalIdx, year: i32) -> Option<f64> {
    let ages: Vec<f64> = corpus
        .journal_papers(journal)
        .iter()
        .filter(|&&p| corpus.paper_year(p) == year)
        .flat_map(|&p| {
            corpus
                .references(p)
                .iter()
                .map(move |&r| f64::from(year - corpus.paper_year(r)))
        })
        .collect();
    median(&ages)
}

/// Share of `year`'s articles with a known publisher that belong to `publisher`.
pub fn market_share(corpus: &Corpus, publisher: PublisherIdx, year: i32) -> Option<f64> {
    let counts = publisher_article_counts(corpus, year);
    let total: u64 = counts.iter().sum();
    (total > 0).then(|| counts[publisher as usize] as f64 / total as f64)
}

/// Market share of every publisher in `year`, by publisher index.
pub fn market_shares(corpus: &Corpus, year: i32) -> Option<Vec<f64>> {
    let counts = publisher_article_counts(corpus, year);
    let total: u64 = counts.iter().sum();
    (total > 0).then(|| counts.iter().map(|&c| c as f64 / total as f64).collect())
}

fn publisher_article_counts(corpus: &Corpus, year: i32) -> Vec<u64> {
    let mut counts = vec![0u64; corpus.publishers().len()];
    for (j, journal) in corpus.journals().iter().enumerate() {
        if let Some(p) = corpus.journal_publisher(j as JournalIdx) {
            counts[p as usize] += u64::from(journal.papers_in(year));
        }
    }
    counts
}

/// Article counts of the top-cited field per year, used to deflate
/// citation counts to a reference year.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationTable {
    pub reference_year: i32,
    /// The category chosen as top-cited, when derived from a corpus.
    pub field: Option<String>,
    pub n_top: BTreeMap<i32, u64>,
}

impl NormalizationTable {
    pub fn new(reference_year: i32, n_top: BTreeMap<i32, u64>) -> Result<Self> {
        match n_top.get(&reference_year) {
            Some(&n) if n > 0 => {}
            _ => return Err(Error::YearNotInTable(reference_year)),
        }
        if let Some((y, _)) = n_top.iter().find(|(_, &n)| n == 0) {
            return Err(Error::Config(format!("normalization count for {y} is zero")));
        }
        Ok(Self {
            reference_year,
            field: None,
            n_top,
        })
    }

    /// Picks the category receiving the most citations during
    /// `reference_year` (ties to the smaller code) and counts its articles
    /// per publication year.
    pub fn from_corpus(corpus: &Corpus, reference_year: i32) -> Result<Self> {
        let mut received: BTreeMap<&str, u64> = BTreeMap::new();
        for (citing, cited) in corpus.edges() {
            if corpus.paper_year(citing) != reference_year {
                continue;
            }
            if let Some(j) = corpus.paper_journal(cited) {
                for cat in &corpus.journal(j).categories {
                    *received.entry(cat.as_str()).or_insert(0) += 1;
                }
            }
        }
        let field = received
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(c, _)| (*c).to_string())
            .ok_or_else(|| {
                Error::Config(format!("no citations made in reference year {reference_year}"))
            })?;

        let mut n_top = BTreeMap::new();
        for journal in corpus.journals() {
            if journal.categories.iter().any(|c| *c == field) {
                for (&y, &n) in &journal.paper_count_by_year {
                    *n_top.entry(y).or_insert(0u64) += u64::from(n);
                }
            }
        }
        n_top.retain(|_, n| *n > 0);
        let mut table = Self::new(reference_year, n_top)?;
        table.field = Some(field);
        Ok(table)
    }

    /// Deflation factor `N_top(year) / N_top(reference_year)`.
    pub fn factor(&self, year: i32) -> Result<f64> {
        let n = self.n_top.get(&year).ok_or(Error::YearNotInTable(year))?;
        Ok(*n as f64 / self.n_top[&self.reference_year] as f64)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let mut reference_year = None;
        let mut n_top = BTreeMap::new();
        for (i, row) in reader.records().enumerate() {
            let row = row?;
            let parse = |idx: usize, field: &str| -> Result<i64> {
                row.get(idx)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::Malformed {
                        file: path.to_path_buf(),
                        line: i + 2,
                        field: field.to_string(),
                        reason: "expected an integer".to_string(),
                    })
            };
            reference_year = Some(parse(0, "reference_year")? as i32);
            n_top.insert(parse(1, "year")? as i32, parse(2, "n_top")? as u64);
        }
        let reference_year =
            reference_year.ok_or_else(|| Error::Config(format!("{}: empty table", path.display())))?;
        Self::new(reference_year, n_top)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = CsvOut::create(path, &["reference_year", "year", "n_top"])?;
        for (y, n) in &self.n_top {
            out.row([self.reference_year.to_string(), y.to_string(), n.to_string()])?;
        }
        out.finish()
    }
}

/// `count / (N_top(year) / N_top(reference_year))`.
pub fn normalize_citations(count: u64, year: i32, table: &NormalizationTable) -> Result<f64> {
    Ok(count as f64 / table.factor(year)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactRecord {
    pub journal: JournalIdx,
    pub year: i32,
    pub impact: Option<Impact>,
    pub normalized_impact: Option<f64>,
    pub immediacy: Option<f64>,
    pub cited_half_life: Option<f64>,
    pub citing_half_life: Option<f64>,
}

impl ImpactRecord {
    pub fn eligible_paper_count(&self) -> u64 {
        self.impact.map_or(0, |i| i.papers)
    }
}

/// All timing metrics for one journal and year. The normalized impact is
/// undefined when the table lacks the year.
pub fn impact_record(
    corpus: &Corpus,
    journal: JournalIdx,
    year: i32,
    table: Option<&NormalizationTable>,
) -> ImpactRecord {
    let impact = journal_impact(corpus, journal, year);
    let normalized_impact = match (impact, table) {
        (Some(i), Some(t)) => t.factor(year).ok().map(|f| i.value() / f),
        _ => None,
    };
    ImpactRecord {
        journal,
        year,
        impact,
        normalized_impact,
        immediacy: immediacy_index(corpus, journal, year),
        cited_half_life: cited_half_life(corpus, journal, year),
        citing_half_life: citing_half_life(corpus, journal, year),
    }
}

/// Records for every journal and year, ordered by journal then year.
pub fn impact_table(
    corpus: &Corpus,
    years: &[i32],
    table: Option<&NormalizationTable>,
) -> Vec<ImpactRecord> {
    (0..corpus.journals().len() as JournalIdx)
        .into_par_iter()
        .flat_map_iter(|j| years.iter().map(move |&y| impact_record(corpus, j, y, table)))
        .collect()
}

pub fn write_impact_csv(path: &Path, corpus: &Corpus, records: &[ImpactRecord]) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &[
            "journal_id",
            "year",
            "impact",
            "normalized_impact",
            "immediacy",
            "cited_half_life",
            "citing_half_life",
        ],
    )?;
    for r in records {
        out.row([
            corpus.journal(r.journal).journal_id.clone(),
            r.year.to_string(),
            cell(r.impact.map(|i| i.value())),
            cell(r.normalized_impact),
            cell(r.immediacy),
            cell(r.cited_half_life),
            cell(r.citing_half_life),
        ])?;
    }
    out.finish()
}

pub fn write_market_share_csv(path: &Path, corpus: &Corpus, years: &[i32]) -> Result<()> {
    let mut out = CsvOut::create(path, &["publisher_id", "year", "market_share"])?;
    for &y in years {
        let shares = market_shares(corpus, y);
        for (p, publisher) in corpus.publishers().iter().enumerate() {
            out.row([
                publisher.publisher_id.clone(),
                y.to_string(),
                cell(shares.as_ref().map(|s| s[p])),
            ])?;
        }
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{journal, paper};
    use crate::corpus::{CorpusBuilder, Paper};

    /// Journal J with `n` papers in `year`, cited by `c` papers of journal K in `citing_year`.
    fn cited_fixture(n: usize, year: i32, c: usize, citing_year: i32) -> Corpus {
        let mut b = Corpus::builder()
            .journal(journal("J", Some("P1"), &["11"], false))
            .journal(journal("K", Some("P2"), &["11"], false))
            .publisher("P1", None)
            .publisher("P2", None);
        for i in 0..n {
            b.add_paper(paper(&format!("j{i}"), "J", year, &[]));
        }
        for k in 0..c {
            let target = format!("j{}", k % n.max(1));
            let refs: Vec<&str> = if n > 0 { vec![target.as_str()] } else { vec![] };
            b.add_paper(paper(&format!("k{k}"), "K", citing_year, &refs));
        }
        b.build().unwrap()
    }

    #[test]
    fn impact_quotient() {
        let c = cited_fixture(5, 2015, 10, 2016);
        let j = c.journal_idx("J").unwrap();
        let i = journal_impact(&c, j, 2016).unwrap();
        assert_eq!(i.value(), 2.0);
        // same papers are in the window one year later, but the citations are not
        assert_eq!(journal_impact(&c, j, 2017).unwrap().value(), 0.0);
        assert_eq!(journal_impact(&c, j, 2018), None);
    }

    #[test]
    fn impact_zero_and_undefined() {
        let c = cited_fixture(5, 2015, 0, 2016);
        let j = c.journal_idx("J").unwrap();
        assert_eq!(journal_impact(&c, j, 2016).unwrap().value(), 0.0);
        assert_eq!(journal_impact(&c, j, 2015), None);
    }

    #[test]
    fn immediacy() {
        let c = cited_fixture(4, 2010, 6, 2010);
        let j = c.journal_idx("J").unwrap();
        assert_eq!(immediacy_index(&c, j, 2010), Some(1.5));
        let c = cited_fixture(4, 2010, 6, 2011);
        assert_eq!(immediacy_index(&c, j, 2010), Some(0.0));
        assert_eq!(immediacy_index(&c, j, 2009), None);
    }

    #[test]
    fn half_lives() {
        let mut b = Corpus::builder()
            .journal(journal("J", None, &["11"], false))
            .paper(paper("x", "J", 2000, &[]));
        for (i, age) in [1, 2, 3, 10].iter().enumerate() {
            b.add_paper(paper(&format!("c{i}"), "J", 2000 + age, &["x"]));
        }
        let c = b.build().unwrap();
        let j = c.journal_idx("J").unwrap();
        assert_eq!(cited_half_life(&c, j, 2000), Some(2.5));
        assert_eq!(citing_half_life(&c, j, 2004), None);
        assert_eq!(citing_half_life(&c, j, 2010), Some(10.0));
        assert_eq!(cited_half_life(&c, j, 2010), None);
    }

    #[test]
    fn normalization() {
        let t = NormalizationTable::new(2017, [(2017, 1000), (2010, 500)].into()).unwrap();
        assert_eq!(normalize_citations(10, 2017, &t).unwrap(), 10.0);
        assert_eq!(normalize_citations(10, 2010, &t).unwrap(), 20.0);
        assert_eq!(normalize_citations(0, 2010, &t).unwrap(), 0.0);
        assert!(matches!(
            normalize_citations(1, 1999, &t),
            Err(Error::YearNotInTable(1999))
        ));
        assert!(NormalizationTable::new(2017, [(2010, 5)].into()).is_err());
    }

    #[test]
    fn top_cited_field_table() {
        // category 22 receives two citations in 2017, category 11 one
        let c = Corpus::builder()
            .journal(journal("A", None, &["11"], false))
            .journal(journal("B", None, &["22"], false))
            .paper(paper("a1", "A", 2016, &[]))
            .paper(paper("b1", "B", 2016, &[]))
            .paper(paper("b2", "B", 2015, &[]))
            .paper(paper("b3", "B", 2017, &[]))
            .paper(paper("x", "A", 2017, &["b1", "b2", "a1"]))
            .build()
            .unwrap();
        let t = NormalizationTable::from_corpus(&c, 2017).unwrap();
        assert_eq!(t.field.as_deref(), Some("22"));
        assert_eq!(t.n_top, [(2015, 1), (2016, 1), (2017, 1)].into());
    }

    #[test]
    fn reference_year_must_have_top_field_articles() {
        let c = Corpus::builder()
            .journal(journal("A", None, &["11"], false))
            .paper(paper("a1", "A", 2016, &[]))
            .paper(paper("x", "A", 2018, &["a1"]))
            .build()
            .unwrap();
        assert!(NormalizationTable::from_corpus(&c, 2017).is_err());
    }

    #[test]
    fn table_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("norm.csv");
        let t = NormalizationTable::new(2017, [(2017, 1000), (2010, 500)].into()).unwrap();
        t.write_csv(&path).unwrap();
        assert_eq!(NormalizationTable::read_csv(&path).unwrap(), t);
    }

    #[test]
    fn market_share_partitions() {
        let mut b = CorpusBuilder::default()
            .publisher("P1", None)
            .publisher("P2", None)
            .journal(journal("A", Some("P1"), &["11"], false))
            .journal(journal("B", Some("P2"), &["11"], false))
            .journal(journal("C", None, &["11"], false));
        for i in 0..200 {
            let j = if i < 50 { "A" } else { "B" };
            b.add_paper(paper(&format!("p{i}"), j, 2000, &[]));
        }
        b.add_paper(Paper {
            paper_id: "orphan".into(),
            ..paper("orphan", "C", 2000, &[])
        });
        let c = b.build().unwrap();
        assert_eq!(market_share(&c, 0, 2000), Some(0.25));
        let shares = market_shares(&c, 2000).unwrap();
        assert!((shares.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(market_share(&c, 0, 2001), None);
    }
}
