//! Disruptiveness index and its group means.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{Corpus, JournalIdx, PaperIdx};
use crate::output::{cell, CsvOut};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct DisruptionOptions {
    /// When set, only citers published at most this many years after the
    /// focal paper are counted.
    pub citer_window_years: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisruptionCounts {
    pub paper: PaperIdx,
    /// Citers of the paper that cite none of its references.
    pub n_i: u32,
    /// Citers of the paper that also cite at least one of its references.
    pub n_j: u32,
    /// Papers citing a reference of the paper but not the paper itself.
    pub n_k: u32,
}

impl DisruptionCounts {
    pub fn new(paper: PaperIdx, n_i: u32, n_j: u32, n_k: u32) -> Self {
        Self { paper, n_i, n_j, n_k }
    }

    /// `None` when nobody cites the paper or its references.
    pub fn index(&self) -> Option<f64> {
        let total = self.n_i + self.n_j + self.n_k;
        (total > 0).then(|| (self.n_i as f64 - self.n_j as f64) / total as f64)
    }
}

pub fn disruption_counts(corpus: &Corpus, paper: PaperIdx, opts: &DisruptionOptions) -> DisruptionCounts {
    let year = corpus.paper_year(paper);
    let in_window = |p: PaperIdx| match opts.citer_window_years {
        Some(w) => corpus.paper_year(p) <= year + w as i32,
        None => true,
    };
    let citers: HashSet<PaperIdx> = corpus
        .citers(paper)
        .iter()
        .copied()
        .filter(|&p| in_window(p))
        .collect();
    let ref_citers: HashSet<PaperIdx> = corpus
        .references(paper)
        .iter()
        .flat_map(|&r| corpus.citers(r).iter().copied())
        .filter(|&p| p != paper && in_window(p))
        .collect();
    let n_j = citers.intersection(&ref_citers).count() as u32;
    let n_i = citers.len() as u32 - n_j;
    let n_k = ref_citers.len() as u32 - n_j;
    DisruptionCounts::new(paper, n_i, n_j, n_k)
}

pub fn disruptiveness(corpus: &Corpus, paper: PaperIdx) -> Option<f64> {
    disruption_counts(corpus, paper, &DisruptionOptions::default()).index()
}

pub fn disruption_table(corpus: &Corpus, opts: &DisruptionOptions) -> Vec<DisruptionCounts> {
    (0..corpus.paper_count() as PaperIdx)
        .into_par_iter()
        .map(|p| disruption_counts(corpus, p, opts))
        .collect()
}

/// Mean index per key; papers with an undefined index are left out and counted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupMeans<K: Ord> {
    pub means: BTreeMap<K, f64>,
    pub sizes: BTreeMap<K, usize>,
    pub undefined: usize,
}

fn group_means<K: Ord + Copy>(
    corpus: &Corpus,
    papers: &[PaperIdx],
    opts: &DisruptionOptions,
    key: impl Fn(PaperIdx) -> Option<K> + Sync,
) -> GroupMeans<K> {
    let indexed: Vec<(PaperIdx, Option<f64>)> = papers
        .par_iter()
        .map(|&p| (p, disruption_counts(corpus, p, opts).index()))
        .collect();
    let mut sums: BTreeMap<K, (f64, usize)> = BTreeMap::new();
    let mut undefined = 0;
    for (p, d) in indexed {
        let Some(k) = key(p) else { continue };
        match d {
            Some(d) => {
                let e = sums.entry(k).or_insert((0.0, 0));
                e.0 += d;
                e.1 += 1;
            }
            None => undefined += 1,
        }
    }
    GroupMeans {
        means: sums.iter().map(|(&k, &(s, n))| (k, s / n as f64)).collect(),
        sizes: sums.iter().map(|(&k, &(_, n))| (k, n)).collect(),
        undefined,
    }
}

/// Keyed by author count; papers without author records are skipped.
pub fn disruptiveness_by_team_size(
    corpus: &Corpus,
    papers: &[PaperIdx],
    opts: &DisruptionOptions,
) -> GroupMeans<usize> {
    group_means(corpus, papers, opts, |p| {
        let n = corpus.paper(p).author_keys.len();
        (n > 0).then_some(n)
    })
}

pub fn disruptiveness_by_year(corpus: &Corpus, papers: &[PaperIdx], opts: &DisruptionOptions) -> GroupMeans<i32> {
    group_means(corpus, papers, opts, |p| Some(corpus.paper_year(p)))
}

pub fn disruptiveness_by_journal(
    corpus: &Corpus,
    papers: &[PaperIdx],
    opts: &DisruptionOptions,
) -> GroupMeans<JournalIdx> {
    group_means(corpus, papers, opts, |p| corpus.paper_journal(p))
}

pub fn write_disruption_csv(path: &Path, corpus: &Corpus, rows: &[DisruptionCounts]) -> Result<()> {
    let mut out = CsvOut::create(path, &["paper_id", "n_i", "n_j", "n_k", "D", "author_count", "year"])?;
    for r in rows {
        let p = corpus.paper(r.paper);
        out.row([
            p.paper_id.clone(),
            r.n_i.to_string(),
            r.n_j.to_string(),
            r.n_k.to_string(),
            cell(r.index()),
            p.author_keys.len().to_string(),
            p.year.to_string(),
        ])?;
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{journal, paper};
    use crate::corpus::Paper;

    fn with_authors(mut p: Paper, n: usize) -> Paper {
        p.author_keys = (0..n).map(|i| format!("a{i}")).collect();
        p
    }

    // r1, r2 <- x; c1, c2 cite x only; c3 cites x and r1; c4 cites r2 only.
    fn fixture() -> Corpus {
        Corpus::builder()
            .journal(journal("J", None, &["11"], false))
            .paper(paper("r1", "J", 2000, &[]))
            .paper(paper("r2", "J", 2000, &[]))
            .paper(with_authors(paper("x", "J", 2005, &["r1", "r2"]), 3))
            .paper(paper("c1", "J", 2006, &["x"]))
            .paper(paper("c2", "J", 2007, &["x"]))
            .paper(paper("c3", "J", 2012, &["x", "r1"]))
            .paper(paper("c4", "J", 2006, &["r2"]))
            .paper(paper("lone", "J", 2006, &[]))
            .build()
            .unwrap()
    }

    #[test]
    fn counts_and_index() {
        let c = fixture();
        let x = c.paper_idx("x").unwrap();
        let d = disruption_counts(&c, x, &DisruptionOptions::default());
        assert_eq!((d.n_i, d.n_j, d.n_k), (2, 1, 1));
        assert_eq!(d.index(), Some(0.25));
    }

    #[test]
    fn window_limits_citers() {
        let c = fixture();
        let x = c.paper_idx("x").unwrap();
        let d = disruption_counts(&c, x, &DisruptionOptions { citer_window_years: Some(3) });
        assert_eq!((d.n_i, d.n_j, d.n_k), (2, 0, 1));
    }

    #[test]
    fn boundaries() {
        assert_eq!(DisruptionCounts::new(0, 4, 0, 0).index(), Some(1.0));
        assert_eq!(DisruptionCounts::new(0, 0, 3, 0).index(), Some(-1.0));
        assert_eq!(DisruptionCounts::new(0, 0, 0, 0).index(), None);
        assert_eq!(DisruptionCounts::new(0, 0, 0, 2).index(), Some(0.0));
    }

    #[test]
    fn team_size_means() {
        let c = fixture();
        let all: Vec<PaperIdx> = (0..c.paper_count() as PaperIdx).collect();
        let m = disruptiveness_by_team_size(&c, &all, &DisruptionOptions::default());
        assert_eq!(m.means, BTreeMap::from([(3, 0.25)]));
    }

    #[test]
    fn undefined_only_bucket_is_absent() {
        let c = fixture();
        let lone = c.paper_idx("lone").unwrap();
        let m = disruptiveness_by_year(&c, &[lone], &DisruptionOptions::default());
        assert!(m.means.is_empty());
        assert_eq!(m.undefined, 1);
    }
}
