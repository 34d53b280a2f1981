//! Atypical reference combinations.
//!
//! Journal pairs co-occurring in reference lists are counted in the real
//! corpus and in an ensemble of shuffled corpora. Shuffling swaps citation
//! targets between edges of the same (citing year, cited year) stratum, so
//! every paper keeps its reference count, its received-citation count and the
//! years at both ends of every edge.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{Corpus, JournalIdx, PaperIdx};
use crate::output::{cell, CsvOut};
use crate::stats::percentile_sorted;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct ShuffleConfig {
    pub ensemble_count: usize,
    /// Swap attempts per edge in each stratum.
    pub swaps_per_edge: f64,
    pub seed: u64,
}

impl Default for ShuffleConfig {
    fn default() -> Self {
        Self {
            ensemble_count: 10,
            swaps_per_edge: 10.0,
            seed: 0,
        }
    }
}

/// How a journal appearing several times in one reference list is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairCounting {
    /// Every unordered pair of reference positions counts.
    #[default]
    WithMultiplicity,
    /// Each distinct journal pair counts once per paper.
    Collapsed,
}

pub type Edge = (PaperIdx, PaperIdx);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffledEdges {
    pub replicate: usize,
    /// Same positions as [`Corpus::edges`]; only targets move.
    pub edges: Vec<Edge>,
    pub accepted_swaps: u64,
    /// `(citing year, cited year)` strata too small to shuffle.
    pub untouched_strata: Vec<(i32, i32)>,
}

/// One replicate of the degree- and timeline-preserving null model.
pub fn shuffle_citations(corpus: &Corpus, config: &ShuffleConfig, replicate: usize) -> ShuffledEdges {
    let mut edges: Vec<Edge> = corpus.edges().collect();
    let mut strata: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
    for (pos, &(a, b)) in edges.iter().enumerate() {
        strata
            .entry((corpus.paper_year(a), corpus.paper_year(b)))
            .or_default()
            .push(pos);
    }
    let mut present: HashSet<Edge> = edges.iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(replicate as u64);

    let mut accepted = 0u64;
    let mut untouched = Vec::new();
    for (key, positions) in &strata {
        let m = positions.len();
        if m < 2 {
            log::debug!("stratum {key:?} has {m} edge(s); left unshuffled");
            untouched.push(*key);
            continue;
        }
        let attempts = (config.swaps_per_edge * m as f64).ceil() as u64;
        for _ in 0..attempts {
            let i = positions[rng.random_range(0..m)];
            let j = positions[rng.random_range(0..m)];
            let ((a, b), (c, d)) = (edges[i], edges[j]);
            if a == c || b == d || a == d || c == b {
                continue;
            }
            if present.contains(&(a, d)) || present.contains(&(c, b)) {
                continue;
            }
            present.remove(&(a, b));
            present.remove(&(c, d));
            present.insert((a, d));
            present.insert((c, b));
            edges[i] = (a, d);
            edges[j] = (c, b);
            accepted += 1;
        }
    }
    ShuffledEdges {
        replicate,
        edges,
        accepted_swaps: accepted,
        untouched_strata: untouched,
    }
}

/// The full ensemble, replicates run in parallel.
pub fn shuffle_ensemble(corpus: &Corpus, config: &ShuffleConfig) -> Vec<ShuffledEdges> {
    (0..config.ensemble_count)
        .into_par_iter()
        .map(|r| shuffle_citations(corpus, config, r))
        .collect()
}

pub type JournalPair = (JournalIdx, JournalIdx);

fn ordered(a: JournalIdx, b: JournalIdx) -> JournalPair {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Journal pairs of one reference list (journals of the cited papers).
pub fn reference_pairs(journals: &[JournalIdx], counting: PairCounting) -> Vec<JournalPair> {
    let mut pairs = Vec::with_capacity(journals.len() * journals.len().saturating_sub(1) / 2);
    for (i, &a) in journals.iter().enumerate() {
        for &b in &journals[i + 1..] {
            pairs.push(ordered(a, b));
        }
    }
    if counting == PairCounting::Collapsed {
        pairs.sort_unstable();
        pairs.dedup();
    }
    pairs
}

/// Co-reference counts over an edge list grouped by citing paper.
pub fn pair_counts(corpus: &Corpus, edges: &[Edge], counting: PairCounting) -> HashMap<JournalPair, u64> {
    let mut counts = HashMap::new();
    let mut journals = Vec::new();
    let mut flush = |journals: &mut Vec<JournalIdx>| {
        for p in reference_pairs(journals, counting) {
            *counts.entry(p).or_insert(0) += 1;
        }
        journals.clear();
    };
    let mut current = None;
    for &(citing, cited) in edges {
        if current != Some(citing) {
            flush(&mut journals);
            current = Some(citing);
        }
        if let Some(j) = corpus.paper_journal(cited) {
            journals.push(j);
        }
    }
    flush(&mut journals);
    counts
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStatistics {
    pub pair: JournalPair,
    pub observed: u64,
    pub mean: f64,
    /// Population standard deviation across the ensemble.
    pub sigma: f64,
    /// `None` when `sigma` is zero.
    pub z: Option<f64>,
}

impl PairStatistics {
    pub fn from_samples(pair: JournalPair, observed: u64, samples: &[f64]) -> Self {
        let mean = crate::stats::mean(samples).unwrap_or(0.0);
        let sigma = crate::stats::std_dev(samples).unwrap_or(0.0);
        let z = (sigma > 0.0).then(|| (observed as f64 - mean) / sigma);
        Self {
            pair,
            observed,
            mean,
            sigma,
            z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairZScores {
    pub counting: PairCounting,
    pub pairs: BTreeMap<JournalPair, PairStatistics>,
}

impl PairZScores {
    pub fn get(&self, a: JournalIdx, b: JournalIdx) -> Option<&PairStatistics> {
        self.pairs.get(&ordered(a, b))
    }

    /// Pairs whose null spread is zero.
    pub fn undefined_count(&self) -> usize {
        self.pairs.values().filter(|p| p.z.is_none()).count()
    }
}

/// z-scores for every pair observed in the real corpus against the given ensemble.
pub fn zscores_from_ensemble(
    corpus: &Corpus,
    ensemble: &[Vec<Edge>],
    counting: PairCounting,
) -> PairZScores {
    let real: Vec<Edge> = corpus.edges().collect();
    let observed = pair_counts(corpus, &real, counting);
    let replicate_counts: Vec<HashMap<JournalPair, u64>> = ensemble
        .par_iter()
        .map(|edges| pair_counts(corpus, edges, counting))
        .collect();
    let pairs = observed
        .iter()
        .map(|(&pair, &o)| {
            let samples: Vec<f64> = replicate_counts
                .iter()
                .map(|c| c.get(&pair).copied().unwrap_or(0) as f64)
                .collect();
            (pair, PairStatistics::from_samples(pair, o, &samples))
        })
        .collect();
    PairZScores { counting, pairs }
}

/// Generates the ensemble and scores every observed journal pair.
pub fn pair_zscores(corpus: &Corpus, config: &ShuffleConfig, counting: PairCounting) -> PairZScores {
    let ensemble: Vec<Vec<Edge>> = shuffle_ensemble(corpus, config)
        .into_iter()
        .map(|s| s.edges)
        .collect();
    zscores_from_ensemble(corpus, &ensemble, counting)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaperNovelty {
    pub paper: PaperIdx,
    pub median_z: Option<f64>,
    pub p10_z: Option<f64>,
    pub defined_pair_count: usize,
    pub undefined_pair_count: usize,
}

/// Median and interpolated 10th percentile of the defined z-scores.
pub fn summarize_z(zs: &[Option<f64>]) -> (Option<f64>, Option<f64>) {
    let mut defined: Vec<f64> = zs.iter().flatten().copied().collect();
    if defined.is_empty() {
        return (None, None);
    }
    defined.sort_by(f64::total_cmp);
    (
        Some(percentile_sorted(&defined, 0.5)),
        Some(percentile_sorted(&defined, 0.1)),
    )
}

pub fn paper_novelty(corpus: &Corpus, paper: PaperIdx, zmap: &PairZScores) -> PaperNovelty {
    let journals: Vec<JournalIdx> = corpus
        .references(paper)
        .iter()
        .filter_map(|&r| corpus.paper_journal(r))
        .collect();
    let zs: Vec<Option<f64>> = reference_pairs(&journals, zmap.counting)
        .into_iter()
        .map(|p| zmap.pairs.get(&p).and_then(|s| s.z))
        .collect();
    let defined = zs.iter().filter(|z| z.is_some()).count();
    let (median_z, p10_z) = summarize_z(&zs);
    PaperNovelty {
        paper,
        median_z,
        p10_z,
        defined_pair_count: defined,
        undefined_pair_count: zs.len() - defined,
    }
}

/// Novelty of every paper with at least one reference pair.
pub fn novelty_table(corpus: &Corpus, zmap: &PairZScores) -> Vec<PaperNovelty> {
    (0..corpus.paper_count() as PaperIdx)
        .into_par_iter()
        .map(|p| paper_novelty(corpus, p, zmap))
        .filter(|n| n.defined_pair_count + n.undefined_pair_count > 0)
        .collect()
}

pub fn write_novelty_csv(path: &Path, corpus: &Corpus, rows: &[PaperNovelty]) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &["paper_id", "median_z", "p10_z", "defined_pair_count", "undefined_pair_count"],
    )?;
    for n in rows {
        out.row([
            corpus.paper(n.paper).paper_id.clone(),
            cell(n.median_z),
            cell(n.p10_z),
            n.defined_pair_count.to_string(),
            n.undefined_pair_count.to_string(),
        ])?;
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{journal, paper};

    fn fixture() -> Corpus {
        let mut b = Corpus::builder()
            .journal(journal("A", None, &["11"], false))
            .journal(journal("B", None, &["11"], false))
            .journal(journal("C", None, &["11"], false));
        for i in 0..12 {
            let j = ["A", "B", "C"][i % 3];
            b.add_paper(paper(&format!("old{i:02}"), j, 2000, &[]));
        }
        for i in 0..8 {
            let refs: Vec<String> = (0..4).map(|k| format!("old{:02}", (i * 3 + k * 5) % 12)).collect();
            let refs: Vec<&str> = refs.iter().map(String::as_str).collect();
            b.add_paper(paper(&format!("new{i}"), ["A", "B"][i % 2], 2001, &refs));
        }
        b.build().unwrap()
    }

    fn degrees(n: usize, edges: &[Edge]) -> (Vec<usize>, Vec<usize>) {
        let mut out = vec![0; n];
        let mut inn = vec![0; n];
        for &(a, b) in edges {
            out[a as usize] += 1;
            inn[b as usize] += 1;
        }
        (out, inn)
    }

    #[test]
    fn margins_are_preserved() {
        let c = fixture();
        let real: Vec<Edge> = c.edges().collect();
        let s = shuffle_citations(&c, &ShuffleConfig { seed: 3, ..Default::default() }, 0);
        assert!(s.accepted_swaps > 0);
        assert_ne!(s.edges, real);
        assert_eq!(degrees(c.paper_count(), &real), degrees(c.paper_count(), &s.edges));
        let set: HashSet<_> = s.edges.iter().collect();
        assert_eq!(set.len(), s.edges.len());
    }

    #[test]
    fn seeded_replicates_reproduce() {
        let c = fixture();
        let cfg = ShuffleConfig { seed: 11, ..Default::default() };
        assert_eq!(shuffle_citations(&c, &cfg, 2), shuffle_citations(&c, &cfg, 2));
        assert_ne!(shuffle_citations(&c, &cfg, 2).edges, shuffle_citations(&c, &cfg, 3).edges);
    }

    #[test]
    fn tiny_strata_are_left_alone() {
        let c = Corpus::builder()
            .journal(journal("A", None, &["11"], false))
            .paper(paper("x", "A", 2000, &[]))
            .paper(paper("y", "A", 2001, &["x"]))
            .build()
            .unwrap();
        let s = shuffle_citations(&c, &ShuffleConfig::default(), 0);
        assert_eq!(s.untouched_strata, vec![(2001, 2000)]);
    }

    #[test]
    fn z_definitions() {
        let five = PairStatistics::from_samples((0, 1), 5, &[3.0, 7.0]);
        assert_eq!((five.mean, five.sigma, five.z), (5.0, 2.0, Some(0.0)));
        let s = PairStatistics::from_samples((0, 1), 8, &[3.5, 6.5]);
        assert_eq!(s.z, Some(2.0));
        let never = PairStatistics::from_samples((0, 1), 3, &[0.0, 0.0, 0.0]);
        assert_eq!((never.mean, never.sigma, never.z), (0.0, 0.0, None));
    }

    #[test]
    fn real_network_as_ensemble_reproduces_observed() {
        let c = fixture();
        let real: Vec<Edge> = c.edges().collect();
        let z = zscores_from_ensemble(&c, &vec![real; 4], PairCounting::WithMultiplicity);
        assert!(!z.pairs.is_empty());
        for s in z.pairs.values() {
            assert_eq!(s.mean, s.observed as f64);
            assert_eq!(s.sigma, 0.0);
        }
        assert_eq!(z.undefined_count(), z.pairs.len());
    }

    #[test]
    fn percentile_summary() {
        let (m, p) = summarize_z(&[Some(-2.0), Some(0.0), Some(1.0)]);
        assert_eq!(m, Some(0.0));
        assert!((p.unwrap() + 1.6).abs() < 1e-12);
        assert_eq!(summarize_z(&[Some(1.0)]), (Some(1.0), Some(1.0)));
        assert_eq!(summarize_z(&[None, None]), (None, None));
    }

    #[test]
    fn multiplicity_versus_collapsed() {
        let js = [0, 0, 1];
        assert_eq!(reference_pairs(&js, PairCounting::WithMultiplicity), vec![(0, 0), (0, 1), (0, 1)]);
        assert_eq!(reference_pairs(&js, PairCounting::Collapsed), vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn novelty_rows_have_p10_below_median() {
        let c = fixture();
        let z = pair_zscores(&c, &ShuffleConfig { seed: 5, ..Default::default() }, PairCounting::WithMultiplicity);
        for n in novelty_table(&c, &z) {
            if let (Some(m), Some(p)) = (n.median_z, n.p10_z) {
                assert!(p <= m);
            }
        }
    }
}
