//! Synthetic citation networks for checking the behaviour of ψ.
//!
//! Each publisher is an isolated component grown by preferential attachment;
//! its papers are spread over the publisher's journals at random. Rewiring
//! then moves link targets across publishers at journal-specific rates.

mod fenwick;
mod rewire;
mod scenarios;

pub use rewire::{
    psi_rewiring_experiment, rewire, write_initial_psi_csv, write_rewire_csv, EnsembleRun, RewireConfig,
    RewireCurve, RewireExperiment, Rewirer,
};
pub use scenarios::{psi_scenario, psi_scenarios, scenario_counts, write_scenarios_csv, Scenario, DEFAULT_GRID};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::{Corpus, Journal, JournalIdx, Paper, PaperIdx, PublisherIdx};
use crate::selfcite::{JournalCounts, PsiUnavailable, SolidarityOptions};
use crate::Result;

/// Every synthetic paper carries this year.
pub const SYNTH_YEAR: i32 = 2000;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub publisher_count: usize,
    pub journals_per_publisher: usize,
    /// Inclusive bounds of the uniform component size.
    pub component_size_range: (usize, usize),
    pub out_degree_mean: f64,
    pub out_degree_std: f64,
    pub in_degree_exponent: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            publisher_count: 5,
            journals_per_publisher: 5,
            component_size_range: (450, 550),
            out_degree_mean: 20.0,
            out_degree_std: 5.0,
            in_degree_exponent: 3.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    /// Additive attractiveness giving the configured tail exponent
    /// (`exponent = 2 + a / mean out-degree`).
    pub fn attachment_offset(&self) -> f64 {
        (self.out_degree_mean * (self.in_degree_exponent - 2.0)).max(f64::MIN_POSITIVE)
    }

    fn validate(&self) {
        assert!(self.publisher_count > 0 && self.journals_per_publisher > 0);
        let (lo, hi) = self.component_size_range;
        assert!(0 < lo && lo <= hi, "component size range must be nonempty and positive");
        assert!(self.in_degree_exponent > 2.0);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticNetwork {
    pub journals_per_publisher: usize,
    pub publisher_count: usize,
    /// Journal of each paper; journal `j` belongs to publisher `j / journals_per_publisher`.
    pub paper_journal: Vec<JournalIdx>,
    /// Reference lists; entries are distinct and never the citing paper.
    pub references: Vec<Vec<PaperIdx>>,
}

impl SyntheticNetwork {
    pub fn paper_count(&self) -> usize {
        self.paper_journal.len()
    }

    pub fn journal_count(&self) -> usize {
        self.publisher_count * self.journals_per_publisher
    }

    pub fn journal_publisher(&self, journal: JournalIdx) -> PublisherIdx {
        journal / self.journals_per_publisher as u32
    }

    pub fn paper_publisher(&self, paper: PaperIdx) -> PublisherIdx {
        self.journal_publisher(self.paper_journal[paper as usize])
    }

    pub fn link_count(&self) -> usize {
        self.references.iter().map(Vec::len).sum()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.references.iter().map(Vec::len).collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.paper_count()];
        for refs in &self.references {
            for &t in refs {
                d[t as usize] += 1;
            }
        }
        d
    }

    pub fn journal_counts(&self) -> JournalCounts {
        let mut papers = vec![0u64; self.journal_count()];
        for &j in &self.paper_journal {
            papers[j as usize] += 1;
        }
        let publishers = (0..self.journal_count() as JournalIdx)
            .map(|j| Some(self.journal_publisher(j)))
            .collect();
        let mut counts = JournalCounts::new(publishers, papers);
        for (s, refs) in self.references.iter().enumerate() {
            for &t in refs {
                counts.add(self.paper_journal[s], self.paper_journal[t as usize], 1.0);
            }
        }
        counts
    }

    /// ψ of every journal, in journal order.
    pub fn psi(&self) -> Vec<std::result::Result<f64, PsiUnavailable>> {
        let counts = self.journal_counts();
        (0..self.journal_count() as JournalIdx)
            .map(|j| counts.solidarity(j, SolidarityOptions::default()).map(|s| s.psi))
            .collect()
    }

    pub fn journal_id(&self, journal: JournalIdx) -> String {
        let per = self.journals_per_publisher as u32;
        format!("P{}J{}", journal / per, journal % per)
    }

    pub fn to_corpus(&self) -> Result<Corpus> {
        let mut b = Corpus::builder().year_range(SYNTH_YEAR, SYNTH_YEAR);
        for p in 0..self.publisher_count {
            b.add_publisher(format!("P{p}"), None);
        }
        for j in 0..self.journal_count() as JournalIdx {
            let mut journal = Journal::new(self.journal_id(j));
            journal.publisher_id = Some(format!("P{}", self.journal_publisher(j)));
            journal.categories = vec!["00".to_string()];
            b.add_journal(journal);
        }
        for (i, refs) in self.references.iter().enumerate() {
            b.add_paper(Paper {
                paper_id: paper_id(i as PaperIdx),
                journal_id: self.journal_id(self.paper_journal[i]),
                year: SYNTH_YEAR,
                author_keys: Vec::new(),
                references: refs.iter().map(|&r| paper_id(r)).collect(),
            });
        }
        b.build()
    }
}

fn paper_id(i: PaperIdx) -> String {
    format!("s{i:06}")
}

/// Grows one isolated component per publisher.
pub fn generate_synthetic(config: &SynthConfig) -> SyntheticNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    generate_with(config, &mut rng)
}

pub(crate) fn generate_with(config: &SynthConfig, rng: &mut impl Rng) -> SyntheticNetwork {
    config.validate();
    let out_degree = Normal::new(config.out_degree_mean, config.out_degree_std).expect("finite out-degree parameters");
    let a = config.attachment_offset();
    let per = config.journals_per_publisher as u32;
    let mut paper_journal = Vec::new();
    let mut references: Vec<Vec<PaperIdx>> = Vec::new();
    for publisher in 0..config.publisher_count as u32 {
        let (lo, hi) = config.component_size_range;
        let size = rng.random_range(lo..=hi);
        let base = paper_journal.len() as PaperIdx;
        // Every past link target, so a uniform draw from it is in-degree proportional.
        let mut targets: Vec<PaperIdx> = Vec::new();
        for n in 0..size as u32 {
            paper_journal.push(publisher * per + rng.random_range(0..per));
            let k = (out_degree.sample(rng).round().max(0.0) as u32).min(n);
            let mut refs: Vec<PaperIdx> = Vec::with_capacity(k as usize);
            while refs.len() < k as usize {
                let uniform_mass = a * n as f64;
                let t = if rng.random::<f64>() * (uniform_mass + targets.len() as f64) < uniform_mass {
                    base + rng.random_range(0..n)
                } else {
                    targets[rng.random_range(0..targets.len())]
                };
                if !refs.contains(&t) {
                    refs.push(t);
                }
            }
            targets.extend_from_slice(&refs);
            references.push(refs);
        }
    }
    SyntheticNetwork {
        journals_per_publisher: config.journals_per_publisher,
        publisher_count: config.publisher_count,
        paper_journal,
        references,
    }
}

/// Continuous power-law MLE of the in-degree exponent, fitted on `k + a` with `x_min = a`.
pub fn in_degree_exponent_mle(in_degrees: &[usize], offset: f64) -> f64 {
    let log_sum: f64 = in_degrees.iter().map(|&k| ((k as f64 + offset) / offset).ln()).sum();
    1.0 + in_degrees.len() as f64 / log_sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_network_shape() {
        let cfg = SynthConfig { seed: 7, ..Default::default() };
        let net = generate_synthetic(&cfg);
        assert!((2250..=2750).contains(&net.paper_count()));
        let mean_out = net.link_count() as f64 / net.paper_count() as f64;
        assert!((19.0..=21.0).contains(&mean_out), "{mean_out}");
        let alpha = in_degree_exponent_mle(&net.in_degrees(), cfg.attachment_offset());
        assert!((2.5..=3.5).contains(&alpha), "{alpha}");
        for (s, refs) in net.references.iter().enumerate() {
            assert!(!refs.contains(&(s as PaperIdx)));
            for &t in refs {
                assert_eq!(net.paper_publisher(t), net.paper_publisher(s as PaperIdx));
            }
        }
    }

    #[test]
    fn seeded_generation_repeats() {
        let cfg = SynthConfig { seed: 3, ..Default::default() };
        assert_eq!(generate_synthetic(&cfg), generate_synthetic(&cfg));
    }

    #[test]
    fn corpus_view_gives_the_same_psi() {
        let cfg = SynthConfig {
            component_size_range: (60, 80),
            seed: 1,
            ..Default::default()
        };
        let net = generate_synthetic(&cfg);
        let corpus = net.to_corpus().unwrap();
        let counts = JournalCounts::from_corpus(&corpus, crate::selfcite::YearWindow::ALL);
        for (j, psi) in net.psi().into_iter().enumerate() {
            let ci = corpus.journal_idx(&net.journal_id(j as JournalIdx)).unwrap();
            let other = counts.solidarity(ci, SolidarityOptions::default()).map(|s| s.psi);
            assert_eq!(psi.map(|p| (p * 1e12).round()), other.map(|p| (p * 1e12).round()));
        }
    }
}
