use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::fenwick::Fenwick;
use super::{generate_with, SynthConfig, SyntheticNetwork};
use crate::corpus::{JournalIdx, PaperIdx};
use crate::output::{cell, CsvOut};
use crate::stats::{mean, sample_std_dev};
use crate::Result;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct RewireConfig {
    /// In-publisher rate of the first journal of each publisher, by publisher.
    pub special_rates: Vec<f64>,
    /// In-publisher rate of every other journal.
    pub baseline_rate: f64,
    /// Rewiring checkpoints as multiples of the link count.
    pub checkpoints: Vec<f64>,
    pub ensemble_count: usize,
    pub seed: u64,
}

impl Default for RewireConfig {
    fn default() -> Self {
        Self {
            special_rates: vec![0.5, 0.25, 0.125, 0.0625, 0.0625],
            baseline_rate: 0.2,
            checkpoints: vec![0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            ensemble_count: 20,
            seed: 0,
        }
    }
}

impl RewireConfig {
    /// Total rewiring as a multiple of the link count.
    pub fn rewire_fraction(&self) -> f64 {
        self.checkpoints.iter().copied().fold(0.0, f64::max)
    }

    pub fn special_journal(&self, net: &SyntheticNetwork, publisher: usize) -> JournalIdx {
        (publisher * net.journals_per_publisher) as JournalIdx
    }

    pub fn journal_rates(&self, net: &SyntheticNetwork) -> Vec<f64> {
        let mut rates = vec![self.baseline_rate; net.journal_count()];
        for (p, &r) in self.special_rates.iter().enumerate().take(net.publisher_count) {
            rates[self.special_journal(net, p) as usize] = r;
        }
        assert!(rates.iter().all(|r| (0.0..=1.0).contains(r)), "rates must lie in [0, 1]");
        rates
    }
}

/// Incremental rewiring state.
///
/// Links are visited in sweeps: each sweep walks a fresh random permutation
/// of all links, so after `k` full sweeps every link has moved `k` times.
pub struct Rewirer {
    net: SyntheticNetwork,
    rates: Vec<f64>,
    members: Vec<Vec<PaperIdx>>,
    local: Vec<usize>,
    trees: Vec<Fenwick>,
    links: Vec<(PaperIdx, usize)>,
    order: Vec<usize>,
    cursor: usize,
    rng: ChaCha8Rng,
}

impl Rewirer {
    pub fn new(net: SyntheticNetwork, rates: Vec<f64>, rng: ChaCha8Rng) -> Self {
        assert_eq!(rates.len(), net.journal_count());
        let mut members = vec![Vec::new(); net.publisher_count];
        let mut local = vec![0; net.paper_count()];
        for p in 0..net.paper_count() as PaperIdx {
            let m = &mut members[net.paper_publisher(p) as usize];
            local[p as usize] = m.len();
            m.push(p);
        }
        let in_deg = net.in_degrees();
        let trees = members
            .iter()
            .map(|m| Fenwick::new(&m.iter().map(|&p| in_deg[p as usize] as u64 + 1).collect::<Vec<_>>()))
            .collect();
        let links: Vec<(PaperIdx, usize)> = net
            .references
            .iter()
            .enumerate()
            .flat_map(|(s, refs)| (0..refs.len()).map(move |k| (s as PaperIdx, k)))
            .collect();
        let order = (0..links.len()).collect();
        Self {
            cursor: links.len(),
            net,
            rates,
            members,
            local,
            trees,
            links,
            order,
            rng,
        }
    }

    pub fn network(&self) -> &SyntheticNetwork {
        &self.net
    }

    pub fn into_network(self) -> SyntheticNetwork {
        self.net
    }

    fn draw_in(&mut self, publisher: usize) -> PaperIdx {
        let u = self.rng.random_range(0..self.trees[publisher].total());
        self.members[publisher][self.trees[publisher].find(u)]
    }

    fn draw_outside(&mut self, publisher: usize) -> Option<PaperIdx> {
        let totals: Vec<u64> = self.trees.iter().map(Fenwick::total).collect();
        let rest: u64 = totals.iter().enumerate().filter(|&(q, _)| q != publisher).map(|(_, t)| t).sum();
        if rest == 0 {
            return None;
        }
        let mut u = self.rng.random_range(0..rest);
        for (q, &t) in totals.iter().enumerate() {
            if q == publisher {
                continue;
            }
            if u < t {
                return Some(self.members[q][self.trees[q].find(u)]);
            }
            u -= t;
        }
        unreachable!("draw below the summed weights")
    }

    /// Retargets one link.
    pub fn step(&mut self) {
        if self.links.is_empty() {
            return;
        }
        if self.cursor == self.order.len() {
            self.order.shuffle(&mut self.rng);
            self.cursor = 0;
        }
        let (s, slot) = self.links[self.order[self.cursor]];
        self.cursor += 1;
        let old = self.net.references[s as usize][slot];
        let publisher = self.net.paper_publisher(s) as usize;
        let inside = self.rng.random::<f64>() < self.rates[self.net.paper_journal[s as usize] as usize];
        let new = loop {
            let candidate = if inside {
                self.draw_in(publisher)
            } else {
                match self.draw_outside(publisher) {
                    Some(c) => c,
                    None => self.draw_in(publisher),
                }
            };
            let duplicate = candidate != old && self.net.references[s as usize].contains(&candidate);
            if candidate != s && !duplicate {
                break candidate;
            }
        };
        if new != old {
            let (po, pn) = (self.net.paper_publisher(old) as usize, self.net.paper_publisher(new) as usize);
            self.trees[po].add(self.local[old as usize], -1);
            self.trees[pn].add(self.local[new as usize], 1);
            self.net.references[s as usize][slot] = new;
        }
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }
}

/// Retargets `step_count` links of a copy of `net`.
pub fn rewire(net: &SyntheticNetwork, config: &RewireConfig, step_count: u64) -> SyntheticNetwork {
    let mut r = Rewirer::new(net.clone(), config.journal_rates(net), ChaCha8Rng::seed_from_u64(config.seed));
    r.run(step_count);
    r.into_network()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRun {
    pub ensemble: usize,
    /// ψ of every journal before rewiring.
    pub initial_psi: Vec<Option<f64>>,
    /// `[checkpoint][publisher]` ψ ratio of each special journal; the first row is checkpoint 0.
    pub ratios: Vec<Vec<Option<f64>>>,
}

impl EnsembleRun {
    /// Mean initial ψ over each publisher's journals with a defined value.
    pub fn publisher_means(&self, journals_per_publisher: usize) -> Vec<Option<f64>> {
        self.initial_psi
            .chunks(journals_per_publisher)
            .map(|c| mean(&c.iter().flatten().copied().collect::<Vec<_>>()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewireCurve {
    pub journal: String,
    pub rate: f64,
    /// Ensemble mean ψ ratio at each checkpoint.
    pub mean: Vec<Option<f64>>,
    /// Sample standard deviation across ensembles.
    pub std: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewireExperiment {
    /// Checkpoints in link multiples, starting at 0.
    pub checkpoints: Vec<f64>,
    pub journals_per_publisher: usize,
    pub runs: Vec<EnsembleRun>,
    pub curves: Vec<RewireCurve>,
}

impl RewireExperiment {
    pub fn checkpoint_index(&self, multiple: f64) -> Option<usize> {
        self.checkpoints.iter().position(|&c| (c - multiple).abs() < 1e-12)
    }
}

fn run_ensemble(synth: &SynthConfig, config: &RewireConfig, ensemble: usize, checkpoints: &[f64]) -> EnsembleRun {
    let mut gen_rng = ChaCha8Rng::seed_from_u64(synth.seed);
    gen_rng.set_stream(ensemble as u64);
    let net = generate_with(synth, &mut gen_rng);
    let specials: Vec<JournalIdx> = (0..net.publisher_count).map(|p| config.special_journal(&net, p)).collect();
    let initial_psi: Vec<Option<f64>> = net.psi().into_iter().map(|r| r.ok()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(ensemble as u64);
    let links = net.link_count() as f64;
    let rates = config.journal_rates(&net);
    let mut rewirer = Rewirer::new(net, rates, rng);
    let mut done = 0u64;
    let ratios = checkpoints
        .iter()
        .map(|&c| {
            let target = (c * links).round() as u64;
            rewirer.run(target.saturating_sub(done));
            done = done.max(target);
            let psi = rewirer.network().psi();
            specials
                .iter()
                .map(|&j| Some(psi[j as usize].ok()? / initial_psi[j as usize]?))
                .collect()
        })
        .collect();
    EnsembleRun {
        ensemble,
        initial_psi,
        ratios,
    }
}

/// Ensemble-averaged ψ-ratio trajectories of the special journals.
pub fn psi_rewiring_experiment(synth: &SynthConfig, config: &RewireConfig) -> RewireExperiment {
    let mut checkpoints = vec![0.0];
    let mut rest: Vec<f64> = config.checkpoints.iter().copied().filter(|&c| c > 0.0).collect();
    rest.sort_by(f64::total_cmp);
    rest.dedup();
    checkpoints.extend(rest);

    let runs: Vec<EnsembleRun> = (0..config.ensemble_count)
        .into_par_iter()
        .map(|e| run_ensemble(synth, config, e, &checkpoints))
        .collect();
    let per = synth.journals_per_publisher;
    let curves = (0..synth.publisher_count)
        .map(|p| {
            let column = |k: usize| -> Vec<f64> { runs.iter().filter_map(|r| r.ratios[k][p]).collect() };
            let rate = config.special_rates.get(p).copied().unwrap_or(config.baseline_rate);
            RewireCurve {
                journal: format!("P{p}J0"),
                rate,
                mean: (0..checkpoints.len()).map(|k| mean(&column(k))).collect(),
                std: (0..checkpoints.len()).map(|k| sample_std_dev(&column(k))).collect(),
            }
        })
        .collect();
    RewireExperiment {
        checkpoints,
        journals_per_publisher: per,
        runs,
        curves,
    }
}

pub fn write_rewire_csv(path: &Path, experiment: &RewireExperiment) -> Result<()> {
    let mut out = CsvOut::create(path, &["checkpoint", "journal", "rate", "psi_ratio_mean", "psi_ratio_std"])?;
    for (k, c) in experiment.checkpoints.iter().enumerate() {
        for curve in &experiment.curves {
            out.row([
                c.to_string(),
                curve.journal.clone(),
                curve.rate.to_string(),
                cell(curve.mean[k]),
                cell(curve.std[k]),
            ])?;
        }
    }
    out.finish()
}

/// ψ of every journal before rewiring, one row per ensemble and journal.
pub fn write_initial_psi_csv(path: &Path, experiment: &RewireExperiment) -> Result<()> {
    let per = experiment.journals_per_publisher;
    let mut out = CsvOut::create(path, &["ensemble", "publisher", "journal", "psi"])?;
    for run in &experiment.runs {
        for (j, psi) in run.initial_psi.iter().enumerate() {
            out.row([
                run.ensemble.to_string(),
                format!("P{}", j / per),
                format!("P{}J{}", j / per, j % per),
                cell(*psi),
            ])?;
        }
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::generate_synthetic;

    fn small() -> SynthConfig {
        SynthConfig {
            component_size_range: (80, 100),
            seed: 2,
            ..Default::default()
        }
    }

    #[test]
    fn out_degrees_survive_rewiring() {
        let net = generate_synthetic(&small());
        let before = net.out_degrees();
        let total_in: usize = net.in_degrees().iter().sum();
        let after = rewire(&net, &RewireConfig::default(), 3 * net.link_count() as u64);
        assert_eq!(after.out_degrees(), before);
        assert_eq!(after.in_degrees().iter().sum::<usize>(), total_in);
        for (s, refs) in after.references.iter().enumerate() {
            let mut r = refs.clone();
            r.sort_unstable();
            r.dedup();
            assert_eq!(r.len(), refs.len());
            assert!(!refs.contains(&(s as PaperIdx)));
        }
    }

    #[test]
    fn extreme_rates() {
        let net = generate_synthetic(&small());
        let cfg = RewireConfig {
            special_rates: vec![1.0, 0.0, 1.0, 0.0, 1.0],
            baseline_rate: 0.2,
            ..Default::default()
        };
        let after = rewire(&net, &cfg, 2 * net.link_count() as u64);
        for (s, refs) in after.references.iter().enumerate() {
            let s = s as PaperIdx;
            let j = after.paper_journal[s as usize];
            if j % 5 != 0 {
                continue;
            }
            let own = refs.iter().filter(|&&t| after.paper_publisher(t) == after.paper_publisher(s)).count();
            if cfg.special_rates[after.paper_publisher(s) as usize] == 1.0 {
                assert_eq!(own, refs.len());
            } else {
                assert_eq!(own, 0);
            }
        }
    }

    #[test]
    fn experiment_is_seeded() {
        let synth = small();
        let cfg = RewireConfig {
            ensemble_count: 3,
            checkpoints: vec![0.5, 1.0],
            ..Default::default()
        };
        let a = psi_rewiring_experiment(&synth, &cfg);
        assert_eq!(a, psi_rewiring_experiment(&synth, &cfg));
        assert_eq!(a.checkpoints, vec![0.0, 0.5, 1.0]);
        for curve in &a.curves {
            assert_eq!(curve.mean[0], Some(1.0));
        }
    }
}
