use std::collections::BTreeMap;
use std::path::Path;

use super::{CentralityVector, JournalCitationNetwork, Metric};
use crate::corpus::{Corpus, JournalIdx};
use crate::matching::MatchRecord;
use crate::output::{cell, CsvOut};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct PairScores {
    pub qj: JournalIdx,
    pub uj: JournalIdx,
    pub qj_score: f64,
    pub uj_score: f64,
}

impl PairScores {
    /// `log10(uj) - log10(qj)`, when both scores are positive.
    pub fn log_difference(&self) -> Option<f64> {
        (self.qj_score > 0.0 && self.uj_score > 0.0)
            .then(|| self.uj_score.log10() - self.qj_score.log10())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricComparison {
    pub metric: Metric,
    pub pairs: Vec<PairScores>,
    pub uj_higher: usize,
    /// Pairs skipped because either journal has no score.
    pub missing: usize,
}

impl MetricComparison {
    /// Share of compared pairs where the control scores strictly higher.
    pub fn fraction_uj_higher(&self) -> Option<f64> {
        (!self.pairs.is_empty()).then(|| self.uj_higher as f64 / self.pairs.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub by_metric: BTreeMap<Metric, MetricComparison>,
}

/// Compares questioned and control journals pairwise on each centrality.
pub fn centrality_comparison(
    matches: &[MatchRecord],
    network: &JournalCitationNetwork,
    vectors: &[CentralityVector],
) -> ComparisonReport {
    let mut pairs: Vec<(JournalIdx, JournalIdx)> =
        matches.iter().filter_map(|m| Some((m.qj, m.uj?))).collect();
    // a pair matched in several categories is compared once
    pairs.sort_unstable();
    pairs.dedup();

    let mut report = ComparisonReport::default();
    for v in vectors {
        let mut cmp = MetricComparison {
            metric: v.metric,
            pairs: Vec::new(),
            uj_higher: 0,
            missing: 0,
        };
        for &(qj, uj) in &pairs {
            match (v.score(network, qj), v.score(network, uj)) {
                (Some(q), Some(u)) => {
                    if u > q {
                        cmp.uj_higher += 1;
                    }
                    cmp.pairs.push(PairScores {
                        qj,
                        uj,
                        qj_score: q,
                        uj_score: u,
                    });
                }
                _ => cmp.missing += 1,
            }
        }
        report.by_metric.insert(v.metric, cmp);
    }
    report
}

pub fn write_comparison_csv(
    path: &Path,
    corpus: &Corpus,
    network: &JournalCitationNetwork,
    report: &ComparisonReport,
) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &[
            "year",
            "window",
            "link_type",
            "metric",
            "qj_id",
            "uj_id",
            "qj_score",
            "uj_score",
            "log_diff",
        ],
    )?;
    for cmp in report.by_metric.values() {
        for p in &cmp.pairs {
            out.row([
                network.year.to_string(),
                network.window_years.to_string(),
                network.link_type.as_str().to_string(),
                cmp.metric.as_str().to_string(),
                corpus.journal(p.qj).journal_id.clone(),
                corpus.journal(p.uj).journal_id.clone(),
                p.qj_score.to_string(),
                p.uj_score.to_string(),
                cell(p.log_difference()),
            ])?;
        }
    }
    out.finish()
}

/// One row per network and metric with the share of controls scoring higher.
pub fn write_comparison_summary(
    path: &Path,
    reports: &[(&JournalCitationNetwork, &ComparisonReport)],
) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &[
            "year",
            "window",
            "link_type",
            "metric",
            "pairs",
            "uj_higher",
            "missing",
            "fraction_uj_higher",
        ],
    )?;
    for (network, report) in reports {
        for cmp in report.by_metric.values() {
            out.row([
                network.year.to_string(),
                network.window_years.to_string(),
                network.link_type.as_str().to_string(),
                cmp.metric.as_str().to_string(),
                cmp.pairs.len().to_string(),
                cmp.uj_higher.to_string(),
                cmp.missing.to_string(),
                cell(cmp.fraction_uj_higher()),
            ])?;
        }
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jnet::{Digraph, LinkType};

    fn network(n: usize) -> JournalCitationNetwork {
        JournalCitationNetwork {
            year: 2000,
            window_years: 2,
            link_type: LinkType::Citation,
            nodes: (0..n as u32).collect(),
            graph: Digraph::new(n),
        }
    }

    fn matched(qj: u32, uj: u32) -> MatchRecord {
        MatchRecord {
            qj,
            category: "11".into(),
            uj: Some(uj),
            impact_gap: Some(0.0),
            tercile: None,
        }
    }

    #[test]
    fn fractions() {
        let net = network(8);
        let matches: Vec<_> = (0..4).map(|i| matched(i, i + 4)).collect();
        let all_higher = CentralityVector {
            metric: Metric::PageRank,
            scores: vec![1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0],
        };
        let equal = CentralityVector {
            metric: Metric::Closeness,
            scores: vec![1.0; 8],
        };
        let three = CentralityVector {
            metric: Metric::Betweenness,
            scores: vec![1.0, 1.0, 1.0, 5.0, 2.0, 2.0, 2.0, 2.0],
        };
        let r = centrality_comparison(&matches, &net, &[all_higher, equal, three]);
        assert_eq!(r.by_metric[&Metric::PageRank].fraction_uj_higher(), Some(1.0));
        assert_eq!(r.by_metric[&Metric::Closeness].fraction_uj_higher(), Some(0.0));
        assert_eq!(r.by_metric[&Metric::Betweenness].fraction_uj_higher(), Some(0.75));
    }

    #[test]
    fn missing_scores_are_counted() {
        let mut net = network(2);
        net.nodes = vec![0, 1];
        let v = CentralityVector {
            metric: Metric::PageRank,
            scores: vec![0.5, 0.5],
        };
        let r = centrality_comparison(&[matched(0, 1), matched(0, 9)], &net, &[v]);
        let cmp = &r.by_metric[&Metric::PageRank];
        assert_eq!(cmp.pairs.len(), 1);
        assert_eq!(cmp.missing, 1);
    }
}
