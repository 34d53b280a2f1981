//! Yearly journal citation networks and their centralities.

mod centrality;
mod compare;
mod graph;
mod pathcore;

use std::collections::BTreeSet;
use std::path::Path;

pub use centrality::{betweenness, closeness, pagerank, PageRankOptions};
pub use compare::{
    centrality_comparison, write_comparison_csv, write_comparison_summary, ComparisonReport, MetricComparison,
    PairScores,
};
pub use graph::Digraph;
pub use pathcore::pathcore;

use crate::corpus::{Corpus, JournalIdx};
use crate::output::CsvOut;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkType {
    /// Citations received by the year's papers in the following window.
    Citation,
    /// References made by the year's papers into the preceding window.
    Reference,
}

impl LinkType {
    pub fn as_str(&self) -> &'static str {
        match self {
            LinkType::Citation => "citation",
            LinkType::Reference => "reference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Metric {
    #[serde(rename = "bc")]
    Betweenness,
    #[serde(rename = "cc")]
    Closeness,
    #[serde(rename = "pr")]
    PageRank,
    #[serde(rename = "pathcore")]
    PathCore,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Betweenness,
        Metric::Closeness,
        Metric::PathCore,
        Metric::PageRank,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Betweenness => "bc",
            Metric::Closeness => "cc",
            Metric::PageRank => "pr",
            Metric::PathCore => "pathcore",
        }
    }
}

/// Journal graph for one year: directed citing → cited, weighted by citation
/// count, journal self-citations kept as loops.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalCitationNetwork {
    pub year: i32,
    pub window_years: i32,
    pub link_type: LinkType,
    /// Journal behind each graph node, ascending.
    pub nodes: Vec<JournalIdx>,
    pub graph: Digraph,
}

impl JournalCitationNetwork {
    pub fn node_of(&self, journal: JournalIdx) -> Option<u32> {
        self.nodes.binary_search(&journal).ok().map(|i| i as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn write_edge_list(&self, path: &Path, corpus: &Corpus) -> Result<()> {
        let mut out = CsvOut::create(path, &["citing_id", "cited_id", "weight"])?;
        for (a, b, w) in self.graph.edges() {
            out.row([
                corpus.journal(self.nodes[a as usize]).journal_id.clone(),
                corpus.journal(self.nodes[b as usize]).journal_id.clone(),
                w.to_string(),
            ])?;
        }
        out.finish()
    }
}

/// Aggregates paper-level citations into the journal network of `year`.
///
/// Nodes are the journals publishing in `year` plus every journal at the
/// other end of a counted citation, so a node's in-strength is exactly the
/// citations it received in the window.
pub fn build_journal_network(
    corpus: &Corpus,
    year: i32,
    window_years: i32,
    link_type: LinkType,
) -> JournalCitationNetwork {
    let mut edges: Vec<(JournalIdx, JournalIdx)> = Vec::new();
    let mut nodes: BTreeSet<JournalIdx> = corpus
        .journals()
        .iter()
        .enumerate()
        .filter(|(_, j)| j.papers_in(year) > 0)
        .map(|(i, _)| i as JournalIdx)
        .collect();

    for (p, paper) in corpus.papers().iter().enumerate() {
        if paper.year != year {
            continue;
        }
        let p = p as u32;
        let Some(own) = corpus.paper_journal(p) else {
            continue;
        };
        match link_type {
            LinkType::Citation => {
                for &c in corpus.citers(p) {
                    let cy = corpus.paper_year(c);
                    if cy > year && cy <= year + window_years {
                        if let Some(cj) = corpus.paper_journal(c) {
                            edges.push((cj, own));
                        }
                    }
                }
            }
            LinkType::Reference => {
                for &r in corpus.references(p) {
                    let ry = corpus.paper_year(r);
                    if ry < year && ry >= year - window_years {
                        if let Some(rj) = corpus.paper_journal(r) {
                            edges.push((own, rj));
                        }
                    }
                }
            }
        }
    }
    nodes.extend(edges.iter().flat_map(|&(a, b)| [a, b]));
    let nodes: Vec<JournalIdx> = nodes.into_iter().collect();
    if nodes.is_empty() {
        log::warn!("journal network for {year} is empty");
    }
    let position = |j: JournalIdx| nodes.binary_search(&j).unwrap() as u32;
    let graph = Digraph::from_edges(
        nodes.len(),
        edges.iter().map(|&(a, b)| (position(a), position(b), 1.0)),
    );
    JournalCitationNetwork {
        year,
        window_years,
        link_type,
        nodes,
        graph,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub metric: Metric,
    /// Scores aligned with the network's `nodes`.
    pub scores: Vec<f64>,
}

impl CentralityVector {
    pub fn score(&self, network: &JournalCitationNetwork, journal: JournalIdx) -> Option<f64> {
        network.node_of(journal).map(|n| self.scores[n as usize])
    }
}

pub fn compute_centrality(
    network: &JournalCitationNetwork,
    metric: Metric,
    pr: PageRankOptions,
) -> Result<CentralityVector> {
    let scores = match metric {
        Metric::Betweenness => betweenness(&network.graph),
        Metric::Closeness => closeness(&network.graph),
        Metric::PageRank => pagerank(&network.graph, pr)?,
        Metric::PathCore => pathcore(&network.graph),
    };
    Ok(CentralityVector { metric, scores })
}

/// `centrality_<metric>_<year>_<window><type>.csv`
pub fn centrality_file_name(network: &JournalCitationNetwork, metric: Metric) -> String {
    format!(
        "centrality_{}_{}_{}{}.csv",
        metric.as_str(),
        network.year,
        network.window_years,
        network.link_type.as_str()
    )
}

pub fn write_centrality_csv(
    path: &Path,
    corpus: &Corpus,
    network: &JournalCitationNetwork,
    vector: &CentralityVector,
) -> Result<()> {
    let mut out = CsvOut::create(path, &["journal_id", "score"])?;
    for (node, score) in network.nodes.iter().zip(&vector.scores) {
        out.row([corpus.journal(*node).journal_id.clone(), score.to_string()])?;
    }
    out.finish()
}
