mod common;

use std::collections::BTreeMap;

use pubsolid::corpus::{load_corpus, InterchangeFormat, JournalIdx};
use pubsolid::impact::NormalizationTable;
use pubsolid::jnet::{build_journal_network, centrality_comparison, compute_centrality, LinkType, Metric, PageRankOptions};
use pubsolid::matching::{MatchOptions, Matcher};
use pubsolid::pipeline::RunConfig;

/// Journal-pair citation counts by direct scan of the paper records.
fn oracle_weights(
    corpus: &pubsolid::corpus::Corpus,
    year: i32,
    window: i32,
    link: LinkType,
) -> BTreeMap<(JournalIdx, JournalIdx), f64> {
    let mut w = BTreeMap::new();
    for (citing, cited) in corpus.edges() {
        let (cy, dy) = (corpus.paper_year(citing), corpus.paper_year(cited));
        let counted = match link {
            LinkType::Citation => dy == year && cy > year && cy <= year + window,
            LinkType::Reference => cy == year && dy < year && dy >= year - window,
        };
        if counted {
            let key = (corpus.paper_journal(citing).unwrap(), corpus.paper_journal(cited).unwrap());
            *w.entry(key).or_insert(0.0) += 1.0;
        }
    }
    w
}

#[test]
fn windows_and_link_types_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig::load(&common::write_fixture(dir.path(), 5, "")).unwrap();
    let corpus = load_corpus(&config.corpus.paths(), InterchangeFormat::JsonlCsv, config.corpus.year_range()).unwrap();
    let table = NormalizationTable::from_corpus(&corpus, 2016).unwrap();
    let matches = Matcher::new(&corpus, 2014, Some(&table), MatchOptions::default())
        .unwrap()
        .match_all();
    assert!(matches.iter().any(|m| m.uj.is_some()));

    for window in [2, 5] {
        for link in [LinkType::Citation, LinkType::Reference] {
            let net = build_journal_network(&corpus, 2014, window, link);
            assert!(!net.is_empty(), "{window} {link:?}");
            let got: BTreeMap<(JournalIdx, JournalIdx), f64> = net
                .graph
                .edges()
                .map(|(a, b, w)| ((net.nodes[a as usize], net.nodes[b as usize]), w))
                .collect();
            assert_eq!(got, oracle_weights(&corpus, 2014, window, link), "{window} {link:?}");

            let vectors: Vec<_> = Metric::ALL
                .iter()
                .map(|&m| compute_centrality(&net, m, PageRankOptions::default()).unwrap())
                .collect();
            for v in &vectors {
                assert_eq!(v.scores.len(), net.nodes.len());
                assert!(v.scores.iter().all(|s| s.is_finite() && *s >= 0.0));
            }
            let report = centrality_comparison(&matches, &net, &vectors);
            assert_eq!(report.by_metric.len(), 4);
            for cmp in report.by_metric.values() {
                assert!(cmp.uj_higher <= cmp.pairs.len());
                if let Some(f) = cmp.fraction_uj_higher() {
                    assert!((0.0..=1.0).contains(&f));
                }
            }
        }
    }
}

#[test]
fn wider_windows_only_add_links() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig::load(&common::write_fixture(dir.path(), 6, "")).unwrap();
    let corpus = load_corpus(&config.corpus.paths(), InterchangeFormat::JsonlCsv, config.corpus.year_range()).unwrap();
    for link in [LinkType::Citation, LinkType::Reference] {
        let narrow = build_journal_network(&corpus, 2014, 2, link);
        let wide = build_journal_network(&corpus, 2014, 5, link);
        for (a, b, w) in narrow.graph.edges() {
            let (ja, jb) = (narrow.nodes[a as usize], narrow.nodes[b as usize]);
            let (wa, wb) = (wide.node_of(ja).unwrap(), wide.node_of(jb).unwrap());
            assert!(wide.graph.weight(wa, wb) >= w);
        }
    }
}
