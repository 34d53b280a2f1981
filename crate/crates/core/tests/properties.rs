use std::collections::BTreeMap;

use proptest::prelude::*;

use pubsolid::authors::normalize_name;
use pubsolid::corpus::{check_character, extract_issns, validate_issn, Corpus, Journal, Paper, PaperIdx};
use pubsolid::disruption::{disruption_table, DisruptionOptions};
use pubsolid::impact::market_shares;
use pubsolid::jnet::{betweenness, closeness, pagerank, pathcore, Digraph, PageRankOptions};
use pubsolid::novelty::{shuffle_citations, ShuffleConfig};
use pubsolid::selfcite::{JournalCounts, SolidarityOptions};
use pubsolid::stats::percentile;

/// `(year offset, journal, publisher-less?, references as earlier indices)`.
fn papers_strategy(max: usize) -> impl Strategy<Value = Vec<(i32, usize, Vec<usize>)>> {
    prop::collection::vec((0..4i32, 0..4usize, prop::collection::vec(any::<prop::sample::Index>(), 0..6)), 1..max)
        .prop_map(|raw| {
            raw.into_iter()
                .enumerate()
                .map(|(i, (y, j, refs))| {
                    let mut r: Vec<usize> = if i == 0 { Vec::new() } else { refs.iter().map(|x| x.index(i)).collect() };
                    r.sort_unstable();
                    r.dedup();
                    (y, j, r)
                })
                .collect()
        })
}

fn build(spec: &[(i32, usize, Vec<usize>)]) -> Corpus {
    let mut b = Corpus::builder().year_range(1990, 2030);
    for p in 0..2 {
        b.add_publisher(format!("P{p}"), None);
    }
    for j in 0..4 {
        let mut journal = Journal::new(format!("J{j}"));
        journal.categories = vec!["10".into()];
        journal.publisher_id = (j < 3).then(|| format!("P{}", j % 2));
        b.add_journal(journal);
    }
    for (i, (y, j, refs)) in spec.iter().enumerate() {
        b.add_paper(Paper {
            paper_id: format!("p{i:03}"),
            journal_id: format!("J{j}"),
            year: 2000 + y,
            author_keys: (0..i % 3).map(|k| format!("a{i}{k}")).collect(),
            references: refs.iter().map(|r| format!("p{r:03}")).collect(),
        });
    }
    b.build().unwrap()
}

fn digraph_strategy() -> impl Strategy<Value = Digraph> {
    (1..7usize)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n as u32, 0..n as u32, 1..5u32), 0..20)))
        .prop_map(|(n, edges)| Digraph::from_edges(n, edges.into_iter().map(|(a, b, w)| (a, b, f64::from(w)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn percentile_is_bounded_and_monotone(
        values in prop::collection::vec(-1e6f64..1e6, 1..40),
        q1 in 0.0f64..=1.0,
        q2 in 0.0f64..=1.0,
    ) {
        let (lo, hi) = (q1.min(q2), q1.max(q2));
        let a = percentile(&values, lo).unwrap();
        let b = percentile(&values, hi).unwrap();
        let min = values.iter().copied().fold(f64::MAX, f64::min);
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        prop_assert!(a <= b);
        prop_assert!(min <= a && b <= max);
        prop_assert_eq!(percentile(&values, 0.0).unwrap(), min);
        prop_assert_eq!(percentile(&values, 1.0).unwrap(), max);
    }

    #[test]
    fn forward_and_inverted_indices_are_transposes(spec in papers_strategy(40)) {
        let corpus = build(&spec);
        for p in 0..corpus.paper_count() as PaperIdx {
            for &r in corpus.references(p) {
                prop_assert_eq!(corpus.citers(r).iter().filter(|&&c| c == p).count(), 1);
            }
            for &c in corpus.citers(p) {
                prop_assert_eq!(corpus.references(c).iter().filter(|&&r| r == p).count(), 1);
            }
        }
    }

    #[test]
    fn shuffle_preserves_margins(spec in papers_strategy(60), seed in any::<u64>()) {
        let corpus = build(&spec);
        let config = ShuffleConfig { ensemble_count: 1, swaps_per_edge: 5.0, seed };
        let shuffled = shuffle_citations(&corpus, &config, 0);
        let margins = |edges: &mut dyn Iterator<Item = (PaperIdx, PaperIdx)>| {
            let mut m: BTreeMap<(char, u32, i32), usize> = BTreeMap::new();
            for (a, b) in edges {
                *m.entry(('o', a, 0)).or_default() += 1;
                *m.entry(('i', b, 0)).or_default() += 1;
                *m.entry(('y', 0, corpus.paper_year(a) * 10_000 + corpus.paper_year(b))).or_default() += 1;
            }
            m
        };
        prop_assert_eq!(
            margins(&mut corpus.edges()),
            margins(&mut shuffled.edges.iter().copied())
        );
    }

    #[test]
    fn disruption_index_is_bounded(spec in papers_strategy(60), window in prop::option::of(0..3u32)) {
        let corpus = build(&spec);
        let opts = DisruptionOptions { citer_window_years: window };
        for row in disruption_table(&corpus, &opts) {
            if let Some(d) = row.index() {
                prop_assert!((-1.0..=1.0).contains(&d));
            }
        }
    }

    #[test]
    fn market_shares_sum_to_one(spec in papers_strategy(60), year in 0..4i32) {
        let corpus = build(&spec);
        if let Some(shares) = market_shares(&corpus, 2000 + year) {
            prop_assert!((shares.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(shares.iter().all(|s| (0.0..=1.0).contains(s)));
        }
    }

    #[test]
    fn psi_is_scale_free(
        cells in prop::collection::vec(0..50u32, 16),
        sizes in prop::collection::vec(1..300u64, 4),
        k in 1.5f64..1e4,
    ) {
        let mut counts = JournalCounts::new(vec![Some(0), Some(0), Some(1), Some(1)], sizes);
        for (i, &c) in cells.iter().enumerate() {
            counts.set((i / 4) as u32, (i % 4) as u32, f64::from(c));
        }
        let scaled = counts.scaled(k);
        for j in 0..4 {
            let opts = SolidarityOptions::default();
            match (counts.solidarity(j, opts), scaled.solidarity(j, opts)) {
                (Ok(a), Ok(b)) => prop_assert!((a.psi - b.psi).abs() <= 1e-12 * a.psi.abs().max(1e-300)),
                (Err(a), Err(b)) => prop_assert_eq!(a, b),
                (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
            }
        }
    }

    #[test]
    fn computed_check_characters_validate(digits in "[0-9]{7}") {
        let check = check_character(&digits).unwrap();
        let issn = format!("{}-{}{}", &digits[..4], &digits[4..], check);
        prop_assert!(validate_issn(&issn));
    }

    #[test]
    fn extraction_returns_only_valid_issns(text in "(ISSN:? |[0-9X]{4}-[0-9X]{4} |word |, )*") {
        for issn in extract_issns(&text) {
            prop_assert!(validate_issn(&issn));
        }
    }

    #[test]
    fn name_normalization_is_idempotent(name in "[A-Za-zéü .-]{1,20}(, [A-Za-z .]{1,10})?") {
        let once = normalize_name(&name);
        prop_assert_eq!(normalize_name(&once), once.clone());
    }

    #[test]
    fn centralities_are_well_formed(g in digraph_strategy()) {
        let n = g.node_count();
        let pr = pagerank(&g, PageRankOptions::default()).unwrap();
        prop_assert!((pr.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(pr.iter().all(|&p| p > 0.0));
        prop_assert!(betweenness(&g).iter().all(|&b| b >= 0.0));
        prop_assert!(closeness(&g).iter().all(|&c| (0.0..=(n as f64)).contains(&c)));
        prop_assert!(pathcore(&g).iter().all(|&s| (0.0..=1.0).contains(&s)));
    }
}
