//! Author disambiguation and author-level statistics.
//!
//! Mentions are blocked by normalized name. Inside a block, step 1 joins any
//! two papers whose similarity exceeds the pair threshold; step 2 then merges
//! groups greedily by average similarity until no pair of groups exceeds the
//! group threshold.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::{Corpus, JournalIdx, PaperIdx};
use crate::output::CsvOut;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SimilarityWeights {
    pub w_self_citation: f64,
    pub w_shared_author: f64,
    pub w_shared_citation: f64,
    pub w_shared_reference: f64,
    pub pair_threshold: f64,
    pub group_threshold: f64,
}

impl Default for SimilarityWeights {
    /// Placeholder weights for fixtures; real runs configure their own.
    fn default() -> Self {
        Self {
            w_self_citation: 1.0,
            w_shared_author: 0.5,
            w_shared_citation: 0.2,
            w_shared_reference: 0.2,
            pair_threshold: 1.0,
            group_threshold: 0.19,
        }
    }
}

/// Canonical `surname, initials` blocking key.
///
/// `"Müller, Hans-Peter"` and `"hans peter MULLER"` both become `"muller, h p"`.
pub fn normalize_name(name: &str) -> String {
    let folded: String = name
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .map(|c| if c == '.' || c == '-' { ' ' } else { c })
        .collect();
    let (surname, given) = match folded.split_once(',') {
        Some((s, g)) => (s.to_string(), g.to_string()),
        None => {
            let mut tokens: Vec<&str> = folded.split_whitespace().collect();
            let surname = tokens.pop().unwrap_or_default().to_string();
            (surname, tokens.join(" "))
        }
    };
    let surname = surname.split_whitespace().collect::<Vec<_>>().join(" ");
    let initials: String = given
        .split_whitespace()
        .filter_map(|t| t.chars().next().map(String::from))
        .collect::<Vec<_>>()
        .join(" ");
    if initials.is_empty() {
        // a bare multi-word surname keeps its comma so it is not re-split
        if surname.contains(' ') {
            format!("{surname},")
        } else {
            surname
        }
    } else {
        format!("{surname}, {initials}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mention {
    pub paper: PaperIdx,
    pub author_key: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimilarityFeatures {
    /// 1 when either paper cites the other.
    pub self_citation: u32,
    /// Co-author names on both papers, other than the shared block name.
    pub shared_authors: u32,
    pub shared_citations: u32,
    pub shared_references: u32,
}

impl SimilarityFeatures {
    pub fn score(&self, w: &SimilarityWeights) -> f64 {
        w.w_self_citation * self.self_citation as f64
            + w.w_shared_author * self.shared_authors as f64
            + w.w_shared_citation * self.shared_citations as f64
            + w.w_shared_reference * self.shared_references as f64
    }
}

fn sorted_overlap(a: &[PaperIdx], b: &[PaperIdx]) -> u32 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn paper_names(corpus: &Corpus, paper: PaperIdx) -> HashSet<String> {
    corpus.paper(paper).author_keys.iter().map(|k| mention_name(corpus, k)).collect()
}

fn mention_name(corpus: &Corpus, author_key: &str) -> String {
    normalize_name(corpus.author_name(author_key).unwrap_or(author_key))
}

fn features(
    corpus: &Corpus,
    (p1, n1): (PaperIdx, &HashSet<String>),
    (p2, n2): (PaperIdx, &HashSet<String>),
    block: Option<&str>,
) -> SimilarityFeatures {
    if p1 == p2 {
        return SimilarityFeatures::default();
    }
    let r1 = corpus.references(p1);
    let r2 = corpus.references(p2);
    let cites = r1.binary_search(&p2).is_ok() || r2.binary_search(&p1).is_ok();
    let shared_names = n1.intersection(n2).count() as u32;
    let shared_authors = match block {
        Some(b) if n1.contains(b) && n2.contains(b) => shared_names - 1,
        Some(_) => shared_names,
        None => shared_names.saturating_sub(1),
    };
    SimilarityFeatures {
        self_citation: cites as u32,
        shared_authors,
        shared_citations: sorted_overlap(corpus.citers(p1), corpus.citers(p2)),
        shared_references: sorted_overlap(r1, r2),
    }
}

pub fn similarity_features(corpus: &Corpus, p1: PaperIdx, p2: PaperIdx) -> SimilarityFeatures {
    features(
        corpus,
        (p1, &paper_names(corpus, p1)),
        (p2, &paper_names(corpus, p2)),
        None,
    )
}

/// Similarity of two papers assumed to share one ambiguous author name.
pub fn paper_similarity(corpus: &Corpus, p1: PaperIdx, p2: PaperIdx, weights: &SimilarityWeights) -> f64 {
    similarity_features(corpus, p1, p2).score(weights)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorCluster {
    pub cluster_id: u32,
    pub name: String,
    pub mentions: Vec<Mention>,
}

impl AuthorCluster {
    /// Distinct papers, ascending.
    pub fn papers(&self) -> Vec<PaperIdx> {
        let mut p: Vec<PaperIdx> = self.mentions.iter().map(|m| m.paper).collect();
        p.dedup();
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuthorClusters {
    pub clusters: Vec<AuthorCluster>,
    /// Uncited single-authored singletons.
    pub excluded: Vec<Mention>,
}

impl AuthorClusters {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Groups of block positions after both steps, ordered by smallest member.
pub fn cluster_block(sim: &[Vec<f64>], weights: &SimilarityWeights) -> Vec<Vec<usize>> {
    let n = sim.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if sim[i][j] > weights.pair_threshold {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        by_root.entry(r).or_default().push(i);
    }
    let mut groups: Vec<Option<Vec<usize>>> = by_root.into_values().map(Some).collect();

    // Pairwise similarity sums between live groups.
    let g = groups.len();
    let mut sums = vec![vec![0.0; g]; g];
    for a in 0..g {
        for b in a + 1..g {
            let s: f64 = groups[a]
                .as_ref()
                .unwrap()
                .iter()
                .flat_map(|&x| groups[b].as_ref().unwrap().iter().map(move |&y| sim[x][y]))
                .sum();
            sums[a][b] = s;
            sums[b][a] = s;
        }
    }
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..g {
            let Some(ga) = &groups[a] else { continue };
            for b in a + 1..g {
                let Some(gb) = &groups[b] else { continue };
                let avg = sums[a][b] / (ga.len() * gb.len()) as f64;
                if best.is_none_or(|(v, _, _)| avg > v) {
                    best = Some((avg, a, b));
                }
            }
        }
        let Some((avg, a, b)) = best else { break };
        if avg <= weights.group_threshold {
            break;
        }
        let moved = groups[b].take().unwrap();
        groups[a].as_mut().unwrap().extend(moved);
        for k in 0..g {
            if k != a && groups[k].is_some() {
                sums[a][k] += sums[b][k];
                sums[k][a] = sums[a][k];
            }
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_iter().flatten().collect();
    for grp in &mut out {
        grp.sort_unstable();
    }
    out.sort();
    out
}

pub fn disambiguate(corpus: &Corpus, weights: &SimilarityWeights) -> AuthorClusters {
    let names: Vec<HashSet<String>> = (0..corpus.paper_count() as PaperIdx)
        .map(|p| paper_names(corpus, p))
        .collect();
    let mut blocks: BTreeMap<String, Vec<Mention>> = BTreeMap::new();
    for (idx, p) in corpus.papers().iter().enumerate() {
        for key in &p.author_keys {
            blocks.entry(mention_name(corpus, key)).or_default().push(Mention {
                paper: idx as PaperIdx,
                author_key: key.clone(),
            });
        }
    }
    let blocks: Vec<(String, Vec<Mention>)> = blocks
        .into_iter()
        .map(|(name, mut m)| {
            m.sort();
            m.dedup();
            (name, m)
        })
        .collect();
    let grouped: Vec<Vec<Vec<usize>>> = blocks
        .par_iter()
        .map(|(name, mentions)| {
            let sim: Vec<Vec<f64>> = mentions
                .iter()
                .map(|a| {
                    mentions
                        .iter()
                        .map(|b| {
                            let fa = (a.paper, &names[a.paper as usize]);
                            let fb = (b.paper, &names[b.paper as usize]);
                            features(corpus, fa, fb, Some(name)).score(weights)
                        })
                        .collect()
                })
                .collect();
            cluster_block(&sim, weights)
        })
        .collect();

    let mut out = AuthorClusters::default();
    for ((name, mentions), groups) in blocks.into_iter().zip(grouped) {
        for grp in groups {
            let members: Vec<Mention> = grp.iter().map(|&i| mentions[i].clone()).collect();
            if let [only] = members.as_slice() {
                let p = only.paper;
                if corpus.citers(p).is_empty() && corpus.paper(p).author_keys.len() == 1 {
                    out.excluded.push(only.clone());
                    continue;
                }
            }
            out.clusters.push(AuthorCluster {
                cluster_id: out.clusters.len() as u32,
                name: name.clone(),
                mentions: members,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuthorStats {
    pub cluster_id: u32,
    pub academic_age: u32,
    pub paper_count: usize,
    /// Papers in journals of the flagged group.
    pub group_paper_count: usize,
    /// Share of the author's papers cited by another of their papers.
    pub self_cited_fraction: f64,
    /// Share of the author's papers citing another of their papers.
    pub self_citing_fraction: f64,
    /// Group papers cited by another of the author's group papers.
    pub group_self_cited: usize,
    /// Group papers citing another of the author's group papers.
    pub group_self_citing: usize,
    /// The author's papers cited by any paper of the group.
    pub group_cited_by_group: usize,
    /// The author's papers citing any paper of the group.
    pub group_citing_group: usize,
}

pub fn author_demographics(
    corpus: &Corpus,
    clusters: &AuthorClusters,
    group: &HashSet<JournalIdx>,
) -> Vec<AuthorStats> {
    let in_group = |p: PaperIdx| corpus.paper_journal(p).is_some_and(|j| group.contains(&j));
    clusters
        .clusters
        .par_iter()
        .filter_map(|c| {
            let papers = c.papers();
            let own: HashSet<PaperIdx> = papers.iter().copied().collect();
            let group_papers: HashSet<PaperIdx> = papers.iter().copied().filter(|&p| in_group(p)).collect();
            if group_papers.is_empty() {
                return None;
            }
            let cited_by = |p: PaperIdx, set: &HashSet<PaperIdx>| corpus.citers(p).iter().any(|c| set.contains(c));
            let citing = |p: PaperIdx, set: &HashSet<PaperIdx>| corpus.references(p).iter().any(|r| set.contains(r));
            let years: Vec<i32> = papers.iter().map(|&p| corpus.paper_year(p)).collect();
            let first = *years.iter().min().unwrap();
            let last = *years.iter().max().unwrap();
            let n = papers.len() as f64;
            Some(AuthorStats {
                cluster_id: c.cluster_id,
                academic_age: (last - first) as u32,
                paper_count: papers.len(),
                group_paper_count: group_papers.len(),
                self_cited_fraction: papers.iter().filter(|&&p| cited_by(p, &own)).count() as f64 / n,
                self_citing_fraction: papers.iter().filter(|&&p| citing(p, &own)).count() as f64 / n,
                group_self_cited: group_papers.iter().filter(|&&p| cited_by(p, &group_papers)).count(),
                group_self_citing: group_papers.iter().filter(|&&p| citing(p, &group_papers)).count(),
                group_cited_by_group: papers
                    .iter()
                    .filter(|&&p| corpus.citers(p).iter().any(|&c| in_group(c)))
                    .count(),
                group_citing_group: papers
                    .iter()
                    .filter(|&&p| corpus.references(p).iter().any(|&r| in_group(r)))
                    .count(),
            })
        })
        .collect()
}

pub fn write_clusters_csv(path: &Path, corpus: &Corpus, clusters: &AuthorClusters) -> Result<()> {
    let mut out = CsvOut::create(path, &["cluster_id", "author_key", "paper_id"])?;
    for c in &clusters.clusters {
        for m in &c.mentions {
            out.row([c.cluster_id.to_string(), m.author_key.clone(), corpus.paper(m.paper).paper_id.clone()])?;
        }
    }
    out.finish()
}

/// One block of rows per labelled journal group.
pub fn write_author_stats_csv(path: &Path, groups: &[(String, Vec<AuthorStats>)]) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &[
            "group",
            "cluster_id",
            "academic_age",
            "paper_count",
            "group_paper_count",
            "self_cited_fraction",
            "self_citing_fraction",
            "group_self_cited",
            "group_self_citing",
            "group_cited_by_group",
            "group_citing_group",
        ],
    )?;
    for (group, s) in groups.iter().flat_map(|(g, rows)| rows.iter().map(move |s| (g, s))) {
        out.row([
            group.clone(),
            s.cluster_id.to_string(),
            s.academic_age.to_string(),
            s.paper_count.to_string(),
            s.group_paper_count.to_string(),
            s.self_cited_fraction.to_string(),
            s.self_citing_fraction.to_string(),
            s.group_self_cited.to_string(),
            s.group_self_citing.to_string(),
            s.group_cited_by_group.to_string(),
            s.group_citing_group.to_string(),
        ])?;
    }
    out.finish()
}
