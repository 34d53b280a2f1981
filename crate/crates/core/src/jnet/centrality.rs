//! Shortest-path centralities on the unweighted skeleton and weighted PageRank.
//!
//! Per-source work is split into fixed-size chunks and the partial vectors
//! are summed in chunk order, so results do not depend on the thread count.

use std::collections::VecDeque;

use rayon::prelude::*;

use super::graph::{Digraph, Skeleton};
use crate::{Error, Result};

pub(crate) const CHUNK: usize = 32;

/// Sums `f(item)` vectors over `items` in a thread-count independent order.
pub(crate) fn chunked_sum<T: Sync>(
    items: &[T],
    n: usize,
    f: impl Fn(&T, &mut [f64]) + Sync,
) -> Vec<f64> {
    let partials: Vec<Vec<f64>> = items
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            for item in chunk {
                f(item, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// Brandes single-source pass: BFS order, path counts and predecessor lists.
pub(crate) struct ShortestPaths {
    pub order: Vec<u32>,
    pub sigma: Vec<f64>,
    pub dist: Vec<i64>,
    pub preds: Vec<Vec<u32>>,
}

/// `skip` removes one traversal step `(from, to)`, in the direction walked.
pub(crate) fn bfs_paths(
    g: &Skeleton,
    source: u32,
    forward: bool,
    skip: Option<(u32, u32)>,
) -> ShortestPaths {
    let n = g.node_count();
    let adj = if forward { &g.succ } else { &g.pred };
    let mut sigma = vec![0.0; n];
    let mut dist = vec![-1i64; n];
    let mut preds = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    sigma[source as usize] = 1.0;
    dist[source as usize] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v as usize] {
            if skip == Some((v, w)) {
                continue;
            }
            if dist[w as usize] < 0 {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
            if dist[w as usize] == dist[v as usize] + 1 {
                sigma[w as usize] += sigma[v as usize];
                preds[w as usize].push(v);
            }
        }
    }
    ShortestPaths {
        order,
        sigma,
        dist,
        preds,
    }
}

/// Directed betweenness with unit edge lengths, unnormalised, loops ignored.
pub fn betweenness(graph: &Digraph) -> Vec<f64> {
    let g = graph.skeleton();
    let n = g.node_count();
    let sources: Vec<u32> = (0..n as u32).collect();
    chunked_sum(&sources, n, |&s, acc| {
        let sp = bfs_paths(&g, s, true, None);
        let mut delta = vec![0.0; n];
        for &w in sp.order.iter().rev() {
            for &v in &sp.preds[w as usize] {
                delta[v as usize] +=
                    sp.sigma[v as usize] / sp.sigma[w as usize] * (1.0 + delta[w as usize]);
            }
            if w != s {
                acc[w as usize] += delta[w as usize];
            }
        }
    })
}

/// Harmonic closeness over incoming paths: `Σ_{u ≠ v} 1 / d(u, v)`.
pub fn closeness(graph: &Digraph) -> Vec<f64> {
    let g = graph.skeleton();
    (0..g.node_count() as u32)
        .into_par_iter()
        .map(|v| {
            let sp = bfs_paths(&g, v, false, None);
            // summed in BFS order, i.e. by increasing distance then discovery
            sp.order
                .iter()
                .skip(1)
                .map(|&u| 1.0 / sp.dist[u as usize] as f64)
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankOptions {
    pub damping: f64,
    /// L1 change between iterations at which iteration stops.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tol: 1e-10,
            max_iterations: 10_000,
        }
    }
}

/// Weighted PageRank; mass of nodes without out-weight is spread uniformly.
pub fn pagerank(graph: &Digraph, opts: PageRankOptions) -> Result<Vec<f64>> {
    let n = graph.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let strength: Vec<f64> = (0..n as u32)
        .map(|u| graph.out_edges(u).iter().map(|e| e.1).sum())
        .collect();
    // incoming (source, transition probability), ascending by source
    let mut incoming: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for (a, b, w) in graph.edges() {
        if strength[a as usize] > 0.0 {
            incoming[b as usize].push((a, w / strength[a as usize]));
        }
    }
    let dangling: Vec<usize> = (0..n).filter(|&u| strength[u] <= 0.0).collect();

    let d = opts.damping;
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let dangling_mass: f64 = dangling.iter().map(|&u| rank[u]).sum();
        let base = (1.0 - d) / nf + d * dangling_mass / nf;
        let next: Vec<f64> = incoming
            .par_iter()
            .map(|ins| base + d * ins.iter().map(|&(a, p)| rank[a as usize] * p).sum::<f64>())
            .collect();
        residual = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        rank = next;
        if residual < opts.tol {
            let total: f64 = rank.iter().sum();
            return Ok(rank.into_iter().map(|r| r / total).collect());
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        residual,
    })
}
