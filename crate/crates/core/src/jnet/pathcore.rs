//! Path-Core scores.
//!
//! For every edge `(j, k)` of the unweighted skeleton the edge is removed and
//! the shortest `j → k` detours in what remains are counted; node `i` earns
//! the fraction of those detours passing through it. A node's score is its
//! total over all edges not incident to it, divided by the edge count, so it
//! lies in `[0, 1]` and reads as the chance that a randomly removed edge is
//! bypassed through that node. Nodes of a dense core sit on many such
//! detours; periphery nodes sit on few.

use super::centrality::{bfs_paths, chunked_sum};
use super::graph::Digraph;

pub fn pathcore(graph: &Digraph) -> Vec<f64> {
    let g = graph.skeleton();
    let n = g.node_count();
    let edges: Vec<(u32, u32)> = g.edges().collect();
    if edges.is_empty() {
        return vec![0.0; n];
    }
    let totals = chunked_sum(&edges, n, |&(j, k), acc| {
        let from_j = bfs_paths(&g, j, true, Some((j, k)));
        let d = from_j.dist[k as usize];
        if d < 0 {
            return;
        }
        let to_k = bfs_paths(&g, k, false, Some((k, j)));
        let total = from_j.sigma[k as usize];
        for i in 0..n {
            if i == j as usize || i == k as usize {
                continue;
            }
            let (df, db) = (from_j.dist[i], to_k.dist[i]);
            if df >= 0 && db >= 0 && df + db == d {
                acc[i] += from_j.sigma[i] * to_k.sigma[i] / total;
            }
        }
    });
    let m = edges.len() as f64;
    totals.into_iter().map(|t| t / m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected(n: usize, edges: &[(u32, u32)]) -> Digraph {
        Digraph::from_edges(
            n,
            edges.iter().flat_map(|&(a, b)| [(a, b, 1.0), (b, a, 1.0)]),
        )
    }

    #[test]
    fn clique_with_pendants() {
        // 0,1,2 form a triangle; 3,4,5 hang off 0,1,2 respectively
        let g = undirected(6, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)]);
        let pc = pathcore(&g);
        for core in 0..3 {
            for leaf in 3..6 {
                assert!(pc[core] > pc[leaf], "{pc:?}");
            }
        }
    }

    #[test]
    fn isolated_nodes_score_zero() {
        assert_eq!(pathcore(&Digraph::new(4)), vec![0.0; 4]);
    }

    #[test]
    fn scores_are_fractions() {
        let g = undirected(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (2, 4)]);
        assert!(pathcore(&g).iter().all(|&s| (0.0..=1.0).contains(&s)));
    }

    #[test]
    fn loops_are_ignored() {
        let mut g = undirected(3, &[(0, 1), (1, 2), (0, 2)]);
        let before = pathcore(&g);
        g.add_edge(1, 1, 5.0);
        assert_eq!(pathcore(&g), before);
    }
}
