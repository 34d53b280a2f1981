/// A weighted directed graph on nodes `0..n`; parallel edges are merged and
/// self-loops are allowed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Digraph {
    out: Vec<Vec<(u32, f64)>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Self {
            out: vec![Vec::new(); n],
        }
    }

    /// Builds a graph, summing weights of repeated `(from, to)` pairs.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32, f64)>) -> Self {
        let mut g = Self::new(n);
        for (a, b, w) in edges {
            g.add_edge(a, b, w);
        }
        g
    }

    pub fn add_edge(&mut self, from: u32, to: u32, weight: f64) {
        let row = &mut self.out[from as usize];
        match row.binary_search_by_key(&to, |e| e.0) {
            Ok(i) => row[i].1 += weight,
            Err(i) => row.insert(i, (to, weight)),
        }
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Outgoing `(target, weight)` pairs of `node`, ascending by target.
    pub fn out_edges(&self, node: u32) -> &[(u32, f64)] {
        &self.out[node as usize]
    }

    pub fn weight(&self, from: u32, to: u32) -> f64 {
        let row = &self.out[from as usize];
        row.binary_search_by_key(&to, |e| e.0)
            .map_or(0.0, |i| row[i].1)
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |&(b, w)| (a as u32, b, w)))
    }

    pub fn in_strength(&self, node: u32) -> f64 {
        self.edges().filter(|e| e.1 == node).map(|e| e.2).sum()
    }

    /// Unweighted adjacency without self-loops: (successors, predecessors).
    pub(crate) fn skeleton(&self) -> Skeleton {
        let n = self.node_count();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (a, b, w) in self.edges() {
            if a != b && w > 0.0 {
                succ[a as usize].push(b);
                pred[b as usize].push(a);
            }
        }
        Skeleton { succ, pred }
    }
}

pub(crate) struct Skeleton {
    pub succ: Vec<Vec<u32>>,
    pub pred: Vec<Vec<u32>>,
}

impl Skeleton {
    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&b| (a as u32, b)))
    }
}
