/// Prefix sums over integer weights with weighted sampling.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    pub(crate) fn new(weights: &[u64]) -> Self {
        let n = weights.len();
        let mut tree = vec![0; n + 1];
        for (i, &w) in weights.iter().enumerate() {
            tree[i + 1] += w;
            let parent = (i + 1) + ((i + 1) & (i + 1).wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i + 1];
            }
        }
        Self { tree }
    }

    pub(crate) fn add(&mut self, index: usize, delta: i64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] = self.tree[i].wrapping_add_signed(delta);
            i += i & i.wrapping_neg();
        }
    }

    pub(crate) fn total(&self) -> u64 {
        let mut i = self.tree.len() - 1;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    /// Smallest index whose inclusive prefix sum exceeds `u` (`u < total`).
    pub(crate) fn find(&self, mut u: u64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= u {
                pos = next;
                u -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_search_matches_linear_scan() {
        let w = [3u64, 0, 5, 1, 2, 7, 0, 4];
        let mut f = Fenwick::new(&w);
        assert_eq!(f.total(), 22);
        let linear = |w: &[u64], u: u64| {
            let mut acc = 0;
            w.iter().position(|&x| {
                acc += x;
                acc > u
            })
        };
        for u in 0..22 {
            assert_eq!(Some(f.find(u)), linear(&w, u));
        }
        f.add(1, 2);
        f.add(5, -7);
        let w2 = [3u64, 2, 5, 1, 2, 0, 0, 4];
        assert_eq!(f.total(), 17);
        for u in 0..17 {
            assert_eq!(Some(f.find(u)), linear(&w2, u));
        }
    }
}
