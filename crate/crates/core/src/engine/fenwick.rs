//! Fenwick (binary indexed) tree over nonnegative per-item weights.
//!
//! Supports point assignment, total weight, and sampling an index with
//! probability proportional to its weight, all in O(log n). This is the
//! updatable structure behind the rate-driven sampler: flips change O(deg)
//! weights and each event samples once.

/// Prefix-summable weight array with O(log n) updates and weighted
/// sampling.
pub struct RateTree {
    /// Current weight per leaf, kept exactly (the tree nodes accumulate
    /// floating-point increments and are only used for navigation).
    values: Vec<f64>,
    /// 1-based Fenwick array of partial sums.
    tree: Vec<f64>,
    /// Number of leaves with a strictly positive weight; the exact
    /// absorbed test, immune to floating-point dust in `tree`.
    active: usize,
}

impl RateTree {
    pub fn new(n: usize) -> Self {
        RateTree {
            values: vec![0.0; n],
            tree: vec![0.0; n + 1],
            active: 0,
        }
    }

    /// Builds with the given weights in O(n). Nodes are finalized in
    /// ascending index order: every contribution to node `j` comes from
    /// smaller indices, so pushing `tree[j]` to its parent once is enough.
    pub fn with_weights(weights: &[f64]) -> Self {
        let n = weights.len();
        let mut tree = vec![0.0; n + 1];
        for j in 1..=n {
            let w = weights[j - 1];
            debug_assert!(w >= 0.0 && w.is_finite());
            tree[j] += w;
            let parent = j + (j & j.wrapping_neg());
            if parent <= n {
                let subtotal = tree[j];
                tree[parent] += subtotal;
            }
        }
        RateTree {
            values: weights.to_vec(),
            tree,
            active: weights.iter().filter(|&&w| w > 0.0).count(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Assigns weight `w` to item `i`.
    #[inline]
    pub fn set(&mut self, i: usize, w: f64) {
        debug_assert!(w >= 0.0 && w.is_finite(), "weight {w}");
        let old = self.values[i];
        if old == w {
            return;
        }
        self.active = self.active + (w > 0.0) as usize - (old > 0.0) as usize;
        self.values[i] = w;
        let delta = w - old;
        let n = self.tree.len() - 1;
        let mut j = i + 1;
        while j <= n {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    /// Sum of all weights. Subject to ordinary floating-point accumulation
    /// error; use [`RateTree::active`] for exact emptiness.
    pub fn total(&self) -> f64 {
        let mut sum = 0.0;
        let mut j = self.tree.len() - 1;
        while j > 0 {
            sum += self.tree[j];
            j &= j - 1;
        }
        sum
    }

    /// Number of items with strictly positive weight.
    pub fn active(&self) -> usize {
        self.active
    }

    /// Index of the item whose cumulative weight interval contains
    /// `target` (in `[0, total)`). Requires at least one positive weight.
    /// Floating-point drift can land the descent on a zero-weight leaf
    /// with vanishing probability; the result is then bumped to the next
    /// active leaf so a true rate of zero can never fire.
    pub fn sample(&self, target: f64) -> usize {
        debug_assert!(self.active > 0, "sampling from an empty tree");
        let n = self.tree.len() - 1;
        let mut pos = 0usize; // 1-based node before the descent step
        let mut remaining = target;
        let mut half = n.next_power_of_two();
        while half > 0 {
            let next = pos + half;
            if next <= n && self.tree[next] < remaining {
                remaining -= self.tree[next];
                pos = next;
            }
            half >>= 1;
        }
        // `pos` is the count of leaves whose cumulative sum stayed below
        // target, i.e. the 0-based sampled index.
        let mut i = pos.min(n - 1);
        while self.values[i] == 0.0 {
            i = (i + 1) % n;
        }
        i
    }
}
