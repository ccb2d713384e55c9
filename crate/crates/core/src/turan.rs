//! Minimum number of edges to delete from a complete graph so that its clique
//! number drops to a target value.
//!
//! Deleting the edges inside the parts of a balanced complete multipartite
//! graph is optimal, so the count is closed form: split `n` vertices into `i`
//! parts of sizes `α-1` and `α` with `α = ⌈n/i⌉`, and delete every edge
//! inside a part.

/// Shape of the balanced partition used by [`gamma_clq`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TuranParams {
    pub n: u64,
    pub i: u64,
    /// Size of the larger parts, `⌈n/i⌉`.
    pub alpha: u64,
    /// Number of parts of size `alpha - 1`.
    pub small_parts: u64,
    /// Number of parts of size `alpha`.
    pub large_parts: u64,
}

impl TuranParams {
    /// `None` when `i >= n` (nothing to delete). Panics if `i == 0`.
    pub fn new(n: u64, i: u64) -> Option<Self> {
        assert!(i >= 1, "clique bound must be at least 1");
        if i >= n {
            return None;
        }
        let alpha = n.div_ceil(i);
        let small_parts = i * alpha - n;
        let large_parts = (n - small_parts * (alpha - 1)) / alpha;
        Some(TuranParams {
            n,
            i,
            alpha,
            small_parts,
            large_parts,
        })
    }

    pub fn deletions(&self) -> u64 {
        self.small_parts * pairs(self.alpha - 1) + self.large_parts * pairs(self.alpha)
    }
}

#[inline]
fn pairs(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// γ_clq(n, i): fewest edges to delete from K_n so that ω ≤ i.
///
/// Zero when `i >= n`. Panics if `i == 0`.
pub fn gamma_clq(n: usize, i: usize) -> u64 {
    TuranParams::new(n as u64, i as u64).map_or(0, |t| t.deletions())
}

/// Smallest `p` in `1..=p_max` with `Σ γ_clq(s, p) ≤ k` over `sizes`, found by
/// binary search (the sum is non-increasing in `p`). Returns `p_max` when no
/// value qualifies.
pub fn gamma_clq_inverse_le(sizes: &[usize], k: u64, p_max: usize) -> usize {
    assert!(p_max >= 1);
    let total = |p: usize| -> u64 { sizes.iter().map(|&s| gamma_clq(s, p)).sum() };
    let (mut lo, mut hi) = (1, p_max);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if total(mid) <= k {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}
