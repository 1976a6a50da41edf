//! Binomial averaging weights `C(n, j) / 2^n` shared by the matrix binomial
//! iterate and the shift weight calculus.
//!
//! For `n <= 62` the coefficients are built with exact 64-bit integer
//! arithmetic and scaled by the exact power of two. Beyond that the full
//! coefficients overflow, so the weights are restricted to a window of twelve
//! standard deviations (`sigma = sqrt(n)/2`) around `n/2` - the excluded tail
//! mass is below 1e-30 - and computed by the stable center-out ratio
//! recurrence `u_{j+1} = u_j (n-j)/(j+1)`, normalized over the window. That
//! evaluates the same log-domain weights `exp(ln C(n,j) - n ln 2)` without
//! the cancellation of large log-gamma terms.

/// Largest `n` for which `C(n, j)` fits exactly in 64-bit integers.
pub const EXACT_BINOMIAL_MAX_N: usize = 62;

/// Normalized binomial averaging weights on a contiguous window.
///
/// `weights[k]` is the weight of `j = j_lo + k`; the weights sum to 1 (up to
/// rounding) and `order` lists window indices by descending weight, the
/// summation order used by consumers.
#[derive(Debug, Clone)]
pub struct BinomialWindow {
    pub n: usize,
    pub j_lo: usize,
    pub weights: Vec<f64>,
    pub order: Vec<usize>,
}

impl BinomialWindow {
    pub fn j_hi(&self) -> usize {
        self.j_lo + self.weights.len() - 1
    }
}

/// Exact binomial coefficient for `n <= 62` (panics above).
pub fn binomial_exact(n: usize, j: usize) -> u64 {
    assert!(n <= EXACT_BINOMIAL_MAX_N, "binomial_exact needs n <= {EXACT_BINOMIAL_MAX_N}");
    if j > n {
        return 0;
    }
    let j = j.min(n - j);
    let mut acc: u128 = 1;
    for k in 0..j {
        acc = acc * (n - k) as u128 / (k + 1) as u128;
    }
    acc as u64
}

fn descending_order(weights: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        weights[b]
            .partial_cmp(&weights[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    order
}

/// Weights `C(n, j) / 2^n` over the supported window.
pub fn mean_pmf_window(n: usize) -> BinomialWindow {
    if n <= EXACT_BINOMIAL_MAX_N {
        let scale = (-(n as f64)).exp2();
        let weights: Vec<f64> = (0..=n).map(|j| binomial_exact(n, j) as f64 * scale).collect();
        let order = descending_order(&weights);
        return BinomialWindow { n, j_lo: 0, weights, order };
    }
    let sigma = (n as f64).sqrt() / 2.0;
    let half = (12.0 * sigma).ceil() as usize;
    let center = n / 2;
    let j_lo = center.saturating_sub(half);
    let j_hi = (center + half).min(n);
    let len = j_hi - j_lo + 1;
    let mut u = vec![0.0f64; len];
    u[center - j_lo] = 1.0;
    for j in center..j_hi {
        u[j + 1 - j_lo] = u[j - j_lo] * (n - j) as f64 / (j + 1) as f64;
    }
    for j in (j_lo..center).rev() {
        // C(n, j) = C(n, j+1) * (j+1) / (n-j)
        u[j - j_lo] = u[j + 1 - j_lo] * (j + 1) as f64 / (n - j) as f64;
    }
    let total: f64 = u.iter().sum();
    for w in &mut u {
        *w /= total;
    }
    let order = descending_order(&u);
    BinomialWindow { n, j_lo, weights: u, order }
}
