//! Panel Gauss-Legendre quadrature.
//!
//! The weak-form machinery integrates piecewise-analytic functions whose only
//! non-smooth points are known kink lines (the peakon crest `x = ct`, the
//! convolution split `y = x`). Splitting panels at those points restores
//! spectral accuracy, so a fixed 32-node rule per panel is enough for
//! near-machine-precision integrals.

/// A Gauss-Legendre rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Nodes per panel used throughout the weak-form code.
pub const PANEL_NODES: usize = 32;

impl GaussLegendre {
    /// Compute the `n`-point rule by Newton iteration on the Legendre
    /// polynomial `P_n` (initial guesses from the Chebyshev asymptotic).
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "need at least a 2-point rule");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over `[a, b]` with a single panel.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Integrate `f` over `[a, b]` split at the sorted breakpoints that fall
    /// strictly inside, each resulting piece further divided into
    /// `subdivisions` equal panels.
    pub fn integrate_split<F: Fn(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        breakpoints: &[f64],
        subdivisions: usize,
        f: F,
    ) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut edges = vec![a];
        let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        edges.extend(pts);
        edges.push(b);

        let sub = subdivisions.max(1);
        let mut acc = 0.0;
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let h = (hi - lo) / sub as f64;
            for s in 0..sub {
                acc += self.integrate(lo + s as f64 * h, lo + (s + 1) as f64 * h, &f);
            }
        }
        acc
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let gl = GaussLegendre::new(8);
        // int_{-1}^{1} x^k dx = 2/(k+1) for even k, 0 for odd k.
        for k in 0..=15usize {
            let got = gl.integrate(-1.0, 1.0, |x| x.powi(k as i32));
            let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "degree {k}: {got} vs {want}");
        }
    }

    #[test]
    fn exponential_on_shifted_interval() {
        let gl = GaussLegendre::new(PANEL_NODES);
        let got = gl.integrate(0.0, 1.0, f64::exp);
        assert!((got - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn split_handles_kinks() {
        let gl = GaussLegendre::new(PANEL_NODES);
        // int_{-1}^{2} |x| dx = 1/2 + 2 = 5/2; exact only if split at 0.
        let got = gl.integrate_split(-1.0, 2.0, &[0.0], 1, f64::abs);
        assert!((got - 2.5).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [2, 5, 16, 32, 48] {
            let gl = GaussLegendre::new(n);
            let total: f64 = gl.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n = {n}");
        }
    }
}
