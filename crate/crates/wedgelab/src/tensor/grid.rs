use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Quadrature grid on the rapidity line: composite Gauss–Legendre on [-Q_max, Q_max].
#[derive(Clone, Debug, PartialEq)]
pub struct RapidityGrid<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    qmax: T,
    breaks: Vec<T>,
    counts: Vec<usize>,
}

impl<T: Real> RapidityGrid<T> {
    pub const DEFAULT_NODES: usize = 32;
    pub const DEFAULT_QMAX: f64 = 6.0;

    /// Single-panel Gauss–Legendre rule with `g` nodes on [-qmax, qmax].
    pub fn gauss_legendre(g: usize, qmax: T) -> Result<Self> {
        Self::composite(&[-qmax, qmax], &[g])
    }

    /// Default grid: 32 nodes on [-6, 6].
    pub fn standard() -> Self {
        Self::gauss_legendre(Self::DEFAULT_NODES, lit(Self::DEFAULT_QMAX)).expect("default grid")
    }

    /// Composite rule: panel `k` spans `[breaks[k], breaks[k+1]]` and carries `counts[k]` nodes.
    /// The outer breakpoints must be symmetric, `breaks[0] = -breaks[last]`.
    pub fn composite(breaks: &[T], counts: &[usize]) -> Result<Self> {
        if breaks.len() < 2 || counts.len() + 1 != breaks.len() {
            return Err(Error::Structural("composite grid needs one count per panel".into()));
        }
        if counts.iter().any(|&n| n == 0) {
            return Err(Error::param("grid.nodes", "every panel needs at least one node"));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::param("grid.breaks", "breakpoints must be finite and strictly increasing"));
        }
        let qmax = *breaks.last().unwrap();
        if !(qmax > T::zero()) || (breaks[0] + qmax).abs() > qmax * lit(1e-12) {
            return Err(Error::param("grid.qmax", "grid must span a symmetric interval [-qmax, qmax] with qmax > 0"));
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (k, &n) in counts.iter().enumerate() {
            let (a, b) = (breaks[k], breaks[k + 1]);
            let half = (b - a) / lit(2.0);
            let mid = (a + b) / lit(2.0);
            let (x, w) = gauss_legendre_unit(n);
            for (xi, wi) in x.into_iter().zip(w) {
                nodes.push(mid + half * lit(xi));
                weights.push(half * lit(wi));
            }
        }
        Ok(RapidityGrid { nodes, weights, qmax, breaks: breaks.to_vec(), counts: counts.to_vec() })
    }

    /// One node at q = 0 with unit weight: the trivial grid used for purely internal legs.
    pub fn point() -> Self {
        RapidityGrid {
            nodes: vec![T::zero()],
            weights: vec![T::one()],
            qmax: T::zero(),
            breaks: vec![],
            counts: vec![1],
        }
    }

    /// Same panel layout with every panel's node count doubled.
    pub fn refined(&self) -> Result<Self> {
        if self.breaks.is_empty() {
            return Err(Error::Structural("the point grid cannot be refined".into()));
        }
        let counts: Vec<usize> = self.counts.iter().map(|n| 2 * n).collect();
        Self::composite(&self.breaks, &counts)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn qmax(&self) -> T {
        self.qmax
    }

    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Evenly strided subset of node indices, at most `max` of them.
    pub fn sample_indices(&self, max: usize) -> Vec<usize> {
        let n = self.len();
        if n <= max {
            return (0..n).collect();
        }
        (0..max).map(|i| i * (n - 1) / (max - 1).max(1)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_rule_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre_unit(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn default_grid_invariants() {
        let g = RapidityGrid::<f64>::standard();
        assert_eq!(g.len(), 32);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!(g.weights().iter().all(|&w| w > 0.0));
        let s: f64 = g.weights().iter().sum();
        assert!((s - 12.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(RapidityGrid::<f64>::gauss_legendre(0, 6.0).is_err());
        assert!(RapidityGrid::<f64>::gauss_legendre(8, -1.0).is_err());
        assert!(RapidityGrid::<f64>::composite(&[-6.0, 1.0, 0.5, 6.0], &[4, 4, 4]).is_err());
    }
}
