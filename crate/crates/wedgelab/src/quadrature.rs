//! One-dimensional quadrature: fixed Gauss–Legendre rules, adaptive Gauss–Kronrod and contour integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::{c, czero, lit, to_f64, Real, C};
use crate::tensor::gauss_legendre_unit;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral<T> {
    pub value: C<T>,
    /// Estimated absolute error.
    pub error: f64,
    /// Estimate of ∫|f|, used for relative targets.
    pub l1: f64,
    pub evaluations: usize,
}

/// Settings for [`adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOpts {
    /// Target error relative to the ∫|f| estimate.
    pub rel_tol: f64,
    /// Absolute floor below which the error is accepted regardless.
    pub abs_tol: f64,
    pub max_evaluations: usize,
}

impl Default for AdaptiveOpts {
    fn default() -> Self {
        AdaptiveOpts { rel_tol: 1e-10, abs_tol: 1e-300, max_evaluations: 1 << 15 }
    }
}

impl AdaptiveOpts {
    /// Default options with the relative target clamped above the working precision.
    pub fn for_type<T: Real>() -> Self {
        let eps = to_f64(T::epsilon());
        AdaptiveOpts { rel_tol: f64::max(1e-10, 50.0 * eps), ..Default::default() }
    }
}

struct Segment<T> {
    a: T,
    b: T,
    value: C<T>,
    error: f64,
    l1: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<T: Real>(f: &mut impl FnMut(T) -> Result<C<T>>, a: T, b: T) -> Result<Segment<T>> {
    let half = (b - a) / lit(2.0);
    let mid = (a + b) / lit(2.0);
    let fc = f(mid)?;
    let mut kron = fc * lit::<T>(WGK[7]);
    let mut gauss = fc * lit::<T>(WG[3]);
    let mut l1 = to_f64(fc.norm()) * WGK[7];
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * lit(x);
        let f1 = f(mid - dx)?;
        let f2 = f(mid + dx)?;
        kron = kron + (f1 + f2) * lit::<T>(w);
        l1 += (to_f64(f1.norm()) + to_f64(f2.norm())) * w;
        if k % 2 == 1 {
            gauss = gauss + (f1 + f2) * lit::<T>(WG[k / 2]);
        }
    }
    let value = kron * half;
    let h = to_f64(half.abs());
    let error = to_f64((kron - gauss).norm()) * h;
    if !error.is_finite() {
        return Err(Error::Numerical { what: "adaptive quadrature (non-finite integrand)".into(), achieved: f64::INFINITY });
    }
    Ok(Segment { a, b, value, error, l1: l1 * h })
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of a complex integrand over [a, b].
pub fn adaptive<T: Real>(
    mut f: impl FnMut(T) -> Result<C<T>>,
    a: T,
    b: T,
    opts: AdaptiveOpts,
) -> Result<Integral<T>> {
    adaptive_breaks(&mut f, &[a, b], opts)
}

/// Adaptive integration starting from the panels given by `breaks`.
pub fn adaptive_breaks<T: Real>(
    f: &mut impl FnMut(T) -> Result<C<T>>,
    breaks: &[T],
    opts: AdaptiveOpts,
) -> Result<Integral<T>> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gk15(f, w[0], w[1])?);
            evaluations += 15;
        }
    }
    loop {
        let value: C<T> = heap.iter().fold(czero(), |acc, s| acc + s.value);
        let error: f64 = heap.iter().map(|s| s.error).sum();
        let l1: f64 = heap.iter().map(|s| s.l1).sum();
        if error <= f64::max(opts.rel_tol * l1, opts.abs_tol) {
            return Ok(Integral { value, error, l1, evaluations });
        }
        if evaluations + 30 > opts.max_evaluations {
            let achieved = if l1 > 0.0 { error / l1 } else { error };
            return Err(Error::Numerical { what: "adaptive quadrature".into(), achieved });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = (worst.a + worst.b) / lit(2.0);
        if !(mid > worst.a && mid < worst.b) {
            let achieved = if l1 > 0.0 { error / l1 } else { error };
            return Err(Error::Numerical { what: "adaptive quadrature (interval underflow)".into(), achieved });
        }
        heap.push(gk15(f, worst.a, mid)?);
        heap.push(gk15(f, mid, worst.b)?);
        evaluations += 30;
    }
}

/// Fixed `n`-point Gauss–Legendre rule on [a, b].
pub fn gauss_legendre<T: Real>(n: usize, a: T, b: T) -> Vec<(T, T)> {
    let (x, w) = gauss_legendre_unit(n);
    let half = (b - a) / lit(2.0);
    let mid = (a + b) / lit(2.0);
    x.into_iter().zip(w).map(|(x, w)| (mid + half * lit(x), half * lit(w))).collect()
}

/// Axis-parallel rectangle in the complex plane.
#[derive(Clone, Copy, Debug)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rectangle {
    /// The analyticity test rectangle: Re ∈ [−4, 4], Im ∈ [0.1π, 0.9π].
    pub fn strip_default() -> Self {
        let pi = std::f64::consts::PI;
        Rectangle { re_min: -4.0, re_max: 4.0, im_min: 0.1 * pi, im_max: 0.9 * pi }
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * ((self.re_max - self.re_min) + (self.im_max - self.im_min))
    }
}

/// Outcome of a contour integration of a vector-valued function.
#[derive(Clone, Debug)]
pub struct ContourResult {
    /// |∮ g_i dz| per component.
    pub integrals: Vec<f64>,
    /// max |g_i| over all contour nodes and components.
    pub max_abs: f64,
    pub perimeter: f64,
    pub samples: usize,
}

impl ContourResult {
    /// max_i |∮ g_i| / (perimeter · max|g|); zero when g vanishes on the contour.
    pub fn relative_residual(&self) -> f64 {
        let num = self.integrals.iter().cloned().fold(0.0, f64::max);
        if !num.is_finite() || !self.max_abs.is_finite() {
            return f64::INFINITY;
        }
        if self.max_abs == 0.0 {
            return 0.0;
        }
        num / (self.perimeter * self.max_abs)
    }
}

/// Counter-clockwise contour integral of `g` around `rect` with `n` Gauss–Legendre nodes per edge.
pub fn contour_integral<T: Real>(
    mut g: impl FnMut(C<T>) -> Result<Vec<C<T>>>,
    rect: Rectangle,
    n: usize,
) -> Result<ContourResult> {
    let corners = [
        (rect.re_min, rect.im_min),
        (rect.re_max, rect.im_min),
        (rect.re_max, rect.im_max),
        (rect.re_min, rect.im_max),
    ];
    let (x, w) = gauss_legendre_unit(n);
    let mut acc: Vec<C<T>> = Vec::new();
    let mut max_abs = 0.0f64;
    for e in 0..4 {
        let (x0, y0) = corners[e];
        let (x1, y1) = corners[(e + 1) % 4];
        let dz = c::<T>(lit((x1 - x0) / 2.0), lit((y1 - y0) / 2.0));
        for (xi, wi) in x.iter().zip(&w) {
            let t = (xi + 1.0) / 2.0;
            let z = c::<T>(lit(x0 + t * (x1 - x0)), lit(y0 + t * (y1 - y0)));
            let vals = g(z)?;
            if acc.is_empty() {
                acc = vec![czero(); vals.len()];
            }
            if vals.len() != acc.len() {
                return Err(Error::Structural("contour integrand changed length".into()));
            }
            for (a, v) in acc.iter_mut().zip(&vals) {
                max_abs = max_abs.max(to_f64(v.norm()));
                if !(v.re.is_finite() && v.im.is_finite()) {
                    max_abs = f64::INFINITY;
                }
                *a = *a + *v * dz * lit::<T>(*wi);
            }
        }
    }
    Ok(ContourResult {
        integrals: acc.iter().map(|z| to_f64(z.norm())).collect(),
        max_abs,
        perimeter: rect.perimeter(),
        samples: 4 * n,
    })
}
