use std::fmt;
use std::sync::Arc;

use super::vector::{OneParticleVector, SupportCertificate, VectorDomain};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, AdaptiveOpts};
use crate::scalar::{c, cr, czero, i_unit, lit, to_f64, Real, C};

/// Smooth bump profile exp(−1/(1−x²)) on (−1, 1).
pub fn bump_profile<T: Real>(x: T) -> T {
    let one = T::one();
    if x.abs() >= one {
        return T::zero();
    }
    (-(one / (one - x * x))).exp()
}

pub type RealLineFn<T> = Arc<dyn Fn(T) -> C<T> + Send + Sync>;

/// Compactly supported test function on ℝ.
#[derive(Clone)]
pub enum TestFunction<T> {
    /// amplitude · exp(−1/(1−x²)) with x = (t − center)/halfwidth.
    Bump { center: T, halfwidth: T, amplitude: T },
    /// Arbitrary function vanishing outside [lo, hi]. Complex values are rejected by the transforms.
    Custom { lo: T, hi: T, f: RealLineFn<T> },
}

impl<T: Real> fmt::Debug for TestFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Bump { center, halfwidth, amplitude } => {
                write!(f, "bump(center={center}, halfwidth={halfwidth}, amplitude={amplitude})")
            }
            TestFunction::Custom { lo, hi, .. } => write!(f, "custom[{lo}, {hi}]"),
        }
    }
}

impl<T: Real> TestFunction<T> {
    pub fn bump(center: T, halfwidth: T, amplitude: T) -> Result<Self> {
        if !(halfwidth > T::zero()) || !halfwidth.is_finite() {
            return Err(Error::param("halfwidth", "must be positive and finite"));
        }
        if !center.is_finite() || !amplitude.is_finite() {
            return Err(Error::param("center", "center and amplitude must be finite"));
        }
        Ok(TestFunction::Bump { center, halfwidth, amplitude })
    }

    /// Bump whose support is exactly [lo, hi].
    pub fn bump_on(lo: T, hi: T) -> Result<Self> {
        let two = lit::<T>(2.0);
        Self::bump((lo + hi) / two, (hi - lo) / two, T::one())
    }

    pub fn custom(lo: T, hi: T, f: impl Fn(T) -> C<T> + Send + Sync + 'static) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::param("support", "need lo < hi"));
        }
        Ok(TestFunction::Custom { lo, hi, f: Arc::new(f) })
    }

    pub fn support(&self) -> (T, T) {
        match self {
            TestFunction::Bump { center, halfwidth, .. } => (*center - *halfwidth, *center + *halfwidth),
            TestFunction::Custom { lo, hi, .. } => (*lo, *hi),
        }
    }

    pub fn eval(&self, t: T) -> C<T> {
        match self {
            TestFunction::Bump { center, halfwidth, amplitude } => {
                cr(*amplitude * bump_profile((t - *center) / *halfwidth))
            }
            TestFunction::Custom { lo, hi, f } => {
                if t < *lo || t > *hi {
                    czero()
                } else {
                    f(t)
                }
            }
        }
    }

    /// Translate by a: t ↦ g(t − a).
    pub fn shifted(&self, a: T) -> Self {
        match self {
            TestFunction::Bump { center, halfwidth, amplitude } => {
                TestFunction::Bump { center: *center + a, halfwidth: *halfwidth, amplitude: *amplitude }
            }
            TestFunction::Custom { lo, hi, f } => {
                let f = f.clone();
                TestFunction::Custom { lo: *lo + a, hi: *hi + a, f: Arc::new(move |t| f(t - a)) }
            }
        }
    }

    /// Pointwise sum; the support is the convex hull.
    pub fn sum(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let (l1, h1) = self.support();
        let (l2, h2) = other.support();
        TestFunction::Custom { lo: l1.min(l2), hi: h1.max(h2), f: Arc::new(move |t| a.eval(t) + b.eval(t)) }
    }

    /// Largest |Im g| relative to max |g| over 257 equispaced support points.
    pub fn imaginary_part_ratio(&self) -> f64 {
        let (lo, hi) = self.support();
        let n = 257;
        let (mut im, mut abs) = (0.0f64, 0.0f64);
        for k in 0..n {
            let t = lo + (hi - lo) * lit::<T>(k as f64 / (n - 1) as f64);
            let v = self.eval(t);
            im = im.max(to_f64(v.im.abs()));
            abs = abs.max(to_f64(v.norm()));
        }
        if abs == 0.0 {
            0.0
        } else {
            im / abs
        }
    }

    fn require_real(&self) -> Result<()> {
        let r = self.imaginary_part_ratio();
        if !(r <= 1e-12) {
            return Err(Error::Domain(format!("test function is not real-valued (|Im|/|g| = {r:.3e})")));
        }
        Ok(())
    }
}

/// Sign of the half-line transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformSign {
    Plus,
    Minus,
}

impl TransformSign {
    fn factor<T: Real>(self) -> T {
        match self {
            TransformSign::Plus => T::one(),
            TransformSign::Minus => -T::one(),
        }
    }
}

/// Rapidities at which a freshly built transform is evaluated so quadrature failures surface early.
pub const TRANSFORM_PROBES: [f64; 3] = [-2.0, 0.0, 2.0];

/// ĝ^±(θ) = ±i e^θ ∫ g(t) e^{i t e^{±θ}} dt, computed by adaptive quadrature at every evaluation.
///
/// The output is entire in θ. A right-supported g with the + sign is recorded in the
/// certificate as a member of the standard subspace.
pub fn half_line_transform<T: Real>(g: &TestFunction<T>, sign: TransformSign) -> Result<OneParticleVector<T>> {
    g.require_real()?;
    let (lo, hi) = g.support();
    let s = sign.factor::<T>();
    let opts = AdaptiveOpts::for_type::<T>();
    let gf = g.clone();
    let label = format!("ĝ{}[{:?}]", if s > T::zero() { "+" } else { "-" }, g);
    let v = OneParticleVector::scalar(VectorDomain::Entire, label, move |z: C<T>| {
        let k = (z * s).exp();
        let integral = adaptive(|t: T| Ok(gf.eval(t) * (i_unit::<T>() * k * t).exp()), lo, hi, opts)?;
        Ok(i_unit::<T>() * s * z.exp() * integral.value)
    })
    .with_certificate(SupportCertificate { lo: to_f64(lo), hi: to_f64(hi), plus: s > T::zero() });
    for &p in &TRANSFORM_PROBES {
        v.eval(0, cr(lit(p)))?;
    }
    Ok(v)
}

pub type PlaneFn<T> = Arc<dyn Fn(T, T) -> C<T> + Send + Sync>;

/// Compactly supported test function on ℝ² with coordinates (a⁰, a¹).
#[derive(Clone)]
pub enum TestFunction2<T> {
    /// amplitude · exp(−1/(1−r²)) with r = |a − center|/radius.
    RadialBump { center: (T, T), radius: T, amplitude: T },
    /// Arbitrary function vanishing outside the box [lo0, hi0] × [lo1, hi1].
    Custom { lo: (T, T), hi: (T, T), f: PlaneFn<T> },
}

impl<T: Real> fmt::Debug for TestFunction2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction2::RadialBump { center, radius, amplitude } => {
                write!(f, "radial_bump(center=({}, {}), radius={radius}, amplitude={amplitude})", center.0, center.1)
            }
            TestFunction2::Custom { lo, hi, .. } => write!(f, "custom[{}, {}]x[{}, {}]", lo.0, hi.0, lo.1, hi.1),
        }
    }
}

impl<T: Real> TestFunction2<T> {
    pub fn radial_bump(center: (T, T), radius: T, amplitude: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::param("radius", "must be positive and finite"));
        }
        Ok(TestFunction2::RadialBump { center, radius, amplitude })
    }

    pub fn custom(lo: (T, T), hi: (T, T), f: impl Fn(T, T) -> C<T> + Send + Sync + 'static) -> Result<Self> {
        if !(lo.0 < hi.0 && lo.1 < hi.1) {
            return Err(Error::param("support", "need lo < hi in both coordinates"));
        }
        Ok(TestFunction2::Custom { lo, hi, f: Arc::new(f) })
    }

    pub fn eval(&self, a0: T, a1: T) -> C<T> {
        match self {
            TestFunction2::RadialBump { center, radius, amplitude } => {
                let (x, y) = ((a0 - center.0) / *radius, (a1 - center.1) / *radius);
                let r = (x * x + y * y).sqrt();
                cr(*amplitude * bump_profile(r))
            }
            TestFunction2::Custom { lo, hi, f } => {
                if a0 < lo.0 || a0 > hi.0 || a1 < lo.1 || a1 > hi.1 {
                    czero()
                } else {
                    f(a0, a1)
                }
            }
        }
    }

    /// Range of a⁰ over the support.
    pub fn outer_support(&self) -> (T, T) {
        match self {
            TestFunction2::RadialBump { center, radius, .. } => (center.0 - *radius, center.0 + *radius),
            TestFunction2::Custom { lo, hi, .. } => (lo.0, hi.0),
        }
    }

    /// Range of a¹ over the support at fixed a⁰.
    pub fn inner_support(&self, a0: T) -> (T, T) {
        match self {
            TestFunction2::RadialBump { center, radius, .. } => {
                let dx = a0 - center.0;
                let h = (*radius * *radius - dx * dx).max(T::zero()).sqrt();
                (center.1 - h, center.1 + h)
            }
            TestFunction2::Custom { lo, hi, .. } => (lo.1, hi.1),
        }
    }

    /// Whether the support lies in the right wedge |a⁰| < a¹.
    pub fn in_right_wedge(&self) -> bool {
        match self {
            TestFunction2::RadialBump { center, radius, .. } => {
                // distance from the center to each boundary line a¹ = ±a⁰ exceeds the radius
                let s2 = lit::<T>(std::f64::consts::SQRT_2);
                center.1 - center.0.abs() > *radius * s2
            }
            TestFunction2::Custom { lo, hi, .. } => {
                let m = lo.0.abs().max(hi.0.abs());
                lo.1 > m
            }
        }
    }

    /// Translate by a: x ↦ f(x − a).
    pub fn shifted(&self, a: (T, T)) -> Self {
        match self {
            TestFunction2::RadialBump { center, radius, amplitude } => TestFunction2::RadialBump {
                center: (center.0 + a.0, center.1 + a.1),
                radius: *radius,
                amplitude: *amplitude,
            },
            TestFunction2::Custom { lo, hi, f } => {
                let f = f.clone();
                TestFunction2::Custom {
                    lo: (lo.0 + a.0, lo.1 + a.1),
                    hi: (hi.0 + a.0, hi.1 + a.1),
                    f: Arc::new(move |x, y| f(x - a.0, y - a.1)),
                }
            }
        }
    }
}

/// Mass-shell momentum (m cosh θ, m sinh θ).
pub fn mass_shell<T: Real>(theta: C<T>, m: T) -> (C<T>, C<T>) {
    (theta.cosh() * m, theta.sinh() * m)
}

/// Minkowski product p·a = p⁰a⁰ − p¹a¹.
pub fn minkowski<T: Real>(p: (C<T>, C<T>), a: (T, T)) -> C<T> {
    p.0 * a.0 - p.1 * a.1
}

/// f^±(θ) = (1/2π) ∫ d²a f(a) e^{±i p_m(θ)·a}, by nested adaptive quadrature.
///
/// Returns (f⁺, f⁻), both entire in θ.
pub fn wedge_transform<T: Real>(
    f: &TestFunction2<T>,
    m: T,
) -> Result<(OneParticleVector<T>, OneParticleVector<T>)> {
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::param("mass", format!("must be positive and finite, got {m}")));
    }
    let build = |sign: T| {
        let f = f.clone();
        let opts = AdaptiveOpts::for_type::<T>();
        let label = format!("{:?}{}", f, if sign > T::zero() { "+" } else { "-" });
        OneParticleVector::scalar(VectorDomain::Entire, label, move |theta: C<T>| {
            let p = mass_shell(theta, m);
            let (lo, hi) = f.outer_support();
            let outer = adaptive(
                |a0: T| {
                    let (l1, h1) = f.inner_support(a0);
                    if !(h1 > l1) {
                        return Ok(czero());
                    }
                    let inner = adaptive(
                        |a1: T| Ok(f.eval(a0, a1) * (i_unit::<T>() * sign * minkowski(p, (a0, a1))).exp()),
                        l1,
                        h1,
                        opts,
                    )?;
                    Ok(inner.value)
                },
                lo,
                hi,
                opts,
            )?;
            Ok(outer.value / T::TAU())
        })
    };
    let plus = build(T::one());
    let minus = build(-T::one());
    plus.eval(0, czero())?;
    Ok((plus, minus))
}

/// R_m f(θ) = m e^{−θ} f(m e^{−θ}) for f on (0, ∞). Defined on the real line.
///
/// Where f vanishes the product is taken as zero, so overflow of e^{−θ} does not produce NaN.
pub fn massive_intertwine<T: Real>(
    f: impl Fn(T) -> C<T> + Send + Sync + 'static,
    m: T,
) -> Result<OneParticleVector<T>> {
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::param("mass", format!("must be positive and finite, got {m}")));
    }
    Ok(OneParticleVector::scalar(VectorDomain::RealLine, format!("R_{m}f"), move |z: C<T>| {
        Ok(intertwine_at(&f, m, z.re))
    }))
}

fn intertwine_at<T: Real>(f: &impl Fn(T) -> C<T>, m: T, theta: T) -> C<T> {
    let p = m * (-theta).exp();
    let v = f(p);
    if v == czero() {
        return v;
    }
    v * p
}

/// Both sides of the isometry ‖f‖²_{L²(p dp)} = ‖R_m f‖²_{L²(dθ)}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsometryCheck {
    pub momentum_norm_sqr: f64,
    pub rapidity_norm_sqr: f64,
    /// |difference| / max(momentum side, tiny).
    pub residual: f64,
}

/// Compares the momentum-space and rapidity-space norms by adaptive quadrature on compactified variables.
pub fn verify_isometry<T: Real>(f: impl Fn(T) -> C<T>, m: T) -> Result<IsometryCheck> {
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::param("mass", format!("must be positive and finite, got {m}")));
    }
    let opts = AdaptiveOpts { rel_tol: f64::max(1e-13, 50.0 * to_f64(T::epsilon())), ..AdaptiveOpts::default() };
    let one = T::one();
    // p = t/(1−t), dp = dt/(1−t)²
    let lhs = adaptive(
        |t: T| {
            let u = one - t;
            let p = t / u;
            let v = f(p);
            if v == czero() {
                return Ok(czero());
            }
            Ok(cr(v.norm_sqr() * p / (u * u)))
        },
        T::zero(),
        one,
        opts,
    )?;
    // θ = s/(1−s²), dθ = (1+s²)/(1−s²)² ds
    let rhs = adaptive(
        |s: T| {
            let u = one - s * s;
            let theta = s / u;
            let v = intertwine_at(&f, m, theta);
            if v == czero() {
                return Ok(czero());
            }
            Ok(cr(v.norm_sqr() * (one + s * s) / (u * u)))
        },
        -one,
        one,
        opts,
    )?;
    let (l, r) = (to_f64(lhs.value.re), to_f64(rhs.value.re));
    let residual = (l - r).abs() / l.abs().max(f64::MIN_POSITIVE);
    Ok(IsometryCheck { momentum_norm_sqr: l, rapidity_norm_sqr: r, residual })
}

/// max over θ of |R_m(e^{itp} f)(θ) − e^{i t m e^{−θ}} R_m f(θ)|.
pub fn intertwining_residual<T: Real>(
    f: impl Fn(T) -> C<T> + Clone + Send + Sync + 'static,
    m: T,
    t: T,
    thetas: &[T],
) -> Result<f64> {
    let g = {
        let f = f.clone();
        move |p: T| f(p) * c(T::zero(), t * p).exp()
    };
    let lhs = massive_intertwine(g, m)?;
    let rhs = massive_intertwine(f, m)?;
    let mut worst = 0.0f64;
    for &th in thetas {
        let z = cr(th);
        let phase = c(T::zero(), t * m * (-th).exp()).exp();
        let d = lhs.eval(0, z)? - phase * rhs.eval(0, z)?;
        worst = worst.max(to_f64(d.norm()));
    }
    Ok(worst)
}
