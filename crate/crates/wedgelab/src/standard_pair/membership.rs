use super::vector::OneParticleVector;
use crate::error::{Error, Result};
use crate::quadrature::{contour_integral, gauss_legendre, Rectangle};
use crate::report::ReportEntry;
use crate::scalar::{c, cr, lit, to_f64, Real};

/// Sampling parameters for [`check_h_membership`].
#[derive(Clone, Copy, Debug)]
pub struct MembershipOpts {
    /// Boundary identity is checked at this many equispaced points of [−qmax, qmax].
    pub boundary_points: usize,
    pub qmax: f64,
    /// Gauss–Legendre nodes for the L² norms on each line.
    pub line_nodes: usize,
    /// Largest accepted ratio of an interior-line L² norm to the real-line norm.
    pub interior_bound: f64,
    /// Gauss–Legendre nodes per rectangle edge.
    pub contour_nodes: usize,
    pub rectangle: Rectangle,
}

impl Default for MembershipOpts {
    fn default() -> Self {
        MembershipOpts {
            boundary_points: 33,
            qmax: 4.0,
            line_nodes: 96,
            interior_bound: 1e3,
            contour_nodes: 128,
            rectangle: Rectangle::strip_default(),
        }
    }
}

/// Imaginary parts of the interior lines, as fractions of π.
pub const MEMBERSHIP_LINES: [f64; 3] = [0.25, 0.5, 0.75];

/// Tests f against the characterization of the standard subspace:
/// boundary identity f^α(q+iπ) = conj f^{ᾱ}(q), bounded interior L² norms, and Cauchy's theorem on a rectangle.
///
/// Entries: `h.boundary` (relative to max |f| on the real samples), `h.interior` (ratio against
/// `interior_bound`), `h.cauchy`. Evaluation failures become infinite residuals.
pub fn check_h_membership<T: Real>(f: &OneParticleVector<T>, tol: f64) -> Result<Vec<ReportEntry>> {
    check_h_membership_with(f, tol, MembershipOpts::default())
}

pub fn check_h_membership_with<T: Real>(
    f: &OneParticleVector<T>,
    tol: f64,
    opts: MembershipOpts,
) -> Result<Vec<ReportEntry>> {
    if !f.has_evaluator() {
        return Err(Error::InsufficientDomain(format!("{} is grid-backed; membership needs strip values", f.label())));
    }
    if f.domain() == Some(super::VectorDomain::RealLine) {
        return Err(Error::InsufficientDomain(format!("{} is only defined on the real line", f.label())));
    }
    let d = f.space().dim();
    let pi = T::PI();

    let boundary = (|| -> Result<f64> {
        let n = opts.boundary_points.max(2);
        let (mut diff, mut scale) = (0.0f64, 0.0f64);
        for k in 0..n {
            let q: T = lit(-opts.qmax + 2.0 * opts.qmax * k as f64 / (n - 1) as f64);
            for a in 0..d {
                let up = f.eval(a, c(q, pi))?;
                let down = f.eval(f.space().bar(a), cr(q))?;
                diff = diff.max(to_f64((up - down.conj()).norm()));
                scale = scale.max(to_f64(down.norm()));
            }
        }
        Ok(if !diff.is_finite() || !scale.is_finite() {
            f64::INFINITY
        } else if scale == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / scale
        })
    })()
    .unwrap_or(f64::INFINITY);

    let nodes = gauss_legendre::<T>(opts.line_nodes, lit(-opts.qmax), lit(opts.qmax));
    let line_norm = |im: T| -> Result<f64> {
        let mut acc = 0.0f64;
        for &(q, w) in &nodes {
            for a in 0..d {
                acc += to_f64(f.eval(a, c(q, im))?.norm_sqr() * w);
            }
        }
        Ok(acc.sqrt())
    };
    let interior = (|| -> Result<f64> {
        let base = line_norm(T::zero())?;
        let mut worst = 0.0f64;
        for &frac in &MEMBERSHIP_LINES {
            worst = worst.max(line_norm(pi * lit(frac))?);
        }
        Ok(if !worst.is_finite() {
            f64::INFINITY
        } else if base == 0.0 {
            if worst == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            worst / base
        })
    })()
    .unwrap_or(f64::INFINITY);

    let cauchy = contour_integral(
        |z| (0..d).map(|a| f.eval(a, z)).collect::<Result<Vec<_>>>(),
        opts.rectangle,
        opts.contour_nodes,
    )
    .map(|r| r.relative_residual())
    .unwrap_or(f64::INFINITY);

    let n_line = opts.line_nodes * d * (MEMBERSHIP_LINES.len() + 1);
    Ok(vec![
        ReportEntry::new("h.boundary", boundary, opts.boundary_points * d, tol),
        ReportEntry::new("h.interior", interior, n_line, opts.interior_bound),
        ReportEntry::new("h.cauchy", cauchy, 4 * opts.contour_nodes, tol),
    ])
}
