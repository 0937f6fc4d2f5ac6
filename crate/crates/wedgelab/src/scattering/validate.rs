use crate::error::{Error, Result};
use crate::linalg::{embed_in_product, flip, swap_row_pair, CMatrix};
use crate::quadrature::{contour_integral, Rectangle};
use crate::report::ReportEntry;
use crate::scalar::{c, lit, to_f64, Real, C};
use crate::scattering::function::{Domain, Kind, MatrixScatteringFunction};
use crate::tensor::{InternalIndexSpace, RapidityGrid};

/// Residual thresholds shared by the validators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Algebraic identities evaluated pointwise.
    pub algebraic: f64,
    /// Contour and quadrature identities.
    pub quadrature: f64,
    /// Bound on max |S| over the interior sampling lines.
    pub interior_bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { algebraic: 1e-10, quadrature: 1e-8, interior_bound: 1e6 }
    }
}

/// Crossing mode: LL functions of differences, or LR functions of sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingMode {
    LL,
    LR,
}

/// Number of grid nodes per axis used for two-rapidity identities.
pub const PAIR_SAMPLES: usize = 8;

/// Points in the strip's interior where boundedness is sampled.
pub const INTERIOR_LINES: [f64; 3] = [0.25, 0.5, 0.75];

/// Contour quadrature nodes per rectangle edge.
pub const CONTOUR_NODES: usize = 64;

fn real<T: Real>(q: T) -> C<T> {
    c(q, T::zero())
}

/// ‖S(q)S(q)* − 1‖ over grid nodes.
pub fn check_unitarity<T: Real>(s: &MatrixScatteringFunction<T>, grid: &RapidityGrid<T>, tol: f64) -> Result<ReportEntry> {
    let n = s.matrix_dim();
    let id = CMatrix::identity(n);
    let mut res = 0.0f64;
    for &q in grid.nodes() {
        let m = s.eval_real(q)?;
        res = fmax(res, m.matmul(&m.adjoint()).sub(&id).spectral_norm());
    }
    Ok(ReportEntry::new("unitarity", res, grid.len(), tol))
}

fn fmax(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// ‖S(−q) − S(q)*‖ over grid nodes.
pub fn check_hermitian_analyticity<T: Real>(
    s: &MatrixScatteringFunction<T>,
    grid: &RapidityGrid<T>,
    tol: f64,
) -> Result<ReportEntry> {
    let mut res = 0.0f64;
    for &q in grid.nodes() {
        let a = s.eval_real(-q)?;
        let b = s.eval_real(q)?.adjoint();
        res = fmax(res, a.sub(&b).spectral_norm());
    }
    Ok(ReportEntry::new("hermitian_analyticity", res, grid.len(), tol))
}

/// Yang–Baxter residual S(q)₁₂S(q+q')₂₃S(q')₁₂ − S(q')₂₃S(q+q')₁₂S(q)₂₃ over sampled pairs.
pub fn check_ybe<T: Real>(s: &MatrixScatteringFunction<T>, grid: &RapidityGrid<T>, tol: f64) -> Result<ReportEntry> {
    check_ll_generic(s)?;
    let d = s.d();
    let dims = [d, d, d];
    let idx = grid.sample_indices(PAIR_SAMPLES);
    let mut res = 0.0f64;
    let mut count = 0;
    for &k in &idx {
        for &l in &idx {
            let (q, qp) = (grid.nodes()[k], grid.nodes()[l]);
            let sq = s.eval_real(q)?;
            let sqp = s.eval_real(qp)?;
            let ssum = s.eval_real(q + qp)?;
            let e12 = |m: &CMatrix<T>| embed_in_product(m, &dims, 0, 1);
            let e23 = |m: &CMatrix<T>| embed_in_product(m, &dims, 1, 2);
            let lhs = e12(&sq)?.matmul(&e23(&ssum)?).matmul(&e12(&sqp)?);
            let rhs = e23(&sqp)?.matmul(&e12(&ssum)?).matmul(&e23(&sq)?);
            res = fmax(res, lhs.sub(&rhs).spectral_norm());
            count += 1;
        }
    }
    Ok(ReportEntry::new("ybe", res, count, tol))
}

fn check_ll_generic<T: Real>(s: &MatrixScatteringFunction<T>) -> Result<()> {
    if s.kind() == Kind::LR {
        return Err(Error::Structural(format!("{} is a left-right function; expected LL", s.label())));
    }
    Ok(())
}

/// S^{αβ}_{γδ}(q) = S^{δ̄γ̄}_{β̄ᾱ}(q) over nodes and index tuples.
pub fn check_tcp<T: Real>(s: &MatrixScatteringFunction<T>, grid: &RapidityGrid<T>, tol: f64) -> Result<ReportEntry> {
    check_ll_generic(s)?;
    let sp = s.space();
    let d = sp.dim();
    let mut res = 0.0f64;
    for &q in grid.nodes() {
        let m = s.eval_real(q)?;
        for a in 0..d {
            for b in 0..d {
                for g in 0..d {
                    for dd in 0..d {
                        let lhs = m[(a * d + b, g * d + dd)];
                        let rhs = m[(sp.bar(dd) * d + sp.bar(g), sp.bar(b) * d + sp.bar(a))];
                        res = fmax(res, to_f64((lhs - rhs).norm()));
                    }
                }
            }
        }
    }
    Ok(ReportEntry::new("tcp", res, grid.len(), tol))
}

/// Boundary, interior-boundedness and Cauchy-contour entries for crossing symmetry.
///
/// LL: S^{αβ}_{γδ}(iπ − q) = S^{γ̄α}_{δβ̄}(q).
/// LR: S^{αβ}_{γδ}(q + iπ) = conj S^{ᾱδ}_{γ̄β}(q) = conj S^{γβ̄}_{αδ̄}(q).
pub fn check_crossing<T: Real>(
    s: &MatrixScatteringFunction<T>,
    grid: &RapidityGrid<T>,
    tol: &Tolerances,
    mode: CrossingMode,
) -> Result<Vec<ReportEntry>> {
    if s.domain() == Domain::RealLine {
        return Err(Error::InsufficientDomain(format!(
            "{} has no values off the real line; crossing needs the strip",
            s.label()
        )));
    }
    let pi = T::PI();
    let mut boundary = 0.0f64;
    match mode {
        CrossingMode::LL => {
            check_ll_generic(s)?;
            let sp = s.space();
            let d = sp.dim();
            for &q in grid.nodes() {
                let top = s.eval(c(-q, pi))?;
                let m = s.eval_real(q)?;
                for a in 0..d {
                    for b in 0..d {
                        for g in 0..d {
                            for dd in 0..d {
                                let lhs = top[(a * d + b, g * d + dd)];
                                let rhs = m[(sp.bar(g) * d + a, dd * d + sp.bar(b))];
                                boundary = fmax(boundary, to_f64((lhs - rhs).norm()));
                            }
                        }
                    }
                }
            }
        }
        CrossingMode::LR => {
            let (l, r) = (s.left_space(), s.right_space());
            let (dl, dr) = (l.dim(), r.dim());
            for &q in grid.nodes() {
                let top = s.eval(c(q, pi))?;
                let m = s.eval_real(q)?;
                for a in 0..dl {
                    for b in 0..dr {
                        for g in 0..dl {
                            for dd in 0..dr {
                                let lhs = top[(a * dr + b, g * dr + dd)];
                                let first = m[(l.bar(a) * dr + dd, l.bar(g) * dr + b)].conj();
                                let second = m[(g * dr + r.bar(b), a * dr + r.bar(dd))].conj();
                                boundary = fmax(boundary, to_f64((lhs - first).norm()));
                                boundary = fmax(boundary, to_f64((lhs - second).norm()));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut entries = vec![ReportEntry::new("crossing.boundary", boundary, grid.len(), tol.algebraic)];
    entries.extend(analyticity_entries(s, grid, tol)?);
    Ok(entries)
}

/// Interior boundedness and Cauchy-rectangle residual of a matrix function.
pub fn analyticity_entries<T: Real>(
    s: &MatrixScatteringFunction<T>,
    grid: &RapidityGrid<T>,
    tol: &Tolerances,
) -> Result<Vec<ReportEntry>> {
    let pi = T::PI();
    let mut interior = 0.0f64;
    let mut count = 0;
    for frac in INTERIOR_LINES {
        for &q in grid.nodes() {
            let m = s.eval(c(q, pi * lit(frac)))?;
            interior = fmax(interior, if m.is_finite() { to_f64(m.max_abs()) } else { f64::INFINITY });
            count += 1;
        }
    }
    let contour = contour_integral(|z| Ok(s.eval(z)?.as_slice().to_vec()), Rectangle::strip_default(), CONTOUR_NODES)?;
    Ok(vec![
        ReportEntry::new("crossing.interior", interior, count, tol.interior_bound),
        ReportEntry::new("crossing.cauchy", contour.relative_residual(), contour.samples, tol.quadrature),
    ])
}

/// R⁺(q−q')₁₂ S(q)₁₃ S(q')₂₃ − S(q')₂₃ S(q)₁₃ R⁺(q−q')₁₂ on left ⊗ left ⊗ right, R⁺ in the R-convention.
pub fn left_mixed_ybe_residual<T: Real>(
    r_plus: &MatrixScatteringFunction<T>,
    s: &MatrixScatteringFunction<T>,
    grid: &RapidityGrid<T>,
) -> Result<(f64, usize)> {
    let (dl, dr) = (s.left_space().dim(), s.right_space().dim());
    if r_plus.d() != dl {
        return Err(Error::Structural("left scattering and left-right function disagree on the left multiplicity".into()));
    }
    let dims = [dl, dl, dr];
    pair_sweep(grid, |q, qp| {
        let r = r_plus.eval_r(real(q - qp))?;
        let sq = s.eval_real(q)?;
        let sqp = s.eval_real(qp)?;
        let r12 = embed_in_product(&r, &dims, 0, 1)?;
        let s13 = embed_in_product(&sq, &dims, 0, 2)?;
        let s23 = embed_in_product(&sqp, &dims, 1, 2)?;
        let lhs = r12.matmul(&s13).matmul(&s23);
        let rhs = s23.matmul(&s13).matmul(&r12);
        Ok(lhs.sub(&rhs).spectral_norm())
    })
}

/// S(q)₁₂ S(q')₁₃ R⁻(q−q')₂₃ − R⁻(q−q')₂₃ S(q')₁₃ S(q)₁₂ on left ⊗ right ⊗ right, R⁻ in the R-convention.
pub fn right_mixed_ybe_residual<T: Real>(
    s: &MatrixScatteringFunction<T>,
    r_minus: &MatrixScatteringFunction<T>,
    grid: &RapidityGrid<T>,
) -> Result<(f64, usize)> {
    let (dl, dr) = (s.left_space().dim(), s.right_space().dim());
    if r_minus.d() != dr {
        return Err(Error::Structural("right scattering and left-right function disagree on the right multiplicity".into()));
    }
    let dims = [dl, dr, dr];
    pair_sweep(grid, |q, qp| {
        let r = r_minus.eval_r(real(q - qp))?;
        let sq = s.eval_real(q)?;
        let sqp = s.eval_real(qp)?;
        let s12 = embed_in_product(&sq, &dims, 0, 1)?;
        let s13 = embed_in_product(&sqp, &dims, 0, 2)?;
        let r23 = embed_in_product(&r, &dims, 1, 2)?;
        let lhs = s12.matmul(&s13).matmul(&r23);
        let rhs = r23.matmul(&s13).matmul(&s12);
        Ok(lhs.sub(&rhs).spectral_norm())
    })
}

fn pair_sweep<T: Real>(grid: &RapidityGrid<T>, mut f: impl FnMut(T, T) -> Result<f64>) -> Result<(f64, usize)> {
    let idx = grid.sample_indices(PAIR_SAMPLES);
    let mut res = 0.0f64;
    for &k in &idx {
        for &l in &idx {
            res = fmax(res, f(grid.nodes()[k], grid.nodes()[l])?);
        }
    }
    Ok((res, idx.len() * idx.len()))
}

/// Both mixed Yang–Baxter identities; the residual is the larger of the two.
pub fn check_mixed_ybe<T: Real>(
    r_plus: &MatrixScatteringFunction<T>,
    s: &MatrixScatteringFunction<T>,
    r_minus: &MatrixScatteringFunction<T>,
    grid: &RapidityGrid<T>,
    tol: f64,
) -> Result<ReportEntry> {
    let (l, nl) = left_mixed_ybe_residual(r_plus, s, grid)?;
    let (r, nr) = right_mixed_ybe_residual(s, r_minus, grid)?;
    Ok(ReportEntry::new("mixed_ybe", fmax(l, r), nl + nr, tol))
}

/// ‖F R(q) F − R(q)‖ with R in the R-convention.
pub fn check_flip_symmetry<T: Real>(r: &MatrixScatteringFunction<T>, grid: &RapidityGrid<T>, tol: f64) -> Result<ReportEntry> {
    check_ll_generic(r)?;
    let f = flip::<T>(r.d());
    let mut res = 0.0f64;
    for &q in grid.nodes() {
        let m = r.eval_r(real(q))?;
        res = fmax(res, f.matmul(&m).matmul(&f).sub(&m).spectral_norm());
    }
    Ok(ReportEntry::new("flip_symmetry", res, grid.len(), tol))
}

/// ‖R(q) − R(iπ − q)‖: the extra symmetry needed to iterate the flip construction.
pub fn check_reflection_symmetry<T: Real>(
    r: &MatrixScatteringFunction<T>,
    grid: &RapidityGrid<T>,
    tol: f64,
) -> Result<ReportEntry> {
    let mut res = 0.0f64;
    for &q in grid.nodes() {
        let a = r.eval_r(real(q))?;
        let b = r.eval_r(c(-q, T::PI()))?;
        res = fmax(res, a.sub(&b).spectral_norm());
    }
    Ok(ReportEntry::new("reflection_symmetry", res, grid.len(), tol))
}

/// Particle masses per internal index.
#[derive(Clone, Debug, PartialEq)]
pub struct MassAssignment {
    masses: Vec<f64>,
}

impl MassAssignment {
    pub fn new(masses: Vec<f64>, space: &InternalIndexSpace) -> Result<Self> {
        if masses.len() != space.dim() {
            return Err(Error::param("masses", format!("{} masses for multiplicity {}", masses.len(), space.dim())));
        }
        for (a, &m) in masses.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::param(format!("masses[{a}]"), format!("{m} is not a positive mass")));
            }
            if m != masses[space.bar(a)] {
                return Err(Error::param(format!("masses[{a}]"), "conjugate indices must carry equal masses"));
            }
        }
        Ok(MassAssignment { masses })
    }

    pub fn uniform(space: &InternalIndexSpace, m: f64) -> Self {
        MassAssignment { masses: vec![m; space.dim()] }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

/// max |R^{αβ}_{γδ}(q)| over tuples with m^α ≠ m^γ or m^β ≠ m^δ (R-convention).
pub fn check_mass_compatibility<T: Real>(
    r: &MatrixScatteringFunction<T>,
    masses: &MassAssignment,
    grid: &RapidityGrid<T>,
    tol: f64,
) -> Result<ReportEntry> {
    let d = r.d();
    let m = masses.masses();
    if m.len() != d {
        return Err(Error::Structural(format!("{} masses for multiplicity {d}", m.len())));
    }
    let mut res = 0.0f64;
    for &q in grid.nodes() {
        let rm = r.eval_r(real(q))?;
        for a in 0..d {
            for b in 0..d {
                for g in 0..d {
                    for dd in 0..d {
                        if m[a] != m[g] || m[b] != m[dd] {
                            res = fmax(res, to_f64(rm[(a * d + b, g * d + dd)].norm()));
                        }
                    }
                }
            }
        }
    }
    Ok(ReportEntry::new("mass_compatibility", res, grid.len(), tol))
}

/// ‖(V⊗V) R(q) − R(q) (V⊗V)‖.
pub fn check_internal_symmetry<T: Real>(
    r: &MatrixScatteringFunction<T>,
    v: &CMatrix<T>,
    grid: &RapidityGrid<T>,
    tol: f64,
) -> Result<ReportEntry> {
    let d = r.d();
    if v.rows() != d || v.cols() != d {
        return Err(Error::Structural(format!("symmetry is {}x{}, multiplicity is {d}", v.rows(), v.cols())));
    }
    let vv = v.kron(v);
    let mut res = 0.0f64;
    for &q in grid.nodes() {
        let m = r.eval_r(real(q))?;
        res = fmax(res, vv.matmul(&m).sub(&m.matmul(&vv)).spectral_norm());
    }
    Ok(ReportEntry::new("internal_symmetry", res, grid.len(), tol))
}

/// Unitarity, hermitian analyticity, Yang–Baxter, TCP and crossing (with analyticity) of an LL function.
pub fn ll_suite<T: Real>(s: &MatrixScatteringFunction<T>, grid: &RapidityGrid<T>, tol: &Tolerances) -> Result<Vec<ReportEntry>> {
    let mut out = vec![
        check_unitarity(s, grid, tol.algebraic)?,
        check_hermitian_analyticity(s, grid, tol.algebraic)?,
        check_ybe(s, grid, tol.algebraic)?,
        check_tcp(s, grid, tol.algebraic)?,
    ];
    out.extend(check_crossing(s, grid, tol, CrossingMode::LL)?);
    Ok(out)
}

/// Unitarity, mixed Yang–Baxter identities and mixed unitary-crossing (with analyticity) of an LR function.
pub fn lr_suite<T: Real>(
    r_plus: &MatrixScatteringFunction<T>,
    s: &MatrixScatteringFunction<T>,
    r_minus: &MatrixScatteringFunction<T>,
    grid: &RapidityGrid<T>,
    tol: &Tolerances,
) -> Result<Vec<ReportEntry>> {
    let mut out = vec![check_unitarity(s, grid, tol.algebraic)?, check_mixed_ybe(r_plus, s, r_minus, grid, tol.algebraic)?];
    out.extend(check_crossing(s, grid, tol, CrossingMode::LR)?);
    Ok(out)
}

/// Flip construction: the R-convention matrix of `r` used as a left-right function of rapidity sums.
///
/// Rejects inputs that are not flip-symmetric or fail any LL check.
pub fn build_flip_lr<T: Real>(
    r: &MatrixScatteringFunction<T>,
    grid: &RapidityGrid<T>,
    tol: &Tolerances,
) -> Result<MatrixScatteringFunction<T>> {
    let mut checks = vec![check_flip_symmetry(r, grid, tol.algebraic)?];
    checks.extend(ll_suite(r, grid, tol)?);
    if let Some(bad) = checks.iter().find(|e| !e.pass) {
        return Err(Error::Precondition { what: bad.axiom.clone(), residual: bad.residual });
    }
    Ok(crate::scattering::builders::flip_lr_unchecked(r))
}

/// The R-convention matrix of an LL function at z.
pub fn r_matrix<T: Real>(s: &MatrixScatteringFunction<T>, z: C<T>) -> Result<CMatrix<T>> {
    Ok(swap_row_pair(&s.eval(z)?, s.d()))
}
