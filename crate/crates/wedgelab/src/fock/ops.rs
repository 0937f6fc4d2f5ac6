use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BraidingData, FockVector};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::report::ReportEntry;
use crate::scalar::{c, cone, cr, czero, lit, to_f64, Real, C};
use crate::standard_pair::OneParticleVector;
use crate::tensor::{LegSpace, LeggedTensor};

/// Number of random rank-2 probes used for the morphism preconditions.
pub const PROBES: usize = 4;

/// Linear one-particle operator: a matrix on the leg index α + d·k.
#[derive(Clone, Debug)]
pub struct OneParticleOp<T> {
    leg: LegSpace<T>,
    m: CMatrix<T>,
}

impl<T: Real> OneParticleOp<T> {
    pub fn new(leg: LegSpace<T>, m: CMatrix<T>) -> Result<Self> {
        if m.rows() != leg.dim() || m.cols() != leg.dim() {
            return Err(Error::Structural(format!("{}x{} matrix on a leg of dimension {}", m.rows(), m.cols(), leg.dim())));
        }
        Ok(OneParticleOp { leg, m })
    }

    pub fn identity(leg: LegSpace<T>) -> Self {
        let n = leg.dim();
        OneParticleOp { leg, m: CMatrix::identity(n) }
    }

    /// Diagonal multiplier (α, q) ↦ m(α, q).
    pub fn multiplier(leg: LegSpace<T>, m: impl Fn(usize, T) -> C<T>) -> Self {
        let n = leg.dim();
        let diag: Vec<C<T>> = (0..n).map(|i| m(leg.split(i).0, leg.rapidity(i))).collect();
        OneParticleOp { leg, m: CMatrix::from_fn(n, n, |r, col| if r == col { diag[r] } else { czero() }) }
    }

    /// Translation T(t): multiplication by e^{i t e^q}.
    pub fn translation(leg: LegSpace<T>, t: T) -> Self {
        Self::multiplier(leg, move |_, q| c(T::zero(), t * q.exp()).exp())
    }

    /// Internal d×d matrix u acting at every node.
    pub fn internal(leg: LegSpace<T>, u: &CMatrix<T>) -> Result<Self> {
        let d = leg.d();
        if u.rows() != d || u.cols() != d {
            return Err(Error::Structural(format!("{}x{} internal matrix for multiplicity {d}", u.rows(), u.cols())));
        }
        let n = leg.dim();
        let m = CMatrix::from_fn(n, n, |r, col| {
            let (a, k) = leg.split(r);
            let (b, l) = leg.split(col);
            if k == l {
                u[(a, b)]
            } else {
                czero()
            }
        });
        Ok(OneParticleOp { leg, m })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn leg(&self) -> &LegSpace<T> {
        &self.leg
    }

    /// Adjoint with respect to the quadrature inner product: W^{-1} M^† W.
    pub fn adjoint(&self) -> Self {
        let n = self.leg.dim();
        let leg = &self.leg;
        let m = CMatrix::from_fn(n, n, |r, col| self.m[(col, r)].conj() * (leg.weight(col) / leg.weight(r)));
        OneParticleOp { leg: self.leg.clone(), m }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !self.leg.compatible(&other.leg) {
            return Err(Error::Structural("operators on different legs".into()));
        }
        Ok(OneParticleOp { leg: self.leg.clone(), m: self.m.matmul(&other.m) })
    }

    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        self.m.mul_vec(v)
    }

    fn on_all_legs(&self, t: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        let mut out = t.clone();
        for k in 0..t.rank() {
            out = out.apply_on_leg(&self.m, k)?;
        }
        Ok(out)
    }
}

/// Antilinear one-particle map v ↦ M·conj(v).
#[derive(Clone, Debug)]
pub struct AntilinearOp<T> {
    leg: LegSpace<T>,
    m: CMatrix<T>,
}

impl<T: Real> AntilinearOp<T> {
    pub fn new(leg: LegSpace<T>, m: CMatrix<T>) -> Result<Self> {
        if m.rows() != leg.dim() || m.cols() != leg.dim() {
            return Err(Error::Structural(format!("{}x{} matrix on a leg of dimension {}", m.rows(), m.cols(), leg.dim())));
        }
        Ok(AntilinearOp { leg, m })
    }

    /// J_H on grid samples: (Jf)^α(q_k) = conj f^{ᾱ}(q_k).
    pub fn modular_conjugation(leg: LegSpace<T>) -> Self {
        let n = leg.dim();
        let d = leg.d();
        let m = CMatrix::from_fn(n, n, |r, col| {
            let (a, k) = leg.split(r);
            if col == leg.internal.bar(a) + d * k {
                cone()
            } else {
                czero()
            }
        });
        AntilinearOp { leg, m }
    }

    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        let conj: Vec<C<T>> = v.iter().map(|z| z.conj()).collect();
        self.m.mul_vec(&conj)
    }

    fn on_all_legs(&self, t: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        let mut out = t.conj();
        for k in 0..t.rank() {
            out = out.apply_on_leg(&self.m, k)?;
        }
        Ok(out)
    }
}

fn probes<T: Real>(leg: &LegSpace<T>) -> Result<Vec<LeggedTensor<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..PROBES).map(|_| LeggedTensor::random(vec![leg.clone(); 2], &mut rng)).collect()
}

/// Blocks of Γ(A) = 1 ⊕ A ⊕ A⊗A ⊕ ⋯ for a linear A with [A⊗A, R] = 0.
#[derive(Clone, Debug)]
pub struct SecondQuantized<T> {
    op: OneParticleOp<T>,
    commutation: f64,
}

/// Γ(A); rejects A unless ‖(A⊗A)R − R(A⊗A)‖ ≤ tol on seeded random probes (relative to the probe norm).
pub fn second_quantize<T: Real>(b: &BraidingData<T>, a: &OneParticleOp<T>, tol: f64) -> Result<SecondQuantized<T>> {
    if !a.leg.compatible(b.leg()) {
        return Err(Error::Structural("operator and braiding live on different legs".into()));
    }
    let mut worst = 0.0f64;
    for p in probes(b.leg())? {
        let lhs = a.on_all_legs(&b.r_on(&p, 0, 1)?)?;
        let rhs = b.r_on(&a.on_all_legs(&p)?, 0, 1)?;
        worst = worst.max(to_f64(lhs.sub(&rhs)?.norm() / p.norm()));
    }
    if !(worst <= tol) {
        return Err(Error::Precondition { what: "[A⊗A, R] = 0".into(), residual: worst });
    }
    Ok(SecondQuantized { op: a.clone(), commutation: worst })
}

impl<T: Real> SecondQuantized<T> {
    pub fn commutation_residual(&self) -> f64 {
        self.commutation
    }

    pub fn one_particle(&self) -> &OneParticleOp<T> {
        &self.op
    }

    /// Γ(A*); the morphism condition for A* follows from the one for A.
    pub fn adjoint(&self) -> Self {
        SecondQuantized { op: self.op.adjoint(), commutation: self.commutation }
    }

    pub fn apply(&self, psi: &FockVector<T>) -> Result<FockVector<T>> {
        let levels = psi.levels().iter().map(|t| self.op.on_all_legs(t)).collect::<Result<Vec<_>>>()?;
        Ok(FockVector::with_parts(psi.leg().clone(), levels, psi.is_symmetric(), psi.leakage()))
    }

    /// A^{⊗n} on a single rank-n tensor.
    pub fn apply_level(&self, t: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        self.op.on_all_legs(t)
    }
}

/// Blocks of Γ̂(A) = A⁰ ⊕ ⨁ F_{1⋯n} A^{⊗n} for an antilinear A with (A⊗A)R = R*(A⊗A).
#[derive(Clone, Debug)]
pub struct HatSecondQuantized<T> {
    op: AntilinearOp<T>,
    intertwining: f64,
}

/// Γ̂(A); rejects A unless the antilinear intertwining residual is ≤ tol on seeded probes.
pub fn hat_second_quantize<T: Real>(
    b: &BraidingData<T>,
    a: &AntilinearOp<T>,
    tol: f64,
) -> Result<HatSecondQuantized<T>> {
    if !a.leg.compatible(b.leg()) {
        return Err(Error::Structural("operator and braiding live on different legs".into()));
    }
    let mut worst = 0.0f64;
    for p in probes(b.leg())? {
        let lhs = a.on_all_legs(&b.r_on(&p, 0, 1)?)?;
        let rhs = b.r_adjoint_on(&a.on_all_legs(&p)?, 0, 1)?;
        worst = worst.max(to_f64(lhs.sub(&rhs)?.norm() / p.norm()));
    }
    if !(worst <= tol) {
        return Err(Error::Precondition { what: "(A⊗A)R = R*(A⊗A)".into(), residual: worst });
    }
    Ok(HatSecondQuantized { op: a.clone(), intertwining: worst })
}

impl<T: Real> HatSecondQuantized<T> {
    pub fn intertwining_residual(&self) -> f64 {
        self.intertwining
    }

    /// F_{1⋯n} A^{⊗n} on a rank-n tensor (complex conjugation on rank 0).
    pub fn apply_level(&self, t: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        let a = self.op.on_all_legs(t)?;
        a.permute_legs(&crate::tensor::Permutation::reversal(t.rank()))
    }

    pub fn apply(&self, psi: &FockVector<T>) -> Result<FockVector<T>> {
        let levels = psi.levels().iter().map(|t| self.apply_level(t)).collect::<Result<Vec<_>>>()?;
        Ok(FockVector::with_parts(psi.leg().clone(), levels, psi.is_symmetric(), psi.leakage()))
    }
}

/// How the creation operator symmetrizes f ⊗ Ψ_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum CreateMethod {
    /// (1/√(n+1)) Σ_i X_{1i}(f ⊗ Ψ_n), valid on R-symmetric Ψ_n.
    #[default]
    XFormula,
    /// √(n+1) P_R^{(n+1)}(f ⊗ Ψ_n) with the full projector sum.
    Projector,
}

fn samples_on<T: Real>(f: &OneParticleVector<T>, leg: &LegSpace<T>) -> Result<Vec<C<T>>> {
    f.samples(leg)
}

fn ensure_symmetric<T: Real>(b: &BraidingData<T>, psi: &FockVector<T>) -> Result<FockVector<T>> {
    if !psi.leg().compatible(b.leg()) {
        return Err(Error::Structural("Fock vector and braiding live on different legs".into()));
    }
    if psi.is_symmetric() {
        Ok(psi.clone())
    } else {
        psi.symmetrized(b)
    }
}

fn level_norm<T: Real>(v: &[C<T>], leg: &LegSpace<T>) -> f64 {
    v.iter().enumerate().map(|(i, z)| to_f64(z.norm_sqr() * leg.weight(i))).sum::<f64>().sqrt()
}

/// a(f) = P_R b(f) P_R with b(f)ξ = √(n+1) f ⊗ ξ.
///
/// The level above N_max is dropped; its uncompressed norm √(N_max+1)‖f‖‖Ψ_{N_max}‖ (an upper bound
/// for the compressed one) is added to the leakage.
pub fn create<T: Real>(b: &BraidingData<T>, f: &OneParticleVector<T>, psi: &FockVector<T>) -> Result<FockVector<T>> {
    create_with(b, f, psi, CreateMethod::default())
}

pub fn create_with<T: Real>(
    b: &BraidingData<T>,
    f: &OneParticleVector<T>,
    psi: &FockVector<T>,
    method: CreateMethod,
) -> Result<FockVector<T>> {
    let psi = ensure_symmetric(b, psi)?;
    let leg = b.leg().clone();
    let fs = samples_on(f, &leg)?;
    let ft = LeggedTensor::vector(leg.clone(), fs.clone())?;
    let nmax = psi.nmax();
    let mut levels = vec![LeggedTensor::scalar(czero())];
    for n in 0..nmax {
        let raw = ft.outer(psi.level(n))?;
        let s = lit::<T>(((n + 1) as f64).sqrt());
        let sym = match method {
            CreateMethod::XFormula => b.symmetrize_first(&raw)?,
            CreateMethod::Projector => b.project(&raw)?,
        };
        levels.push(sym.scale(cr(s)));
    }
    let top = ((nmax + 1) as f64).sqrt() * level_norm(&fs, &leg) * to_f64(psi.level(nmax).norm());
    let leakage = (psi.leakage().powi(2) + top.powi(2)).sqrt();
    Ok(FockVector::with_parts(leg, levels, true, leakage))
}

/// a(f)* : level n−1 of the result is √n ⟨f|₁ Ψ_n.
pub fn annihilate<T: Real>(b: &BraidingData<T>, f: &OneParticleVector<T>, psi: &FockVector<T>) -> Result<FockVector<T>> {
    let psi = ensure_symmetric(b, psi)?;
    let leg = b.leg().clone();
    let fs = samples_on(f, &leg)?;
    let nmax = psi.nmax();
    let mut levels = Vec::with_capacity(nmax + 1);
    for n in 1..=nmax {
        let s = lit::<T>((n as f64).sqrt());
        levels.push(psi.level(n).contract_bra(&fs, 0)?.scale(cr(s)));
    }
    levels.push(LeggedTensor::zeros(vec![leg.clone(); nmax])?);
    let leakage = psi.leakage() * ((nmax + 1) as f64).sqrt() * level_norm(&fs, &leg);
    Ok(FockVector::with_parts(leg, levels, true, leakage))
}

/// φ(f) = a(f) + a(f)*.
pub fn segal_field<T: Real>(b: &BraidingData<T>, f: &OneParticleVector<T>, psi: &FockVector<T>) -> Result<FockVector<T>> {
    create(b, f, psi)?.add(&annihilate(b, f, psi)?)
}

/// Route used for the reflected field Jφ(g)J.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ReflectedRoute {
    /// Last-leg formulas: J a(g)* J Ψ_n = √n ⟨J_H g|_n Ψ_n and its adjoint √(n+1) P_R(Ψ_n ⊗ J_H g).
    #[default]
    ClosedForm,
    /// Conjugation by J = Γ̂(J_H).
    Conjugation,
}

/// Jφ(g)J Ψ.
pub fn reflected_field<T: Real>(b: &BraidingData<T>, g: &OneParticleVector<T>, psi: &FockVector<T>) -> Result<FockVector<T>> {
    reflected_field_with(b, g, psi, ReflectedRoute::default())
}

pub fn reflected_field_with<T: Real>(
    b: &BraidingData<T>,
    g: &OneParticleVector<T>,
    psi: &FockVector<T>,
    route: ReflectedRoute,
) -> Result<FockVector<T>> {
    let psi = ensure_symmetric(b, psi)?;
    let leg = b.leg().clone();
    match route {
        ReflectedRoute::Conjugation => {
            let j = hat_second_quantize(b, &AntilinearOp::modular_conjugation(leg), 1e-10)?;
            let jpsi = j.apply(&psi)?;
            j.apply(&segal_field(b, g, &jpsi)?)
        }
        ReflectedRoute::ClosedForm => {
            let jh = AntilinearOp::modular_conjugation(leg.clone());
            let h = jh.apply(&samples_on(g, &leg)?);
            let ht = LeggedTensor::vector(leg.clone(), h.clone())?;
            let nmax = psi.nmax();
            let mut levels: Vec<LeggedTensor<T>> =
                (0..=nmax).map(|n| LeggedTensor::zeros(vec![leg.clone(); n])).collect::<Result<Vec<_>>>()?;
            for n in 0..=nmax {
                let t = psi.level(n);
                if n >= 1 {
                    let down = t.contract_bra(&h, n - 1)?.scale(cr(lit((n as f64).sqrt())));
                    levels[n - 1] = levels[n - 1].add(&down)?;
                }
                if n < nmax {
                    let up = b.symmetrize_last(&t.outer(&ht)?)?.scale(cr(lit(((n + 1) as f64).sqrt())));
                    levels[n + 1] = levels[n + 1].add(&up)?;
                }
            }
            let top = ((nmax + 1) as f64).sqrt() * level_norm(&h, &leg) * to_f64(psi.level(nmax).norm());
            let leakage = (psi.leakage().powi(2) + top.powi(2)).sqrt();
            Ok(FockVector::with_parts(leg, levels, true, leakage))
        }
    }
}

/// Audits ‖a(f)Ψ‖ ≤ ‖f‖‖(N+1)^{1/2}Ψ‖ and ‖a(f)*Ψ‖ ≤ ‖f‖‖N^{1/2}Ψ‖ on `trials` random symmetric vectors
/// with levels up to `nmax`, plus equality on the vacuum.
///
/// Ψ is embedded with one extra level so nothing is lost to truncation. Residuals are the largest
/// excess lhs − rhs (zero when the bound holds); `slack` is the tolerance.
pub fn check_particle_bounds<T: Real>(
    b: &BraidingData<T>,
    f: &OneParticleVector<T>,
    trials: usize,
    nmax: usize,
    slack: f64,
    rng: &mut impl rand::Rng,
) -> Result<Vec<ReportEntry>> {
    let leg = b.leg().clone();
    let fnorm = level_norm(&samples_on(f, &leg)?, &leg);
    let (mut create_excess, mut annihilate_excess) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let psi = FockVector::random_symmetric(b, nmax, rng)?;
        let mut levels = psi.levels().to_vec();
        levels.push(LeggedTensor::zeros(vec![leg.clone(); nmax + 1])?);
        let psi = FockVector::with_parts(leg.clone(), levels, true, 0.0);
        let up = to_f64(create(b, f, &psi)?.norm());
        let down = to_f64(annihilate(b, f, &psi)?.norm());
        let n1 = to_f64(psi.number_weighted_norm(|n| (n + 1) as f64));
        let n0 = to_f64(psi.number_weighted_norm(|n| n as f64));
        create_excess = nan_max(create_excess, (up - fnorm * n1).max(0.0));
        annihilate_excess = nan_max(annihilate_excess, (down - fnorm * n0).max(0.0));
    }
    let omega = FockVector::vacuum(leg, 1)?;
    let up = to_f64(create(b, f, &omega)?.norm());
    let down = to_f64(annihilate(b, f, &omega)?.norm());
    let vac = ((up - fnorm).abs() / fnorm.max(f64::MIN_POSITIVE)).max(down);
    Ok(vec![
        ReportEntry::new("particle_bound.create", create_excess, trials, slack),
        ReportEntry::new("particle_bound.annihilate", annihilate_excess, trials, slack),
        ReportEntry::new("particle_bound.vacuum_equality", vac, 1, slack),
    ])
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
