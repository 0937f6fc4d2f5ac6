use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::chain::Certification;
use super::twist::{sector_legs, twist, twisted_commutator, Side, TwoSidedVector};
use crate::error::{Error, Result};
use crate::fock::{BraidingData, FockVector};
use crate::linalg::CMatrix;
use crate::report::{ReportEntry, ValidationReport};
use crate::scalar::{c, cone, cr, czero, lit, to_f64, Real, C};
use crate::scattering::{
    assemble_block_diagonal, check_mass_compatibility, lr_identity, Kind, MassAssignment, MatrixScatteringFunction,
};
use crate::standard_pair::{half_line_transform, OneParticleVector, TestFunction, TransformSign, VectorDomain};
use crate::tensor::{LegSpace, LeggedTensor, RapidityGrid};

/// Translation arguments (t₊, t₋) at which the twist is tested against the translations.
pub const TRANSLATION_SAMPLES: [(f64, f64); 3] = [(0.7, -0.3), (-1.1, 2.0), (2.5, 0.4)];

/// Sectors on which twist identities are sampled.
pub const SAMPLE_SECTORS: [(usize, usize); 3] = [(1, 1), (2, 1), (1, 2)];

/// Composite grid suited to the locality experiments: panels [−5, 3] and [3, 5] with 3/8 of the
/// nodes on the first. `g` must be a positive multiple of 8.
pub fn locality_grid<T: Real>(g: usize) -> Result<RapidityGrid<T>> {
    if g == 0 || g % 8 != 0 {
        return Err(Error::param("grid.nodes", format!("{g} is not a positive multiple of 8")));
    }
    RapidityGrid::composite(&[lit(-5.0), lit(3.0), lit(5.0)], &[3 * g / 8, 5 * g / 8])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BundleKind {
    Massless,
    Massive,
}

/// One chiral half: its two-particle scattering, braiding on a grid and particle cutoff.
#[derive(Clone, Debug)]
pub struct ChiralSide<T: Real> {
    pub r: MatrixScatteringFunction<T>,
    pub braiding: BraidingData<T>,
    pub nmax: usize,
    pub masses: Option<MassAssignment>,
}

impl<T: Real> ChiralSide<T> {
    pub fn new(r: MatrixScatteringFunction<T>, grid: Arc<RapidityGrid<T>>, nmax: usize) -> Result<Self> {
        let braiding = BraidingData::from_function(&r, grid)?;
        Ok(ChiralSide { r, braiding, nmax, masses: None })
    }

    pub fn with_masses(mut self, masses: MassAssignment) -> Result<Self> {
        if masses.masses().len() != self.r.d() {
            return Err(Error::param("masses", format!("{} masses for multiplicity {}", masses.masses().len(), self.r.d())));
        }
        self.masses = Some(masses);
        Ok(self)
    }

    pub fn leg(&self) -> &LegSpace<T> {
        self.braiding.leg()
    }
}

/// Diagonal generator multiplier w_α e^{±q} on one side, coupled to t₊ or t₋.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Generator {
    pub side: Side,
    /// Which translation argument multiplies it: `Side::Left` for t₊, `Side::Right` for t₋.
    pub coupling: Side,
    /// +1 for e^q, −1 for e^{−q}.
    pub exponent: i32,
    /// Per-index weights w_α (1 for e^q, m_α² for e^{−q}).
    pub weights: Vec<f64>,
}

impl Generator {
    pub fn value(&self, alpha: usize, q: f64) -> f64 {
        self.weights[alpha] * (self.exponent as f64 * q).exp()
    }
}

/// Data of a two-sided Borchers triple at truncated level.
#[derive(Clone, Debug)]
pub struct TripleBundle<T: Real> {
    pub kind: BundleKind,
    pub left: ChiralSide<T>,
    pub right: ChiralSide<T>,
    pub s: MatrixScatteringFunction<T>,
    pub generators: Vec<Generator>,
}

impl<T: Real> TripleBundle<T> {
    /// Massless bundle: T(t₊, t₋) = T₊(t₊) ⊗ T₋(t₋); `s = None` means free left-right scattering.
    pub fn massless(left: ChiralSide<T>, right: ChiralSide<T>, s: Option<MatrixScatteringFunction<T>>) -> Result<Self> {
        if left.masses.is_some() || right.masses.is_some() {
            return Err(Error::Structural("a massless bundle carries no masses".into()));
        }
        let s = s.unwrap_or_else(|| lr_identity(left.r.space().clone(), right.r.space().clone()));
        let generators = vec![
            Generator { side: Side::Left, coupling: Side::Left, exponent: 1, weights: vec![1.0; left.r.d()] },
            Generator { side: Side::Right, coupling: Side::Right, exponent: 1, weights: vec![1.0; right.r.d()] },
        ];
        Self::checked(TripleBundle { kind: BundleKind::Massless, left, right, s, generators })
    }

    /// Massive bundle: T̃(t₊, t₋) = T₊(t₊)T₊′(t₋) ⊗ T₋′(t₊)T₋(t₋); both sides need masses.
    pub fn massive(left: ChiralSide<T>, right: ChiralSide<T>, s: Option<MatrixScatteringFunction<T>>) -> Result<Self> {
        let (Some(ml), Some(mr)) = (left.masses.clone(), right.masses.clone()) else {
            return Err(Error::Structural("a massive bundle needs masses on both sides".into()));
        };
        let sq = |m: &MassAssignment| m.masses().iter().map(|x| x * x).collect::<Vec<_>>();
        let s = s.unwrap_or_else(|| lr_identity(left.r.space().clone(), right.r.space().clone()));
        let generators = vec![
            Generator { side: Side::Left, coupling: Side::Left, exponent: 1, weights: vec![1.0; left.r.d()] },
            Generator { side: Side::Left, coupling: Side::Right, exponent: -1, weights: sq(&ml) },
            Generator { side: Side::Right, coupling: Side::Left, exponent: -1, weights: sq(&mr) },
            Generator { side: Side::Right, coupling: Side::Right, exponent: 1, weights: vec![1.0; right.r.d()] },
        ];
        Self::checked(TripleBundle { kind: BundleKind::Massive, left, right, s, generators })
    }

    fn checked(self) -> Result<Self> {
        if self.s.kind() != Kind::LR {
            return Err(Error::Structural(format!("{} is not a left-right function", self.s.label())));
        }
        if self.s.left_space() != self.left.r.space() || self.s.right_space() != self.right.r.space() {
            return Err(Error::Structural("left-right function does not match the side index spaces".into()));
        }
        for g in &self.generators {
            if g.weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::param("generators", "multiplier weights must be finite reals"));
            }
        }
        Ok(self)
    }

    fn side(&self, s: Side) -> &ChiralSide<T> {
        match s {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// Test functions and tolerances for the twisted-commutator part of an assembly.
#[derive(Clone, Debug)]
pub struct LocalityProbe<T: Real> {
    pub f: TestFunction<T>,
    pub g: TestFunction<T>,
    /// Width of the Gaussian one-particle state h(q) = e^{−q²/w²} placed on the other side.
    pub width: f64,
    pub tol: f64,
    pub algebraic: f64,
}

impl<T: Real> LocalityProbe<T> {
    /// Bumps on [0.03, 0.33] and [0.09, 0.45], tolerance 1e-5 for the commutators.
    pub fn standard() -> Self {
        LocalityProbe {
            f: TestFunction::bump(lit(0.18), lit(0.15), T::one()).expect("valid bump"),
            g: TestFunction::bump(lit(0.27), lit(0.18), T::one()).expect("valid bump"),
            width: 1.0,
            tol: 1e-5,
            algebraic: 1e-11,
        }
    }
}

/// A scalar transform placed on every internal index; stays in H for any bar involution.
pub fn lift_uniform<T: Real>(v: &OneParticleVector<T>, leg: &LegSpace<T>) -> Result<OneParticleVector<T>> {
    if leg.d() == 1 {
        return Ok(v.clone());
    }
    let inner = v.clone();
    let mut out = OneParticleVector::from_fn(leg.internal.clone(), VectorDomain::Entire, v.label(), move |_, z| inner.eval(0, z));
    if let Some(cert) = v.certificate() {
        out = out.with_certificate(cert);
    }
    Ok(out)
}

fn gaussian_level<T: Real>(leg: &LegSpace<T>, width: f64) -> Result<LeggedTensor<T>> {
    let samples: Vec<C<T>> = (0..leg.dim()).map(|i| cr(lit((-(to_f64(leg.rapidity(i)) / width).powi(2)).exp()))).collect();
    let t = LeggedTensor::vector(leg.clone(), samples)?;
    let n = t.norm();
    Ok(t.scale(cr(T::one() / n)))
}

fn one_particle<T: Real>(leg: &LegSpace<T>, nmax: usize, width: f64) -> Result<FockVector<T>> {
    let levels = vec![LeggedTensor::scalar(czero()), gaussian_level(leg, width)?];
    let mut v = FockVector::from_levels(leg.clone(), levels)?;
    while v.nmax() < nmax {
        let mut lv = v.levels().to_vec();
        lv.push(LeggedTensor::zeros(vec![leg.clone(); lv.len()])?);
        v = FockVector::from_levels(leg.clone(), lv)?;
    }
    Ok(v)
}

fn vacuum<T: Real>(leg: &LegSpace<T>) -> Result<FockVector<T>> {
    FockVector::vacuum(leg.clone(), 1)
}

// Diagonal multiplier exp(i Σ_gen t_gen · gen(α, q)) applied on every leg of the sector.
fn translate_sector<T: Real>(
    bundle: &TripleBundle<T>,
    t: (f64, f64),
    m: usize,
    n: usize,
    x: &LeggedTensor<T>,
) -> Result<LeggedTensor<T>> {
    let mut out = x.clone();
    for (k, side) in std::iter::repeat(Side::Left).take(m).chain(std::iter::repeat(Side::Right).take(n)).enumerate() {
        let leg = bundle.side(side).leg();
        let diag = CMatrix::from_fn(leg.dim(), leg.dim(), |r, col| {
            if r != col {
                return czero();
            }
            let (alpha, node) = leg.split(r);
            let q = to_f64(leg.grid.nodes()[node]);
            let phase: f64 = bundle
                .generators
                .iter()
                .filter(|g| g.side == side)
                .map(|g| g.value(alpha, q) * if g.coupling == Side::Left { t.0 } else { t.1 })
                .sum();
            c(T::zero(), lit(phase)).exp()
        });
        out = out.apply_on_leg(&diag, k)?;
    }
    Ok(out)
}

fn twist_translation_residual<T: Real>(bundle: &TripleBundle<T>) -> Result<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a15);
    let (left, right) = (bundle.left.leg(), bundle.right.leg());
    let mut worst = 0.0f64;
    let mut count = 0;
    for &(m, n) in &SAMPLE_SECTORS {
        let tw = twist(&bundle.s, left, right, m, n)?;
        let x = LeggedTensor::random(sector_legs(left, right, m, n), &mut rng)?;
        let nx = to_f64(x.norm());
        for &t in &TRANSLATION_SAMPLES {
            let a = tw.apply(&translate_sector(bundle, t, m, n, &x)?)?;
            let b = translate_sector(bundle, t, m, n, &tw.apply(&x)?)?;
            worst = worst.max(to_f64(a.sub(&b)?.norm()) / nx);
            count += 1;
        }
    }
    Ok((worst, count))
}

fn one_sided_residual<T: Real>(bundle: &TripleBundle<T>) -> Result<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0e5a);
    let (left, right) = (bundle.left.leg(), bundle.right.leg());
    let mut worst = 0.0f64;
    let mut count = 0;
    for (m, n) in [(0, 0), (1, 0), (2, 0), (0, 1), (0, 2)] {
        let tw = twist(&bundle.s, left, right, m, n)?;
        let x = if m + n == 0 {
            LeggedTensor::scalar(cone())
        } else {
            LeggedTensor::random(sector_legs(left, right, m, n), &mut rng)?
        };
        worst = worst.max(to_f64(tw.apply(&x)?.sub(&x)?.norm()) / to_f64(x.norm()));
        count += 1;
    }
    Ok((worst, count))
}

/// Twisted commutators on both sides with the probe: Ω ⊗ h for the left fields, h ⊗ Ω for the right.
pub fn twisted_locality_entries<T: Real>(
    bundle: &TripleBundle<T>,
    probe: &LocalityProbe<T>,
    prefix: &str,
) -> Result<Vec<ReportEntry>> {
    let f = half_line_transform(&probe.f, TransformSign::Plus)?;
    let g = half_line_transform(&probe.g, TransformSign::Plus)?;
    let mut out = Vec::new();
    for side in [Side::Left, Side::Right] {
        let (own, other) = match side {
            Side::Left => (&bundle.left, &bundle.right),
            Side::Right => (&bundle.right, &bundle.left),
        };
        let h = one_particle(other.leg(), 1, probe.width)?;
        let state = match side {
            Side::Left => TwoSidedVector::product(&vacuum(own.leg())?, &h)?,
            Side::Right => TwoSidedVector::product(&h, &vacuum(own.leg())?)?,
        };
        let fl = lift_uniform(&f, own.leg())?;
        let gl = lift_uniform(&g, own.leg())?;
        let res = twisted_commutator(
            &bundle.left.braiding,
            &bundle.left.r,
            &bundle.s,
            &bundle.right.braiding,
            &bundle.right.r,
            &fl,
            &gl,
            &state,
            side,
            Certification::Required,
        )?;
        let name = match side {
            Side::Left => "left",
            Side::Right => "right",
        };
        out.extend(res.entries(&format!("{prefix}.{name}"), probe.tol, probe.algebraic));
    }
    Ok(out)
}

/// Structural checks of a massless bundle: (i) twist vs translations, (ii) one-sided sectors fixed,
/// (iii) twisted commutators on both sides.
pub fn assemble_massless<T: Real>(bundle: &TripleBundle<T>, probe: &LocalityProbe<T>) -> Result<ValidationReport> {
    if bundle.kind != BundleKind::Massless {
        return Err(Error::Structural("assemble_massless needs a massless bundle".into()));
    }
    let mut report = ValidationReport::new(bundle.s.label(), format!("G={}", bundle.left.leg().nodes()));
    let (res, count) = twist_translation_residual(bundle)?;
    report.push(ReportEntry::new("massless.twist_translation", res, count, probe.algebraic));
    let (res, count) = one_sided_residual(bundle)?;
    report.push(ReportEntry::new("massless.one_sided_identity", res, count, probe.algebraic));
    report.extend(twisted_locality_entries(bundle, probe, "massless")?);
    Ok(report)
}

/// (i) generator positivity, (ii) twist vs T̃, (iii) mass compatibility of both sides,
/// (iv) the assembled two-particle S-matrix against the block-diagonal layout.
pub fn assemble_massive<T: Real>(bundle: &TripleBundle<T>, algebraic: f64) -> Result<ValidationReport> {
    if bundle.kind != BundleKind::Massive {
        return Err(Error::Structural("assemble_massive needs a massive bundle".into()));
    }
    let mut report = ValidationReport::new(bundle.s.label(), format!("G={}", bundle.left.leg().nodes()));
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for g in &bundle.generators {
        let leg = bundle.side(g.side).leg();
        for alpha in 0..leg.d() {
            for &q in leg.grid.nodes() {
                worst = worst.min(g.value(alpha, to_f64(q)));
                count += 1;
            }
        }
    }
    // residual: how far the smallest multiplier value is from being positive
    let violation = if worst > 0.0 { 0.0 } else { 1.0 - worst.min(0.0) };
    report.push(ReportEntry::new("massive.generator_positivity", violation, count, 0.0));
    let (res, count) = twist_translation_residual(bundle)?;
    report.push(ReportEntry::new("massive.twist_translation", res, count, algebraic));
    for (name, side) in [("left", &bundle.left), ("right", &bundle.right)] {
        let masses = side.masses.as_ref().expect("massive bundles carry masses");
        let e = check_mass_compatibility(&side.r, masses, &side.leg().grid, algebraic)?;
        report.push(e.prefixed(&format!("massive.{name}")));
    }
    let (res, count) = block_layout_residual(bundle)?;
    report.push(ReportEntry::new("massive.block_layout", res, count, algebraic));
    Ok(report)
}

// Sector-by-sector construction with injections E₊, E₋ compared with assemble_block_diagonal.
fn block_layout_residual<T: Real>(bundle: &TripleBundle<T>) -> Result<(f64, usize)> {
    let (rp, rm, s) = (&bundle.left.r, &bundle.right.r, &bundle.s);
    let (dp, dm) = (rp.d(), rm.d());
    let n = dp + dm;
    let inj = |d: usize, off: usize| CMatrix::from_fn(n, d, |r, col| if r == off + col { cone() } else { czero() });
    let (ep, em) = (inj(dp, 0), inj(dm, dp));
    // K(M)[(v,u),(x,y)] = M[(x,y),(u,v)] on a d₁ ⊗ d₂ space, result on d₂ ⊗ d₁
    let k = |mat: &CMatrix<T>, d1: usize, d2: usize| {
        CMatrix::from_fn(d1 * d2, d1 * d2, |r, col| {
            let (v, u) = (r / d1, r % d1);
            let (x, y) = (col / d2, col % d2);
            mat[(x * d2 + y, u * d2 + v)]
        })
    };
    let mut worst = 0.0f64;
    let mut count = 0;
    for &q in bundle.left.leg().grid.nodes() {
        let got = assemble_block_diagonal(rp, s, rm, q)?;
        let rpp = rp.eval_r(c(-q, T::PI()))?;
        let rmm = rm.eval_r(cr(q))?;
        let sq = s.eval(cr(q))?;
        let pp = ep.kron(&ep).matmul(&k(&rpp, dp, dp)).matmul(&ep.kron(&ep).transpose());
        let mm = em.kron(&em).matmul(&k(&rmm, dm, dm)).matmul(&em.kron(&em).transpose());
        let mp = em.kron(&ep).matmul(&k(&sq, dp, dm)).matmul(&ep.kron(&em).transpose());
        let pm = ep.kron(&em).matmul(&k(&sq, dp, dm).conj().transpose()).matmul(&em.kron(&ep).transpose());
        let expect = pp.add(&mm).add(&mp).add(&pm);
        worst = worst.max(to_f64(got.sub(&expect).max_abs()));
        count += 1;
    }
    Ok((worst, count))
}

/// Convenience: both chiral sides on one grid with the given scattering functions.
pub fn sides_on_grid<T: Real>(
    r_plus: MatrixScatteringFunction<T>,
    r_minus: MatrixScatteringFunction<T>,
    grid: Arc<RapidityGrid<T>>,
    nmax: usize,
) -> Result<(ChiralSide<T>, ChiralSide<T>)> {
    Ok((ChiralSide::new(r_plus, grid.clone(), nmax)?, ChiralSide::new(r_minus, grid, nmax)?))
}
