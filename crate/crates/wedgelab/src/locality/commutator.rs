use super::chain::{a_operator_with, require_certified, AOperator, Certification, ChainFactor};
use crate::error::{Error, Result};
use crate::fock::{reflected_field, segal_field, BraidingData, FockVector};
use crate::report::ReportEntry;
use crate::scalar::{to_f64, Real};
use crate::scattering::MatrixScatteringFunction;
use crate::standard_pair::OneParticleVector;
use crate::tensor::LeggedTensor;

/// Largest leakage a Fock vector may carry into a commutator experiment.
pub const LEAKAGE_LIMIT: f64 = 1e-14;

/// Outcome of one field-commutator experiment; all values are normalized by ‖f‖‖g‖‖(N+1)Ψ‖.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorResidual {
    /// ‖[Jφ(g)J, φ(f)]Ψ‖.
    pub residual: f64,
    /// Worst level-wise mismatch between the composed commutator and (A − A*)Ψ_n.
    pub closed_form: f64,
    /// Norm of the parts changing the particle number by ±2 (creation-creation and its adjoint).
    pub number_changing: f64,
    /// Largest ‖A − A*‖/‖A‖ over the levels touched.
    pub a_residual: f64,
    /// Grid size of the experiment.
    pub grid: usize,
}

impl CommutatorResidual {
    /// Report entries with the given commutator tolerance; the algebraic parts use `algebraic`.
    pub fn entries(&self, prefix: &str, tol: f64, algebraic: f64) -> Vec<ReportEntry> {
        vec![
            ReportEntry::new(format!("{prefix}.commutator"), self.residual, 1, tol).with_grid(self.grid),
            ReportEntry::new(format!("{prefix}.closed_form"), self.closed_form, 1, algebraic).with_grid(self.grid),
            ReportEntry::new(format!("{prefix}.number_changing"), self.number_changing, 1, algebraic).with_grid(self.grid),
        ]
    }
}

/// The chain R_{1,n+1} R_{1,n} ⋯ R_{12} on n target legs, in displayed order.
pub fn wedge_chain<T: Real>(r: &MatrixScatteringFunction<T>, n: usize) -> Result<Vec<ChainFactor<T>>> {
    (0..n).rev().map(|t| ChainFactor::difference(r, t)).collect()
}

/// Normalized ‖[Jφ(g)J, φ(f)]Ψ‖ for certified f, g and a symmetric, leakage-free Ψ.
///
/// `r` must be the function `b` was built from; it supplies the closed-form chain.
pub fn half_line_commutator<T: Real>(
    b: &BraidingData<T>,
    r: &MatrixScatteringFunction<T>,
    f: &OneParticleVector<T>,
    g: &OneParticleVector<T>,
    psi: &FockVector<T>,
) -> Result<CommutatorResidual> {
    half_line_commutator_with(b, r, f, g, psi, Certification::Required)
}

pub fn half_line_commutator_with<T: Real>(
    b: &BraidingData<T>,
    r: &MatrixScatteringFunction<T>,
    f: &OneParticleVector<T>,
    g: &OneParticleVector<T>,
    psi: &FockVector<T>,
    mode: Certification,
) -> Result<CommutatorResidual> {
    require_certified(f, "f", mode)?;
    require_certified(g, "g", mode)?;
    let psi = admissible(b, psi)?;
    let leg = b.leg().clone();
    let nmax = psi.nmax();
    let scale = to_f64(f.norm(&leg)?) * to_f64(g.norm(&leg)?) * to_f64(psi.number_weighted_norm(|n| ((n + 1) * (n + 1)) as f64));
    if !(scale > 0.0) {
        return Err(Error::Domain("commutator normalization vanishes (zero f, g or Ψ)".into()));
    }
    // two spare levels so that neither field order loses anything to truncation
    let mut total = FockVector::zero(leg.clone(), nmax + 2)?;
    let (mut closed, mut changing, mut a_res) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..=nmax {
        if to_f64(psi.level(n).max_abs()) == 0.0 {
            continue;
        }
        let single = single_level(&psi, n, nmax + 2)?;
        let lhs = reflected_field(b, g, &segal_field(b, f, &single)?)?;
        let rhs = segal_field(b, f, &reflected_field(b, g, &single)?)?;
        let comm = lhs.sub(&rhs)?;
        let a: AOperator<T> = a_operator_with(&leg, &wedge_chain(r, n)?, &vec![leg.clone(); n], f, g, mode)?;
        let expect = a.apply_anti_hermitian_part(psi.level(n))?;
        closed = closed.max(to_f64(comm.level(n).sub(&expect)?.norm()));
        let mut off = 0.0f64;
        for m in [n.wrapping_sub(2), n + 2] {
            if m <= nmax + 2 {
                off += to_f64(comm.level(m).norm_sqr());
            }
        }
        changing = changing.max(off.sqrt());
        a_res = a_res.max(a.self_adjointness_residual());
        total = total.add(&comm)?;
    }
    Ok(CommutatorResidual {
        residual: to_f64(total.norm()) / scale,
        closed_form: closed / scale,
        number_changing: changing / scale,
        a_residual: a_res,
        grid: leg.nodes(),
    })
}

fn admissible<T: Real>(b: &BraidingData<T>, psi: &FockVector<T>) -> Result<FockVector<T>> {
    if !psi.leg().compatible(b.leg()) {
        return Err(Error::Structural("Fock vector and braiding live on different legs".into()));
    }
    if psi.leakage() > LEAKAGE_LIMIT {
        return Err(Error::Precondition { what: "Ψ carries truncation leakage".into(), residual: psi.leakage() });
    }
    if psi.is_symmetric() {
        Ok(psi.clone())
    } else {
        psi.clone().certify_symmetric(b)
    }
}

fn single_level<T: Real>(psi: &FockVector<T>, n: usize, nmax: usize) -> Result<FockVector<T>> {
    let leg = psi.leg().clone();
    let levels = (0..=nmax)
        .map(|m| if m == n { Ok(psi.level(n).clone()) } else { LeggedTensor::zeros(vec![leg.clone(); m]) })
        .collect::<Result<Vec<_>>>()?;
    Ok(FockVector::with_parts(leg, levels, true, 0.0))
}
