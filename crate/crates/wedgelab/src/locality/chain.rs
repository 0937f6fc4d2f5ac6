use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::AntilinearOp;
use crate::linalg::{embed_in_product, CMatrix};
use crate::scalar::{cr, czero, Real, C};
use crate::scattering::{Kind, MatrixScatteringFunction};
use crate::standard_pair::OneParticleVector;
use crate::tensor::legged::increment;
use crate::tensor::{LegSpace, LeggedTensor};

/// Largest number of (test-leg node, node tuple) pairs an A-operator may visit.
pub const MAX_CHAIN_WORK: usize = 1 << 26;

/// Pointwise two-leg factor pairing the test-function leg with one target leg.
///
/// The block at (p, q) acts on (test index) ⊗ (target index), test index first, where p is the
/// test-leg rapidity and q the target rapidity.
#[derive(Clone)]
pub struct ChainFactor<T> {
    target: usize,
    label: String,
    block: Arc<dyn Fn(T, T) -> Result<CMatrix<T>> + Send + Sync>,
}

impl<T: Real> std::fmt::Debug for ChainFactor<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChainFactor").field("target", &self.target).field("label", &self.label).finish()
    }
}

impl<T: Real> ChainFactor<T> {
    /// R(p − q) in the R-convention: an LL function between two legs of the same side.
    pub fn difference(r: &MatrixScatteringFunction<T>, target: usize) -> Result<Self> {
        if r.kind() == Kind::LR {
            return Err(Error::Structural(format!("{} is a left-right function", r.label())));
        }
        let r = r.clone();
        Ok(ChainFactor {
            target,
            label: format!("R[{}]", r.label()),
            block: Arc::new(move |p, q| r.eval_r(cr(p - q))),
        })
    }

    /// S(p + q) with the test leg on the left side and the target on the right.
    pub fn sum_left(s: &MatrixScatteringFunction<T>, target: usize) -> Result<Self> {
        if s.kind() != Kind::LR {
            return Err(Error::Structural(format!("{} is not a left-right function", s.label())));
        }
        let s = s.clone();
        Ok(ChainFactor { target, label: format!("S[{}]", s.label()), block: Arc::new(move |p, q| s.eval(cr(p + q))) })
    }

    /// S(q + p) with the target on the left side and the test leg on the right.
    pub fn sum_right(s: &MatrixScatteringFunction<T>, target: usize) -> Result<Self> {
        if s.kind() != Kind::LR {
            return Err(Error::Structural(format!("{} is not a left-right function", s.label())));
        }
        let (dl, dr) = (s.left_space().dim(), s.right_space().dim());
        let s = s.clone();
        Ok(ChainFactor {
            target,
            label: format!("S[{}]", s.label()),
            block: Arc::new(move |p, q| {
                let m = s.eval(cr(q + p))?;
                // reorder (left, right) to (right, left) so the test index comes first
                let sw = |r: usize| (r % dl) * dr + r / dl;
                Ok(CMatrix::from_fn(dl * dr, dl * dr, |r, c| m[(sw(r), sw(c))]))
            }),
        })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Whether the test functions must carry a support certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Certification {
    /// Refuse inputs without a certificate of membership in H.
    #[default]
    Required,
    /// Accept any evaluable input; for negative controls only.
    Waived,
}

pub(crate) fn require_certified<T: Real>(v: &OneParticleVector<T>, what: &str, mode: Certification) -> Result<()> {
    if mode == Certification::Waived {
        return Ok(());
    }
    match v.certificate() {
        Some(c) if c.certifies_membership() => Ok(()),
        _ => Err(Error::Precondition { what: format!("{what} ({}) is not certified to lie in H", v.label()), residual: f64::INFINITY }),
    }
}

/// The operator ξ ↦ ⟨g'|₁ (chain)(f ⊗ ξ) with g' = J_H g, the leg-1 integral done on the test leg's grid.
///
/// It acts by multiplication: on the node tuple k of the target legs it is the matrix `block(k)` over
/// the combined internal index of the targets.
#[derive(Clone, Debug)]
pub struct AOperator<T> {
    targets: Vec<LegSpace<T>>,
    blocks: Vec<CMatrix<T>>,
    residual: f64,
    norm: f64,
}

/// Builds the A-operator of `chain` (displayed order, leftmost factor applied last) for certified f, g.
pub fn a_operator<T: Real>(
    test_leg: &LegSpace<T>,
    chain: &[ChainFactor<T>],
    targets: &[LegSpace<T>],
    f: &OneParticleVector<T>,
    g: &OneParticleVector<T>,
) -> Result<AOperator<T>> {
    a_operator_with(test_leg, chain, targets, f, g, Certification::Required)
}

pub fn a_operator_with<T: Real>(
    test_leg: &LegSpace<T>,
    chain: &[ChainFactor<T>],
    targets: &[LegSpace<T>],
    f: &OneParticleVector<T>,
    g: &OneParticleVector<T>,
    mode: Certification,
) -> Result<AOperator<T>> {
    require_certified(f, "f", mode)?;
    require_certified(g, "g", mode)?;
    let fs = f.samples(test_leg)?;
    let gp = AntilinearOp::modular_conjugation(test_leg.clone()).apply(&g.samples(test_leg)?);
    a_operator_from_samples(test_leg, chain, targets, &fs, &gp)
}

/// A-operator from grid samples of f and of g' itself (no conjugation applied).
pub fn a_operator_from_samples<T: Real>(
    test_leg: &LegSpace<T>,
    chain: &[ChainFactor<T>],
    targets: &[LegSpace<T>],
    f: &[C<T>],
    g_prime: &[C<T>],
) -> Result<AOperator<T>> {
    if f.len() != test_leg.dim() || g_prime.len() != test_leg.dim() {
        return Err(Error::Structural("test-function samples do not match the test leg".into()));
    }
    if let Some(bad) = chain.iter().find(|c| c.target >= targets.len()) {
        return Err(Error::Structural(format!("chain factor {} targets leg {} of {}", bad.label, bad.target, targets.len())));
    }
    let ds = test_leg.d();
    let dims: Vec<usize> = std::iter::once(ds).chain(targets.iter().map(|l| l.d())).collect();
    let inner: usize = dims[1..].iter().product();
    let gs = test_leg.nodes();
    let shape: Vec<usize> = targets.iter().map(|l| l.nodes()).collect();
    let tuples: usize = shape.iter().product();
    if tuples.saturating_mul(gs) > MAX_CHAIN_WORK {
        return Err(Error::Capacity(format!("A-operator over {tuples} node tuples and {gs} test nodes")));
    }
    // every factor tabulated once: table[f][p * G_t + q]
    let tables = chain
        .iter()
        .map(|c| {
            let tgt = &targets[c.target];
            let mut out = Vec::with_capacity(gs * tgt.nodes());
            for &p in test_leg.grid.nodes() {
                for &q in tgt.grid.nodes() {
                    let b = (c.block)(p, q)?;
                    if b.rows() != ds * tgt.d() || b.cols() != ds * tgt.d() {
                        return Err(Error::Structural(format!("factor {} has the wrong block size", c.label)));
                    }
                    out.push(embed_in_product(&b, &dims, 0, c.target + 1)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = test_leg.grid.weights();
    let mut blocks = Vec::with_capacity(tuples);
    let mut k = vec![0usize; shape.len()];
    for _ in 0..tuples {
        let mut a = CMatrix::zeros(inner, inner);
        for p in 0..gs {
            let mut m = CMatrix::identity(ds * inner);
            for (c, table) in chain.iter().zip(&tables) {
                let q = k[c.target];
                m = m.matmul(&table[p * targets[c.target].nodes() + q]);
            }
            let w = cr(weights[p]);
            for (alpha, ga) in (0..ds).map(|al| (al, g_prime[test_leg.index(al, p)].conj())) {
                if ga == czero() {
                    continue;
                }
                for gamma in 0..ds {
                    let fg = f[test_leg.index(gamma, p)];
                    if fg == czero() {
                        continue;
                    }
                    let coef = w * ga * fg;
                    for delta in 0..inner {
                        for beta in 0..inner {
                            let z = m[(alpha * inner + delta, gamma * inner + beta)];
                            a[(delta, beta)] = a[(delta, beta)] + coef * z;
                        }
                    }
                }
            }
        }
        blocks.push(a);
        increment(&mut k, &shape);
    }
    let mut diff = 0.0f64;
    let mut norm = 0.0f64;
    for b in &blocks {
        diff = nan_max(diff, b.sub(&b.adjoint()).spectral_norm());
        norm = nan_max(norm, b.spectral_norm());
    }
    let residual = if norm > 0.0 { diff / norm } else { diff };
    Ok(AOperator { targets: targets.to_vec(), blocks, residual, norm })
}

impl<T: Real> AOperator<T> {
    /// ‖A − A*‖ / ‖A‖ (zero for the zero operator).
    pub fn self_adjointness_residual(&self) -> f64 {
        self.residual
    }

    /// ‖A‖: the largest block norm.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn targets(&self) -> &[LegSpace<T>] {
        &self.targets
    }

    /// The multiplier on node tuple `k` (flattened, last target fastest).
    pub fn block(&self, k: usize) -> &CMatrix<T> {
        &self.blocks[k]
    }

    pub fn apply(&self, xi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        self.apply_blocks(xi, false)
    }

    pub fn apply_adjoint(&self, xi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        self.apply_blocks(xi, true)
    }

    /// (A − A*) ξ.
    pub fn apply_anti_hermitian_part(&self, xi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        self.apply(xi)?.sub(&self.apply_adjoint(xi)?)
    }

    fn apply_blocks(&self, xi: &LeggedTensor<T>, adjoint: bool) -> Result<LeggedTensor<T>> {
        let r = self.targets.len();
        if xi.rank() != r || xi.legs().iter().zip(&self.targets).any(|(a, b)| !a.compatible(b)) {
            return Err(Error::Structural("tensor legs differ from the A-operator's target legs".into()));
        }
        if r == 0 {
            let b = self.blocks[0][(0, 0)];
            return Ok(xi.scale(if adjoint { b.conj() } else { b }));
        }
        let strides = xi.strides();
        let ds: Vec<usize> = self.targets.iter().map(|l| l.d()).collect();
        let shape: Vec<usize> = self.targets.iter().map(|l| l.nodes()).collect();
        let inner: usize = ds.iter().product();
        let src = xi.as_slice();
        let mut out = LeggedTensor::zeros(self.targets.clone())?;
        let dst = out.as_mut_slice();
        let mut k = vec![0usize; r];
        let mut alpha = vec![0usize; r];
        let mut flat = vec![0usize; inner];
        for block in &self.blocks {
            for (slot, f) in flat.iter_mut().enumerate() {
                // internal multi-index of `slot`, last target fastest
                let mut rem = slot;
                for leg in (0..r).rev() {
                    alpha[leg] = rem % ds[leg];
                    rem /= ds[leg];
                }
                *f = (0..r).map(|leg| (alpha[leg] + ds[leg] * k[leg]) * strides[leg]).sum();
            }
            for (row, &fr) in flat.iter().enumerate() {
                let mut acc = czero();
                for (col, &fc) in flat.iter().enumerate() {
                    let z = if adjoint { block[(col, row)].conj() } else { block[(row, col)] };
                    acc = acc + z * src[fc];
                }
                dst[fr] = acc;
            }
            increment(&mut k, &shape);
        }
        Ok(out)
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
