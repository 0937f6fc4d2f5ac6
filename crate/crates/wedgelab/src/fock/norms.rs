use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::BraidingData;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cr, to_f64, Real};
use crate::tensor::{LegSpace, LeggedTensor, Permutation};

/// Largest space dimension for which operators are materialized as dense matrices.
pub const DENSE_LIMIT: usize = 4096;

/// Power iterations used above [`DENSE_LIMIT`].
pub const POWER_ITERATIONS: usize = 60;

type Map<'a, T> = dyn Fn(&LeggedTensor<T>) -> Result<LeggedTensor<T>> + 'a;

/// Matrix of a linear map on rank-n tensors in an orthonormal basis of the quadrature inner product.
pub fn dense_matrix<T: Real>(legs: &[LegSpace<T>], apply: &Map<'_, T>) -> Result<CMatrix<T>> {
    let proto = LeggedTensor::zeros(legs.to_vec())?;
    let n = proto.len();
    if n > DENSE_LIMIT {
        return Err(Error::Capacity(format!("dense operator of dimension {n} (limit {DENSE_LIMIT})")));
    }
    let sqrt_w: Vec<T> = (0..n).map(|i| proto.weight_at(i).sqrt()).collect();
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = proto.clone();
        e.as_mut_slice()[j] = cr(T::one() / sqrt_w[j]);
        let col = apply(&e)?;
        if col.len() != n {
            return Err(Error::Structural("operator changed the space dimension".into()));
        }
        for (i, z) in col.as_slice().iter().enumerate() {
            m.as_mut_slice()[i * n + j] = *z * sqrt_w[i];
        }
    }
    Ok(m)
}

/// Operator norm of a map on rank-n tensors: exact (dense SVD) up to [`DENSE_LIMIT`],
/// otherwise a seeded power-iteration estimate using `adjoint`.
pub fn operator_norm<T: Real>(legs: &[LegSpace<T>], apply: &Map<'_, T>, adjoint: &Map<'_, T>) -> Result<f64> {
    let proto = LeggedTensor::zeros(legs.to_vec())?;
    if proto.len() <= DENSE_LIMIT {
        return Ok(dense_matrix(legs, apply)?.spectral_norm());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5e);
    let mut v = LeggedTensor::random(legs.to_vec(), &mut rng)?;
    let mut estimate = 0.0f64;
    for _ in 0..POWER_ITERATIONS {
        let nv = v.norm();
        if nv == T::zero() {
            return Ok(0.0);
        }
        v = v.scale(cr(T::one() / nv));
        let w = apply(&v)?;
        estimate = to_f64(w.norm());
        v = adjoint(&w)?;
    }
    Ok(estimate)
}

/// (‖P² − P‖, ‖P − P*‖) for the rank-n projector.
pub fn projector_residuals<T: Real>(b: &BraidingData<T>, n: usize) -> Result<(f64, f64)> {
    let legs = vec![b.leg().clone(); n];
    let idem = |x: &LeggedTensor<T>| {
        let p = b.project(x)?;
        b.project(&p)?.sub(&p)
    };
    let idem_adj = |x: &LeggedTensor<T>| {
        let p = b.project_adjoint(x)?;
        b.project_adjoint(&p)?.sub(&p)
    };
    let herm = |x: &LeggedTensor<T>| b.project(x)?.sub(&b.project_adjoint(x)?);
    let herm_adj = |x: &LeggedTensor<T>| b.project_adjoint(x)?.sub(&b.project(x)?);
    Ok((operator_norm(&legs, &idem, &idem_adj)?, operator_norm(&legs, &herm, &herm_adj)?))
}

/// Operator-norm residual of F_{1⋯n} P_R = ∏_{i<j} R_{ij} P_R on rank n.
pub fn flip_product_identity_check<T: Real>(b: &BraidingData<T>, n: usize) -> Result<f64> {
    let legs = vec![b.leg().clone(); n];
    let fwd = |x: &LeggedTensor<T>| {
        let p = b.project(x)?;
        b.reverse(&p)?.sub(&b.r_product(&p)?)
    };
    let adj = |x: &LeggedTensor<T>| {
        let f = b.reverse(x)?;
        let r = r_product_adjoint(b, x)?;
        b.project_adjoint(&f.sub(&r)?)
    };
    operator_norm(&legs, &fwd, &adj)
}

fn r_product_adjoint<T: Real>(b: &BraidingData<T>, psi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
    let n = psi.rank();
    let mut out = psi.clone();
    for i in 0..n {
        for j in i + 1..n {
            out = b.r_adjoint_on(&out, i, j)?;
        }
    }
    Ok(out)
}

/// ‖Φ₁₂Φ₂₃Φ₁₂ − Φ₂₃Φ₁₂Φ₂₃‖ on rank 3.
pub fn braid_relation_residual<T: Real>(b: &BraidingData<T>) -> Result<f64> {
    let legs = vec![b.leg().clone(); 3];
    let fwd = |x: &LeggedTensor<T>| b.apply_word(x, &[0, 1, 0])?.sub(&b.apply_word(x, &[1, 0, 1])?);
    let adj = |x: &LeggedTensor<T>| b.apply_word_adjoint(x, &[0, 1, 0])?.sub(&b.apply_word_adjoint(x, &[1, 0, 1])?);
    operator_norm(&legs, &fwd, &adj)
}

/// ‖D(w₁) − D(w₂)‖ for two words on rank n.
pub fn word_difference<T: Real>(b: &BraidingData<T>, n: usize, w1: &[usize], w2: &[usize]) -> Result<f64> {
    let legs = vec![b.leg().clone(); n];
    let fwd = |x: &LeggedTensor<T>| b.apply_word(x, w1)?.sub(&b.apply_word(x, w2)?);
    let adj = |x: &LeggedTensor<T>| b.apply_word_adjoint(x, w1)?.sub(&b.apply_word_adjoint(x, w2)?);
    operator_norm(&legs, &fwd, &adj)
}

/// max over all pairs (σ, τ) in S_n of ‖D(σ)D(τ) − D(στ)‖, with every D(·) built from its reduced word.
pub fn representation_residual<T: Real>(b: &BraidingData<T>, n: usize) -> Result<(f64, usize)> {
    let perms = Permutation::all(n);
    let legs = vec![b.leg().clone(); n];
    let proto = LeggedTensor::zeros(legs.clone())?;
    if proto.len() > DENSE_LIMIT {
        return Err(Error::Capacity(format!("exhaustive check on dimension {} (limit {DENSE_LIMIT})", proto.len())));
    }
    let mats = perms
        .iter()
        .map(|p| dense_matrix(&legs, &|x: &LeggedTensor<T>| b.perm_rep(x, p)))
        .collect::<Result<Vec<_>>>()?;
    let index = |p: &Permutation| perms.iter().position(|q| q == p).expect("closed under composition");
    let mut worst = 0.0f64;
    let mut count = 0;
    for (i, s) in perms.iter().enumerate() {
        for (j, t) in perms.iter().enumerate() {
            let prod = mats[i].matmul(&mats[j]);
            let st = &mats[index(&s.compose(t))];
            worst = worst.max(to_f64(prod.sub(st).max_abs()));
            count += 1;
        }
    }
    Ok((worst, count))
}
