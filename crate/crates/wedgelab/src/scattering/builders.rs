use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{swap_row_pair, CMatrix};
use crate::scalar::{c, cone, czero, i_unit, lit, Real, C};
use crate::scattering::function::{Convention, Domain, Kind, MatrixScatteringFunction};
use crate::tensor::InternalIndexSpace;

/// Scalar strip function used as a building block.
pub type ScalarFn<T> = Arc<dyn Fn(C<T>) -> C<T> + Send + Sync>;

/// (sinh z − i sin b)/(sinh z + i sin b).
pub fn sinh_factor<T: Real>(z: C<T>, b: T) -> C<T> {
    let s = z.sinh();
    let isb = i_unit::<T>() * b.sin();
    (s - isb) / (s + isb)
}

fn check_blocks(blocks: &[f64]) -> Result<()> {
    for (k, &b) in blocks.iter().enumerate() {
        if !(b > 0.0 && b < std::f64::consts::PI) {
            return Err(Error::param(format!("blocks[{k}]"), format!("b = {b} must lie in (0, pi)")));
        }
    }
    Ok(())
}

fn check_sign(sign: i32) -> Result<()> {
    if sign == 1 || sign == -1 {
        Ok(())
    } else {
        Err(Error::param("sign", format!("{sign} is not +1 or -1")))
    }
}

/// sign · ∏_k (sinh z − i sin b_k)/(sinh z + i sin b_k) as a scalar function.
pub fn sinh_product<T: Real>(blocks: &[f64], sign: i32) -> Result<ScalarFn<T>> {
    check_blocks(blocks)?;
    check_sign(sign)?;
    let bs: Vec<T> = blocks.iter().map(|&b| lit(b)).collect();
    let s: T = lit(sign as f64);
    Ok(Arc::new(move |z| bs.iter().fold(c(s, T::zero()), |acc, &b| acc * sinh_factor(z, b))))
}

/// Scalar (d = 1) LL function of the sinh family.
pub fn scalar_family<T: Real>(blocks: &[f64], sign: i32) -> Result<MatrixScatteringFunction<T>> {
    let f = sinh_product::<T>(blocks, sign)?;
    let label = format!("sinh{blocks:?} sign {sign:+}");
    Ok(scalar_function(label, move |z| f(z)))
}

/// Scalar (d = 1) LL function from a closure.
pub fn scalar_function<T: Real>(
    label: impl Into<String>,
    f: impl Fn(C<T>) -> C<T> + Send + Sync + 'static,
) -> MatrixScatteringFunction<T> {
    let space = InternalIndexSpace::new(1).expect("d = 1");
    MatrixScatteringFunction::new(space, Kind::LL, Domain::Strip, label, move |z| {
        CMatrix::from_vec(1, 1, vec![f(z)])
    })
}

/// Constant LL function; `m` is read in the given convention and stored in the S-convention.
pub fn constant<T: Real>(
    m: CMatrix<T>,
    space: InternalIndexSpace,
    convention: Convention,
) -> Result<MatrixScatteringFunction<T>> {
    let d = space.dim();
    if m.rows() != d * d || m.cols() != d * d {
        return Err(Error::Structural(format!("constant matrix is {}x{}, expected {}x{}", m.rows(), m.cols(), d * d, d * d)));
    }
    let s = match convention {
        Convention::S => m,
        Convention::R => swap_row_pair(&m, d),
    };
    let label = format!("constant ({convention:?}-convention input)");
    Ok(MatrixScatteringFunction::new(space, Kind::LL, Domain::Strip, label, move |_| Ok(s.clone())))
}

/// R ≡ 1 in the R-convention: free scattering (S = F).
pub fn constant_identity<T: Real>(space: InternalIndexSpace) -> MatrixScatteringFunction<T> {
    let d = space.dim();
    constant(CMatrix::identity(d * d), space, Convention::R).expect("shape fits").with_label("constant identity")
}

/// S^{αα'}_{ββ'} = σ₁ δ_{αα'} δ_{ββ'} + σ₂ δ_{αβ'} δ_{α'β} + σ₃ δ_{αβ} δ_{α'β'} (S-convention).
///
/// Row pair (α,α'), column pair (β,β'). No validity is implied.
pub fn on_template<T: Real>(
    space: InternalIndexSpace,
    sigma1: ScalarFn<T>,
    sigma2: ScalarFn<T>,
    sigma3: ScalarFn<T>,
) -> MatrixScatteringFunction<T> {
    let d = space.dim();
    MatrixScatteringFunction::new(space, Kind::LL, Domain::Strip, "template", move |z| {
        let (s1, s2, s3) = (sigma1(z), sigma2(z), sigma3(z));
        Ok(CMatrix::from_fn(d * d, d * d, |r, col| {
            let (a, a2) = (r / d, r % d);
            let (b, b2) = (col / d, col % d);
            let mut v = czero();
            if a == a2 && b == b2 {
                v = v + s1;
            }
            if a == b2 && a2 == b {
                v = v + s2;
            }
            if a == b && a2 == b2 {
                v = v + s3;
            }
            v
        }))
    })
}

/// Constant scalar function.
pub fn scalar_constant<T: Real>(z: C<T>) -> ScalarFn<T> {
    Arc::new(move |_| z)
}

/// R(q) = s(q) · (A ⊗ A) in the R-convention, A the d×d exchange matrix and s from the sinh family.
///
/// For d = 2, A = σ_x. The matrix part commutes with the flip and with itself at all rapidities.
pub fn tensor_square<T: Real>(space: InternalIndexSpace, blocks: &[f64], sign: i32) -> Result<MatrixScatteringFunction<T>> {
    let s = sinh_product::<T>(blocks, sign)?;
    let d = space.dim();
    let a = CMatrix::from_fn(d, d, |r, col| if r + col + 1 == d { cone() } else { czero() });
    let s_conv = swap_row_pair(&a.kron(&a), d);
    let label = format!("tensor square d={d} sinh{blocks:?} sign {sign:+}");
    Ok(MatrixScatteringFunction::new(space, Kind::LL, Domain::Strip, label, move |z| Ok(s_conv.scale(s(z)))))
}

/// Constant left-right matrix acting pointwise on (left, right) indices.
pub fn lr_constant<T: Real>(
    m: CMatrix<T>,
    left: InternalIndexSpace,
    right: InternalIndexSpace,
) -> Result<MatrixScatteringFunction<T>> {
    let n = left.dim() * right.dim();
    if m.rows() != n || m.cols() != n {
        return Err(Error::Structural(format!("left-right matrix is {}x{}, expected {n}x{n}", m.rows(), m.cols())));
    }
    Ok(MatrixScatteringFunction::new_lr(left, right, Domain::Strip, "lr constant", move |_| Ok(m.clone())))
}

/// Free left-right scattering.
pub fn lr_identity<T: Real>(left: InternalIndexSpace, right: InternalIndexSpace) -> MatrixScatteringFunction<T> {
    let n = left.dim() * right.dim();
    lr_constant(CMatrix::identity(n), left, right).expect("shape fits").with_label("lr identity")
}

/// Scalar left-right function s(z) for d₊ = d₋ = 1.
pub fn lr_scalar<T: Real>(label: impl Into<String>, f: ScalarFn<T>) -> MatrixScatteringFunction<T> {
    let one = InternalIndexSpace::new(1).expect("d = 1");
    MatrixScatteringFunction::new_lr(one.clone(), one, Domain::Strip, label, move |z| CMatrix::from_vec(1, 1, vec![f(z)]))
}

/// Uses the R-convention matrix of an LL function directly as a left-right matrix (no checks).
pub fn flip_lr_unchecked<T: Real>(r: &MatrixScatteringFunction<T>) -> MatrixScatteringFunction<T> {
    let d = r.d();
    let inner = r.evaluator();
    let label = format!("flip lr of {}", r.label());
    MatrixScatteringFunction::new_lr(r.space().clone(), r.space().clone(), r.domain(), label, move |z| {
        Ok(swap_row_pair(&inner(z)?, d))
    })
}
