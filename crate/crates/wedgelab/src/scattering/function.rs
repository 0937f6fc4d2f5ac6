use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{swap_row_pair, CMatrix};
use crate::scalar::{lit, Real, C};
use crate::tensor::InternalIndexSpace;

/// Which axiom set a function is meant to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Left-left or right-right scattering; a function of rapidity differences, stored in the S-convention.
    LL,
    /// Left-right scattering; a function of rapidity sums, acting pointwise on (left, right) indices.
    LR,
    Unconstrained,
}

/// Where an evaluator can be called.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    /// The closed strip 0 ≤ Im z ≤ π.
    Strip,
    /// Real arguments only.
    RealLine,
}

/// Index convention of a d² × d² matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Convention {
    /// Row (α,β), column (γ,δ) holds S^{αβ}_{γδ}.
    S,
    /// Row (α,β) holds R^{αβ}_{γδ} = S^{βα}_{γδ}: the pointwise action on two-particle wave functions.
    R,
}

pub type MatrixEvaluator<T> = Arc<dyn Fn(C<T>) -> Result<CMatrix<T>> + Send + Sync>;

/// Matrix-valued function on the rapidity strip.
///
/// For [`Kind::LL`] the stored matrix is S^{αβ}_{γδ} with both index pairs over the same space.
/// For [`Kind::LR`] it is the left-right matrix with row (α,β), α a left and β a right index,
/// acting as (Sf)^{αβ}(q₁,q₂) = S^{αβ}_{γδ}(q₁+q₂) f^{γδ}(q₁,q₂).
#[derive(Clone)]
pub struct MatrixScatteringFunction<T> {
    left: InternalIndexSpace,
    right: InternalIndexSpace,
    eval: MatrixEvaluator<T>,
    label: String,
    kind: Kind,
    domain: Domain,
}

impl<T: Real> fmt::Debug for MatrixScatteringFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixScatteringFunction")
            .field("label", &self.label)
            .field("kind", &self.kind)
            .field("domain", &self.domain)
            .field("left", &self.left.dim())
            .field("right", &self.right.dim())
            .finish()
    }
}

impl<T: Real> MatrixScatteringFunction<T> {
    /// Function of kind LL or Unconstrained over a single index space.
    pub fn new(
        space: InternalIndexSpace,
        kind: Kind,
        domain: Domain,
        label: impl Into<String>,
        eval: impl Fn(C<T>) -> Result<CMatrix<T>> + Send + Sync + 'static,
    ) -> Self {
        MatrixScatteringFunction { left: space.clone(), right: space, eval: Arc::new(eval), label: label.into(), kind, domain }
    }

    /// Left-right function over (left, right) index spaces.
    pub fn new_lr(
        left: InternalIndexSpace,
        right: InternalIndexSpace,
        domain: Domain,
        label: impl Into<String>,
        eval: impl Fn(C<T>) -> Result<CMatrix<T>> + Send + Sync + 'static,
    ) -> Self {
        MatrixScatteringFunction { left, right, eval: Arc::new(eval), label: label.into(), kind: Kind::LR, domain }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Index space of an LL function (the left space of an LR function).
    pub fn space(&self) -> &InternalIndexSpace {
        &self.left
    }

    pub fn left_space(&self) -> &InternalIndexSpace {
        &self.left
    }

    pub fn right_space(&self) -> &InternalIndexSpace {
        &self.right
    }

    /// Multiplicity d of an LL function.
    pub fn d(&self) -> usize {
        self.left.dim()
    }

    /// Side length of the matrix.
    pub fn matrix_dim(&self) -> usize {
        self.left.dim() * self.right.dim()
    }

    pub fn evaluator(&self) -> MatrixEvaluator<T> {
        self.eval.clone()
    }

    /// Evaluates at z; z must lie in the declared domain.
    pub fn eval(&self, z: C<T>) -> Result<CMatrix<T>> {
        let slack = lit::<T>(1e-9);
        match self.domain {
            Domain::Strip => {
                if !(z.im >= -slack && z.im <= T::PI() + slack) {
                    return Err(Error::Domain(format!("{}: Im z = {} outside the strip [0, pi]", self.label, z.im)));
                }
            }
            Domain::RealLine => {
                if z.im.abs() > slack {
                    return Err(Error::InsufficientDomain(format!(
                        "{} is only defined on the real line (Im z = {})",
                        self.label, z.im
                    )));
                }
            }
        }
        let m = (self.eval)(z)?;
        let n = self.matrix_dim();
        if m.rows() != n || m.cols() != n {
            return Err(Error::Structural(format!(
                "{}: evaluator returned {}x{}, expected {n}x{n}",
                self.label,
                m.rows(),
                m.cols()
            )));
        }
        Ok(m)
    }

    pub fn eval_real(&self, q: T) -> Result<CMatrix<T>> {
        self.eval(C::new(q, T::zero()))
    }

    /// The matrix in the R-convention (only meaningful for LL functions).
    pub fn eval_r(&self, z: C<T>) -> Result<CMatrix<T>> {
        Ok(swap_row_pair(&self.eval(z)?, self.d()))
    }

    /// The same function with entry (row, col) multiplied by `factor`: a deliberately broken copy.
    pub fn perturbed(&self, row: usize, col: usize, factor: C<T>) -> Result<Self> {
        let n = self.matrix_dim();
        if row >= n || col >= n {
            return Err(Error::Structural(format!("entry ({row}, {col}) outside a {n}x{n} matrix")));
        }
        let inner = self.eval.clone();
        let mut out = self.clone();
        out.eval = Arc::new(move |z| {
            let mut m = inner(z)?;
            m[(row, col)] = m[(row, col)] * factor;
            Ok(m)
        });
        out.label = format!("{} (entry {row},{col} scaled)", self.label);
        Ok(out)
    }

    /// Restricts the function to the real line (e.g. data known only from boundary values).
    pub fn real_line_only(&self) -> Self {
        let mut out = self.clone();
        out.domain = Domain::RealLine;
        out
    }
}
