use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{c_is_finite, lit, Real, C};
use crate::tensor::{InternalIndexSpace, LegSpace, LeggedTensor};

/// Where an evaluator-backed vector may be evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VectorDomain {
    /// The closed strip 0 ≤ Im z ≤ π.
    Strip,
    /// Real rapidities only.
    RealLine,
    /// Any complex rapidity.
    Entire,
}

pub type ComponentEvaluator<T> = Arc<dyn Fn(usize, C<T>) -> Result<C<T>> + Send + Sync>;

#[derive(Clone)]
enum Backing<T> {
    Evaluator { eval: ComponentEvaluator<T>, domain: VectorDomain },
    Samples(LeggedTensor<T>),
}

/// Record of the test function a vector was transformed from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportCertificate {
    /// Support interval [lo, hi] of the real test function.
    pub lo: f64,
    pub hi: f64,
    /// Whether the transform used the + sign (e^{+θ}).
    pub plus: bool,
}

impl SupportCertificate {
    /// Right-supported input under the + transform: the output lies in the standard subspace.
    pub fn certifies_membership(&self) -> bool {
        self.plus && self.lo >= 0.0
    }
}

/// Element of L²(ℝ, ℂ^d), backed by a component evaluator or by grid samples.
#[derive(Clone)]
pub struct OneParticleVector<T> {
    space: InternalIndexSpace,
    backing: Backing<T>,
    certificate: Option<SupportCertificate>,
    label: String,
}

impl<T: Real> fmt::Debug for OneParticleVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let backing = match &self.backing {
            Backing::Evaluator { domain, .. } => format!("evaluator on {domain:?}"),
            Backing::Samples(t) => format!("{} samples", t.len()),
        };
        f.debug_struct("OneParticleVector")
            .field("label", &self.label)
            .field("d", &self.space.dim())
            .field("backing", &backing)
            .field("certificate", &self.certificate)
            .finish()
    }
}

impl<T: Real> OneParticleVector<T> {
    /// Evaluator-backed vector; `f(α, z)` is the component f^α(z).
    pub fn from_fn(
        space: InternalIndexSpace,
        domain: VectorDomain,
        label: impl Into<String>,
        f: impl Fn(usize, C<T>) -> Result<C<T>> + Send + Sync + 'static,
    ) -> Self {
        OneParticleVector {
            space,
            backing: Backing::Evaluator { eval: Arc::new(f), domain },
            certificate: None,
            label: label.into(),
        }
    }

    /// Scalar (d = 1) evaluator-backed vector.
    pub fn scalar(domain: VectorDomain, label: impl Into<String>, f: impl Fn(C<T>) -> Result<C<T>> + Send + Sync + 'static) -> Self {
        Self::from_fn(InternalIndexSpace::new(1).expect("d = 1"), domain, label, move |_, z| f(z))
    }

    /// Grid-backed vector from samples at leg index α + d·k.
    pub fn from_samples(leg: LegSpace<T>, samples: Vec<C<T>>, label: impl Into<String>) -> Result<Self> {
        let space = leg.internal.clone();
        let t = LeggedTensor::vector(leg, samples)?;
        Ok(OneParticleVector { space, backing: Backing::Samples(t), certificate: None, label: label.into() })
    }

    pub fn zero(space: InternalIndexSpace) -> Self {
        Self::from_fn(space, VectorDomain::Entire, "zero", |_, _| Ok(C::new(T::zero(), T::zero())))
    }

    pub fn space(&self) -> &InternalIndexSpace {
        &self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn certificate(&self) -> Option<SupportCertificate> {
        self.certificate
    }

    pub fn with_certificate(mut self, cert: SupportCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn has_evaluator(&self) -> bool {
        matches!(self.backing, Backing::Evaluator { .. })
    }

    pub fn domain(&self) -> Option<VectorDomain> {
        match &self.backing {
            Backing::Evaluator { domain, .. } => Some(*domain),
            Backing::Samples(_) => None,
        }
    }

    pub(crate) fn evaluator(&self) -> Option<ComponentEvaluator<T>> {
        match &self.backing {
            Backing::Evaluator { eval, .. } => Some(eval.clone()),
            Backing::Samples(_) => None,
        }
    }

    pub(crate) fn grid_samples(&self) -> Option<&LeggedTensor<T>> {
        match &self.backing {
            Backing::Samples(t) => Some(t),
            Backing::Evaluator { .. } => None,
        }
    }

    /// Component α at z.
    pub fn eval(&self, alpha: usize, z: C<T>) -> Result<C<T>> {
        if alpha >= self.space.dim() {
            return Err(Error::Structural(format!("component {alpha} of a multiplicity-{} vector", self.space.dim())));
        }
        match &self.backing {
            Backing::Evaluator { eval, domain } => {
                let slack = lit::<T>(1e-9);
                let ok = match domain {
                    VectorDomain::Entire => true,
                    VectorDomain::RealLine => z.im.abs() <= slack,
                    VectorDomain::Strip => z.im >= -slack && z.im <= T::PI() + slack,
                };
                if !ok {
                    return Err(match domain {
                        VectorDomain::RealLine => {
                            Error::InsufficientDomain(format!("{} is only defined on the real line", self.label))
                        }
                        _ => Error::Domain(format!("{}: Im z = {} outside the strip", self.label, z.im)),
                    });
                }
                eval(alpha, z)
            }
            Backing::Samples(_) => Err(Error::InsufficientDomain(format!(
                "{} is grid-backed and has no evaluator",
                self.label
            ))),
        }
    }

    /// Values at the nodes of `leg`, indexed α + d·k.
    pub fn samples(&self, leg: &LegSpace<T>) -> Result<Vec<C<T>>> {
        if leg.internal != self.space {
            return Err(Error::Structural("vector and leg have different index spaces".into()));
        }
        match &self.backing {
            Backing::Samples(t) => {
                if !t.leg(0).compatible(leg) {
                    return Err(Error::Structural(format!("{} was sampled on a different grid", self.label)));
                }
                Ok(t.as_slice().to_vec())
            }
            Backing::Evaluator { eval, .. } => {
                let d = leg.d();
                let mut out = Vec::with_capacity(leg.dim());
                for &q in leg.grid.nodes() {
                    for a in 0..d {
                        let v = eval(a, C::new(q, T::zero()))?;
                        if !c_is_finite(v) {
                            return Err(Error::Numerical { what: format!("{} at q = {q}", self.label), achieved: f64::INFINITY });
                        }
                        out.push(v);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Grid-backed copy sampled on `leg`.
    pub fn sampled(&self, leg: &LegSpace<T>) -> Result<Self> {
        let s = self.samples(leg)?;
        let mut v = Self::from_samples(leg.clone(), s, self.label.clone())?;
        v.certificate = self.certificate;
        Ok(v)
    }

    /// Rank-1 tensor of the samples on `leg`.
    pub fn to_tensor(&self, leg: &LegSpace<T>) -> Result<LeggedTensor<T>> {
        LeggedTensor::vector(leg.clone(), self.samples(leg)?)
    }

    /// Quadrature norm on `leg`.
    pub fn norm(&self, leg: &LegSpace<T>) -> Result<T> {
        Ok(self.to_tensor(leg)?.norm())
    }

    /// Quadrature inner product ⟨self, other⟩ on `leg`.
    pub fn inner(&self, other: &Self, leg: &LegSpace<T>) -> Result<C<T>> {
        self.to_tensor(leg)?.inner_product(&other.to_tensor(leg)?)
    }

    /// Pointwise map of the components: (α, z, f^α(z)) ↦ new value. Keeps the backing kind.
    pub(crate) fn map_pointwise(
        &self,
        domain_override: Option<VectorDomain>,
        label: String,
        m: impl Fn(usize, C<T>, C<T>) -> C<T> + Send + Sync + 'static,
    ) -> Self {
        match &self.backing {
            Backing::Evaluator { eval, domain } => {
                let inner = eval.clone();
                OneParticleVector {
                    space: self.space.clone(),
                    backing: Backing::Evaluator {
                        eval: Arc::new(move |a, z| Ok(m(a, z, inner(a, z)?))),
                        domain: domain_override.unwrap_or(*domain),
                    },
                    certificate: None,
                    label,
                }
            }
            Backing::Samples(t) => {
                let leg = t.leg(0).clone();
                let data: Vec<C<T>> = t
                    .as_slice()
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let (a, _) = leg.split(i);
                        m(a, C::new(leg.rapidity(i), T::zero()), v)
                    })
                    .collect();
                OneParticleVector {
                    space: self.space.clone(),
                    backing: Backing::Samples(LeggedTensor::vector(leg, data).expect("same size")),
                    certificate: None,
                    label,
                }
            }
        }
    }

    /// self + other (evaluator-backed inputs only).
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (Some(a), Some(b)) = (self.evaluator(), other.evaluator()) else {
            return Err(Error::InsufficientDomain("sum of grid-backed vectors: sample them first".into()));
        };
        if self.space != other.space {
            return Err(Error::Structural("vectors over different index spaces".into()));
        }
        let domain = narrower(self.domain().unwrap(), other.domain().unwrap());
        Ok(Self::from_fn(self.space.clone(), domain, format!("{} + {}", self.label, other.label), move |al, z| {
            Ok(a(al, z)? + b(al, z)?)
        }))
    }

    /// s · self.
    pub fn scale(&self, s: C<T>) -> Self {
        let mut v = self.map_pointwise(None, format!("{:?}*{}", s, self.label), move |_, _, f| f * s);
        v.certificate = self.certificate;
        v
    }
}

fn narrower(a: VectorDomain, b: VectorDomain) -> VectorDomain {
    use VectorDomain::*;
    match (a, b) {
        (RealLine, _) | (_, RealLine) => RealLine,
        (Strip, _) | (_, Strip) => Strip,
        _ => Entire,
    }
}
