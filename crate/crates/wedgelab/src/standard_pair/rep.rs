use std::sync::Arc;

use super::vector::{OneParticleVector, VectorDomain};
use crate::error::{Error, Result};
use crate::scalar::{c, lit, to_f64, Real, C};
use crate::tensor::{InternalIndexSpace, LegSpace, RapidityGrid};

/// One-particle representation in rapidity space: P acts as e^q, Δ^{-is} as the shift by 2πs,
/// J as componentwise conjugation composed with the bar involution.
#[derive(Clone, Debug)]
pub struct StandardPairRep<T> {
    space: InternalIndexSpace,
    grid: Arc<RapidityGrid<T>>,
    mass: T,
    index_masses: Vec<T>,
}

impl<T: Real> StandardPairRep<T> {
    pub fn new(space: InternalIndexSpace, grid: Arc<RapidityGrid<T>>, mass: T) -> Result<Self> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::param("mass", format!("must be positive and finite, got {mass}")));
        }
        let index_masses = vec![T::one(); space.dim()];
        Ok(StandardPairRep { space, grid, mass, index_masses })
    }

    /// Scalar representation on the default grid with m = 1.
    pub fn scalar() -> Self {
        let space = InternalIndexSpace::new(1).expect("d = 1");
        Self::new(space, Arc::new(RapidityGrid::standard()), T::one()).expect("m = 1")
    }

    /// Per-index masses used by [`Self::opposite_translate`]; must respect the bar involution.
    pub fn with_index_masses(mut self, masses: Vec<T>) -> Result<Self> {
        if masses.len() != self.space.dim() {
            return Err(Error::Structural(format!("{} masses for multiplicity {}", masses.len(), self.space.dim())));
        }
        for (a, &m) in masses.iter().enumerate() {
            if !(m > T::zero()) || !m.is_finite() {
                return Err(Error::param(format!("masses[{a}]"), "must be positive and finite"));
            }
            if m != masses[self.space.bar(a)] {
                return Err(Error::param(format!("masses[{a}]"), "differs from the mass of the conjugate index"));
            }
        }
        self.index_masses = masses;
        Ok(self)
    }

    pub fn space(&self) -> &InternalIndexSpace {
        &self.space
    }

    pub fn grid(&self) -> &Arc<RapidityGrid<T>> {
        &self.grid
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn index_masses(&self) -> &[T] {
        &self.index_masses
    }

    pub fn leg(&self) -> LegSpace<T> {
        LegSpace::new(self.space.clone(), self.grid.clone())
    }

    fn check_space(&self, f: &OneParticleVector<T>) -> Result<()> {
        if f.space() != &self.space {
            return Err(Error::Structural("vector does not belong to this representation".into()));
        }
        Ok(())
    }

    /// T(t): multiplication by e^{i t e^q}.
    pub fn translate(&self, f: &OneParticleVector<T>, t: T) -> Result<OneParticleVector<T>> {
        self.check_space(f)?;
        Ok(f.map_pointwise(None, format!("T({t}){}", f.label()), move |_, z, v| {
            v * (C::new(T::zero(), t) * z.exp()).exp()
        }))
    }

    /// T'(t): multiplication by e^{i t (m^α)² e^{−q}} on component α.
    pub fn opposite_translate(&self, f: &OneParticleVector<T>, t: T) -> Result<OneParticleVector<T>> {
        self.check_space(f)?;
        let m2: Vec<T> = self.index_masses.iter().map(|&m| m * m).collect();
        Ok(f.map_pointwise(None, format!("T'({t}){}", f.label()), move |a, z, v| {
            v * (C::new(T::zero(), t * m2[a]) * (-z).exp()).exp()
        }))
    }

    /// Δ^{-is}: (Δ^{-is} f)(q) = f(q + 2πs).
    ///
    /// Grid-backed vectors are only accepted when every shifted node is again a node.
    pub fn modular_flow(&self, f: &OneParticleVector<T>, s: T) -> Result<OneParticleVector<T>> {
        self.check_space(f)?;
        let shift = T::TAU() * s;
        let label = format!("Δ^(-i{s}){}", f.label());
        if let Some(eval) = f.evaluator() {
            let dom = f.domain().expect("evaluator-backed");
            return Ok(OneParticleVector::from_fn(self.space.clone(), dom, label, move |a, z| {
                eval(a, z + C::new(shift, T::zero()))
            }));
        }
        let t = f.grid_samples().expect("grid-backed");
        let leg = t.leg(0).clone();
        let nodes = leg.grid.nodes();
        let tol = lit::<T>(1e-12) * (T::one() + leg.grid.qmax());
        let mut perm = Vec::with_capacity(nodes.len());
        for &q in nodes {
            let target = q + shift;
            match nodes.iter().position(|&p| (p - target).abs() <= tol) {
                Some(k) => perm.push(k),
                None => {
                    return Err(Error::Domain(format!(
                        "shift 2π·{s} is not commensurate with the grid (node {} has no image)",
                        to_f64(q)
                    )))
                }
            }
        }
        let d = leg.d();
        let src = t.as_slice();
        let data = (0..src.len())
            .map(|i| {
                let (a, k) = leg.split(i);
                src[a + d * perm[k]]
            })
            .collect();
        OneParticleVector::from_samples(leg, data, label)
    }

    /// J: (Jf)^α(q) = conj f^{ᾱ}(q). The result lives on the real line only.
    pub fn modular_conjugate(&self, f: &OneParticleVector<T>) -> Result<OneParticleVector<T>> {
        self.check_space(f)?;
        let label = format!("J{}", f.label());
        if let Some(eval) = f.evaluator() {
            let bar = self.space.clone();
            return Ok(OneParticleVector::from_fn(self.space.clone(), VectorDomain::RealLine, label, move |a, z| {
                Ok(eval(bar.bar(a), c(z.re, T::zero()))?.conj())
            }));
        }
        let t = f.grid_samples().expect("grid-backed");
        let leg = t.leg(0).clone();
        let d = leg.d();
        let src = t.as_slice();
        let data = (0..src.len())
            .map(|i| {
                let (a, k) = leg.split(i);
                src[self.space.bar(a) + d * k].conj()
            })
            .collect();
        OneParticleVector::from_samples(leg, data, label)
    }
}
