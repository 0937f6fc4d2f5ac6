use crate::error::{Error, Result};
use crate::scalar::{cone, cr, czero, lit, to_f64, Real, C};
use crate::tensor::{LegSpace, LeggedTensor};

use super::BraidingData;

/// Element of the truncated Fock space: levels Ψ_0 (a scalar) through Ψ_{N_max}.
#[derive(Clone, Debug)]
pub struct FockVector<T> {
    leg: LegSpace<T>,
    levels: Vec<LeggedTensor<T>>,
    symmetric: bool,
    leakage: f64,
}

impl<T: Real> FockVector<T> {
    /// All levels zero.
    pub fn zero(leg: LegSpace<T>, nmax: usize) -> Result<Self> {
        let levels = (0..=nmax).map(|n| LeggedTensor::zeros(vec![leg.clone(); n])).collect::<Result<Vec<_>>>()?;
        Ok(FockVector { leg, levels, symmetric: true, leakage: 0.0 })
    }

    /// Ω = (1, 0, 0, …).
    pub fn vacuum(leg: LegSpace<T>, nmax: usize) -> Result<Self> {
        let mut v = Self::zero(leg, nmax)?;
        v.levels[0] = LeggedTensor::scalar(cone());
        Ok(v)
    }

    /// Wraps explicit levels; level n must have n legs equal to `leg`. Not flagged symmetric.
    pub fn from_levels(leg: LegSpace<T>, levels: Vec<LeggedTensor<T>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Structural("a Fock vector needs at least the vacuum level".into()));
        }
        for (n, t) in levels.iter().enumerate() {
            if t.rank() != n || t.legs().iter().any(|l| !l.compatible(&leg)) {
                return Err(Error::Structural(format!("level {n} has the wrong legs")));
            }
            if !t.is_finite() {
                return Err(Error::Numerical { what: format!("level {n}"), achieved: f64::INFINITY });
            }
        }
        Ok(FockVector { leg, levels, symmetric: false, leakage: 0.0 })
    }

    /// Single-level vector with Ψ_n = t.
    pub fn from_level(leg: LegSpace<T>, nmax: usize, t: LeggedTensor<T>) -> Result<Self> {
        let n = t.rank();
        if n > nmax {
            return Err(Error::Structural(format!("level {n} above truncation {nmax}")));
        }
        let mut levels: Vec<LeggedTensor<T>> =
            (0..=nmax).map(|m| LeggedTensor::zeros(vec![leg.clone(); m])).collect::<Result<Vec<_>>>()?;
        levels[n] = t;
        Self::from_levels(leg, levels)
    }

    /// Projects every level with P_R and flags the result symmetric.
    pub fn symmetrized(&self, b: &BraidingData<T>) -> Result<Self> {
        let levels = self.levels.iter().map(|t| b.project(t)).collect::<Result<Vec<_>>>()?;
        Ok(FockVector { leg: self.leg.clone(), levels, symmetric: true, leakage: self.leakage })
    }

    /// Random vector: dense Gaussian levels projected with P_R, normalized to unit norm.
    pub fn random_symmetric(b: &BraidingData<T>, nmax: usize, rng: &mut impl rand::Rng) -> Result<Self> {
        let leg = b.leg().clone();
        let mut levels = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax {
            let t = LeggedTensor::random(vec![leg.clone(); n], rng)?;
            levels.push(b.project(&t)?);
        }
        let v = FockVector { leg, levels, symmetric: true, leakage: 0.0 };
        let norm = v.norm();
        if norm == T::zero() {
            return Err(Error::Numerical { what: "random symmetric vector vanished".into(), achieved: 0.0 });
        }
        Ok(v.scale(cr(T::one() / norm)))
    }

    pub(crate) fn with_parts(leg: LegSpace<T>, levels: Vec<LeggedTensor<T>>, symmetric: bool, leakage: f64) -> Self {
        FockVector { leg, levels, symmetric, leakage }
    }

    pub fn leg(&self) -> &LegSpace<T> {
        &self.leg
    }

    pub fn nmax(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &LeggedTensor<T> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[LeggedTensor<T>] {
        &self.levels
    }

    pub fn vacuum_component(&self) -> C<T> {
        self.levels[0].as_slice()[0]
    }

    /// Whether every level is known to lie in the range of P_R.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Marks the vector as R-symmetric after checking ‖P_R Ψ_n − Ψ_n‖ ≤ 1e-10 ‖Ψ_n‖ per level.
    pub fn certify_symmetric(mut self, b: &BraidingData<T>) -> Result<Self> {
        for (n, t) in self.levels.iter().enumerate() {
            let defect = b.symmetry_defect(t)?;
            if !(defect <= 1e-10) {
                return Err(Error::Precondition { what: format!("R-symmetry of level {n}"), residual: defect });
            }
        }
        self.symmetric = true;
        Ok(self)
    }

    /// Norm of what was dropped above N_max by particle-raising operations (an upper bound, see `create`).
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.nmax() != other.nmax() || !self.leg.compatible(&other.leg) {
            return Err(Error::Structural("Fock vectors with different truncation or one-particle space".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let levels = self.levels.iter().zip(&other.levels).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
        let leakage = (self.leakage.powi(2) + other.leakage.powi(2)).sqrt();
        Ok(FockVector { leg: self.leg.clone(), levels, symmetric: self.symmetric && other.symmetric, leakage })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(cr(-T::one())))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        FockVector {
            leg: self.leg.clone(),
            levels: self.levels.iter().map(|t| t.scale(s)).collect(),
            symmetric: self.symmetric,
            leakage: self.leakage * to_f64(s.norm()),
        }
    }

    /// ⟨self, other⟩, conjugate-linear in self.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        self.same_shape(other)?;
        let mut acc = czero();
        for (a, b) in self.levels.iter().zip(&other.levels) {
            acc = acc + a.inner_product(b)?;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> T {
        self.levels.iter().map(|t| t.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    /// ‖f(N)^{1/2} Ψ‖ for a weight f of the particle number.
    pub fn number_weighted_norm(&self, f: impl Fn(usize) -> f64) -> T {
        self.levels
            .iter()
            .enumerate()
            .map(|(n, t)| t.norm_sqr() * lit(f(n)))
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.levels.iter().map(|t| t.max_abs()).fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.levels.iter().all(|t| t.is_finite())
    }
}
