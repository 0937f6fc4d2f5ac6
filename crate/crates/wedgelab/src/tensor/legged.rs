use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use rand_distr::StandardNormal;

use crate::scalar::{cone, czero, lit, Real, C};
use crate::tensor::index::LegSpace;
use crate::tensor::perm::Permutation;

/// Largest number of entries a single tensor may hold.
pub const MAX_ENTRIES: usize = 1 << 30;

/// Dense rank-n tensor over a list of legs, row-major with leg 0 slowest.
///
/// Rank 0 holds a single complex scalar.
#[derive(Clone, Debug)]
pub struct LeggedTensor<T> {
    legs: Vec<LegSpace<T>>,
    data: Vec<C<T>>,
}

pub(crate) fn checked_size<T: Real>(legs: &[LegSpace<T>]) -> Result<usize> {
    let mut size: usize = 1;
    for leg in legs {
        size = size
            .checked_mul(leg.dim())
            .filter(|&s| s <= MAX_ENTRIES)
            .ok_or_else(|| Error::Capacity(format!("tensor with leg dimensions {:?} exceeds 2^30 entries", dims(legs))))?;
    }
    Ok(size)
}

fn dims<T: Real>(legs: &[LegSpace<T>]) -> Vec<usize> {
    legs.iter().map(|l| l.dim()).collect()
}

impl<T: Real> LeggedTensor<T> {
    pub fn zeros(legs: Vec<LegSpace<T>>) -> Result<Self> {
        let size = checked_size(&legs)?;
        Ok(LeggedTensor { legs, data: vec![czero(); size] })
    }

    pub fn scalar(z: C<T>) -> Self {
        LeggedTensor { legs: Vec::new(), data: vec![z] }
    }

    pub fn from_data(legs: Vec<LegSpace<T>>, data: Vec<C<T>>) -> Result<Self> {
        let size = checked_size(&legs)?;
        if data.len() != size {
            return Err(Error::Structural(format!("{} entries for legs of size {size}", data.len())));
        }
        Ok(LeggedTensor { legs, data })
    }

    /// Fills the tensor from a function of the multi-index.
    pub fn from_fn(legs: Vec<LegSpace<T>>, mut f: impl FnMut(&[usize]) -> C<T>) -> Result<Self> {
        let mut t = Self::zeros(legs)?;
        let shape = t.shape();
        let mut idx = vec![0usize; shape.len()];
        for slot in t.data.iter_mut() {
            *slot = f(&idx);
            increment(&mut idx, &shape);
        }
        Ok(t)
    }

    /// Entries with independent standard normal real and imaginary parts.
    pub fn random(legs: Vec<LegSpace<T>>, rng: &mut impl rand::Rng) -> Result<Self> {
        let mut t = Self::zeros(legs)?;
        for z in t.data.iter_mut() {
            let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            *z = C::new(lit(re), lit(im));
        }
        Ok(t)
    }

    /// e_{i_0} ⊗ … ⊗ e_{i_{n−1}}.
    pub fn basis(legs: Vec<LegSpace<T>>, index: &[usize]) -> Result<Self> {
        let mut t = Self::zeros(legs)?;
        let flat = t.flat_index(index)?;
        t.data[flat] = cone();
        Ok(t)
    }

    /// Rank-1 tensor from a vector of leg samples.
    pub fn vector(leg: LegSpace<T>, samples: Vec<C<T>>) -> Result<Self> {
        Self::from_data(vec![leg], samples)
    }

    pub fn rank(&self) -> usize {
        self.legs.len()
    }

    pub fn legs(&self) -> &[LegSpace<T>] {
        &self.legs
    }

    pub fn leg(&self, m: usize) -> &LegSpace<T> {
        &self.legs[m]
    }

    pub fn shape(&self) -> Vec<usize> {
        dims(&self.legs)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C<T>> {
        self.data
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.rank()];
        for m in (0..self.rank().saturating_sub(1)).rev() {
            s[m] = s[m + 1] * self.legs[m + 1].dim();
        }
        s
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.rank() {
            return Err(Error::Structural(format!("multi-index of length {} for rank {}", index.len(), self.rank())));
        }
        let mut flat = 0;
        for (i, leg) in index.iter().zip(&self.legs) {
            if *i >= leg.dim() {
                return Err(Error::Structural(format!("index {i} out of range {}", leg.dim())));
            }
            flat = flat * leg.dim() + i;
        }
        Ok(flat)
    }

    pub fn get(&self, index: &[usize]) -> Result<C<T>> {
        Ok(self.data[self.flat_index(index)?])
    }

    /// Product weight Π w_{k_m} of a flat position.
    pub fn weight_at(&self, mut flat: usize) -> T {
        let mut w = T::one();
        for leg in self.legs.iter().rev() {
            w = w * leg.weight(flat % leg.dim());
            flat /= leg.dim();
        }
        w
    }

    /// Same legs in the same order.
    pub fn same_space(&self, other: &Self) -> bool {
        self.rank() == other.rank() && self.legs.iter().zip(&other.legs).all(|(a, b)| a.compatible(b))
    }

    fn require_same_space(&self, other: &Self) -> Result<()> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(Error::Structural(format!("tensor spaces differ: {:?} vs {:?}", self.shape(), other.shape())))
        }
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        LeggedTensor { legs: self.legs.clone(), data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_space(other)?;
        Ok(LeggedTensor {
            legs: self.legs.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-cone::<T>()))
    }

    /// self += s·other.
    pub fn axpy(&mut self, s: C<T>, other: &Self) -> Result<()> {
        self.require_same_space(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + s * *b;
        }
        Ok(())
    }

    /// Quadrature-weighted inner product, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<C<T>> {
        self.require_same_space(other)?;
        let mut acc = czero();
        let w = self.weight_table();
        for (flat, (a, b)) in self.data.iter().zip(&other.data).enumerate() {
            acc = acc + a.conj() * *b * w.at(flat);
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> T {
        let w = self.weight_table();
        self.data.iter().enumerate().map(|(flat, z)| z.norm_sqr() * w.at(flat)).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), |a, b| if b > a || b.is_nan() { b } else { a })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn weight_table(&self) -> WeightTable<T> {
        WeightTable::new(&self.legs)
    }

    /// Entry at (i_0..i_{n−1}) of the result equals self at (i_{σ(0)}..i_{σ(n−1)}).
    pub fn permute_legs(&self, sigma: &Permutation) -> Result<Self> {
        let n = self.rank();
        if sigma.len() != n {
            return Err(Error::Structural(format!("permutation of {} legs applied to rank {n}", sigma.len())));
        }
        // Leg m of self becomes leg σ(m) of the result.
        let mut legs = self.legs.clone();
        for m in 0..n {
            legs[sigma.apply(m)] = self.legs[m].clone();
        }
        let mut out = LeggedTensor { legs, data: vec![czero(); self.data.len()] };
        let src_strides = self.strides();
        // Stride in self's layout of the result's leg σ(m) is the stride of self's leg m.
        let mut strides = vec![0usize; n];
        for m in 0..n {
            strides[sigma.apply(m)] = src_strides[m];
        }
        let shape = out.shape();
        let mut idx = vec![0usize; n];
        for slot in out.data.iter_mut() {
            let src: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
            *slot = self.data[src];
            increment(&mut idx, &shape);
        }
        Ok(out)
    }

    /// self ⊗ other, legs of `self` first.
    pub fn outer(&self, other: &Self) -> Result<Self> {
        let mut legs = self.legs.clone();
        legs.extend(other.legs.iter().cloned());
        checked_size(&legs)?;
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(*a * *b);
            }
        }
        Ok(LeggedTensor { legs, data })
    }

    /// Contracts leg `k` against conj(v) with quadrature weights; `v` is given by leg samples.
    pub fn contract_bra(&self, v: &[C<T>], k: usize) -> Result<Self> {
        let n = self.rank();
        if n == 0 {
            return Err(Error::Domain("cannot contract a rank-0 tensor".into()));
        }
        if k >= n {
            return Err(Error::Structural(format!("leg {k} out of range for rank {n}")));
        }
        let leg = &self.legs[k];
        if v.len() != leg.dim() {
            return Err(Error::Structural(format!("bra has {} samples, leg dimension is {}", v.len(), leg.dim())));
        }
        let cw: Vec<C<T>> = v.iter().enumerate().map(|(i, z)| z.conj() * leg.weight(i)).collect();
        let outer: usize = self.legs[..k].iter().map(|l| l.dim()).product();
        let inner: usize = self.legs[k + 1..].iter().map(|l| l.dim()).product();
        let dk = leg.dim();
        let mut data = vec![czero(); outer * inner];
        for o in 0..outer {
            let dst = &mut data[o * inner..(o + 1) * inner];
            for (a, w) in cw.iter().enumerate() {
                let src = &self.data[(o * dk + a) * inner..(o * dk + a + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d = *d + *w * *s;
                }
            }
        }
        let mut legs = self.legs.clone();
        legs.remove(k);
        Ok(LeggedTensor { legs, data })
    }

    /// Applies a (leg dim × leg dim) matrix to leg `k`.
    pub fn apply_on_leg(&self, a: &CMatrix<T>, k: usize) -> Result<Self> {
        let n = self.rank();
        if k >= n {
            return Err(Error::Structural(format!("leg {k} out of range for rank {n}")));
        }
        let dk = self.legs[k].dim();
        if a.rows() != dk || a.cols() != dk {
            return Err(Error::Structural(format!("{}x{} matrix on leg of dimension {dk}", a.rows(), a.cols())));
        }
        let outer: usize = self.legs[..k].iter().map(|l| l.dim()).product();
        let inner: usize = self.legs[k + 1..].iter().map(|l| l.dim()).product();
        let mut data = vec![czero(); self.data.len()];
        for o in 0..outer {
            for r in 0..dk {
                let dst = (o * dk + r) * inner;
                for cidx in 0..dk {
                    let m = a[(r, cidx)];
                    if m == czero() {
                        continue;
                    }
                    let src = (o * dk + cidx) * inner;
                    for t in 0..inner {
                        data[dst + t] = data[dst + t] + m * self.data[src + t];
                    }
                }
            }
        }
        Ok(LeggedTensor { legs: self.legs.clone(), data })
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }
}

/// Cached per-leg weights for evaluating Π w at a flat index.
struct WeightTable<T> {
    per_leg: Vec<Vec<T>>,
}

impl<T: Real> WeightTable<T> {
    fn new(legs: &[LegSpace<T>]) -> Self {
        WeightTable { per_leg: legs.iter().map(|l| (0..l.dim()).map(|i| l.weight(i)).collect()).collect() }
    }

    #[inline]
    fn at(&self, mut flat: usize) -> T {
        let mut w = T::one();
        for leg in self.per_leg.iter().rev() {
            w = w * leg[flat % leg.len()];
            flat /= leg.len();
        }
        w
    }
}

/// Odometer increment of a row-major multi-index.
pub(crate) fn increment(idx: &mut [usize], shape: &[usize]) {
    for m in (0..idx.len()).rev() {
        idx[m] += 1;
        if idx[m] < shape[m] {
            return;
        }
        idx[m] = 0;
    }
}
