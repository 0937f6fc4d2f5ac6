use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::grid::RapidityGrid;

/// Internal index set {0..d} with its conjugation α ↦ ᾱ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InternalIndexSpace {
    bar: Vec<usize>,
}

impl InternalIndexSpace {
    /// Index space with the trivial conjugation ᾱ = α.
    pub fn new(d: usize) -> Result<Self> {
        Self::with_bar((0..d).collect())
    }

    /// `bar[α]` is ᾱ (0-based). Must be an involution.
    pub fn with_bar(bar: Vec<usize>) -> Result<Self> {
        let d = bar.len();
        if d == 0 {
            return Err(Error::param("dimension", "must be at least 1"));
        }
        for (a, &b) in bar.iter().enumerate() {
            if b >= d {
                return Err(Error::param("bar", format!("image {b} of index {a} outside 0..{d}")));
            }
            if bar[b] != a {
                return Err(Error::param("bar", format!("not an involution at index {a}")));
            }
        }
        Ok(InternalIndexSpace { bar })
    }

    pub fn dim(&self) -> usize {
        self.bar.len()
    }

    pub fn bar(&self, a: usize) -> usize {
        self.bar[a]
    }

    pub fn bar_map(&self) -> &[usize] {
        &self.bar
    }
}

/// One tensor leg: internal index α and grid node k, combined as α + d·k.
#[derive(Clone, Debug)]
pub struct LegSpace<T> {
    pub internal: InternalIndexSpace,
    pub grid: Arc<RapidityGrid<T>>,
}

impl<T: Real> LegSpace<T> {
    pub fn new(internal: InternalIndexSpace, grid: Arc<RapidityGrid<T>>) -> Self {
        LegSpace { internal, grid }
    }

    /// A leg carrying only the internal index (single node, unit weight).
    pub fn internal_only(internal: InternalIndexSpace) -> Self {
        LegSpace { internal, grid: Arc::new(RapidityGrid::point()) }
    }

    pub fn d(&self) -> usize {
        self.internal.dim()
    }

    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn dim(&self) -> usize {
        self.d() * self.nodes()
    }

    #[inline]
    pub fn index(&self, alpha: usize, k: usize) -> usize {
        alpha + self.d() * k
    }

    #[inline]
    pub fn split(&self, i: usize) -> (usize, usize) {
        (i % self.d(), i / self.d())
    }

    #[inline]
    pub fn weight(&self, i: usize) -> T {
        self.grid.weights()[i / self.d()]
    }

    #[inline]
    pub fn rapidity(&self, i: usize) -> T {
        self.grid.nodes()[i / self.d()]
    }

    /// Same internal space and an identical grid.
    pub fn compatible(&self, other: &Self) -> bool {
        self.internal == other.internal && (Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid)
    }
}

impl<T: Real> PartialEq for LegSpace<T> {
    fn eq(&self, other: &Self) -> bool {
        self.compatible(other)
    }
}
