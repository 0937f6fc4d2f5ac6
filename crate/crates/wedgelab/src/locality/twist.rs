use std::collections::BTreeMap;

use super::chain::{a_operator_from_samples, require_certified, Certification, ChainFactor};
use super::commutator::{CommutatorResidual, LEAKAGE_LIMIT};
use crate::error::{Error, Result};
use crate::fock::{operator_norm, AntilinearOp, BraidingData, FockVector};
use crate::scalar::{cr, lit, to_f64, Real, C};
use crate::scattering::{Kind, MatrixScatteringFunction};
use crate::standard_pair::OneParticleVector;
use crate::tensor::{embed_pairwise, LegSpace, LeggedTensor, PairOp, Permutation};

/// Largest m + n for which a twist is formed.
pub const MAX_TWIST_LEGS: usize = 6;

/// S^{(m,n)} = S_{1|1} S_{2|1} ⋯ S_{m|1} S_{1|2} ⋯ S_{m|n} on m left legs followed by n right legs.
///
/// S_{i|j} acts on left leg i and right leg j by the left-right matrix at q_i + q′_j.
#[derive(Clone, Debug)]
pub struct Twist<T> {
    left: LegSpace<T>,
    right: LegSpace<T>,
    m: usize,
    n: usize,
    op: PairOp<T>,
    // (left leg, right leg) in displayed order
    order: Vec<(usize, usize)>,
}

/// The twist on the (m, n) sector.
pub fn twist<T: Real>(
    s: &MatrixScatteringFunction<T>,
    left: &LegSpace<T>,
    right: &LegSpace<T>,
    m: usize,
    n: usize,
) -> Result<Twist<T>> {
    let op = lr_pair_op(s, left, right)?;
    let order = (0..n).flat_map(|j| (0..m).map(move |i| (i, j))).collect();
    Twist::from_parts(left, right, m, n, op, order)
}

/// The same factors multiplied in an arbitrary order (for order-sensitivity checks).
pub fn twist_in_order<T: Real>(
    s: &MatrixScatteringFunction<T>,
    left: &LegSpace<T>,
    right: &LegSpace<T>,
    m: usize,
    n: usize,
    order: Vec<(usize, usize)>,
) -> Result<Twist<T>> {
    if order.iter().any(|&(i, j)| i >= m || j >= n) {
        return Err(Error::Structural(format!("factor order references legs outside the ({m}, {n}) sector")));
    }
    Twist::from_parts(left, right, m, n, lr_pair_op(s, left, right)?, order)
}

fn lr_pair_op<T: Real>(s: &MatrixScatteringFunction<T>, left: &LegSpace<T>, right: &LegSpace<T>) -> Result<PairOp<T>> {
    if s.kind() != Kind::LR {
        return Err(Error::Structural(format!("{} is not a left-right function", s.label())));
    }
    if s.left_space() != &left.internal || s.right_space() != &right.internal {
        return Err(Error::Structural("left-right function does not match the side index spaces".into()));
    }
    let (ql, qr) = (left.grid.nodes().to_vec(), right.grid.nodes().to_vec());
    PairOp::node_blocks(left.d(), right.d(), ql.len(), qr.len(), |k, l| s.eval(cr(ql[k] + qr[l])))
}

impl<T: Real> Twist<T> {
    fn from_parts(
        left: &LegSpace<T>,
        right: &LegSpace<T>,
        m: usize,
        n: usize,
        op: PairOp<T>,
        order: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if m + n > MAX_TWIST_LEGS {
            return Err(Error::Capacity(format!("twist on {} legs (limit {MAX_TWIST_LEGS})", m + n)));
        }
        crate::tensor::legged::checked_size(&sector_legs(left, right, m, n))?;
        Ok(Twist { left: left.clone(), right: right.clone(), m, n, op, order })
    }

    pub fn sector(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn legs(&self) -> Vec<LegSpace<T>> {
        sector_legs(&self.left, &self.right, self.m, self.n)
    }

    fn check(&self, t: &LeggedTensor<T>) -> Result<()> {
        let legs = self.legs();
        if t.rank() != legs.len() || t.legs().iter().zip(&legs).any(|(a, b)| !a.compatible(b)) {
            return Err(Error::Structural(format!("tensor is not in the ({}, {}) sector", self.m, self.n)));
        }
        Ok(())
    }

    pub fn apply(&self, t: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        self.check(t)?;
        let rank = self.m + self.n;
        let mut out = t.clone();
        for &(i, j) in self.order.iter().rev() {
            out = embed_pairwise(self.op.clone(), i, self.m + j, rank)?.apply(&out)?;
        }
        Ok(out)
    }

    pub fn apply_adjoint(&self, t: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        self.check(t)?;
        let rank = self.m + self.n;
        let adj = self.op.adjoint();
        let mut out = t.clone();
        for &(i, j) in &self.order {
            out = embed_pairwise(adj.clone(), i, self.m + j, rank)?.apply(&out)?;
        }
        Ok(out)
    }
}

/// Legs of the (m, n) sector: m copies of `left` then n copies of `right`.
pub fn sector_legs<T: Real>(left: &LegSpace<T>, right: &LegSpace<T>, m: usize, n: usize) -> Vec<LegSpace<T>> {
    std::iter::repeat(left.clone()).take(m).chain(std::iter::repeat(right.clone()).take(n)).collect()
}

/// Operator norms ‖[S^{(m,n)}, P^{(m)}_{R⁺} ⊗ 1]‖ and ‖[S^{(m,n)}, 1 ⊗ P^{(n)}_{R⁻}]‖.
pub fn twist_projector_commutation<T: Real>(
    b_plus: &BraidingData<T>,
    s: &MatrixScatteringFunction<T>,
    b_minus: &BraidingData<T>,
    m: usize,
    n: usize,
) -> Result<(f64, f64)> {
    let tw = twist(s, b_plus.leg(), b_minus.leg(), m, n)?;
    let legs = tw.legs();
    let left = |x: &LeggedTensor<T>| {
        let a = tw.apply(&b_plus.project_legs(x, 0, m)?)?;
        a.sub(&b_plus.project_legs(&tw.apply(x)?, 0, m)?)
    };
    let left_adj = |x: &LeggedTensor<T>| {
        let a = b_plus.project_legs(&tw.apply_adjoint(x)?, 0, m)?;
        a.sub(&tw.apply_adjoint(&b_plus.project_legs(x, 0, m)?)?)
    };
    let right = |x: &LeggedTensor<T>| {
        let a = tw.apply(&b_minus.project_legs(x, m, n)?)?;
        a.sub(&b_minus.project_legs(&tw.apply(x)?, m, n)?)
    };
    let right_adj = |x: &LeggedTensor<T>| {
        let a = b_minus.project_legs(&tw.apply_adjoint(x)?, m, n)?;
        a.sub(&tw.apply_adjoint(&b_minus.project_legs(x, m, n)?)?)
    };
    Ok((operator_norm(&legs, &left, &left_adj)?, operator_norm(&legs, &right, &right_adj)?))
}

/// Which chiral half the fields act on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Finite-particle vector of the two-sided Fock space, stored by (m, n) sector.
#[derive(Clone, Debug)]
pub struct TwoSidedVector<T> {
    left: LegSpace<T>,
    right: LegSpace<T>,
    sectors: BTreeMap<(usize, usize), LeggedTensor<T>>,
}

impl<T: Real> TwoSidedVector<T> {
    pub fn zero(left: LegSpace<T>, right: LegSpace<T>) -> Self {
        TwoSidedVector { left, right, sectors: BTreeMap::new() }
    }

    /// Ψ ⊗ Φ for symmetric, leakage-free factors.
    pub fn product(psi: &FockVector<T>, phi: &FockVector<T>) -> Result<Self> {
        for v in [psi, phi] {
            if v.leakage() > LEAKAGE_LIMIT {
                return Err(Error::Precondition { what: "factor carries truncation leakage".into(), residual: v.leakage() });
            }
        }
        let mut out = Self::zero(psi.leg().clone(), phi.leg().clone());
        for (m, a) in psi.levels().iter().enumerate() {
            for (n, b) in phi.levels().iter().enumerate() {
                if to_f64(a.max_abs()) > 0.0 && to_f64(b.max_abs()) > 0.0 {
                    out.sectors.insert((m, n), a.outer(b)?);
                }
            }
        }
        Ok(out)
    }

    pub fn sector(&self, m: usize, n: usize) -> Option<&LeggedTensor<T>> {
        self.sectors.get(&(m, n))
    }

    pub fn sectors(&self) -> impl Iterator<Item = (&(usize, usize), &LeggedTensor<T>)> {
        self.sectors.iter()
    }

    pub fn insert(&mut self, m: usize, n: usize, t: LeggedTensor<T>) -> Result<()> {
        let legs = sector_legs(&self.left, &self.right, m, n);
        if t.rank() != legs.len() || t.legs().iter().zip(&legs).any(|(a, b)| !a.compatible(b)) {
            return Err(Error::Structural(format!("tensor is not in the ({m}, {n}) sector")));
        }
        match self.sectors.get_mut(&(m, n)) {
            Some(acc) => acc.axpy(cr(T::one()), &t)?,
            None => {
                self.sectors.insert((m, n), t);
            }
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (&(m, n), t) in &other.sectors {
            out.insert(m, n, t.scale(cr(-T::one())))?;
        }
        Ok(out)
    }

    pub fn norm(&self) -> f64 {
        self.sectors.values().map(|t| to_f64(t.norm_sqr())).sum::<f64>().sqrt()
    }

    /// ‖(N_side + 1) Ψ‖.
    pub fn number_weighted_norm(&self, side: Side) -> f64 {
        self.sectors
            .iter()
            .map(|(&(m, n), t)| {
                let k = (if side == Side::Left { m } else { n } + 1) as f64;
                k * k * to_f64(t.norm_sqr())
            })
            .sum::<f64>()
            .sqrt()
    }

    fn map_sectors(
        &self,
        mut f: impl FnMut(usize, usize, &LeggedTensor<T>) -> Result<Vec<((usize, usize), LeggedTensor<T>)>>,
    ) -> Result<Self> {
        let mut out = Self::zero(self.left.clone(), self.right.clone());
        for (&(m, n), t) in &self.sectors {
            for ((mm, nn), r) in f(m, n, t)? {
                out.insert(mm, nn, r)?;
            }
        }
        Ok(out)
    }
}

/// Field operators of one side acting on two-sided sectors.
struct SideFields<'a, T> {
    b: &'a BraidingData<T>,
    side: Side,
}

impl<'a, T: Real> SideFields<'a, T> {
    // first leg of this side and its particle number in sector (m, n)
    fn span(&self, m: usize, n: usize) -> (usize, usize) {
        match self.side {
            Side::Left => (0, m),
            Side::Right => (m, n),
        }
    }

    fn bump(&self, m: usize, n: usize, up: bool) -> (usize, usize) {
        let s = |k: usize| if up { k + 1 } else { k - 1 };
        match self.side {
            Side::Left => (s(m), n),
            Side::Right => (m, s(n)),
        }
    }

    /// φ(f) = a(f) + a(f)* on this side.
    fn segal(&self, f: &[C<T>], v: &TwoSidedVector<T>) -> Result<TwoSidedVector<T>> {
        let leg = self.b.leg().clone();
        let ft = LeggedTensor::vector(leg, f.to_vec())?;
        v.map_sectors(|m, n, t| {
            let (lo, k) = self.span(m, n);
            let mut out = Vec::new();
            // creation: f enters as the first leg of this side
            let raw = ft.outer(t)?;
            let moved = raw.permute_legs(&move_leg(m + n + 1, 0, lo)?)?;
            let up = self.b.symmetrize_first_legs(&moved, lo, k + 1)?.scale(cr(lit(((k + 1) as f64).sqrt())));
            out.push((self.bump(m, n, true), up));
            if k > 0 {
                let down = t.contract_bra(f, lo)?.scale(cr(lit((k as f64).sqrt())));
                out.push((self.bump(m, n, false), down));
            }
            Ok(out)
        })
    }

    /// Jφ(g)J on this side, given h = J_H g: h enters and leaves as the last leg of the side.
    fn reflected(&self, h: &[C<T>], v: &TwoSidedVector<T>) -> Result<TwoSidedVector<T>> {
        let leg = self.b.leg().clone();
        let ht = LeggedTensor::vector(leg, h.to_vec())?;
        v.map_sectors(|m, n, t| {
            let (lo, k) = self.span(m, n);
            let last = lo + k;
            let mut out = Vec::new();
            let raw = t.outer(&ht)?;
            let moved = raw.permute_legs(&move_leg(m + n + 1, m + n, last)?)?;
            let up = self.b.symmetrize_last_legs(&moved, lo, k + 1)?.scale(cr(lit(((k + 1) as f64).sqrt())));
            out.push((self.bump(m, n, true), up));
            if k > 0 {
                let down = t.contract_bra(h, last - 1)?.scale(cr(lit((k as f64).sqrt())));
                out.push((self.bump(m, n, false), down));
            }
            Ok(out)
        })
    }
}

/// Permutation of `n` legs moving leg `from` to position `to`, keeping the others in order.
fn move_leg(n: usize, from: usize, to: usize) -> Result<Permutation> {
    let mut rest: Vec<usize> = (0..n).filter(|&i| i != from).collect();
    rest.insert(to, from);
    // leg `old` of the source becomes leg `map[old]`
    let mut map = vec![0usize; n];
    for (new, &old) in rest.iter().enumerate() {
        map[old] = new;
    }
    Permutation::from_vec(map)
}

fn apply_twist<T: Real>(
    s: &MatrixScatteringFunction<T>,
    v: &TwoSidedVector<T>,
    adjoint: bool,
) -> Result<TwoSidedVector<T>> {
    v.map_sectors(|m, n, t| {
        let tw = twist(s, &v.left, &v.right, m, n)?;
        Ok(vec![((m, n), if adjoint { tw.apply_adjoint(t)? } else { tw.apply(t)? })])
    })
}

/// Normalized ‖[Jφ(g)J ⊗ 1, S̃(φ(f) ⊗ 1)S̃*](Ψ⊗Φ)‖ (left) or its mirror on the right factor.
///
/// The sector-preserving part is cross-checked against the closed-form A/B-operator difference.
#[allow(clippy::too_many_arguments)]
pub fn twisted_commutator<T: Real>(
    b_plus: &BraidingData<T>,
    r_plus: &MatrixScatteringFunction<T>,
    s: &MatrixScatteringFunction<T>,
    b_minus: &BraidingData<T>,
    r_minus: &MatrixScatteringFunction<T>,
    f: &OneParticleVector<T>,
    g: &OneParticleVector<T>,
    state: &TwoSidedVector<T>,
    side: Side,
    mode: Certification,
) -> Result<CommutatorResidual> {
    require_certified(f, "f", mode)?;
    require_certified(g, "g", mode)?;
    if !state.left.compatible(b_plus.leg()) || !state.right.compatible(b_minus.leg()) {
        return Err(Error::Structural("two-sided vector does not match the braidings".into()));
    }
    let (b, r) = match side {
        Side::Left => (b_plus, r_plus),
        Side::Right => (b_minus, r_minus),
    };
    let leg = b.leg().clone();
    let fs = f.samples(&leg)?;
    let h = AntilinearOp::modular_conjugation(leg.clone()).apply(&g.samples(&leg)?);
    let fields = SideFields { b, side };
    let scale = to_f64(f.norm(&leg)?) * to_f64(g.norm(&leg)?) * state.number_weighted_norm(side);
    if !(scale > 0.0) {
        return Err(Error::Domain("commutator normalization vanishes (zero f, g or Ψ)".into()));
    }
    let conjugated = |v: &TwoSidedVector<T>| -> Result<TwoSidedVector<T>> {
        let x = apply_twist(s, v, true)?;
        let x = fields.segal(&fs, &x)?;
        apply_twist(s, &x, false)
    };
    let (mut closed, mut changing) = (0.0f64, 0.0f64);
    let mut a_res = 0.0f64;
    let mut total = TwoSidedVector::zero(state.left.clone(), state.right.clone());
    for (&(m, n), t) in state.sectors() {
        let mut single = TwoSidedVector::zero(state.left.clone(), state.right.clone());
        single.insert(m, n, t.clone())?;
        let lhs = fields.reflected(&h, &conjugated(&single)?)?;
        let rhs = conjugated(&fields.reflected(&h, &single)?)?;
        let comm = lhs.sub(&rhs)?;
        let (chain, targets) = closed_form_chain(r, s, &state.left, &state.right, m, n, side)?;
        let a = a_operator_from_samples(&leg, &chain, &targets, &fs, &h)?;
        a_res = a_res.max(a.self_adjointness_residual());
        let expect = a.apply_anti_hermitian_part(t)?;
        let got = comm.sector(m, n).cloned().unwrap_or(LeggedTensor::zeros(targets.clone())?);
        closed = closed.max(to_f64(got.sub(&expect)?.norm()));
        let off: f64 =
            comm.sectors().filter(|(&key, _)| key != (m, n)).map(|(_, x)| to_f64(x.norm_sqr())).sum::<f64>();
        changing = changing.max(off.sqrt());
        for (&(mm, nn), x) in comm.sectors() {
            total.insert(mm, nn, x.clone())?;
        }
    }
    Ok(CommutatorResidual {
        residual: total.norm() / scale,
        closed_form: closed / scale,
        number_changing: changing / scale,
        a_residual: a_res,
        grid: leg.nodes(),
    })
}

/// Chain and target legs of the closed form on sector (m, n).
///
/// Left: R⁺_{1,m+1} ⋯ R⁺_{12} S_{1|1} ⋯ S_{1|n}, targets the m left then n right legs.
/// Right: R⁻_{|1,n+1} ⋯ R⁻_{|12} S_{1|1} ⋯ S_{m|1}, with the test leg as the first right leg.
pub fn closed_form_chain<T: Real>(
    r: &MatrixScatteringFunction<T>,
    s: &MatrixScatteringFunction<T>,
    left: &LegSpace<T>,
    right: &LegSpace<T>,
    m: usize,
    n: usize,
    side: Side,
) -> Result<(Vec<ChainFactor<T>>, Vec<LegSpace<T>>)> {
    let targets = sector_legs(left, right, m, n);
    let mut chain = Vec::with_capacity(m + n);
    match side {
        Side::Left => {
            for t in (0..m).rev() {
                chain.push(ChainFactor::difference(r, t)?);
            }
            for j in 0..n {
                chain.push(ChainFactor::sum_left(s, m + j)?);
            }
        }
        Side::Right => {
            for j in (0..n).rev() {
                chain.push(ChainFactor::difference(r, m + j)?);
            }
            for i in 0..m {
                chain.push(ChainFactor::sum_right(s, i)?);
            }
        }
    }
    Ok((chain, targets))
}
