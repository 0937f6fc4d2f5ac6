use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{cr, lit, to_f64, Real};
use crate::scattering::{Kind, MatrixScatteringFunction};
use crate::tensor::{embed_pairwise, LegSpace, LeggedTensor, PairOp, Permutation, RapidityGrid};

/// Largest n for which the projector is formed as the explicit n!-term sum.
pub const MAX_SUM_RANK: usize = 6;

/// Two-particle scattering operator on the discretized space and the braiding Φ = F·R.
///
/// R acts on node pair (k, l) of legs (i, j) by the R-convention matrix at q_k − q_l.
#[derive(Clone, Debug)]
pub struct BraidingData<T> {
    leg: LegSpace<T>,
    r: PairOp<T>,
    r_adj: PairOp<T>,
    label: String,
    unitarity: f64,
    hermiticity: f64,
}

impl<T: Real> BraidingData<T> {
    /// Builds R on `grid` and rejects it unless Φ is a self-adjoint unitary to `tol`.
    pub fn new(s: &MatrixScatteringFunction<T>, grid: Arc<RapidityGrid<T>>, tol: f64) -> Result<Self> {
        if s.kind() == Kind::LR {
            return Err(Error::Structural("braiding needs a function of rapidity differences".into()));
        }
        let leg = LegSpace::new(s.space().clone(), grid.clone());
        let nodes = grid.nodes().to_vec();
        let d = s.d();
        let g = nodes.len();
        let r = PairOp::node_blocks(d, d, g, g, |k, l| s.eval_r(cr(nodes[k] - nodes[l])))?;
        if !r.is_finite() {
            return Err(Error::Numerical { what: format!("{} on the grid", s.label()), achieved: f64::INFINITY });
        }
        let r_adj = r.adjoint();
        let (unitarity, hermiticity) = block_residuals(&r, &r_adj);
        if !(unitarity <= tol) {
            return Err(Error::Precondition { what: "unitarity".into(), residual: unitarity });
        }
        if !(hermiticity <= tol) {
            return Err(Error::Precondition { what: "hermitian_analyticity".into(), residual: hermiticity });
        }
        Ok(BraidingData { leg, r, r_adj, label: s.label().to_string(), unitarity, hermiticity })
    }

    /// [`Self::new`] with the algebraic default tolerance 1e-10.
    pub fn from_function(s: &MatrixScatteringFunction<T>, grid: Arc<RapidityGrid<T>>) -> Result<Self> {
        Self::new(s, grid, 1e-10)
    }

    pub fn leg(&self) -> &LegSpace<T> {
        &self.leg
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn r_op(&self) -> &PairOp<T> {
        &self.r
    }

    /// max over node pairs of ‖R*R − 1‖ (entrywise).
    pub fn unitarity_residual(&self) -> f64 {
        self.unitarity
    }

    /// max over node pairs of ‖R* − FRF‖ (entrywise), i.e. Φ* = Φ.
    pub fn hermiticity_residual(&self) -> f64 {
        self.hermiticity
    }

    fn check(&self, psi: &LeggedTensor<T>) -> Result<()> {
        if psi.legs().iter().any(|l| !l.compatible(&self.leg)) {
            return Err(Error::Structural("tensor legs differ from the braiding's one-particle space".into()));
        }
        Ok(())
    }

    // Only legs i and j need to carry this braiding's space; other legs may belong to another side.
    fn check_pair(&self, psi: &LeggedTensor<T>, i: usize, j: usize) -> Result<()> {
        for k in [i, j] {
            if k < psi.rank() && !psi.leg(k).compatible(&self.leg) {
                return Err(Error::Structural(format!("leg {k} differs from the braiding's one-particle space")));
            }
        }
        Ok(())
    }

    /// R_{ij} on legs i, j (the first matrix factor on leg i).
    pub fn r_on(&self, psi: &LeggedTensor<T>, i: usize, j: usize) -> Result<LeggedTensor<T>> {
        self.check_pair(psi, i, j)?;
        embed_pairwise(self.r.clone(), i, j, psi.rank())?.apply(psi)
    }

    /// R_{ij}* on legs i, j.
    pub fn r_adjoint_on(&self, psi: &LeggedTensor<T>, i: usize, j: usize) -> Result<LeggedTensor<T>> {
        self.check_pair(psi, i, j)?;
        embed_pairwise(self.r_adj.clone(), i, j, psi.rank())?.apply(psi)
    }

    /// F_{ij}: exchange of legs i and j.
    pub fn flip_on(&self, psi: &LeggedTensor<T>, i: usize, j: usize) -> Result<LeggedTensor<T>> {
        let n = psi.rank();
        if i >= n || j >= n || i == j {
            return Err(Error::Structural(format!("cannot exchange legs ({i}, {j}) of rank {n}")));
        }
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(i, j);
        psi.permute_legs(&Permutation::from_vec(map)?)
    }

    /// Φ_{j,j+1} = F_{j,j+1} R_{j,j+1}.
    pub fn phi(&self, psi: &LeggedTensor<T>, j: usize) -> Result<LeggedTensor<T>> {
        let r = self.r_on(psi, j, j + 1)?;
        self.flip_on(&r, j, j + 1)
    }

    /// Φ_{j,j+1}* = R_{j,j+1}* F_{j,j+1}.
    pub fn phi_adjoint(&self, psi: &LeggedTensor<T>, j: usize) -> Result<LeggedTensor<T>> {
        let f = self.flip_on(psi, j, j + 1)?;
        self.r_adjoint_on(&f, j, j + 1)
    }

    /// D_n(τ_{w0} τ_{w1} ⋯) ψ, the rightmost factor applied first.
    pub fn apply_word(&self, psi: &LeggedTensor<T>, word: &[usize]) -> Result<LeggedTensor<T>> {
        let n = psi.rank();
        if let Some(&bad) = word.iter().find(|&&j| j + 1 >= n) {
            return Err(Error::Structural(format!("transposition {bad} out of range for rank {n}")));
        }
        let mut out = psi.clone();
        for &j in word.iter().rev() {
            out = self.phi(&out, j)?;
        }
        Ok(out)
    }

    /// D_n(τ_{w0} ⋯)* ψ.
    pub fn apply_word_adjoint(&self, psi: &LeggedTensor<T>, word: &[usize]) -> Result<LeggedTensor<T>> {
        let n = psi.rank();
        if let Some(&bad) = word.iter().find(|&&j| j + 1 >= n) {
            return Err(Error::Structural(format!("transposition {bad} out of range for rank {n}")));
        }
        let mut out = psi.clone();
        for &j in word {
            out = self.phi_adjoint(&out, j)?;
        }
        Ok(out)
    }

    /// D_n(σ) ψ through a reduced word of σ.
    pub fn perm_rep(&self, psi: &LeggedTensor<T>, sigma: &Permutation) -> Result<LeggedTensor<T>> {
        if sigma.len() != psi.rank() {
            return Err(Error::Structural(format!("permutation of {} on rank {}", sigma.len(), psi.rank())));
        }
        self.apply_word(psi, &sigma.word())
    }

    /// P_R ψ = (1/n!) Σ_σ D_n(σ) ψ as the explicit sum.
    pub fn project(&self, psi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        let n = psi.rank();
        if n > MAX_SUM_RANK {
            return Err(Error::Capacity(format!("projector sum over {n}! permutations (limit rank {MAX_SUM_RANK})")));
        }
        if n < 2 {
            self.check(psi)?;
            return Ok(psi.clone());
        }
        let perms = Permutation::all(n);
        let mut acc = LeggedTensor::zeros(psi.legs().to_vec())?;
        for p in &perms {
            acc.axpy(cr(T::one()), &self.perm_rep(psi, p)?)?;
        }
        Ok(acc.scale(cr(T::one() / lit(perms.len() as f64))))
    }

    /// P_R on the k consecutive legs starting at `lo`, identity on the others.
    pub fn project_legs(&self, psi: &LeggedTensor<T>, lo: usize, k: usize) -> Result<LeggedTensor<T>> {
        if lo + k > psi.rank() {
            return Err(Error::Structural(format!("legs {lo}..{} of a rank {} tensor", lo + k, psi.rank())));
        }
        if k > MAX_SUM_RANK {
            return Err(Error::Capacity(format!("projector sum over {k}! permutations (limit rank {MAX_SUM_RANK})")));
        }
        if k < 2 {
            return Ok(psi.clone());
        }
        let perms = Permutation::all(k);
        let mut acc = LeggedTensor::zeros(psi.legs().to_vec())?;
        for p in &perms {
            let word: Vec<usize> = p.word().iter().map(|j| j + lo).collect();
            acc.axpy(cr(T::one()), &self.apply_word(psi, &word)?)?;
        }
        Ok(acc.scale(cr(T::one() / lit(perms.len() as f64))))
    }

    /// [`Self::symmetrize_first`] restricted to the k legs starting at `lo`.
    pub fn symmetrize_first_legs(&self, psi: &LeggedTensor<T>, lo: usize, k: usize) -> Result<LeggedTensor<T>> {
        if lo + k > psi.rank() {
            return Err(Error::Structural(format!("legs {lo}..{} of a rank {} tensor", lo + k, psi.rank())));
        }
        if k < 2 {
            return Ok(psi.clone());
        }
        let mut acc = psi.clone();
        let mut x = psi.clone();
        for j in lo..lo + k - 1 {
            x = self.phi(&x, j)?;
            acc.axpy(cr(T::one()), &x)?;
        }
        Ok(acc.scale(cr(T::one() / lit(k as f64))))
    }

    /// [`Self::symmetrize_last`] restricted to the k legs starting at `lo`.
    pub fn symmetrize_last_legs(&self, psi: &LeggedTensor<T>, lo: usize, k: usize) -> Result<LeggedTensor<T>> {
        if lo + k > psi.rank() {
            return Err(Error::Structural(format!("legs {lo}..{} of a rank {} tensor", lo + k, psi.rank())));
        }
        if k < 2 {
            return Ok(psi.clone());
        }
        let mut acc = psi.clone();
        let mut y = psi.clone();
        for j in (lo..lo + k - 1).rev() {
            y = self.phi(&y, j)?;
            acc.axpy(cr(T::one()), &y)?;
        }
        Ok(acc.scale(cr(T::one() / lit(k as f64))))
    }

    /// P_R* ψ = (1/n!) Σ_σ D_n(σ)* ψ.
    pub fn project_adjoint(&self, psi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        let n = psi.rank();
        if n > MAX_SUM_RANK {
            return Err(Error::Capacity(format!("projector sum over {n}! permutations (limit rank {MAX_SUM_RANK})")));
        }
        if n < 2 {
            return Ok(psi.clone());
        }
        let perms = Permutation::all(n);
        let mut acc = LeggedTensor::zeros(psi.legs().to_vec())?;
        for p in &perms {
            acc.axpy(cr(T::one()), &self.apply_word_adjoint(psi, &p.word())?)?;
        }
        Ok(acc.scale(cr(T::one() / lit(perms.len() as f64))))
    }

    /// X_{1i} ψ = Φ_{i−1,i} ⋯ Φ_{12} ψ (0-based: moves leg 0 to leg i).
    pub fn x_op(&self, psi: &LeggedTensor<T>, i: usize) -> Result<LeggedTensor<T>> {
        if i >= psi.rank().max(1) {
            return Err(Error::Structural(format!("X_(0,{i}) on rank {}", psi.rank())));
        }
        let mut out = psi.clone();
        for j in 0..i {
            out = self.phi(&out, j)?;
        }
        Ok(out)
    }

    /// Y_i ψ = Φ_{i,i+1} ⋯ Φ_{n−1,n} ψ (0-based: moves the last leg to leg i).
    pub fn y_op(&self, psi: &LeggedTensor<T>, i: usize) -> Result<LeggedTensor<T>> {
        let n = psi.rank();
        if i >= n.max(1) {
            return Err(Error::Structural(format!("Y_{i} on rank {n}")));
        }
        let mut out = psi.clone();
        for j in (i..n - 1).rev() {
            out = self.phi(&out, j)?;
        }
        Ok(out)
    }

    /// (1/n) Σ_i X_{1i} ψ: equals P_R ψ when legs 1..n of ψ are already R-symmetric.
    pub fn symmetrize_first(&self, psi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        let n = psi.rank();
        if n < 2 {
            return Ok(psi.clone());
        }
        let mut acc = psi.clone();
        for i in 1..n {
            acc.axpy(cr(T::one()), &self.x_op(psi, i)?)?;
        }
        Ok(acc.scale(cr(T::one() / lit(n as f64))))
    }

    /// (1/n) Σ_i Y_i ψ: equals P_R ψ when legs 0..n−1 of ψ are already R-symmetric.
    pub fn symmetrize_last(&self, psi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        let n = psi.rank();
        if n < 2 {
            return Ok(psi.clone());
        }
        let mut acc = psi.clone();
        for i in 0..n - 1 {
            acc.axpy(cr(T::one()), &self.y_op(psi, i)?)?;
        }
        Ok(acc.scale(cr(T::one() / lit(n as f64))))
    }

    /// P_R ψ by recursion over the number of legs, using the X_{1i} coset formula at each step.
    pub fn project_recursive(&self, psi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        let n = psi.rank();
        if n < 2 {
            self.check(psi)?;
            return Ok(psi.clone());
        }
        let mut out = psi.clone();
        for k in (0..n - 1).rev() {
            // legs k+1.. are symmetric; symmetrize legs k.. by moving leg k into place
            let mut acc = out.clone();
            for i in 1..n - k {
                let mut x = out.clone();
                for j in k..k + i {
                    x = self.phi(&x, j)?;
                }
                acc.axpy(cr(T::one()), &x)?;
            }
            out = acc.scale(cr(T::one() / lit((n - k) as f64)));
        }
        Ok(out)
    }

    /// ∏_{i<j} R_{ij} ψ with the factors ordered lexicographically from left to right.
    pub fn r_product(&self, psi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        let n = psi.rank();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        let mut out = psi.clone();
        for &(i, j) in pairs.iter().rev() {
            out = self.r_on(&out, i, j)?;
        }
        Ok(out)
    }

    /// F_{1⋯n}: reversal of all legs.
    pub fn reverse(&self, psi: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        psi.permute_legs(&Permutation::reversal(psi.rank()))
    }

    /// ‖(F_{1⋯n} − ∏R_{ij}) P_R ψ‖ for one vector.
    pub fn flip_product_defect(&self, psi: &LeggedTensor<T>) -> Result<T> {
        let p = self.project(psi)?;
        Ok(self.reverse(&p)?.sub(&self.r_product(&p)?)?.norm())
    }

    /// ‖P_R ψ − ψ‖ relative to ‖ψ‖.
    pub fn symmetry_defect(&self, psi: &LeggedTensor<T>) -> Result<f64> {
        let p = self.project(psi)?;
        let n = to_f64(psi.norm());
        let d = to_f64(p.sub(psi)?.norm());
        Ok(if n == 0.0 { d } else { d / n })
    }
}

fn block_residuals<T: Real>(r: &PairOp<T>, r_adj: &PairOp<T>) -> (f64, f64) {
    let (PairOp::NodeBlocks { blocks, .. }, PairOp::NodeBlocks { blocks: adj, .. }) = (r, r_adj) else {
        unreachable!("braiding operators are node blocks");
    };
    let swapped = match r.swapped() {
        PairOp::NodeBlocks { blocks, .. } => blocks,
        PairOp::Dense(_) => unreachable!(),
    };
    let mut unit = 0.0f64;
    let mut herm = 0.0f64;
    for ((b, a), s) in blocks.iter().zip(adj).zip(&swapped) {
        let n = b.rows();
        let prod = a.matmul(b);
        let id = crate::linalg::CMatrix::identity(n);
        unit = nan_max(unit, to_f64(prod.sub(&id).max_abs()));
        herm = nan_max(herm, to_f64(a.sub(s).max_abs()));
    }
    (unit, herm)
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
