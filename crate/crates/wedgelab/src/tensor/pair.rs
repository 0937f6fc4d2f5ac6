use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{czero, Real, C};
use crate::tensor::legged::LeggedTensor;

/// Operator on the product of two legs.
#[derive(Clone, Debug)]
pub enum PairOp<T> {
    /// Matrix over the combined index a·D_j + b, with a on the first leg and b on the second.
    Dense(CMatrix<T>),
    /// Pointwise in the grid nodes: on node pair (k, l) the internal (d_i d_j)² block `blocks[k·g_j + l]` acts.
    NodeBlocks { di: usize, dj: usize, gi: usize, gj: usize, blocks: Vec<CMatrix<T>> },
}

impl<T: Real> PairOp<T> {
    pub fn dense(m: CMatrix<T>) -> Self {
        PairOp::Dense(m)
    }

    /// Builds node blocks from `f(k, l)`.
    pub fn node_blocks(
        di: usize,
        dj: usize,
        gi: usize,
        gj: usize,
        mut f: impl FnMut(usize, usize) -> Result<CMatrix<T>>,
    ) -> Result<Self> {
        let mut blocks = Vec::with_capacity(gi * gj);
        for k in 0..gi {
            for l in 0..gj {
                let b = f(k, l)?;
                if b.rows() != di * dj || b.cols() != di * dj {
                    return Err(Error::Structural(format!(
                        "node block is {}x{}, expected {}x{}",
                        b.rows(),
                        b.cols(),
                        di * dj,
                        di * dj
                    )));
                }
                blocks.push(b);
            }
        }
        Ok(PairOp::NodeBlocks { di, dj, gi, gj, blocks })
    }

    /// Dimensions (D_i, D_j) of the two legs this operator expects, if fixed.
    fn check_legs(&self, dim_i: usize, dim_j: usize) -> Result<()> {
        let ok = match self {
            PairOp::Dense(m) => m.rows() == dim_i * dim_j && m.cols() == dim_i * dim_j,
            PairOp::NodeBlocks { di, dj, gi, gj, .. } => di * gi == dim_i && dj * gj == dim_j,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Structural(format!("pair operator does not fit legs of dimensions {dim_i} and {dim_j}")))
        }
    }

    /// Plain matrix adjoint (blockwise for node blocks).
    pub fn adjoint(&self) -> Self {
        match self {
            PairOp::Dense(m) => PairOp::Dense(m.adjoint()),
            PairOp::NodeBlocks { di, dj, gi, gj, blocks } => PairOp::NodeBlocks {
                di: *di,
                dj: *dj,
                gi: *gi,
                gj: *gj,
                blocks: blocks.iter().map(|b| b.adjoint()).collect(),
            },
        }
    }

    /// Operator with the two legs exchanged: F M F.
    pub fn swapped(&self) -> Self {
        match self {
            PairOp::Dense(m) => {
                // Dense operators are swapped assuming both legs have the same dimension.
                let d = (m.rows() as f64).sqrt().round() as usize;
                let sw = |r: usize| (r % d) * d + r / d;
                PairOp::Dense(CMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(sw(r), sw(c))]))
            }
            PairOp::NodeBlocks { di, dj, gi, gj, blocks } => {
                let (di, dj, gi, gj) = (*di, *dj, *gi, *gj);
                let sw = |r: usize| (r % di) * dj + r / di;
                let mut out = Vec::with_capacity(blocks.len());
                for l in 0..gj {
                    for k in 0..gi {
                        let b = &blocks[k * gj + l];
                        out.push(CMatrix::from_fn(di * dj, di * dj, |r, c| b[(sw(r), sw(c))]));
                    }
                }
                PairOp::NodeBlocks { di: dj, dj: di, gi: gj, gj: gi, blocks: out }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            PairOp::Dense(m) => m.is_finite(),
            PairOp::NodeBlocks { blocks, .. } => blocks.iter().all(|b| b.is_finite()),
        }
    }
}

/// Pair operator acting on legs (i, j) of rank-n tensors and as the identity elsewhere.
#[derive(Clone, Debug)]
pub struct EmbeddedOp<T> {
    pub op: PairOp<T>,
    pub i: usize,
    pub j: usize,
    pub n: usize,
}

/// Embeds `op` on legs `i` and `j` (0-based) of rank `n` tensors.
pub fn embed_pairwise<T: Real>(op: PairOp<T>, i: usize, j: usize, n: usize) -> Result<EmbeddedOp<T>> {
    if i == j || i >= n || j >= n {
        return Err(Error::Structural(format!("cannot embed a pair operator on legs ({i}, {j}) of rank {n}")));
    }
    Ok(EmbeddedOp { op, i, j, n })
}

impl<T: Real> EmbeddedOp<T> {
    pub fn adjoint(&self) -> Self {
        EmbeddedOp { op: self.op.adjoint(), i: self.i, j: self.j, n: self.n }
    }

    pub fn apply(&self, t: &LeggedTensor<T>) -> Result<LeggedTensor<T>> {
        if t.rank() != self.n {
            return Err(Error::Structural(format!("operator on rank {} applied to rank {}", self.n, t.rank())));
        }
        let (i, j) = (self.i, self.j);
        let (dim_i, dim_j) = (t.leg(i).dim(), t.leg(j).dim());
        self.op.check_legs(dim_i, dim_j)?;
        let strides = t.strides();
        let (si, sj) = (strides[i], strides[j]);
        let src = t.as_slice();
        let mut out = t.clone();
        let dst = out.as_mut_slice();
        let shape = t.shape();
        let mut x = vec![czero::<T>(); dim_i * dim_j];
        let mut y = vec![czero::<T>(); dim_i * dim_j];
        for base in bases(&shape, i, j) {
            for a in 0..dim_i {
                for b in 0..dim_j {
                    x[a * dim_j + b] = src[base + a * si + b * sj];
                }
            }
            apply_slice(&self.op, &x, &mut y);
            for a in 0..dim_i {
                for b in 0..dim_j {
                    dst[base + a * si + b * sj] = y[a * dim_j + b];
                }
            }
        }
        Ok(out)
    }
}

/// Flat offsets of all positions whose indices on legs i and j are zero.
fn bases(shape: &[usize], i: usize, j: usize) -> Vec<usize> {
    let n = shape.len();
    let mut reduced = shape.to_vec();
    reduced[i] = 1;
    reduced[j] = 1;
    let mut strides = vec![1usize; n];
    for m in (0..n.saturating_sub(1)).rev() {
        strides[m] = strides[m + 1] * shape[m + 1];
    }
    let count: usize = reduced.iter().product();
    let mut out = Vec::with_capacity(count);
    let mut idx = vec![0usize; n];
    for _ in 0..count {
        out.push(idx.iter().zip(&strides).map(|(a, s)| a * s).sum());
        crate::tensor::legged::increment(&mut idx, &reduced);
    }
    out
}

fn apply_slice<T: Real>(op: &PairOp<T>, x: &[C<T>], y: &mut [C<T>]) {
    match op {
        PairOp::Dense(m) => {
            let n = x.len();
            for (r, yr) in y.iter_mut().enumerate() {
                let row = &m.as_slice()[r * n..(r + 1) * n];
                *yr = row.iter().zip(x).fold(czero(), |acc, (a, b)| acc + *a * *b);
            }
        }
        PairOp::NodeBlocks { di, dj, gi, gj, blocks } => {
            let (di, dj, gj) = (*di, *dj, *gj);
            let dim_j = dj * gj;
            let bd = di * dj;
            let mut xs = vec![czero::<T>(); bd];
            for k in 0..*gi {
                for l in 0..gj {
                    let block = &blocks[k * gj + l];
                    for g in 0..di {
                        for d in 0..dj {
                            xs[g * dj + d] = x[(g + di * k) * dim_j + d + dj * l];
                        }
                    }
                    for a in 0..di {
                        for b in 0..dj {
                            let row = &block.as_slice()[(a * dj + b) * bd..(a * dj + b + 1) * bd];
                            y[(a + di * k) * dim_j + b + dj * l] =
                                row.iter().zip(&xs).fold(czero(), |acc, (m, v)| acc + *m * *v);
                        }
                    }
                }
            }
        }
    }
}
