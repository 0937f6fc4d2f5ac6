use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{c, Real};
use crate::scattering::function::{Kind, MatrixScatteringFunction};

/// Two-particle S-matrix of the massive model on (d₊ + d₋)² states.
///
/// One-particle index: left α ↦ α, right β ↦ d₊ + β; two-particle position of (first, second)
/// is second + N·first with N = d₊ + d₋. With R' the R-convention of R⁺(iπ − q), R⁻ in the
/// R-convention and S the left-right matrix at q:
///
/// | block | row          | column       | entry          |
/// |-------|--------------|--------------|----------------|
/// | ++    | (v, u)       | (x, y)       | R'^{xy}_{uv}   |
/// | −−    | (v, u)       | (x, y)       | R⁻^{xy}_{uv}   |
/// | −+    | (v₋, u₊)     | (x₊, y₋)     | S^{xy}_{uv}    |
/// | +−    | (x₊, y₋)     | (v₋, u₊)     | conj S^{xy}_{uv} |
///
/// All other entries are zero.
pub fn assemble_block_diagonal<T: Real>(
    r_plus: &MatrixScatteringFunction<T>,
    s_lr: &MatrixScatteringFunction<T>,
    r_minus: &MatrixScatteringFunction<T>,
    q: T,
) -> Result<CMatrix<T>> {
    if s_lr.kind() != Kind::LR {
        return Err(Error::Structural(format!("{} is not a left-right function", s_lr.label())));
    }
    let (dp, dm) = (r_plus.d(), r_minus.d());
    if s_lr.left_space().dim() != dp || s_lr.right_space().dim() != dm {
        return Err(Error::Structural("left-right function does not match the side multiplicities".into()));
    }
    let rp = r_plus.eval_r(c(-q, T::PI()))?;
    let rm = r_minus.eval_r(c(q, T::zero()))?;
    let s = s_lr.eval_real(q)?;
    let n = dp + dm;
    let pos = |first: usize, second: usize| second + n * first;
    let mut out = CMatrix::zeros(n * n, n * n);
    for x in 0..dp {
        for y in 0..dp {
            for u in 0..dp {
                for v in 0..dp {
                    out[(pos(v, u), pos(x, y))] = rp[(x * dp + y, u * dp + v)];
                }
            }
        }
    }
    for x in 0..dm {
        for y in 0..dm {
            for u in 0..dm {
                for v in 0..dm {
                    out[(pos(dp + v, dp + u), pos(dp + x, dp + y))] = rm[(x * dm + y, u * dm + v)];
                }
            }
        }
    }
    for x in 0..dp {
        for y in 0..dm {
            for u in 0..dp {
                for v in 0..dm {
                    let z = s[(x * dm + y, u * dm + v)];
                    out[(pos(dp + v, u), pos(x, dp + y))] = z;
                    out[(pos(x, dp + y), pos(dp + v, u))] = z.conj();
                }
            }
        }
    }
    Ok(out)
}

/// Positions the block layout allows to be nonzero, as rows of 'x' (allowed) and '.' (zero).
pub fn block_mask(dp: usize, dm: usize) -> Vec<String> {
    let n = dp + dm;
    let side = |i: usize| i >= dp;
    (0..n * n)
        .map(|r| {
            let (r1, r2) = (r / n, r % n);
            (0..n * n)
                .map(|col| {
                    let (c1, c2) = (col / n, col % n);
                    let allowed = match (side(r1), side(r2)) {
                        (false, false) => !side(c1) && !side(c2),
                        (true, true) => side(c1) && side(c2),
                        (true, false) => !side(c1) && side(c2),
                        (false, true) => side(c1) && !side(c2),
                    };
                    if allowed {
                        'x'
                    } else {
                        '.'
                    }
                })
                .collect()
        })
        .collect()
}
