use std::f64::consts::PI;

use num_complex::Complex64;
use wedgelab::linalg::CMatrix;
use wedgelab::scattering::*;
use wedgelab::tensor::{InternalIndexSpace, RapidityGrid};

fn golden_mask() -> Vec<String> {
    include_str!("golden/block_mask_2x2.txt").lines().map(str::to_owned).collect()
}

fn generic_inputs() -> (ScatteringTriple, ScatteringTriple) {
    let sp = InternalIndexSpace::new(2).unwrap();
    let dense = |seed: f64| {
        CMatrix::from_fn(4, 4, |r, c| Complex64::new(1.0 + seed + r as f64, 0.5 + c as f64 * seed))
    };
    let rp = constant(dense(0.3), sp.clone(), Convention::R).unwrap();
    let rm = constant(dense(0.7), sp.clone(), Convention::R).unwrap();
    let s = lr_constant(dense(1.1), sp.clone(), sp.clone()).unwrap();
    let id = constant_identity(sp.clone());
    ((rp, s, rm), (id.clone(), lr_identity(sp.clone(), sp), id))
}

type ScatteringTriple = (
    MatrixScatteringFunction<f64>,
    MatrixScatteringFunction<f64>,
    MatrixScatteringFunction<f64>,
);

fn mask_of(m: &CMatrix<f64>) -> Vec<String> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| if m[(r, c)].norm() != 0.0 { 'x' } else { '.' }).collect())
        .collect()
}

#[test]
fn layout_mask_matches_transcribed_display() {
    assert_eq!(block_mask(2, 2), golden_mask());
    let ((rp, s, rm), _) = generic_inputs();
    let m = assemble_block_diagonal(&rp, &s, &rm, 0.37).unwrap();
    assert_eq!(mask_of(&m), golden_mask());
}

#[test]
fn generic_entries_sit_where_the_display_puts_them() {
    let ((rp, s, rm), _) = generic_inputs();
    let q = 0.37;
    let m = assemble_block_diagonal(&rp, &s, &rm, q).unwrap();
    let r1 = rp.eval_r(Complex64::new(-q, PI)).unwrap();
    let r2 = rm.eval_r(Complex64::new(q, 0.0)).unwrap();
    let sv = s.eval_real(q).unwrap();
    // 1-based (row, col) of the display, upper pair then lower pair of the symbol (1-based).
    let upper = |a: usize, b: usize| (a - 1) * 2 + (b - 1);
    let cases: Vec<((usize, usize), Complex64)> = vec![
        ((1, 1), r1[(upper(1, 1), upper(1, 1))]),
        ((1, 2), r1[(upper(1, 2), upper(1, 1))]),
        ((1, 5), r1[(upper(2, 1), upper(1, 1))]),
        ((2, 1), r1[(upper(1, 1), upper(2, 1))]),
        ((5, 6), r1[(upper(2, 2), upper(1, 2))]),
        ((6, 6), r1[(upper(2, 2), upper(2, 2))]),
        ((3, 9), sv[(upper(1, 1), upper(1, 1))].conj()),
        ((3, 10), sv[(upper(1, 1), upper(2, 1))].conj()),
        ((4, 13), sv[(upper(1, 2), upper(1, 2))].conj()),
        ((8, 14), sv[(upper(2, 2), upper(2, 2))].conj()),
        ((9, 3), sv[(upper(1, 1), upper(1, 1))]),
        ((9, 8), sv[(upper(2, 2), upper(1, 1))]),
        ((10, 4), sv[(upper(1, 2), upper(2, 1))]),
        ((13, 3), sv[(upper(1, 1), upper(1, 2))]),
        ((14, 7), sv[(upper(2, 1), upper(2, 2))]),
        ((11, 11), r2[(upper(1, 1), upper(1, 1))]),
        ((12, 15), r2[(upper(2, 1), upper(2, 1))]),
        ((15, 12), r2[(upper(1, 2), upper(1, 2))]),
        ((16, 16), r2[(upper(2, 2), upper(2, 2))]),
    ];
    for ((r, c), v) in cases {
        assert_eq!(m[(r - 1, c - 1)], v, "display position ({r}, {c})");
    }
}

#[test]
fn identity_inputs_give_a_permutation_matrix() {
    let (_, (rp, s, rm)) = generic_inputs();
    let m = assemble_block_diagonal(&rp, &s, &rm, 0.0).unwrap();
    for r in 0..16 {
        let ones = (0..16).filter(|&c| m[(r, c)] == Complex64::new(1.0, 0.0)).count();
        let nonzero = (0..16).filter(|&c| m[(r, c)].norm() != 0.0).count();
        assert_eq!((ones, nonzero), (1, 1), "row {r}");
    }
    // ++ block: identity R' puts 1 at R'^{xy}_{xy}, i.e. row (y,x), column (x,y).
    assert_eq!(m[(0, 0)], Complex64::new(1.0, 0.0));
    assert_eq!(m[(1, 4)], Complex64::new(1.0, 0.0));
    assert_eq!(m[(4, 1)], Complex64::new(1.0, 0.0));
    // mixed block: S^{11}_{11} at display (9, 3).
    assert_eq!(m[(8, 2)], Complex64::new(1.0, 0.0));
}

#[test]
fn scalar_case_is_a_four_by_four_pattern() {
    let rp = scalar_family::<f64>(&[PI / 6.0], 1).unwrap();
    let rm = scalar_family::<f64>(&[PI / 3.0], -1).unwrap();
    let s = lr_scalar("s", sinh_product::<f64>(&[PI / 4.0], 1).unwrap());
    let q = 0.8;
    let m = assemble_block_diagonal(&rp, &s, &rm, q).unwrap();
    let expected_mask = ["x...", "..x.", ".x..", "...x"];
    assert_eq!(mask_of(&m), expected_mask);
    let sq = sinh_factor(Complex64::new(q, 0.0), PI / 4.0);
    assert_eq!(m[(0, 0)], rp.eval(Complex64::new(-q, PI)).unwrap()[(0, 0)]);
    assert_eq!(m[(1, 2)], sq.conj());
    assert_eq!(m[(2, 1)], sq);
    assert_eq!(m[(3, 3)], rm.eval(Complex64::new(q, 0.0)).unwrap()[(0, 0)]);
}

#[test]
fn unitary_inputs_give_unitary_assembly() {
    let grid = RapidityGrid::<f64>::standard();
    let sp = InternalIndexSpace::new(2).unwrap();
    let r = tensor_square::<f64>(sp.clone(), &[PI / 3.0], 1).unwrap();
    let s = flip_lr_unchecked(&r);
    let id = CMatrix::identity(16);
    for &q in grid.nodes() {
        let m = assemble_block_diagonal(&r, &s, &r, q).unwrap();
        assert!(m.matmul(&m.adjoint()).sub(&id).spectral_norm() < 1e-12);
    }
    let rp = scalar_family::<f64>(&[PI / 6.0, PI / 2.0], 1).unwrap();
    let s = lr_scalar("s", sinh_product::<f64>(&[1.0], -1).unwrap());
    for &q in grid.nodes() {
        let m = assemble_block_diagonal(&rp, &s, &rp, q).unwrap();
        assert!(m.matmul(&m.adjoint()).sub(&CMatrix::identity(4)).spectral_norm() < 1e-12);
    }
}

#[test]
fn mismatched_sides_are_rejected() {
    let two = InternalIndexSpace::new(2).unwrap();
    let one = InternalIndexSpace::new(1).unwrap();
    let r = constant_identity::<f64>(two.clone());
    let s = lr_identity::<f64>(one.clone(), one);
    assert!(assemble_block_diagonal(&r, &s, &r, 0.0).is_err());
    assert!(assemble_block_diagonal(&r, &r, &r, 0.0).is_err());
}
