use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wedgelab::linalg::{flip, random_unitary, CMatrix};
use wedgelab::tensor::*;
use wedgelab::{Error, Leg, Tensor};

fn leg(d: usize, g: usize) -> Leg {
    let grid = if g == 1 { RapidityGrid::point() } else { RapidityGrid::gauss_legendre(g, 3.0).unwrap() };
    LegSpace::new(InternalIndexSpace::new(d).unwrap(), Arc::new(grid))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn identity_permutation_is_noop() {
    let t = Tensor::random(vec![leg(2, 2), leg(1, 3), leg(2, 1)], &mut rng(1)).unwrap();
    let p = t.permute_legs(&Permutation::identity(3)).unwrap();
    assert_eq!(p.as_slice(), t.as_slice());
}

#[test]
fn reversal_of_basis_tensor() {
    let l = leg(2, 2);
    let t = Tensor::basis(vec![l.clone(), l.clone(), l.clone()], &[0, 1, 3]).unwrap();
    let r = t.permute_legs(&Permutation::reversal(3)).unwrap();
    let expected = Tensor::basis(vec![l.clone(), l.clone(), l], &[3, 1, 0]).unwrap();
    assert_eq!(r.as_slice(), expected.as_slice());
}

#[test]
fn permute_then_inverse_is_exact() {
    let t = Tensor::random(vec![leg(2, 2), leg(1, 3), leg(2, 1), leg(1, 2)], &mut rng(2)).unwrap();
    for p in Permutation::all(4) {
        let back = t.permute_legs(&p).unwrap().permute_legs(&p.inverse()).unwrap();
        assert_eq!(back.as_slice(), t.as_slice());
        assert!(back.same_space(&t));
    }
}

#[test]
fn permute_legs_entry_rule() {
    let t = Tensor::random(vec![leg(1, 2), leg(1, 3), leg(1, 4)], &mut rng(3)).unwrap();
    let sigma = Permutation::from_vec(vec![2, 0, 1]).unwrap();
    let r = t.permute_legs(&sigma).unwrap();
    // result leg σ(m) has the dimension of leg m of t
    assert_eq!(r.shape(), vec![3, 4, 2]);
    for i0 in 0..3 {
        for i1 in 0..4 {
            for i2 in 0..2 {
                let i = [i0, i1, i2];
                let src: Vec<usize> = (0..3).map(|m| i[sigma.apply(m)]).collect();
                assert_eq!(r.get(&i).unwrap(), t.get(&src).unwrap());
            }
        }
    }
}

#[test]
fn permutation_is_a_group_action() {
    let l = leg(1, 3);
    let t = Tensor::random(vec![l.clone(), l.clone(), l], &mut rng(4)).unwrap();
    for s in Permutation::all(3) {
        for u in Permutation::all(3) {
            let lhs = t.permute_legs(&u).unwrap().permute_legs(&s).unwrap();
            let rhs = t.permute_legs(&s.compose(&u)).unwrap();
            assert_eq!(lhs.as_slice(), rhs.as_slice());
        }
    }
}

#[test]
fn permutation_is_unitary_for_weighted_inner_product() {
    let l = leg(2, 3);
    let a = Tensor::random(vec![l.clone(), l.clone(), l.clone()], &mut rng(5)).unwrap();
    let b = Tensor::random(vec![l.clone(), l.clone(), l], &mut rng(6)).unwrap();
    let p = Permutation::from_vec(vec![1, 2, 0]).unwrap();
    let lhs = a.permute_legs(&p).unwrap().inner_product(&b.permute_legs(&p).unwrap()).unwrap();
    let rhs = a.inner_product(&b).unwrap();
    assert!((lhs - rhs).norm() < 1e-13 * rhs.norm().max(1.0));
}

#[test]
fn permutation_rank_mismatch() {
    let t = Tensor::random(vec![leg(1, 2), leg(1, 2)], &mut rng(7)).unwrap();
    assert!(matches!(t.permute_legs(&Permutation::identity(3)), Err(Error::Structural(_))));
}

#[test]
fn embed_identity_and_flip() {
    let l = leg(2, 2);
    let t = Tensor::random(vec![l.clone(), l.clone(), l.clone()], &mut rng(8)).unwrap();
    let id = embed_pairwise(PairOp::dense(CMatrix::identity(16)), 0, 1, 3).unwrap();
    assert_eq!(id.apply(&t).unwrap().as_slice(), t.as_slice());

    let e = Tensor::basis(vec![l.clone(), l.clone()], &[1, 2]).unwrap();
    let f = embed_pairwise(PairOp::dense(flip(4)), 0, 1, 2).unwrap();
    let out = f.apply(&e).unwrap();
    assert_eq!(out.as_slice(), Tensor::basis(vec![l.clone(), l], &[2, 1]).unwrap().as_slice());
}

#[test]
fn embed_kronecker_product_on_outer_legs() {
    let l = leg(2, 2);
    let mut r = rng(9);
    let a = random_unitary::<f64>(4, &mut r);
    let b = random_unitary::<f64>(4, &mut r);
    let m = a.kron(&b);
    let op = embed_pairwise(PairOp::dense(m), 0, 2, 3).unwrap();
    for (x, y, z) in [(0, 1, 2), (3, 0, 1), (2, 2, 3)] {
        let e = Tensor::basis(vec![l.clone(), l.clone(), l.clone()], &[x, y, z]).unwrap();
        let out = op.apply(&e).unwrap();
        // (A e_x) ⊗ e_y ⊗ (B e_z)
        let expected = Tensor::from_fn(vec![l.clone(), l.clone(), l.clone()], |i| {
            if i[1] == y {
                a[(i[0], x)] * b[(i[2], z)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        assert!(out.sub(&expected).unwrap().max_abs() < 1e-15);
    }
}

#[test]
fn embed_reversed_leg_order() {
    // M on legs (2, 0) is F M F on legs (0, 2)
    let l = leg(1, 3);
    let mut r = rng(10);
    let m = random_unitary::<f64>(9, &mut r);
    let t = Tensor::random(vec![l.clone(), l.clone(), l], &mut r).unwrap();
    let a = embed_pairwise(PairOp::dense(m.clone()), 2, 0, 3).unwrap().apply(&t).unwrap();
    let fmf = flip::<f64>(3).matmul(&m).matmul(&flip(3));
    let b = embed_pairwise(PairOp::dense(fmf), 0, 2, 3).unwrap().apply(&t).unwrap();
    assert!(a.sub(&b).unwrap().max_abs() < 1e-14);
}

#[test]
fn embed_errors() {
    let op = PairOp::<f64>::dense(CMatrix::identity(4));
    assert!(matches!(embed_pairwise(op.clone(), 1, 1, 3), Err(Error::Structural(_))));
    assert!(matches!(embed_pairwise(op.clone(), 0, 3, 3), Err(Error::Structural(_))));
    let e = embed_pairwise(op, 0, 1, 2).unwrap();
    let t = Tensor::random(vec![leg(1, 3), leg(1, 3)], &mut rng(11)).unwrap();
    assert!(e.apply(&t).is_err());
}

#[test]
fn disjoint_embeddings_commute() {
    let l = leg(1, 3);
    let mut r = rng(12);
    let t = Tensor::random(vec![l.clone(), l.clone(), l.clone(), l], &mut r).unwrap();
    let a = embed_pairwise(PairOp::dense(random_unitary(9, &mut r)), 0, 2, 4).unwrap();
    let b = embed_pairwise(PairOp::dense(random_unitary(9, &mut r)), 3, 1, 4).unwrap();
    let ab = a.apply(&b.apply(&t).unwrap()).unwrap();
    let ba = b.apply(&a.apply(&t).unwrap()).unwrap();
    assert!(ab.sub(&ba).unwrap().max_abs() < 1e-13);
}

#[test]
fn node_blocks_match_dense_expansion() {
    let l = leg(2, 3);
    let mut r = rng(13);
    let blocks: Vec<CMatrix<f64>> = (0..9).map(|_| random_unitary(4, &mut r)).collect();
    let op = PairOp::node_blocks(2, 2, 3, 3, |k, j| Ok(blocks[k * 3 + j].clone())).unwrap();
    let dense = CMatrix::from_fn(36, 36, |row, col| {
        let (a, b) = (row / 6, row % 6);
        let (c, d) = (col / 6, col % 6);
        let (al, k) = (a % 2, a / 2);
        let (be, j) = (b % 2, b / 2);
        let (ga, k2) = (c % 2, c / 2);
        let (de, j2) = (d % 2, d / 2);
        if k != k2 || j != j2 {
            return Complex64::new(0.0, 0.0);
        }
        blocks[k * 3 + j][(al * 2 + be, ga * 2 + de)]
    });
    let t = Tensor::random(vec![l.clone(), l.clone(), l], &mut r).unwrap();
    let x = embed_pairwise(op.clone(), 2, 0, 3).unwrap().apply(&t).unwrap();
    let y = embed_pairwise(PairOp::dense(dense.clone()), 2, 0, 3).unwrap().apply(&t).unwrap();
    assert!(x.sub(&y).unwrap().max_abs() < 1e-14);
    let xa = embed_pairwise(op.adjoint(), 1, 2, 3).unwrap().apply(&t).unwrap();
    let ya = embed_pairwise(PairOp::dense(dense.adjoint()), 1, 2, 3).unwrap().apply(&t).unwrap();
    assert!(xa.sub(&ya).unwrap().max_abs() < 1e-14);
    let xs = embed_pairwise(op.swapped(), 0, 1, 3).unwrap().apply(&t).unwrap();
    let ys = embed_pairwise(PairOp::dense(dense), 1, 0, 3).unwrap().apply(&t).unwrap();
    assert!(xs.sub(&ys).unwrap().max_abs() < 1e-14);
}

#[test]
fn contract_bra_examples() {
    let l = leg(2, 3);
    let mut r = rng(14);
    let v = Tensor::random(vec![l.clone()], &mut r).unwrap();
    let v = v.scale(Complex64::new(1.0 / v.norm(), 0.0));
    let u = Tensor::random(vec![l.clone()], &mut r).unwrap();
    let vu = v.outer(&u).unwrap();
    let out = vu.contract_bra(v.as_slice(), 0).unwrap();
    assert!(out.sub(&u).unwrap().max_abs() < 1e-14);

    // orthogonalize u against v
    let overlap = v.inner_product(&u).unwrap();
    let mut perp = u.clone();
    perp.axpy(-overlap, &v).unwrap();
    let w = Tensor::random(vec![l.clone()], &mut r).unwrap();
    let out = perp.outer(&w).unwrap().contract_bra(v.as_slice(), 0).unwrap();
    assert!(out.max_abs() < 1e-14);

    let scalar = Tensor::scalar(Complex64::new(1.0, 0.0));
    assert!(matches!(scalar.contract_bra(&[], 0), Err(Error::Domain(_))));
    assert!(matches!(vu.contract_bra(v.as_slice(), 2), Err(Error::Structural(_))));
}

#[test]
fn contract_bra_matches_loops() {
    let legs = vec![leg(2, 2), leg(1, 3), leg(2, 3)];
    let mut r = rng(15);
    let t = Tensor::random(legs.clone(), &mut r).unwrap();
    for k in 0..3 {
        let v = Tensor::random(vec![legs[k].clone()], &mut r).unwrap();
        let fast = t.contract_bra(v.as_slice(), k).unwrap();
        let mut rest = legs.clone();
        rest.remove(k);
        let slow = Tensor::from_fn(rest, |i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..legs[k].dim() {
                let mut full = i.to_vec();
                full.insert(k, a);
                acc += legs[k].weight(a) * v.as_slice()[a].conj() * t.get(&full).unwrap();
            }
            acc
        })
        .unwrap();
        let scale = slow.max_abs();
        assert!(fast.sub(&slow).unwrap().max_abs() <= 1e-14 * scale);
    }
}

#[test]
fn inner_product_of_basis_tensor() {
    let (a, b) = (leg(2, 3), leg(1, 4));
    let t = Tensor::basis(vec![a.clone(), b.clone()], &[3, 2]).unwrap();
    let expected = a.weight(3) * b.weight(2);
    let ip = t.inner_product(&t).unwrap();
    assert!((ip.re - expected).abs() < 1e-15 && ip.im == 0.0);
}

#[test]
fn inner_product_hermitian_and_cauchy_schwarz() {
    let legs = vec![leg(2, 3), leg(1, 3)];
    let mut r = rng(16);
    for _ in 0..100 {
        let s = Tensor::random(legs.clone(), &mut r).unwrap();
        let t = Tensor::random(legs.clone(), &mut r).unwrap();
        let st = s.inner_product(&t).unwrap();
        let ts = t.inner_product(&s).unwrap();
        assert!((st - ts.conj()).norm() <= 1e-15 * st.norm().max(1.0));
        let ss = s.inner_product(&s).unwrap();
        assert!(ss.re >= 0.0 && ss.im == 0.0);
        assert!(st.norm_sqr() <= ss.re * t.norm_sqr() * (1.0 + 1e-12));
    }
    let u = Tensor::random(vec![leg(2, 3)], &mut r).unwrap();
    let s = Tensor::random(legs, &mut r).unwrap();
    assert!(matches!(s.inner_product(&u), Err(Error::Structural(_))));
}

#[test]
fn operations_keep_finite_inputs_finite() {
    let l = leg(2, 3);
    let mut r = rng(17);
    let t = Tensor::random(vec![l.clone(), l.clone(), l.clone()], &mut r).unwrap();
    let v = Tensor::random(vec![l], &mut r).unwrap();
    assert!(t.permute_legs(&Permutation::reversal(3)).unwrap().is_finite());
    let op = embed_pairwise(PairOp::dense(random_unitary(36, &mut r)), 0, 2, 3).unwrap();
    assert!(op.apply(&t).unwrap().is_finite());
    assert!(t.contract_bra(v.as_slice(), 1).unwrap().is_finite());
    assert!(t.inner_product(&t).unwrap().re.is_finite());
}

#[test]
fn capacity_limit() {
    let big = leg(1, 1 << 11);
    assert!(matches!(Tensor::zeros(vec![big.clone(), big.clone(), big]), Err(Error::Capacity(_))));
}

#[test]
fn works_in_single_precision() {
    let grid = Arc::new(RapidityGrid::<f32>::gauss_legendre(4, 2.0).unwrap());
    let l = LegSpace::new(InternalIndexSpace::new(1).unwrap(), grid);
    let t = LeggedTensor::<f32>::random(vec![l.clone(), l], &mut rng(18)).unwrap();
    let back = t.permute_legs(&Permutation::reversal(2)).unwrap().permute_legs(&Permutation::reversal(2)).unwrap();
    assert_eq!(back.as_slice(), t.as_slice());
    assert!((t.inner_product(&t).unwrap().re - t.norm_sqr()).abs() < 1e-5);
}

proptest! {
    #[test]
    fn words_compose_like_permutations(a in proptest::collection::vec(0usize..4, 0..8), b in proptest::collection::vec(0usize..4, 0..8)) {
        let pa = Permutation::from_word(5, &a).unwrap();
        let pb = Permutation::from_word(5, &b).unwrap();
        let ab: Vec<usize> = a.iter().chain(&b).cloned().collect();
        prop_assert_eq!(Permutation::from_word(5, &ab).unwrap(), pa.compose(&pb));
    }
}
