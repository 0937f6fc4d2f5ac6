use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wedgelab::standard_pair::*;
use wedgelab::tensor::{InternalIndexSpace, LegSpace, LeggedTensor, RapidityGrid};
use wedgelab::{Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gaussian() -> OneParticleVector<f64> {
    OneParticleVector::scalar(VectorDomain::Entire, "gauss", |z: Complex64| Ok((-z * z / 2.0).exp() * (c(1.0, 0.0) + c(0.0, 0.3) * z)))
}

fn rep() -> StandardPairRep<f64> {
    StandardPairRep::scalar()
}

fn nodes() -> Vec<f64> {
    RapidityGrid::<f64>::standard().nodes().to_vec()
}

fn max_diff(a: &OneParticleVector<f64>, b: &OneParticleVector<f64>, pts: &[Complex64]) -> f64 {
    pts.iter().map(|&z| (a.eval(0, z).unwrap() - b.eval(0, z).unwrap()).norm()).fold(0.0, f64::max)
}

fn real_pts() -> Vec<Complex64> {
    nodes().into_iter().map(|q| c(q, 0.0)).collect()
}

fn right_bump() -> OneParticleVector<f64> {
    half_line_transform(&TestFunction::bump_on(1.0, 2.0).unwrap(), TransformSign::Plus).unwrap()
}

#[test]
fn translate_group_law_and_norm() {
    let r = rep();
    let f = gaussian();
    let pts = real_pts();
    assert_eq!(max_diff(&r.translate(&f, 0.0).unwrap(), &f, &pts), 0.0);
    let st = r.translate(&r.translate(&f, 0.4).unwrap(), -1.3).unwrap();
    let direct = r.translate(&f, 0.4 - 1.3).unwrap();
    assert!(max_diff(&st, &direct, &pts) < 1e-14);
    let leg = r.leg();
    let n0 = f.norm(&leg).unwrap();
    let n1 = r.translate(&f, 2.5).unwrap().norm(&leg).unwrap();
    assert!((n0 - n1).abs() < 1e-12 * n0);
}

#[test]
fn opposite_translate_commutes_with_translate() {
    let r = rep();
    let f = gaussian();
    assert_eq!(max_diff(&r.opposite_translate(&f, 0.0).unwrap(), &f, &real_pts()), 0.0);
    let a = r.translate(&r.opposite_translate(&f, 0.8).unwrap(), -0.6).unwrap();
    let b = r.opposite_translate(&r.translate(&f, -0.6).unwrap(), 0.8).unwrap();
    assert!(max_diff(&a, &b, &real_pts()) < 1e-14);
}

#[test]
fn opposite_translate_preserves_h_only_for_nonpositive_t() {
    let r = rep();
    let f = right_bump();
    let interior = |t: f64| {
        let g = r.opposite_translate(&f, t).unwrap();
        let e = check_h_membership(&g, 1e-6).unwrap();
        (e[0].residual, e[1].residual)
    };
    let (b0, i0) = interior(0.0);
    for t in [-1.0, -0.5, -0.1] {
        let (b, i) = interior(t);
        assert!(b <= b0 + 1e-8, "t = {t}: boundary {b} vs {b0}");
        assert!(i <= i0 + 1e-8, "t = {t}: interior {i} vs {i0}");
    }
    let (_, i_pos) = interior(0.5);
    assert!(i_pos > 1e3, "interior ratio {i_pos} should blow up for t > 0");
}

#[test]
fn per_index_masses_must_respect_bar() {
    let space = InternalIndexSpace::with_bar(vec![1, 0]).unwrap();
    let grid = Arc::new(RapidityGrid::standard());
    let r = StandardPairRep::new(space.clone(), grid.clone(), 1.0).unwrap();
    assert!(matches!(r.clone().with_index_masses(vec![1.0, 2.0]), Err(Error::Parameter { .. })));
    assert!(r.with_index_masses(vec![2.0, 2.0]).is_ok());
    assert!(matches!(StandardPairRep::new(space, grid, 0.0), Err(Error::Parameter { .. })));
}

#[test]
fn modular_flow_laws() {
    let r = rep();
    let f = gaussian();
    let pts = real_pts();
    assert_eq!(max_diff(&r.modular_flow(&f, 0.0).unwrap(), &f, &pts), 0.0);
    let back = r.modular_flow(&r.modular_flow(&f, 0.3).unwrap(), -0.3).unwrap();
    assert!(max_diff(&back, &f, &pts) < 1e-15);
    let st = r.modular_flow(&r.modular_flow(&f, 0.2).unwrap(), 0.15).unwrap();
    assert!(max_diff(&st, &r.modular_flow(&f, 0.35).unwrap(), &pts) < 1e-12);
    // the shift is exact; the norm comparison is limited by how well 32 nodes resolve the vector
    let wide = OneParticleVector::scalar(VectorDomain::Entire, "wide", |z: Complex64| {
        Ok((-z * z / 2.6).exp() * (c(1.0, 0.0) + c(0.0, 0.3) * z))
    });
    let leg = r.leg();
    let n0 = wide.norm(&leg).unwrap();
    let n1 = r.modular_flow(&wide, 0.05).unwrap().norm(&leg).unwrap();
    assert!((n0 - n1).abs() < 1e-11 * n0, "{n0} {n1}");
}

#[test]
fn modular_flow_preserves_boundary_identity() {
    let r = rep();
    let f = right_bump();
    for s in [-0.2, 0.1, 0.25] {
        let g = r.modular_flow(&f, s).unwrap();
        let worst = [-2.0, -1.0, 0.0, 1.0, 2.0]
            .iter()
            .map(|&q| (g.eval(0, c(q, PI)).unwrap() - g.eval(0, c(q, 0.0)).unwrap().conj()).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "s = {s}: {worst}");
    }
}

#[test]
fn grid_backed_modular_flow_needs_commensurate_shift() {
    let r = rep();
    let g = gaussian().sampled(&r.leg()).unwrap();
    let same = r.modular_flow(&g, 0.0).unwrap();
    assert_eq!(same.samples(&r.leg()).unwrap(), g.samples(&r.leg()).unwrap());
    assert!(matches!(r.modular_flow(&g, 0.1), Err(Error::Domain(_))));
}

#[test]
fn borchers_relation() {
    let r = rep();
    let f = gaussian();
    let pts = real_pts();
    for (s, t) in [(0.1, 0.7), (-0.05, 1.3), (0.02, -0.4)] {
        let lhs = r.modular_flow(&r.translate(&r.modular_flow(&f, -s).unwrap(), t).unwrap(), s).unwrap();
        let rhs = r.translate(&f, (2.0 * PI * s).exp() * t).unwrap();
        assert!(max_diff(&lhs, &rhs, &pts) < 1e-10, "s = {s}, t = {t}");
    }
}

#[test]
fn modular_conjugation() {
    let r = rep();
    let f = gaussian();
    let pts = real_pts();
    let jj = r.modular_conjugate(&r.modular_conjugate(&f).unwrap()).unwrap();
    assert_eq!(max_diff(&jj, &f, &pts), 0.0);
    let real = OneParticleVector::scalar(VectorDomain::Entire, "real", |z: Complex64| Ok((-z * z).exp()));
    assert_eq!(max_diff(&r.modular_conjugate(&real).unwrap(), &real, &pts), 0.0);
    let jtj = r.modular_conjugate(&r.translate(&r.modular_conjugate(&real).unwrap(), 0.9).unwrap()).unwrap();
    assert!(max_diff(&jtj, &r.translate(&real, -0.9).unwrap(), &pts) < 1e-12);
    assert!(matches!(r.modular_conjugate(&f).unwrap().eval(0, c(0.0, 1.0)), Err(Error::InsufficientDomain(_))));
}

#[test]
fn modular_conjugation_is_antiunitary() {
    let space = InternalIndexSpace::with_bar(vec![1, 0, 2]).unwrap();
    let grid = Arc::new(RapidityGrid::standard());
    let r = StandardPairRep::new(space.clone(), grid.clone(), 1.0).unwrap();
    let leg = LegSpace::new(space, grid);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mk = |rng: &mut ChaCha8Rng| {
        let t = LeggedTensor::random(vec![leg.clone()], rng).unwrap();
        OneParticleVector::from_samples(leg.clone(), t.into_data(), "rand").unwrap()
    };
    let (f, g) = (mk(&mut rng), mk(&mut rng));
    let (jf, jg) = (r.modular_conjugate(&f).unwrap(), r.modular_conjugate(&g).unwrap());
    let lhs = jf.inner(&jg, &leg).unwrap();
    let rhs = g.inner(&f, &leg).unwrap();
    assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    let jjf = r.modular_conjugate(&jf).unwrap();
    assert_eq!(jjf.samples(&leg).unwrap(), f.samples(&leg).unwrap());
}

#[test]
fn half_line_bump_satisfies_boundary_identity() {
    let f = right_bump();
    for q in [-2.0, 0.0, 2.0] {
        let up = f.eval(0, c(q, PI)).unwrap();
        let down = f.eval(0, c(q, 0.0)).unwrap();
        assert!((up - down.conj()).norm() < 1e-8, "q = {q}");
    }
    assert!(f.certificate().unwrap().certifies_membership());
    let entries = check_h_membership(&f, 1e-6).unwrap();
    for e in &entries {
        assert!(e.pass, "{e:?}");
    }
}

#[test]
fn right_supported_family_passes_membership() {
    for (lo, hi) in [(0.1, 0.6), (0.5, 3.0), (2.0, 2.4)] {
        let f = half_line_transform(&TestFunction::bump_on(lo, hi).unwrap(), TransformSign::Plus).unwrap();
        for e in check_h_membership(&f, 1e-6).unwrap() {
            assert!(e.pass, "[{lo}, {hi}]: {e:?}");
        }
    }
}

#[test]
fn left_supported_bump_fails_membership() {
    let g = TestFunction::bump_on(-2.0, -1.0).unwrap();
    let f = half_line_transform(&g, TransformSign::Plus).unwrap();
    assert!(!f.certificate().unwrap().certifies_membership());
    let entries = check_h_membership(&f, 1e-6).unwrap();
    let interior = entries.iter().find(|e| e.axiom == "h.interior").unwrap();
    assert!(!interior.pass, "{interior:?}");
}

#[test]
fn half_line_transform_is_linear() {
    let g1 = TestFunction::bump(1.5, 0.5, 1.0).unwrap();
    let g2 = TestFunction::bump(0.8, 0.3, -0.7).unwrap();
    let sum = half_line_transform(&g1.sum(&g2), TransformSign::Plus).unwrap();
    let a = half_line_transform(&g1, TransformSign::Plus).unwrap();
    let b = half_line_transform(&g2, TransformSign::Plus).unwrap();
    for q in [-3.0, -1.0, 0.0, 0.5, 2.0, 3.5] {
        let z = c(q, 0.0);
        let d = sum.eval(0, z).unwrap() - a.eval(0, z).unwrap() - b.eval(0, z).unwrap();
        assert!(d.norm() < 1e-12, "q = {q}: {d}");
    }
}

#[test]
fn half_line_transform_matches_closed_form_for_minus_sign() {
    // g = indicator-free check: the minus sign flips the exponent and the prefactor
    let g = TestFunction::bump_on(0.5, 1.5).unwrap();
    let plus = half_line_transform(&g, TransformSign::Plus).unwrap();
    let minus = half_line_transform(&g, TransformSign::Minus).unwrap();
    for q in [-1.0, 0.0, 1.0] {
        // ĝ⁻(q) = −e^{2q} ĝ⁺(−q) since both integrals are ∫ g e^{i t e^{-q}}
        let lhs = minus.eval(0, c(q, 0.0)).unwrap();
        let rhs = -plus.eval(0, c(-q, 0.0)).unwrap() * (2.0 * q).exp();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn complex_test_function_is_rejected() {
    let g = TestFunction::custom(0.0, 1.0, |t| c(0.0, (PI * t).sin())).unwrap();
    assert!(matches!(half_line_transform(&g, TransformSign::Plus), Err(Error::Domain(_))));
}

#[test]
fn membership_examples() {
    let zero = OneParticleVector::<f64>::zero(InternalIndexSpace::new(1).unwrap());
    for e in check_h_membership(&zero, 1e-6).unwrap() {
        assert!(e.pass && e.residual == 0.0, "{e:?}");
    }
    // pole at iπ/2 inside the test rectangle; the boundary identity itself holds
    let pole = OneParticleVector::scalar(VectorDomain::Strip, "pole", |z: Complex64| Ok(1.0 / (z - c(0.0, PI / 2.0))));
    let entries = check_h_membership(&pole, 1e-6).unwrap();
    assert!(entries.iter().find(|e| e.axiom == "h.boundary").unwrap().pass);
    assert!(!entries.iter().find(|e| e.axiom == "h.cauchy").unwrap().pass);
    let grid = gaussian().sampled(&rep().leg()).unwrap();
    assert!(matches!(check_h_membership(&grid, 1e-6), Err(Error::InsufficientDomain(_))));
}

fn wedge_bump() -> TestFunction2<f64> {
    TestFunction2::radial_bump((0.2, 1.5), 0.5, 1.0).unwrap()
}

#[test]
fn wedge_transform_conjugation() {
    let f = wedge_bump();
    assert!(f.in_right_wedge());
    let (fp, fm) = wedge_transform(&f, 1.0).unwrap();
    for q in [-2.0, -0.5, 0.0, 1.0, 2.5] {
        let z = c(q, 0.0);
        assert!((fm.eval(0, z).unwrap() - fp.eval(0, z).unwrap().conj()).norm() < 1e-12);
    }
}

#[test]
fn wedge_transform_translation_covariance() {
    let f = wedge_bump();
    let a = (0.3, -0.4);
    let m = 1.7;
    let (fp, _) = wedge_transform(&f, m).unwrap();
    let (gp, _) = wedge_transform(&f.shifted(a), m).unwrap();
    for q in [-1.5, 0.0, 0.7, 2.0] {
        let z = c(q, 0.0);
        let phase = (c(0.0, 1.0) * minkowski(mass_shell(z, m), a)).exp();
        let d = gp.eval(0, z).unwrap() - phase * fp.eval(0, z).unwrap();
        assert!(d.norm() < 1e-10, "q = {q}: {d}");
    }
}

#[test]
fn wedge_transform_boundary_relation() {
    let (fp, fm) = wedge_transform(&wedge_bump(), 1.0).unwrap();
    for q in [-1.0, 0.0, 1.0] {
        let d = fp.eval(0, c(q, -PI)).unwrap() - fm.eval(0, c(q, 0.0)).unwrap();
        assert!(d.norm() < 1e-6, "q = {q}: {d}");
    }
    // bounded on the lower strip for wedge support
    let scale = fp.eval(0, c(0.0, 0.0)).unwrap().norm();
    let mid = fp.eval(0, c(0.0, -PI / 2.0)).unwrap().norm();
    assert!(mid <= scale.max(1.0));
}

#[test]
fn wedge_transform_rejects_bad_mass() {
    assert!(matches!(wedge_transform(&wedge_bump(), 0.0), Err(Error::Parameter { .. })));
    assert!(matches!(wedge_transform(&wedge_bump(), -1.0), Err(Error::Parameter { .. })));
}

#[test]
fn massive_intertwiner_is_isometric() {
    let f = |p: f64| c((-p).exp(), 0.0);
    let one = verify_isometry(f, 1.0).unwrap();
    assert!((one.momentum_norm_sqr - 0.25).abs() < 1e-10);
    assert!((one.rapidity_norm_sqr - 0.25).abs() < 1e-10);
    let three = verify_isometry(f, 3.0).unwrap();
    assert!((three.rapidity_norm_sqr - one.rapidity_norm_sqr).abs() < 1e-10);
    assert!(matches!(verify_isometry(f, 0.0), Err(Error::Parameter { .. })));
}

#[test]
fn massive_intertwiner_intertwines_translations() {
    let f = |p: f64| c((-p).exp() * (1.0 + p), 0.0);
    let thetas = [-2.0, -0.7, 0.0, 1.1, 2.5];
    for (m, t) in [(1.0, 0.5), (2.0, -1.2)] {
        assert!(intertwining_residual(f, m, t, &thetas).unwrap() < 1e-14);
    }
}

#[test]
fn single_precision_transform() {
    let g = TestFunction::<f32>::bump_on(1.0, 2.0).unwrap();
    let f = half_line_transform(&g, TransformSign::Plus).unwrap();
    let up = f.eval(0, num_complex::Complex::new(0.0f32, std::f32::consts::PI)).unwrap();
    let down = f.eval(0, num_complex::Complex::new(0.0f32, 0.0)).unwrap();
    assert!((up - down.conj()).norm() < 1e-4);
}
