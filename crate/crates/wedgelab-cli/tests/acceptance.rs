//! Acceptance criteria for the toolkit, one line per criterion on stdout.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wedgelab::fock::{projector_residuals, representation_residual, word_difference, BraidingData, FockVector};
use wedgelab::linalg::CMatrix;
use wedgelab::locality::{
    half_line_commutator, half_line_commutator_with, locality_grid, sides_on_grid, twist_projector_commutation,
    twisted_locality_entries, Certification, LocalityProbe, TripleBundle,
};
use wedgelab::scattering::*;
use wedgelab::standard_pair::{
    half_line_transform, intertwining_residual, verify_isometry, OneParticleVector, TestFunction, TransformSign,
};
use wedgelab::tensor::{InternalIndexSpace, LegSpace, LeggedTensor, Permutation, RapidityGrid};
use wedgelab::{Complex64, ScatteringFunction};
use wedgelab_cli::{parse_model, run_suite, RunOptions, Suite};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lib<T>(r: wedgelab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn space(d: usize) -> InternalIndexSpace {
    InternalIndexSpace::new(d).unwrap()
}

fn gl(g: usize, qmax: f64) -> Arc<RapidityGrid<f64>> {
    Arc::new(RapidityGrid::gauss_legendre(g, qmax).unwrap())
}

fn models_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models")
}

const SHIPPED: [&str; 5] = ["free", "sinh", "sinh_flip", "massive_scalar", "broken_crossing"];

/// Constant identities and every sinh family with one to three blocks from {π/6, π/4, π/2}, both signs.
fn ll_models() -> Vec<ScatteringFunction> {
    let values = [PI / 6.0, PI / 4.0, PI / 2.0];
    let mut out = vec![constant_identity(space(1)), constant_identity(space(2))];
    let mut blocks: Vec<Vec<f64>> = Vec::new();
    for i in 0..3 {
        blocks.push(vec![values[i]]);
        for j in i..3 {
            blocks.push(vec![values[i], values[j]]);
            for k in j..3 {
                blocks.push(vec![values[i], values[j], values[k]]);
            }
        }
    }
    for b in &blocks {
        for sign in [1, -1] {
            out.push(scalar_family(b, sign).unwrap());
        }
    }
    out
}

fn ll_suite_criterion() -> Outcome {
    let grid = RapidityGrid::standard();
    ensure!(grid.len() == 32, "default grid has {} nodes", grid.len());
    let tol = Tolerances::default();
    ensure!(tol.algebraic == 1e-10 && tol.quadrature == 1e-8, "default tolerances changed: {tol:?}");
    let models = ll_models();
    let mut slowest = Duration::ZERO;
    for m in &models {
        let start = Instant::now();
        for e in lib(ll_suite(m, &grid, &tol))? {
            ensure!(e.pass, "{}: {} residual {:e}", m.label(), e.axiom, e.residual);
        }
        slowest = slowest.max(start.elapsed());
    }
    ensure!(slowest < Duration::from_secs(10), "slowest model took {slowest:?}");
    Ok(format!("{} models, slowest {:.1} ms", models.len(), slowest.as_secs_f64() * 1e3))
}

fn representation_criterion() -> Outcome {
    let mut worst3 = 0.0f64;
    for blocks in [vec![PI / 6.0], vec![PI / 4.0, PI / 2.0], vec![PI / 6.0, PI / 4.0, PI / 2.0]] {
        let b = lib(BraidingData::from_function(&scalar_family(&blocks, 1).unwrap(), gl(3, 6.0)))?;
        let (res, count) = lib(representation_residual(&b, 3))?;
        ensure!(count == 36, "{count} products checked");
        ensure!(res < 1e-11, "D3 residual {res:e}");
        worst3 = worst3.max(res);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let b = lib(BraidingData::from_function(&scalar_family(&[PI / 6.0, PI / 2.0], 1).unwrap(), gl(3, 6.0)))?;
    let mut worst4 = 0.0f64;
    for _ in 0..10 {
        let w: Vec<usize> = (0..9).map(|_| rng.gen_range(0..3)).collect();
        let reduced = lib(Permutation::from_word(4, &w))?.word();
        let r = lib(word_difference(&b, 4, &w, &reduced))?;
        ensure!(r < 1e-10, "D4 word {w:?}: {r:e}");
        worst4 = worst4.max(r);
    }
    Ok(format!("D3 36 products max {worst3:.1e}, D4 10 word pairs max {worst4:.1e}"))
}

fn fock_reports() -> Result<Vec<(String, wedgelab::ValidationReport)>, String> {
    let mut out = Vec::new();
    for name in SHIPPED {
        let doc = parse_model(&models_dir().join(format!("{name}.model"))).map_err(|e| e.to_string())?;
        let opts = RunOptions { suites: Some(vec![Suite::Fock]), seed: Some(7), ..RunOptions::default() };
        let run = run_suite(&doc, &opts).map_err(|e| e.to_string())?;
        ensure!(run.errors.is_empty() && run.capacity.is_empty(), "{name}: {:?} {:?}", run.errors, run.capacity);
        ensure!(doc.fock.nmax == 3, "{name}: nmax {}", doc.fock.nmax);
        out.push((name.to_string(), run.report));
    }
    Ok(out)
}

fn projector_criterion(reports: &[(String, wedgelab::ValidationReport)]) -> Outcome {
    let mut worst = 0.0f64;
    let mut seen = 0;
    for (name, rep) in reports {
        for e in &rep.entries {
            if e.axiom.contains(".fock.projector.") || e.axiom.contains(".fock.flip_product.") {
                ensure!(e.residual < 1e-11, "{name} {}: {:e}", e.axiom, e.residual);
                worst = worst.max(e.residual);
                seen += 1;
            }
        }
        for n in 1..=3 {
            for kind in ["idempotent", "self_adjoint"] {
                ensure!(rep.entries.iter().any(|e| e.axiom.ends_with(&format!("projector.{kind}.n{n}"))), "{name}: no {kind} n={n}");
            }
        }
    }
    // the Fock checks on the shipped documents cover the identity and sinh families; add the rest of the
    // builders so every model the documents can name is exercised
    for r in [
        scalar_function("minus one", |_| Complex64::new(-1.0, 0.0)),
        tensor_square(space(2), &[PI / 4.0], 1).unwrap(),
        constant_identity(space(2)),
    ] {
        let b = lib(BraidingData::from_function(&r, gl(4, 6.0)))?;
        for n in 1..=3 {
            let (idem, herm) = lib(projector_residuals(&b, n))?;
            ensure!(idem < 1e-11 && herm < 1e-11, "{} n={n}: {idem:e} {herm:e}", r.label());
            worst = worst.max(idem).max(herm);
        }
        for n in 2..=3 {
            let res = lib(wedgelab::fock::flip_product_identity_check(&b, n))?;
            ensure!(res < 1e-11, "{} flip product n={n}: {res:e}", r.label());
            worst = worst.max(res);
        }
        seen += 8;
    }
    Ok(format!("{seen} residuals, max {worst:.1e}"))
}

fn particle_bound_criterion(reports: &[(String, wedgelab::ValidationReport)]) -> Outcome {
    for (name, rep) in reports {
        for side in rep.entries.iter().filter(|e| e.axiom.ends_with(".fock.particle_bound.create")) {
            let p = side.axiom.trim_end_matches("create");
            for (k, samples) in [("create", 100), ("annihilate", 100), ("vacuum_equality", 1)] {
                let e = rep.get(&format!("{p}{k}")).ok_or(format!("{name}: missing {p}{k}"))?;
                ensure!(e.pass, "{name} {}: {:e}", e.axiom, e.residual);
                ensure!(e.samples == samples, "{name} {}: {} samples", e.axiom, e.samples);
                ensure!(e.tolerance == 1e-12, "{name} {}: slack {:e}", e.axiom, e.tolerance);
            }
        }
    }
    Ok(format!("{} models, 100 vectors each, vacuum equality exact", reports.len()))
}

fn bump_transform(center: f64, halfwidth: f64) -> OneParticleVector<f64> {
    half_line_transform(&TestFunction::bump(center, halfwidth, 1.0).unwrap(), TransformSign::Plus).unwrap()
}

fn gaussian_state(leg: &LegSpace<f64>) -> FockVector<f64> {
    let samples: Vec<Complex64> = (0..leg.dim()).map(|i| Complex64::new((-leg.rapidity(i).powi(2)).exp(), 0.0)).collect();
    let t = LeggedTensor::vector(leg.clone(), samples).unwrap();
    let t = t.scale(Complex64::new(1.0 / t.norm(), 0.0));
    FockVector::from_level(leg.clone(), 1, t).unwrap()
}

fn commutator_at(r: &ScatteringFunction, g: usize, one: bool, gv: &OneParticleVector<f64>, mode: Certification) -> Result<f64, String> {
    let b = lib(BraidingData::from_function(r, Arc::new(lib(locality_grid(g))?)))?;
    let psi = if one { gaussian_state(b.leg()) } else { lib(FockVector::vacuum(b.leg().clone(), 1))? };
    let res = lib(half_line_commutator_with(&b, r, &bump_transform(0.18, 0.15), gv, &psi, mode))?;
    ensure!(res.closed_form < 1e-11, "closed form {:e}", res.closed_form);
    Ok(res.residual)
}

fn locality_criterion() -> Outcome {
    let start = Instant::now();
    let (g, g_left) = (bump_transform(0.27, 0.18), bump_transform(-0.27, 0.18));
    let mut lines = Vec::new();
    for (label, r) in [("free", constant_identity(space(1))), ("sinh", scalar_family(&[PI / 4.0], 1).unwrap())] {
        for (state, one) in [("vacuum", false), ("one particle", true)] {
            let coarse = commutator_at(&r, 32, one, &g, Certification::Required)?;
            let fine = commutator_at(&r, 64, one, &g, Certification::Required)?;
            ensure!(fine < 1e-5, "{label} {state}: {fine:e} at G=64");
            ensure!(coarse >= 3.0 * fine, "{label} {state}: {coarse:e} -> {fine:e}");
            let control = commutator_at(&r, 64, one, &g_left, Certification::Waived)?;
            ensure!(control > 1e-2, "{label} {state}: left control {control:e}");
            lines.push(format!("{label}/{state} {fine:.1e} ({:.0}x)", coarse / fine));
        }
    }
    // the certified path refuses the left-supported control outright
    let b = lib(BraidingData::from_function(&constant_identity(space(1)), Arc::new(lib(locality_grid(32))?)))?;
    let omega = lib(FockVector::vacuum(b.leg().clone(), 1))?;
    ensure!(
        half_line_commutator(&b, &constant_identity(space(1)), &bump_transform(0.18, 0.15), &g_left, &omega).is_err(),
        "uncertified control accepted"
    );
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(120), "took {took:?}");
    Ok(format!("{}; {:.1} s", lines.join(", "), took.as_secs_f64()))
}

fn projector_pair(r: &ScatteringFunction, s: &ScatteringFunction, g: usize, m: usize, n: usize) -> Result<f64, String> {
    let b = lib(BraidingData::from_function(r, gl(g, 4.0)))?;
    let (l, rr) = lib(twist_projector_commutation(&b, s, &b, m, n))?;
    Ok(l.max(rr))
}

fn dichotomy_criterion() -> Outcome {
    let tol = Tolerances::default();
    let sinh = scalar_family(&[PI / 4.0], 1).unwrap();
    let square = tensor_square(space(2), &[PI / 4.0], 1).unwrap();
    let mut worst = 0.0f64;
    for (m, n) in [(2, 1), (1, 2), (2, 2)] {
        let s = lib(build_flip_lr(&sinh, &gl(4, 4.0), &tol))?;
        worst = worst.max(projector_pair(&sinh, &s, 4, m, n)?);
        // rank four at d = 2 keeps the dense check small only on two nodes
        let g = if m + n == 4 { 2 } else { 3 };
        let s = lib(build_flip_lr(&square, &gl(g, 4.0), &tol))?;
        worst = worst.max(projector_pair(&square, &s, g, m, n)?);
    }
    ensure!(worst < 1e-11, "valid bundles: {worst:e}");
    let s = lib(build_flip_lr(&square, &gl(3, 4.0), &tol))?;
    let bad = lib(s.perturbed(0, 3, Complex64::new(1.1, 0.0)))?;
    let mut weakest = f64::INFINITY;
    for (m, n) in [(2, 1), (1, 2)] {
        let r = projector_pair(&square, &bad, 3, m, n)?;
        ensure!(r > 1e-3, "perturbed ({m},{n}): {r:e}");
        weakest = weakest.min(r);
    }
    Ok(format!("valid max {worst:.1e}, perturbed min {weakest:.1e}"))
}

fn twisted_locality_criterion() -> Outcome {
    let probe = LocalityProbe::<f64>::standard();
    let sinh = scalar_family(&[PI / 4.0], 1).unwrap();
    let entries = |g: usize| -> Result<Vec<wedgelab::ReportEntry>, String> {
        let grid = Arc::new(lib(locality_grid(g))?);
        let s = lib(build_flip_lr(&sinh, &grid, &Tolerances::default()))?;
        let (l, r) = lib(sides_on_grid(sinh.clone(), sinh.clone(), grid, 2))?;
        lib(twisted_locality_entries(&lib(TripleBundle::massless(l, r, Some(s)))?, &probe, "t"))
    };
    let (coarse, fine) = (entries(32)?, entries(64)?);
    let get = |v: &[wedgelab::ReportEntry], k: &str| v.iter().find(|e| e.axiom == k).map(|e| e.residual).unwrap_or(f64::NAN);
    let mut out = Vec::new();
    for side in ["left", "right"] {
        let key = format!("t.{side}.commutator");
        let (c0, c1) = (get(&coarse, &key), get(&fine, &key));
        ensure!(c1 < 1e-5, "{side}: {c1:e} at G=64");
        ensure!(c0 >= 3.0 * c1, "{side}: {c0:e} -> {c1:e}");
        for v in [&coarse, &fine] {
            let cf = get(v, &format!("t.{side}.closed_form"));
            ensure!(cf < 1e-11, "{side}: closed form {cf:e}");
        }
        out.push(format!("{side} {c1:.1e} ({:.0}x)", c0 / c1));
    }
    Ok(out.join(", "))
}

fn flip_construction_criterion() -> Outcome {
    let grid = RapidityGrid::standard();
    let tol = Tolerances::default();
    let mut models = ll_models();
    models.push(tensor_square(space(2), &[PI / 3.0], 1).unwrap());
    let mut count = 0;
    for r in &models {
        if !lib(ll_suite(r, &grid, &tol))?.iter().all(|e| e.pass) {
            continue;
        }
        let s = lib(build_flip_lr(r, &grid, &tol))?;
        for e in lib(lr_suite(r, &s, r, &grid, &tol))? {
            ensure!(e.pass, "{}: {} {:e}", r.label(), e.axiom, e.residual);
        }
        count += 1;
    }
    ensure!(count == models.len(), "only {count} of {} models passed the LL suite", models.len());
    Ok(format!("{count} LL models, every flip candidate passes"))
}

fn block_criterion() -> Outcome {
    let golden: Vec<String> =
        include_str!("../../wedgelab/tests/golden/block_mask_2x2.txt").lines().map(str::to_owned).collect();
    ensure!(block_mask(2, 2) == golden, "layout mask differs from the golden file");
    let sp = space(2);
    let dense = |seed: f64| CMatrix::from_fn(4, 4, |r, c| Complex64::new(1.0 + seed + r as f64, 0.5 + c as f64 * seed));
    let rp = lib(constant(dense(0.3), sp.clone(), Convention::R))?;
    let rm = lib(constant(dense(0.7), sp.clone(), Convention::R))?;
    let s = lib(lr_constant(dense(1.1), sp.clone(), sp.clone()))?;
    let m = lib(assemble_block_diagonal(&rp, &s, &rm, 0.37))?;
    let mask: Vec<String> =
        (0..16).map(|r| (0..16).map(|c| if m[(r, c)].norm() != 0.0 { 'x' } else { '.' }).collect()).collect();
    ensure!(mask == golden, "assembled mask differs from the golden file");
    let grid = RapidityGrid::<f64>::standard();
    let r = tensor_square(sp.clone(), &[PI / 3.0], 1).unwrap();
    let s = lib(build_flip_lr(&r, &grid, &Tolerances::default()))?;
    let mut worst = 0.0f64;
    for &q in grid.nodes() {
        let m = lib(assemble_block_diagonal(&r, &s, &r, q))?;
        worst = worst.max(m.matmul(&m.adjoint()).sub(&CMatrix::identity(16)).spectral_norm());
    }
    ensure!(worst < 1e-12, "unitarity {worst:e}");
    Ok(format!("mask exact, unitarity max {worst:.1e} over {} nodes", grid.len()))
}

fn intertwiner_criterion() -> Outcome {
    let f = |p: f64| Complex64::new((-p).exp(), 0.0);
    let thetas = [-2.0, -0.7, 0.0, 1.1, 2.5];
    let mut worst_iso = 0.0f64;
    let mut worst_int = 0.0f64;
    for m in [1.0, 3.0] {
        let iso = lib(verify_isometry(f, m))?;
        let err = (iso.rapidity_norm_sqr - 0.25).abs();
        ensure!(err < 1e-10 && (iso.momentum_norm_sqr - 0.25).abs() < 1e-10, "m={m}: {iso:?}");
        worst_iso = worst_iso.max(err);
        for t in [0.5, -1.2] {
            let r = lib(intertwining_residual(f, m, t, &thetas))?;
            ensure!(r < 1e-12, "m={m} t={t}: {r:e}");
            worst_int = worst_int.max(r);
        }
    }
    Ok(format!("isometry {worst_iso:.1e}, intertwining {worst_int:.1e}"))
}

fn determinism_criterion() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let model = models_dir().join("sinh_flip.model");
    let mut reports = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("run{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_wedgelab"))
            .args(["validate", model.to_str().unwrap(), "--seed", "7", "--report", path.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure!(status.code() == Some(0), "run {k} exited with {status}");
        reports.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure!(reports[0] == reports[1], "reports differ");
    Ok(format!("two runs, {} identical bytes", reports[0].len()))
}

#[test]
fn acceptance() {
    let fock = fock_reports();
    let from_fock = |f: fn(&[(String, wedgelab::ValidationReport)]) -> Outcome| match &fock {
        Ok(r) => f(r),
        Err(e) => Err(e.clone()),
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("LL axiom suite", ll_suite_criterion()),
        ("symmetric-group representation", representation_criterion()),
        ("projector and flip-product identities", from_fock(projector_criterion)),
        ("particle-number bounds", from_fock(particle_bound_criterion)),
        ("field locality", locality_criterion()),
        ("twist/projector dichotomy", dichotomy_criterion()),
        ("twisted locality", twisted_locality_criterion()),
        ("flip construction", flip_construction_criterion()),
        ("block-diagonal assembly", block_criterion()),
        ("massive intertwiner", intertwiner_criterion()),
        ("determinism", determinism_criterion()),
    ];
    // written past the test harness capture so the summary shows up in plain `cargo test` output
    let mut out = std::io::stdout().lock();
    for (k, (name, r)) in results.iter().enumerate() {
        let (tag, detail) = match r {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        writeln!(out, "criterion {:>2} {tag}  {name}: {detail}", k + 1).unwrap();
    }
    let failed: Vec<_> = results.iter().filter(|(_, r)| r.is_err()).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
