//! Runs the selected suites of a model document and collects one report.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wedgelab::fock::{
    check_particle_bounds, flip_product_identity_check, projector_residuals, representation_residual, BraidingData,
    FockVector,
};
use wedgelab::locality::{
    assemble_massive, assemble_massless, half_line_commutator, lift_uniform, locality_grid, twist_projector_commutation,
    ChiralSide, LocalityProbe, TripleBundle,
};
use wedgelab::scattering::{ll_suite, lr_suite, Tolerances};
use wedgelab::standard_pair::{half_line_transform, OneParticleVector, TransformSign, VectorDomain};
use wedgelab::tensor::{LegSpace, LeggedTensor};
use wedgelab::{Grid, ReportEntry, ScatteringFunction, ValidationReport};

use crate::build::{build_lr, build_sides, gauss_legendre, BuiltSide};
use crate::error::CliError;
use crate::model::{ModelDocument, Suite};

/// Command-line overrides of document settings.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub suites: Option<Vec<Suite>>,
    pub nmax: Option<usize>,
    pub grid: Option<usize>,
    pub qmax: Option<f64>,
    pub tol_algebraic: Option<f64>,
    pub tol_quadrature: Option<f64>,
    pub seed: Option<u64>,
    pub strict: bool,
}

/// Report plus everything that did not fit into an entry.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: ValidationReport,
    /// Checks stopped by a capacity limit.
    pub capacity: Vec<String>,
    /// Checks stopped by any other error.
    pub errors: Vec<String>,
    /// Requested suites that do not apply to the model, with the reason.
    pub skipped: Vec<String>,
    pub strict: bool,
}

impl RunOutcome {
    /// 0 all pass, 1 validation failure, 3 capacity error.
    pub fn exit_code(&self) -> i32 {
        if !self.capacity.is_empty() {
            3
        } else if !self.report.all_pass() || (self.strict && !self.skipped.is_empty()) {
            1
        } else {
            0
        }
    }
}

struct Runner {
    report: ValidationReport,
    capacity: Vec<String>,
    errors: Vec<String>,
}

impl Runner {
    // Runs one check; errors become a failing entry so the suite carries on.
    fn check(&mut self, name: &str, f: impl FnOnce() -> wedgelab::Result<Vec<ReportEntry>>) {
        match f() {
            Ok(es) => self.report.extend(es),
            Err(e) => {
                let (suffix, list) = match e {
                    wedgelab::Error::Capacity(_) => ("capacity", &mut self.capacity),
                    _ => ("error", &mut self.errors),
                };
                list.push(format!("{name}: {e}"));
                self.report.push(ReportEntry::new(format!("{name}.{suffix}"), f64::INFINITY, 0, 0.0));
            }
        }
    }
}

fn prefixed(es: Vec<ReportEntry>, prefix: &str, grid: usize) -> Vec<ReportEntry> {
    es.into_iter()
        .map(|e| {
            let e = e.prefixed(prefix);
            if e.grid.is_none() {
                e.with_grid(grid)
            } else {
                e
            }
        })
        .collect()
}

fn tolerances(doc: &ModelDocument, opts: &RunOptions) -> Tolerances {
    Tolerances {
        algebraic: opts.tol_algebraic.unwrap_or(doc.tolerances.algebraic),
        quadrature: opts.tol_quadrature.unwrap_or(doc.tolerances.quadrature),
        interior_bound: doc.tolerances.interior_bound,
    }
}

fn check_overrides(opts: &RunOptions) -> Result<(), CliError> {
    let range = |field: &str, reason: String| Err(CliError::Range { field: field.into(), reason });
    if opts.grid == Some(0) {
        return range("--grid", "must be positive".into());
    }
    if let Some(q) = opts.qmax {
        if !(q > 0.0 && q.is_finite()) {
            return range("--qmax", format!("{q} is not positive"));
        }
    }
    for (name, t) in [("--tol-algebraic", opts.tol_algebraic), ("--tol-quadrature", opts.tol_quadrature)] {
        if let Some(t) = t {
            if !(t >= 0.0 && t.is_finite()) {
                return range(name, format!("{t} is not a finite non-negative number"));
            }
        }
    }
    Ok(())
}

/// Suites to run after expanding `all`, and the reasons some requested ones were skipped.
fn plan(doc: &ModelDocument, requested: &[Suite]) -> (Vec<Suite>, Vec<String>) {
    let expand_all = requested.contains(&Suite::All);
    let wanted: BTreeSet<Suite> =
        if expand_all { Suite::CONCRETE.into_iter().collect() } else { requested.iter().copied().collect() };
    let two = doc.side.len() == 2;
    let massive = two && doc.side.iter().all(|s| s.masses.is_some());
    let mut run = Vec::new();
    let mut skipped = Vec::new();
    for s in wanted {
        let reason = match s {
            Suite::Lr if doc.lr.is_none() => Some("no [lr] section"),
            Suite::Massive if !massive => Some("needs two sides with masses"),
            _ => None,
        };
        match reason {
            // `all` quietly drops suites the model has no data for
            Some(_) if expand_all => {}
            Some(r) => skipped.push(format!("{}: {r}", s.name())),
            None => run.push(s),
        }
    }
    (run, skipped)
}

fn gaussian(d: usize) -> OneParticleVector<f64> {
    let space = wedgelab::tensor::InternalIndexSpace::new(d).expect("d >= 1");
    OneParticleVector::from_fn(space, VectorDomain::Entire, "gauss", |a, z: Complex64| {
        let z = z - 0.25 * a as f64;
        Ok((-z * z / 2.0).exp())
    })
}

// normalized a*(h)Ω with h = e^{−q²} on every index
fn one_particle(leg: &LegSpace<f64>) -> wedgelab::Result<FockVector<f64>> {
    let samples: Vec<Complex64> = (0..leg.dim()).map(|i| Complex64::new((-leg.rapidity(i).powi(2)).exp(), 0.0)).collect();
    let t = LeggedTensor::vector(leg.clone(), samples)?;
    let n = t.norm();
    FockVector::from_level(leg.clone(), 1, t.scale(Complex64::new(1.0 / n, 0.0)))
}

/// Runs the document's suites (or the overriding selection) and returns the collected report.
pub fn run_suite(doc: &ModelDocument, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    check_overrides(opts)?;
    let tol = tolerances(doc, opts);
    let nodes = opts.grid.unwrap_or(doc.grid.nodes);
    let qmax = opts.qmax.unwrap_or(doc.grid.qmax);
    let main = gauss_legendre(nodes, qmax)?;
    let sides = build_sides(doc, &main)?;
    let seed = opts.seed.or(doc.seed);
    let nmax = opts.nmax.unwrap_or(doc.fock.nmax);
    let requested = opts.suites.clone().unwrap_or_else(|| doc.suites.clone());
    let (suites, skipped) = plan(doc, &requested);

    let mut report = ValidationReport::new(doc.name.clone(), format!("G={nodes} qmax={qmax}"));
    report.seed = seed;
    let mut run = Runner { report, capacity: Vec::new(), errors: Vec::new() };

    let mut s_lr: Option<ScatteringFunction> = None;
    if let (Some(lr), [left, right]) = (&doc.lr, sides.as_slice()) {
        match build_lr(lr, left, right, &main, &tol) {
            Ok(s) => s_lr = Some(s),
            Err(e) => run.check("lr.build", || Err(e)),
        }
    }

    for suite in suites {
        match suite {
            Suite::Ll => {
                for side in &sides {
                    let g = side.grid.len();
                    run.check(&format!("{}.ll", side.name), || {
                        Ok(prefixed(ll_suite(&side.r, &side.grid, &tol)?, &format!("{}.ll", side.name), g))
                    });
                }
            }
            Suite::Lr => {
                if let (Some(s), [left, right]) = (&s_lr, sides.as_slice()) {
                    run.check("lr", || Ok(prefixed(lr_suite(&left.r, s, &right.r, &main, &tol)?, "lr", nodes)));
                }
            }
            Suite::Fock => {
                let grid = gauss_legendre(doc.fock.nodes, qmax)?;
                for (i, side) in sides.iter().enumerate() {
                    let side_seed = seed.unwrap_or(0).wrapping_add(i as u64);
                    fock_checks(&mut run, side, &grid, nmax, doc.fock.trials, &tol, doc.tolerances.slack, side_seed);
                }
            }
            Suite::Locality => locality_checks(&mut run, doc, &sides, s_lr.as_ref(), &tol, qmax),
            Suite::Massive => {
                if let [left, right] = sides.as_slice() {
                    run.check("massive", || {
                        let bundle = TripleBundle::massive(
                            chiral(left, main.clone(), 2)?,
                            chiral(right, main.clone(), 2)?,
                            s_lr.clone(),
                        )?;
                        Ok(prefixed(assemble_massive(&bundle, tol.algebraic)?.entries, "", nodes))
                    });
                }
            }
            Suite::All => unreachable!("expanded by plan"),
        }
    }
    Ok(RunOutcome { report: run.report, capacity: run.capacity, errors: run.errors, skipped, strict: opts.strict })
}

fn chiral(side: &BuiltSide, grid: Arc<Grid>, nmax: usize) -> wedgelab::Result<ChiralSide<f64>> {
    let c = ChiralSide::new(side.r.clone(), grid, nmax)?;
    match &side.masses {
        Some(m) => c.with_masses(m.clone()),
        None => Ok(c),
    }
}

#[allow(clippy::too_many_arguments)]
fn fock_checks(
    run: &mut Runner,
    side: &BuiltSide,
    grid: &Arc<Grid>,
    nmax: usize,
    trials: usize,
    tol: &Tolerances,
    slack: f64,
    seed: u64,
) {
    let p = format!("{}.fock", side.name);
    let g = grid.len();
    let b = match BraidingData::from_function(&side.r, grid.clone()) {
        Ok(b) => b,
        Err(e) => return run.check(&p, || Err(e)),
    };
    run.check(&format!("{p}.representation"), || {
        let (res, count) = representation_residual(&b, 3)?;
        Ok(vec![ReportEntry::new(format!("{p}.representation.n3"), res, count, tol.algebraic).with_grid(g)])
    });
    for n in 1..=nmax.min(3) {
        run.check(&format!("{p}.projector.n{n}"), || {
            let (idem, herm) = projector_residuals(&b, n)?;
            Ok(vec![
                ReportEntry::new(format!("{p}.projector.idempotent.n{n}"), idem, 1, tol.algebraic).with_grid(g),
                ReportEntry::new(format!("{p}.projector.self_adjoint.n{n}"), herm, 1, tol.algebraic).with_grid(g),
            ])
        });
    }
    for n in 2..=nmax.min(3) {
        run.check(&format!("{p}.flip_product.n{n}"), || {
            let res = flip_product_identity_check(&b, n)?;
            Ok(vec![ReportEntry::new(format!("{p}.flip_product.n{n}"), res, 1, tol.algebraic).with_grid(g)])
        });
    }
    run.check(&format!("{p}.particle_bound"), || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let es = check_particle_bounds(&b, &gaussian(side.r.d()), trials, nmax, slack, &mut rng)?;
        Ok(prefixed(es, &p, g))
    });
}

fn locality_checks(
    run: &mut Runner,
    doc: &ModelDocument,
    sides: &[BuiltSide],
    s_lr: Option<&ScatteringFunction>,
    tol: &Tolerances,
    qmax: f64,
) {
    let g = doc.locality.nodes;
    let grid = match locality_grid::<f64>(g) {
        Ok(gr) => Arc::new(gr),
        Err(e) => return run.check("locality", || Err(e)),
    };
    let mut probe = LocalityProbe::<f64>::standard();
    probe.tol = doc.tolerances.commutator;
    probe.algebraic = tol.algebraic;
    for side in sides {
        let p = format!("{}.locality", side.name);
        run.check(&p, || {
            let b = BraidingData::from_function(&side.r, grid.clone())?;
            let leg = b.leg().clone();
            let f = lift_uniform(&half_line_transform(&probe.f, TransformSign::Plus)?, &leg)?;
            let gv = lift_uniform(&half_line_transform(&probe.g, TransformSign::Plus)?, &leg)?;
            let vacuum = FockVector::vacuum(leg.clone(), 0)?;
            let mut out = half_line_commutator(&b, &side.r, &f, &gv, &vacuum)?.entries(&format!("{p}.vacuum"), probe.tol, probe.algebraic);
            let one = one_particle(&leg)?;
            out.extend(half_line_commutator(&b, &side.r, &f, &gv, &one)?.entries(&format!("{p}.one_particle"), probe.tol, probe.algebraic));
            Ok(out)
        });
    }
    let ([left, right], Some(s)) = (sides, s_lr) else { return };
    let twist_grid = match gauss_legendre(doc.locality.twist_nodes, qmax) {
        Ok(gr) => gr,
        Err(e) => {
            run.errors.push(e.to_string());
            return;
        }
    };
    let tg = twist_grid.len();
    for (m, n) in [(2, 1), (1, 2), (2, 2)] {
        let name = format!("twist.projector.m{m}n{n}");
        run.check(&name, || {
            let bp = BraidingData::from_function(&left.r, twist_grid.clone())?;
            let bm = BraidingData::from_function(&right.r, twist_grid.clone())?;
            let (l, r) = twist_projector_commutation(&bp, s, &bm, m, n)?;
            Ok(vec![
                ReportEntry::new(format!("{name}.left"), l, 1, tol.algebraic).with_grid(tg),
                ReportEntry::new(format!("{name}.right"), r, 1, tol.algebraic).with_grid(tg),
            ])
        });
    }
    if left.masses.is_none() && right.masses.is_none() {
        run.check("bundle", || {
            let bundle = TripleBundle::massless(chiral(left, grid.clone(), 2)?, chiral(right, grid.clone(), 2)?, Some(s.clone()))?;
            Ok(prefixed(assemble_massless(&bundle, &probe)?.entries, "bundle", g))
        });
    }
}
