//! Turns a validated document into scattering functions and grids.

use std::sync::Arc;

use num_complex::Complex64;
use wedgelab::scattering::{
    build_flip_lr, constant_identity, lr_identity, lr_scalar, scalar_family, scalar_function, sinh_product,
    tensor_square, MassAssignment, Tolerances,
};
use wedgelab::tensor::{InternalIndexSpace, RapidityGrid};
use wedgelab::{Grid, ScatteringFunction};

use crate::error::CliError;
use crate::model::{side_dim, LrSection, ModelDocument, SideSection};

/// A chiral side ready for the suites.
#[derive(Clone, Debug)]
pub struct BuiltSide {
    pub name: String,
    pub r: ScatteringFunction,
    pub masses: Option<MassAssignment>,
    /// Grid of the axiom suite for this side (the main grid unless overridden).
    pub grid: Arc<Grid>,
}

pub fn gauss_legendre(nodes: usize, qmax: f64) -> Result<Arc<Grid>, CliError> {
    RapidityGrid::gauss_legendre(nodes, qmax).map(Arc::new).map_err(CliError::Build)
}

fn space(s: &SideSection) -> Result<InternalIndexSpace, CliError> {
    let d = side_dim(s);
    match &s.bar {
        Some(bar) => InternalIndexSpace::with_bar(bar.clone()),
        None => InternalIndexSpace::new(d),
    }
    .map_err(CliError::Build)
}

pub fn build_side(s: &SideSection, main: &Arc<Grid>) -> Result<BuiltSide, CliError> {
    let sp = space(s)?;
    let sign = s.sign.unwrap_or(1);
    let r = match s.builder.as_str() {
        "constant_identity" => constant_identity(sp.clone()),
        "minus_one" => scalar_function("minus one", |_| Complex64::new(-1.0, 0.0)),
        "sinh" => scalar_family(s.blocks.as_deref().unwrap_or_default(), sign).map_err(CliError::Build)?,
        "tensor_square" => {
            tensor_square(sp.clone(), s.blocks.as_deref().unwrap_or_default(), sign).map_err(CliError::Build)?
        }
        other => unreachable!("builder `{other}` passed validation"),
    };
    let masses = match &s.masses {
        Some(m) => Some(MassAssignment::new(m.clone(), &sp).map_err(CliError::Build)?),
        None => None,
    };
    let grid = match &s.grid {
        Some(g) => gauss_legendre(g.nodes.unwrap_or(main.len()), g.qmax.unwrap_or(main.qmax()))?,
        None => main.clone(),
    };
    Ok(BuiltSide { name: s.name.clone(), r, masses, grid })
}

/// The left-right function; the flip construction is checked on `grid` and may fail there.
pub fn build_lr(
    lr: &LrSection,
    left: &BuiltSide,
    right: &BuiltSide,
    grid: &Grid,
    tol: &Tolerances,
) -> wedgelab::Result<ScatteringFunction> {
    match lr.builder.as_str() {
        "identity" => Ok(lr_identity(left.r.space().clone(), right.r.space().clone())),
        "flip" => build_flip_lr(&left.r, grid, tol),
        "sinh" => {
            let f = sinh_product::<f64>(lr.blocks.as_deref().unwrap_or_default(), lr.sign.unwrap_or(1))?;
            let phase = Complex64::from_polar(1.0, lr.phase.unwrap_or(0.0));
            Ok(lr_scalar("lr sinh", Arc::new(move |z| f(z) * phase)))
        }
        other => unreachable!("builder `{other}` passed validation"),
    }
}

pub fn build_sides(doc: &ModelDocument, main: &Arc<Grid>) -> Result<Vec<BuiltSide>, CliError> {
    doc.side.iter().map(|s| build_side(s, main)).collect()
}
