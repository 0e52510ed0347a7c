//! Circle-bundle data of the characteristic foliation: invariance, period,
//! curvature, Euler number and nondegeneracy of `d eta` on `Delta`.

use crate::frame::{combinations, FrameAction, FrameModel, PForm};
use crate::gac::{GacData, PwSign};
use crate::involutivity::{delta_basis, delta_profile, Thresholds};
use crate::linalg::numeric_rank;
use crate::sample::{SampleSet, PIVOT_TOL};
use crate::scalar::{Scalar, Var};
use num_complex::Complex64;
use thiserror::Error;

/// Distance from an integer below which the Euler integral counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuotientError {
    #[error("`{0}` is neither a frame element nor a coordinate of the model")]
    UnknownFiber(String),
    #[error("R is not invariant: i_R d eta = {interior}, L_R eta = {lie}")]
    NotInvariant { interior: String, lie: String },
    #[error("R has a component along `{0}`, so it is not vertical for the chosen fiber")]
    NotVertical(String),
    #[error("fiber coordinate `{0}` is not periodic; the orbits are lines and carry no period")]
    FiberNotPeriodic(String),
    #[error("the fiber direction has no coordinate, so nothing can be integrated")]
    NoFiberCoordinate,
    #[error("eta(d/d{fiber}) vanishes at sample {point}")]
    VanishingPeriodDensity { fiber: String, point: usize },
    #[error("component {component} of d eta depends on the fiber coordinate: {value}")]
    FiberDependence { component: String, value: String },
    #[error("component {component} of d eta points along the fiber: {value}")]
    FiberComponent { component: String, value: String },
    #[error("Euler integration needs a base of two periodic coordinates, found {0}")]
    BaseShape(String),
    #[error("the period {0} is not constant")]
    NonConstantPeriod(String),
    #[error("the period is zero")]
    ZeroPeriod,
}

/// The fiber direction: a frame element, and its coordinate when it has one.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    pub frame: usize,
    pub coordinate: Option<Var>,
}

impl Fiber {
    /// Resolves a frame name (`X3`, `d/dz`) or a coordinate name (`z`).
    pub fn resolve(model: &FrameModel, name: &str) -> Result<Fiber, QuotientError> {
        let frame = model
            .frame_names()
            .iter()
            .position(|f| f == name)
            .or_else(|| model.frame_of_coordinate(name))
            .ok_or_else(|| QuotientError::UnknownFiber(name.to_string()))?;
        let coordinate = match model.actions()[frame] {
            FrameAction::Partial(c) => Some(model.coordinates()[c].name.clone()),
            FrameAction::Lie => None,
        };
        Ok(Fiber { frame, coordinate })
    }
}

/// `i_R d eta` and `L_R eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Invariance {
    pub interior: PForm,
    pub lie: PForm,
}

impl Invariance {
    pub fn holds(&self) -> bool {
        self.interior.is_zero() && self.lie.is_zero()
    }
}

pub fn invariance_check(g: &GacData) -> Invariance {
    let m = g.model();
    let d = g.derived_pair();
    let deta = m.exterior_derivative(&d.eta).expect("eta is a 1-form");
    Invariance {
        interior: m
            .interior_product(&d.reeb, &deta)
            .expect("d eta is a 2-form"),
        lie: m.lie_derivative(&d.reeb, &d.eta).expect("eta is a 1-form"),
    }
}

/// `gamma = int_0^1 f dtau` with a flag for coordinate independence.
#[derive(Debug, Clone, PartialEq)]
pub struct Period {
    pub density: Scalar,
    pub gamma: Scalar,
    pub constant: bool,
}

/// Integrates a period density over one turn of the fiber coordinate.
pub fn period_integral(density: &Scalar, fiber: &str) -> Period {
    let gamma = density.integrate_unit_period(fiber);
    let constant = gamma.variables().is_empty();
    Period {
        density: density.clone(),
        gamma,
        constant,
    }
}

pub fn minimal_period(g: &GacData, fiber: &Fiber) -> Result<Period, QuotientError> {
    let m = g.model();
    require_invariance(g)?;
    let coord = fiber
        .coordinate
        .as_ref()
        .ok_or(QuotientError::NoFiberCoordinate)?;
    let periodic = m
        .coordinates()
        .iter()
        .any(|c| c.name == *coord && c.periodic);
    if !periodic {
        return Err(QuotientError::FiberNotPeriodic(coord.to_string()));
    }
    let d = g.derived_pair();
    if let Some(a) = (0..m.dim()).find(|&a| a != fiber.frame && !d.reeb.0[a].is_zero()) {
        return Err(QuotientError::NotVertical(m.frame_names()[a].clone()));
    }
    let density = d.eta.components()[fiber.frame].clone();
    let samples = g.samples();
    if let Some(point) = (0..samples.len()).find(|&k| samples.eval(&density, k).norm() <= PIVOT_TOL)
    {
        return Err(QuotientError::VanishingPeriodDensity {
            fiber: coord.to_string(),
            point,
        });
    }
    Ok(period_integral(&density, coord))
}

/// Base part of `d eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    pub omega: PForm,
    pub closed: bool,
}

pub fn curvature(g: &GacData, fiber: &Fiber) -> Result<Curvature, QuotientError> {
    let m = g.model();
    require_invariance(g)?;
    let deta = m
        .exterior_derivative(&g.derived_pair().eta)
        .expect("eta is a 1-form");
    let names = m.coframe_names();
    for (idx, value) in combinations(m.dim(), 2).iter().zip(deta.components()) {
        if value.is_zero() {
            continue;
        }
        let component = format!("{}^{}", names[idx[0]], names[idx[1]]);
        if idx.contains(&fiber.frame) {
            return Err(QuotientError::FiberComponent {
                component,
                value: value.to_string(),
            });
        }
        if let Some(c) = &fiber.coordinate {
            if value.depends_on(c) {
                return Err(QuotientError::FiberDependence {
                    component,
                    value: value.to_string(),
                });
            }
        }
    }
    let closed = m.is_closed(&deta);
    Ok(Curvature {
        omega: deta,
        closed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EulerNumber {
    pub value: f64,
    pub integral: bool,
}

/// `int_{[0,1]^2} omega / gamma` over the two periodic base coordinates.
pub fn euler_integral(
    model: &FrameModel,
    omega: &PForm,
    gamma: &Scalar,
    fiber: &Fiber,
) -> Result<EulerNumber, QuotientError> {
    let gamma = gamma
        .as_constant()
        .ok_or_else(|| QuotientError::NonConstantPeriod(gamma.to_string()))?;
    if gamma.norm() <= PIVOT_TOL {
        return Err(QuotientError::ZeroPeriod);
    }
    let base: Vec<usize> = (0..model.dim()).filter(|&a| a != fiber.frame).collect();
    let coords: Vec<&crate::frame::Coordinate> = base
        .iter()
        .filter_map(|&a| match model.actions()[a] {
            FrameAction::Partial(c) => Some(&model.coordinates()[c]),
            FrameAction::Lie => None,
        })
        .collect();
    let shape = || {
        base.iter()
            .map(|&a| model.frame_names()[a].clone())
            .collect::<Vec<_>>()
            .join(", ")
    };
    if base.len() != 2 || coords.len() != 2 || !coords.iter().all(|c| c.periodic) {
        return Err(QuotientError::BaseShape(shape()));
    }
    let density = omega.eval_indices(&base);
    let value = density
        .integrate_unit_period(&coords[0].name)
        .integrate_unit_period(&coords[1].name);
    let value = value
        .as_constant()
        .ok_or_else(|| QuotientError::BaseShape(shape()))?
        / gamma;
    let value = value.re;
    Ok(EulerNumber {
        value,
        integral: (value - value.round()).abs() <= INTEGRALITY_TOL,
    })
}

/// Pointwise rank test of `d eta` restricted to `Delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nondegeneracy {
    pub side: PwSign,
    pub delta_dims: Vec<usize>,
    pub per_point: Vec<bool>,
    pub nondegenerate: bool,
    /// `Delta` is zero everywhere; the curvature is then a `(1,1)` form instead.
    pub vacuous: bool,
}

pub fn nondegeneracy_on_delta(g: &GacData, side: PwSign, thr: &Thresholds) -> Nondegeneracy {
    let m = g.model();
    let samples = g.samples();
    let deta = m
        .exterior_derivative(&g.derived_pair().eta)
        .expect("eta is a 1-form");
    let profile = delta_profile(g, side, thr);
    let per_point: Vec<bool> = (0..samples.len())
        .map(|k| {
            let basis = delta_basis(&profile.k_frame, samples, k);
            if basis.is_empty() {
                return true;
            }
            let gram = form_gram(&deta, &basis, samples, k);
            numeric_rank(&gram) == basis.len()
        })
        .collect();
    let vacuous = profile.delta_dims.iter().all(|&d| d == 0);
    Nondegeneracy {
        side,
        nondegenerate: per_point.iter().all(|&b| b),
        delta_dims: profile.delta_dims,
        per_point,
        vacuous,
    }
}

/// Columns `j` of the matrix `a(v_i, v_j)` at sample `k`.
fn form_gram(
    a: &PForm,
    vectors: &[Vec<Complex64>],
    samples: &SampleSet,
    k: usize,
) -> Vec<Vec<Complex64>> {
    let n = a.dim();
    let comps: Vec<(Vec<usize>, Complex64)> = combinations(n, 2)
        .into_iter()
        .zip(a.components())
        .filter(|(_, c)| !c.is_zero())
        .map(|(idx, c)| (idx, samples.eval(c, k)))
        .collect();
    let value = |u: &[Complex64], v: &[Complex64]| -> Complex64 {
        comps
            .iter()
            .map(|(idx, c)| c * (u[idx[0]] * v[idx[1]] - u[idx[1]] * v[idx[0]]))
            .sum()
    };
    vectors
        .iter()
        .map(|v| vectors.iter().map(|u| value(u, v)).collect())
        .collect()
}

/// `omega(k_i, k_j)` over all pairs of the `K` frame on one side.
pub fn omega_on_k_pairs(g: &GacData, omega: &PForm, side: PwSign, thr: &Thresholds) -> Vec<Scalar> {
    let kf = delta_profile(g, side, thr).k_frame;
    let mut out = Vec::new();
    for (i, u) in kf.iter().enumerate() {
        for v in &kf[i + 1..] {
            out.push(omega.pair2(u, v));
        }
    }
    out
}

fn require_invariance(g: &GacData) -> Result<(), QuotientError> {
    let inv = invariance_check(g);
    if inv.holds() {
        Ok(())
    } else {
        let m = g.model();
        Err(QuotientError::NotInvariant {
            interior: m.render_form(&inv.interior),
            lie: m.render_form(&inv.lie),
        })
    }
}

/// Everything the quotient checks compute; absent parts carry the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientReport {
    pub invariance: Invariance,
    pub period: Result<Period, QuotientError>,
    pub curvature: Result<Curvature, QuotientError>,
    pub euler: Result<EulerNumber, QuotientError>,
    pub nondegeneracy: Nondegeneracy,
}

pub fn quotient_report(
    g: &GacData,
    fiber: &Fiber,
    side: PwSign,
    thr: &Thresholds,
) -> QuotientReport {
    let period = minimal_period(g, fiber);
    let curvature = curvature(g, fiber);
    let euler = match (&period, &curvature) {
        (Ok(p), Ok(c)) => euler_integral(g.model(), &c.omega, &p.gamma, fiber),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    QuotientReport {
        invariance: invariance_check(g),
        period,
        curvature,
        euler,
        nondegeneracy: nondegeneracy_on_delta(g, side, thr),
    }
}
