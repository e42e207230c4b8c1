//! Hodge Laplacian of invariant 3-forms and the Laplacian flow `∂φ/∂t = Δφ`.

use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::catalog::catalog;
use crate::curvature::scalar_curvature;
use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::g2::{torsion_forms, G2Structure};
use crate::liealg::LieAlgebra;

/// Largest number of integration steps accepted.
pub const MAX_STEPS: usize = 10_000_000;

/// `‖dφ₀‖` above this rejects the initial form.
pub const INITIAL_CLOSEDNESS_TOL: f64 = 1e-10;

/// Absolute floor for the closedness monitor.
pub const CLOSEDNESS_FLOOR: f64 = 1e-9;

/// Names of the diagnostic columns, in CSV order.
pub const DIAGNOSTIC_COLUMNS: [&str; 5] = [
    "closedness",
    "tau2_norm",
    "scal",
    "volume_density",
    "laplacian_norm",
];

/// `Δφ = dδφ + δdφ`.
pub fn hodge_laplacian(g2: &G2Structure) -> Result<KForm> {
    let alg = g2.algebra();
    let star = g2.star();
    let phi = g2.phi();
    let d_delta = alg.ce_diff(&alg.codifferential_with(star, phi)?)?;
    let delta_d = alg.codifferential_with(star, &alg.ce_diff(phi)?)?;
    d_delta.add_scaled(1.0, &delta_d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `‖dφ‖` (coefficient norm).
    pub closedness: f64,
    /// `|τ2|` in the metric of `φ`.
    pub tau2_norm: f64,
    pub scal: f64,
    /// `sqrt(det g)`.
    pub volume_density: f64,
    /// `|Δφ|` in the metric of `φ`.
    pub laplacian_norm: f64,
}

impl Diagnostics {
    pub fn of(g2: &G2Structure) -> Result<Self> {
        let lap = hodge_laplacian(g2)?;
        Ok(Diagnostics {
            closedness: g2.dphi()?.coeff_norm(),
            tau2_norm: torsion_forms(g2)?.norms[2],
            scal: scalar_curvature(g2.algebra(), g2.metric())?,
            volume_density: g2.volume_density(),
            laplacian_norm: g2.star().norm(&lap)?,
        })
    }

    pub fn values(&self) -> [f64; 5] {
        [
            self.closedness,
            self.tau2_norm,
            self.scal,
            self.volume_density,
            self.laplacian_norm,
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowState {
    pub t: f64,
    pub phi: KForm,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedEnd,
    PositivityLost,
    ClosednessViolated,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ReachedEnd => "reached t_end",
            Termination::PositivityLost => "positivity lost",
            Termination::ClosednessViolated => "closedness violated",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowTrajectory {
    pub states: Vec<FlowState>,
    pub termination: Termination,
    pub steps: usize,
}

impl FlowTrajectory {
    pub fn last(&self) -> &FlowState {
        self.states.last().expect("trajectory has an initial state")
    }

    /// Whether the volume density never drops by more than `tol` between samples.
    pub fn volume_non_decreasing(&self, tol: f64) -> bool {
        self.states.windows(2).all(|w| {
            let (a, b) = (
                w[0].diagnostics.volume_density,
                w[1].diagnostics.volume_density,
            );
            b >= a - tol * a.abs().max(1.0)
        })
    }

    /// Writes `t`, the 35 coefficients of `φ` and the diagnostics, one row per state.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend(KForm::basis_indices(7, 3).map(|m| m.to_string()));
        header.extend(DIAGNOSTIC_COLUMNS.iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        for s in &self.states {
            let mut row = vec![format_num(s.t)];
            row.extend(s.phi.coeffs().iter().map(|c| format_num(*c)));
            row.extend(s.diagnostics.values().iter().map(|c| format_num(*c)));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

fn format_num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    /// Record a state every this many steps (the final state is always kept).
    pub sample_every: usize,
    /// Closedness threshold; defaults to `max(10 ‖dφ₀‖, CLOSEDNESS_FLOOR)`.
    pub closedness_tol: Option<f64>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            sample_every: 1,
            closedness_tol: None,
        }
    }
}

fn rhs(alg: &Arc<LieAlgebra>, coeffs: &[f64]) -> Result<Vec<f64>> {
    let phi = KForm::from_coeffs(7, 3, coeffs.to_vec())?;
    let g2 = G2Structure::new(Arc::clone(alg), phi)?;
    Ok(hodge_laplacian(&g2)?.into_coeffs())
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn rk4_step(alg: &Arc<LieAlgebra>, y: &[f64], k1: &[f64], h: f64) -> Result<Vec<f64>> {
    let k2 = rhs(alg, &axpy(y, h / 2.0, k1))?;
    let k3 = rhs(alg, &axpy(y, h / 2.0, &k2))?;
    let k4 = rhs(alg, &axpy(y, h, &k3))?;
    Ok(y.iter()
        .enumerate()
        .map(|(i, v)| v + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Integrates the Laplacian flow from `phi0` with classical fixed-step RK4.
pub fn flow_integrate(
    alg: &LieAlgebra,
    phi0: &KForm,
    t_end: f64,
    dt: f64,
    opts: FlowOptions,
) -> Result<FlowTrajectory> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::FlowInit(format!(
            "t_end must be finite and >= 0, got {t_end}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::FlowInit(format!("dt must be positive, got {dt}")));
    }
    let ratio = t_end / dt;
    if ratio > MAX_STEPS as f64 {
        return Err(Error::FlowInit(format!(
            "{ratio:.0} steps exceed the cap of {MAX_STEPS}"
        )));
    }
    let n_steps = (ratio - 1e-9).ceil().max(0.0) as usize;
    let alg = Arc::new(alg.clone());
    let g2 = G2Structure::new(Arc::clone(&alg), phi0.clone())?;
    let d0 = g2.dphi()?.coeff_norm();
    if d0 > INITIAL_CLOSEDNESS_TOL {
        return Err(Error::FlowInit(format!(
            "initial form is not closed (|dphi| = {d0:.3e})"
        )));
    }
    let closed_tol = opts
        .closedness_tol
        .unwrap_or_else(|| (10.0 * d0).max(CLOSEDNESS_FLOOR));
    let sample_every = opts.sample_every.max(1);

    let mut states = vec![FlowState {
        t: 0.0,
        phi: phi0.clone(),
        diagnostics: Diagnostics::of(&g2)?,
    }];
    let mut y = phi0.coeffs().to_vec();
    let mut k1 = hodge_laplacian(&g2)?.into_coeffs();
    let mut current = g2;
    let mut termination = Termination::ReachedEnd;
    let mut steps = 0;
    for step in 1..=n_steps {
        let t_prev = (step - 1) as f64 * dt;
        let t = (step as f64 * dt).min(t_end);
        let next = rk4_step(&alg, &y, &k1, t - t_prev).and_then(|y_new| {
            let phi = KForm::from_coeffs(7, 3, y_new.clone())?;
            Ok((y_new, G2Structure::new(Arc::clone(&alg), phi)?))
        });
        let (y_new, g2_new) = match next {
            Ok(v) => v,
            Err(Error::NotPositiveG2(_)) | Err(Error::NotPositiveDefinite) => {
                termination = Termination::PositivityLost;
                break;
            }
            Err(e) => return Err(e),
        };
        if g2_new.dphi()?.coeff_norm() > closed_tol {
            termination = Termination::ClosednessViolated;
            break;
        }
        k1 = hodge_laplacian(&g2_new)?.into_coeffs();
        y = y_new;
        current = g2_new;
        steps = step;
        if step % sample_every == 0 || step == n_steps {
            states.push(FlowState {
                t,
                phi: current.phi().clone(),
                diagnostics: Diagnostics::of(&current)?,
            });
        }
    }
    let last_t = steps as f64 * dt;
    if steps > 0 && states.last().map(|s| s.t) != Some(last_t.min(t_end)) {
        states.push(FlowState {
            t: last_t.min(t_end),
            phi: current.phi().clone(),
            diagnostics: Diagnostics::of(&current)?,
        });
    }
    Ok(FlowTrajectory {
        states,
        termination,
        steps,
    })
}

fn catalog_phi(name: &str) -> KForm {
    catalog(name)
        .ok()
        .and_then(|e| e.form("phi").cloned())
        .expect("built-in catalog parses")
}

/// Exact solution from `φ₂` on `n2`: the `e123` coefficient is `(10t/3 + 1)^{3/5}`.
pub fn closed_form_n2(t: f64) -> Result<KForm> {
    let lower = -0.3;
    if t.is_nan() || t <= lower {
        return Err(Error::OutsideInterval { t, lower });
    }
    let mut phi = catalog_phi("n2");
    let pos = position(&[1, 2, 3]);
    phi.coeffs_mut()[pos] = (10.0 / 3.0 * t + 1.0).powf(0.6);
    Ok(phi)
}

pub fn closed_form_n2_derivative(t: f64) -> Result<KForm> {
    let lower = -0.3;
    if t.is_nan() || t <= lower {
        return Err(Error::OutsideInterval { t, lower });
    }
    let mut out = KForm::zero(7, 3);
    out.coeffs_mut()[position(&[1, 2, 3])] = 2.0 * (10.0 / 3.0 * t + 1.0).powf(-0.4);
    Ok(out)
}

/// Exact solution from `φ₁₂` on `n12` (adapted basis): `e135 − e236` scaled by `(t/3 + 1)^{3/4}`.
pub fn closed_form_n12(t: f64) -> Result<KForm> {
    let lower = -3.0;
    if t.is_nan() || t <= lower {
        return Err(Error::OutsideInterval { t, lower });
    }
    let mut phi = catalog_phi("n12_modified_basis");
    let f = (t / 3.0 + 1.0).powf(0.75);
    phi.coeffs_mut()[position(&[1, 3, 5])] = f;
    phi.coeffs_mut()[position(&[2, 3, 6])] = -f;
    Ok(phi)
}

pub fn closed_form_n12_derivative(t: f64) -> Result<KForm> {
    let lower = -3.0;
    if t.is_nan() || t <= lower {
        return Err(Error::OutsideInterval { t, lower });
    }
    let f = 0.25 * (t / 3.0 + 1.0).powf(-0.25);
    let mut out = KForm::zero(7, 3);
    out.coeffs_mut()[position(&[1, 3, 5])] = f;
    out.coeffs_mut()[position(&[2, 3, 6])] = -f;
    Ok(out)
}

/// A known exact solution of the flow, starting from a catalog form.
#[derive(Clone, Copy, Debug)]
pub struct ClosedForm {
    /// Catalog entry whose `phi` is the value at `t = 0`.
    pub catalog: &'static str,
    /// The solution exists for `t` above this bound.
    pub lower: f64,
    pub phi: fn(f64) -> Result<KForm>,
    pub derivative: fn(f64) -> Result<KForm>,
}

/// All exact solutions known to the library.
pub const CLOSED_FORMS: [ClosedForm; 2] = [
    ClosedForm {
        catalog: "n2",
        lower: -0.3,
        phi: closed_form_n2,
        derivative: closed_form_n2_derivative,
    },
    ClosedForm {
        catalog: "n12_modified_basis",
        lower: -3.0,
        phi: closed_form_n12,
        derivative: closed_form_n12_derivative,
    },
];

/// The exact solution starting from the catalog entry `name`, if one is known.
pub fn closed_form(name: &str) -> Option<&'static ClosedForm> {
    CLOSED_FORMS.iter().find(|c| c.catalog == name)
}

impl ClosedForm {
    /// `‖∂ₜφ(t) − Δφ(t)‖` for the exact solution at time `t`.
    pub fn ode_residual(&self, algebra: &Arc<LieAlgebra>, t: f64) -> Result<f64> {
        let g2 = G2Structure::new(Arc::clone(algebra), (self.phi)(t)?)?;
        Ok((hodge_laplacian(&g2)? - (self.derivative)(t)?).coeff_norm())
    }
}

fn position(labels: &[usize]) -> usize {
    let target: Vec<usize> = labels.to_vec();
    KForm::basis_indices(7, 3)
        .position(|m| m.labels() == target)
        .expect("valid multi-index")
}
