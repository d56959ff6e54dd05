//! Hamiltonian vector fields of invariant functions and their flows on the
//! relator-constrained locus, integrated by a Lie-group Runge-Kutta scheme.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::InvariantFunction;
use crate::intersection::BorderedPairing;
use crate::lie::{GroupKind, InvariantForm};
use crate::linalg::Vector;
use crate::rep::{newton_correct, orbit_type, Representation, MEMBERSHIP_TOL};

/// Newton steps applied after every integration step. The off-locus error of
/// one step is tiny, so two quadratic steps reach rounding level.
pub const PROJECTION_STEPS: usize = 2;

/// The field `V` with `dh(V) = {f,h}` for every `h`, as a stacked
/// left-translated tangent vector. Defined at every tuple via the
/// chain-level pairing; a 1-cocycle at members.
pub fn hamiltonian_vector(f: &InvariantFunction, phi: &Representation, form: &InvariantForm) -> Result<Vector> {
    let tensor = BorderedPairing::new(phi, form)?.tensor();
    Ok(tensor.transpose() * f.differential(phi)?)
}

/// `A + ½[Θ,A] + (1/12)[Θ,[Θ,A]]` blockwise: the inverse right-trivialised
/// derivative of `exp` truncated at the order RK4 needs.
fn dexp_inv(phi: &Representation, theta: &Vector, a: &Vector) -> Vector {
    let spec = phi.spec();
    let n = spec.dim();
    let mut out = a.clone();
    for i in 0..phi.rank() {
        let t = &theta.as_slice()[i * n..(i + 1) * n];
        let v = &a.as_slice()[i * n..(i + 1) * n];
        let once = spec.lie_bracket(t, v);
        let twice = spec.lie_bracket(t, &once);
        for k in 0..n {
            out[i * n + k] += 0.5 * once[k] + twice[k] / 12.0;
        }
    }
    out
}

fn moved(phi: &Representation, theta: &Vector) -> Representation {
    phi.perturbed(theta.as_slice(), 1.0)
}

/// One RKMK4 step of `φ' = φ·V(φ)` without projection.
pub fn rkmk4_step(f: &InvariantFunction, phi: &Representation, form: &InvariantForm, dt: f64) -> Result<Representation> {
    let field = |p: &Representation| hamiltonian_vector(f, p, form);
    let k1 = field(phi)?;
    let th2 = &k1 * (0.5 * dt);
    let k2 = dexp_inv(phi, &th2, &field(&moved(phi, &th2))?);
    let th3 = &k2 * (0.5 * dt);
    let k3 = dexp_inv(phi, &th3, &field(&moved(phi, &th3))?);
    let th4 = &k3 * dt;
    let k4 = dexp_inv(phi, &th4, &field(&moved(phi, &th4))?);
    let theta = (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    Ok(moved(phi, &theta))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub time: f64,
    pub f_value: f64,
    pub relator_residual: f64,
    pub h0: usize,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<FlowState>,
    pub endpoint: Representation,
    /// Set when the integration stopped early, with the reason.
    pub aborted: Option<String>,
    /// `h⁰` at the start; the guard trips when it grows.
    pub initial_h0: usize,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.aborted.is_none()
    }

    /// Largest `|f(t) − f(0)|` along the trajectory.
    pub fn value_drift(&self) -> f64 {
        let f0 = self.states[0].f_value;
        self.states.iter().map(|s| (s.f_value - f0).abs()).fold(0.0, f64::max)
    }

    pub fn max_relator_residual(&self) -> f64 {
        self.states.iter().map(|s| s.relator_residual).fold(0.0, f64::max)
    }

    /// Columns `time, f_value, relator_residual, orbit_guard`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["time", "f_value", "relator_residual", "orbit_guard"])?;
        for s in &self.states {
            let guard = if s.h0 > self.initial_h0 { "tripped" } else { "ok" };
            w.write_record([
                format!("{:?}", s.time),
                format!("{:?}", s.f_value),
                format!("{:?}", s.relator_residual),
                guard.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Newton correction back onto the locus after every step.
    pub project: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            t_end: 1.0,
            dt: 1e-3,
            project: true,
        }
    }
}

/// Integrates the Hamiltonian flow of `f` from `phi0`. Stops early, keeping
/// the states so far, when `h⁰` grows or re-projection fails.
pub fn integrate_flow(
    f: &InvariantFunction,
    phi0: &Representation,
    form: &InvariantForm,
    opts: FlowOptions,
) -> Result<Trajectory> {
    let residual = phi0.relator_residual();
    if residual > MEMBERSHIP_TOL {
        return Err(Error::NotMember { residual });
    }
    if !(opts.dt > 0.0 && opts.dt.is_finite() && opts.t_end >= 0.0 && opts.t_end.is_finite()) {
        return Err(Error::InvalidInput("flow needs dt > 0 and t_end >= 0".into()));
    }
    let steps = (opts.t_end / opts.dt).round() as usize;
    let initial_h0 = orbit_type(phi0).h0;
    let state = |time: f64, p: &Representation, h0: usize| -> Result<FlowState> {
        Ok(FlowState {
            time,
            f_value: f.eval(p)?,
            relator_residual: p.relator_residual(),
            h0,
        })
    };
    let mut states = vec![state(0.0, phi0, initial_h0)?];
    let mut phi = phi0.clone();
    let mut aborted = None;
    for k in 1..=steps {
        let time = k as f64 * opts.dt;
        let mut next = rkmk4_step(f, &phi, form, opts.dt)?;
        if opts.project {
            next = newton_correct(&next, PROJECTION_STEPS);
        }
        let h0 = orbit_type(&next).h0;
        states.push(state(time, &next, h0)?);
        phi = next;
        if h0 > initial_h0 {
            aborted = Some(format!("stabilizer dimension grew from {initial_h0} to {h0} at t = {time}"));
            break;
        }
        if phi.relator_residual() > MEMBERSHIP_TOL {
            aborted = Some(format!(
                "re-projection left relator residual {:.3e} at t = {time}",
                phi.relator_residual()
            ));
            break;
        }
    }
    Ok(Trajectory {
        states,
        endpoint: phi,
        aborted,
        initial_h0,
    })
}

fn quaternion(m: &crate::linalg::CMat) -> (f64, Vector3<f64>) {
    (m[(0, 0)].re, Vector3::new(m[(0, 0)].im, m[(0, 1)].re, m[(0, 1)].im))
}

/// Frobenius distance between two tuples after optimally conjugating the
/// second one. Exact for SU(2) (rotation alignment of the quaternion vector
/// parts); for other groups the plain distance, an upper bound.
pub fn aligned_distance(a: &Representation, b: &Representation) -> f64 {
    if *a.spec().kind() != GroupKind::SU2 {
        return a
            .images()
            .iter()
            .zip(b.images())
            .map(|(x, y)| (x - y).norm_squared())
            .sum::<f64>()
            .sqrt();
    }
    let parts: Vec<_> = a
        .images()
        .iter()
        .zip(b.images())
        .map(|(x, y)| (quaternion(x), quaternion(y)))
        .collect();
    // Kabsch: the rotation R maximising Σ ⟨R v_b, v_a⟩ is V diag(1, 1, d) Uᵀ for H = Σ v_b v_aᵀ = U S Vᵀ
    let mut cross = Matrix3::zeros();
    for ((_, va), (_, vb)) in &parts {
        cross += vb * va.transpose();
    }
    let svd = cross.svd(true, true);
    let (u, v) = (svd.u.unwrap(), svd.v_t.unwrap().transpose());
    let d = (v * u.transpose()).determinant().signum();
    let rotation = v * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose();
    let squared: f64 = parts
        .iter()
        .map(|((sa, va), (sb, vb))| (sa - sb).powi(2) + (rotation * vb - va).norm_squared())
        .sum();
    (2.0 * squared).sqrt()
}
