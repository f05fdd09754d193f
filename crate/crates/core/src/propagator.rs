//! Fixed-step RK4 integration of `dψ/ds = −i T H(s) ψ`.

use log::warn;

use crate::error::{Error, Result};
use crate::linalg::{is_finite, mat_vec, norm, Mat2, Vec2, C64};
use crate::model::ParameterPath;

pub const MIN_STEPS: usize = 1000;
pub const DEFAULT_STEPS: usize = 10_000;
/// Allowed relative norm growth per step on a dissipative path.
const MONOTONE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveState {
    pub s: f64,
    pub psi: Vec2,
}

impl WaveState {
    pub fn new(s: f64, psi: Vec2) -> Self {
        WaveState { s, psi }
    }

    pub fn norm_sq(&self) -> f64 {
        crate::linalg::norm_sq(&self.psi)
    }
}

fn rhs(h: &Mat2, duration: f64, psi: &Vec2) -> Vec2 {
    let k = C64::new(0.0, -duration);
    let hp = mat_vec(h, psi);
    [k * hp[0], k * hp[1]]
}

fn step(path: &ParameterPath, s: f64, dt: f64, psi: &Vec2) -> Vec2 {
    let t = path.duration();
    let h0 = path.hamiltonian(s);
    let hm = path.hamiltonian(s + 0.5 * dt);
    let h1 = path.hamiltonian(s + dt);
    let half = C64::new(0.5 * dt, 0.0);
    let k1 = rhs(&h0, t, psi);
    let k2 = rhs(&hm, t, &[psi[0] + half * k1[0], psi[1] + half * k1[1]]);
    let k3 = rhs(&hm, t, &[psi[0] + half * k2[0], psi[1] + half * k2[1]]);
    let k4 = rhs(&h1, t, &[psi[0] + k3[0] * dt, psi[1] + k3[1] * dt]);
    let w = dt / 6.0;
    [0, 1].map(|i| psi[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * w)
}

/// Integrates from `psi0` at `s = 0` over `steps` uniform intervals, without
/// the normalization and step-count preconditions of [`propagate`].
pub fn integrate(path: &ParameterPath, psi0: Vec2, steps: usize) -> Result<Vec<WaveState>> {
    if steps == 0 {
        return Err(Error::Config("integration needs at least one step".into()));
    }
    let dt = 1.0 / steps as f64;
    let dissipative = (0..=steps).all(|k| path.at(k as f64 * dt).z.im <= 0.0);
    let mut out = Vec::with_capacity(steps + 1);
    let mut psi = psi0;
    out.push(WaveState::new(0.0, psi));
    // ‖ψ(s)‖² ≤ ‖ψ(0)‖² exp(4T ∫ max(Im z, 0))
    let mut log_bound = 0.0;
    let mut warned = false;
    for k in 0..steps {
        let s = k as f64 * dt;
        let next = step(path, s, dt, &psi);
        let s_next = (k + 1) as f64 / steps as f64;
        if !is_finite(&next) {
            return Err(Error::NonfiniteState { s: s_next });
        }
        let (before, after) = (norm(&psi), norm(&next));
        log_bound += 2.0 * path.duration() * dt * path.at(s + 0.5 * dt).z.im.max(0.0);
        if !warned {
            if dissipative && after > before * (1.0 + MONOTONE_SLACK) {
                warn!("norm increased on a dissipative path at s = {s_next}: {before} -> {after}");
                warned = true;
            } else if after > norm(&psi0) * log_bound.exp() * (1.0 + MONOTONE_SLACK) {
                warn!("norm exceeds the dissipation bound at s = {s_next}");
                warned = true;
            }
        }
        psi = next;
        out.push(WaveState::new(s_next, psi));
    }
    Ok(out)
}

/// RK4 trajectory of a normalized initial state, recorded on every grid point.
pub fn propagate(path: &ParameterPath, psi0: WaveState, steps: usize) -> Result<Vec<WaveState>> {
    if steps < MIN_STEPS {
        return Err(Error::Config(format!("steps must be at least {MIN_STEPS}, got {steps}")));
    }
    let n = norm(&psi0.psi);
    if (n - 1.0).abs() > 1e-14 {
        return Err(Error::Config(format!("initial state must be normalized, |psi0| = {n}")));
    }
    integrate(path, psi0.psi, steps)
}

/// Observed order `p` from endpoint errors at `n`, `2n`, `4n` steps measured
/// against an `8n`-step reference (least-squares slope in log₂).
pub fn convergence_order(path: &ParameterPath, psi0: Vec2, n: usize) -> Result<f64> {
    let end = |k: usize| -> Result<Vec2> { Ok(integrate(path, psi0, k)?.last().unwrap().psi) };
    let reference = end(8 * n)?;
    let mut logs = [0.0; 3];
    for (i, m) in [n, 2 * n, 4 * n].into_iter().enumerate() {
        let e = end(m)?;
        let err = norm(&[e[0] - reference[0], e[1] - reference[1]]);
        logs[i] = err.log2();
    }
    // slope of log₂ e against log₂ h over h, h/2, h/4
    Ok((logs[0] - logs[2]) / 2.0)
}
