//! The two-level Hamiltonian `H(w, z)` and the parameter paths that drive it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64, ZERO};

/// Closure tolerance on `|w(1) − w(0)|` and `|z(1) − z(0)|`.
pub const CLOSURE_TOL: f64 = 1e-12;

/// Point `(w, z)` in parameter space: `w = Ω e^{iφ}`, `z = Δ − iΓ/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPair {
    pub w: C64,
    pub z: C64,
}

impl ComplexPair {
    pub fn new(w: C64, z: C64) -> Self {
        ComplexPair { w, z }
    }

    /// Builds the pair from Rabi amplitude Ω, laser phase φ, detuning Δ and
    /// resonance width Γ.
    pub fn from_physical(omega: f64, phi: f64, delta: f64, gamma: f64) -> Self {
        ComplexPair {
            w: C64::from_polar(omega, phi),
            z: C64::new(delta, -gamma / 4.0),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.z.is_finite()
    }
}

/// `H(w, z) = [[0, w], [w̄, 2z]]`.
pub fn hamiltonian_at(p: ComplexPair) -> Mat2 {
    [[ZERO, p.w], [p.w.conj(), p.z * 2.0]]
}

/// `dH/ds` given the parameter derivatives `(ẇ, ż)`.
pub fn hamiltonian_derivative(dp: ComplexPair) -> Mat2 {
    hamiltonian_at(dp)
}

/// Path through user-supplied knots, interpolated by a C² cubic spline
/// clamped to one-sided second-order slopes at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPath {
    s: Vec<f64>,
    w: Vec<C64>,
    z: Vec<C64>,
    dw: Vec<C64>,
    dz: Vec<C64>,
}

/// Slopes at the knots of the clamped cubic spline through `(s, y)`.
fn knot_tangents(s: &[f64], y: &[C64]) -> Vec<C64> {
    let n = s.len();
    if n == 2 {
        let m = (y[1] - y[0]) / (s[1] - s[0]);
        return vec![m, m];
    }
    let h: Vec<f64> = s.windows(2).map(|p| p[1] - p[0]).collect();
    let delta: Vec<C64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let end_slope = |h0: f64, h1: f64, y0: C64, y1: C64, y2: C64| {
        y0 * (-(2.0 * h0 + h1) / (h0 * (h0 + h1))) + y1 * ((h0 + h1) / (h0 * h1)) - y2 * (h0 / (h1 * (h0 + h1)))
    };
    let first = end_slope(h[0], h[1], y[0], y[1], y[2]);
    let last = -end_slope(h[n - 2], h[n - 3], y[n - 1], y[n - 2], y[n - 3]);
    // tridiagonal system for the interior slopes (Thomas algorithm)
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    let mut m = vec![C64::new(0.0, 0.0); n];
    m[0] = first;
    m[n - 1] = last;
    for i in 1..n - 1 {
        let (a, c) = (1.0 / h[i - 1], 1.0 / h[i]);
        diag[i] = 2.0 * (a + c);
        upper[i] = c;
        rhs[i] = (delta[i - 1] * a + delta[i] * c) * 3.0;
        if i == 1 {
            rhs[i] -= first * a;
        } else {
            let factor = a / diag[i - 1];
            diag[i] -= factor * upper[i - 1];
            rhs[i] = rhs[i] - rhs[i - 1] * factor;
        }
        if i == n - 2 {
            rhs[i] -= last * c;
        }
    }
    for i in (1..n - 1).rev() {
        let next = if i + 1 < n - 1 { m[i + 1] * upper[i] } else { C64::new(0.0, 0.0) };
        m[i] = (rhs[i] - next) / diag[i];
    }
    m
}

impl TabulatedPath {
    pub fn new(s: Vec<f64>, w: Vec<C64>, z: Vec<C64>) -> Result<Self> {
        if s.len() < 2 || s.len() != w.len() || s.len() != z.len() {
            return Err(Error::Config(
                "tabulated path needs at least two knots with matching s, w, z columns".into(),
            ));
        }
        if s[0] != 0.0 || *s.last().unwrap() != 1.0 {
            return Err(Error::Config("tabulated path must span s = 0 to s = 1".into()));
        }
        if s.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Config("tabulated s values must be strictly increasing".into()));
        }
        if w.iter().chain(z.iter()).any(|c| !c.is_finite()) {
            return Err(Error::Config("tabulated path contains non-finite values".into()));
        }
        let dw = knot_tangents(&s, &w);
        let dz = knot_tangents(&s, &z);
        Ok(TabulatedPath { s, w, z, dw, dz })
    }

    fn segment(&self, s: f64) -> usize {
        let k = self.s.partition_point(|&x| x <= s);
        k.clamp(1, self.s.len() - 1) - 1
    }

    /// Hermite basis values and derivatives at `s` on its segment.
    fn eval(&self, s: f64, y: &[C64], dy: &[C64]) -> (C64, C64) {
        let k = self.segment(s);
        let h = self.s[k + 1] - self.s[k];
        let t = (s - self.s[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let value = y[k] * h00 + dy[k] * (h10 * h) + y[k + 1] * h01 + dy[k + 1] * (h11 * h);
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        let slope = y[k] * d00 + dy[k] * d10 + y[k + 1] * d01 + dy[k + 1] * d11;
        (value, slope)
    }

    fn at(&self, s: f64) -> ComplexPair {
        ComplexPair {
            w: self.eval(s, &self.w, &self.dw).0,
            z: self.eval(s, &self.z, &self.dz).0,
        }
    }

    fn derivative(&self, s: f64) -> ComplexPair {
        ComplexPair {
            w: self.eval(s, &self.w, &self.dw).1,
            z: self.eval(s, &self.z, &self.dz).1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathShape {
    Constant(ComplexPair),
    /// `w(s) = w0 exp(−s²/2σ²)`, `z(s) = Δ0 cos(0.4πs) − iΓ/4`.
    GaussianPulse {
        w0: f64,
        delta0: f64,
        gamma: f64,
        sigma: f64,
    },
    /// `Ω(s) = Ω_c + Ω_r cos(2π n s)`, `Δ(s) = Δ_c + Δ_r sin(2π n s)`,
    /// `w = Ω e^{iφ}`, `z = Δ − iΓ/4`.
    EllipticLoop {
        omega_center: f64,
        omega_radius: f64,
        delta_center: f64,
        delta_radius: f64,
        gamma: f64,
        phi: f64,
        turns: f64,
    },
    Table(TabulatedPath),
}

/// A smooth map `s ↦ (w(s), z(s))` on `[0, 1]` together with the physical
/// duration `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPath {
    shape: PathShape,
    duration: f64,
    closed: bool,
}

impl ParameterPath {
    pub fn new(shape: PathShape, duration: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::Config(format!("duration T must be positive, got {duration}")));
        }
        let mut path = ParameterPath {
            shape,
            duration,
            closed: false,
        };
        for k in 0..=64 {
            let s = k as f64 / 64.0;
            if !path.at(s).is_finite() || !path.derivative(s).is_finite() {
                return Err(Error::Config(format!("path is not finite at s = {s}")));
            }
        }
        let (a, b) = (path.at(0.0), path.at(1.0));
        path.closed = (a.w - b.w).norm() < CLOSURE_TOL && (a.z - b.z).norm() < CLOSURE_TOL;
        Ok(path)
    }

    pub fn constant(p: ComplexPair, duration: f64) -> Result<Self> {
        Self::new(PathShape::Constant(p), duration)
    }

    pub fn shape(&self) -> &PathShape {
        &self.shape
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn with_duration(&self, duration: f64) -> Result<Self> {
        Self::new(self.shape.clone(), duration)
    }

    /// Resonance width when the path carries one explicitly.
    pub fn gamma(&self) -> Option<f64> {
        match &self.shape {
            PathShape::GaussianPulse { gamma, .. } | PathShape::EllipticLoop { gamma, .. } => {
                Some(*gamma)
            }
            _ => None,
        }
    }

    pub fn at(&self, s: f64) -> ComplexPair {
        match &self.shape {
            PathShape::Constant(p) => *p,
            PathShape::GaussianPulse {
                w0,
                delta0,
                gamma,
                sigma,
            } => ComplexPair {
                w: C64::new(w0 * (-s * s / (2.0 * sigma * sigma)).exp(), 0.0),
                z: C64::new(delta0 * (0.4 * PI * s).cos(), -gamma / 4.0),
            },
            PathShape::EllipticLoop {
                omega_center,
                omega_radius,
                delta_center,
                delta_radius,
                gamma,
                phi,
                turns,
            } => {
                let angle = 2.0 * PI * turns * s;
                ComplexPair::from_physical(
                    omega_center + omega_radius * angle.cos(),
                    *phi,
                    delta_center + delta_radius * angle.sin(),
                    *gamma,
                )
            }
            PathShape::Table(t) => t.at(s),
        }
    }

    /// `(dw/ds, dz/ds)`.
    pub fn derivative(&self, s: f64) -> ComplexPair {
        match &self.shape {
            PathShape::Constant(_) => ComplexPair::new(ZERO, ZERO),
            PathShape::GaussianPulse {
                w0, delta0, sigma, ..
            } => {
                let w = w0 * (-s * s / (2.0 * sigma * sigma)).exp();
                ComplexPair {
                    w: C64::new(-s / (sigma * sigma) * w, 0.0),
                    z: C64::new(-delta0 * 0.4 * PI * (0.4 * PI * s).sin(), 0.0),
                }
            }
            PathShape::EllipticLoop {
                omega_radius,
                delta_radius,
                phi,
                turns,
                ..
            } => {
                let k = 2.0 * PI * turns;
                let angle = k * s;
                ComplexPair {
                    w: C64::from_polar(-omega_radius * k * angle.sin(), *phi),
                    z: C64::new(delta_radius * k * angle.cos(), 0.0),
                }
            }
            PathShape::Table(t) => t.derivative(s),
        }
    }

    pub fn hamiltonian(&self, s: f64) -> Mat2 {
        hamiltonian_at(self.at(s))
    }
}

/// Gaussian coupling pulse with a slowly decreasing detuning.
pub fn gaussian_pulse_path(w0: f64, delta0: f64, gamma: f64, sigma: f64, duration: f64) -> Result<ParameterPath> {
    if !(sigma > 0.0) {
        return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
    }
    ParameterPath::new(
        PathShape::GaussianPulse {
            w0,
            delta0,
            gamma,
            sigma,
        },
        duration,
    )
}

/// Circular loop of radius 0.24Γ around the exceptional point `(Ω, Δ) = (Γ/4, 0)`.
pub fn ep_loop_path(gamma: f64, phi: f64, duration: f64) -> Result<ParameterPath> {
    ep_loop_path_turns(gamma, phi, duration, 1.0)
}

/// Same loop traversed `turns` times within `s ∈ [0, 1]`.
pub fn ep_loop_path_turns(gamma: f64, phi: f64, duration: f64, turns: f64) -> Result<ParameterPath> {
    if !(gamma > 0.0) {
        return Err(Error::Config(format!("ep loop needs gamma > 0, got {gamma}")));
    }
    ParameterPath::new(
        PathShape::EllipticLoop {
            omega_center: gamma / 4.0,
            omega_radius: 0.24 * gamma,
            delta_center: 0.0,
            delta_radius: 0.24 * gamma,
            gamma,
            phi,
            turns,
        },
        duration,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{adjoint, mat_sub, transpose, frobenius};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_parameters_give_zero_matrix() {
        let h = hamiltonian_at(ComplexPair::new(ZERO, ZERO));
        assert!(h.iter().flatten().all(|x| *x == ZERO));
    }

    #[test]
    fn resonance_width_enters_lower_diagonal() {
        let (gamma, delta) = (0.5, 0.03);
        let p = ComplexPair::from_physical(gamma / 4.0 + 0.24 * gamma * 0.3_f64.cos(), PI / 4.0, delta, gamma);
        let h = hamiltonian_at(p);
        assert!((h[1][1] - c(2.0 * delta, -gamma / 2.0)).norm() < 1e-15);
        assert_eq!(h[0][0], ZERO);
        assert_eq!(h[1][0], h[0][1].conj());
    }

    #[test]
    fn eigenvalues_are_characteristic_roots() {
        let h = hamiltonian_at(ComplexPair::new(c(1.0, 0.0), c(0.5, -0.025)));
        assert_eq!(h[1][1], c(1.0, -0.05));
        // det(H − E) = E² − tr E + det, quadratic formula
        let tr = h[0][0] + h[1][1];
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let disc = (tr * tr - det * 4.0).sqrt();
        for e in [(tr - disc) / 2.0, (tr + disc) / 2.0] {
            let residual = (h[0][0] - e) * (h[1][1] - e) - h[0][1] * h[1][0];
            assert!(residual.norm() < 1e-14);
        }
    }

    #[test]
    fn gaussian_pulse_endpoints() {
        let path = gaussian_pulse_path(1.0, 0.5, 0.1, 0.16, 100.0).unwrap();
        let p0 = path.at(0.0);
        assert_eq!(p0.w, c(1.0, 0.0));
        assert!((p0.z - c(0.5, -0.025)).norm() < 1e-16);
        let w1 = path.at(1.0).w.norm();
        assert!((w1 - (-1.0 / (2.0 * 0.16 * 0.16_f64)).exp()).abs() < 1e-22);
        assert!(w1 < 3.4e-9 && w1 > 3.2e-9);
        assert!(!path.closed());
        // detuning decreases monotonically to Δ0 cos(0.4π)
        let z1 = path.at(1.0).z.re;
        assert!((z1 - 0.5 * (0.4 * PI).cos()).abs() < 1e-15);
    }

    #[test]
    fn flat_gaussian_is_constant_coupling() {
        let path = gaussian_pulse_path(0.7, 0.5, 0.1, f64::INFINITY, 100.0).unwrap();
        for k in 0..=10 {
            assert_eq!(path.at(k as f64 / 10.0).w, c(0.7, 0.0));
        }
    }

    #[test]
    fn ep_loop_start_point() {
        let path = ep_loop_path(0.5, 0.0, 100.0).unwrap();
        let p = path.at(0.0);
        assert!((p.w - c(0.245, 0.0)).norm() < 1e-15);
        assert!((p.z - c(0.0, -0.125)).norm() < 1e-15);
        assert!(path.closed());
    }

    /// Winding number of the (Ω, Δ) track around a point, by summing
    /// wrapped angle increments.
    fn winding(path: &ParameterPath, omega: f64, delta: f64) -> f64 {
        let n = 10_000;
        let angle = |s: f64| {
            let p = path.at(s);
            (p.z.re - delta).atan2(p.w.norm() - omega)
        };
        let mut total = 0.0;
        let mut prev = angle(0.0);
        for k in 1..=n {
            let a = angle(k as f64 / n as f64);
            let mut d = a - prev;
            if d > PI {
                d -= 2.0 * PI;
            } else if d < -PI {
                d += 2.0 * PI;
            }
            total += d;
            prev = a;
        }
        total / (2.0 * PI)
    }

    #[test]
    fn ep_loop_encloses_exactly_one_exceptional_point() {
        let gamma = 0.5;
        for phi in [0.0, PI / 4.0] {
            let path = ep_loop_path(gamma, phi, 100.0).unwrap();
            assert!((winding(&path, gamma / 4.0, 0.0).abs() - 1.0).abs() < 1e-9);
            assert!(winding(&path, -gamma / 4.0, 0.0).abs() < 1e-9);
            let (mut lo, mut hi) = (f64::MAX, f64::MIN);
            for k in 0..=1000 {
                let p = path.at(k as f64 / 1000.0);
                lo = lo.min(p.w.norm());
                hi = hi.max(p.w.norm());
                assert!(p.z.re.abs() <= 0.12 + 1e-15);
            }
            assert!((lo - 0.005).abs() < 1e-9 && (hi - 0.245).abs() < 1e-12);
        }
    }

    #[test]
    fn non_symmetric_loop_rotates_coupling() {
        let a = ep_loop_path(0.5, 0.0, 100.0).unwrap();
        let b = ep_loop_path(0.5, PI / 4.0, 100.0).unwrap();
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            let (pa, pb) = (a.at(s), b.at(s));
            assert!((pa.w * C64::from_polar(1.0, PI / 4.0) - pb.w).norm() < 1e-15);
            assert_eq!(pa.z, pb.z);
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let paths = [
            gaussian_pulse_path(1.0, 0.5, 0.1, 0.16, 100.0).unwrap(),
            ep_loop_path(0.5, PI / 4.0, 100.0).unwrap(),
        ];
        let h = 1e-6;
        for path in &paths {
            for k in 1..10 {
                let s = k as f64 / 10.0;
                let (a, b) = (path.at(s + h), path.at(s - h));
                let d = path.derivative(s);
                assert!(((a.w - b.w) / (2.0 * h) - d.w).norm() < 1e-6);
                assert!(((a.z - b.z) / (2.0 * h) - d.z).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn tabulated_path_reproduces_linear_data_and_knots() {
        let t = TabulatedPath::new(
            vec![0.0, 0.3, 1.0],
            vec![c(1.0, 0.0), c(0.7, 0.3), c(0.0, 1.0)],
            vec![c(0.5, -0.1), c(0.5, -0.1), c(0.5, -0.1)],
        )
        .unwrap();
        let path = ParameterPath::new(PathShape::Table(t), 10.0).unwrap();
        assert!(!path.closed());
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            assert!((path.at(s).w - c(1.0 - s, s)).norm() < 1e-14);
            assert!((path.derivative(s).w - c(-1.0, 1.0)).norm() < 1e-13);
        }
        let knots = TabulatedPath::new(
            vec![0.0, 0.5, 1.0],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.5, -0.1), c(0.3, -0.1), c(0.5, -0.1)],
        )
        .unwrap();
        let path = ParameterPath::new(PathShape::Table(knots), 10.0).unwrap();
        assert!(path.closed());
        assert!(path.at(0.5).w.norm() < 1e-15);
        // continuous slope across the interior knot
        let (a, b) = (path.derivative(0.5 - 1e-12), path.derivative(0.5 + 1e-12));
        assert!((a.w - b.w).norm() < 1e-9 && (a.z - b.z).norm() < 1e-9);
        // quadratic data on an uneven grid is reproduced with its derivative
        let s_knots = vec![0.0, 0.1, 0.35, 0.4, 0.8, 1.0];
        let f = |s: f64| c(2.0 * s * s - s + 0.5, -0.3 * s * s);
        let df = |s: f64| c(4.0 * s - 1.0, -0.6 * s);
        let quad = TabulatedPath::new(s_knots.clone(), s_knots.iter().map(|&s| f(s)).collect(), vec![ZERO; 6]).unwrap();
        let path = ParameterPath::new(PathShape::Table(quad), 10.0).unwrap();
        for k in 0..=50 {
            let s = k as f64 / 50.0;
            assert!((path.at(s).w - f(s)).norm() < 1e-13);
            assert!((path.derivative(s).w - df(s)).norm() < 1e-12);
        }
        assert!(TabulatedPath::new(vec![0.0, 0.7], vec![ZERO; 2], vec![ZERO; 2]).is_err());
        assert!(TabulatedPath::new(vec![0.0, 0.5, 0.5, 1.0], vec![ZERO; 4], vec![ZERO; 4]).is_err());
    }

    #[test]
    fn rejects_nonpositive_duration() {
        assert!(ParameterPath::constant(ComplexPair::new(ZERO, ZERO), 0.0).is_err());
        assert!(gaussian_pulse_path(1.0, 0.5, 0.1, 0.0, 100.0).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_iff_real_coupling(
            wr in -5.0..5.0f64, wi in -5.0..5.0f64, zr in -5.0..5.0f64, zi in -5.0..5.0f64,
            real in any::<bool>(),
        ) {
            let w = if real { c(wr, 0.0) } else { c(wr, wi) };
            let h = hamiltonian_at(ComplexPair::new(w, c(zr, zi)));
            let sym = frobenius(&mat_sub(&h, &transpose(&h))) == 0.0;
            prop_assert_eq!(sym, w.im == 0.0);
        }

        #[test]
        fn anti_hermitian_part_comes_from_width_only(
            wr in -5.0..5.0f64, wi in -5.0..5.0f64, zr in -5.0..5.0f64, zi in -5.0..5.0f64,
        ) {
            let h = hamiltonian_at(ComplexPair::new(c(wr, wi), c(zr, zi)));
            let skew = mat_sub(&h, &adjoint(&h));
            // the off-diagonal pair is always a conjugate pair, so only Im(z) survives
            prop_assert_eq!(skew[0][0], ZERO);
            prop_assert_eq!(skew[0][1], ZERO);
            prop_assert_eq!(skew[1][0], ZERO);
            prop_assert!((skew[1][1] - c(0.0, 4.0 * zi)).norm() < 1e-14);
            let herm = hamiltonian_at(ComplexPair::new(c(wr, wi), c(zr, 0.0)));
            prop_assert_eq!(frobenius(&mat_sub(&herm, &adjoint(&herm))), 0.0);
        }
    }
}
