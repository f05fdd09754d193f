//! Geometric phase generators `A_ab = ⟨l_a, d r_b/ds⟩`, their line
//! integrals, gauge changes of the eigenbasis, the parallel-transported
//! frame, the η metric and loop holonomy.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{
    adjoint, expm2, frobenius, inner, mat_add, mat_mul, mat_scale, mat_sub, overlap, scale, Mat2, Vec2, C64,
    IDENTITY, ZERO,
};
use crate::model::{ComplexPair, ParameterPath};
use crate::spectral::{sheet_sqrt, BranchTracker, EigenFrame, NormFactors};

/// Refinement tolerance on the total phase integrals.
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Relative disagreement allowed between finite-difference generators at `h` and `h/2`.
pub const FD_RICHARDSON_TOL: f64 = 1e-4;
pub const MIN_PHASE_SAMPLES: usize = 100;

/// An eigenframe together with the `s`-derivatives of its right eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameJet {
    pub frame: EigenFrame,
    /// `(dw/ds, dz/ds)` at this sample.
    pub dpair: ComplexPair,
    pub dr: [Vec2; 2],
}

impl FrameJet {
    pub fn new(frame: EigenFrame, dpair: ComplexPair) -> Self {
        let dr = frame.right_derivatives(dpair);
        FrameJet { frame, dpair, dr }
    }

    pub fn s(&self) -> f64 {
        self.frame.s
    }

    pub fn generators(&self) -> PhaseGeneratorMatrix {
        let f = &self.frame;
        PhaseGeneratorMatrix([0, 1].map(|a| [0, 1].map(|b| inner(&f.l[a], &self.dr[b]))))
    }

    /// `(A_11, A_22)`.
    pub fn diagonal_generators(&self) -> [C64; 2] {
        let f = &self.frame;
        [inner(&f.l[0], &self.dr[0]), inner(&f.l[1], &self.dr[1])]
    }
}

/// `A_ab(s) = ⟨l_a, d r_b/ds⟩`; diagonal entries are the geometric phase
/// generators, off-diagonal ones the non-adiabatic couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGeneratorMatrix(pub Mat2);

impl PhaseGeneratorMatrix {
    pub fn diagonal(&self) -> [C64; 2] {
        [self.0[0][0], self.0[1][1]]
    }
}

/// Frame and parameter velocity at `s`.
fn jet_at(path: &ParameterPath, s: f64, v: C64, norms: NormFactors) -> Result<FrameJet> {
    let frame = EigenFrame::on_root(s, path.at(s), v, norms)?;
    Ok(FrameJet::new(frame, path.derivative(s)))
}

/// Root of `|w|² + z²` at `s` closest to `reference`.
fn aligned_root(path: &ParameterPath, s: f64, reference: C64) -> Result<C64> {
    let p = path.at(s);
    let v = sheet_sqrt(p.w, p.z).map_err(|e| match e {
        Error::EpDegenerate { magnitude, .. } => Error::EpDegenerate { s, magnitude },
        other => other,
    })?;
    Ok(if (v - reference).norm() <= (-v - reference).norm() { v } else { -v })
}

fn fd_generators(path: &ParameterPath, frame: &EigenFrame, h: f64) -> Result<Mat2> {
    let s = frame.s;
    let fwd = EigenFrame::on_root(s + h, path.at(s + h), aligned_root(path, s + h, frame.v)?, frame.norms)?;
    let bwd = EigenFrame::on_root(s - h, path.at(s - h), aligned_root(path, s - h, frame.v)?, frame.norms)?;
    Ok([0, 1].map(|a| {
        [0, 1].map(|b| {
            let d = [
                (fwd.r[b][0] - bwd.r[b][0]) / (2.0 * h),
                (fwd.r[b][1] - bwd.r[b][1]) / (2.0 * h),
            ];
            inner(&frame.l[a], &d)
        })
    }))
}

/// Central-difference estimate of `A` at `frame.s`, with neighbouring frames
/// aligned to the branch labels of `frame`. A second estimate at `h/2`
/// guards against under-resolved steps.
pub fn generator_matrix_fd(path: &ParameterPath, frame: &EigenFrame, h: f64) -> Result<PhaseGeneratorMatrix> {
    if !(h > 0.0) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {h}")));
    }
    let coarse = fd_generators(path, frame, h)?;
    let fine = fd_generators(path, frame, h / 2.0)?;
    let discrepancy = frobenius(&mat_sub(&coarse, &fine));
    if discrepancy > FD_RICHARDSON_TOL * frobenius(&fine).max(1.0) {
        return Err(Error::StepTooCoarse { s: frame.s, discrepancy });
    }
    Ok(PhaseGeneratorMatrix(coarse))
}

/// Closed-form `(A_11, A_22)` for the two-level model on the root `v`:
///
/// ```text
/// A_11 = (w̄ẇ + wẇ̄)/4v² + wẇ̄/(2v(v+z)) + (z+v)ż/2v²
/// A_22 = (w̄ẇ + wẇ̄)/4v² + wẇ̄/(2v(v−z)) − (v−z)ż/2v²
/// ```
pub fn generator_matrix_analytic_on_root(p: ComplexPair, dp: ComplexPair, v: C64) -> Result<[C64; 2]> {
    // reuse the frame's stable z ± v
    let frame = EigenFrame::on_root(f64::NAN, p, v, NormFactors { gamma: [1.0, 1.0] })?;
    let (plus, minus) = frame.roots();
    let (v_plus_z, v_minus_z) = (plus, -minus);
    let ComplexPair { w, z: _ } = p;
    let dw_sq = w.conj() * dp.w + w * dp.w.conj();
    let w_dwc = w * dp.w.conj();
    let v2 = v * v;
    let a11 = dw_sq / (v2 * 4.0) + w_dwc / (v * v_plus_z * 2.0) + v_plus_z * dp.z / (v2 * 2.0);
    let a22 = dw_sq / (v2 * 4.0) + w_dwc / (v * v_minus_z * 2.0) - v_minus_z * dp.z / (v2 * 2.0);
    Ok([a11, a22])
}

/// [`generator_matrix_analytic_on_root`] on the sheet root.
pub fn generator_matrix_analytic(p: ComplexPair, dp: ComplexPair) -> Result<[C64; 2]> {
    generator_matrix_analytic_on_root(p, dp, sheet_sqrt(p.w, p.z)?)
}

/// Closed-form generator of branch 1 in the `(w, z − v)` representation.
pub fn alternative_generator_a11(p: ComplexPair, dp: ComplexPair, v: C64) -> Result<C64> {
    let frame = EigenFrame::on_root(f64::NAN, p, v, NormFactors { gamma: [1.0, 1.0] })?;
    let v_minus_z = -frame.roots().1;
    let w = p.w;
    let dw_sq = w.conj() * dp.w + w * dp.w.conj();
    let v2 = v * v;
    Ok(dw_sq / (v2 * 4.0) + w.conj() * dp.w / (v * v_minus_z * 2.0) - v_minus_z * dp.z / (v2 * 2.0))
}

/// Running phase integrals and η at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAccumulator {
    pub s: f64,
    /// `∫₀ˢ A_aa ds′` for `a = 1, 2`.
    pub int_a: [C64; 2],
    /// `η_ba = exp(−∫(A_aa + conj A_bb)) ⟨r_b, r_a⟩`, stored as `eta[b][a]`.
    pub eta: Mat2,
}

/// Frames sampled along a path with the accumulated phases.
///
/// Jets live on a half-step grid of `2·steps + 1` points so that each
/// propagation step has a midpoint frame for Simpson quadrature.
#[derive(Debug, Clone)]
pub struct PhaseTrack {
    steps: usize,
    jets: Vec<FrameJet>,
    half_int: Vec<[C64; 2]>,
    accumulators: Vec<PhaseAccumulator>,
    /// Half-grid indices where branch labels were exchanged during tracking.
    pub swaps: Vec<usize>,
}

/// Samples branch-tracked jets on the half-step grid of `steps` intervals.
pub fn sample_jets(path: &ParameterPath, steps: usize) -> Result<(Vec<FrameJet>, Vec<usize>)> {
    let n = 2 * steps;
    let norms = NormFactors::from_initial(path.at(0.0))?;
    let mut tracker = BranchTracker::new();
    let mut jets = Vec::with_capacity(n + 1);
    let mut swaps = Vec::new();
    for j in 0..=n {
        let s = j as f64 / n as f64;
        let frame = EigenFrame::at(s, path.at(s), norms)?;
        let before = tracker.swaps().len();
        let frame = tracker.push(frame)?;
        if tracker.swaps().len() > before {
            swaps.push(j);
        }
        jets.push(FrameJet::new(frame, path.derivative(s)));
    }
    Ok((jets, swaps))
}

/// Samples the path and integrates `∫ A_aa` with per-step Simpson rule.
pub fn accumulate_phases(path: &ParameterPath, samples: usize) -> Result<PhaseTrack> {
    let (jets, swaps) = sample_jets(path, samples)?;
    PhaseTrack::from_jets(jets, swaps)
}

fn eta_from(frame: &EigenFrame, int_a: &[C64; 2]) -> Mat2 {
    [0, 1].map(|b| {
        [0, 1].map(|a| (-(int_a[a] + int_a[b].conj())).exp() * inner(&frame.r[b], &frame.r[a]))
    })
}

impl PhaseTrack {
    pub fn from_jets(jets: Vec<FrameJet>, swaps: Vec<usize>) -> Result<Self> {
        Self::from_jets_with(jets, swaps, |j| j.diagonal_generators())
    }

    /// As [`PhaseTrack::from_jets`], with the diagonal generators supplied by
    /// `generator` (used to inject faults into the self-check suite).
    pub fn from_jets_with<F>(jets: Vec<FrameJet>, swaps: Vec<usize>, generator: F) -> Result<Self>
    where
        F: Fn(&FrameJet) -> [C64; 2],
    {
        if jets.len() < 2 * MIN_PHASE_SAMPLES + 1 || jets.len() % 2 == 0 {
            return Err(Error::Config(format!(
                "phase accumulation needs at least {MIN_PHASE_SAMPLES} steps on a half-step grid"
            )));
        }
        let steps = (jets.len() - 1) / 2;
        let h = 1.0 / steps as f64;
        let gens: Vec<[C64; 2]> = jets.iter().map(&generator).collect();
        let mut half_int = vec![[ZERO; 2]; jets.len()];
        for k in 0..steps {
            let (a, m, b) = (gens[2 * k], gens[2 * k + 1], gens[2 * k + 2]);
            let prev = half_int[2 * k];
            for br in 0..2 {
                half_int[2 * k + 1][br] = prev[br] + (a[br] * 5.0 + m[br] * 8.0 - b[br]) * (h / 24.0);
                half_int[2 * k + 2][br] = prev[br] + (a[br] + m[br] * 4.0 + b[br]) * (h / 6.0);
            }
        }
        // refinement check: composite rule on the coarse grid alone
        let total = half_int[2 * steps];
        for br in 0..2 {
            let g = |k: usize| gens[2 * k][br];
            let coarse = if steps % 2 == 0 {
                (0..steps / 2).fold(ZERO, |acc, k| acc + (g(2 * k) + g(2 * k + 1) * 4.0 + g(2 * k + 2)) * (2.0 * h / 6.0))
            } else {
                (0..steps).fold(ZERO, |acc, k| acc + (g(k) + g(k + 1)) * (h / 2.0))
            };
            let change = (coarse - total[br]).norm();
            if !(change <= QUADRATURE_TOL * total[br].norm().max(1.0)) {
                return Err(Error::SamplingError { change });
            }
        }
        let accumulators = (0..=steps)
            .map(|k| {
                let jet = &jets[2 * k];
                let int_a = half_int[2 * k];
                PhaseAccumulator {
                    s: jet.s(),
                    int_a,
                    eta: eta_from(&jet.frame, &int_a),
                }
            })
            .collect();
        Ok(PhaseTrack {
            steps,
            jets,
            half_int,
            accumulators,
            swaps,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        1.0 / self.steps as f64
    }

    /// Jet at grid point `k ∈ 0..=steps`.
    pub fn jet(&self, k: usize) -> &FrameJet {
        &self.jets[2 * k]
    }

    /// Jet halfway between grid points `k` and `k + 1`.
    pub fn mid_jet(&self, k: usize) -> &FrameJet {
        &self.jets[2 * k + 1]
    }

    pub fn half_grid(&self) -> &[FrameJet] {
        &self.jets
    }

    pub fn accumulators(&self) -> &[PhaseAccumulator] {
        &self.accumulators
    }

    pub fn accumulator(&self, k: usize) -> &PhaseAccumulator {
        &self.accumulators[k]
    }

    /// `Â(s)` at grid point `k`.
    pub fn hat_generator(&self, k: usize) -> Mat2 {
        hat_generator(self.jet(k), &self.accumulators[k].int_a)
    }

    /// Parallel-transported frame at half-grid index `j`.
    pub fn transported_half(&self, j: usize) -> TransportedFrame {
        transport(&self.jets[j].frame, &self.half_int[j])
    }

    /// Parallel-transported frame at grid point `k`.
    pub fn transported(&self, k: usize) -> TransportedFrame {
        self.transported_half(2 * k)
    }
}

/// `Â_ab = ⟨l_a, e^{∫A_aa} d/ds(e^{−∫A_bb} r_b)⟩ = e^{∫A_aa − ∫A_bb}(A_ab − δ_ab A_bb)`.
pub fn hat_generator(jet: &FrameJet, int_a: &[C64; 2]) -> Mat2 {
    let a = jet.generators().0;
    [0, 1].map(|i| {
        [0, 1].map(|j| {
            if i == j {
                ZERO
            } else {
                (int_a[i] - int_a[j]).exp() * a[i][j]
            }
        })
    })
}

/// Summary of the η differential-equation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaDiagnostics {
    /// `max_s ‖dη/ds − (Â†η + ηÂ)‖_F`, with `dη/ds` by central differences.
    pub max_residual: f64,
    /// `max_s ‖Â‖_F`, a conditioning indicator for the exponentials inside Â.
    pub max_hat_norm: f64,
}

pub fn eta_diagnostics(track: &PhaseTrack) -> EtaDiagnostics {
    let h = track.step();
    let acc = track.accumulators();
    let mut out = EtaDiagnostics {
        max_residual: 0.0,
        max_hat_norm: 0.0,
    };
    for k in 0..=track.steps() {
        let hat = track.hat_generator(k);
        out.max_hat_norm = out.max_hat_norm.max(frobenius(&hat));
        if k == 0 || k == track.steps() {
            continue;
        }
        let d_eta = mat_scale(C64::new(0.5 / h, 0.0), &mat_sub(&acc[k + 1].eta, &acc[k - 1].eta));
        let eta = &acc[k].eta;
        let rhs = mat_add(&mat_mul(&adjoint(&hat), eta), &mat_mul(eta, &hat));
        out.max_residual = out.max_residual.max(frobenius(&mat_sub(&d_eta, &rhs)));
    }
    out
}

/// Consistency of sampled η with `dη/ds = Â†η + ηÂ`.
pub fn eta_evolution_residual(track: &PhaseTrack) -> f64 {
    eta_diagnostics(track).max_residual
}

/// η(s) propagated from η(0) by the s-ordered exponential of Â, built as a
/// product of per-step exponentials at the step midpoints.
pub fn eta_time_ordered(track: &PhaseTrack) -> Vec<Mat2> {
    let h = track.step();
    let eta0 = track.accumulator(0).eta;
    let mut u = IDENTITY;
    let mut out = Vec::with_capacity(track.steps() + 1);
    out.push(eta0);
    for k in 0..track.steps() {
        let j = 2 * k + 1;
        let hat = hat_generator(&track.jets[j], &track.half_int[j]);
        u = mat_mul(&u, &expm2(&mat_scale(C64::new(h, 0.0), &hat)));
        out.push(mat_mul(&mat_mul(&adjoint(&u), &eta0), &u));
    }
    out
}

type GaugeFn = dyn Fn(&FrameJet) -> [(C64, C64); 2] + Send + Sync;

/// Renormalization `r_a → λ_a r_a`, `l_a → l_a / conj(λ_a)` with `λ_a(0) = 1`.
#[derive(Clone)]
pub enum GaugeFunction {
    Identity,
    /// `λ_a(s) = exp(q_a(s))` with `q_a(s) = Σ_k c_k s^(k+1)`.
    ExpPolynomial([Vec<C64>; 2]),
    /// Unit Hermitian norm at every `s`.
    UnitNorm,
    /// Branch 1 expressed as `(γ1/β)(w, z − v)` with `β = w(0)/(z(0) + v(0))`.
    AlternativeBranch1 { beta: C64 },
    /// Arbitrary factors `[(λ_1, dλ_1/ds), (λ_2, dλ_2/ds)]` as a function of the jet.
    Custom(Arc<GaugeFn>),
}

impl fmt::Debug for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeFunction::Identity => write!(f, "Identity"),
            GaugeFunction::ExpPolynomial(c) => write!(f, "ExpPolynomial({c:?})"),
            GaugeFunction::UnitNorm => write!(f, "UnitNorm"),
            GaugeFunction::AlternativeBranch1 { beta } => write!(f, "AlternativeBranch1 {{ beta: {beta} }}"),
            GaugeFunction::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl GaugeFunction {
    /// The alternative branch-1 gauge anchored at the initial frame.
    pub fn alternative_branch1(initial: &EigenFrame) -> Self {
        let (plus, _) = initial.roots();
        GaugeFunction::AlternativeBranch1 {
            beta: initial.pair.w / plus,
        }
    }

    /// `[(λ_a, dλ_a/ds)]` at `jet`.
    pub fn factors(&self, jet: &FrameJet) -> [(C64, C64); 2] {
        let one = (C64::new(1.0, 0.0), ZERO);
        match self {
            GaugeFunction::Identity => [one, one],
            GaugeFunction::ExpPolynomial(coeffs) => [0, 1].map(|a| {
                let (q, dq) = poly_eval(&coeffs[a], jet.s());
                let lambda = q.exp();
                (lambda, lambda * dq)
            }),
            GaugeFunction::UnitNorm => [0, 1].map(|a| {
                let r = &jet.frame.r[a];
                let n2 = crate::linalg::norm_sq(r);
                let n = n2.sqrt();
                let dn2 = 2.0 * inner(r, &jet.dr[a]).re;
                (C64::new(1.0 / n, 0.0), C64::new(-0.5 * dn2 / (n2 * n), 0.0))
            }),
            GaugeFunction::AlternativeBranch1 { beta } => {
                let f = &jet.frame;
                let (plus, _) = f.roots();
                let dplus = jet.dr[0][0] / f.norms.gamma[0];
                let lambda = f.pair.w / (beta * plus);
                // d ln λ = ẇ/w − ṗ/p
                let dlambda = lambda * (jet.dpair.w / f.pair.w - dplus / plus);
                [(lambda, dlambda), one]
            }
            GaugeFunction::Custom(func) => func(jet),
        }
    }
}

fn poly_eval(coeffs: &[C64], s: f64) -> (C64, C64) {
    let mut q = ZERO;
    let mut dq = ZERO;
    let mut pow = 1.0;
    for (k, c) in coeffs.iter().enumerate() {
        dq += c * ((k as f64 + 1.0) * pow);
        pow *= s;
        q += c * pow;
    }
    (q, dq)
}

/// Applies a gauge to a sequence of jets (first jet at `s = 0`). The
/// transformed generators satisfy `Ã_aa = A_aa + d ln λ_a / ds`.
pub fn apply_gauge(jets: &[FrameJet], gauge: &GaugeFunction) -> Result<Vec<FrameJet>> {
    jets.iter()
        .enumerate()
        .map(|(idx, jet)| {
            let factors = gauge.factors(jet);
            let mut out = *jet;
            for (a, (lambda, dlambda)) in factors.into_iter().enumerate() {
                if !(lambda.norm() >= 1e-300) || !lambda.is_finite() {
                    return Err(Error::ZeroGauge { s: jet.s(), branch: a + 1 });
                }
                if idx == 0 && (lambda - 1.0).norm() > 1e-14 {
                    return Err(Error::GaugeNotNormalized {
                        branch: a + 1,
                        value: lambda.norm(),
                    });
                }
                let f = &jet.frame;
                out.frame.r[a] = scale(lambda, &f.r[a]);
                out.frame.l[a] = scale(lambda.conj().inv(), &f.l[a]);
                out.dr[a] = [
                    dlambda * f.r[a][0] + lambda * jet.dr[a][0],
                    dlambda * f.r[a][1] + lambda * jet.dr[a][1],
                ];
            }
            Ok(out)
        })
        .collect()
}

/// Eigenbasis rescaled by the phase exponentials:
/// `r̂_a = e^{−∫A_aa} r_a`, `l̂_a = e^{+conj ∫A_aa} l_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportedFrame {
    pub s: f64,
    pub r: [Vec2; 2],
    pub l: [Vec2; 2],
}

fn transport(frame: &EigenFrame, int_a: &[C64; 2]) -> TransportedFrame {
    TransportedFrame {
        s: frame.s,
        r: [0, 1].map(|a| scale((-int_a[a]).exp(), &frame.r[a])),
        l: [0, 1].map(|a| scale(int_a[a].conj().exp(), &frame.l[a])),
    }
}

pub fn parallel_transport_frames(track: &PhaseTrack) -> Vec<TransportedFrame> {
    (0..=track.steps()).map(|k| track.transported(k)).collect()
}

/// `max_s |⟨l̂_a, d r̂_a/ds⟩|` with the derivative taken by central
/// differences on the half-step grid.
pub fn parallel_transport_defect(track: &PhaseTrack) -> f64 {
    let n = track.half_grid().len();
    let dh = 0.5 * track.step();
    let mut worst: f64 = 0.0;
    for j in 1..n - 1 {
        let (prev, here, next) = (track.transported_half(j - 1), track.transported_half(j), track.transported_half(j + 1));
        for a in 0..2 {
            let d = [
                (next.r[a][0] - prev.r[a][0]) / (2.0 * dh),
                (next.r[a][1] - prev.r[a][1]) / (2.0 * dh),
            ];
            worst = worst.max(inner(&here.l[a], &d).norm());
        }
    }
    worst
}

/// Holonomy of the parallel transport around a closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Holonomy {
    /// `exp(−∮ A_aa ds)` along each tracked branch.
    pub factors: [C64; 2],
    /// Index of the initial eigenvector that each final eigenvector matches.
    pub matched: [usize; 2],
    /// Normalized overlaps `|⟨r_matched(0), r_a(1)⟩|`.
    pub overlaps: [f64; 2],
    /// `r̂_a(1) = ν_a r_matched(a)(0)`.
    pub nu: [C64; 2],
    /// True when the loop exchanged the branch labels.
    pub exchanged: bool,
}

pub fn holonomy_of(track: &PhaseTrack) -> Holonomy {
    let first = &track.jet(0).frame;
    let last_k = track.steps();
    let last = &track.jet(last_k).frame;
    let int_a = track.accumulator(last_k).int_a;
    let factors = [(-int_a[0]).exp(), (-int_a[1]).exp()];
    let mut matched = [0usize; 2];
    let mut overlaps = [0.0; 2];
    let mut nu = [ZERO; 2];
    for a in 0..2 {
        let o = [overlap(&first.r[0], &last.r[a]), overlap(&first.r[1], &last.r[a])];
        let m = if o[1] > o[0] { 1 } else { 0 };
        matched[a] = m;
        overlaps[a] = o[m];
        nu[a] = factors[a] * inner(&first.l[m], &last.r[a]);
    }
    Holonomy {
        factors,
        matched,
        overlaps,
        nu,
        exchanged: matched == [1, 0],
    }
}

/// Holonomy factors and branch exchange for a closed path.
pub fn loop_holonomy(path: &ParameterPath, samples: usize) -> Result<Holonomy> {
    if !path.closed() {
        return Err(Error::NotClosed);
    }
    Ok(holonomy_of(&accumulate_phases(path, samples)?))
}

/// Jet at an arbitrary `s` on the sheet root (no tracking).
pub fn jet_on_sheet(path: &ParameterPath, s: f64) -> Result<FrameJet> {
    let norms = NormFactors::from_initial(path.at(0.0))?;
    let p = path.at(s);
    jet_at(path, s, sheet_sqrt(p.w, p.z)?, norms)
}
