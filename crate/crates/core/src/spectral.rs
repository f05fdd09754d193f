//! Closed-form biorthogonal eigensystem of `H(w, z)`.
//!
//! With `v² = |w|² + z²` the eigenvalues are `E1 = z − v` and `E2 = z + v`,
//! right eigenvectors `r1 = γ1 (z + v, −w̄)`, `r2 = γ2 (z − v, −w̄)` and the
//! left (biorthogonal) partners follow from `H† = H(w, z̄)`. The smaller of
//! `z ± v` is always evaluated as `−|w|² / (larger)`, so the eigenvector
//! family that collapses as `|w| → 0` stays accurate down to `|w|² ≪ ε|z|²`.

use log::warn;

use crate::error::{Error, Result};
use crate::linalg::{inner, mat_vec, overlap, scale, Vec2, C64};
use crate::model::{hamiltonian_at, ComplexPair};

/// `|w|² + z²` below this is reported as an exceptional point by [`sheet_sqrt`].
pub const SHEET_EP_TOL: f64 = 1e-14;
/// Exclusion radius in `||w|² + z²|` for frame construction.
pub const EP_EXCLUSION: f64 = 1e-7;
/// Minimum ratio between the rejected and accepted matching costs.
pub const BRANCH_MARGIN: f64 = 2.0;

/// `v = z √(1 + |w|²/z²)` with the principal root, so that `v → z` as
/// `|w| → 0`. On the branch cut (`1 + |w|²/z²` negative real) the signed
/// zero of the imaginary part is canonicalized to `+0`, which picks the
/// root continuous with `Im(z²) < 0`. For `z = 0` the positive root of
/// `|w|²` is returned.
pub fn sheet_sqrt(w: C64, z: C64) -> Result<C64> {
    let w_sq = w.norm_sqr();
    let v_sq = z * z + w_sq;
    if v_sq.norm() < SHEET_EP_TOL {
        return Err(Error::EpDegenerate {
            s: f64::NAN,
            magnitude: v_sq.norm(),
        });
    }
    if z == C64::new(0.0, 0.0) {
        return Ok(C64::new(w_sq.sqrt(), 0.0));
    }
    let mut q = C64::new(1.0, 0.0) + w_sq / (z * z);
    if q.im == 0.0 {
        q.im = 0.0;
    }
    Ok(z * q.sqrt())
}

/// `(z + v, z − v)` with the small member obtained from `(z+v)(z−v) = −|w|²`.
fn stable_roots(w: C64, z: C64, v: C64) -> (C64, C64) {
    let w_sq = w.norm_sqr();
    let (p, m) = (z + v, z - v);
    if p.norm() >= m.norm() {
        (p, -w_sq / p)
    } else {
        (-w_sq / m, m)
    }
}

/// Initial-norm factors `γ1, γ2`, frozen for a whole path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormFactors {
    pub gamma: [f64; 2],
}

impl NormFactors {
    /// Factors that give unit norm at `init` on the sheet root.
    pub fn from_initial(init: ComplexPair) -> Result<Self> {
        let v = sheet_sqrt(init.w, init.z).map_err(|e| with_s(e, 0.0))?;
        Self::with_root(init, v)
    }

    pub fn with_root(init: ComplexPair, v: C64) -> Result<Self> {
        let (p, m) = stable_roots(init.w, init.z, v);
        let w_sq = init.w.norm_sqr();
        let n1 = p.norm_sqr() + w_sq;
        let n2 = m.norm_sqr() + w_sq;
        if n1 == 0.0 {
            return Err(Error::ZeroDenominator { s: 0.0, sign: '+' });
        }
        if n2 == 0.0 {
            return Err(Error::ZeroDenominator { s: 0.0, sign: '-' });
        }
        Ok(NormFactors {
            gamma: [1.0 / n1.sqrt(), 1.0 / n2.sqrt()],
        })
    }
}

/// Instantaneous eigensystem at one point of a path. Index 0 is branch 1,
/// index 1 is branch 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenFrame {
    pub s: f64,
    pub pair: ComplexPair,
    pub v: C64,
    pub e: [C64; 2],
    pub r: [Vec2; 2],
    pub l: [Vec2; 2],
    pub norms: NormFactors,
    plus: C64,
    minus: C64,
}

impl EigenFrame {
    /// Frame on an explicitly chosen root `v` of `|w|² + z²`.
    pub fn on_root(s: f64, pair: ComplexPair, v: C64, norms: NormFactors) -> Result<Self> {
        let ComplexPair { w, z } = pair;
        let v_sq = z * z + w.norm_sqr();
        if v_sq.norm() < EP_EXCLUSION {
            return Err(Error::EpDegenerate {
                s,
                magnitude: v_sq.norm(),
            });
        }
        let (p, m) = stable_roots(w, z, v);
        if (v * p).norm() < f64::MIN_POSITIVE {
            return Err(Error::ZeroDenominator { s, sign: '+' });
        }
        if (v * m).norm() < f64::MIN_POSITIVE {
            return Err(Error::ZeroDenominator { s, sign: '-' });
        }
        let [g1, g2] = norms.gamma;
        let wc = w.conj();
        let r1 = [p * g1, -wc * g1];
        let r2 = [m * g2, -wc * g2];
        // |1*⟩ = (p̄, −w̄) / (2 v̄ p̄ γ1),  |2*⟩ = (m̄, −w̄) / (−2 v̄ m̄ γ2)
        let k1 = (v * p * 2.0 * g1).inv().conj();
        let k2 = (v * m * (-2.0) * g2).inv().conj();
        let l1 = [k1 * p.conj(), -k1 * wc];
        let l2 = [k2 * m.conj(), -k2 * wc];
        Ok(EigenFrame {
            s,
            pair,
            v,
            e: [m, p],
            r: [r1, r2],
            l: [l1, l2],
            norms,
            plus: p,
            minus: m,
        })
    }

    /// Frame on the sheet root at `pair`.
    pub fn at(s: f64, pair: ComplexPair, norms: NormFactors) -> Result<Self> {
        let v = sheet_sqrt(pair.w, pair.z).map_err(|e| with_s(e, s))?;
        Self::on_root(s, pair, v, norms)
    }

    /// The same eigensystem with the two branch labels exchanged (`v → −v`).
    pub fn relabeled(&self) -> Result<Self> {
        Self::on_root(self.s, self.pair, -self.v, self.norms)
    }

    /// `(z + v, z − v)` as evaluated stably.
    pub fn roots(&self) -> (C64, C64) {
        (self.plus, self.minus)
    }

    /// Exact `d r_a / ds` for parameter velocity `dp = (ẇ, ż)`.
    pub fn right_derivatives(&self, dp: ComplexPair) -> [Vec2; 2] {
        let ComplexPair { w, z } = self.pair;
        let (p, m, v) = (self.plus, self.minus, self.v);
        let dw_sq = C64::new(2.0 * (w.conj() * dp.w).re, 0.0);
        let dv = (dw_sq + z * dp.z * 2.0) / (v * 2.0);
        // (z+v)(z−v) = −|w|²  ⇒  ṗ m + p ṁ = −d|w|²
        let (dplus, dminus) = if p.norm() >= m.norm() {
            let dplus = dp.z + dv;
            (dplus, (-dw_sq - m * dplus) / p)
        } else {
            let dminus = dp.z - dv;
            ((-dw_sq - p * dminus) / m, dminus)
        };
        let [g1, g2] = self.norms.gamma;
        let dwc = dp.w.conj();
        [[dplus * g1, -dwc * g1], [dminus * g2, -dwc * g2]]
    }

    /// `‖H r_a − E_a r_a‖` for both branches.
    pub fn residuals(&self) -> [f64; 2] {
        let h = hamiltonian_at(self.pair);
        [0, 1].map(|a| {
            let hr = mat_vec(&h, &self.r[a]);
            let er = scale(self.e[a], &self.r[a]);
            ((hr[0] - er[0]).norm_sqr() + (hr[1] - er[1]).norm_sqr()).sqrt()
        })
    }

    /// Matrix `⟨l_a, r_b⟩`, the identity for a valid frame.
    pub fn biorthogonality(&self) -> [[C64; 2]; 2] {
        [0, 1].map(|a| [0, 1].map(|b| inner(&self.l[a], &self.r[b])))
    }
}

fn with_s(e: Error, s: f64) -> Error {
    match e {
        Error::EpDegenerate { magnitude, .. } => Error::EpDegenerate { s, magnitude },
        other => other,
    }
}

/// Frame on the sheet root, with norm factors taken from `init`.
pub fn eigenframe(p: ComplexPair, init: ComplexPair) -> Result<EigenFrame> {
    EigenFrame::at(0.0, p, NormFactors::from_initial(init)?)
}

/// Sequential fold enforcing continuity of branch labels between samples.
#[derive(Debug, Default, Clone)]
pub struct BranchTracker {
    previous: Option<EigenFrame>,
    swaps: Vec<f64>,
    warned_dissipation: bool,
}

impl BranchTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reported `s` values where the incoming frame had to be relabeled.
    pub fn swaps(&self) -> &[f64] {
        &self.swaps
    }

    pub fn push(&mut self, frame: EigenFrame) -> Result<EigenFrame> {
        let frame = match &self.previous {
            None => frame,
            Some(prev) => {
                if Self::should_swap(prev, &frame)? {
                    self.swaps.push(frame.s);
                    frame.relabeled()?
                } else {
                    frame
                }
            }
        };
        if !self.warned_dissipation && frame.v.im > 1e-12 {
            warn!(
                "Im(E2 - E1) > 0 at s = {}: branch 1 is no longer the less dissipative one; keeping continuity labels",
                frame.s
            );
            self.warned_dissipation = true;
        }
        self.previous = Some(frame);
        Ok(frame)
    }

    fn should_swap(prev: &EigenFrame, next: &EigenFrame) -> Result<bool> {
        let keep = (next.e[0] - prev.e[0]).norm() + (next.e[1] - prev.e[1]).norm();
        let swap = (next.e[0] - prev.e[1]).norm() + (next.e[1] - prev.e[0]).norm();
        if margin(keep, swap) >= BRANCH_MARGIN {
            return Ok(swap < keep);
        }
        // eigenvalues too close to decide: fall back on eigenvector overlap
        let keep_ov = overlap(&prev.r[0], &next.r[0]) + overlap(&prev.r[1], &next.r[1]);
        let swap_ov = overlap(&prev.r[0], &next.r[1]) + overlap(&prev.r[1], &next.r[0]);
        let ov_margin = margin(2.0 - keep_ov, 2.0 - swap_ov);
        if ov_margin < BRANCH_MARGIN {
            return Err(Error::AmbiguousBranch {
                s: next.s,
                margin: margin(keep, swap).min(ov_margin),
            });
        }
        Ok(swap_ov > keep_ov)
    }
}

fn margin(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if lo == 0.0 {
        if hi == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        hi / lo
    }
}

#[derive(Debug, Clone)]
pub struct TrackedFrames {
    pub frames: Vec<EigenFrame>,
    /// Indices of frames whose labels were exchanged.
    pub swaps: Vec<usize>,
}

/// Relabels an ordered sequence of frames so each branch is continuous in `s`.
pub fn track_branches(frames: Vec<EigenFrame>) -> Result<TrackedFrames> {
    let mut tracker = BranchTracker::new();
    let mut out = Vec::with_capacity(frames.len());
    let mut swaps = Vec::new();
    for (k, f) in frames.into_iter().enumerate() {
        let before = tracker.swaps().len();
        out.push(tracker.push(f)?);
        if tracker.swaps().len() > before {
            swaps.push(k);
        }
    }
    Ok(TrackedFrames { frames: out, swaps })
}

/// Distance in the `(Ω, Δ) = (|w|, Re z)` plane to the nearer of the two
/// exceptional points `(±Γ/4, 0)`.
pub fn ep_distance(p: ComplexPair, gamma: f64) -> f64 {
    let omega = p.w.norm();
    let delta = p.z.re;
    let q = gamma / 4.0;
    (omega - q).hypot(delta).min((omega + q).hypot(delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{bilinear, frobenius, norm, ZERO};
    use crate::model::{ep_loop_path, gaussian_pulse_path};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sheet_reduces_to_z_without_coupling() {
        let z = c(0.3, -0.1);
        assert_eq!(sheet_sqrt(ZERO, z).unwrap(), z);
    }

    #[test]
    fn sheet_fails_at_exceptional_point() {
        for gamma in [0.1, 0.5, 2.0] {
            let err = sheet_sqrt(c(gamma / 4.0, 0.0), c(0.0, -gamma / 4.0)).unwrap_err();
            assert_eq!(err.code(), "EP_DEGENERATE");
        }
    }

    /// Continue `v(τ) = √(τ²|w|² + z²)` from `v(0) = z` by nearest-root steps.
    fn continued_root(w: C64, z: C64) -> C64 {
        let mut v = z;
        let n = 100_000;
        for k in 1..=n {
            let t = k as f64 / n as f64;
            let cand = (z * z + t * t * w.norm_sqr()).sqrt();
            v = if (cand - v).norm() < (-cand - v).norm() { cand } else { -cand };
        }
        v
    }

    #[test]
    fn sheet_is_continuous_with_uncoupled_limit() {
        for (w, z) in [
            (c(1.0, 0.0), c(0.5, -0.025)),
            (c(0.3, 0.2), c(-0.4, -0.1)),
            (c(0.1, 0.0), c(0.0, -0.5)),
        ] {
            let v = sheet_sqrt(w, z).unwrap();
            assert!((v * v - (z * z + w.norm_sqr())).norm() < 1e-14);
            assert!((v - continued_root(w, z)).norm() < 1e-10, "w={w} z={z}");
        }
    }

    #[test]
    fn sheet_on_cut_picks_positive_real_root() {
        // start of the EP loop: z = −iΓ/4 with Ω > Γ/4
        let v = sheet_sqrt(c(0.245, 0.0), c(0.0, -0.125)).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-15);
        let v = sheet_sqrt(c(0.245, 0.0), c(-0.0, -0.125)).unwrap();
        assert!(v.re > 0.0);
    }

    #[test]
    fn symmetric_real_frame() {
        let p = ComplexPair::new(c(1.0, 0.0), ZERO);
        let f = eigenframe(p, p).unwrap();
        assert_eq!(f.v, c(1.0, 0.0));
        assert_eq!(f.e, [c(-1.0, 0.0), c(1.0, 0.0)]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f.r[0][0] - c(h, 0.0)).norm() < 1e-15 && (f.r[0][1] - c(-h, 0.0)).norm() < 1e-15);
        assert!((f.r[1][0] - c(-h, 0.0)).norm() < 1e-15 && (f.r[1][1] - c(-h, 0.0)).norm() < 1e-15);
        let b = f.biorthogonality();
        assert!((b[0][0] - 1.0).norm() < 1e-15 && (b[1][1] - 1.0).norm() < 1e-15);
        assert!(b[0][1].norm() < 1e-15 && b[1][0].norm() < 1e-15);
    }

    #[test]
    fn weak_coupling_limit() {
        let z = c(0.4, 0.0);
        let p = ComplexPair::new(c(1e-9, 0.0), z);
        let f = eigenframe(p, p).unwrap();
        assert!(f.e[0].norm() < 1e-17);
        assert!((f.e[1] - z * 2.0).norm() < 1e-15);
        assert!((f.r[0][0] - 1.0).norm() < 1e-15 && f.r[0][1].norm() < 1e-8);
        assert!(f.residuals().iter().all(|&x| x < 1e-15));
    }

    #[test]
    fn gaussian_start_frame_residual() {
        let p = ComplexPair::new(c(1.0, 0.0), c(0.5, -0.025));
        let f = eigenframe(p, p).unwrap();
        let h_norm = frobenius(&hamiltonian_at(p));
        for a in 0..2 {
            assert!(f.residuals()[a] <= 1e-12 * h_norm * norm(&f.r[a]));
            assert!((norm(&f.r[a]) - 1.0).abs() < 1e-12);
        }
        // branch 1 is the less dissipative
        assert!((f.e[1] - f.e[0]).im < 0.0);
    }

    #[test]
    fn collapsing_family_stays_biorthogonal_at_pulse_end() {
        let path = gaussian_pulse_path(1.0, 0.5, 0.1, 0.16, 100.0).unwrap();
        let norms = NormFactors::from_initial(path.at(0.0)).unwrap();
        let f = EigenFrame::at(1.0, path.at(1.0), norms).unwrap();
        let b = f.biorthogonality();
        for a in 0..2 {
            for bb in 0..2 {
                let want = if a == bb { 1.0 } else { 0.0 };
                assert!((b[a][bb] - want).norm() < 1e-10, "{b:?}");
            }
        }
        // r2 shrinks like |w|
        assert!(norm(&f.r[1]) < 1e-8 && norm(&f.r[1]) > 1e-10);
    }

    #[test]
    fn exact_zero_coupling_is_a_zero_denominator() {
        let norms = NormFactors::from_initial(ComplexPair::new(c(1.0, 0.0), c(0.5, 0.0))).unwrap();
        let err = EigenFrame::at(0.5, ComplexPair::new(ZERO, c(0.5, 0.0)), norms).unwrap_err();
        assert_eq!(err.code(), "ZERO_DENOMINATOR");
    }

    #[test]
    fn constant_path_tracking_is_identity() {
        let p = ComplexPair::new(c(0.3, 0.1), c(0.2, -0.05));
        let norms = NormFactors::from_initial(p).unwrap();
        let frames: Vec<_> = (0..50).map(|k| EigenFrame::at(k as f64 / 49.0, p, norms).unwrap()).collect();
        let tracked = track_branches(frames.clone()).unwrap();
        assert!(tracked.swaps.is_empty());
        assert_eq!(tracked.frames, frames);
    }

    #[test]
    fn tracker_repairs_injected_swap() {
        let p = ComplexPair::new(c(0.6, 0.0), c(0.5, -0.05));
        let norms = NormFactors::from_initial(p).unwrap();
        let mut frames: Vec<_> = (0..20).map(|k| EigenFrame::at(k as f64 / 19.0, p, norms).unwrap()).collect();
        let clean = frames.clone();
        frames[7] = frames[7].relabeled().unwrap();
        assert_ne!(frames[7].e, clean[7].e);
        let tracked = track_branches(frames).unwrap();
        assert_eq!(tracked.swaps, vec![7]);
        for (a, b) in tracked.frames.iter().zip(&clean) {
            assert!((a.e[0] - b.e[0]).norm() < 1e-15 && (a.r[1][0] - b.r[1][0]).norm() < 1e-15);
        }
    }

    #[test]
    fn ep_loop_exchanges_branches_after_one_turn() {
        let path = ep_loop_path(0.5, 0.0, 100.0).unwrap();
        let norms = NormFactors::from_initial(path.at(0.0)).unwrap();
        let n = 10_000;
        let frames: Vec<_> = (0..=n)
            .map(|k| {
                let s = k as f64 / n as f64;
                EigenFrame::at(s, path.at(s), norms).unwrap()
            })
            .collect();
        let tracked = track_branches(frames).unwrap();
        let (first, last) = (&tracked.frames[0], tracked.frames.last().unwrap());
        assert!((last.e[0] - first.e[1]).norm() < 1e-9);
        assert!((last.e[1] - first.e[0]).norm() < 1e-9);
        assert!(overlap(&last.r[0], &first.r[1]) > 1.0 - 1e-12);
        assert!(overlap(&last.r[1], &first.r[0]) > 1.0 - 1e-12);
        // branch 1 stays the less dissipative one along the loop
        assert!(tracked.frames.iter().all(|f| f.v.im <= 1e-12));
    }

    #[test]
    fn ambiguous_matching_is_reported() {
        let norms = NormFactors { gamma: [1.0, 1.0] };
        let a = EigenFrame::at(0.0, ComplexPair::new(c(1.0, 0.0), ZERO), norms).unwrap();
        // eigenvalues near the midpoint and eigenvectors at 45° to both old ones
        let b = EigenFrame::at(0.1, ComplexPair::new(c(0.0, 0.01), ZERO), norms).unwrap();
        let mut t = BranchTracker::new();
        t.push(a).unwrap();
        let err = t.push(b).unwrap_err();
        assert_eq!(err.code(), "AMBIGUOUS_BRANCH");
    }

    #[test]
    fn ep_distance_examples() {
        let g = 0.5;
        assert_eq!(ep_distance(ComplexPair::from_physical(g / 4.0, 0.0, 0.0, g), g), 0.0);
        assert!((ep_distance(ComplexPair::from_physical(0.0, 0.0, 0.0, g), g) - g / 4.0).abs() < 1e-16);
        let path = ep_loop_path(g, 0.0, 100.0).unwrap();
        let n = 100_000;
        let min = (0..=n)
            .map(|k| ep_distance(path.at(k as f64 / n as f64), g))
            .fold(f64::INFINITY, f64::min);
        assert!((min - 0.24 * g).abs() < 1e-12);
    }

    fn pair_strategy() -> impl Strategy<Value = ComplexPair> {
        (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)
            .prop_map(|(a, b, x, y)| ComplexPair::new(c(a, b), c(x, y)))
            .prop_filter("outside EP neighbourhood", |p| {
                p.w.norm() <= 10.0 && p.z.norm() <= 10.0 && (p.z * p.z + p.w.norm_sqr()).norm() > 1e-6
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn frame_invariants(p in pair_strategy()) {
            let f = eigenframe(p, p).unwrap();
            let h_norm = frobenius(&hamiltonian_at(p));
            for a in 0..2 {
                prop_assert!(f.residuals()[a] <= 1e-12 * h_norm.max(1e-300) * norm(&f.r[a]) + 1e-300);
                prop_assert!((norm(&f.r[a]) - 1.0).abs() < 1e-12);
            }
            let b = f.biorthogonality();
            prop_assert!((b[0][0] - 1.0).norm() < 1e-10 && (b[1][1] - 1.0).norm() < 1e-10);
            prop_assert!(b[0][1].norm() < 1e-10 && b[1][0].norm() < 1e-10);
            // completeness: Σ_a r_a ⟨l_a, x⟩ = x on the canonical basis
            for e in [[c(1.0, 0.0), ZERO], [ZERO, c(1.0, 0.0)]] {
                let mut sum = [ZERO; 2];
                for a in 0..2 {
                    let k = inner(&f.l[a], &e);
                    sum[0] += k * f.r[a][0];
                    sum[1] += k * f.r[a][1];
                }
                prop_assert!((sum[0] - e[0]).norm() < 1e-10 && (sum[1] - e[1]).norm() < 1e-10);
            }
        }

        #[test]
        fn symmetric_left_vectors_are_conjugates(a in -10.0..10.0f64, x in -10.0..10.0f64, y in -10.0..10.0f64) {
            let p = ComplexPair::new(c(a, 0.0), c(x, y));
            prop_assume!((p.z * p.z + p.w.norm_sqr()).norm() > 1e-6);
            let f = eigenframe(p, p).unwrap();
            for br in 0..2 {
                let conj_r = [f.r[br][0].conj(), f.r[br][1].conj()];
                // l ∥ r̄  ⇔  bilinear cross-term vanishes
                let cross = f.l[br][0] * conj_r[1] - f.l[br][1] * conj_r[0];
                prop_assert!(cross.norm() < 1e-10 * norm(&f.l[br]) * norm(&conj_r));
            }
            let _ = bilinear(&f.r[0], &f.r[1]);
        }

        #[test]
        fn sheet_is_continuous_along_refined_paths(t in 0.05..0.95f64) {
            let path = gaussian_pulse_path(1.0, 0.5, 0.1, 0.16, 100.0).unwrap();
            let v = |s: f64| { let p = path.at(s); sheet_sqrt(p.w, p.z).unwrap() };
            let d1 = (v(t + 1e-4) - v(t)).norm();
            let d2 = (v(t + 1e-5) - v(t)).norm();
            prop_assert!(d2 < 0.2 * d1 + 1e-15);
        }
    }
}
