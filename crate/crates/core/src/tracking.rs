//! Population coefficients of a propagated state in the instantaneous
//! eigenbasis: naive (`c`), phase-corrected (`d`) and c-product (`e`).

use log::warn;

use crate::error::{Error, Result};
use crate::geometry::{FrameJet, PhaseAccumulator, PhaseTrack};
use crate::linalg::{bilinear, inner, mat_vec, norm_sq, scale, Mat2, Vec2, C64};
use crate::model::hamiltonian_derivative;
use crate::propagator::WaveState;
use crate::spectral::EigenFrame;

/// `|Re ∫A_aa|` above which `exp(∫A_aa)` leaves the double range.
pub const OVERFLOW_LIMIT: f64 = 700.0;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const SELF_ORTHOGONAL_TOL: f64 = 1e-12;
pub const GAP_TOL: f64 = 1e-10;

/// Biorthogonal projection `c_a = ⟨l_a, ψ⟩`.
pub fn decompose_c(psi: &WaveState, frame: &EigenFrame) -> [C64; 2] {
    [inner(&frame.l[0], &psi.psi), inner(&frame.l[1], &psi.psi)]
}

/// `d_a = exp(∫₀ˢ A_aa) c_a`.
pub fn decompose_d(psi: &WaveState, frame: &EigenFrame, acc: &PhaseAccumulator) -> Result<[C64; 2]> {
    let c = decompose_c(psi, frame);
    let mut d = c;
    for a in 0..2 {
        let re = acc.int_a[a].re;
        if re.abs() > OVERFLOW_LIMIT {
            return Err(Error::OverflowGuard {
                s: psi.s,
                branch: a + 1,
                value: re,
            });
        }
        d[a] = acc.int_a[a].exp() * c[a];
    }
    Ok(d)
}

/// Coefficients in the eigenbasis normalized by the c-product
/// `r_aᵀ r_a = 1`. The square root is continued from sample to sample and
/// each coefficient is divided by its `s = 0` value of `√(r_aᵀ r_a)`.
#[derive(Debug, Clone, Default)]
pub struct CProductNormalizer {
    roots: Option<[C64; 2]>,
    initial: [C64; 2],
}

impl CProductNormalizer {
    pub fn new() -> Self {
        Self::default()
    }

    /// `e = (r_1^cpᵀ ψ, r_2^cpᵀ ψ) / σ`. Frames must be fed in order of `s`.
    pub fn decompose(&mut self, psi: &WaveState, frame: &EigenFrame) -> Result<[C64; 2]> {
        let w = frame.pair.w;
        if w.im.abs() > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { s: frame.s, im_w: w.im });
        }
        let mut roots = [C64::new(0.0, 0.0); 2];
        for a in 0..2 {
            let q = bilinear(&frame.r[a], &frame.r[a]);
            if q.norm() < SELF_ORTHOGONAL_TOL * norm_sq(&frame.r[a]) {
                return Err(Error::SelfOrthogonal { s: frame.s, branch: a + 1 });
            }
            let root = q.sqrt();
            roots[a] = match &self.roots {
                // flip whenever the root would jump by more than π/2 in phase
                Some(prev) if (root * prev[a].conj()).re < 0.0 => -root,
                _ => root,
            };
        }
        if self.roots.is_none() {
            self.initial = roots;
        }
        self.roots = Some(roots);
        Ok([0, 1].map(|a| {
            let cp = scale(roots[a].inv(), &frame.r[a]);
            bilinear(&cp, &psi.psi) / self.initial[a]
        }))
    }
}

/// Single-sample [`CProductNormalizer`] result, valid when `frame` is the
/// initial frame of the path.
pub fn decompose_e(psi: &WaveState, frame: &EigenFrame) -> Result<[C64; 2]> {
    CProductNormalizer::new().decompose(psi, frame)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationRecord {
    pub s: f64,
    pub c: [C64; 2],
    pub d: [C64; 2],
    pub e: Option<[C64; 2]>,
    /// `D†ηD / D†D`.
    pub alpha: f64,
    /// `‖ψ‖²` computed directly.
    pub norm_sq: f64,
    pub eta: Mat2,
}

impl PopulationRecord {
    pub fn new(psi: &WaveState, frame: &EigenFrame, acc: &PhaseAccumulator, e: Option<[C64; 2]>) -> Result<Self> {
        let c = decompose_c(psi, frame);
        let d = decompose_d(psi, frame, acc)?;
        let dd = d[0].norm_sqr() + d[1].norm_sqr();
        let alpha = if dd > 0.0 { eta_norm(&acc.eta, &d) / dd } else { f64::NAN };
        Ok(PopulationRecord {
            s: psi.s,
            c,
            d,
            e,
            alpha,
            norm_sq: psi.norm_sq(),
            eta: acc.eta,
        })
    }

    /// `D†ηD`, the norm of ψ reconstructed through η.
    pub fn eta_norm_sq(&self) -> f64 {
        eta_norm(&self.eta, &self.d)
    }

    /// `|x_2 / x_1|` for the `c` and `d` conventions.
    pub fn ratios_21(&self) -> (f64, f64) {
        (self.c[1].norm() / self.c[0].norm(), self.d[1].norm() / self.d[0].norm())
    }
}

fn eta_norm(eta: &Mat2, d: &[C64; 2]) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for b in 0..2 {
        for a in 0..2 {
            acc += d[b].conj() * eta[b][a] * d[a];
        }
    }
    acc.re
}

/// `(α|d_1|², α|d_2|²)`, which sum to `D†ηD`.
pub fn consistent_population(record: &PopulationRecord) -> Result<[f64; 2]> {
    let dd = record.d[0].norm_sqr() + record.d[1].norm_sqr();
    if !(dd >= 1e-300) {
        return Err(Error::ZeroState { s: record.s });
    }
    let alpha = record.eta_norm_sq() / dd;
    Ok([alpha * record.d[0].norm_sqr(), alpha * record.d[1].norm_sqr()])
}

/// Gauge-invariant non-adiabatic coupling strengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticCriterion {
    /// `[exp Re(∫A_22 − ∫A_11)·|A_21|, exp Re(∫A_11 − ∫A_22)·|A_12|]`.
    pub crit: [f64; 2],
    /// Same with `A_21 = ⟨l_2, Ḣ r_1⟩/(E_1 − E_2)` and its mirror.
    pub dh_form: [f64; 2],
}

pub fn adiabatic_criterion(jet: &FrameJet, acc: &PhaseAccumulator) -> Result<AdiabaticCriterion> {
    let f = &jet.frame;
    let gap = f.e[0] - f.e[1];
    if gap.norm() < GAP_TOL {
        return Err(Error::GapCollapse { s: f.s, gap: gap.norm() });
    }
    let a = jet.generators().0;
    let dh = hamiltonian_derivative(jet.dpair);
    let a21 = inner(&f.l[1], &mat_vec(&dh, &f.r[0])) / gap;
    let a12 = inner(&f.l[0], &mat_vec(&dh, &f.r[1])) / (-gap);
    let w21 = (acc.int_a[1] - acc.int_a[0]).re.exp();
    let w12 = (acc.int_a[0] - acc.int_a[1]).re.exp();
    Ok(AdiabaticCriterion {
        crit: [w21 * a[1][0].norm(), w12 * a[0][1].norm()],
        dh_form: [w21 * a21.norm(), w12 * a12.norm()],
    })
}

/// Limits for [`false_artifact_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtifactThresholds {
    /// Naive ratio above which state 1 looks inverted.
    pub inversion_c: f64,
    /// Corrected ratio below which state 1 is still dominant.
    pub inversion_d: f64,
    /// Naive ratio below which state 2 looks perfectly adiabatic.
    pub adiabatic_c: f64,
    /// Final corrected ratio range meaning both states are comparable.
    pub adiabatic_d: (f64, f64),
}

impl Default for ArtifactThresholds {
    fn default() -> Self {
        ArtifactThresholds {
            inversion_c: 1.0,
            inversion_d: 0.1,
            adiabatic_c: 0.01,
            adiabatic_d: (0.3, 3.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtifactReport {
    /// Branch dominating the initial state (1 or 2).
    pub initial_branch: usize,
    /// `max_s |c_other / c_initial|`.
    pub max_ratio_c: f64,
    /// `max_s |d_other / d_initial|`.
    pub max_ratio_d: f64,
    /// `|d_other / d_initial|` at the last sample.
    pub final_ratio_d: f64,
    pub false_inversion: bool,
    pub false_adiabaticity: bool,
}

impl ArtifactReport {
    pub fn flags(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.false_inversion {
            out.push("FALSE_INVERSION");
        }
        if self.false_adiabaticity {
            out.push("FALSE_ADIABATICITY");
        }
        out
    }
}

pub fn false_artifact_report(records: &[PopulationRecord], th: &ArtifactThresholds) -> Option<ArtifactReport> {
    let first = records.first()?;
    let last = records.last()?;
    let init = if first.d[0].norm() >= first.d[1].norm() { 0 } else { 1 };
    let other = 1 - init;
    let ratio = |x: &[C64; 2]| x[other].norm() / x[init].norm();
    let max_ratio_c = records.iter().map(|r| ratio(&r.c)).fold(0.0, f64::max);
    let max_ratio_d = records.iter().map(|r| ratio(&r.d)).fold(0.0, f64::max);
    let final_ratio_d = ratio(&last.d);
    let inverse_final = final_ratio_d.recip();
    Some(ArtifactReport {
        initial_branch: init + 1,
        max_ratio_c,
        max_ratio_d,
        final_ratio_d,
        false_inversion: init == 0 && max_ratio_c > th.inversion_c && max_ratio_d < th.inversion_d,
        false_adiabaticity: init == 1
            && max_ratio_c < th.adiabatic_c
            && (th.adiabatic_d.0..=th.adiabatic_d.1).contains(&inverse_final),
    })
}

/// A propagated state together with its decompositions at every grid point.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<WaveState>,
    pub track: PhaseTrack,
    pub records: Vec<PopulationRecord>,
    pub criteria: Vec<Option<AdiabaticCriterion>>,
    /// Why the `e` coefficients are absent, if they are.
    pub e_absent: Option<Error>,
}

impl Trajectory {
    /// Decomposes `states` (one per grid point of `track`).
    pub fn from_parts(states: Vec<WaveState>, track: PhaseTrack) -> Result<Self> {
        if states.len() != track.steps() + 1 {
            return Err(Error::Config(format!(
                "{} states for {} phase samples",
                states.len(),
                track.steps() + 1
            )));
        }
        let mut normalizer = CProductNormalizer::new();
        let mut e_absent = None;
        let mut records = Vec::with_capacity(states.len());
        let mut criteria = Vec::with_capacity(states.len());
        for (k, psi) in states.iter().enumerate() {
            let jet = track.jet(k);
            let acc = track.accumulator(k);
            let e = if e_absent.is_none() {
                match normalizer.decompose(psi, &jet.frame) {
                    Ok(e) => Some(e),
                    Err(err @ (Error::NotSymmetric { .. } | Error::SelfOrthogonal { .. })) => {
                        e_absent = Some(err);
                        None
                    }
                    Err(err) => return Err(err),
                }
            } else {
                None
            };
            records.push(PopulationRecord::new(psi, &jet.frame, acc, e)?);
            criteria.push(adiabatic_criterion(jet, acc).ok());
        }
        if e_absent.is_some() {
            // a convention that fails part-way is dropped for the whole path
            for r in &mut records {
                r.e = None;
            }
        }
        for r in &records {
            let slack = 1.0 - (r.d[0].norm_sqr() + r.d[1].norm_sqr());
            if slack < -1e-8 {
                warn!("1 - |d1|^2 - |d2|^2 = {slack:e} at s = {}", r.s);
                break;
            }
        }
        Ok(Trajectory {
            states,
            track,
            records,
            criteria,
            e_absent,
        })
    }

    pub fn final_record(&self) -> &PopulationRecord {
        self.records.last().expect("trajectory has at least one sample")
    }

    pub fn frame(&self, k: usize) -> &EigenFrame {
        &self.track.jet(k).frame
    }
}

/// `ψ − c_1 r_1 − c_2 r_2`.
pub fn reconstruction_residual(psi: &Vec2, frame: &EigenFrame, c: &[C64; 2]) -> f64 {
    let rec = [0, 1].map(|i| c[0] * frame.r[0][i] + c[1] * frame.r[1][i]);
    ((psi[0] - rec[0]).norm_sqr() + (psi[1] - rec[1]).norm_sqr()).sqrt()
}
