//! Closed-form expressions for the protocol's success statistics, numeric
//! solvers for the optimal emission probability and the rate crossover, and
//! grid sweeps that pair the exact simulation with the closed forms.

use rayon::prelude::*;

use crate::error::{SimError, SimResult};
use crate::fock::Ensemble;
use crate::optics::LossChannel;
use crate::protocol::{
    alpha_balanced, enumerate_patterns, measurement_operator, prepare_aux, prepare_initial_lossy,
    prepare_source, DetectorModel, HeraldedOutcome, MeasurementOperator, Node, ProtocolParams,
    ZERO_PROBABILITY,
};

/// Success probability of a single coincidence with balanced auxiliary
/// amplitude and number-resolving detectors, no loss:
/// `(3/16) p² (1−p)² / (5p² − 8p + 4)`.
pub fn analytic_ps_pattern(p: f64) -> f64 {
    analytic_ps_total(p) / 16.0
}

/// Total heralding probability over all sixteen coincidences with balanced
/// auxiliary amplitude and number-resolving detectors, no loss:
/// `3 p² (1−p)² / (5p² − 8p + 4)`.
pub fn analytic_ps_total(p: f64) -> f64 {
    let q = 1.0 - p;
    3.0 * p * p * q * q / (5.0 * p * p - 8.0 * p + 4.0)
}

/// Entanglement distributed per attempt by a heralded qutrit pair:
/// `log₂3 · P_s(p)` bits.
pub fn rate_qutrit(p: f64) -> f64 {
    3f64.log2() * analytic_ps_total(p)
}

/// Rate of the two-photon-coincidence qubit scheme, `η² p² / 2` bits per
/// attempt: both photons must survive.
pub fn rate_type2(p: f64, eta: f64) -> f64 {
    eta * eta * p * p / 2.0
}

/// Rate of the single-photon-detection qubit scheme, `η p / 2` bits per
/// attempt.
pub fn rate_type1(p: f64, eta: f64) -> f64 {
    eta * p / 2.0
}

/// Emission probability maximizing [`analytic_ps_total`] and the maximum
/// itself, in closed form: `p* = (4 − 2·2^{1/3} + 4^{1/3}) / 5`.
pub fn optimal_p() -> (f64, f64) {
    let p = (4.0 - 2.0 * 2f64.cbrt() + 4f64.cbrt()) / 5.0;
    (p, analytic_ps_total(p))
}

/// Locate the maximum of [`analytic_ps_total`] numerically, blind to the
/// closed form: golden-section search down to a narrow bracket, then
/// bisection on the sign of a centered difference. Agrees with
/// [`optimal_p`] to well below 1e−9.
pub fn optimal_p_search() -> SimResult<(f64, f64)> {
    let f = analytic_ps_total;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.4f64, 0.8f64);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > 1e-4 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    // the comparison-based search flattens out near the maximum; the slope
    // still has a clean sign change there, so bisect that instead
    let center = 0.5 * (lo + hi);
    let h = 1e-5;
    let g = |x: f64| f(x + h) - f(x - h);
    let (mut a, mut b) = (center - 2e-4, center + 2e-4);
    if !(g(a) > 0.0 && g(b) < 0.0) {
        return Err(SimError::BracketFailed { lo: a, hi: b });
    }
    for _ in 0..64 {
        let mid = 0.5 * (a + b);
        if g(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-12 {
            break;
        }
    }
    let p = 0.5 * (a + b);
    Ok((p, f(p)))
}

/// Emission probability where the qutrit rate stops beating the
/// two-photon qubit scheme at unit transmission: the root of
/// `log₂3 · P_s(p) − p²/2` between 0.62 and 0.99, bisected to 1e−6.
pub fn crossover_p() -> SimResult<f64> {
    let gap = |p: f64| rate_qutrit(p) - rate_type2(p, 1.0);
    let (mut lo, mut hi) = (0.62f64, 0.99f64);
    if !(gap(lo) > 0.0 && gap(hi) < 0.0) {
        return Err(SimError::BracketFailed { lo, hi });
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Evenly spaced grid with both endpoints included.
#[derive(Clone, Debug)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn linspace(start: f64, stop: f64, n: usize) -> SimResult<Self> {
        if n == 0 {
            return Err(SimError::InvalidParameter {
                name: "grid size",
                value: 0.0,
            });
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(SimError::InvalidParameter {
                name: "grid endpoint",
                value: if start.is_finite() { stop } else { start },
            });
        }
        if n == 1 {
            return Ok(Self(vec![start]));
        }
        let step = (stop - start) / (n - 1) as f64;
        let values = (0..n)
            .map(|i| {
                if i == n - 1 {
                    stop
                } else {
                    start + i as f64 * step
                }
            })
            .collect();
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One simulated grid point of the loss sweep.
#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub p: f64,
    pub eta: f64,
    pub detector: DetectorModel,
    /// Total heralding probability over all sixteen coincidences.
    pub p_s: f64,
    /// Fidelity with each pattern's sign-corrected target, averaged over
    /// patterns with their probabilities as weights.
    pub fidelity_corrected: f64,
    /// Fidelity with the fixed all-plus reference, same weighting.
    pub fidelity_canonical: f64,
    /// Memory-memory entanglement of the heralded state in bits, same
    /// weighting.
    pub entropy_bits: f64,
    /// Entanglement distributed per attempt: `entropy_bits · p_s`.
    pub rate: f64,
    /// Closed-form `P_s`, present only where the formula applies
    /// (no loss, number-resolving detectors).
    pub analytic_p_s: Option<f64>,
}

/// Sweep the exact simulation over emission probabilities, transmissions,
/// and detector models, in that nesting order. With `all_patterns` the
/// sixteen coincidences are heralded individually and averaged with their
/// probabilities as weights; otherwise only the first coincidence is
/// simulated and scaled by sixteen, which is exact because the sixteen
/// outcomes are equiprobable and share their fidelity and entropy.
pub fn sweep(
    p_grid: &[f64],
    eta_grid: &[f64],
    models: &[DetectorModel],
    all_patterns: bool,
) -> SimResult<Vec<SweepRecord>> {
    let operators: Vec<Vec<MeasurementOperator>> = models
        .iter()
        .map(|&model| {
            enumerate_patterns()
                .into_iter()
                .map(|pattern| measurement_operator(pattern, model))
                .collect()
        })
        .collect::<SimResult<_>>()?;
    let mut tasks = Vec::with_capacity(p_grid.len() * eta_grid.len() * models.len());
    for &p in p_grid {
        for &eta in eta_grid {
            for (index, &model) in models.iter().enumerate() {
                tasks.push((p, eta, model, index));
            }
        }
    }
    tasks
        .into_par_iter()
        .map(|(p, eta, model, index)| sweep_point(p, eta, model, &operators[index], all_patterns))
        .collect()
}

fn sweep_point(
    p: f64,
    eta: f64,
    model: DetectorModel,
    operators: &[MeasurementOperator],
    all_patterns: bool,
) -> SimResult<SweepRecord> {
    let params = ProtocolParams::balanced(p, eta)?;
    let ensemble = prepare_initial_lossy(&params)?;
    let outcomes = if all_patterns {
        operators
            .iter()
            .map(|op| crate::protocol::herald(&ensemble, op))
            .collect::<SimResult<Vec<_>>>()?
    } else {
        vec![crate::protocol::herald(&ensemble, &operators[0])?]
    };
    let scale = if all_patterns { 1.0 } else { 16.0 };
    let p_s: f64 = outcomes
        .iter()
        .map(HeraldedOutcome::probability)
        .sum::<f64>()
        * scale;
    if all_patterns {
        let lo = outcomes
            .iter()
            .map(HeraldedOutcome::probability)
            .fold(f64::INFINITY, f64::min);
        let hi = outcomes
            .iter()
            .map(HeraldedOutcome::probability)
            .fold(f64::NEG_INFINITY, f64::max);
        log::debug!(
            "pattern probability spread {:.3e} at p={p} eta={eta} {model}",
            hi - lo
        );
    }
    let (fidelity_corrected, fidelity_canonical, entropy_bits) = if p_s < ZERO_PROBABILITY {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        let weighted = |f: &dyn Fn(&HeraldedOutcome) -> f64| {
            outcomes.iter().map(|o| o.probability() * f(o)).sum::<f64>()
                / outcomes
                    .iter()
                    .map(HeraldedOutcome::probability)
                    .sum::<f64>()
        };
        (
            weighted(&HeraldedOutcome::fidelity_corrected),
            weighted(&HeraldedOutcome::fidelity_canonical),
            weighted(&HeraldedOutcome::entanglement_entropy_bits),
        )
    };
    let rate = if p_s < ZERO_PROBABILITY {
        0.0
    } else {
        entropy_bits * p_s
    };
    let analytic_p_s = (eta == 1.0 && model == DetectorModel::Pnrd).then(|| analytic_ps_total(p));
    Ok(SweepRecord {
        p,
        eta,
        detector: model,
        p_s,
        fidelity_corrected,
        fidelity_canonical,
        entropy_bits,
        rate,
        analytic_p_s,
    })
}

/// One grid point of the lossless rate comparison.
#[derive(Clone, Debug)]
pub struct RateRecord {
    pub p: f64,
    /// Simulated total heralding probability, all sixteen coincidences
    /// summed explicitly.
    pub p_s_qutrit: f64,
    /// Simulated entanglement per heralded pair times `p_s_qutrit`.
    pub rate_qutrit: f64,
    /// `p²/2`, the two-photon qubit scheme at unit transmission.
    pub rate_type2: f64,
    /// Closed-form success probability at this `p`.
    pub analytic_p_s: f64,
    /// |simulated − closed form|.
    pub abs_err: f64,
}

/// Lossless rate sweep with balanced amplitude and number-resolving
/// detectors. Every point simulates all sixteen coincidences; nothing is
/// inferred from the closed form, which only enters as the reference column.
pub fn sweep_rate(p_grid: &[f64]) -> SimResult<Vec<RateRecord>> {
    let operators: Vec<MeasurementOperator> = enumerate_patterns()
        .into_iter()
        .map(|pattern| measurement_operator(pattern, DetectorModel::Pnrd))
        .collect::<SimResult<_>>()?;
    p_grid
        .par_iter()
        .map(|&p| {
            let params = ProtocolParams::ideal_balanced(p)?;
            let ensemble = prepare_initial_lossy(&params)?;
            let outcomes = operators
                .iter()
                .map(|op| crate::protocol::herald(&ensemble, op))
                .collect::<SimResult<Vec<_>>>()?;
            let p_s: f64 = outcomes.iter().map(HeraldedOutcome::probability).sum();
            let rate = if p_s < ZERO_PROBABILITY {
                0.0
            } else {
                let entropy = outcomes
                    .iter()
                    .map(|o| o.probability() * o.entanglement_entropy_bits())
                    .sum::<f64>()
                    / p_s;
                entropy * p_s
            };
            let analytic = analytic_ps_total(p);
            Ok(RateRecord {
                p,
                p_s_qutrit: p_s,
                rate_qutrit: rate,
                rate_type2: rate_type2(p, 1.0),
                analytic_p_s: analytic,
                abs_err: (p_s - analytic).abs(),
            })
        })
        .collect()
}

/// Comparison of one lossy-state quantity: the value the simulation
/// produces against a printed closed-form variant of it.
#[derive(Clone, Debug)]
pub struct LossAuditEntry {
    pub quantity: &'static str,
    /// Extracted from the exact Kraus expansion.
    pub constructive: f64,
    /// The closed-form variant under audit.
    pub printed_variant: f64,
    pub abs_difference: f64,
    pub agrees: bool,
}

/// Audit of the lossy source and auxiliary states: traces of both Kraus
/// ensembles and entry-by-entry comparisons of simulated amplitudes and
/// weights against closed-form variants.
#[derive(Clone, Debug)]
pub struct LossAudit {
    pub p: f64,
    pub eta: f64,
    pub alpha: f64,
    pub source_trace: f64,
    pub aux_trace: f64,
    pub entries: Vec<LossAuditEntry>,
}

impl LossAudit {
    pub fn all_agree(&self) -> bool {
        self.entries.iter().all(|e| e.agrees)
    }

    /// Machine-readable form, floats at 12 significant digits.
    pub fn to_json_string(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"p\": {},\n", fmt_sig12(self.p)));
        out.push_str(&format!("  \"eta\": {},\n", fmt_sig12(self.eta)));
        out.push_str(&format!("  \"alpha\": {},\n", fmt_sig12(self.alpha)));
        out.push_str(&format!(
            "  \"source_trace\": {},\n",
            fmt_sig12(self.source_trace)
        ));
        out.push_str(&format!(
            "  \"aux_trace\": {},\n",
            fmt_sig12(self.aux_trace)
        ));
        out.push_str("  \"entries\": [\n");
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "    {{\"quantity\": \"{}\", \"constructive\": {}, \"printed_variant\": {}, \"abs_difference\": {}, \"agrees\": {}}}{}\n",
                e.quantity,
                fmt_sig12(e.constructive),
                fmt_sig12(e.printed_variant),
                fmt_sig12(e.abs_difference),
                e.agrees,
                if i + 1 < self.entries.len() { "," } else { "" },
            ));
        }
        out.push_str("  ]\n}\n");
        out
    }
}

const AUDIT_TOLERANCE: f64 = 1e-12;

fn audit_entry(quantity: &'static str, constructive: f64, printed_variant: f64) -> LossAuditEntry {
    let abs_difference = (constructive - printed_variant).abs();
    LossAuditEntry {
        quantity,
        constructive,
        printed_variant,
        abs_difference,
        agrees: abs_difference <= AUDIT_TOLERANCE,
    }
}

/// Largest photon total across the terms of any branch, used to classify
/// Kraus branches by how many photons they kept.
fn branch_max_total(branch: &crate::fock::PureState) -> u32 {
    branch
        .terms()
        .map(|(b, _)| b.photons.total())
        .max()
        .unwrap_or(0)
}

fn branches_with_total(ensemble: &Ensemble, total: u32) -> Vec<(f64, &crate::fock::PureState)> {
    ensemble
        .branches()
        .iter()
        .filter(|(_, b)| branch_max_total(b) == total)
        .map(|(w, b)| (*w, b))
        .collect()
}

/// Run uniform loss over the source and auxiliary states and compare the
/// surviving amplitudes and branch weights the simulation produces against
/// closed-form variants of the lossy-state expressions. Disagreeing entries
/// localize which closed form does not match the trace-preserving channel.
pub fn loss_equation_audit(p: f64, eta: f64) -> SimResult<LossAudit> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(SimError::InvalidParameter {
            name: "p",
            value: p,
        });
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(SimError::InvalidParameter {
            name: "eta",
            value: eta,
        });
    }
    let alpha = alpha_balanced(p);
    let mut entries = Vec::new();

    // source: √(1−p)|0̄⟩|vac⟩ + √(p/2)(|1̄⟩|H⟩ + |2̄⟩|V⟩) through loss on
    // both polarization modes
    let source = prepare_source(p, Node::Alice)?;
    let source_ensemble = LossChannel::uniform(eta, 2)?.apply_loss(&source)?;
    let source_trace = source_ensemble.total_weight();
    let surviving = branches_with_total(&source_ensemble, 1);
    let (w, branch) = surviving.first().ok_or(SimError::ZeroNorm)?;
    let h_key = crate::fock::JointBasisState::new(
        crate::fock::MemoryLabel::One,
        crate::fock::MemoryLabel::Zero,
        crate::fock::OccupationVector::single(2, 0),
    );
    // unnormalized amplitude in the no-loss branch
    let source_surviving_amp = branch.amplitude(&h_key).norm() * w.sqrt();
    entries.push(audit_entry(
        "source surviving photon amplitude",
        source_surviving_amp,
        (p * eta / 2.0).sqrt(),
    ));
    entries.push(audit_entry(
        "source surviving photon amplitude, variant without the 1/2",
        source_surviving_amp,
        (p * eta).sqrt(),
    ));

    // auxiliary pair: β|vac⟩ + α|HV⟩ through loss on both modes
    let aux = prepare_aux(alpha)?;
    let aux_ensemble = LossChannel::uniform(eta, 2)?.apply_loss(&aux)?;
    let aux_trace = aux_ensemble.total_weight();

    let pair_key = crate::fock::JointBasisState::new(
        crate::fock::MemoryLabel::Zero,
        crate::fock::MemoryLabel::Zero,
        crate::fock::OccupationVector::new(vec![1, 1]),
    );
    let both = branches_with_total(&aux_ensemble, 2);
    let (w2, pair_branch) = both.first().ok_or(SimError::ZeroNorm)?;
    let aux_surviving_amp = pair_branch.amplitude(&pair_key).norm() * w2.sqrt();
    entries.push(audit_entry(
        "auxiliary pair surviving amplitude",
        aux_surviving_amp,
        alpha * eta,
    ));

    let one_lost = branches_with_total(&aux_ensemble, 1);
    let one_lost_weight: f64 = one_lost.first().map(|(w, _)| *w).unwrap_or(0.0);
    entries.push(audit_entry(
        "auxiliary one-photon-lost branch weight",
        one_lost_weight,
        alpha * alpha * eta * (1.0 - eta),
    ));
    entries.push(audit_entry(
        "auxiliary one-photon-lost branch weight, square-root variant",
        one_lost_weight,
        alpha * alpha * (eta * (1.0 - eta)).sqrt(),
    ));

    // the β|vac⟩ component rides inside the no-loss branch, whose pair term
    // puts it at max total 2; the only branch at total 0 is the fully lost
    // pair
    let both_lost_weight: f64 = branches_with_total(&aux_ensemble, 0)
        .iter()
        .map(|(w, _)| *w)
        .sum();
    entries.push(audit_entry(
        "auxiliary both-photons-lost branch weight",
        both_lost_weight,
        alpha * alpha * (1.0 - eta) * (1.0 - eta),
    ));

    Ok(LossAudit {
        p,
        eta,
        alpha,
        source_trace,
        aux_trace,
        entries,
    })
}

/// Format a float with 12 significant digits in scientific notation, the
/// fixed representation used by every serialized output.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}
