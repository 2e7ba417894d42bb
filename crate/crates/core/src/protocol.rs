//! The entanglement-swapping protocol: source preparation, the heralding
//! measurement behind the four-path analyzer, and the resulting two-memory
//! states.
//!
//! Each node emits `√(1−p)|0̄⟩|vac⟩ + √(p/2)(|1̄⟩|H⟩ + |2̄⟩|V⟩)`, a memory
//! entangled with a polarization-encoded photon. Together with an auxiliary
//! photon pair `β|vac⟩ + α|HV⟩` on the third input path, a twofold detector
//! coincidence behind the analyzer projects the two memories onto a
//! maximally entangled qutrit pair, up to signs fixed by which detectors
//! fired.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::density::{MemoryDensity, MemoryVector};
use crate::error::{SimError, SimResult};
use crate::fock::{
    enumerate_occupations, random_ensemble, Ensemble, JointBasisState, MemoryLabel,
    OccupationVector, PureState,
};
use crate::modes::ModeRegistry;
use crate::optics::{blockform_in_polarization_order, LossChannel};
use crate::C64;

const CZERO: C64 = C64::new(0.0, 0.0);

/// Heralding probabilities below this are reported as degenerate: no
/// post-measurement state is defined there.
pub const ZERO_PROBABILITY: f64 = 1e-18;

/// How a detector responds to incoming photons.
///
/// `Pnrd` resolves photon number and accepts exactly one photon per clicked
/// detector. `Threshold` only distinguishes click from no click, so any
/// positive photon number at a clicked detector is accepted.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DetectorModel {
    Pnrd,
    Threshold,
}

impl fmt::Display for DetectorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorModel::Pnrd => "pnrd",
            DetectorModel::Threshold => "threshold",
        })
    }
}

/// One of the eight detectors at the analyzer outputs, named by output path
/// and polarization. Indices match the mode order [H1..H4, V1..V4].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Detector {
    H1,
    H2,
    H3,
    H4,
    V1,
    V2,
    V3,
    V4,
}

impl Detector {
    pub const ALL: [Detector; 8] = [
        Detector::H1,
        Detector::H2,
        Detector::H3,
        Detector::H4,
        Detector::V1,
        Detector::V2,
        Detector::V3,
        Detector::V4,
    ];

    /// Mode index at the analyzer output stage.
    pub fn index(self) -> usize {
        match self {
            Detector::H1 => 0,
            Detector::H2 => 1,
            Detector::H3 => 2,
            Detector::H4 => 3,
            Detector::V1 => 4,
            Detector::V2 => 5,
            Detector::V3 => 6,
            Detector::V4 => 7,
        }
    }

    pub fn path(self) -> u8 {
        match self {
            Detector::H1 | Detector::V1 => 1,
            Detector::H2 | Detector::V2 => 2,
            Detector::H3 | Detector::V3 => 3,
            Detector::H4 | Detector::V4 => 4,
        }
    }

    pub fn is_vertical(self) -> bool {
        matches!(
            self,
            Detector::V1 | Detector::V2 | Detector::V3 | Detector::V4
        )
    }

    /// Detectors on output paths 1 and 3. Every valid coincidence pairs one
    /// of these with one detector on paths 2 or 4, a consequence of the
    /// analyzer routing each input to exactly one half of the outputs.
    pub fn is_first_half(self) -> bool {
        matches!(self.path(), 1 | 3)
    }

    pub fn name(self) -> &'static str {
        match self {
            Detector::H1 => "H1'",
            Detector::H2 => "H2'",
            Detector::H3 => "H3'",
            Detector::H4 => "H4'",
            Detector::V1 => "V1'",
            Detector::V2 => "V2'",
            Detector::V3 => "V3'",
            Detector::V4 => "V4'",
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A twofold coincidence: one detector on paths 1/3, one on paths 2/4.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DetectionPattern {
    first: Detector,
    second: Detector,
}

impl DetectionPattern {
    pub fn new(first: Detector, second: Detector) -> SimResult<Self> {
        if !first.is_first_half() || second.is_first_half() {
            return Err(SimError::InvalidPattern {
                first: first.name(),
                second: second.name(),
            });
        }
        Ok(Self { first, second })
    }

    pub fn first(&self) -> Detector {
        self.first
    }

    pub fn second(&self) -> Detector {
        self.second
    }

    /// Signs (s₀, s₁, s₂) of the heralded superposition
    /// (s₀|00⟩ + s₁|12⟩ + s₂|21⟩)/√3 for this coincidence.
    pub fn signs(&self) -> [f64; 3] {
        let group = 2 * usize::from(self.first.path() == 3) + usize::from(self.second.path() == 4);
        let member =
            2 * usize::from(self.first.is_vertical()) + usize::from(self.second.is_vertical());
        SIGN_TABLE[4 * group + member]
    }
}

impl fmt::Display for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

/// Signs per pattern, rows grouped by path pair (1,2), (1,4), (3,2), (3,4),
/// within a group ordered (H,H), (H,V), (V,H), (V,V).
const SIGN_TABLE: [[f64; 3]; 16] = [
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
    [1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0],
    [1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, -1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, -1.0],
    [1.0, 1.0, -1.0],
    [1.0, -1.0, 1.0],
    [-1.0, 1.0, 1.0],
    [1.0, 1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// All sixteen valid coincidences, grouped by path pair (1,2), (1,4), (3,2),
/// (3,4), within a group ordered (H,H), (H,V), (V,H), (V,V). The row order
/// matches [`DetectionPattern::signs`].
pub fn enumerate_patterns() -> Vec<DetectionPattern> {
    let halves = |path: u8| match path {
        1 => [Detector::H1, Detector::V1],
        2 => [Detector::H2, Detector::V2],
        3 => [Detector::H3, Detector::V3],
        _ => [Detector::H4, Detector::V4],
    };
    let mut out = Vec::with_capacity(16);
    for first_path in [1u8, 3] {
        for second_path in [2u8, 4] {
            for first in halves(first_path) {
                for second in halves(second_path) {
                    out.push(DetectionPattern::new(first, second).expect("halves are valid"));
                }
            }
        }
    }
    out
}

/// The maximally entangled two-memory state a given coincidence heralds,
/// `(s₀|00⟩ + s₁|12⟩ + s₂|21⟩)/√3`.
pub fn expected_heralded_state(pattern: DetectionPattern) -> MemoryVector {
    let signs = pattern.signs();
    let third = C64::new((1f64 / 3.0).sqrt(), 0.0);
    let mut v = MemoryVector::zero();
    v.set(0, third * signs[0]);
    v.set(5, third * signs[1]);
    v.set(7, third * signs[2]);
    v
}

/// The all-plus member of the heralded family, `(|00⟩ + |12⟩ + |21⟩)/√3`,
/// used as the fixed reference when no sign correction is applied.
pub fn canonical_bell() -> MemoryVector {
    let third = C64::new((1f64 / 3.0).sqrt(), 0.0);
    let mut v = MemoryVector::zero();
    v.set(0, third);
    v.set(5, third);
    v.set(7, third);
    v
}

/// The two memory nodes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Node {
    Alice,
    Bob,
}

/// Auxiliary-pair amplitude that makes all three components of the heralded
/// state equally likely: `α = p / √(5p² − 8p + 4)`. The radicand stays
/// positive for every real `p`.
pub fn alpha_balanced(p: f64) -> f64 {
    p / (5.0 * p * p - 8.0 * p + 4.0).sqrt()
}

/// Protocol settings: emission probability `p`, auxiliary amplitude `alpha`,
/// transmission `eta` applied uniformly to all photonic modes.
#[derive(Clone, Copy, Debug)]
pub struct ProtocolParams {
    p: f64,
    alpha: f64,
    eta: f64,
}

impl ProtocolParams {
    pub fn new(p: f64, alpha: f64, eta: f64) -> SimResult<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(SimError::InvalidParameter {
                name: "p",
                value: p,
            });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(SimError::InvalidParameter {
                name: "alpha",
                value: alpha,
            });
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(SimError::InvalidParameter {
                name: "eta",
                value: eta,
            });
        }
        Ok(Self { p, alpha, eta })
    }

    /// Balanced auxiliary amplitude at the given transmission.
    pub fn balanced(p: f64, eta: f64) -> SimResult<Self> {
        Self::new(p, alpha_balanced(p), eta)
    }

    /// Balanced amplitude, no loss.
    pub fn ideal_balanced(p: f64) -> SimResult<Self> {
        Self::balanced(p, 1.0)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).sqrt()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Memory-photon state of one node on its own input path:
/// `√(1−p)|0̄⟩|vac⟩ + √(p/2)(|1̄⟩|H⟩ + |2̄⟩|V⟩)`.
pub fn prepare_source(p: f64, node: Node) -> SimResult<PureState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SimError::InvalidParameter {
            name: "p",
            value: p,
        });
    }
    let path = match node {
        Node::Alice => 1,
        Node::Bob => 2,
    };
    let registry = ModeRegistry::polarization_pair(path);
    let v = C64::new((1.0 - p).sqrt(), 0.0);
    let q = C64::new((p / 2.0).sqrt(), 0.0);
    let with_mem = |level: MemoryLabel, photons: OccupationVector| match node {
        Node::Alice => JointBasisState::new(level, MemoryLabel::Zero, photons),
        Node::Bob => JointBasisState::new(MemoryLabel::Zero, level, photons),
    };
    PureState::from_terms(
        registry,
        [
            (with_mem(MemoryLabel::Zero, OccupationVector::vacuum(2)), v),
            (
                with_mem(MemoryLabel::One, OccupationVector::single(2, 0)),
                q,
            ),
            (
                with_mem(MemoryLabel::Two, OccupationVector::single(2, 1)),
                q,
            ),
        ],
    )
}

/// Auxiliary photon pair on input path 3: `β|vac⟩ + α|H V⟩` with
/// `β = √(1−α²)`. Carries no memory.
pub fn prepare_aux(alpha: f64) -> SimResult<PureState> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(SimError::InvalidParameter {
            name: "alpha",
            value: alpha,
        });
    }
    let registry = ModeRegistry::polarization_pair(3);
    let beta = C64::new((1.0 - alpha * alpha).sqrt(), 0.0);
    let pair = OccupationVector::new(vec![1, 1]);
    PureState::from_terms(
        registry,
        [
            (
                JointBasisState::new(
                    MemoryLabel::Zero,
                    MemoryLabel::Zero,
                    OccupationVector::vacuum(2),
                ),
                beta,
            ),
            (
                JointBasisState::new(MemoryLabel::Zero, MemoryLabel::Zero, pair),
                C64::new(alpha, 0.0),
            ),
        ],
    )
}

/// Joint input state of both sources and the auxiliary pair on the full
/// eight-mode stage, input path 4 in vacuum. 18 basis terms.
pub fn prepare_initial(params: &ProtocolParams) -> SimResult<PureState> {
    let alice = prepare_source(params.p, Node::Alice)?;
    let bob = prepare_source(params.p, Node::Bob)?;
    let aux = prepare_aux(params.alpha)?;
    alice
        .tensor_product(&bob)?
        .tensor_product(&aux)?
        .embed_into(&ModeRegistry::bell_stage())
}

/// The joint input state after uniform transmission `eta` on all eight
/// photonic modes, as an exact Kraus ensemble.
pub fn prepare_initial_lossy(params: &ProtocolParams) -> SimResult<Ensemble> {
    let pure = prepare_initial(params)?;
    LossChannel::uniform(params.eta, 8)?.apply_loss(&pure)
}

/// Projector onto the detector outcomes a coincidence accepts, pulled back
/// through the analyzer: `M = Σ_t |φ_t⟩⟨φ_t|` with
/// `φ_t = U†|detector outcome t⟩`. The pulled-back kets are orthonormal, so
/// `M` is a genuine projector; construction verifies its spectrum.
#[derive(Clone, Debug)]
pub struct MeasurementOperator {
    pattern: DetectionPattern,
    model: DetectorModel,
    vacuum_elsewhere: bool,
    registry: ModeRegistry,
    detector_patterns: Vec<OccupationVector>,
    kets: Vec<PureState>,
}

/// Accepting coincidence measurement with all other detectors required dark.
pub fn measurement_operator(
    pattern: DetectionPattern,
    model: DetectorModel,
) -> SimResult<MeasurementOperator> {
    measurement_operator_with(pattern, model, true)
}

/// As [`measurement_operator`], optionally accepting any photon count at the
/// non-clicked detectors instead of requiring vacuum there.
pub fn measurement_operator_with(
    pattern: DetectionPattern,
    model: DetectorModel,
    vacuum_elsewhere: bool,
) -> SimResult<MeasurementOperator> {
    let registry = ModeRegistry::bell_stage();
    let analyzer = blockform_in_polarization_order()?;
    let back = analyzer.adjoint();
    let first = pattern.first.index();
    let second = pattern.second.index();

    let mut detector_patterns = Vec::new();
    for occ in enumerate_occupations(registry.len(), registry.cap()) {
        let n1 = occ.count(first);
        let n2 = occ.count(second);
        let clicked = match model {
            DetectorModel::Pnrd => n1 == 1 && n2 == 1,
            DetectorModel::Threshold => n1 >= 1 && n2 >= 1,
        };
        if !clicked {
            continue;
        }
        if vacuum_elsewhere && occ.total() != (n1 + n2) as u32 {
            continue;
        }
        detector_patterns.push(occ);
    }

    let kets = detector_patterns
        .iter()
        .map(|occ| {
            PureState::basis_state(
                registry.clone(),
                MemoryLabel::Zero,
                MemoryLabel::Zero,
                occ.clone(),
            )?
            .apply_mode_unitary(&back)
        })
        .collect::<SimResult<Vec<_>>>()?;

    check_projector_spectrum(&kets)?;
    Ok(MeasurementOperator {
        pattern,
        model,
        vacuum_elsewhere,
        registry,
        detector_patterns,
        kets,
    })
}

/// The nonzero spectrum of `Σ_t |φ_t⟩⟨φ_t|` equals the spectrum of the Gram
/// matrix `G_ts = ⟨φ_t|φ_s⟩`; a valid measurement operator needs it inside
/// [0, 1] up to rounding.
fn check_projector_spectrum(kets: &[PureState]) -> SimResult<()> {
    let n = kets.len();
    let mut gram = DMatrix::from_element(n, n, CZERO);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = kets[i].inner_product(&kets[j])?;
        }
    }
    let hermitian = (&gram + gram.adjoint()).scale(0.5);
    let eigs = hermitian.symmetric_eigen().eigenvalues;
    let min_eig = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eig = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min_eig < -1e-10 || max_eig > 1.0 + 1e-10 {
        return Err(SimError::OperatorBound { min_eig, max_eig });
    }
    Ok(())
}

impl MeasurementOperator {
    pub fn pattern(&self) -> DetectionPattern {
        self.pattern
    }

    pub fn model(&self) -> DetectorModel {
        self.model
    }

    pub fn vacuum_elsewhere(&self) -> bool {
        self.vacuum_elsewhere
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    /// Detector-side occupations this operator accepts.
    pub fn detector_patterns(&self) -> &[OccupationVector] {
        &self.detector_patterns
    }

    /// Orthonormal input-side kets whose projectors sum to the operator.
    pub fn kets(&self) -> &[PureState] {
        &self.kets
    }
}

/// Result of heralding on one coincidence: the outcome probability and, when
/// it is not degenerate, the unnormalized two-memory operator left behind.
#[derive(Clone, Debug)]
pub struct HeraldedOutcome {
    pattern: DetectionPattern,
    probability: f64,
    memory: Option<MemoryDensity>,
    target: MemoryVector,
}

impl HeraldedOutcome {
    pub fn pattern(&self) -> DetectionPattern {
        self.pattern
    }

    /// Probability of this coincidence for the measured state.
    pub fn probability(&self) -> f64 {
        self.probability
    }

    /// Unnormalized post-measurement memory operator; its trace is the
    /// probability. `None` when the outcome never occurs.
    pub fn memory(&self) -> Option<&MemoryDensity> {
        self.memory.as_ref()
    }

    pub fn is_degenerate(&self) -> bool {
        self.memory.is_none()
    }

    /// Sign-corrected target this pattern heralds.
    pub fn target(&self) -> &MemoryVector {
        &self.target
    }

    /// Fidelity of the normalized memory state with the pattern's own
    /// sign-corrected target. NaN for degenerate outcomes.
    pub fn fidelity_corrected(&self) -> f64 {
        self.fidelity_with(&self.target)
    }

    /// Fidelity with the fixed all-plus reference state, as if no sign
    /// correction were applied after the herald. NaN for degenerate outcomes.
    pub fn fidelity_canonical(&self) -> f64 {
        self.fidelity_with(&canonical_bell())
    }

    fn fidelity_with(&self, target: &MemoryVector) -> f64 {
        match &self.memory {
            Some(rho) => rho
                .normalized()
                .map(|hat| hat.fidelity_with(target))
                .unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    }

    /// Entanglement between the two memories of the normalized heralded
    /// state, in bits. NaN for degenerate outcomes.
    pub fn entanglement_entropy_bits(&self) -> f64 {
        match &self.memory {
            Some(rho) => rho.entanglement_entropy_bits().unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    }
}

/// Herald on a coincidence: project every branch onto the operator's kets
/// and trace out the photons. The returned probability is exact for the
/// ensemble, `Σ_branches w Σ_t ‖⟨φ_t|ψ⟩‖²`.
pub fn herald(ensemble: &Ensemble, op: &MeasurementOperator) -> SimResult<HeraldedOutcome> {
    if ensemble.registry() != op.registry() {
        return Err(SimError::RegistryMismatch);
    }
    let mut rho = MemoryDensity::zero();
    for (w, psi) in ensemble.branches() {
        // group ψ by photon occupation so each ket term is one lookup
        let mut groups: BTreeMap<&OccupationVector, Vec<(usize, C64)>> = BTreeMap::new();
        for (basis, amp) in psi.terms() {
            groups
                .entry(&basis.photons)
                .or_default()
                .push((basis.memory_index(), amp));
        }
        for ket in &op.kets {
            let mut m = MemoryVector::zero();
            let mut hit = false;
            for (kb, kamp) in ket.terms() {
                if let Some(entries) = groups.get(&kb.photons) {
                    for &(mu, amp) in entries {
                        m.add_assign(mu, kamp.conj() * amp);
                        hit = true;
                    }
                }
            }
            if hit {
                rho.accumulate_outer(*w, &m);
            }
        }
    }
    let probability = rho.trace();
    let memory = if probability < ZERO_PROBABILITY {
        None
    } else {
        Some(rho)
    };
    Ok(HeraldedOutcome {
        pattern: op.pattern,
        probability,
        memory,
        target: expected_heralded_state(op.pattern),
    })
}

/// [`herald`] for a single normalized pure state.
pub fn herald_pure(state: &PureState, op: &MeasurementOperator) -> SimResult<HeraldedOutcome> {
    herald(&Ensemble::from_pure(state)?, op)
}

/// Prepare the lossy input state and herald on one coincidence.
pub fn run_pattern(
    params: &ProtocolParams,
    pattern: DetectionPattern,
    model: DetectorModel,
) -> SimResult<HeraldedOutcome> {
    let ensemble = prepare_initial_lossy(params)?;
    let op = measurement_operator(pattern, model)?;
    herald(&ensemble, &op)
}

/// Herald all sixteen coincidences against one shared prepared state,
/// in [`enumerate_patterns`] order.
pub fn pattern_outcomes(
    params: &ProtocolParams,
    model: DetectorModel,
) -> SimResult<Vec<HeraldedOutcome>> {
    let ensemble = prepare_initial_lossy(params)?;
    enumerate_patterns()
        .into_iter()
        .map(|pattern| herald(&ensemble, &measurement_operator(pattern, model)?))
        .collect()
}

/// Total success probability: the sum over all sixteen coincidences.
pub fn total_success(params: &ProtocolParams, model: DetectorModel) -> SimResult<f64> {
    Ok(pattern_outcomes(params, model)?
        .iter()
        .map(HeraldedOutcome::probability)
        .sum())
}

/// Full photon-count distribution at the analyzer outputs, keyed by detector
/// occupation. The values sum to the ensemble weight, which makes this the
/// completeness check for the measurement decomposition.
pub fn detector_distribution(ensemble: &Ensemble) -> SimResult<BTreeMap<OccupationVector, f64>> {
    let analyzer = blockform_in_polarization_order()?;
    let mut dist = BTreeMap::new();
    for (w, psi) in ensemble.branches() {
        let out = psi.apply_mode_unitary(&analyzer)?;
        for (basis, amp) in out.terms() {
            *dist.entry(basis.photons.clone()).or_insert(0.0) += w * amp.norm_sqr();
        }
    }
    Ok(dist)
}

/// Outcome of [`dominance_check`]: across random states, how far threshold
/// acceptance ever fell below photon-number-resolved acceptance.
#[derive(Clone, Copy, Debug)]
pub struct DominanceReport {
    pub trials: usize,
    pub patterns: usize,
    /// max over all trials and patterns of `P_pnrd − P_threshold`.
    pub max_deficit: f64,
    pub holds: bool,
}

/// Verify on seeded random ensembles that every threshold operator accepts
/// at least as much probability as its photon-number-resolved counterpart.
/// This holds structurally: the threshold operator's kets extend the PNRD
/// set, and the extra projectors only add nonnegative weight.
pub fn dominance_check(trials: usize, seed: u64) -> SimResult<DominanceReport> {
    let registry = ModeRegistry::bell_stage();
    let patterns = enumerate_patterns();
    let pairs = patterns
        .iter()
        .map(|&p| {
            Ok((
                measurement_operator(p, DetectorModel::Pnrd)?,
                measurement_operator(p, DetectorModel::Threshold)?,
            ))
        })
        .collect::<SimResult<Vec<_>>>()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut max_deficit = f64::NEG_INFINITY;
    for _ in 0..trials {
        let ensemble = random_ensemble(&registry, 3, 10, &mut rng)?;
        for (pnrd, threshold) in &pairs {
            let p_pnrd = herald(&ensemble, pnrd)?.probability();
            let p_threshold = herald(&ensemble, threshold)?.probability();
            max_deficit = max_deficit.max(p_pnrd - p_threshold);
        }
    }
    Ok(DominanceReport {
        trials,
        patterns: patterns.len(),
        max_deficit,
        holds: max_deficit <= 1e-12,
    })
}
