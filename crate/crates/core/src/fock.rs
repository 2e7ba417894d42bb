//! Sparse joint states: two three-level memory labels tensored with a
//! multimode bosonic Fock space.
//!
//! A basis element is `(memory A, memory B, occupation vector)` over a fixed
//! [`ModeRegistry`]. States are sparse complex maps over these keys; with at
//! most four photons over eight modes the maps stay tiny, so everything here
//! is exact linear algebra rather than sampling.
//!
//! Mode unitaries act in the Schroedinger convention
//! `a_j† -> Σ_k U_kj a_k†`, realized by expanding
//! `Π_j (Σ_k U_kj a_k†)^{n_j} |vac⟩ / √(Π_j n_j!)` per basis term with the
//! bosonic ladder factors included, which keeps the map exactly norm
//! preserving.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::density::{MemoryDensity, MemoryVector};
use crate::error::{SimError, SimResult};
use crate::modes::ModeRegistry;
use crate::optics::ModeUnitary;
use crate::C64;

/// Amplitudes with squared magnitude below this are dropped after every
/// operation. Far below every assertion tolerance in the crate, so pruning
/// never shows up in results; it only keeps the maps free of cancellation
/// dust.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

const CZERO: C64 = C64::new(0.0, 0.0);

/// One of the three levels of a node's quantum memory.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum MemoryLabel {
    Zero,
    One,
    Two,
}

impl MemoryLabel {
    pub const ALL: [MemoryLabel; 3] = [MemoryLabel::Zero, MemoryLabel::One, MemoryLabel::Two];

    pub fn index(self) -> usize {
        match self {
            MemoryLabel::Zero => 0,
            MemoryLabel::One => 1,
            MemoryLabel::Two => 2,
        }
    }

    pub fn from_index(i: usize) -> SimResult<Self> {
        Self::ALL.get(i).copied().ok_or(SimError::InvalidParameter {
            name: "memory level",
            value: i as f64,
        })
    }
}

impl fmt::Display for MemoryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Photon counts per mode, ordered like the owning registry.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OccupationVector(Vec<u8>);

impl OccupationVector {
    pub fn new(counts: Vec<u8>) -> Self {
        Self(counts)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self(vec![0; n_modes])
    }

    /// A single photon in `mode`, vacuum elsewhere.
    pub fn single(n_modes: usize, mode: usize) -> Self {
        let mut counts = vec![0; n_modes];
        counts[mode] = 1;
        Self(counts)
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, mode: usize) -> u8 {
        self.0[mode]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.iter().all(|&n| n == 0)
    }

    pub fn raised(&self, mode: usize) -> Self {
        let mut counts = self.0.clone();
        counts[mode] += 1;
        Self(counts)
    }

    /// `None` when the mode is already empty.
    pub fn lowered(&self, mode: usize) -> Option<Self> {
        if self.0[mode] == 0 {
            return None;
        }
        let mut counts = self.0.clone();
        counts[mode] -= 1;
        Some(Self(counts))
    }

    /// √(Π_j n_j!), the normalization of the corresponding Fock ket.
    pub fn sqrt_factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product::<f64>().sqrt()
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

fn factorial(n: u8) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

/// Basis element of the joint memory-photon space. Equality is structural;
/// the struct is the key of the sparse amplitude maps.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct JointBasisState {
    pub mem_a: MemoryLabel,
    pub mem_b: MemoryLabel,
    pub photons: OccupationVector,
}

impl JointBasisState {
    pub fn new(mem_a: MemoryLabel, mem_b: MemoryLabel, photons: OccupationVector) -> Self {
        Self {
            mem_a,
            mem_b,
            photons,
        }
    }

    /// Index into the 9-dimensional two-memory basis: `3 * memA + memB`.
    pub fn memory_index(&self) -> usize {
        3 * self.mem_a.index() + self.mem_b.index()
    }
}

/// Sparse pure state over [`JointBasisState`] keys.
///
/// The squared norm is 1 for physical states and below 1 for heralded
/// branches; ladder operators are algebra tools and may leave any norm.
#[derive(Clone, Debug)]
pub struct PureState {
    registry: ModeRegistry,
    amps: BTreeMap<JointBasisState, C64>,
}

impl PureState {
    pub fn zero(registry: ModeRegistry) -> Self {
        Self {
            registry,
            amps: BTreeMap::new(),
        }
    }

    /// Build a state from `(basis, amplitude)` pairs. Duplicate keys add up;
    /// every occupation must match the registry length and respect the cap.
    pub fn from_terms(
        registry: ModeRegistry,
        terms: impl IntoIterator<Item = (JointBasisState, C64)>,
    ) -> SimResult<Self> {
        let mut state = Self::zero(registry);
        for (basis, amp) in terms {
            state.check_basis(&basis)?;
            *state.amps.entry(basis).or_insert(CZERO) += amp;
        }
        state.prune();
        Ok(state)
    }

    /// Single basis ket with amplitude 1.
    pub fn basis_state(
        registry: ModeRegistry,
        mem_a: MemoryLabel,
        mem_b: MemoryLabel,
        photons: OccupationVector,
    ) -> SimResult<Self> {
        let one = C64::new(1.0, 0.0);
        Self::from_terms(
            registry,
            [(JointBasisState::new(mem_a, mem_b, photons), one)],
        )
    }

    fn check_basis(&self, basis: &JointBasisState) -> SimResult<()> {
        if basis.photons.len() != self.registry.len() {
            return Err(SimError::DimensionMismatch {
                expected: self.registry.len(),
                found: basis.photons.len(),
            });
        }
        if basis.photons.total() > self.registry.cap() {
            return Err(SimError::PhotonCapExceeded {
                cap: self.registry.cap(),
            });
        }
        Ok(())
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JointBasisState, C64)> {
        self.amps.iter().map(|(k, &v)| (k, v))
    }

    pub fn term_count(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, basis: &JointBasisState) -> C64 {
        self.amps.get(basis).copied().unwrap_or(CZERO)
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Drop amplitudes with squared magnitude below [`PRUNE_THRESHOLD`].
    pub fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm_sqr() >= PRUNE_THRESHOLD);
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for a in out.amps.values_mut() {
            *a *= factor;
        }
        out.prune();
        out
    }

    pub fn normalized(&self) -> SimResult<Self> {
        let n = self.norm();
        if n < 1e-150 {
            return Err(SimError::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    /// ⟨self|other⟩.
    pub fn inner_product(&self, other: &Self) -> SimResult<C64> {
        if self.registry != other.registry {
            return Err(SimError::RegistryMismatch);
        }
        let (small, large, conj_small) = if self.amps.len() <= other.amps.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = CZERO;
        for (basis, amp) in &small.amps {
            if let Some(&b) = large.amps.get(basis) {
                acc += if conj_small {
                    amp.conj() * b
                } else {
                    b.conj() * amp
                };
            }
        }
        Ok(acc)
    }

    /// Bosonic raising on one mode: |n⟩ -> √(n+1)|n+1⟩ per basis term.
    /// Exceeding the photon cap is a hard error.
    pub fn apply_creation(&self, mode: usize) -> SimResult<Self> {
        self.check_mode(mode)?;
        let cap = self.registry.cap();
        let mut out = Self::zero(self.registry.clone());
        for (basis, amp) in &self.amps {
            if basis.photons.total() + 1 > cap {
                return Err(SimError::PhotonCapExceeded { cap });
            }
            let n = basis.photons.count(mode) as f64;
            let key = JointBasisState::new(basis.mem_a, basis.mem_b, basis.photons.raised(mode));
            *out.amps.entry(key).or_insert(CZERO) += amp * (n + 1.0).sqrt();
        }
        out.prune();
        Ok(out)
    }

    /// Bosonic lowering on one mode: |n⟩ -> √n|n−1⟩; empty modes vanish.
    pub fn apply_annihilation(&self, mode: usize) -> SimResult<Self> {
        self.check_mode(mode)?;
        let mut out = Self::zero(self.registry.clone());
        for (basis, amp) in &self.amps {
            let Some(lowered) = basis.photons.lowered(mode) else {
                continue;
            };
            let n = basis.photons.count(mode) as f64;
            let key = JointBasisState::new(basis.mem_a, basis.mem_b, lowered);
            *out.amps.entry(key).or_insert(CZERO) += amp * n.sqrt();
        }
        out.prune();
        Ok(out)
    }

    fn check_mode(&self, mode: usize) -> SimResult<()> {
        if mode >= self.registry.len() {
            return Err(SimError::ModeOutOfRange {
                mode,
                n_modes: self.registry.len(),
            });
        }
        Ok(())
    }

    /// Transform every photon occupation by the mode unitary, memory labels
    /// untouched. Preserves the total photon number of each term exactly and
    /// the norm up to rounding.
    pub fn apply_mode_unitary(&self, u: &ModeUnitary) -> SimResult<Self> {
        if u.registry() != &self.registry {
            return Err(SimError::RegistryMismatch);
        }
        let dim = self.registry.len();
        let mut out = Self::zero(self.registry.clone());
        for (basis, amp) in &self.amps {
            let scale = amp / basis.photons.sqrt_factorial_product();
            for (occ, coeff) in expand_occupation(&basis.photons, u, dim) {
                let key = JointBasisState::new(basis.mem_a, basis.mem_b, occ);
                *out.amps.entry(key).or_insert(CZERO) += coeff * scale;
            }
        }
        out.prune();
        Ok(out)
    }

    /// Tensor product over disjoint registries (labels are concatenated).
    ///
    /// Memory labels merge slot-wise: a slot may be carried by at most one
    /// factor, the other factor keeps it at `Zero` as a placeholder. Both
    /// factors raising the same slot above `Zero` is rejected.
    pub fn tensor_product(&self, other: &Self) -> SimResult<Self> {
        if self.registry.cap() != other.registry.cap() {
            return Err(SimError::DimensionMismatch {
                expected: self.registry.cap() as usize,
                found: other.registry.cap() as usize,
            });
        }
        let labels = self
            .registry
            .labels()
            .iter()
            .chain(other.registry.labels())
            .copied()
            .collect();
        let registry = ModeRegistry::new(labels, self.registry.cap())?;
        let cap = registry.cap();
        let mut out = Self::zero(registry);
        for (ka, va) in &self.amps {
            for (kb, vb) in &other.amps {
                if ka.photons.total() + kb.photons.total() > cap {
                    return Err(SimError::PhotonCapExceeded { cap });
                }
                let mem_a = merge_memory_slot(ka.mem_a, kb.mem_a, 'A')?;
                let mem_b = merge_memory_slot(ka.mem_b, kb.mem_b, 'B')?;
                let mut counts = ka.photons.counts().to_vec();
                counts.extend_from_slice(kb.photons.counts());
                let key = JointBasisState::new(mem_a, mem_b, OccupationVector::new(counts));
                *out.amps.entry(key).or_insert(CZERO) += va * vb;
            }
        }
        out.prune();
        Ok(out)
    }

    /// Re-express the state on a larger registry: every mode of `self` must
    /// appear in `target`, added modes stay in vacuum.
    pub fn embed_into(&self, target: &ModeRegistry) -> SimResult<Self> {
        if target == &self.registry {
            return Ok(self.clone());
        }
        let positions = self
            .registry
            .labels()
            .iter()
            .map(|&l| target.index_of(l).ok_or(SimError::UnknownMode(l)))
            .collect::<SimResult<Vec<_>>>()?;
        let mut out = Self::zero(target.clone());
        for (basis, amp) in &self.amps {
            if basis.photons.total() > target.cap() {
                return Err(SimError::PhotonCapExceeded { cap: target.cap() });
            }
            let mut counts = vec![0u8; target.len()];
            for (i, &pos) in positions.iter().enumerate() {
                counts[pos] = basis.photons.count(i);
            }
            let key = JointBasisState::new(basis.mem_a, basis.mem_b, OccupationVector::new(counts));
            *out.amps.entry(key).or_insert(CZERO) += amp;
        }
        Ok(out)
    }

    /// Trace out the photonic sector: ρ_mem = Tr_photons |ψ⟩⟨ψ|.
    /// The result's trace equals the squared norm of the input.
    pub fn partial_trace_to_memory(&self) -> MemoryDensity {
        let mut groups: BTreeMap<&OccupationVector, [C64; 9]> = BTreeMap::new();
        for (basis, amp) in &self.amps {
            groups.entry(&basis.photons).or_insert([CZERO; 9])[basis.memory_index()] += amp;
        }
        let mut rho = MemoryDensity::zero();
        for v in groups.values() {
            rho.accumulate_outer(1.0, &MemoryVector::from_amplitudes(*v));
        }
        rho
    }

    /// Von Neumann entropy, in bits, of memory A after tracing out memory B
    /// and all photons. Requires a normalized state.
    pub fn entanglement_entropy(&self) -> SimResult<f64> {
        let norm_sq = self.norm_sq();
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(SimError::NotNormalized { norm_sq });
        }
        // rho_A[a][a'] = Σ_{b, occ} ψ(a,b,occ) ψ*(a',b,occ)
        let mut groups: BTreeMap<(usize, &OccupationVector), [C64; 3]> = BTreeMap::new();
        for (basis, amp) in &self.amps {
            groups
                .entry((basis.mem_b.index(), &basis.photons))
                .or_insert([CZERO; 3])[basis.mem_a.index()] += amp;
        }
        let mut rho_a = [[CZERO; 3]; 3];
        for v in groups.values() {
            for (i, row) in rho_a.iter_mut().enumerate() {
                for (j, entry) in row.iter_mut().enumerate() {
                    *entry += v[i] * v[j].conj();
                }
            }
        }
        Ok(crate::density::entropy_bits_of_hermitian3(&rho_a))
    }
}

fn merge_memory_slot(x: MemoryLabel, y: MemoryLabel, slot: char) -> SimResult<MemoryLabel> {
    match (x, y) {
        (MemoryLabel::Zero, other) => Ok(other),
        (other, MemoryLabel::Zero) => Ok(other),
        _ => Err(SimError::MemoryCollision { slot }),
    }
}

/// Expand `Π_j (Σ_k U_kj a_k†)^{n_j} |vac⟩` with ladder factors included.
/// Dividing by √(Π_j n_j!) afterwards gives the Fock amplitudes of the
/// transformed basis ket.
fn expand_occupation(
    occ: &OccupationVector,
    u: &ModeUnitary,
    dim: usize,
) -> BTreeMap<OccupationVector, C64> {
    let m = u.matrix();
    let mut poly = BTreeMap::from([(OccupationVector::vacuum(dim), C64::new(1.0, 0.0))]);
    for j in 0..dim {
        for _ in 0..occ.count(j) {
            let mut next: BTreeMap<OccupationVector, C64> = BTreeMap::new();
            for (mono, c) in &poly {
                for k in 0..dim {
                    let u_kj = m[(k, j)];
                    if u_kj.norm_sqr() < 1e-30 {
                        continue;
                    }
                    let n_k = mono.count(k) as f64;
                    *next.entry(mono.raised(k)).or_insert(CZERO) += c * u_kj * (n_k + 1.0).sqrt();
                }
            }
            poly = next;
        }
    }
    poly
}

/// Density operator as a weighted list of unit-norm pure branches,
/// ρ = Σ_k w_k |ψ_k⟩⟨ψ_k|. Branches need not be orthogonal; the trace is the
/// weight sum.
#[derive(Clone, Debug)]
pub struct Ensemble {
    registry: ModeRegistry,
    branches: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(registry: ModeRegistry) -> Self {
        Self {
            registry,
            branches: Vec::new(),
        }
    }

    /// Rank-1 ensemble from a pure state: weight is the squared norm, the
    /// stored branch is normalized.
    pub fn from_pure(state: &PureState) -> SimResult<Self> {
        let w = state.norm_sq();
        let mut ens = Self::new(state.registry().clone());
        ens.branches.push((w, state.normalized()?));
        Ok(ens)
    }

    pub fn push(&mut self, weight: f64, state: PureState) -> SimResult<()> {
        if state.registry() != &self.registry {
            return Err(SimError::RegistryMismatch);
        }
        if !(weight >= 0.0) {
            return Err(SimError::InvalidParameter {
                name: "branch weight",
                value: weight,
            });
        }
        let norm_sq = state.norm_sq();
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(SimError::NotNormalized { norm_sq });
        }
        self.branches.push((weight, state));
        Ok(())
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn branches(&self) -> &[(f64, PureState)] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Trace of the represented density operator.
    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|(w, _)| w).sum()
    }

    /// Tr_photons ρ; the result's trace equals the weight sum.
    pub fn partial_trace_to_memory(&self) -> MemoryDensity {
        let mut rho = MemoryDensity::zero();
        for (w, psi) in &self.branches {
            rho.accumulate_scaled(*w, &psi.partial_trace_to_memory());
        }
        rho
    }
}

/// Every occupation vector over `n_modes` modes with at most `max_total`
/// photons, vacuum included, in lexicographic order.
pub fn enumerate_occupations(n_modes: usize, max_total: u32) -> Vec<OccupationVector> {
    fn recurse(
        mode: usize,
        remaining: u32,
        current: &mut Vec<u8>,
        out: &mut Vec<OccupationVector>,
    ) {
        if mode == current.len() {
            out.push(OccupationVector::new(current.clone()));
            return;
        }
        for k in 0..=(remaining.min(255) as u8) {
            current[mode] = k;
            recurse(mode + 1, remaining - k as u32, current, out);
        }
        current[mode] = 0;
    }
    let mut out = Vec::new();
    let mut current = vec![0u8; n_modes];
    recurse(0, max_total, &mut current, &mut out);
    out
}

/// Random unit-norm state with at most `max_terms` basis terms, used by the
/// operator-dominance checks and the property tests. Occupations respect the
/// registry cap by construction.
pub fn random_state<R: Rng>(
    registry: &ModeRegistry,
    max_terms: usize,
    rng: &mut R,
) -> SimResult<PureState> {
    let n_modes = registry.len();
    let cap = registry.cap();
    let n_terms = rng.random_range(1..=max_terms.max(1));
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let total = rng.random_range(0..=cap);
        let mut counts = vec![0u8; n_modes];
        for _ in 0..total {
            counts[rng.random_range(0..n_modes)] += 1;
        }
        let mem_a = MemoryLabel::ALL[rng.random_range(0..3)];
        let mem_b = MemoryLabel::ALL[rng.random_range(0..3)];
        let amp = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        terms.push((
            JointBasisState::new(mem_a, mem_b, OccupationVector::new(counts)),
            amp,
        ));
    }
    PureState::from_terms(registry.clone(), terms)?.normalized()
}

/// Random density operator with unit trace: up to `max_branches` random pure
/// branches with uniformly drawn, normalized weights.
pub fn random_ensemble<R: Rng>(
    registry: &ModeRegistry,
    max_branches: usize,
    max_terms: usize,
    rng: &mut R,
) -> SimResult<Ensemble> {
    let n_branches = rng.random_range(1..=max_branches.max(1));
    let mut weights: Vec<f64> = (0..n_branches)
        .map(|_| rng.random::<f64>() + 1e-3)
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut ens = Ensemble::new(registry.clone());
    for w in weights {
        let state = random_state(registry, max_terms, rng)?;
        ens.push(w, state)?;
    }
    Ok(ens)
}
