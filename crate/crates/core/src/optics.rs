//! Linear-optical elements: mode unitaries, the Bell-analyzer interferometer
//! in three equivalent constructions, and a photon-loss channel.
//!
//! A [`ModeUnitary`] stores the single-photon matrix `U`; its action on Fock
//! states follows from `a_j† -> Σ_k U_kj a_k†` and is carried out by
//! [`PureState::apply_mode_unitary`]. Matrix composition therefore reads
//! right to left: applying `U` then `V` equals applying `V·U`.

use nalgebra::DMatrix;

use crate::error::{SimError, SimResult};
use crate::fock::{Ensemble, PureState};
use crate::modes::ModeRegistry;
use crate::C64;

const CZERO: C64 = C64::new(0.0, 0.0);
const CONE: C64 = C64::new(1.0, 0.0);

/// Unitary matrix over the modes of a registry, validated on construction.
#[derive(Clone, Debug)]
pub struct ModeUnitary {
    registry: ModeRegistry,
    matrix: DMatrix<C64>,
}

impl ModeUnitary {
    /// Deviation of U†U from the identity must stay below this.
    pub const UNITARITY_TOLERANCE: f64 = 1e-10;

    pub fn new(registry: ModeRegistry, matrix: DMatrix<C64>) -> SimResult<Self> {
        let dim = registry.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(SimError::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let gram = matrix.adjoint() * &matrix;
        let mut deviation = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { CONE } else { CZERO };
                deviation = deviation.max((gram[(i, j)] - expect).norm());
            }
        }
        if deviation > Self::UNITARITY_TOLERANCE {
            return Err(SimError::NotUnitary { deviation });
        }
        Ok(Self { registry, matrix })
    }

    pub fn identity(registry: ModeRegistry) -> Self {
        let dim = registry.len();
        Self {
            matrix: DMatrix::identity(dim, dim),
            registry,
        }
    }

    /// Mode permutation: input `j` is sent to `destination[j]`.
    pub fn permutation(registry: ModeRegistry, destination: &[usize]) -> SimResult<Self> {
        let dim = registry.len();
        if destination.len() != dim {
            return Err(SimError::DimensionMismatch {
                expected: dim,
                found: destination.len(),
            });
        }
        let mut matrix = DMatrix::from_element(dim, dim, CZERO);
        for (j, &d) in destination.iter().enumerate() {
            if d >= dim {
                return Err(SimError::ModeOutOfRange {
                    mode: d,
                    n_modes: dim,
                });
            }
            matrix[(d, j)] = CONE;
        }
        // a permutation with a repeated destination is not unitary
        Self::new(registry, matrix)
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// The unitary that applies `self` first and `next` second.
    pub fn then(&self, next: &Self) -> SimResult<Self> {
        if self.registry != next.registry {
            return Err(SimError::RegistryMismatch);
        }
        Ok(Self {
            registry: self.registry.clone(),
            matrix: &next.matrix * &self.matrix,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            registry: self.registry.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Largest entrywise |self − other|, the metric used to compare
    /// independently built interferometers.
    pub fn max_entry_diff(&self, other: &Self) -> f64 {
        let dim = self.registry.len();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max((self.matrix[(i, j)] - other.matrix[(i, j)]).norm());
            }
        }
        worst
    }
}

fn check_distinct_modes(registry: &ModeRegistry, modes: &[usize]) -> SimResult<()> {
    for (pos, &m) in modes.iter().enumerate() {
        if m >= registry.len() {
            return Err(SimError::ModeOutOfRange {
                mode: m,
                n_modes: registry.len(),
            });
        }
        if modes[..pos].contains(&m) {
            return Err(SimError::DuplicateMode(registry.label(m)?));
        }
    }
    Ok(())
}

/// Balanced beamsplitter on two modes, block `[[1, 1], [1, -1]] / √2`.
/// Real and involutive.
pub fn beamsplitter(registry: &ModeRegistry, i: usize, j: usize) -> SimResult<ModeUnitary> {
    check_distinct_modes(registry, &[i, j])?;
    let dim = registry.len();
    let mut m = DMatrix::identity(dim, dim);
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    m[(i, i)] = s;
    m[(i, j)] = s;
    m[(j, i)] = s;
    m[(j, j)] = -s;
    ModeUnitary::new(registry.clone(), m)
}

/// Polarizing beamsplitter across two spatial paths: the horizontal modes
/// swap, the vertical modes pass through. All four participating modes are
/// named so call sites read like the physical layout.
pub fn pbs(
    registry: &ModeRegistry,
    h_i: usize,
    h_j: usize,
    v_i: usize,
    v_j: usize,
) -> SimResult<ModeUnitary> {
    check_distinct_modes(registry, &[h_i, h_j, v_i, v_j])?;
    let mut destination: Vec<usize> = (0..registry.len()).collect();
    destination[h_i] = h_j;
    destination[h_j] = h_i;
    ModeUnitary::permutation(registry.clone(), &destination)
}

/// Half-wave plate at 22.5°, mixing the two polarization modes of one path
/// with the block `[[1, 1], [1, -1]] / √2`.
pub fn hwp(registry: &ModeRegistry, h: usize, v: usize) -> SimResult<ModeUnitary> {
    beamsplitter(registry, h, v)
}

/// Row-major entries of the analyzer, in units of 1/2, over the mode order
/// [H1, H2, H3, H4, V1, V2, V3, V4] for both inputs (columns) and detector
/// outputs (rows).
const ANALYZER_HALF_UNITS: [[f64; 8]; 8] = [
    [0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
    [0.0, 0.0, 1.0, -1.0, 1.0, -1.0, 0.0, 0.0],
    [1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0],
    [0.0, 0.0, 1.0, 1.0, -1.0, -1.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0, -1.0],
    [0.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.0, 0.0],
    [1.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 1.0],
];

/// 4×4 Hadamard-type matrix, in units of 1, appearing twice on the diagonal
/// of the block form of the analyzer.
const HADAMARD4: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

/// Block-form input `i` reads polarization input `BLOCK_INPUT_ORDER[i]`:
/// the order [H3, H4, V1, V2, H1, H2, V3, V4].
pub const BLOCK_INPUT_ORDER: [usize; 8] = [2, 3, 4, 5, 0, 1, 6, 7];

/// Block-form output `i` is polarization output `BLOCK_OUTPUT_ORDER[i]`:
/// the order [H1, H3, V1, V3, H2, H4, V2, V4].
pub const BLOCK_OUTPUT_ORDER: [usize; 8] = [0, 2, 4, 6, 1, 3, 5, 7];

/// The four-path Bell analyzer written directly as its 8×8 matrix over
/// polarization modes [H1..H4, V1..V4].
pub fn bell_interferometer_polarization() -> ModeUnitary {
    let registry = ModeRegistry::bell_stage();
    let matrix = DMatrix::from_fn(8, 8, |i, j| C64::new(ANALYZER_HALF_UNITS[i][j] * 0.5, 0.0));
    ModeUnitary::new(registry, matrix).expect("analyzer constants are unitary")
}

/// The same analyzer assembled from its physical elements: balanced
/// beamsplitters on paths (1,2) and (3,4), polarizing beamsplitters across
/// paths (1,3) and (2,4), a half-wave plate on every output path, and a
/// relabeling that swaps output paths 2 and 3.
pub fn bell_interferometer_composed() -> SimResult<ModeUnitary> {
    let reg = ModeRegistry::bell_stage();
    // mode indices: H1..H4 are 0..3, V1..V4 are 4..7
    let stage = beamsplitter(&reg, 0, 1)?
        .then(&beamsplitter(&reg, 4, 5)?)?
        .then(&beamsplitter(&reg, 2, 3)?)?
        .then(&beamsplitter(&reg, 6, 7)?)?
        .then(&pbs(&reg, 0, 2, 4, 6)?)?
        .then(&pbs(&reg, 1, 3, 5, 7)?)?
        .then(&hwp(&reg, 0, 4)?)?
        .then(&hwp(&reg, 1, 5)?)?
        .then(&hwp(&reg, 2, 6)?)?
        .then(&hwp(&reg, 3, 7)?)?;
    let relabel = ModeUnitary::permutation(reg, &[0, 2, 1, 3, 4, 6, 5, 7])?;
    stage.then(&relabel)
}

/// The analyzer in its permuted basis, where it is block diagonal with two
/// copies of the scaled Hadamard-type block. Modes are abstract paths 1..8;
/// [`BLOCK_INPUT_ORDER`] / [`BLOCK_OUTPUT_ORDER`] map them back.
pub fn bell_interferometer_blockform() -> SimResult<ModeUnitary> {
    let registry = ModeRegistry::paths(8, 4)?;
    let matrix = DMatrix::from_fn(8, 8, |i, j| {
        if (i < 4) == (j < 4) {
            C64::new(HADAMARD4[i % 4][j % 4] * 0.5, 0.0)
        } else {
            CZERO
        }
    });
    ModeUnitary::new(registry, matrix)
}

/// Undo the basis permutation of the block form, landing back on the
/// polarization mode order. Equals [`bell_interferometer_polarization`]
/// exactly, entry by entry.
pub fn blockform_in_polarization_order() -> SimResult<ModeUnitary> {
    let block = bell_interferometer_blockform()?;
    let registry = ModeRegistry::bell_stage();
    let mut matrix = DMatrix::from_element(8, 8, CZERO);
    for i in 0..8 {
        for j in 0..8 {
            matrix[(BLOCK_OUTPUT_ORDER[i], BLOCK_INPUT_ORDER[j])] = block.matrix()[(i, j)];
        }
    }
    ModeUnitary::new(registry, matrix)
}

/// Uniform photon loss on a set of modes: each listed mode transmits a photon
/// with probability `eta`, independently.
#[derive(Clone, Debug)]
pub struct LossChannel {
    eta: f64,
    modes: Vec<usize>,
}

impl LossChannel {
    /// Branch weights below this are dropped while expanding the channel.
    const BRANCH_FLOOR: f64 = 1e-14;

    /// Total dropped weight above this aborts with a probability-leak error.
    const LEAK_TOLERANCE: f64 = 1e-12;

    pub fn new(eta: f64, modes: Vec<usize>) -> SimResult<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(SimError::InvalidParameter {
                name: "eta",
                value: eta,
            });
        }
        for (pos, &m) in modes.iter().enumerate() {
            if modes[..pos].contains(&m) {
                return Err(SimError::InvalidParameter {
                    name: "loss mode listed twice",
                    value: m as f64,
                });
            }
        }
        Ok(Self { eta, modes })
    }

    /// Loss on every mode of an `n_modes`-wide registry.
    pub fn uniform(eta: f64, n_modes: usize) -> SimResult<Self> {
        Self::new(eta, (0..n_modes).collect())
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    /// Expand the channel on a pure state into an ensemble of normalized
    /// branches, one per combination of photons lost. The weight sum equals
    /// the squared input norm up to the documented pruning floor.
    pub fn apply_loss(&self, state: &PureState) -> SimResult<Ensemble> {
        for &m in &self.modes {
            if m >= state.registry().len() {
                return Err(SimError::ModeOutOfRange {
                    mode: m,
                    n_modes: state.registry().len(),
                });
            }
        }
        let total_in = state.norm_sq();
        let mut branches = vec![state.clone()];
        for &mode in &self.modes {
            let mut next = Vec::with_capacity(branches.len() * 2);
            for branch in &branches {
                let max_lost = branch
                    .terms()
                    .map(|(b, _)| b.photons.count(mode))
                    .max()
                    .unwrap_or(0);
                for k in 0..=max_lost {
                    let survivor = apply_kraus(branch, mode, k, self.eta)?;
                    if survivor.term_count() > 0 {
                        next.push(survivor);
                    }
                }
            }
            branches = next;
        }
        let mut out = Ensemble::new(state.registry().clone());
        let mut kept = 0.0;
        for branch in branches {
            let w = branch.norm_sq();
            if w < Self::BRANCH_FLOOR {
                continue;
            }
            kept += w;
            out.push(w, branch.normalized()?)?;
        }
        let dropped = total_in - kept;
        if dropped > Self::LEAK_TOLERANCE {
            return Err(SimError::ProbabilityLeak { dropped });
        }
        Ok(out)
    }

    /// Apply the channel to every branch of an ensemble, multiplying weights.
    pub fn apply_loss_ensemble(&self, ensemble: &Ensemble) -> SimResult<Ensemble> {
        let mut out = Ensemble::new(ensemble.registry().clone());
        for (w, psi) in ensemble.branches() {
            for (w_loss, branch) in self.apply_loss(psi)?.branches() {
                out.push(w * w_loss, branch.clone())?;
            }
        }
        Ok(out)
    }
}

/// One Kraus operator of single-mode loss:
/// `K_k |n⟩ = √(C(n,k) η^{n−k} (1−η)^k) |n−k⟩`.
/// `η^0 = 1` holds even at η = 0, so the vacuum Kraus element is exact there.
fn apply_kraus(state: &PureState, mode: usize, k: u8, eta: f64) -> SimResult<PureState> {
    let mut terms = Vec::new();
    for (basis, amp) in state.terms() {
        let n = basis.photons.count(mode);
        if n < k {
            continue;
        }
        let coeff = (binomial(n, k) * eta.powi((n - k) as i32) * (1.0 - eta).powi(k as i32)).sqrt();
        if coeff == 0.0 {
            continue;
        }
        let mut occ = basis.photons.clone();
        for _ in 0..k {
            occ = occ.lowered(mode).expect("count checked above");
        }
        terms.push((
            crate::fock::JointBasisState::new(basis.mem_a, basis.mem_b, occ),
            amp * coeff,
        ));
    }
    PureState::from_terms(state.registry().clone(), terms)
}

fn binomial(n: u8, k: u8) -> f64 {
    let (n, k) = (n as u64, k as u64);
    let k = k.min(n - k);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    (num / den) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{JointBasisState, MemoryLabel, OccupationVector, PureState};
    use approx::assert_abs_diff_eq;

    fn single_photon(reg: &ModeRegistry, mode: usize) -> PureState {
        PureState::basis_state(
            reg.clone(),
            MemoryLabel::Zero,
            MemoryLabel::Zero,
            OccupationVector::single(reg.len(), mode),
        )
        .unwrap()
    }

    #[test]
    fn beamsplitter_is_involutive() {
        let reg = ModeRegistry::paths(3, 4).unwrap();
        let bs = beamsplitter(&reg, 0, 2).unwrap();
        let twice = bs.then(&bs).unwrap();
        let id = ModeUnitary::identity(reg);
        assert!(twice.max_entry_diff(&id) < 1e-12);
    }

    #[test]
    fn pbs_swaps_horizontal_only() {
        let reg = ModeRegistry::bell_stage();
        let u = pbs(&reg, 0, 2, 4, 6).unwrap();
        let h1 = single_photon(&reg, 0).apply_mode_unitary(&u).unwrap();
        assert_abs_diff_eq!(
            h1.amplitude(&JointBasisState::new(
                MemoryLabel::Zero,
                MemoryLabel::Zero,
                OccupationVector::single(8, 2),
            ))
            .re,
            1.0,
            epsilon = 1e-12
        );
        let v1 = single_photon(&reg, 4).apply_mode_unitary(&u).unwrap();
        assert_abs_diff_eq!(
            v1.amplitude(&JointBasisState::new(
                MemoryLabel::Zero,
                MemoryLabel::Zero,
                OccupationVector::single(8, 4),
            ))
            .re,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn hwp_mixes_polarizations_of_one_path() {
        let reg = ModeRegistry::polarization_pair(1);
        let u = hwp(&reg, 0, 1).unwrap();
        let out = single_photon(&reg, 1).apply_mode_unitary(&u).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(
            out.amplitude(&JointBasisState::new(
                MemoryLabel::Zero,
                MemoryLabel::Zero,
                OccupationVector::single(2, 0),
            ))
            .re,
            s,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            out.amplitude(&JointBasisState::new(
                MemoryLabel::Zero,
                MemoryLabel::Zero,
                OccupationVector::single(2, 1),
            ))
            .re,
            -s,
            epsilon = 1e-12
        );
    }

    #[test]
    fn duplicate_modes_rejected() {
        let reg = ModeRegistry::bell_stage();
        assert!(matches!(
            beamsplitter(&reg, 3, 3).unwrap_err(),
            SimError::DuplicateMode(_)
        ));
        assert!(matches!(
            pbs(&reg, 0, 2, 4, 2).unwrap_err(),
            SimError::DuplicateMode(_)
        ));
    }

    #[test]
    fn analyzer_entries() {
        let u = bell_interferometer_polarization();
        let m = u.matrix();
        // (H1' row, H3 column)
        assert_abs_diff_eq!(m[(0, 2)].re, 0.5, epsilon = 1e-15);
        // (H3' row, H4 column)
        assert_abs_diff_eq!(m[(2, 3)].re, -0.5, epsilon = 1e-15);
        // (V2' row, V3 column)
        assert_abs_diff_eq!(m[(5, 6)].re, -0.5, epsilon = 1e-15);
        // H modes of paths 1 and 2 never reach detectors on paths 1 or 3
        assert_abs_diff_eq!(m[(0, 0)].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(2, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hadamard_block_rows() {
        for (i, row) in HADAMARD4.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            assert_abs_diff_eq!(sum, if i == 0 { 4.0 } else { 0.0 }, epsilon = 1e-15);
            let norm_sq: f64 = row.iter().map(|x| x * x).sum();
            assert_abs_diff_eq!(norm_sq, 4.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn three_constructions_agree() {
        let literal = bell_interferometer_polarization();
        let composed = bell_interferometer_composed().unwrap();
        let permuted = blockform_in_polarization_order().unwrap();
        assert!(literal.max_entry_diff(&composed) < 1e-12);
        assert!(literal.max_entry_diff(&permuted) < 1e-12);
    }

    #[test]
    fn permutation_with_collision_is_rejected() {
        let reg = ModeRegistry::paths(3, 4).unwrap();
        assert!(matches!(
            ModeUnitary::permutation(reg, &[0, 0, 2]).unwrap_err(),
            SimError::NotUnitary { .. }
        ));
    }

    #[test]
    fn lossless_channel_is_identity() {
        let reg = ModeRegistry::paths(2, 4).unwrap();
        let state = PureState::from_terms(
            reg.clone(),
            [
                (
                    JointBasisState::new(
                        MemoryLabel::Zero,
                        MemoryLabel::One,
                        OccupationVector::new(vec![2, 1]),
                    ),
                    C64::new(0.6, 0.0),
                ),
                (
                    JointBasisState::new(
                        MemoryLabel::One,
                        MemoryLabel::Zero,
                        OccupationVector::vacuum(2),
                    ),
                    C64::new(0.8, 0.0),
                ),
            ],
        )
        .unwrap();
        let channel = LossChannel::uniform(1.0, 2).unwrap();
        let ens = channel.apply_loss(&state).unwrap();
        assert_eq!(ens.len(), 1);
        let (w, branch) = &ens.branches()[0];
        assert_abs_diff_eq!(*w, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            branch.inner_product(&state).unwrap().re,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn single_photon_splits_into_two_branches() {
        let reg = ModeRegistry::paths(1, 4).unwrap();
        let state = single_photon(&reg, 0);
        let eta = 0.7;
        let ens = LossChannel::uniform(eta, 1)
            .unwrap()
            .apply_loss(&state)
            .unwrap();
        assert_eq!(ens.len(), 2);
        let mut weights: Vec<f64> = ens.branches().iter().map(|(w, _)| *w).collect();
        weights.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(weights[0], 1.0 - eta, epsilon = 1e-12);
        assert_abs_diff_eq!(weights[1], eta, epsilon = 1e-12);
    }

    #[test]
    fn two_photons_lose_binomially() {
        let reg = ModeRegistry::paths(1, 4).unwrap();
        let state = PureState::basis_state(
            reg.clone(),
            MemoryLabel::Zero,
            MemoryLabel::Zero,
            OccupationVector::new(vec![2]),
        )
        .unwrap();
        let ens = LossChannel::uniform(0.5, 1)
            .unwrap()
            .apply_loss(&state)
            .unwrap();
        let mut by_photons: Vec<(u32, f64)> = ens
            .branches()
            .iter()
            .map(|(w, b)| (b.terms().next().unwrap().0.photons.total(), *w))
            .collect();
        by_photons.sort_by_key(|&(n, _)| n);
        assert_eq!(by_photons.len(), 3);
        assert_abs_diff_eq!(by_photons[0].1, 0.25, epsilon = 1e-12); // both lost
        assert_abs_diff_eq!(by_photons[1].1, 0.5, epsilon = 1e-12); // one lost
        assert_abs_diff_eq!(by_photons[2].1, 0.25, epsilon = 1e-12); // none lost
    }

    #[test]
    fn channel_preserves_trace_on_random_states() {
        use rand::SeedableRng;
        let reg = ModeRegistry::bell_stage();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        for _ in 0..10 {
            let state = crate::fock::random_state(&reg, 10, &mut rng).unwrap();
            let ens = LossChannel::uniform(0.63, 8)
                .unwrap()
                .apply_loss(&state)
                .unwrap();
            assert_abs_diff_eq!(ens.total_weight(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn full_loss_leaves_vacuum() {
        let reg = ModeRegistry::paths(2, 4).unwrap();
        let state = PureState::basis_state(
            reg.clone(),
            MemoryLabel::One,
            MemoryLabel::Two,
            OccupationVector::new(vec![2, 1]),
        )
        .unwrap();
        let ens = LossChannel::uniform(0.0, 2)
            .unwrap()
            .apply_loss(&state)
            .unwrap();
        assert_eq!(ens.len(), 1);
        let (w, branch) = &ens.branches()[0];
        assert_abs_diff_eq!(*w, 1.0, epsilon = 1e-12);
        let (basis, _) = branch.terms().next().unwrap();
        assert!(basis.photons.is_vacuum());
        // memory labels ride through the channel untouched
        assert_eq!(basis.mem_a, MemoryLabel::One);
        assert_eq!(basis.mem_b, MemoryLabel::Two);
    }

    #[test]
    fn eta_out_of_range_rejected() {
        assert!(LossChannel::new(1.2, vec![0]).is_err());
        assert!(LossChannel::new(-0.1, vec![0]).is_err());
        assert!(LossChannel::new(0.5, vec![0, 0]).is_err());
    }
}
