//! Brute-force dense reference implementation over the full capped Fock
//! space, used only to cross-validate the sparse engine.
//!
//! Everything here is deliberately written along a different route than the
//! library: states are dense matrices over an explicitly enumerated basis,
//! optical elements become explicit lifted matrices built from dense
//! creation operators, loss is dense matrix multiplication by Kraus
//! matrices, and the analyzer constants are entered separately. Agreement
//! between the two routes is evidence, not construction.

use std::collections::HashMap;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

type C64 = num_complex::Complex64;

fn factorial(n: u8) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

fn binomial(n: u8, k: u8) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Explicit basis of all occupation vectors with at most `cap` photons.
pub struct DenseSpace {
    pub occs: Vec<Vec<u8>>,
    pub index: HashMap<Vec<u8>, usize>,
    pub n_modes: usize,
    pub cap: u32,
}

impl DenseSpace {
    /// Enumerate by counting in base `cap + 1` and keeping the vectors whose
    /// totals fit, a deliberately different walk than the library's.
    pub fn new(n_modes: usize, cap: u32) -> Self {
        let base = cap as u64 + 1;
        let mut occs = Vec::new();
        let mut code = 0u64;
        let end = base.pow(n_modes as u32);
        while code < end {
            let mut c = code;
            let mut occ = vec![0u8; n_modes];
            for slot in occ.iter_mut() {
                *slot = (c % base) as u8;
                c /= base;
            }
            if occ.iter().map(|&n| n as u32).sum::<u32>() <= cap {
                occs.push(occ);
            }
            code += 1;
        }
        occs.sort();
        let index = occs
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i))
            .collect();
        Self {
            occs,
            index,
            n_modes,
            cap,
        }
    }

    pub fn dim(&self) -> usize {
        self.occs.len()
    }

    /// Dense `a_mode†` restricted to the capped space: states at the cap are
    /// annihilated rather than overflowing.
    pub fn creation_matrix(&self, mode: usize) -> DMatrix<C64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (col, occ) in self.occs.iter().enumerate() {
            let total: u32 = occ.iter().map(|&n| n as u32).sum();
            if total >= self.cap {
                continue;
            }
            let mut raised = occ.clone();
            raised[mode] += 1;
            let row = self.index[&raised];
            m[(row, col)] = C64::new((occ[mode] as f64 + 1.0).sqrt(), 0.0);
        }
        m
    }

    /// Lift a single-photon unitary to the full space, column by column:
    /// the image of basis ket `|n⟩` is
    /// `Π_j (Σ_k U_kj a_k†)^{n_j} |vac⟩ / √(Π_j n_j!)`.
    pub fn lift_unitary(&self, u: &DMatrix<C64>) -> DMatrix<C64> {
        let dim = self.dim();
        let images: Vec<DMatrix<C64>> = (0..self.n_modes)
            .map(|j| {
                let mut b = DMatrix::zeros(dim, dim);
                for k in 0..self.n_modes {
                    b += self.creation_matrix(k) * u[(k, j)];
                }
                b
            })
            .collect();
        let vac = self.index[&vec![0u8; self.n_modes]];
        let mut lifted = DMatrix::zeros(dim, dim);
        for (col, occ) in self.occs.iter().enumerate() {
            let mut v: DVector<C64> = DVector::zeros(dim);
            v[vac] = C64::new(1.0, 0.0);
            for (j, &n) in occ.iter().enumerate() {
                for _ in 0..n {
                    v = &images[j] * v;
                }
            }
            let norm = occ.iter().map(|&n| factorial(n)).product::<f64>().sqrt();
            lifted.set_column(col, &v.unscale(norm));
        }
        lifted
    }

    /// Dense Kraus matrix for losing exactly `k` photons from one mode at
    /// transmission `eta`.
    pub fn kraus(&self, mode: usize, k: u8, eta: f64) -> DMatrix<C64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (col, occ) in self.occs.iter().enumerate() {
            let n = occ[mode];
            if n < k {
                continue;
            }
            let coeff =
                (binomial(n, k) * eta.powi((n - k) as i32) * (1.0 - eta).powi(k as i32)).sqrt();
            let mut lowered = occ.clone();
            lowered[mode] -= k;
            let row = self.index[&lowered];
            m[(row, col)] = C64::new(coeff, 0.0);
        }
        m
    }

    /// Expand uniform loss on all modes into unnormalized branches, each a
    /// 9×dim matrix; squared Frobenius norms are the branch weights.
    pub fn loss_branches(&self, psi: &DMatrix<C64>, eta: f64) -> Vec<DMatrix<C64>> {
        let mut branches = vec![psi.clone()];
        for mode in 0..self.n_modes {
            let mut next = Vec::new();
            for branch in &branches {
                let max_occupied = self
                    .occs
                    .iter()
                    .enumerate()
                    .filter(|(col, _)| branch.column(*col).norm_squared() > 0.0)
                    .map(|(_, occ)| occ[mode])
                    .max()
                    .unwrap_or(0);
                for k in 0..=max_occupied {
                    let kt = self.kraus(mode, k, eta).transpose();
                    let moved = branch * kt;
                    if moved.norm_squared() > 1e-30 {
                        next.push(moved);
                    }
                }
            }
            branches = next;
        }
        branches
    }
}

/// The analyzer's 8×8 matrix over modes [H1..H4, V1..V4], entered here
/// separately from the library's constants.
pub fn analyzer_matrix() -> DMatrix<C64> {
    const HALF_UNITS: [[f64; 8]; 8] = [
        [0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 1.0, -1.0, 1.0, -1.0, 0.0, 0.0],
        [1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0],
        [0.0, 0.0, 1.0, 1.0, -1.0, -1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0, -1.0],
        [0.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.0, 0.0],
        [1.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 1.0],
    ];
    DMatrix::from_fn(8, 8, |i, j| C64::new(HALF_UNITS[i][j] * 0.5, 0.0))
}

/// The shared eight-mode, four-photon space.
pub fn standard_space() -> &'static DenseSpace {
    static SPACE: OnceLock<DenseSpace> = OnceLock::new();
    SPACE.get_or_init(|| DenseSpace::new(8, 4))
}

/// The analyzer lifted to the standard space, built once.
pub fn lifted_analyzer() -> &'static DMatrix<C64> {
    static LIFTED: OnceLock<DMatrix<C64>> = OnceLock::new();
    LIFTED.get_or_init(|| standard_space().lift_unitary(&analyzer_matrix()))
}

/// Joint input state as a dense 9×dim matrix: rows are the two-memory basis
/// `3a + b`, columns the photon basis. Mode indices: Alice emits into
/// (H1, V1) = (0, 4), Bob into (H2, V2) = (1, 5), the auxiliary pair sits on
/// (H3, V3) = (2, 6).
pub fn initial_dense(space: &DenseSpace, p: f64, alpha: f64) -> DMatrix<C64> {
    let v = (1.0 - p).sqrt();
    let q = (p / 2.0).sqrt();
    let beta = (1.0 - alpha * alpha).sqrt();
    let alice: [(usize, Option<usize>, f64); 3] = [(0, None, v), (1, Some(0), q), (2, Some(4), q)];
    let bob: [(usize, Option<usize>, f64); 3] = [(0, None, v), (1, Some(1), q), (2, Some(5), q)];
    let aux: [(&[usize], f64); 2] = [(&[], beta), (&[2, 6], alpha)];
    let mut psi = DMatrix::zeros(9, space.dim());
    for &(ma, mode_a, amp_a) in &alice {
        for &(mb, mode_b, amp_b) in &bob {
            for &(modes_x, amp_x) in &aux {
                let mut occ = vec![0u8; space.n_modes];
                if let Some(m) = mode_a {
                    occ[m] += 1;
                }
                if let Some(m) = mode_b {
                    occ[m] += 1;
                }
                for &m in modes_x {
                    occ[m] += 1;
                }
                psi[(3 * ma + mb, space.index[&occ])] += C64::new(amp_a * amp_b * amp_x, 0.0);
            }
        }
    }
    psi
}

/// Detector occupations a coincidence accepts: exactly one photon at each
/// clicked detector for number-resolving detectors, at least one for
/// threshold detectors, vacuum everywhere else.
pub fn detector_occupations(
    space: &DenseSpace,
    first: usize,
    second: usize,
    number_resolving: bool,
) -> Vec<Vec<u8>> {
    space
        .occs
        .iter()
        .filter(|occ| {
            let n1 = occ[first];
            let n2 = occ[second];
            let clicked = if number_resolving {
                n1 == 1 && n2 == 1
            } else {
                n1 >= 1 && n2 >= 1
            };
            let total: u32 = occ.iter().map(|&n| n as u32).sum();
            clicked && total == (n1 + n2) as u32
        })
        .cloned()
        .collect()
}

/// Project the loss branches onto the accepted detector outcomes pulled
/// back through the lifted analyzer; returns the outcome probability and
/// the unnormalized 9×9 two-memory operator.
pub fn herald_dense(
    space: &DenseSpace,
    branches: &[DMatrix<C64>],
    lifted: &DMatrix<C64>,
    accepted: &[Vec<u8>],
) -> (f64, DMatrix<C64>) {
    let mut rho: DMatrix<C64> = DMatrix::zeros(9, 9);
    for occ in accepted {
        let t = space.index[occ];
        // m[mem] = ⟨U†e_t | ψ_mem⟩ = Σ_occ Γ[t, occ] ψ[mem, occ]
        let row_t = lifted.row(t).transpose();
        for branch in branches {
            let m = branch * &row_t;
            rho += &m * m.adjoint();
        }
    }
    (rho.trace().re, rho)
}

/// ⟨t|ρ/Tr ρ|t⟩ against the all-plus maximally entangled two-memory target
/// `(|00⟩ + |12⟩ + |21⟩)/√3`.
pub fn fidelity_all_plus(rho: &DMatrix<C64>) -> f64 {
    let third = C64::new((1f64 / 3.0).sqrt(), 0.0);
    let mut t: DVector<C64> = DVector::zeros(9);
    t[0] = third;
    t[5] = third;
    t[7] = third;
    let trace = rho.trace().re;
    ((t.adjoint() * rho * t)[(0, 0)].re) / trace
}
