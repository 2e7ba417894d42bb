//! Dense operators on the 9-dimensional two-memory space.
//!
//! Basis order is `|a,b⟩ -> 3a + b` for memory levels `a, b ∈ {0,1,2}`, the
//! same indexing [`JointBasisState::memory_index`](crate::fock::JointBasisState::memory_index)
//! uses. Heralded states live here after the photonic modes are projected
//! out, so 9×9 dense storage is exact and cheap.

use nalgebra::{SMatrix, SVector};

use crate::error::{SimError, SimResult};
use crate::C64;

type Vec9 = SVector<C64, 9>;
type Mat9 = SMatrix<C64, 9, 9>;

const CZERO: C64 = C64::new(0.0, 0.0);

/// Eigenvalues at or below this are treated as exact zeros when computing
/// entropies; rounding in the eigensolver sits orders of magnitude below it.
const EIGENVALUE_FLOOR: f64 = 1e-15;

/// Vector in the two-memory space, not necessarily normalized.
#[derive(Clone, Debug)]
pub struct MemoryVector(Vec9);

impl MemoryVector {
    pub fn zero() -> Self {
        Self(Vec9::from_element(CZERO))
    }

    pub fn from_amplitudes(amps: [C64; 9]) -> Self {
        Self(Vec9::from_row_slice(&amps))
    }

    /// Basis ket |a,b⟩.
    pub fn basis(a: usize, b: usize) -> Self {
        let mut v = Self::zero();
        v.0[3 * a + b] = C64::new(1.0, 0.0);
        v
    }

    pub fn get(&self, index: usize) -> C64 {
        self.0[index]
    }

    pub fn set(&mut self, index: usize, value: C64) {
        self.0[index] = value;
    }

    pub fn add_assign(&mut self, index: usize, value: C64) {
        self.0[index] += value;
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn normalized(&self) -> SimResult<Self> {
        let n = self.norm();
        if n < 1e-150 {
            return Err(SimError::ZeroNorm);
        }
        Ok(Self(self.0.scale(1.0 / n)))
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.dotc(&other.0)
    }
}

/// 9×9 operator on the two-memory space. Used both for density operators and
/// for intermediate accumulations whose trace is a probability rather than 1.
#[derive(Clone, Debug)]
pub struct MemoryDensity(Mat9);

impl MemoryDensity {
    pub fn zero() -> Self {
        Self(Mat9::from_element(CZERO))
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_matrix(&self) -> &Mat9 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// ρ += w |v⟩⟨v|.
    pub fn accumulate_outer(&mut self, weight: f64, v: &MemoryVector) {
        let w = C64::new(weight, 0.0);
        for i in 0..9 {
            for j in 0..9 {
                self.0[(i, j)] += w * v.0[i] * v.0[j].conj();
            }
        }
    }

    /// ρ += w σ.
    pub fn accumulate_scaled(&mut self, weight: f64, other: &Self) {
        self.0 += other.0.scale(weight);
    }

    /// ρ / Tr ρ.
    pub fn normalized(&self) -> SimResult<Self> {
        let t = self.trace();
        if t < 1e-150 {
            return Err(SimError::ZeroNorm);
        }
        Ok(Self(self.0.scale(1.0 / t)))
    }

    /// Largest entrywise |self − other|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..9 {
            for j in 0..9 {
                worst = worst.max((self.0[(i, j)] - other.0[(i, j)]).norm());
            }
        }
        worst
    }

    /// Check the operator is Hermitian and positive semidefinite, the two
    /// properties every accumulation in this crate must preserve.
    pub fn validate(&self) -> SimResult<()> {
        let mut deviation = 0.0f64;
        for i in 0..9 {
            for j in 0..9 {
                deviation = deviation.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        if deviation > 1e-12 {
            return Err(SimError::NotHermitian { deviation });
        }
        let min_eig = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(SimError::NotPositive { min_eig });
        }
        Ok(())
    }

    /// Real eigenvalues of the Hermitian part, ascending order not guaranteed.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let hermitian = (self.0 + self.0.adjoint()).scale(0.5);
        hermitian
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    /// ⟨target|ρ|target⟩ for a unit-norm target ket.
    pub fn fidelity_with(&self, target: &MemoryVector) -> f64 {
        let image = self.0 * target.0;
        target.0.dotc(&image).re
    }

    /// Von Neumann entropy of ρ / Tr ρ, in bits. NaN when the trace vanishes.
    pub fn entropy_bits(&self) -> f64 {
        let t = self.trace();
        if t < 1e-150 {
            return f64::NAN;
        }
        let eigs: Vec<f64> = self.eigenvalues().into_iter().map(|l| l / t).collect();
        entropy_bits_from_eigenvalues(&eigs)
    }

    /// Tr_B of ρ / Tr ρ: the 3×3 state of memory A alone.
    pub fn reduced_memory_a(&self) -> SimResult<[[C64; 3]; 3]> {
        let t = self.trace();
        if t < 1e-150 {
            return Err(SimError::ZeroNorm);
        }
        let mut out = [[CZERO; 3]; 3];
        for (a, row) in out.iter_mut().enumerate() {
            for (ap, entry) in row.iter_mut().enumerate() {
                for b in 0..3 {
                    *entry += self.0[(3 * a + b, 3 * ap + b)];
                }
                *entry /= t;
            }
        }
        Ok(out)
    }

    /// Entanglement between the two memories measured as S(Tr_B ρ̂) in bits,
    /// with ρ̂ = ρ / Tr ρ. Coincides with the entropy of entanglement when
    /// ρ̂ is pure.
    pub fn entanglement_entropy_bits(&self) -> SimResult<f64> {
        Ok(entropy_bits_of_hermitian3(&self.reduced_memory_a()?))
    }
}

/// −Σ λ log₂ λ over eigenvalues above [`EIGENVALUE_FLOOR`]. Tiny negative
/// eigenvalues from rounding are ignored by the same cut.
pub fn entropy_bits_from_eigenvalues(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > EIGENVALUE_FLOOR)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Entropy in bits of a 3×3 Hermitian matrix given as nested arrays.
pub fn entropy_bits_of_hermitian3(m: &[[C64; 3]; 3]) -> f64 {
    let mat = SMatrix::<C64, 3, 3>::from_fn(|i, j| (m[i][j] + m[j][i].conj()) * 0.5);
    let eigs: Vec<f64> = mat.symmetric_eigen().eigenvalues.iter().copied().collect();
    entropy_bits_from_eigenvalues(&eigs)
}
