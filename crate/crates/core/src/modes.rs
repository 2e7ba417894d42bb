//! Mode labels and the registry that fixes mode ordering for a simulation.
//!
//! Every state and operator is bound to a [`ModeRegistry`]: an ordered list of
//! distinct mode labels plus the global photon cap. Two objects interoperate
//! only when their registries agree, which turns silent index mix-ups into
//! hard errors.

use std::fmt;

use crate::error::{SimError, SimResult};

/// Photon cap used throughout the swapping protocol: two source photons plus
/// the two-photon auxiliary pair. Exceeding it is a hard error, never a
/// silent truncation.
pub const DEFAULT_PHOTON_CAP: u32 = 4;

/// Label of a single optical mode.
///
/// `H(i)`/`V(i)` are the horizontal and vertical polarization modes of
/// spatial path `i`; `Path(i)` is a bare path mode for circuits that do not
/// distinguish polarization (block-form interferometer, test fixtures).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ModeLabel {
    H(u8),
    V(u8),
    Path(u8),
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::H(i) => write!(f, "H{i}"),
            ModeLabel::V(i) => write!(f, "V{i}"),
            ModeLabel::Path(i) => write!(f, "a{i}"),
        }
    }
}

/// Ordered set of distinct mode labels plus the photon cap they share.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModeRegistry {
    labels: Vec<ModeLabel>,
    cap: u32,
}

impl ModeRegistry {
    pub fn new(labels: Vec<ModeLabel>, cap: u32) -> SimResult<Self> {
        if labels.is_empty() {
            return Err(SimError::EmptyRegistry);
        }
        if cap == 0 {
            return Err(SimError::InvalidParameter {
                name: "photon cap",
                value: 0.0,
            });
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[i + 1..].contains(a) {
                return Err(SimError::DuplicateMode(*a));
            }
        }
        Ok(Self { labels, cap })
    }

    /// The eight-mode registry of the Bell-measurement stage, ordered
    /// `H1, H2, H3, H4, V1, V2, V3, V4`. All transfer matrices in
    /// [`crate::optics`] and all detector indices in [`crate::protocol`] use
    /// this ordering.
    pub fn bell_stage() -> Self {
        let labels = (1..=4)
            .map(ModeLabel::H)
            .chain((1..=4).map(ModeLabel::V))
            .collect();
        Self {
            labels,
            cap: DEFAULT_PHOTON_CAP,
        }
    }

    /// Two-mode registry `[H(path), V(path)]` for a single spatial path,
    /// sharing the global cap so states embed into the Bell stage directly.
    pub fn polarization_pair(path: u8) -> Self {
        Self {
            labels: vec![ModeLabel::H(path), ModeLabel::V(path)],
            cap: DEFAULT_PHOTON_CAP,
        }
    }

    /// Registry of `n` bare path modes `a1..an`.
    pub fn paths(n: u8, cap: u32) -> SimResult<Self> {
        Self::new((1..=n).map(ModeLabel::Path).collect(), cap)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> SimResult<ModeLabel> {
        self.labels
            .get(index)
            .copied()
            .ok_or(SimError::ModeOutOfRange {
                mode: index,
                n_modes: self.labels.len(),
            })
    }

    pub fn index_of(&self, label: ModeLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }
}
