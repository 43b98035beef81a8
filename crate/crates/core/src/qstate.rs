//! Dense pure states and density matrices over small qubit registers.
//!
//! Basis convention: qubit 0 (label `A`) is the most significant bit, so the
//! amplitude of `|q_A q_B ... q_last>` sits at index
//! `q_A·2^(n-1) + ... + q_last·2^0`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Mat2, C64, ZERO};

pub const MAX_QUBITS: usize = 8;
/// Tolerance for normalization, Hermiticity and unit trace.
pub const STATE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-EIGEN_FLOOR, 0)` are clipped to zero; below that is an error.
pub const EIGEN_FLOOR: f64 = 1e-10;

/// Position of a qubit in its register; `Qubit(0)` is labelled `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "String")]
pub struct Qubit(pub usize);

impl Qubit {
    pub const A: Qubit = Qubit(0);
    pub const B: Qubit = Qubit(1);
    pub const C: Qubit = Qubit(2);
    pub const D: Qubit = Qubit(3);

    pub fn label(self) -> char {
        default_label(self.0)
    }

    /// Parses a default register label (`A`, `B`, ...).
    pub fn from_label(label: char) -> Option<Qubit> {
        let c = label.to_ascii_uppercase();
        c.is_ascii_uppercase()
            .then(|| Qubit((c as u8 - b'A') as usize))
            .filter(|q| q.0 < MAX_QUBITS)
    }
}

impl From<Qubit> for String {
    fn from(q: Qubit) -> String {
        String::from(q.label())
    }
}

fn default_label(i: usize) -> char {
    (b'A' + i as u8) as char
}

fn default_labels(n: usize) -> Vec<char> {
    (0..n).map(default_label).collect()
}

#[inline]
fn bit_mask(n_qubits: usize, q: Qubit) -> usize {
    1 << (n_qubits - 1 - q.0)
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::RegisterSize(n_qubits));
    }
    Ok(())
}

fn qubits_from_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Format(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    check_register(n)?;
    Ok(n)
}

/// Validates a kept subset and returns it in register order.
fn check_subset(n_qubits: usize, keep: &[Qubit]) -> Result<Vec<Qubit>> {
    let mut sorted: Vec<Qubit> = keep.to_vec();
    sorted.sort();
    sorted.dedup();
    if let Some(q) = sorted.iter().find(|q| q.0 >= n_qubits) {
        return Err(Error::InvalidQubit {
            index: q.0,
            n_qubits,
        });
    }
    if sorted.len() != keep.len() {
        return Err(Error::Subset(String::from("repeated qubit")));
    }
    if sorted.is_empty() || sorted.len() == n_qubits {
        return Err(Error::Subset(format!(
            "kept {} of {} qubits",
            sorted.len(),
            n_qubits
        )));
    }
    Ok(sorted)
}

/// Splits every basis index into (kept index, traced index).
fn split_indices(n_qubits: usize, keep: &[Qubit]) -> Vec<(usize, usize)> {
    let traced: Vec<Qubit> = (0..n_qubits)
        .map(Qubit)
        .filter(|q| !keep.contains(q))
        .collect();
    let gather = |i: usize, qs: &[Qubit]| {
        qs.iter().fold(0usize, |acc, &q| {
            (acc << 1) | usize::from(i & bit_mask(n_qubits, q) != 0)
        })
    };
    (0..1usize << n_qubits)
        .map(|i| (gather(i, keep), gather(i, &traced)))
        .collect()
}

/// Normalized state vector over an ordered qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    labels: Vec<char>,
}

impl PureState {
    /// Normalizes `amplitudes` (length `2^n`, `1 <= n <= 8`) and returns the
    /// state together with the original norm.
    pub fn new(amplitudes: Vec<C64>) -> Result<(Self, f64)> {
        let n = qubits_from_dim(amplitudes.len())?;
        let norm = libm::sqrt(amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Normalization);
        }
        let state = Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
            labels: default_labels(n),
        };
        Ok((state, norm))
    }

    /// Same as [`PureState::new`] but discards the norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        Self::new(amplitudes).map(|(s, _)| s)
    }

    /// Computational basis state `|bits>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        *amps.get_mut(index).ok_or(Error::Format(format!(
            "basis index {index} outside {n_qubits} qubits"
        )))? = C64::new(1.0, 0.0);
        Self::normalized(amps)
    }

    pub fn with_labels(mut self, labels: Vec<char>) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::Dimension {
                expected: self.labels.len(),
                actual: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn labels(&self) -> &[char] {
        &self.labels
    }

    /// Looks a qubit up by its register label.
    pub fn qubit(&self, label: char) -> Result<Qubit> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(Qubit)
            .ok_or_else(|| Error::Format(format!("no qubit labelled {label}")))
    }

    pub fn check_qubit(&self, q: Qubit) -> Result<()> {
        if q.0 >= self.n_qubits() {
            return Err(Error::InvalidQubit {
                index: q.0,
                n_qubits: self.n_qubits(),
            });
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm_sqr()
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix {
            labels: self.labels.clone(),
            matrix: CMatrix::outer(&self.amplitudes),
        }
    }

    /// Reduced density matrix over `keep` (returned in register order).
    pub fn partial_trace(&self, keep: &[Qubit]) -> Result<DensityMatrix> {
        let n = self.n_qubits();
        let keep = check_subset(n, keep)?;
        let kept_dim = 1 << keep.len();
        let traced_dim = self.dim() / kept_dim;
        // amplitude matrix psi[kept][traced]
        let mut psi = vec![ZERO; self.dim()];
        for (i, (k, t)) in split_indices(n, &keep).into_iter().enumerate() {
            psi[k * traced_dim + t] = self.amplitudes[i];
        }
        let mut rho = CMatrix::zeros(kept_dim);
        for i in 0..kept_dim {
            let row_i = &psi[i * traced_dim..(i + 1) * traced_dim];
            for j in i..kept_dim {
                let row_j = &psi[j * traced_dim..(j + 1) * traced_dim];
                let z: C64 = row_i.iter().zip(row_j).map(|(a, b)| a * b.conj()).sum();
                rho[(i, j)] = z;
                rho[(j, i)] = z.conj();
            }
        }
        Ok(DensityMatrix {
            labels: keep.iter().map(|q| self.labels[q.0]).collect(),
            matrix: rho,
        })
    }

    /// Applies `op ⊗ I` on `qubit` without renormalizing. Returns the new
    /// amplitudes and their squared norm.
    pub fn apply_local_operator(&self, qubit: Qubit, op: &Mat2) -> Result<(Vec<C64>, f64)> {
        self.check_qubit(qubit)?;
        let mask = bit_mask(self.n_qubits(), qubit);
        let mut out = vec![ZERO; self.dim()];
        for i in (0..self.dim()).filter(|i| i & mask == 0) {
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | mask]);
            out[i] = op[0][0] * a0 + op[0][1] * a1;
            out[i | mask] = op[1][0] * a0 + op[1][1] * a1;
        }
        let norm_sqr = out.iter().map(|z| z.norm_sqr()).sum();
        Ok((out, norm_sqr))
    }

    /// Applies a local operator and renormalizes, keeping the labels.
    pub fn transformed(&self, qubit: Qubit, op: &Mat2) -> Result<PureState> {
        let (amps, _) = self.apply_local_operator(qubit, op)?;
        PureState::normalized(amps)?.with_labels(self.labels.clone())
    }
}

/// Builds a pure state from `(bitstring, amplitude)` entries and normalizes
/// it. Returns the state and the normalization constant.
pub fn make_pure(n_qubits: usize, entries: &[(&str, C64)]) -> Result<(PureState, f64)> {
    check_register(n_qubits)?;
    let mut amps = vec![ZERO; 1 << n_qubits];
    let mut seen = vec![false; 1 << n_qubits];
    for &(bits, amp) in entries {
        let index = parse_bitstring(n_qubits, bits)?;
        if core::mem::replace(&mut seen[index], true) {
            return Err(Error::DuplicateBasis(String::from(bits)));
        }
        amps[index] = amp;
    }
    PureState::new(amps)
}

/// Index of a bitstring under the most-significant-first convention.
pub fn parse_bitstring(n_qubits: usize, bits: &str) -> Result<usize> {
    if bits.len() != n_qubits {
        return Err(Error::Format(format!(
            "bitstring {bits:?} should have {n_qubits} characters"
        )));
    }
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::Format(format!("bitstring {bits:?} contains {c:?}"))),
    })
}

/// Hermitian, unit-trace density matrix over an ordered subset of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<char>,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace (both within 1e-12).
    pub fn new(labels: Vec<char>, matrix: CMatrix) -> Result<Self> {
        let n = qubits_from_dim(matrix.dim())?;
        if labels.len() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: labels.len(),
            });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > STATE_TOL {
            return Err(Error::Hermiticity(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Trace(tr.re));
        }
        Ok(Self { labels, matrix })
    }

    pub fn with_default_labels(matrix: CMatrix) -> Result<Self> {
        let n = qubits_from_dim(matrix.dim())?;
        Self::new(default_labels(n), matrix)
    }

    /// `Σ w_i |ψ_i><ψ_i|` for normalized states on a common register.
    pub fn mixture(components: &[(f64, &PureState)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or(Error::Format(String::from("empty mixture")))?
            .1;
        let mut m = CMatrix::zeros(first.dim());
        for &(w, s) in components {
            if s.dim() != first.dim() {
                return Err(Error::Dimension {
                    expected: first.dim(),
                    actual: s.dim(),
                });
            }
            if !(w >= 0.0) {
                return Err(Error::Domain(format!("negative mixture weight {w}")));
            }
            m = m.add(&CMatrix::outer(s.amplitudes()).scale(C64::new(w, 0.0)));
        }
        Self::new(first.labels.clone(), m)
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn labels(&self) -> &[char] {
        &self.labels
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        hermitian_spectrum(&self.matrix)
    }

    /// Eigenvalues descending, clipped to zero within the floor.
    pub fn clipped_eigen(&self) -> Result<(Vec<f64>, CMatrix)> {
        let (vals, vecs) = linalg::eigh(&self.matrix);
        let vals = vals
            .into_iter()
            .map(clip_eigenvalue)
            .collect::<Result<Vec<_>>>()?;
        Ok((vals, vecs))
    }

    /// Reduced density matrix over `keep` (returned in register order).
    pub fn partial_trace(&self, keep: &[Qubit]) -> Result<DensityMatrix> {
        let n = self.n_qubits();
        let keep = check_subset(n, keep)?;
        let kept_dim = 1 << keep.len();
        let split = split_indices(n, &keep);
        let mut rho = CMatrix::zeros(kept_dim);
        for (i, &(ki, ti)) in split.iter().enumerate() {
            for (j, &(kj, tj)) in split.iter().enumerate() {
                if ti == tj {
                    rho[(ki, kj)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityMatrix {
            labels: keep.iter().map(|q| self.labels[q.0]).collect(),
            matrix: rho,
        })
    }
}

/// Real spectrum of a Hermitian matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `eigenvalues`.
    pub eigenvectors: Option<CMatrix>,
}

impl Spectrum {
    pub fn reconstruct(&self) -> Option<CMatrix> {
        let v = self.eigenvectors.as_ref()?;
        Some(&(v * &CMatrix::from_real_diag(&self.eigenvalues)) * &v.adjoint())
    }
}

/// Full eigen-decomposition of a Hermitian matrix (Hermiticity checked to 1e-12).
pub fn hermitian_spectrum(m: &CMatrix) -> Result<Spectrum> {
    let dev = m.hermiticity_deviation();
    if dev > STATE_TOL {
        return Err(Error::Hermiticity(dev));
    }
    let (eigenvalues, vectors) = linalg::eigh(m);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(vectors),
    })
}

/// Clips round-off negativity in `[-1e-10, 0)` to zero.
pub fn clip_eigenvalue(lambda: f64) -> Result<f64> {
    if lambda >= 0.0 {
        Ok(lambda)
    } else if lambda >= -EIGEN_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::NegativeEigenvalue(lambda))
    }
}
