// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense states, density matrices and projectors at desk scale.
//!
//! Multi-qubit operators acting on a subset of qubits are embedded with the
//! operator's own qubit order following the `coords` list, and qubit 0 of the
//! full register as the most significant tensor factor.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{QeccdError, Result};
use crate::pauli::MAX_DENSE_QUBITS;
use crate::CMatrix;

/// Tolerances shared by every numeric check in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Hermiticity, unitarity, idempotence and trace checks.
    pub algebraic: f64,
    /// Orthonormality of supplied state sets.
    pub orthonormality: f64,
    /// Knill-Laflamme residual.
    pub kl_residual: f64,
    /// Negative probabilities above `-probability_dust` are clamped to zero.
    pub probability_dust: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            algebraic: 1e-10,
            orthonormality: 1e-8,
            kl_residual: 1e-8,
            probability_dust: 1e-12,
        }
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(QeccdError::Validation(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_DENSE_QUBITS {
        return Err(QeccdError::ResourceLimit {
            qubits: n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    Ok(n)
}

fn check_square(m: &CMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(QeccdError::DimensionMismatch {
            expected: dim,
            actual: if m.nrows() != dim { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

/// Pure state on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        qubits_for_dim(amplitudes.len())?;
        Ok(StateVector {
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    pub fn from_dvector(amplitudes: DVector<Complex64>) -> Result<Self> {
        qubits_for_dim(amplitudes.len())?;
        Ok(StateVector { amplitudes })
    }

    /// Computational basis state `|index⟩` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n;
        if index >= dim {
            return Err(QeccdError::IndexOutOfRange { index, size: dim });
        }
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self::from_dvector(v)
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self, policy: &NumericPolicy) -> bool {
        (self.norm() - 1.0).abs() < policy.algebraic
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(QeccdError::Validation("cannot normalize the zero vector".into()));
        }
        Ok(StateVector {
            amplitudes: self.amplitudes.unscale(norm),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(QeccdError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `U|self⟩`.
    pub fn apply(&self, op: &CMatrix) -> Result<StateVector> {
        check_square(op, self.dim())?;
        Ok(StateVector {
            amplitudes: op * &self.amplitudes,
        })
    }
}

/// Density matrix; its trace may be below one after a trace-decreasing channel.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, positivity and trace.
    pub fn new(entries: CMatrix, policy: &NumericPolicy) -> Result<Self> {
        let dim = entries.nrows();
        qubits_for_dim(dim)?;
        check_square(&entries, dim)?;
        let rho = DensityMatrix { entries };
        let defect = hermiticity_defect(&rho.entries);
        if defect > policy.algebraic {
            return Err(QeccdError::Validation(format!(
                "density matrix not Hermitian (defect {defect:e})"
            )));
        }
        let min = min_eigenvalue(&rho.entries);
        if min < -policy.algebraic {
            return Err(QeccdError::NegativeEigenvalue(min));
        }
        let tr = rho.trace();
        if tr <= 0.0 || tr > 1.0 + policy.algebraic {
            return Err(QeccdError::Validation(format!("trace {tr} outside (0, 1]")));
        }
        Ok(rho)
    }

    fn from_raw(entries: CMatrix) -> Self {
        DensityMatrix { entries }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Rescales to unit trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(QeccdError::Validation("cannot normalize a zero-trace state".into()));
        }
        Ok(DensityMatrix::from_raw(self.entries.unscale(tr)))
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized pure state.
    pub fn fidelity_with(&self, psi: &StateVector) -> Result<f64> {
        check_square(&self.entries, psi.dim())?;
        let v = psi.amplitudes();
        Ok(v.dotc(&(&self.entries * v)).re)
    }
}

/// Orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    entries: CMatrix,
}

impl Projector {
    /// Wraps a matrix after checking `Π† = Π` and `Π² = Π`.
    pub fn new(entries: CMatrix, policy: &NumericPolicy) -> Result<Self> {
        qubits_for_dim(entries.nrows())?;
        check_square(&entries, entries.nrows())?;
        if hermiticity_defect(&entries) > policy.algebraic {
            return Err(QeccdError::Validation("projector not Hermitian".into()));
        }
        let idem = max_abs(&(&entries * &entries - &entries));
        if idem > policy.algebraic {
            return Err(QeccdError::Validation(format!(
                "projector not idempotent (defect {idem:e})"
            )));
        }
        Ok(Projector { entries })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn rank(&self) -> usize {
        self.entries.trace().re.round() as usize
    }
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `M - M†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let herm = (m + m.adjoint()).scale(0.5);
    let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).fold(0.0, f64::max)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && max_abs(&(u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols()))) < tol
}

/// `|v⟩⟨v|`.
pub fn outer(v: &StateVector) -> DensityMatrix {
    let a = v.amplitudes();
    DensityMatrix::from_raw(a * a.adjoint())
}

/// `Σ |v⟩⟨v|` over mutually orthonormal states.
pub fn projector_from_states(basis: &[StateVector], policy: &NumericPolicy) -> Result<Projector> {
    let first = basis
        .first()
        .ok_or_else(|| QeccdError::Validation("empty state list".into()))?;
    let dim = first.dim();
    let mut sum = CMatrix::zeros(dim, dim);
    for (i, v) in basis.iter().enumerate() {
        for (j, w) in basis.iter().enumerate().take(i + 1) {
            let overlap = v.inner(w)?;
            let expected = if i == j { 1.0 } else { 0.0 };
            if (overlap - Complex64::new(expected, 0.0)).norm() > policy.orthonormality {
                return Err(QeccdError::Validation(format!(
                    "states {j} and {i} are not orthonormal (overlap {overlap})"
                )));
            }
        }
        sum += outer(v).entries;
    }
    Projector::new(sum, policy)
}

/// `U ρ U†`.
pub fn apply_unitary(rho: &DensityMatrix, u: &CMatrix, policy: &NumericPolicy) -> Result<DensityMatrix> {
    check_square(u, rho.dim())?;
    if !is_unitary(u, policy.algebraic) {
        return Err(QeccdError::Validation("operator is not unitary".into()));
    }
    Ok(DensityMatrix::from_raw(u * &rho.entries * u.adjoint()))
}

/// Embeds a `2^p × 2^p` operator on `coords` into `n_total` qubits.
///
/// The operator's qubit `j` (most significant first) acts on `coords[j]`.
pub fn embed_operator(op: &CMatrix, coords: &[usize], n_total: usize) -> Result<CMatrix> {
    if n_total > MAX_DENSE_QUBITS {
        return Err(QeccdError::ResourceLimit {
            qubits: n_total,
            limit: MAX_DENSE_QUBITS,
        });
    }
    let p = coords.len();
    check_square(op, 1 << p)?;
    for (i, &q) in coords.iter().enumerate() {
        if q >= n_total || coords[..i].contains(&q) {
            return Err(QeccdError::InvalidCoordinates(format!("{coords:?}")));
        }
    }
    // basis-index bit of each local qubit
    let positions: Vec<usize> = coords.iter().map(|&q| n_total - 1 - q).collect();
    let local_mask: usize = positions.iter().map(|&b| 1usize << b).sum();
    let place = |sub: usize| -> usize {
        positions
            .iter()
            .enumerate()
            .filter(|(j, _)| (sub >> (p - 1 - j)) & 1 == 1)
            .map(|(_, &b)| 1usize << b)
            .sum()
    };
    let extract = |full: usize| -> usize {
        positions
            .iter()
            .enumerate()
            .map(|(j, &b)| ((full >> b) & 1) << (p - 1 - j))
            .sum()
    };
    let placed: Vec<usize> = (0..1usize << p).map(place).collect();
    let dim = 1usize << n_total;
    let mut out = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        let rest = row & !local_mask;
        let sub_row = extract(row);
        for (sub_col, &offset) in placed.iter().enumerate() {
            let value = op[(sub_row, sub_col)];
            if value != Complex64::new(0.0, 0.0) {
                out[(row, rest | offset)] = value;
            }
        }
    }
    Ok(out)
}

/// `Σ E_k†E_k` for a Kraus set.
pub fn completeness(kraus: &[CMatrix]) -> Result<CMatrix> {
    let first = kraus
        .first()
        .ok_or_else(|| QeccdError::Validation("empty Kraus set".into()))?;
    let dim = first.nrows();
    let mut sum = CMatrix::zeros(dim, dim);
    for e in kraus {
        check_square(e, dim)?;
        sum += e.adjoint() * e;
    }
    Ok(sum)
}

/// `Σ (E_k ⊗ I) ρ (E_k ⊗ I)†` with every `E_k` embedded on `coords`.
///
/// The Kraus set must satisfy `Σ E†E ≼ I`; with `strict_tp` it must equal `I`.
pub fn apply_channel(
    rho: &DensityMatrix,
    kraus: &[CMatrix],
    coords: &[usize],
    strict_tp: bool,
    policy: &NumericPolicy,
) -> Result<DensityMatrix> {
    let local_dim = 1usize << coords.len();
    for e in kraus {
        check_square(e, local_dim)?;
    }
    let defect = completeness(kraus)? - CMatrix::identity(local_dim, local_dim);
    let excess = hermitian_eigenvalues(&defect).last().copied().unwrap_or(0.0);
    if excess > policy.algebraic {
        return Err(QeccdError::Validation(format!(
            "Kraus set is trace-increasing (excess {excess:e})"
        )));
    }
    if strict_tp && hermitian_norm(&defect) > policy.algebraic {
        return Err(QeccdError::Validation("Kraus set is not trace-preserving".into()));
    }
    let n = rho.num_qubits();
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for e in kraus {
        let full = embed_operator(e, coords, n)?;
        out += &full * &rho.entries * full.adjoint();
    }
    Ok(DensityMatrix::from_raw(out))
}

/// `Tr(ρ M)`, real part.
pub fn expectation(rho: &DensityMatrix, m: &Projector) -> Result<f64> {
    check_square(m.entries(), rho.dim())?;
    // Tr(ρM) = Σ_ij ρ_ij M_ji
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            acc += rho.entries[(i, j)] * m.entries()[(j, i)];
        }
    }
    Ok(acc.re)
}
