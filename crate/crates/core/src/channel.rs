// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

//! Kraus representation of a channel on the noisy subsystem, and its process
//! matrix χ in the Pauli error basis.
//!
//! With `E_k = Σ_m α_{k,m} F_m` and `α_{k,m} = Tr(F_m† E_k) / d`, the process
//! matrix is `χ_{m,n} = Σ_k α_{k,m} α*_{k,n}`, so that
//! `ℰ(ρ) = Σ_{m,n} χ_{m,n} F_m ρ F_n†` and the identity channel has `χ_{0,0} = 1`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::{
    completeness, hermitian_eigenvalues, hermitian_norm, hermiticity_defect, min_eigenvalue, NumericPolicy,
};
use crate::error::{QeccdError, Result};
use crate::pauli::{to_matrix, ErrorBasis};
use crate::CMatrix;

/// A completely positive map on `p` qubits, given by Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    p: usize,
    kraus: Vec<CMatrix>,
    label: String,
}

impl Channel {
    /// Builds a channel, rejecting trace-increasing Kraus sets.
    pub fn new(p: usize, kraus: Vec<CMatrix>, label: impl Into<String>) -> Result<Self> {
        let dim = 1usize << p;
        if kraus.is_empty() {
            return Err(QeccdError::Validation(
                "channel needs at least one Kraus operator".into(),
            ));
        }
        for e in &kraus {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(QeccdError::DimensionMismatch {
                    expected: dim,
                    actual: e.nrows().max(e.ncols()),
                });
            }
        }
        let policy = NumericPolicy::default();
        let excess = hermitian_eigenvalues(&(completeness(&kraus)? - CMatrix::identity(dim, dim)))
            .last()
            .copied()
            .unwrap_or(0.0);
        if excess > policy.algebraic {
            return Err(QeccdError::Validation(format!(
                "Kraus set is trace-increasing (excess {excess:e})"
            )));
        }
        Ok(Channel {
            p,
            kraus,
            label: label.into(),
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_trace_preserving(&self) -> bool {
        validate_channel(self).tp
    }
}

/// Result of [`validate_channel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelReport {
    pub cp: bool,
    pub tp: bool,
    /// Spectral norm of `Σ E†E - I`.
    pub defect: f64,
}

pub fn validate_channel(ch: &Channel) -> ChannelReport {
    let dim = 1usize << ch.p;
    let defect = completeness(&ch.kraus)
        .map(|s| hermitian_norm(&(s - CMatrix::identity(dim, dim))))
        .unwrap_or(f64::INFINITY);
    ChannelReport {
        cp: true,
        tp: defect < NumericPolicy::default().algebraic,
        defect,
    }
}

/// Summary of how well a χ estimate satisfies the process-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
    pub trace: f64,
}

/// `d² × d²` process matrix over an error basis, in the basis index order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    entries: CMatrix,
    labels: Vec<String>,
}

impl ProcessMatrix {
    pub fn new(entries: CMatrix, labels: Vec<String>) -> Result<Self> {
        if entries.nrows() != labels.len() || entries.ncols() != labels.len() {
            return Err(QeccdError::DimensionMismatch {
                expected: labels.len(),
                actual: entries.nrows(),
            });
        }
        Ok(ProcessMatrix { entries, labels })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn d2(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    /// Entry addressed by basis labels, e.g. `("I", "Z")`.
    pub fn by_label(&self, m: &str, n: &str) -> Option<Complex64> {
        let i = self.labels.iter().position(|l| l == m)?;
        let j = self.labels.iter().position(|l| l == n)?;
        Some(self.entries[(i, j)])
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn validity(&self) -> Validity {
        Validity {
            min_eigenvalue: min_eigenvalue(&self.entries),
            hermiticity_defect: hermiticity_defect(&self.entries),
            trace: self.trace(),
        }
    }

    /// `χ' = S χ S†` with `S = diag(phases)`.
    pub fn conjugated_by_diagonal(&self, phases: &[Complex64]) -> Result<ProcessMatrix> {
        if phases.len() != self.d2() {
            return Err(QeccdError::DimensionMismatch {
                expected: self.d2(),
                actual: phases.len(),
            });
        }
        let entries = CMatrix::from_fn(self.d2(), self.d2(), |m, n| {
            phases[m] * self.entries[(m, n)] * phases[n].conj()
        });
        Ok(ProcessMatrix {
            entries,
            labels: self.labels.clone(),
        })
    }
}

fn check_basis(p: usize, basis: &ErrorBasis) -> Result<()> {
    if basis.p() != p {
        return Err(QeccdError::DimensionMismatch {
            expected: basis.p(),
            actual: p,
        });
    }
    Ok(())
}

/// `α_{k,m} = Tr(F_m† E_k) / d` for every Kraus operator `k` and basis element `m`.
pub fn pauli_coefficients(ch: &Channel, basis: &ErrorBasis) -> Result<Vec<Vec<Complex64>>> {
    check_basis(ch.p, basis)?;
    let d = basis.d() as f64;
    let paulis = basis.local_matrices()?;
    Ok(ch
        .kraus
        .iter()
        .map(|e| paulis.iter().map(|f| (f.adjoint() * e).trace() / d).collect())
        .collect())
}

pub fn chi_from_kraus(ch: &Channel, basis: &ErrorBasis) -> Result<ProcessMatrix> {
    let alpha = pauli_coefficients(ch, basis)?;
    let d2 = basis.len();
    let mut chi = CMatrix::zeros(d2, d2);
    for row in &alpha {
        for m in 0..d2 {
            for n in 0..d2 {
                chi[(m, n)] += row[m] * row[n].conj();
            }
        }
    }
    ProcessMatrix::new(chi, basis.labels())
}

/// Kraus set from the eigendecomposition `χ = Σ_k λ_k v_k v_k†`:
/// `E_k = √λ_k Σ_m v_k[m] F_m`, keeping eigenvalues above tolerance.
pub fn kraus_from_chi(chi: &ProcessMatrix, basis: &ErrorBasis, policy: &NumericPolicy) -> Result<Channel> {
    if chi.d2() != basis.len() {
        return Err(QeccdError::DimensionMismatch {
            expected: basis.len(),
            actual: chi.d2(),
        });
    }
    let herm = (&chi.entries + chi.entries.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -policy.algebraic {
        return Err(QeccdError::NegativeEigenvalue(min));
    }
    let paulis = basis.local_matrices()?;
    let d = basis.d();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut kraus = Vec::new();
    for k in order {
        let lambda = eig.eigenvalues[k];
        if lambda <= policy.algebraic {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        let mut e = CMatrix::zeros(d, d);
        for (m, f) in paulis.iter().enumerate() {
            e += f * v[m];
        }
        kraus.push(e.scale(lambda.sqrt()));
    }
    if kraus.is_empty() {
        kraus.push(CMatrix::zeros(d, d));
    }
    Channel::new(basis.p(), kraus, "from-chi")
}

/// Names accepted by [`builtin_channel`].
pub const BUILTIN_CHANNELS: &[&str] = &[
    "identity",
    "amplitude-damping",
    "correlated-flip",
    "depolarizing",
    "phase-damping",
    "random-cp",
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli_matrix(s: &str) -> CMatrix {
    to_matrix(&s.parse().expect("valid literal")).expect("small")
}

fn unit_interval(name: &str, value: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(QeccdError::ParameterOutOfRange(format!(
            "{name} = {value} must lie in [0, 1]"
        )));
    }
    Ok(value)
}

fn nonneg_integer(name: &str, value: f64, min: u64) -> Result<u64> {
    if value.fract() != 0.0 || value < min as f64 || value > u64::MAX as f64 {
        return Err(QeccdError::ParameterOutOfRange(format!(
            "{name} = {value} must be an integer >= {min}"
        )));
    }
    Ok(value as u64)
}

fn param(params: &[f64], index: usize, name: &str) -> Result<f64> {
    params
        .get(index)
        .copied()
        .ok_or_else(|| QeccdError::ParameterOutOfRange(format!("missing parameter {name}")))
}

fn expect_params(name: &str, params: &[f64], allowed: std::ops::RangeInclusive<usize>) -> Result<()> {
    if !allowed.contains(&params.len()) {
        return Err(QeccdError::ParameterOutOfRange(format!(
            "{name} takes {allowed:?} parameters, got {}",
            params.len()
        )));
    }
    Ok(())
}

fn fmt_params(params: &[f64]) -> String {
    params.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

/// A named channel from the built-in library.
///
/// | name | params |
/// |---|---|
/// | `identity` | `[qubits]` (default 1) |
/// | `amplitude-damping` | `[λ]` |
/// | `correlated-flip` | `[p]`, two qubits: `{√(1-p) I, √p XX}` |
/// | `depolarizing` | `[p]` or `[p, qubits]`: `ρ ↦ (1-p) ρ + p I/d` |
/// | `phase-damping` | `[γ]` |
/// | `random-cp` | `[seed, qubits, rank]` |
pub fn builtin_channel(name: &str, params: &[f64]) -> Result<Channel> {
    let label = format!("{name}({})", fmt_params(params));
    match name {
        "identity" => {
            expect_params(name, params, 0..=1)?;
            let p = match params.first() {
                Some(&q) => nonneg_integer("qubits", q, 0)? as usize,
                None => 1,
            };
            check_dense_qubits(p)?;
            Channel::new(p, vec![CMatrix::identity(1 << p, 1 << p)], label)
        }
        "amplitude-damping" => {
            expect_params(name, params, 1..=1)?;
            let lambda = unit_interval("lambda", params[0])?;
            let r = (1.0 - lambda).sqrt();
            let s = lambda.sqrt();
            let e0 = pauli_matrix("I").scale((1.0 + r) / 2.0) + pauli_matrix("Z").scale((1.0 - r) / 2.0);
            let e1 = pauli_matrix("X").scale(s / 2.0) + pauli_matrix("Y") * c(0.0, s / 2.0);
            Channel::new(1, vec![e0, e1], label)
        }
        "correlated-flip" => {
            expect_params(name, params, 1..=1)?;
            let p = unit_interval("p", params[0])?;
            Channel::new(
                2,
                vec![
                    CMatrix::identity(4, 4).scale((1.0 - p).sqrt()),
                    pauli_matrix("XX").scale(p.sqrt()),
                ],
                label,
            )
        }
        "depolarizing" => {
            expect_params(name, params, 1..=2)?;
            let p = unit_interval("p", params[0])?;
            let qubits = match params.get(1) {
                Some(&q) => nonneg_integer("qubits", q, 1)? as usize,
                None => 1,
            };
            check_dense_qubits(qubits)?;
            let basis = crate::pauli::enumerate_error_basis(qubits, &(0..qubits).collect::<Vec<_>>())?;
            let d = basis.d() as f64;
            let mats = basis.local_matrices()?;
            let mut kraus = vec![mats[0].scale((1.0 - p + p / (d * d)).sqrt())];
            kraus.extend(mats[1..].iter().map(|f| f.scale(p.sqrt() / d)));
            Channel::new(qubits, kraus, label)
        }
        "phase-damping" => {
            expect_params(name, params, 1..=1)?;
            let gamma = unit_interval("gamma", params[0])?;
            let e0 = CMatrix::from_row_slice(
                2,
                2,
                &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - gamma).sqrt(), 0.0)],
            );
            let e1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(gamma.sqrt(), 0.0)]);
            Channel::new(1, vec![e0, e1], label)
        }
        "random-cp" => {
            expect_params(name, params, 3..=3)?;
            let seed = nonneg_integer("seed", param(params, 0, "seed")?, 0)?;
            let qubits = nonneg_integer("qubits", param(params, 1, "qubits")?, 1)? as usize;
            let rank = nonneg_integer("rank", param(params, 2, "rank")?, 1)? as usize;
            random_channel(seed, qubits, rank).map(|ch| Channel { label, ..ch })
        }
        other => Err(QeccdError::UnknownChannel(other.to_string())),
    }
}

fn check_dense_qubits(p: usize) -> Result<()> {
    if p > crate::pauli::MAX_DENSE_QUBITS / 2 {
        return Err(QeccdError::ResourceLimit {
            qubits: p,
            limit: crate::pauli::MAX_DENSE_QUBITS / 2,
        });
    }
    Ok(())
}

/// CP and trace-preserving channel from a Haar-random isometry `C^d → C^d ⊗ C^rank`:
/// the Kraus operators are the `rank` blocks of the isometry.
pub fn random_channel(seed: u64, qubits: usize, rank: usize) -> Result<Channel> {
    check_dense_qubits(qubits)?;
    let d = 1usize << qubits;
    if rank == 0 || rank > d * d {
        return Err(QeccdError::ParameterOutOfRange(format!(
            "rank {rank} must lie in [1, {}]",
            d * d
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 0.5f64.sqrt();
    let ginibre = CMatrix::from_fn(d * rank, d, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        c(re * scale, im * scale)
    });
    let qr = ginibre.qr();
    let (q, r) = (qr.q(), qr.r());
    // Haar measure needs the phases of diag(R) folded back into Q
    let phases = DVector::from_fn(d, |i, _| {
        let diag = r[(i, i)];
        if diag.norm() == 0.0 {
            c(1.0, 0.0)
        } else {
            diag / diag.norm()
        }
    });
    let isometry = q * CMatrix::from_diagonal(&phases);
    let kraus = (0..rank).map(|k| isometry.rows(k * d, d).into_owned()).collect();
    Channel::new(qubits, kraus, format!("random-cp({seed},{qubits},{rank})"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{apply_channel, max_abs, outer, StateVector};
    use crate::pauli::enumerate_error_basis;

    fn basis1() -> ErrorBasis {
        enumerate_error_basis(1, &[0]).unwrap()
    }

    fn basis2() -> ErrorBasis {
        enumerate_error_basis(2, &[0, 1]).unwrap()
    }

    /// Direct expansion of the amplitude-damping Kraus operators into the
    /// Pauli basis, done by hand on the coefficients of `I, Z, X, Y`:
    /// `E0 = a I + b Z`, `E1 = s X + i s Y`.
    fn amplitude_damping_oracle(lambda: f64) -> CMatrix {
        let r = (1.0 - lambda).sqrt();
        let (a, b, s) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0, lambda.sqrt() / 2.0);
        // basis order I, Z, X, Y
        let e0 = [c(a, 0.0), c(b, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let e1 = [c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0), c(0.0, s)];
        CMatrix::from_fn(4, 4, |m, n| e0[m] * e0[n].conj() + e1[m] * e1[n].conj())
    }

    #[test]
    fn identity_chi() {
        let chi = chi_from_kraus(&builtin_channel("identity", &[]).unwrap(), &basis1()).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = c(1.0, 0.0);
        assert!(max_abs(&(chi.entries() - expected)) < 1e-15);
    }

    #[test]
    fn correlated_flip_chi() {
        let p = 0.25;
        let chi = chi_from_kraus(&builtin_channel("correlated-flip", &[p]).unwrap(), &basis2()).unwrap();
        for m in 0..16 {
            for n in 0..16 {
                let expected = match (chi.labels()[m].as_str(), m == n) {
                    ("II", true) => 1.0 - p,
                    ("XX", true) => p,
                    _ => 0.0,
                };
                assert!((chi.get(m, n) - c(expected, 0.0)).norm() < 1e-15, "{m} {n}");
            }
        }
    }

    #[test]
    fn amplitude_damping_chi_values() {
        let chi = chi_from_kraus(&builtin_channel("amplitude-damping", &[0.36]).unwrap(), &basis1()).unwrap();
        let at = |a: &str, b: &str| chi.by_label(a, b).unwrap();
        assert!((at("I", "I") - c(0.81, 0.0)).norm() < 1e-15);
        assert!((at("Z", "Z") - c(0.01, 0.0)).norm() < 1e-15);
        assert!((at("X", "X") - c(0.09, 0.0)).norm() < 1e-15);
        assert!((at("Y", "Y") - c(0.09, 0.0)).norm() < 1e-15);
        assert!((at("I", "Z") - c(0.09, 0.0)).norm() < 1e-15);
        assert!((at("Z", "I") - c(0.09, 0.0)).norm() < 1e-15);
        assert!((at("X", "Y") - c(0.0, -0.09)).norm() < 1e-15);
        assert!((at("Y", "X") - c(0.0, 0.09)).norm() < 1e-15);
        for lambda in [0.0, 0.1, 0.36, 0.75, 1.0] {
            let chi = chi_from_kraus(&builtin_channel("amplitude-damping", &[lambda]).unwrap(), &basis1()).unwrap();
            assert!(max_abs(&(chi.entries() - amplitude_damping_oracle(lambda))) < 1e-15);
        }
    }

    #[test]
    fn kraus_round_trips() {
        let chi = chi_from_kraus(&builtin_channel("amplitude-damping", &[0.36]).unwrap(), &basis1()).unwrap();
        let back = kraus_from_chi(&chi, &basis1(), &NumericPolicy::default()).unwrap();
        let again = chi_from_kraus(&back, &basis1()).unwrap();
        assert!(max_abs(&(again.entries() - chi.entries())) < 1e-10);

        let ch = random_channel(7, 2, 3).unwrap();
        let chi = chi_from_kraus(&ch, &basis2()).unwrap();
        let back = kraus_from_chi(&chi, &basis2(), &NumericPolicy::default()).unwrap();
        assert!(max_abs(&(chi_from_kraus(&back, &basis2()).unwrap().entries() - chi.entries())) < 1e-9);
    }

    #[test]
    fn kraus_from_unit_chi_is_identity() {
        let mut e = CMatrix::zeros(4, 4);
        e[(0, 0)] = c(1.0, 0.0);
        let chi = ProcessMatrix::new(e, basis1().labels()).unwrap();
        let ch = kraus_from_chi(&chi, &basis1(), &NumericPolicy::default()).unwrap();
        assert_eq!(ch.kraus().len(), 1);
        let k = &ch.kraus()[0];
        let phase = k[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(max_abs(&(k - CMatrix::identity(2, 2) * phase)) < 1e-12);
    }

    #[test]
    fn kraus_from_diagonal_chi_are_paulis() {
        let chi = chi_from_kraus(&builtin_channel("depolarizing", &[0.3]).unwrap(), &basis1()).unwrap();
        let ch = kraus_from_chi(&chi, &basis1(), &NumericPolicy::default()).unwrap();
        let paulis = basis1().local_matrices().unwrap();
        for k in ch.kraus() {
            // each Kraus operator is a multiple of exactly one Pauli
            let hits = paulis
                .iter()
                .filter(|f| ((f.adjoint() * k).trace() / 2.0).norm() > 1e-9)
                .count();
            assert_eq!(hits, 1);
        }
    }

    #[test]
    fn kraus_from_chi_rejects_negative() {
        let mut e = CMatrix::zeros(4, 4);
        e[(0, 0)] = c(1.0, 0.0);
        e[(1, 1)] = c(-0.1, 0.0);
        let chi = ProcessMatrix::new(e, basis1().labels()).unwrap();
        assert!(matches!(
            kraus_from_chi(&chi, &basis1(), &NumericPolicy::default()),
            Err(QeccdError::NegativeEigenvalue(_))
        ));
    }

    #[test]
    fn builtin_examples() {
        let ad0 = builtin_channel("amplitude-damping", &[0.0]).unwrap();
        assert!(max_abs(&(&ad0.kraus()[0] - CMatrix::identity(2, 2))) < 1e-15);
        assert!(max_abs(&ad0.kraus()[1]) < 1e-15);

        let ad1 = builtin_channel("amplitude-damping", &[1.0]).unwrap();
        let e0 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(max_abs(&(&ad1.kraus()[0] - e0)) < 1e-15);
        assert!(max_abs(&(&ad1.kraus()[1] - e1)) < 1e-15);

        let flip = builtin_channel("correlated-flip", &[0.25]).unwrap();
        assert!(max_abs(&(&flip.kraus()[0] - CMatrix::identity(4, 4).scale(0.75f64.sqrt()))) < 1e-15);
        assert!(max_abs(&(&flip.kraus()[1] - pauli_matrix("XX").scale(0.5))) < 1e-15);
    }

    #[test]
    fn builtin_errors() {
        assert!(matches!(
            builtin_channel("nope", &[]),
            Err(QeccdError::UnknownChannel(_))
        ));
        assert!(matches!(
            builtin_channel("amplitude-damping", &[1.5]),
            Err(QeccdError::ParameterOutOfRange(_))
        ));
        assert!(builtin_channel("amplitude-damping", &[]).is_err());
        assert!(builtin_channel("random-cp", &[1.0, 1.0, 0.0]).is_err());
        assert!(builtin_channel("random-cp", &[1.5, 1.0, 2.0]).is_err());
    }

    #[test]
    fn validation_examples() {
        let id = validate_channel(&builtin_channel("identity", &[]).unwrap());
        assert!(id.cp && id.tp && id.defect < 1e-15);
        for lambda in [0.0, 0.2, 0.36, 0.9, 1.0] {
            assert!(validate_channel(&builtin_channel("amplitude-damping", &[lambda]).unwrap()).tp);
        }
        let half = Channel::new(1, vec![CMatrix::identity(2, 2).scale(0.5)], "half").unwrap();
        let r = validate_channel(&half);
        assert!(!r.tp);
        assert!((r.defect - 0.75).abs() < 1e-12);
        assert!(Channel::new(1, vec![CMatrix::identity(2, 2).scale(2.0)], "x").is_err());
    }

    fn all_builtins() -> Vec<Channel> {
        vec![
            builtin_channel("identity", &[]).unwrap(),
            builtin_channel("identity", &[2.0]).unwrap(),
            builtin_channel("amplitude-damping", &[0.36]).unwrap(),
            builtin_channel("correlated-flip", &[0.3]).unwrap(),
            builtin_channel("depolarizing", &[0.4]).unwrap(),
            builtin_channel("depolarizing", &[0.4, 2.0]).unwrap(),
            builtin_channel("phase-damping", &[0.2]).unwrap(),
            builtin_channel("random-cp", &[3.0, 1.0, 2.0]).unwrap(),
            builtin_channel("random-cp", &[4.0, 2.0, 4.0]).unwrap(),
        ]
    }

    #[test]
    fn builtins_are_trace_preserving_and_chi_valid() {
        for ch in all_builtins() {
            assert!(ch.is_trace_preserving(), "{}", ch.label());
            let basis = enumerate_error_basis(ch.p(), &(0..ch.p()).collect::<Vec<_>>()).unwrap();
            let v = chi_from_kraus(&ch, &basis).unwrap().validity();
            assert!(v.hermiticity_defect < 1e-10);
            assert!(v.min_eigenvalue > -1e-10);
            assert!((v.trace - 1.0).abs() < 1e-10, "{}", ch.label());
        }
        let lossy = Channel::new(1, vec![CMatrix::identity(2, 2).scale(0.5)], "half").unwrap();
        let chi = chi_from_kraus(&lossy, &basis1()).unwrap();
        assert!((chi.trace() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn chi_form_matches_kraus_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for ch in all_builtins() {
            let p = ch.p();
            let basis = enumerate_error_basis(p, &(0..p).collect::<Vec<_>>()).unwrap();
            let chi = chi_from_kraus(&ch, &basis).unwrap();
            let paulis = basis.local_matrices().unwrap();
            let dim = 1 << p;
            let amps: Vec<Complex64> = (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    c(re, im)
                })
                .collect();
            let rho = outer(&StateVector::new(amps).unwrap().normalized().unwrap());
            let coords: Vec<usize> = (0..p).collect();
            let direct = apply_channel(&rho, ch.kraus(), &coords, false, &NumericPolicy::default()).unwrap();
            let mut via_chi = CMatrix::zeros(dim, dim);
            for m in 0..basis.len() {
                for n in 0..basis.len() {
                    via_chi += &paulis[m] * rho.entries() * paulis[n].adjoint() * chi.get(m, n);
                }
            }
            assert!(max_abs(&(direct.entries() - via_chi)) < 1e-10, "{}", ch.label());
        }
    }

    #[test]
    fn chi_invariant_under_kraus_remixing() {
        let ch = random_channel(11, 1, 3).unwrap();
        let basis = basis1();
        let chi = chi_from_kraus(&ch, &basis).unwrap();
        // pad to four operators and mix with a random 4x4 unitary: E'_j = Σ_k U_jk E_k
        let mut padded = ch.kraus().to_vec();
        padded.push(CMatrix::zeros(2, 2));
        let u = random_channel(5, 2, 1).unwrap().kraus()[0].clone();
        let mixed: Vec<CMatrix> = (0..4)
            .map(|j| {
                padded
                    .iter()
                    .enumerate()
                    .fold(CMatrix::zeros(2, 2), |acc, (k, e)| acc + e * u[(j, k)])
            })
            .collect();
        let remixed = Channel::new(1, mixed, "remixed").unwrap();
        let chi2 = chi_from_kraus(&remixed, &basis).unwrap();
        assert!(max_abs(&(chi2.entries() - chi.entries())) < 1e-10);
    }

    #[test]
    fn chi_trace_tracks_tp() {
        for ch in all_builtins() {
            let basis = enumerate_error_basis(ch.p(), &(0..ch.p()).collect::<Vec<_>>()).unwrap();
            let tr = chi_from_kraus(&ch, &basis).unwrap().trace();
            assert_eq!((tr - 1.0).abs() < 1e-10, validate_channel(&ch).tp);
        }
    }
}
