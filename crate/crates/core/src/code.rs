// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

//! Stabilizer codes that correct every Pauli error on a known set of noisy
//! coordinates, so that the correctable errors form a group.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dense::{
    hermitian_eigenvalues, is_unitary, max_abs, projector_from_states, NumericPolicy, Projector, StateVector,
};
use crate::error::{QeccdError, Result};
use crate::pauli::{commutes, enumerate_error_basis, to_matrix, ErrorBasis, PauliOperator, MAX_DENSE_QUBITS};
use crate::CMatrix;

/// Generator eigenvalue pattern; bit `j` is 1 iff generator `j` reads −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome {
    bits: u64,
    len: usize,
}

impl Syndrome {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len > 64 || (len < 64 && bits >> len != 0) {
            return Err(QeccdError::Validation(format!("syndrome bits exceed length {len}")));
        }
        Ok(Syndrome { bits, len })
    }

    pub fn zero(len: usize) -> Self {
        Syndrome { bits: 0, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, j: usize) -> bool {
        (self.bits >> j) & 1 == 1
    }

    /// Generator eigenvalues (+1 / −1) in generator order.
    pub fn eigenvalues(&self) -> Vec<i8> {
        (0..self.len).map(|j| if self.bit(j) { -1 } else { 1 }).collect()
    }

    pub fn xor(&self, other: &Syndrome) -> Syndrome {
        Syndrome {
            bits: self.bits ^ other.bits,
            len: self.len,
        }
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.bit(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Syndrome {
    type Err = QeccdError;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << j,
                other => return Err(QeccdError::Parse(format!("invalid syndrome character '{other}'"))),
            }
        }
        Syndrome::new(bits, s.chars().count())
    }
}

/// Logical Pauli operators fixing the logical basis: `|0…0_L⟩` is the joint
/// +1 eigenvector of every `Z` and `|j_L⟩ = Π_i X_i^{j_i} |0…0_L⟩`, with logical
/// qubit 0 the most significant bit of `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalOperators {
    pub x: Vec<PauliOperator>,
    pub z: Vec<PauliOperator>,
}

/// Knill-Laflamme matrix `C_{ab} = Tr(Π F_a† F_b Π) / Tr(Π)` and the largest
/// residual `‖Π F_a† F_b Π − C_{ab} Π‖_max` over all pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct KnillLaflamme {
    pub c: CMatrix,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HammingBound {
    pub satisfied: bool,
    pub perfect: bool,
}

/// `2^k · 4^m ≤ 2^n`, i.e. `k + 2m ≤ n`; perfect on equality.
pub fn hamming_bound(n: usize, k: usize, m: usize) -> HammingBound {
    let need = k as u128 + 2 * m as u128;
    HammingBound {
        satisfied: need <= n as u128,
        perfect: need == n as u128,
    }
}

/// A verified `[[n, k]]` stabilizer code with its error group and syndrome map.
#[derive(Debug, Clone)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    generators: Vec<PauliOperator>,
    logical_basis: Vec<StateVector>,
    logical_ops: Option<LogicalOperators>,
    error_basis: ErrorBasis,
    syndromes: Vec<Syndrome>,
    code_projector: Projector,
    syndrome_projectors: Vec<Projector>,
    kl: KnillLaflamme,
}

/// GF(2) rank of symplectic vectors `(x | z)`.
fn symplectic_rank(ops: &[PauliOperator]) -> usize {
    let mut rows: Vec<u128> = ops
        .iter()
        .map(|p| (p.x_mask() as u128) | ((p.z_mask() as u128) << 64))
        .collect();
    let mut rank = 0;
    for bit in 0..128 {
        let pivot = match rows[rank..].iter().position(|r| (r >> bit) & 1 == 1) {
            Some(i) => rank + i,
            None => continue,
        };
        rows.swap(rank, pivot);
        let pr = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && (*r >> bit) & 1 == 1 {
                *r ^= pr;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn syndrome_of_operator(generators: &[PauliOperator], op: &PauliOperator) -> Result<Syndrome> {
    let mut bits = 0u64;
    for (j, g) in generators.iter().enumerate() {
        if !commutes(g, op)? {
            bits |= 1 << j;
        }
    }
    Syndrome::new(bits, generators.len())
}

/// Rotates `v` so its first significant amplitude is real and positive.
fn fix_phase(v: &mut StateVector, tol: f64) -> Result<()> {
    let amps = v.amplitudes();
    if let Some(a) = amps.iter().find(|a| a.norm() > tol) {
        let phase = a.conj() / a.norm();
        let rotated = amps.map(|z| z * phase);
        *v = StateVector::from_dvector(rotated)?;
    }
    Ok(())
}

/// Orthonormal basis of the column space of a projector, scanning columns in order.
fn column_basis(projector: &CMatrix, count: usize, tol: f64) -> Result<Vec<StateVector>> {
    let mut basis: Vec<StateVector> = Vec::with_capacity(count);
    for col in 0..projector.ncols() {
        if basis.len() == count {
            break;
        }
        let mut v = projector.column(col).into_owned();
        for b in &basis {
            let overlap = b.amplitudes().dotc(&v);
            v -= b.amplitudes() * overlap;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            let mut s = StateVector::from_dvector(v.unscale(norm))?;
            fix_phase(&mut s, tol)?;
            basis.push(s);
        }
    }
    if basis.len() != count {
        return Err(QeccdError::Validation(format!(
            "code space has dimension {} but {count} was expected",
            basis.len()
        )));
    }
    Ok(basis)
}

fn dense(op: &PauliOperator) -> Result<CMatrix> {
    to_matrix(op)
}

fn half_sum(op: &CMatrix, sign: f64) -> CMatrix {
    let dim = op.nrows();
    (CMatrix::identity(dim, dim) + op.scale(sign)).scale(0.5)
}

fn logical_basis_from_operators(
    generators: &[PauliOperator],
    ops: &LogicalOperators,
    code_projector: &CMatrix,
    k: usize,
    policy: &NumericPolicy,
) -> Result<Vec<StateVector>> {
    if ops.x.len() != k || ops.z.len() != k {
        return Err(QeccdError::Validation(format!(
            "expected {k} logical X and Z operators, got {} and {}",
            ops.x.len(),
            ops.z.len()
        )));
    }
    for op in ops.x.iter().chain(&ops.z) {
        if !op.relative_factor().is_real() {
            return Err(QeccdError::Validation(format!(
                "logical operator {op} is not Hermitian"
            )));
        }
        for g in generators {
            if !commutes(g, op)? {
                return Err(QeccdError::Validation(format!(
                    "logical operator {op} anticommutes with generator {g}"
                )));
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            let xz = commutes(&ops.x[i], &ops.z[j])?;
            if xz == (i == j) {
                return Err(QeccdError::Validation(format!(
                    "logical X{i} and Z{j} have the wrong commutation relation"
                )));
            }
            if !commutes(&ops.x[i], &ops.x[j])? || !commutes(&ops.z[i], &ops.z[j])? {
                return Err(QeccdError::Validation(
                    "logical operators of one kind must commute".into(),
                ));
            }
        }
    }
    let mut zero_projector = code_projector.clone();
    for z in &ops.z {
        zero_projector = half_sum(&dense(z)?, 1.0) * zero_projector;
    }
    let norms: Vec<f64> = (0..zero_projector.ncols())
        .map(|c| zero_projector.column(c).norm())
        .collect();
    let best = norms.iter().copied().fold(0.0, f64::max);
    if best < 1e-6 {
        return Err(QeccdError::Validation(
            "logical Z operators have no joint +1 codeword".into(),
        ));
    }
    let col = norms.iter().position(|&v| v >= best - 1e-12).expect("max exists");
    let v = zero_projector.column(col).into_owned();
    let mut zero = StateVector::from_dvector(v.unscale(v.norm()))?;
    fix_phase(&mut zero, policy.orthonormality)?;
    let xs: Vec<CMatrix> = ops.x.iter().map(dense).collect::<Result<_>>()?;
    (0..1usize << k)
        .map(|j| {
            let mut state = zero.clone();
            for (i, x) in xs.iter().enumerate() {
                if (j >> (k - 1 - i)) & 1 == 1 {
                    state = state.apply(x)?;
                }
            }
            Ok(state)
        })
        .collect()
}

impl StabilizerCode {
    /// Builds and verifies a code.
    ///
    /// When `codewords` is `None` the code space is the joint +1 eigenspace of
    /// the generators; its basis is fixed by `logical_ops` if given, and
    /// otherwise by Gram-Schmidt over the columns of the code projector in
    /// index order, each vector rotated so its first significant amplitude is
    /// real and positive.
    pub fn build(
        n: usize,
        generators: Vec<PauliOperator>,
        noisy_coords: &[usize],
        codewords: Option<Vec<StateVector>>,
        logical_ops: Option<LogicalOperators>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        if n > MAX_DENSE_QUBITS {
            return Err(QeccdError::ResourceLimit {
                qubits: n,
                limit: MAX_DENSE_QUBITS,
            });
        }
        if generators.len() > n {
            return Err(QeccdError::Validation(format!(
                "{} generators on {n} qubits",
                generators.len()
            )));
        }
        for g in &generators {
            if g.num_qubits() != n {
                return Err(QeccdError::DimensionMismatch {
                    expected: n,
                    actual: g.num_qubits(),
                });
            }
            if !g.relative_factor().is_real() {
                return Err(QeccdError::Validation(format!("generator {g} is not Hermitian")));
            }
        }
        let k = n - generators.len();
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !commutes(&generators[i], &generators[j])? {
                    return Err(QeccdError::NonCommutingGenerators(i, j));
                }
            }
        }
        if symplectic_rank(&generators) != generators.len() {
            return Err(QeccdError::DependentGenerators);
        }

        let error_basis = enumerate_error_basis(n, noisy_coords)?;
        let syndromes: Vec<Syndrome> = error_basis
            .elements()
            .iter()
            .map(|e| syndrome_of_operator(&generators, e))
            .collect::<Result<_>>()?;
        let mut seen = std::collections::HashMap::new();
        for (i, s) in syndromes.iter().enumerate() {
            if let Some(&j) = seen.get(s) {
                let labels = error_basis.labels();
                let (a, b): (&String, &String) = (&labels[j], &labels[i]);
                return Err(QeccdError::SyndromeCollision(a.clone(), b.clone(), s.to_string()));
            }
            seen.insert(*s, i);
        }

        let gen_mats: Vec<CMatrix> = generators.iter().map(dense).collect::<Result<_>>()?;
        let logical_basis = match codewords {
            Some(words) => {
                if words.len() != 1 << k {
                    return Err(QeccdError::Validation(format!(
                        "expected {} codewords, got {}",
                        1usize << k,
                        words.len()
                    )));
                }
                for (c, w) in words.iter().enumerate() {
                    if w.dim() != 1 << n {
                        return Err(QeccdError::DimensionMismatch {
                            expected: 1 << n,
                            actual: w.dim(),
                        });
                    }
                    for (j, s) in gen_mats.iter().enumerate() {
                        let moved = s * w.amplitudes() - w.amplitudes();
                        if moved.norm() > policy.algebraic.max(1e-10) {
                            return Err(QeccdError::NotStabilized {
                                codeword: c,
                                generator: j,
                            });
                        }
                    }
                }
                words
            }
            None => {
                let dim = 1usize << n;
                let mut projector = CMatrix::identity(dim, dim);
                for s in &gen_mats {
                    projector = half_sum(s, 1.0) * projector;
                }
                let rank = projector.trace().re.round() as usize;
                if rank != 1 << k {
                    return Err(QeccdError::Validation(format!(
                        "generators stabilize a space of dimension {rank}, not {}",
                        1usize << k
                    )));
                }
                match &logical_ops {
                    Some(ops) => logical_basis_from_operators(&generators, ops, &projector, k, policy)?,
                    None => column_basis(&projector, 1 << k, policy.orthonormality)?,
                }
            }
        };
        let code_projector = projector_from_states(&logical_basis, policy)?;

        let errors: Vec<CMatrix> = error_basis.elements().iter().map(dense).collect::<Result<_>>()?;
        let syndrome_projectors = errors
            .iter()
            .map(|f| Projector::new(f * code_projector.entries() * f.adjoint(), policy))
            .collect::<Result<Vec<_>>>()?;

        let kl = knill_laflamme(&errors, code_projector.entries());
        if kl.max_residual > policy.kl_residual {
            let (a, b) = worst_kl_pair(&errors, code_projector.entries(), &kl.c);
            return Err(QeccdError::KnillLaflamme {
                a,
                b,
                residual: kl.max_residual,
            });
        }
        let smallest = hermitian_eigenvalues(&kl.c)
            .iter()
            .map(|v| v.abs())
            .fold(f64::INFINITY, f64::min);
        if smallest < policy.kl_residual {
            return Err(QeccdError::DegenerateCode);
        }

        Ok(StabilizerCode {
            n,
            k,
            generators,
            logical_basis,
            logical_ops,
            error_basis,
            syndromes,
            code_projector,
            syndrome_projectors,
            kl,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn logical_basis(&self) -> &[StateVector] {
        &self.logical_basis
    }

    pub fn logical_ops(&self) -> Option<&LogicalOperators> {
        self.logical_ops.as_ref()
    }

    pub fn noisy_coords(&self) -> &[usize] {
        self.error_basis.coords()
    }

    pub fn error_basis(&self) -> &ErrorBasis {
        &self.error_basis
    }

    /// Syndrome of every error-basis element, in basis order.
    pub fn syndrome_table(&self) -> &[Syndrome] {
        &self.syndromes
    }

    pub fn code_projector(&self) -> &Projector {
        &self.code_projector
    }

    pub fn kl_condition(&self) -> &KnillLaflamme {
        &self.kl
    }

    pub fn hamming(&self) -> HammingBound {
        hamming_bound(self.n, self.k, self.error_basis.p())
    }

    pub fn is_perfect(&self) -> bool {
        self.hamming().perfect
    }

    pub fn syndrome_of(&self, error_index: usize) -> Result<Syndrome> {
        self.syndromes
            .get(error_index)
            .copied()
            .ok_or(QeccdError::IndexOutOfRange {
                index: error_index,
                size: self.syndromes.len(),
            })
    }

    /// Syndrome of an arbitrary Pauli from its commutation with each generator.
    pub fn syndrome_of_operator(&self, op: &PauliOperator) -> Result<Syndrome> {
        syndrome_of_operator(&self.generators, op)
    }

    /// Error-basis index whose syndrome is `syndrome`.
    pub fn error_for_syndrome(&self, syndrome: &Syndrome) -> Result<usize> {
        self.syndromes
            .iter()
            .position(|s| s == syndrome)
            .ok_or_else(|| QeccdError::UnknownSyndrome(syndrome.to_string()))
    }

    /// `F_x Π F_x†`: projector onto `span{F_x |J_L⟩}` for the error with this syndrome.
    pub fn syndrome_projector(&self, syndrome: &Syndrome) -> Result<&Projector> {
        Ok(&self.syndrome_projectors[self.error_for_syndrome(syndrome)?])
    }

    pub fn syndrome_projector_by_index(&self, error_index: usize) -> Result<&Projector> {
        self.syndrome_projectors
            .get(error_index)
            .ok_or(QeccdError::IndexOutOfRange {
                index: error_index,
                size: self.syndrome_projectors.len(),
            })
    }

    /// Dense matrix of error-basis element `index` on the full register.
    pub fn error_matrix(&self, index: usize) -> Result<CMatrix> {
        to_matrix(self.error_basis.element(index)?)
    }

    /// `|Ψ_L⟩ = Σ_j β_j |j_L⟩`.
    pub fn encode(&self, beta: &[Complex64], policy: &NumericPolicy) -> Result<StateVector> {
        if beta.len() != self.logical_basis.len() {
            return Err(QeccdError::DimensionMismatch {
                expected: self.logical_basis.len(),
                actual: beta.len(),
            });
        }
        let norm = beta.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > policy.algebraic {
            return Err(QeccdError::Validation(format!("logical amplitudes have norm {norm}")));
        }
        let dim = 1usize << self.n;
        let mut psi = nalgebra::DVector::zeros(dim);
        for (b, word) in beta.iter().zip(&self.logical_basis) {
            psi += word.amplitudes() * *b;
        }
        StateVector::from_dvector(psi)
    }

    /// Checks that every logical basis state is fixed by every generator.
    pub fn verify_stabilized(&self, policy: &NumericPolicy) -> Result<()> {
        for (j, g) in self.generators.iter().enumerate() {
            let m = dense(g)?;
            if !is_unitary(&m, policy.algebraic) {
                return Err(QeccdError::Validation(format!("generator {j} is not unitary")));
            }
            for (c, w) in self.logical_basis.iter().enumerate() {
                if (&m * w.amplitudes() - w.amplitudes()).norm() > policy.algebraic {
                    return Err(QeccdError::NotStabilized {
                        codeword: c,
                        generator: j,
                    });
                }
            }
        }
        Ok(())
    }
}

fn knill_laflamme(errors: &[CMatrix], projector: &CMatrix) -> KnillLaflamme {
    let d2 = errors.len();
    let trace = projector.trace();
    let mut c = CMatrix::zeros(d2, d2);
    let mut max_residual: f64 = 0.0;
    for a in 0..d2 {
        let left = projector * errors[a].adjoint();
        for b in 0..d2 {
            let sandwich = &left * &errors[b] * projector;
            let cab = sandwich.trace() / trace;
            c[(a, b)] = cab;
            max_residual = max_residual.max(max_abs(&(sandwich - projector * cab)));
        }
    }
    KnillLaflamme { c, max_residual }
}

fn worst_kl_pair(errors: &[CMatrix], projector: &CMatrix, c: &CMatrix) -> (usize, usize) {
    let mut worst = (0, 0, -1.0);
    for a in 0..errors.len() {
        for b in 0..errors.len() {
            let r = max_abs(&(projector * errors[a].adjoint() * &errors[b] * projector - projector * c[(a, b)]));
            if r > worst.2 {
                worst = (a, b, r);
            }
        }
    }
    (worst.0, worst.1)
}

fn basis_state(n: usize, terms: &[(&str, f64)], scale: f64) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (bits, sign) in terms {
        amps[usize::from_str_radix(bits, 2).expect("binary literal")] = Complex64::new(sign * scale, 0.0);
    }
    StateVector::new(amps).expect("power-of-two length")
}

/// Paulis from literal strings.
fn words(list: &[&str]) -> Vec<PauliOperator> {
    list.iter().map(|s| s.parse().expect("valid literal")).collect()
}

/// The `[[3,1]]` code with generators `XIX`, `YYZ`, correcting any error on qubit 0.
pub fn code3() -> StabilizerCode {
    let zero = basis_state(3, &[("001", 1.0), ("010", 1.0), ("100", 1.0), ("111", 1.0)], 0.5);
    let one = basis_state(3, &[("110", 1.0), ("101", -1.0), ("011", 1.0), ("000", -1.0)], 0.5);
    StabilizerCode::build(
        3,
        words(&["XIX", "YYZ"]),
        &[0],
        Some(vec![zero, one]),
        None,
        &NumericPolicy::default(),
    )
    .expect("built-in [[3,1]] code is valid")
}

/// The `[[5,1]]` code with generators `IZZZZ`, `XXXII`, `ZXZIX`, `ZZXXI`,
/// correcting any error on qubits 0 and 1.
pub fn code5() -> StabilizerCode {
    let zero = basis_state(
        5,
        &[
            ("00000", 1.0),
            ("00110", 1.0),
            ("01001", 1.0),
            ("01111", -1.0),
            ("10011", -1.0),
            ("10101", 1.0),
            ("11010", 1.0),
            ("11100", 1.0),
        ],
        1.0 / (2.0 * 2f64.sqrt()),
    );
    let flip = to_matrix(&"XXXXX".parse().expect("literal")).expect("small");
    let one = zero.apply(&flip).expect("dimensions match");
    StabilizerCode::build(
        5,
        words(&["IZZZZ", "XXXII", "ZXZIX", "ZZXXI"]),
        &[0, 1],
        Some(vec![zero, one]),
        None,
        &NumericPolicy::default(),
    )
    .expect("built-in [[5,1]] code is valid")
}

/// Names accepted by [`builtin_code`].
pub const BUILTIN_CODES: &[&str] = &["code3", "code5"];

pub fn builtin_code(name: &str) -> Result<StabilizerCode> {
    match name {
        "code3" => Ok(code3()),
        "code5" => Ok(code5()),
        other => Err(QeccdError::UnknownCode(other.to_string())),
    }
}
