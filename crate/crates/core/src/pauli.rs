// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact algebra of the n-qubit Pauli group.
//!
//! An operator is stored in symplectic form as `i^phase · X^x · Z^z`, with one
//! bit per qubit in each mask (bit `q` is qubit `q`). A `Y` on a qubit is the
//! overlap of an x bit and a z bit and carries one unit of phase, following
//! `Y = iXZ`. The Hermitian word `Y` therefore has `phase = 1`, and `XZ` has
//! `phase = 0`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QeccdError, Result};
use crate::CMatrix;

/// Largest qubit count representable by the bit masks.
pub const MAX_PAULI_QUBITS: usize = 64;

/// Largest qubit count for which dense matrices are rendered.
pub const MAX_DENSE_QUBITS: usize = 12;

/// A scalar in `{+1, +i, -1, -i}`, stored as the exponent of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliFactor(u8);

impl PauliFactor {
    pub const ONE: PauliFactor = PauliFactor(0);
    pub const I: PauliFactor = PauliFactor(1);
    pub const MINUS_ONE: PauliFactor = PauliFactor(2);
    pub const MINUS_I: PauliFactor = PauliFactor(3);

    /// `i^exp`.
    pub fn from_exponent(exp: u32) -> Self {
        PauliFactor((exp % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Self {
        PauliFactor((4 - self.0) % 4)
    }

    /// True for ±1, false for ±i.
    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for PauliFactor {
    type Output = PauliFactor;

    fn mul(self, rhs: PauliFactor) -> PauliFactor {
        PauliFactor((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for PauliFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// An n-qubit Pauli operator `i^phase · X^x · Z^z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

fn mask_limit(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_same_size(p: &PauliOperator, q: &PauliOperator) -> Result<()> {
    if p.n != q.n {
        return Err(QeccdError::DimensionMismatch {
            expected: p.n,
            actual: q.n,
        });
    }
    Ok(())
}

impl PauliOperator {
    /// Builds `i^phase · X^x · Z^z` from raw masks.
    pub fn new(n: usize, x: u64, z: u64, phase: u32) -> Result<Self> {
        if n > MAX_PAULI_QUBITS {
            return Err(QeccdError::ResourceLimit {
                qubits: n,
                limit: MAX_PAULI_QUBITS,
            });
        }
        let limit = mask_limit(n);
        if x & !limit != 0 || z & !limit != 0 {
            return Err(QeccdError::Validation(format!("mask has bits beyond qubit count {n}")));
        }
        Ok(PauliOperator {
            n,
            x,
            z,
            phase: (phase % 4) as u8,
        })
    }

    pub fn identity(n: usize) -> Self {
        PauliOperator {
            n,
            x: 0,
            z: 0,
            phase: 0,
        }
    }

    /// The Hermitian tensor-product word with the given masks (no extra scalar).
    pub fn word(n: usize, x: u64, z: u64) -> Result<Self> {
        let y = (x & z).count_ones();
        Self::new(n, x, z, y)
    }

    /// A single-qubit Pauli (`'I'`, `'X'`, `'Y'` or `'Z'`) on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, kind: char) -> Result<Self> {
        if qubit >= n {
            return Err(QeccdError::IndexOutOfRange { index: qubit, size: n });
        }
        let bit = 1u64 << qubit;
        let (x, z) = match kind {
            'I' => (0, 0),
            'X' => (bit, 0),
            'Z' => (0, bit),
            'Y' => (bit, bit),
            other => return Err(QeccdError::Parse(format!("unknown Pauli '{other}'"))),
        };
        Self::word(n, x, z)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0 && self.phase == 0
    }

    /// Number of qubits on which the operator acts non-trivially.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Scalar relating this operator to its Hermitian word: `self = factor · word`.
    pub fn relative_factor(&self) -> PauliFactor {
        let y = (self.x & self.z).count_ones();
        PauliFactor::from_exponent(self.phase as u32 + 4 - y % 4)
    }

    /// The Hermitian word with the same masks.
    pub fn bare(&self) -> PauliOperator {
        PauliOperator {
            phase: ((self.x & self.z).count_ones() % 4) as u8,
            ..*self
        }
    }

    pub fn scaled(&self, factor: PauliFactor) -> PauliOperator {
        PauliOperator {
            phase: (self.phase + factor.exponent()) % 4,
            ..*self
        }
    }

    /// Single-qubit letter on `qubit`, ignoring phase.
    pub fn letter(&self, qubit: usize) -> char {
        let bit = 1u64 << qubit;
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }

    /// Word string without a phase prefix, qubit 0 first.
    pub fn word_string(&self) -> String {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    /// Full operator product `self · other`, phase included.
    pub fn compose(&self, other: &PauliOperator) -> Result<PauliOperator> {
        check_same_size(self, other)?;
        // Z^z1 X^x2 = (-1)^{|z1 & x2|} X^x2 Z^z1
        let swap = 2 * (self.z & other.x).count_ones();
        Ok(PauliOperator {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: ((self.phase as u32 + other.phase as u32 + swap) % 4) as u8,
        })
    }

    /// Adjoint; Pauli words are Hermitian so only the relative factor is conjugated.
    pub fn adjoint(&self) -> PauliOperator {
        let word = self.bare();
        word.scaled(self.relative_factor().conj())
    }

    /// Restricts to the given qubits (in list order), dropping the phase.
    pub fn restrict(&self, coords: &[usize]) -> PauliOperator {
        let (mut x, mut z) = (0u64, 0u64);
        for (j, &q) in coords.iter().enumerate() {
            x |= ((self.x >> q) & 1) << j;
            z |= ((self.z >> q) & 1) << j;
        }
        PauliOperator::word(coords.len(), x, z).expect("restriction fits")
    }
}

/// Product `P·Q` split into a Pauli factor and a Hermitian word: `g·R = P·Q`.
pub fn pauli_mul(p: &PauliOperator, q: &PauliOperator) -> Result<(PauliFactor, PauliOperator)> {
    let product = p.compose(q)?;
    Ok((product.relative_factor(), product.bare()))
}

/// True iff `P·Q = Q·P`, from the symplectic inner product of the masks.
pub fn commutes(p: &PauliOperator, q: &PauliOperator) -> Result<bool> {
    check_same_size(p, q)?;
    let form = (p.x & q.z).count_ones() + (p.z & q.x).count_ones();
    Ok(form.is_multiple_of(2))
}

/// Dense `2^n × 2^n` matrix; qubit 0 is the most significant tensor factor.
pub fn to_matrix(p: &PauliOperator) -> Result<CMatrix> {
    if p.n > MAX_DENSE_QUBITS {
        return Err(QeccdError::ResourceLimit {
            qubits: p.n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << p.n;
    // qubit q lives at basis-index bit n-1-q
    let (mut xi, mut zi) = (0usize, 0usize);
    for q in 0..p.n {
        let shift = p.n - 1 - q;
        xi |= (((p.x >> q) & 1) as usize) << shift;
        zi |= (((p.z >> q) & 1) as usize) << shift;
    }
    let scale = PauliFactor::from_exponent(p.phase as u32).to_complex();
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let sign = if (zi & col).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        m[(col ^ xi, col)] = scale * sign;
    }
    Ok(m)
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.relative_factor().exponent() {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.word_string())
    }
}

impl FromStr for PauliOperator {
    type Err = QeccdError;

    /// Parses `[sign]word`, where the sign is one of `+`, `-`, `+i`, `-i`
    /// (`−` is accepted for the minus sign) and the word is over `{I,X,Y,Z}`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (factor, word) = if let Some(rest) = s.strip_prefix("+i") {
            (PauliFactor::I, rest)
        } else if let Some(rest) = s.strip_prefix("-i").or_else(|| s.strip_prefix("−i")) {
            (PauliFactor::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (PauliFactor::ONE, rest)
        } else if let Some(rest) = s.strip_prefix('-').or_else(|| s.strip_prefix('−')) {
            (PauliFactor::MINUS_ONE, rest)
        } else {
            (PauliFactor::ONE, s)
        };
        let n = word.chars().count();
        if n == 0 {
            return Err(QeccdError::Parse(format!("empty Pauli string '{s}'")));
        }
        if n > MAX_PAULI_QUBITS {
            return Err(QeccdError::ResourceLimit {
                qubits: n,
                limit: MAX_PAULI_QUBITS,
            });
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in word.chars().enumerate() {
            let bit = 1u64 << q;
            match c {
                'I' => {}
                'X' => x |= bit,
                'Z' => z |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                }
                other => {
                    return Err(QeccdError::Parse(format!(
                        "invalid character '{other}' in Pauli string '{s}'"
                    )))
                }
            }
        }
        Ok(PauliOperator::word(n, x, z)?.scaled(factor))
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The `4^p` Pauli words on a set of noisy coordinates, embedded as identity
/// elsewhere, in a fixed order.
///
/// Element `index` has `u = index >> p` and `v = index & (2^p - 1)`, where the
/// first coordinate is the most significant bit of `u` and `v`. This is the
/// lexicographic order in `(u, v)`; element 0 is the identity. For one
/// coordinate the order is `I, Z, X, Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBasis {
    n_total: usize,
    coords: Vec<usize>,
    elements: Vec<PauliOperator>,
}

impl ErrorBasis {
    pub fn num_qubits(&self) -> usize {
        self.n_total
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    /// Number of noisy coordinates `p`.
    pub fn p(&self) -> usize {
        self.coords.len()
    }

    /// Local dimension `d = 2^p`.
    pub fn d(&self) -> usize {
        1 << self.coords.len()
    }

    /// Number of elements, `d²`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PauliOperator] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> Result<&PauliOperator> {
        self.elements.get(index).ok_or(QeccdError::IndexOutOfRange {
            index,
            size: self.elements.len(),
        })
    }

    /// Index of the element with the same masks as `op`, ignoring phase.
    pub fn index_of(&self, op: &PauliOperator) -> Option<usize> {
        if op.num_qubits() != self.n_total {
            return None;
        }
        let p = self.coords.len();
        let mut support = 0u64;
        let (mut u, mut v) = (0usize, 0usize);
        for (j, &q) in self.coords.iter().enumerate() {
            support |= 1 << q;
            let shift = p - 1 - j;
            u |= (((op.x_mask() >> q) & 1) as usize) << shift;
            v |= (((op.z_mask() >> q) & 1) as usize) << shift;
        }
        if (op.x_mask() | op.z_mask()) & !support != 0 {
            return None;
        }
        Some((u << p) | v)
    }

    /// Looks up an element by its word string (full-length or restricted to
    /// the noisy coordinates); any phase prefix is ignored.
    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        let op: PauliOperator = label.parse().ok()?;
        if op.num_qubits() == self.n_total {
            return self.index_of(&op);
        }
        if op.num_qubits() == self.coords.len() {
            return self.labels().iter().position(|l| *l == op.word_string());
        }
        None
    }

    /// `F_a · F_b = g · F_c`, returned as `(g, c)`.
    pub fn product(&self, a: usize, b: usize) -> Result<(PauliFactor, usize)> {
        let (g, word) = pauli_mul(self.element(a)?, self.element(b)?)?;
        let c = self
            .index_of(&word)
            .expect("error basis is closed under multiplication");
        Ok((g, c))
    }

    /// Element restricted to the noisy coordinates, as a `p`-qubit word.
    pub fn local(&self, index: usize) -> Result<PauliOperator> {
        Ok(self.element(index)?.restrict(&self.coords))
    }

    /// Labels of every element restricted to the noisy coordinates (`"I"` for `p = 0`).
    pub fn labels(&self) -> Vec<String> {
        self.elements
            .iter()
            .map(|e| {
                if self.coords.is_empty() {
                    "I".to_string()
                } else {
                    e.restrict(&self.coords).word_string()
                }
            })
            .collect()
    }

    /// Dense `d × d` matrices of every element restricted to the noisy coordinates.
    pub fn local_matrices(&self) -> Result<Vec<CMatrix>> {
        (0..self.len())
            .map(|i| {
                if self.coords.is_empty() {
                    Ok(CMatrix::identity(1, 1))
                } else {
                    to_matrix(&self.local(i)?)
                }
            })
            .collect()
    }

    /// Checks that every product of two elements is an element up to a Pauli factor.
    pub fn verify_closure(&self) -> Result<()> {
        for a in &self.elements {
            for b in &self.elements {
                let (_, word) = pauli_mul(a, b)?;
                if self.index_of(&word).is_none() {
                    return Err(QeccdError::Validation(format!(
                        "product {a}·{b} leaves the error basis"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// All `4^p` Pauli words on `coords`, embedded in `n_total` qubits.
pub fn enumerate_error_basis(n_total: usize, coords: &[usize]) -> Result<ErrorBasis> {
    if n_total > MAX_PAULI_QUBITS {
        return Err(QeccdError::ResourceLimit {
            qubits: n_total,
            limit: MAX_PAULI_QUBITS,
        });
    }
    for (i, &q) in coords.iter().enumerate() {
        if q >= n_total {
            return Err(QeccdError::InvalidCoordinates(format!(
                "coordinate {q} out of range for {n_total} qubits"
            )));
        }
        if coords[..i].contains(&q) {
            return Err(QeccdError::InvalidCoordinates(format!("duplicate coordinate {q}")));
        }
    }
    let p = coords.len();
    // 4^p elements must stay addressable
    if 2 * p >= usize::BITS as usize {
        return Err(QeccdError::ResourceLimit {
            qubits: p,
            limit: (usize::BITS as usize) / 2 - 1,
        });
    }
    let side = 1usize << p;
    let mut elements = Vec::with_capacity(side * side);
    for index in 0..side * side {
        let (u, v) = (index >> p, index & (side - 1));
        let (mut x, mut z) = (0u64, 0u64);
        for (j, &q) in coords.iter().enumerate() {
            let shift = p - 1 - j;
            x |= (((u >> shift) & 1) as u64) << q;
            z |= (((v >> shift) & 1) as u64) << q;
        }
        elements.push(PauliOperator::word(n_total, x, z)?);
    }
    Ok(ErrorBasis {
        n_total,
        coords: coords.to_vec(),
        elements,
    })
}
