// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

//! Measurement configurations, syndrome statistics and reconstruction of χ.
//!
//! A configuration is a pre-processing unitary applied to the noisy encoded
//! state before the syndrome measurement:
//!
//! - bare: no pre-processing; syndrome `x` occurs with probability `χ_{x,x}`;
//! - rotated `(a, b)`: `U = (F_a + F_b)/√2` when `F_a`, `F_b` anticommute and
//!   `U = (F_a + i F_b)/√2` when they commute. With `g_A F_A = F_a F_x` and
//!   `g_B F_B = F_b F_x`, syndrome `x` occurs with probability
//!   `½(χ_{A,A} + χ_{B,B}) + Re(g_A* g_B χ_{A,B})` for the first form and
//!   `½(χ_{A,A} + χ_{B,B}) + Im(g_A* g_B χ_{A,B})` for the second;
//! - toggled `(a, b, θ)`: `U · S⁺`, where `S⁺` multiplies the error space of
//!   error `m` by `e^{iθ_m}`, `θ_m = ±π/4`. This maps `χ` to `S χ S†`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, ProcessMatrix};
use crate::code::{StabilizerCode, Syndrome};
use crate::dense::{
    apply_channel, apply_unitary, expectation, is_unitary, outer, DensityMatrix, NumericPolicy, StateVector,
};
use crate::error::{QeccdError, Result};
use crate::pauli::{commutes, ErrorBasis, PauliFactor};
use crate::CMatrix;

/// Sign of a toggle phase `θ = ±π/4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaSign {
    Plus,
    Minus,
}

impl ThetaSign {
    pub fn phase(self) -> Complex64 {
        let angle = match self {
            ThetaSign::Plus => std::f64::consts::FRAC_PI_4,
            ThetaSign::Minus => -std::f64::consts::FRAC_PI_4,
        };
        Complex64::from_polar(1.0, angle)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ThetaSign::Plus => "+",
            ThetaSign::Minus => "-",
        }
    }

    fn from_symbol(s: &str) -> Result<Self> {
        match s {
            "+" => Ok(ThetaSign::Plus),
            "-" | "−" => Ok(ThetaSign::Minus),
            other => Err(QeccdError::Parse(format!("invalid theta sign '{other}'"))),
        }
    }

    /// `e^{i(θ_m - θ_n)}` as a Pauli factor.
    fn relative(m: ThetaSign, n: ThetaSign) -> PauliFactor {
        match (m, n) {
            (ThetaSign::Plus, ThetaSign::Minus) => PauliFactor::I,
            (ThetaSign::Minus, ThetaSign::Plus) => PauliFactor::MINUS_I,
            _ => PauliFactor::ONE,
        }
    }
}

/// Which of the two rotation forms `U(a, b)` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationForm {
    /// `(F_a + F_b)/√2`, anticommuting pair; reads real parts.
    Sum,
    /// `(F_a + i F_b)/√2`, commuting pair; reads imaginary parts.
    PhasedSum,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigKind {
    Bare,
    Rotated { a: usize, b: usize },
    Toggled { a: usize, b: usize, theta: Vec<ThetaSign> },
}

/// A pre-processing setup together with its realized unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    kind: ConfigKind,
    unitary: Option<CMatrix>,
}

/// `U(a, b)` on the full register and its form.
pub fn rotation_unitary(
    code: &StabilizerCode,
    a: usize,
    b: usize,
    policy: &NumericPolicy,
) -> Result<(CMatrix, RotationForm)> {
    if a == b {
        return Err(QeccdError::Validation("rotation needs two distinct errors".into()));
    }
    let basis = code.error_basis();
    let (fa, fb) = (basis.element(a)?, basis.element(b)?);
    let (ma, mb) = (code.error_matrix(a)?, code.error_matrix(b)?);
    let (u, form) = if commutes(fa, fb)? {
        (ma + mb * Complex64::new(0.0, 1.0), RotationForm::PhasedSum)
    } else {
        (ma + mb, RotationForm::Sum)
    };
    let u = u.scale(FRAC_1_SQRT_2);
    if !is_unitary(&u, policy.algebraic) {
        return Err(QeccdError::Validation(format!("U({a}, {b}) is not unitary")));
    }
    Ok((u, form))
}

fn check_theta(basis: &ErrorBasis, theta: &[ThetaSign]) -> Result<()> {
    if theta.len() != basis.len() {
        return Err(QeccdError::InvalidToggle(format!(
            "{} phases for {} errors",
            theta.len(),
            basis.len()
        )));
    }
    let plus = theta.iter().filter(|t| **t == ThetaSign::Plus).count();
    if 2 * plus != theta.len() {
        return Err(QeccdError::InvalidToggle(format!(
            "{plus} of {} phases are +π/4; both signs must appear equally often",
            theta.len()
        )));
    }
    Ok(())
}

/// `S⁺ = Σ_m e^{iθ_m} Π_m ⊕ I'`, where `Π_m` projects onto the error space of
/// error `m` and `I'` is the identity outside the error ball.
pub fn build_toggle(code: &StabilizerCode, theta: &[ThetaSign]) -> Result<CMatrix> {
    check_theta(code.error_basis(), theta)?;
    let dim = 1usize << code.n();
    let mut toggle = CMatrix::identity(dim, dim);
    for (m, sign) in theta.iter().enumerate() {
        let projector = code.syndrome_projector_by_index(m)?.entries();
        toggle += projector * (sign.phase() - Complex64::new(1.0, 0.0));
    }
    Ok(toggle)
}

impl Configuration {
    pub fn bare() -> Self {
        Configuration {
            kind: ConfigKind::Bare,
            unitary: None,
        }
    }

    pub fn rotated(code: &StabilizerCode, a: usize, b: usize, policy: &NumericPolicy) -> Result<Self> {
        let (u, _) = rotation_unitary(code, a, b, policy)?;
        Ok(Configuration {
            kind: ConfigKind::Rotated { a, b },
            unitary: Some(u),
        })
    }

    pub fn toggled(
        code: &StabilizerCode,
        a: usize,
        b: usize,
        theta: Vec<ThetaSign>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let (u, _) = rotation_unitary(code, a, b, policy)?;
        let toggle = build_toggle(code, &theta)?;
        let realized = u * toggle;
        if !is_unitary(&realized, policy.algebraic) {
            return Err(QeccdError::InvalidToggle("U·S⁺ is not unitary".into()));
        }
        Ok(Configuration {
            kind: ConfigKind::Toggled { a, b, theta },
            unitary: Some(realized),
        })
    }

    pub fn kind(&self) -> &ConfigKind {
        &self.kind
    }

    /// Realized pre-processing unitary; `None` for the bare configuration.
    pub fn unitary(&self) -> Option<&CMatrix> {
        self.unitary.as_ref()
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ConfigKind::Bare => "bare",
            ConfigKind::Rotated { .. } => "rotated",
            ConfigKind::Toggled { .. } => "toggled",
        }
    }

    pub fn descriptor(&self, basis: &ErrorBasis) -> ConfigDescriptor {
        let word = |i: usize| basis.elements()[i].word_string();
        match &self.kind {
            ConfigKind::Bare => ConfigDescriptor {
                kind: "bare".into(),
                a: None,
                b: None,
                theta: None,
            },
            ConfigKind::Rotated { a, b } => ConfigDescriptor {
                kind: "rotated".into(),
                a: Some(word(*a)),
                b: Some(word(*b)),
                theta: None,
            },
            ConfigKind::Toggled { a, b, theta } => ConfigDescriptor {
                kind: "toggled".into(),
                a: Some(word(*a)),
                b: Some(word(*b)),
                theta: Some(
                    theta
                        .iter()
                        .enumerate()
                        .map(|(m, t)| (word(m), t.symbol().to_string()))
                        .collect(),
                ),
            },
        }
    }

    pub fn from_descriptor(code: &StabilizerCode, desc: &ConfigDescriptor, policy: &NumericPolicy) -> Result<Self> {
        let basis = code.error_basis();
        let lookup = |field: &Option<String>, name: &str| -> Result<usize> {
            let label = field
                .as_ref()
                .ok_or_else(|| QeccdError::Parse(format!("configuration is missing '{name}'")))?;
            basis
                .index_of_label(label)
                .ok_or_else(|| QeccdError::Parse(format!("'{label}' is not in the error basis")))
        };
        match desc.kind.as_str() {
            "bare" => Ok(Configuration::bare()),
            "rotated" => Configuration::rotated(code, lookup(&desc.a, "a")?, lookup(&desc.b, "b")?, policy),
            "toggled" => {
                let map = desc
                    .theta
                    .as_ref()
                    .ok_or_else(|| QeccdError::Parse("toggled configuration is missing 'theta'".into()))?;
                let mut theta = vec![None; basis.len()];
                for (label, sign) in map {
                    let m = basis
                        .index_of_label(label)
                        .ok_or_else(|| QeccdError::Parse(format!("'{label}' is not in the error basis")))?;
                    theta[m] = Some(ThetaSign::from_symbol(sign)?);
                }
                let theta = theta
                    .into_iter()
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| QeccdError::InvalidToggle("theta does not cover the error basis".into()))?;
                Configuration::toggled(code, lookup(&desc.a, "a")?, lookup(&desc.b, "b")?, theta, policy)
            }
            other => Err(QeccdError::Parse(format!("unknown configuration kind '{other}'"))),
        }
    }
}

/// Serialized form of a configuration, with errors named by their Pauli words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigDescriptor {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<BTreeMap<String, String>>,
}

/// `g_A F_A = F_a F_x` and `g_B F_B = F_b F_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliFactors {
    pub g_a: PauliFactor,
    pub a: usize,
    pub g_b: PauliFactor,
    pub b: usize,
    /// Both factors real or both imaginary.
    pub same_type: bool,
}

pub fn pauli_factors(basis: &ErrorBasis, a: usize, b: usize, x: usize) -> Result<PauliFactors> {
    let (g_a, big_a) = basis.product(a, x)?;
    let (g_b, big_b) = basis.product(b, x)?;
    Ok(PauliFactors {
        g_a,
        a: big_a,
        g_b,
        b: big_b,
        same_type: g_a.is_real() == g_b.is_real(),
    })
}

/// One syndrome outcome of one configuration, as an affine function of χ:
/// `ξ = ½(χ_{A,A} + χ_{B,B}) + c·Re χ_{A,B} + s·Im χ_{A,B}`.
///
/// Bare readouts have `A = B = x` and `c = s = 0`, so `ξ = χ_{x,x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearReadout {
    pub config: usize,
    pub error: usize,
    pub syndrome: Syndrome,
    pub a: usize,
    pub b: usize,
    pub c: i8,
    pub s: i8,
}

impl LinearReadout {
    pub fn is_diagonal(&self) -> bool {
        self.a == self.b
    }

    pub fn evaluate(&self, chi: &ProcessMatrix) -> f64 {
        let z = chi.get(self.a, self.b);
        0.5 * (chi.get(self.a, self.a).re + chi.get(self.b, self.b).re) + self.c as f64 * z.re + self.s as f64 * z.im
    }

    /// `(c, s)` rewritten as coefficients on `χ_{m,n}` for the unordered pair
    /// `{A, B} = {m, n}`; `None` for another pair.
    pub fn coefficients_on(&self, m: usize, n: usize) -> Option<(i8, i8)> {
        if (self.a, self.b) == (m, n) {
            Some((self.c, self.s))
        } else if (self.a, self.b) == (n, m) {
            // χ_{B,A} = conj(χ_{A,B})
            Some((self.c, -self.s))
        } else {
            None
        }
    }
}

/// `(c, s)` for `Re(h χ)` or `Im(h χ)`.
fn readout_signs(h: PauliFactor, form: RotationForm) -> (i8, i8) {
    match (form, h.exponent()) {
        (RotationForm::Sum, 0) => (1, 0),
        (RotationForm::Sum, 1) => (0, -1),
        (RotationForm::Sum, 2) => (-1, 0),
        (RotationForm::Sum, _) => (0, 1),
        (RotationForm::PhasedSum, 0) => (0, 1),
        (RotationForm::PhasedSum, 1) => (1, 0),
        (RotationForm::PhasedSum, 2) => (0, -1),
        (RotationForm::PhasedSum, _) => (-1, 0),
    }
}

fn rotation_form(code: &StabilizerCode, a: usize, b: usize) -> Result<RotationForm> {
    let basis = code.error_basis();
    Ok(if commutes(basis.element(a)?, basis.element(b)?)? {
        RotationForm::PhasedSum
    } else {
        RotationForm::Sum
    })
}

/// The readout of configuration `cfg` (plan position `config`) at error `x`.
pub fn readout(code: &StabilizerCode, cfg: &Configuration, config: usize, x: usize) -> Result<LinearReadout> {
    let syndrome = code.syndrome_of(x)?;
    let (a, b, toggle) = match &cfg.kind {
        ConfigKind::Bare => {
            return Ok(LinearReadout {
                config,
                error: x,
                syndrome,
                a: x,
                b: x,
                c: 0,
                s: 0,
            })
        }
        ConfigKind::Rotated { a, b } => (*a, *b, None),
        ConfigKind::Toggled { a, b, theta } => (*a, *b, Some(theta)),
    };
    let f = pauli_factors(code.error_basis(), a, b, x)?;
    let mut h = f.g_a.conj() * f.g_b;
    if let Some(theta) = toggle {
        h = h * ThetaSign::relative(theta[f.a], theta[f.b]);
    }
    let (c, s) = readout_signs(h, rotation_form(code, a, b)?);
    Ok(LinearReadout {
        config,
        error: x,
        syndrome,
        a: f.a,
        b: f.b,
        c,
        s,
    })
}

/// Closed-form probability of the syndrome of error `x` under `cfg`, given χ.
pub fn xi_predicted(chi: &ProcessMatrix, code: &StabilizerCode, cfg: &Configuration, x: usize) -> Result<f64> {
    let (a, b, chi) = match &cfg.kind {
        ConfigKind::Bare => return Ok(chi.get(x, x).re),
        ConfigKind::Rotated { a, b } => (*a, *b, chi.clone()),
        ConfigKind::Toggled { a, b, theta } => {
            let phases: Vec<Complex64> = theta.iter().map(|t| t.phase()).collect();
            (*a, *b, chi.conjugated_by_diagonal(&phases)?)
        }
    };
    let f = pauli_factors(code.error_basis(), a, b, x)?;
    let diag = 0.5 * (chi.get(f.a, f.a).re + chi.get(f.b, f.b).re);
    let cross = f.g_a.to_complex().conj() * f.g_b.to_complex() * chi.get(f.a, f.b);
    Ok(match rotation_form(code, a, b)? {
        RotationForm::Sum => diag + cross.re,
        RotationForm::PhasedSum => diag + cross.im,
    })
}

/// Observed outcome distribution of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcomes {
    /// Exact probabilities per syndrome, in error-basis order.
    Exact(Vec<(Syndrome, f64)>),
    /// Counts per syndrome plus shots that landed outside every error space.
    Sampled {
        counts: Vec<(Syndrome, u64)>,
        undetected: u64,
        shots: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    /// Position of the configuration in its plan.
    pub config: usize,
    pub outcomes: Outcomes,
}

impl MeasurementRecord {
    pub fn is_exact(&self) -> bool {
        matches!(self.outcomes, Outcomes::Exact(_))
    }

    /// Probability (exact) or relative frequency (sampled) of a syndrome.
    pub fn frequency(&self, syndrome: &Syndrome) -> Option<f64> {
        match &self.outcomes {
            Outcomes::Exact(probs) => probs.iter().find(|(s, _)| s == syndrome).map(|(_, p)| *p),
            Outcomes::Sampled { counts, shots, .. } => counts
                .iter()
                .find(|(s, _)| s == syndrome)
                .map(|(_, c)| *c as f64 / *shots as f64),
        }
    }

    /// Total probability (exact) or shot count (sampled) over detected syndromes.
    pub fn total(&self) -> f64 {
        match &self.outcomes {
            Outcomes::Exact(probs) => probs.iter().map(|(_, p)| p).sum(),
            Outcomes::Sampled { counts, .. } => counts.iter().map(|(_, c)| *c as f64).sum(),
        }
    }
}

fn check_support(code: &StabilizerCode, ch: &Channel) -> Result<()> {
    if ch.p() != code.noisy_coords().len() {
        return Err(QeccdError::SupportMismatch {
            channel: ch.p(),
            code: code.noisy_coords().len(),
        });
    }
    Ok(())
}

/// `ℰ(|Ψ_L⟩⟨Ψ_L|)` with the channel acting on the code's noisy coordinates.
pub fn noisy_encoded_state(
    code: &StabilizerCode,
    beta: &[Complex64],
    ch: &Channel,
    policy: &NumericPolicy,
) -> Result<DensityMatrix> {
    check_support(code, ch)?;
    let psi = code.encode(beta, policy)?;
    apply_channel(&outer(&psi), ch.kraus(), code.noisy_coords(), false, policy)
}

fn measure(
    code: &StabilizerCode,
    rho: &DensityMatrix,
    cfg: &Configuration,
    config: usize,
    policy: &NumericPolicy,
) -> Result<MeasurementRecord> {
    let rotated;
    let state = match cfg.unitary() {
        Some(u) => {
            rotated = apply_unitary(rho, u, policy)?;
            &rotated
        }
        None => rho,
    };
    let probs = code
        .syndrome_table()
        .iter()
        .map(|s| Ok((*s, expectation(state, code.syndrome_projector(s)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementRecord {
        config,
        outcomes: Outcomes::Exact(probs),
    })
}

/// Exact syndrome distribution of `cfg` applied to the noisy encoded state.
pub fn xi_simulated(
    code: &StabilizerCode,
    beta: &[Complex64],
    ch: &Channel,
    cfg: &Configuration,
    policy: &NumericPolicy,
) -> Result<MeasurementRecord> {
    let rho = noisy_encoded_state(code, beta, ch, policy)?;
    measure(code, &rho, cfg, 0, policy)
}

/// Exact records for every configuration of a plan; configurations are
/// evaluated in parallel against one shared noisy state.
pub fn simulate_plan(
    code: &StabilizerCode,
    beta: &[Complex64],
    ch: &Channel,
    plan: &Plan,
    policy: &NumericPolicy,
) -> Result<Vec<MeasurementRecord>> {
    let rho = noisy_encoded_state(code, beta, ch, policy)?;
    plan.configurations
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| measure(code, &rho, cfg, i, policy))
        .collect()
}

/// Ordered configurations and the readouts they produce.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub configurations: Vec<Configuration>,
    pub readouts: Vec<LinearReadout>,
}

impl Plan {
    /// Plan from explicit configurations; readouts are derived for every syndrome.
    pub fn from_configurations(code: &StabilizerCode, configurations: Vec<Configuration>) -> Result<Self> {
        let mut readouts = Vec::new();
        for (i, cfg) in configurations.iter().enumerate() {
            for x in 0..code.error_basis().len() {
                readouts.push(readout(code, cfg, i, x)?);
            }
        }
        Ok(Plan {
            configurations,
            readouts,
        })
    }

    pub fn from_descriptors(
        code: &StabilizerCode,
        descriptors: &[ConfigDescriptor],
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let configurations = descriptors
            .iter()
            .map(|d| Configuration::from_descriptor(code, d, policy))
            .collect::<Result<Vec<_>>>()?;
        Self::from_configurations(code, configurations)
    }

    pub fn descriptors(&self, code: &StabilizerCode) -> Vec<ConfigDescriptor> {
        self.configurations
            .iter()
            .map(|c| c.descriptor(code.error_basis()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }
}

/// Default plan: one bare configuration, then for every non-identity error
/// `P` a rotated configuration `(I, P)` and its toggled counterpart.
///
/// `U = (I + iP)/√2` is unitary for every `P`. Multiplication by `P` pairs
/// each error `x` with `P·F_x` without fixed points; the toggle gives `+π/4`
/// to the smaller index of every pair and `−π/4` to the larger one, so the
/// toggled readout swaps the real and imaginary parts seen by the rotated one.
pub fn plan_configurations(code: &StabilizerCode, policy: &NumericPolicy) -> Result<Plan> {
    let basis = code.error_basis();
    let mut configurations = vec![Configuration::bare()];
    for p in 1..basis.len() {
        configurations.push(Configuration::rotated(code, 0, p, policy)?);
        let theta = (0..basis.len())
            .map(|x| {
                let (_, partner) = basis.product(p, x)?;
                Ok(if x < partner { ThetaSign::Plus } else { ThetaSign::Minus })
            })
            .collect::<Result<Vec<_>>>()?;
        configurations.push(Configuration::toggled(code, 0, p, theta, policy)?);
    }
    Plan::from_configurations(code, configurations)
}

/// Result of [`reconstruct`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub chi: ProcessMatrix,
    /// Largest disagreement between redundant readouts of one quantity.
    pub max_spread: f64,
}

#[derive(Default, Clone)]
struct Accumulator {
    sum: f64,
    count: usize,
    min: f64,
    max: f64,
}

impl Accumulator {
    fn push(&mut self, value: f64) {
        if self.count == 0 {
            self.min = value;
            self.max = value;
        } else {
            self.min = self.min.min(value);
            self.max = self.max.max(value);
        }
        self.sum += value;
        self.count += 1;
    }

    fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }

    fn spread(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.max - self.min
        }
    }
}

/// Solves the plan's readouts for χ.
///
/// Diagonal entries come from diagonal readouts. For an off-diagonal readout
/// the diagonal contribution is subtracted and the known sign recovers one
/// real or imaginary part of `χ_{m,n}` (`m < n`); redundant readouts of a part
/// are averaged and `χ_{n,m}` is set to the conjugate. With exact records the
/// redundant readouts must agree within `policy.kl_residual`.
pub fn reconstruct(
    plan: &Plan,
    records: &[MeasurementRecord],
    basis: &ErrorBasis,
    policy: &NumericPolicy,
) -> Result<Reconstruction> {
    let d2 = basis.len();
    let mut by_config: Vec<Option<&MeasurementRecord>> = vec![None; plan.len()];
    for r in records {
        if r.config < plan.len() {
            by_config[r.config] = Some(r);
        }
    }
    let exact = records.iter().all(|r| r.is_exact());
    let observe = |ro: &LinearReadout| -> Result<f64> {
        let record = by_config[ro.config].ok_or(QeccdError::MissingConfiguration(ro.config))?;
        record
            .frequency(&ro.syndrome)
            .ok_or_else(|| QeccdError::UnknownSyndrome(ro.syndrome.to_string()))
    };

    let mut diagonal = vec![Accumulator::default(); d2];
    for ro in plan.readouts.iter().filter(|r| r.is_diagonal()) {
        diagonal[ro.a].push(observe(ro)?);
    }
    let mut diag = vec![0.0; d2];
    let mut max_spread: f64 = 0.0;
    for (m, acc) in diagonal.iter().enumerate() {
        diag[m] = acc
            .mean()
            .ok_or_else(|| QeccdError::Validation(format!("plan does not determine chi[{m},{m}]")))?;
        max_spread = max_spread.max(acc.spread());
    }

    // (re, im) accumulators per unordered pair m < n
    let mut parts: BTreeMap<(usize, usize), (Accumulator, Accumulator)> = BTreeMap::new();
    for ro in plan.readouts.iter().filter(|r| !r.is_diagonal()) {
        let (m, n) = (ro.a.min(ro.b), ro.a.max(ro.b));
        let (c, s) = ro.coefficients_on(m, n).expect("readout touches its own pair");
        let y = observe(ro)? - 0.5 * (diag[m] + diag[n]);
        let entry = parts.entry((m, n)).or_default();
        if c != 0 {
            entry.0.push(c as f64 * y);
        }
        if s != 0 {
            entry.1.push(s as f64 * y);
        }
    }

    let mut chi = CMatrix::zeros(d2, d2);
    for (m, &value) in diag.iter().enumerate() {
        chi[(m, m)] = Complex64::new(value, 0.0);
    }
    for m in 0..d2 {
        for n in m + 1..d2 {
            let (re, im) = parts
                .get(&(m, n))
                .ok_or_else(|| QeccdError::Validation(format!("plan does not determine chi[{m},{n}]")))?;
            let (re_mean, im_mean) = match (re.mean(), im.mean()) {
                (Some(r), Some(i)) => (r, i),
                _ => {
                    return Err(QeccdError::Validation(format!(
                        "plan determines only one part of chi[{m},{n}]"
                    )))
                }
            };
            let spread = re.spread().max(im.spread());
            if exact && spread > policy.kl_residual {
                return Err(QeccdError::InconsistentReadouts { a: m, b: n, spread });
            }
            max_spread = max_spread.max(spread);
            chi[(m, n)] = Complex64::new(re_mean, im_mean);
            chi[(n, m)] = Complex64::new(re_mean, -im_mean);
        }
    }
    Ok(Reconstruction {
        chi: ProcessMatrix::new(chi, basis.labels())?,
        max_spread,
    })
}

/// Largest `|observed − predicted(χ)|` over the syndromes of each configuration.
pub fn residuals(plan: &Plan, records: &[MeasurementRecord], chi: &ProcessMatrix) -> Result<Vec<f64>> {
    let mut out = vec![0.0f64; plan.len()];
    for ro in &plan.readouts {
        let record = records
            .iter()
            .find(|r| r.config == ro.config)
            .ok_or(QeccdError::MissingConfiguration(ro.config))?;
        let observed = record
            .frequency(&ro.syndrome)
            .ok_or_else(|| QeccdError::UnknownSyndrome(ro.syndrome.to_string()))?;
        out[ro.config] = out[ro.config].max((observed - ro.evaluate(chi)).abs());
    }
    Ok(out)
}

/// Projects onto the error space of `syndrome` and renormalizes.
/// Returns the outcome probability and the post-measurement state.
pub fn collapse(
    rho: &DensityMatrix,
    code: &StabilizerCode,
    syndrome: &Syndrome,
    policy: &NumericPolicy,
) -> Result<(f64, DensityMatrix)> {
    let projector = code.syndrome_projector(syndrome)?.entries();
    let post = projector * rho.entries() * projector;
    let prob = post.trace().re;
    if prob <= policy.algebraic {
        return Err(QeccdError::Validation(format!(
            "syndrome {syndrome} has probability {prob:e}"
        )));
    }
    Ok((prob, DensityMatrix::new(post.unscale(prob), policy)?))
}

/// Applies `F_x† = F_x` for the error with this syndrome.
pub fn recover_state(state: &StateVector, code: &StabilizerCode, syndrome: &Syndrome) -> Result<StateVector> {
    let x = code.error_for_syndrome(syndrome)?;
    state.apply(&code.error_matrix(x)?.adjoint())
}

pub fn recover_density(
    rho: &DensityMatrix,
    code: &StabilizerCode,
    syndrome: &Syndrome,
    policy: &NumericPolicy,
) -> Result<DensityMatrix> {
    let x = code.error_for_syndrome(syndrome)?;
    let f = code.error_matrix(x)?;
    apply_unitary(rho, &f.adjoint(), policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{builtin_channel, chi_from_kraus, random_channel};
    use crate::code::{code3, code5};
    use crate::dense::max_abs;

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn uniform(k: usize) -> Vec<Complex64> {
        let n = 1usize << k;
        vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]
    }

    fn idx(code: &StabilizerCode, label: &str) -> usize {
        code.error_basis().index_of_label(label).unwrap()
    }

    #[test]
    fn pauli_factor_examples() {
        let c3 = code3();
        let b = c3.error_basis();
        let f = pauli_factors(b, idx(&c3, "X"), idx(&c3, "Y"), idx(&c3, "Z")).unwrap();
        assert_eq!((f.g_a, f.a), (PauliFactor::MINUS_I, idx(&c3, "Y")));
        assert_eq!((f.g_b, f.b), (PauliFactor::I, idx(&c3, "X")));
        assert!(f.same_type);

        let f = pauli_factors(b, 0, idx(&c3, "Y"), 0).unwrap();
        assert_eq!(
            (f.g_a, f.a, f.g_b, f.b),
            (PauliFactor::ONE, 0, PauliFactor::ONE, idx(&c3, "Y"))
        );
        assert!(f.same_type);

        let c5 = code5();
        for p in 0..16 {
            let f = pauli_factors(c5.error_basis(), 0, p, 0).unwrap();
            assert_eq!((f.g_a, f.a, f.g_b, f.b), (PauliFactor::ONE, 0, PauliFactor::ONE, p));
        }
    }

    #[test]
    fn rotation_forms_follow_commutation() {
        let c3 = code3();
        let (u, form) = rotation_unitary(&c3, idx(&c3, "X"), idx(&c3, "Y"), &policy()).unwrap();
        assert_eq!(form, RotationForm::Sum);
        assert!(is_unitary(&u, 1e-12));
        let (u, form) = rotation_unitary(&c3, 0, idx(&c3, "Z"), &policy()).unwrap();
        assert_eq!(form, RotationForm::PhasedSum);
        assert!(is_unitary(&u, 1e-12));
        assert!(rotation_unitary(&c3, 1, 1, &policy()).is_err());
    }

    #[test]
    fn toggle_matches_diagonal_phase_pattern() {
        let c3 = code3();
        // θ over (I, X, Y, Z) = (+, −, +, −), stored in basis order
        let mut theta = vec![ThetaSign::Plus; 4];
        theta[idx(&c3, "X")] = ThetaSign::Minus;
        theta[idx(&c3, "Z")] = ThetaSign::Minus;
        let s = build_toggle(&c3, &theta).unwrap();
        let gamma = Complex64::new(1.0, 1.0) * FRAC_1_SQRT_2;
        // F_m |J_L⟩ picks up e^{iθ_m}: γ on I and Y, its conjugate on X and Z
        for (label, expected) in [("I", gamma), ("X", gamma.conj()), ("Y", gamma), ("Z", gamma.conj())] {
            let f = c3.error_matrix(idx(&c3, label)).unwrap();
            for word in c3.logical_basis() {
                let v = word.apply(&f).unwrap();
                let moved = v.apply(&s).unwrap();
                assert!((moved.amplitudes() - v.amplitudes() * expected).norm() < 1e-12);
            }
        }
        let chi = chi_from_kraus(
            &builtin_channel("amplitude-damping", &[0.36]).unwrap(),
            c3.error_basis(),
        )
        .unwrap();
        let phases: Vec<Complex64> = theta.iter().map(|t| t.phase()).collect();
        let toggled = chi.conjugated_by_diagonal(&phases).unwrap();
        let (i, z) = (0, idx(&c3, "Z"));
        assert!((toggled.get(i, z) - Complex64::new(0.0, 1.0) * chi.get(i, z)).norm() < 1e-15);
    }

    #[test]
    fn toggle_rejects_unbalanced_theta() {
        let c3 = code3();
        assert!(matches!(
            build_toggle(&c3, &[ThetaSign::Plus; 4]),
            Err(QeccdError::InvalidToggle(_))
        ));
        assert!(build_toggle(&c3, &[ThetaSign::Plus, ThetaSign::Minus]).is_err());
    }

    #[test]
    fn correctable_states_are_toggle_eigenvectors() {
        let c5 = code5();
        let plan = plan_configurations(&c5, &policy()).unwrap();
        let beta = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let psi = c5.encode(&beta, &policy()).unwrap();
        for cfg in &plan.configurations {
            if let ConfigKind::Toggled { theta, .. } = cfg.kind() {
                let s = build_toggle(&c5, theta).unwrap();
                for (m, t) in theta.iter().enumerate() {
                    let v = psi.apply(&c5.error_matrix(m).unwrap()).unwrap();
                    let moved = v.apply(&s).unwrap();
                    assert!((moved.amplitudes() - v.amplitudes() * t.phase()).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn plan_sizes_and_coverage() {
        for (code, expected) in [(code3(), 7), (code5(), 31)] {
            let plan = plan_configurations(&code, &policy()).unwrap();
            assert_eq!(plan.len(), expected);
            let d2 = code.error_basis().len();
            for m in 0..d2 {
                for n in 0..d2 {
                    if m == n {
                        continue;
                    }
                    let coeffs: Vec<(i8, i8)> = plan.readouts.iter().filter_map(|r| r.coefficients_on(m, n)).collect();
                    assert!(coeffs.len() >= 2);
                    assert!(coeffs.iter().any(|(c, _)| *c != 0) && coeffs.iter().any(|(_, s)| *s != 0));
                }
            }
            for r in &plan.readouts {
                assert!(matches!((r.c, r.s), (0, 0) | (1, 0) | (-1, 0) | (0, 1) | (0, -1)));
                assert_eq!(r.is_diagonal(), plan.configurations[r.config].kind_name() == "bare");
            }
            for cfg in &plan.configurations {
                if let Some(u) = cfg.unitary() {
                    assert!(is_unitary(u, 1e-12));
                }
            }
        }
    }

    #[test]
    fn plan_descriptor_round_trip() {
        let c3 = code3();
        let plan = plan_configurations(&c3, &policy()).unwrap();
        let json = serde_json::to_string(&plan.descriptors(&c3)).unwrap();
        let parsed: Vec<ConfigDescriptor> = serde_json::from_str(&json).unwrap();
        let back = Plan::from_descriptors(&c3, &parsed, &policy()).unwrap();
        assert_eq!(back, plan);
    }

    #[test]
    fn predicted_examples() {
        let c5 = code5();
        let p = 0.3;
        let chi = chi_from_kraus(&builtin_channel("correlated-flip", &[p]).unwrap(), c5.error_basis()).unwrap();
        assert!((xi_predicted(&chi, &c5, &Configuration::bare(), 0).unwrap() - (1.0 - p)).abs() < 1e-15);

        let c3 = code3();
        let (x, y, z) = (idx(&c3, "X"), idx(&c3, "Y"), idx(&c3, "Z"));
        let cfg = Configuration::rotated(&c3, x, y, &policy()).unwrap();
        let ch = random_channel(3, 1, 2).unwrap();
        let chi = chi_from_kraus(&ch, c3.error_basis()).unwrap();
        let expected = 0.5 * (chi.get(x, x).re + chi.get(y, y).re) - chi.get(x, y).re;
        assert!((xi_predicted(&chi, &c3, &cfg, z).unwrap() - expected).abs() < 1e-15);

        let chi = chi_from_kraus(
            &builtin_channel("amplitude-damping", &[0.36]).unwrap(),
            c3.error_basis(),
        )
        .unwrap();
        assert!((xi_predicted(&chi, &c3, &cfg, z).unwrap() - 0.09).abs() < 1e-15);
    }

    #[test]
    fn imaginary_readout_example() {
        // U(I, Y) at the no-error syndrome gives ½(χ_II + χ_YY) + Im χ_IY
        let c3 = code3();
        let y = idx(&c3, "Y");
        let cfg = Configuration::rotated(&c3, 0, y, &policy()).unwrap();
        let chi = chi_from_kraus(&random_channel(8, 1, 3).unwrap(), c3.error_basis()).unwrap();
        let expected = 0.5 * (chi.get(0, 0).re + chi.get(y, y).re) + chi.get(0, y).im;
        assert!((xi_predicted(&chi, &c3, &cfg, 0).unwrap() - expected).abs() < 1e-15);
        let sim = xi_simulated(&c3, &uniform(1), &random_channel(8, 1, 3).unwrap(), &cfg, &policy()).unwrap();
        assert!((sim.frequency(&Syndrome::zero(2)).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn rotation_xy_readouts_at_x_and_y_carry_imaginary_part() {
        let c3 = code3();
        let (i, x, y, z) = (0, idx(&c3, "X"), idx(&c3, "Y"), idx(&c3, "Z"));
        let cfg = Configuration::rotated(&c3, x, y, &policy()).unwrap();
        for e in [x, y] {
            let r = readout(&c3, &cfg, 0, e).unwrap();
            let (c, s) = r.coefficients_on(i, z).expect("pair {I, Z}");
            assert_eq!(c, 0);
            assert_ne!(s, 0);
        }
        for e in [i, z] {
            let r = readout(&c3, &cfg, 0, e).unwrap();
            let (c, s) = r.coefficients_on(x, y).expect("pair {X, Y}");
            assert_ne!(c, 0);
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn readouts_agree_with_closed_form() {
        let c5 = code5();
        let plan = plan_configurations(&c5, &policy()).unwrap();
        let chi = chi_from_kraus(&random_channel(21, 2, 3).unwrap(), c5.error_basis()).unwrap();
        for ro in &plan.readouts {
            let predicted = xi_predicted(&chi, &c5, &plan.configurations[ro.config], ro.error).unwrap();
            assert!((ro.evaluate(&chi) - predicted).abs() < 1e-14);
        }
    }

    #[test]
    fn simulated_examples() {
        let c3 = code3();
        let id = builtin_channel("identity", &[]).unwrap();
        let rec = xi_simulated(&c3, &uniform(1), &id, &Configuration::bare(), &policy()).unwrap();
        assert!((rec.frequency(&Syndrome::zero(2)).unwrap() - 1.0).abs() < 1e-12);

        let c5 = code5();
        let flip = builtin_channel("correlated-flip", &[0.2]).unwrap();
        let rec = xi_simulated(&c5, &uniform(1), &flip, &Configuration::bare(), &policy()).unwrap();
        let xx = c5.syndrome_of(idx(&c5, "XX")).unwrap();
        for s in c5.syndrome_table() {
            let expected = if *s == Syndrome::zero(4) {
                0.8
            } else if *s == xx {
                0.2
            } else {
                0.0
            };
            assert!((rec.frequency(s).unwrap() - expected).abs() < 1e-12);
        }

        let ad = builtin_channel("amplitude-damping", &[0.36]).unwrap();
        let rec = xi_simulated(&c3, &uniform(1), &ad, &Configuration::bare(), &policy()).unwrap();
        for (label, p) in [("I", 0.81), ("Z", 0.01), ("X", 0.09), ("Y", 0.09)] {
            let s = c3.syndrome_of(idx(&c3, label)).unwrap();
            assert!((rec.frequency(&s).unwrap() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn support_mismatch_is_reported() {
        let c3 = code3();
        let flip = builtin_channel("correlated-flip", &[0.2]).unwrap();
        assert_eq!(
            xi_simulated(&c3, &uniform(1), &flip, &Configuration::bare(), &policy()).unwrap_err(),
            QeccdError::SupportMismatch { channel: 2, code: 1 }
        );
    }

    #[test]
    fn bare_rotated_and_toggled_match_closed_form() {
        // bare, U(X,Y) and S⁺ then U(X,Y) on amplitude damping
        let c3 = code3();
        let ad = builtin_channel("amplitude-damping", &[0.36]).unwrap();
        let chi = chi_from_kraus(&ad, c3.error_basis()).unwrap();
        let (x, y, z) = (idx(&c3, "X"), idx(&c3, "Y"), idx(&c3, "Z"));
        let mut theta = vec![ThetaSign::Plus; 4];
        theta[x] = ThetaSign::Minus;
        theta[z] = ThetaSign::Minus;
        let configs = vec![
            Configuration::bare(),
            Configuration::rotated(&c3, x, y, &policy()).unwrap(),
            Configuration::toggled(&c3, x, y, theta, &policy()).unwrap(),
        ];
        for cfg in &configs {
            let rec = xi_simulated(&c3, &uniform(1), &ad, cfg, &policy()).unwrap();
            for e in 0..4 {
                let s = c3.syndrome_of(e).unwrap();
                let predicted = xi_predicted(&chi, &c3, cfg, e).unwrap();
                assert!((rec.frequency(&s).unwrap() - predicted).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reconstruct_examples() {
        for (code, ch) in [
            (code3(), builtin_channel("identity", &[]).unwrap()),
            (code3(), builtin_channel("amplitude-damping", &[0.36]).unwrap()),
            (code5(), random_channel(2, 2, 4).unwrap()),
        ] {
            let plan = plan_configurations(&code, &policy()).unwrap();
            let records = simulate_plan(&code, &uniform(1), &ch, &plan, &policy()).unwrap();
            let rec = reconstruct(&plan, &records, code.error_basis(), &policy()).unwrap();
            let oracle = chi_from_kraus(&ch, code.error_basis()).unwrap();
            assert!(
                max_abs(&(rec.chi.entries() - oracle.entries())) < 1e-10,
                "{}",
                ch.label()
            );
            let res = residuals(&plan, &records, &rec.chi).unwrap();
            assert!(res.iter().all(|r| *r < 1e-10));
        }
    }

    #[test]
    fn reconstruct_reports_missing_and_inconsistent() {
        let c3 = code3();
        let plan = plan_configurations(&c3, &policy()).unwrap();
        let ad = builtin_channel("amplitude-damping", &[0.36]).unwrap();
        let mut records = simulate_plan(&c3, &uniform(1), &ad, &plan, &policy()).unwrap();
        let missing: Vec<_> = records.iter().filter(|r| r.config != 3).cloned().collect();
        assert_eq!(
            reconstruct(&plan, &missing, c3.error_basis(), &policy()).unwrap_err(),
            QeccdError::MissingConfiguration(3)
        );
        if let Outcomes::Exact(probs) = &mut records[1].outcomes {
            probs[0].1 += 0.01;
        }
        assert!(matches!(
            reconstruct(&plan, &records, c3.error_basis(), &policy()),
            Err(QeccdError::InconsistentReadouts { .. })
        ));
    }

    #[test]
    fn non_trace_preserving_channel_reconstructs() {
        let c3 = code3();
        let lossy = Channel::new(1, vec![CMatrix::identity(2, 2).scale(0.8)], "lossy").unwrap();
        let plan = plan_configurations(&c3, &policy()).unwrap();
        let records = simulate_plan(&c3, &uniform(1), &lossy, &plan, &policy()).unwrap();
        assert!((records[0].total() - 0.64).abs() < 1e-12);
        let rec = reconstruct(&plan, &records, c3.error_basis(), &policy()).unwrap();
        assert!((rec.chi.trace() - 0.64).abs() < 1e-12);
    }

    #[test]
    fn recovery_examples() {
        let c3 = code3();
        let beta = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let psi = c3.encode(&beta, &policy()).unwrap();
        let same = recover_state(&psi, &c3, &Syndrome::zero(2)).unwrap();
        assert_eq!(same, psi);
        let x = idx(&c3, "X");
        let hit = psi.apply(&c3.error_matrix(x).unwrap()).unwrap();
        let fixed = recover_state(&hit, &c3, &c3.syndrome_of(x).unwrap()).unwrap();
        assert!((psi.inner(&fixed).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(recover_state(&psi, &c3, &Syndrome::new(1, 3).unwrap()).is_err());
    }

    #[test]
    fn recovery_after_rotation() {
        let c3 = code3();
        let beta = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let psi = c3.encode(&beta, &policy()).unwrap();
        let ad = builtin_channel("amplitude-damping", &[0.36]).unwrap();
        let rho = noisy_encoded_state(&c3, &beta, &ad, &policy()).unwrap();
        let cfg = Configuration::rotated(&c3, idx(&c3, "X"), idx(&c3, "Y"), &policy()).unwrap();
        let rotated = apply_unitary(&rho, cfg.unitary().unwrap(), &policy()).unwrap();
        for s in c3.syndrome_table() {
            if let Ok((_, post)) = collapse(&rotated, &c3, s, &policy()) {
                let fixed = recover_density(&post, &c3, s, &policy()).unwrap();
                assert!(fixed.fidelity_with(&psi).unwrap() > 1.0 - 1e-10);
            }
        }
    }
}
