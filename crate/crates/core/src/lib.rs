// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

//! Characterization of an unknown noise channel through the syndrome
//! statistics of a stabilizer code.
//!
//! The noisy subsystem is encoded into a stabilizer code whose correctable
//! errors (every Pauli on the noisy coordinates) form a group. Syndrome
//! probabilities under three kinds of measurement configuration expose the
//! full process matrix χ of the channel:
//!
//! - bare syndrome measurement gives the diagonal of χ;
//! - measurement after a rotation `U(a, b)` gives one real or imaginary
//!   part of off-diagonal entries;
//! - measurement after a phase toggle `S⁺` followed by `U(a, b)` gives the
//!   complementary part.
//!
//! The crate is layered bottom-up: [`pauli`] (exact Pauli group algebra),
//! [`dense`] (small dense linear algebra), [`channel`] (Kraus operators and χ),
//! [`code`] (stabilizer codes), [`protocol`] (configurations, simulation and
//! reconstruction) and [`estimation`] (finite-shot sampling and error metrics).

pub mod channel;
pub mod code;
pub mod dense;
pub mod error;
pub mod estimation;
pub mod io;
pub mod pauli;
pub mod protocol;

pub use channel::{Channel, ChannelReport, ProcessMatrix};
pub use code::{StabilizerCode, Syndrome};
pub use dense::{DensityMatrix, NumericPolicy, Projector, StateVector};
pub use error::{QeccdError, Result};
pub use estimation::{ErrorReport, SamplingPolicy};
pub use pauli::{ErrorBasis, PauliFactor, PauliOperator};
pub use protocol::{Configuration, LinearReadout, MeasurementRecord, Plan};

pub use nalgebra::DMatrix;
pub use num_complex::Complex64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;
