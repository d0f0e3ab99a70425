//! Secure computation-and-forward over a two-user Gaussian multiple-access
//! channel.
//!
//! Two nodes hash their messages into a shared linear code, transmit
//! simultaneously, and let an untrusted relay decode only the modulo sum. The
//! crate provides the pieces needed to build, analyse and simulate that
//! scheme:
//!
//! * [`galois`]: exact arithmetic and linear algebra over a prime field.
//! * [`codes`]: generator codes, code ensembles, the message/sacrifice hash
//!   split, codeword compositions and the deviation quantity `A`.
//! * [`channel`]: the real Gaussian MAC, its likelihoods and sampling.
//! * [`infoq`]: Gaussian-mixture entropies, mutual informations and the
//!   Rényi information used in the leakage bounds.
//! * [`bounds`]: finite-length leakage bounds, exponents, rate formulas and
//!   the inequality checker.
//! * [`protocol`]: end-to-end protocol rounds, relay decoders and leakage
//!   oracles.
//!
//! All information quantities are in nats.

pub mod bounds;
pub mod channel;
pub mod codes;
mod error;
pub mod galois;
pub mod infoq;
pub mod protocol;
pub mod quadrature;
pub mod seed;

pub use bounds::{CodeRateParams, DeltaITable, LeakageBoundReport, RateReport};
pub use channel::{Constellation, MacChannelParams, ReceivedBlock};
pub use codes::{Composition, EnsembleKind, EnsembleSpec, GeneratorCode, HashSplit};
pub use error::{Error, Result};
pub use galois::{FieldMatrix, FieldScalar, FieldVector};
pub use infoq::{GaussianMixture, InfoReport, QuadratureSpec};
pub use protocol::{LeakageEstimate, ProtocolConfig, TrialRecord};



