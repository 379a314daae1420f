// SPDX-License-Identifier: Apache-2.0

//! Error type shared by all modules.

use core::fmt;

/// Errors produced by operator algebra, evolution, and post-processing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Binary operation on operators with different site counts.
    SiteCountMismatch { left: usize, right: usize },
    /// Invalid argument with a human-readable reason.
    InvalidArgument(&'static str),
    /// Site index outside `0..n`.
    SiteOutOfRange { site: usize, n: usize },
    /// The term-count guard would be exceeded; carries the current size.
    TermLimit {
        current: usize,
        needed: usize,
        limit: usize,
    },
    /// Oracle asked to densify a system too large for 2^n x 2^n matrices
    /// or state vectors.
    SystemTooLarge { n: usize, max: usize },
    /// Regression or extrapolation given too few samples.
    InsufficientSamples { needed: usize, got: usize },
    /// Correlation profile denominator vanished.
    DegenerateProfile,
    /// Regression abscissae do not span a line.
    DegenerateFit,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SiteCountMismatch { left, right } => {
                write!(f, "site count mismatch: {left} vs {right}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::SiteOutOfRange { site, n } => {
                write!(f, "site {site} out of range for {n} sites")
            }
            Error::TermLimit {
                current,
                needed,
                limit,
            } => write!(
                f,
                "term-count guard exceeded: {current} terms held, {needed} needed, limit {limit}"
            ),
            Error::SystemTooLarge { n, max } => {
                write!(f, "system of {n} sites exceeds oracle maximum of {max}")
            }
            Error::InsufficientSamples { needed, got } => {
                write!(f, "need at least {needed} samples, got {got}")
            }
            Error::DegenerateProfile => write!(f, "correlation profile denominator vanished"),
            Error::DegenerateFit => write!(f, "degenerate fit: abscissae do not span a line"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
