// SPDX-License-Identifier: Apache-2.0

//! Single Pauli strings in the symplectic `(z, x)` bitstring encoding.
//!
//! A term stores two `n`-bit strings packed into 64-bit words, a phase
//! exponent, and a complex coefficient, and represents
//!
//! ```text
//!     coeff · (-i)^phase · Π_k Z_k^{z_k} X_k^{x_k}
//! ```
//!
//! with site 0 on bit 0 of word 0. Bit `k` of `z` set means a `Z` factor
//! on site `k`, bit `k` of `x` an `X` factor, both a `Y` (up to phase).
//! In Hermitian-canonical form `phase = popcount(z & x) mod 4`, which
//! turns every `Z·X` site pair into `Y`; a canonical term with real
//! coefficient is a real multiple of a Hermitian Pauli string.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::bits;
use crate::error::{Error, Result};
use crate::Complex64;

/// Single-site Pauli matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// The `(z, x)` bit pair encoding this matrix.
    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (false, true),
            Pauli::Y => (true, true),
            Pauli::Z => (true, false),
        }
    }

    #[inline]
    fn from_bits(z: bool, x: bool) -> Self {
        match (z, x) {
            (false, false) => Pauli::I,
            (false, true) => Pauli::X,
            (true, true) => Pauli::Y,
            (true, false) => Pauli::Z,
        }
    }
}

/// `(-i)^k` for `k mod 4`.
#[inline]
pub(crate) fn neg_i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// One Pauli string with phase and coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    n: usize,
    z: Vec<u64>,
    x: Vec<u64>,
    phase: u8,
    coeff: Complex64,
}

impl PauliTerm {
    /// The identity string on `n` sites with coefficient 1.
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("site count must be positive"));
        }
        let w = bits::words_for(n);
        Ok(Self {
            n,
            z: vec![0; w],
            x: vec![0; w],
            phase: 0,
            coeff: Complex64::new(1.0, 0.0),
        })
    }

    /// A single-site Pauli factor with coefficient 1, in canonical phase.
    pub fn single(n: usize, site: usize, p: Pauli) -> Result<Self> {
        Self::from_sites(n, &[(site, p)])
    }

    /// A product of single-site factors with coefficient 1, in canonical
    /// phase. Sites must be distinct.
    pub fn from_sites(n: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut term = Self::identity(n)?;
        for &(site, p) in factors {
            if site >= n {
                return Err(Error::SiteOutOfRange { site, n });
            }
            let (w, b) = (site / 64, site % 64);
            if (term.z[w] | term.x[w]) >> b & 1 == 1 {
                return Err(Error::InvalidArgument("duplicate site in factor list"));
            }
            let (zb, xb) = p.bits();
            term.z[w] |= (zb as u64) << b;
            term.x[w] |= (xb as u64) << b;
        }
        term.phase = canonical_phase(&term.z, &term.x)?;
        Ok(term)
    }

    /// Builds a term from raw parts, validating lengths, the phase range,
    /// and that bits beyond `n` are clear.
    pub fn from_raw_parts(
        n: usize,
        z: Vec<u64>,
        x: Vec<u64>,
        phase: u8,
        coeff: Complex64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("site count must be positive"));
        }
        let w = bits::words_for(n);
        if z.len() != w || x.len() != w {
            return Err(Error::InvalidArgument("bitstring word count does not match n"));
        }
        if phase > 3 {
            return Err(Error::InvalidArgument("phase exponent must be in 0..4"));
        }
        let mask = bits::tail_mask(n);
        if z[w - 1] & !mask != 0 || x[w - 1] & !mask != 0 {
            return Err(Error::InvalidArgument("bits set beyond site count"));
        }
        Ok(Self { n, z, x, phase, coeff })
    }

    /// Replaces the coefficient.
    #[must_use]
    pub fn with_coeff(mut self, coeff: Complex64) -> Self {
        self.coeff = coeff;
        self
    }

    /// Replaces the coefficient with a real value.
    #[must_use]
    pub fn scaled(self, coeff: f64) -> Self {
        self.with_coeff(Complex64::new(coeff, 0.0))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    #[inline]
    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    #[inline]
    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    /// The single-site factor at `site` (ignoring phase and coefficient).
    pub fn factor(&self, site: usize) -> Result<Pauli> {
        if site >= self.n {
            return Err(Error::SiteOutOfRange { site, n: self.n });
        }
        let (w, b) = (site / 64, site % 64);
        Ok(Pauli::from_bits(self.z[w] >> b & 1 == 1, self.x[w] >> b & 1 == 1))
    }

    /// True when both bitstrings are zero.
    #[inline]
    pub fn is_identity(&self) -> bool {
        bits::is_zero(&self.z) && bits::is_zero(&self.x)
    }

    /// Number of non-identity factors.
    #[inline]
    pub fn weight(&self) -> u32 {
        bits::or_count(&self.z, &self.x)
    }

    /// Number of `X` or `Y` factors (set bits of the `x` string).
    #[inline]
    pub fn x_weight(&self) -> u32 {
        bits::count(&self.x)
    }

    /// True when `phase == popcount(z & x) mod 4`.
    #[inline]
    pub fn is_canonical(&self) -> bool {
        self.phase == (bits::and_count(&self.z, &self.x) & 3) as u8
    }

    /// Rewrites the term in Hermitian-canonical phase, folding the
    /// residual `(-i)^k` into the coefficient.
    #[must_use]
    pub fn canonicalized(mut self) -> Self {
        let canon = (bits::and_count(&self.z, &self.x) & 3) as u8;
        let residual = (self.phase + 4 - canon) & 3;
        self.coeff *= neg_i_pow(residual);
        self.phase = canon;
        self
    }

    /// The ordering key (bitstrings only).
    #[inline]
    pub fn key(&self) -> TermKey<'_> {
        TermKey { x: &self.x, z: &self.z }
    }

    /// Product `self · other`, tracking the phase of the reordered
    /// normal form. The result phase is generally not canonical.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: other.n });
        }
        // Moving X^{x_a} through Z^{z_b} picks up (-1)^{x_a · z_b} = (-i)^{2 x_a · z_b}.
        let swap = bits::and_parity(&self.x, &other.z) as u8;
        let mut z = self.z.clone();
        let mut x = self.x.clone();
        bits::xor_into(&mut z, &other.z);
        bits::xor_into(&mut x, &other.x);
        Ok(Self {
            n: self.n,
            z,
            x,
            phase: (self.phase + other.phase + 2 * swap) & 3,
            coeff: self.coeff * other.coeff,
        })
    }

    /// True iff the underlying Pauli strings anticommute.
    pub fn anticommutes(&self, other: &Self) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: other.n });
        }
        Ok(bits::and_parity(&self.z, &other.x) ^ bits::and_parity(&self.x, &other.z))
    }

    /// Letters over {I, X, Y, Z}, site 0 leftmost.
    pub fn label(&self) -> String {
        let mut s = String::with_capacity(self.n);
        for site in 0..self.n {
            let (w, b) = (site / 64, site % 64);
            s.push(match (self.z[w] >> b & 1, self.x[w] >> b & 1) {
                (0, 0) => 'I',
                (0, 1) => 'X',
                (1, 1) => 'Y',
                (1, 0) => 'Z',
                _ => unreachable!(),
            });
        }
        s
    }
}

impl fmt::Display for PauliTerm {
    /// Renders `coeff letters`; non-canonical phases carry an explicit
    /// `(-i)^k` factor so the rendering is always faithful.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.im == 0.0 {
            write!(f, "{}", self.coeff.re)?;
        } else {
            write!(f, "({}{:+}i)", self.coeff.re, self.coeff.im)?;
        }
        if !self.is_canonical() {
            let canon = (bits::and_count(&self.z, &self.x) & 3) as u8;
            write!(f, " (-i)^{}", (self.phase + 4 - canon) & 3)?;
        }
        write!(f, " {}", self.label())
    }
}

impl core::str::FromStr for PauliTerm {
    type Err = Error;

    /// Parses a letters-only label like `"XIZY"` into a canonical term
    /// with coefficient 1.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli label"));
        }
        let mut factors = Vec::with_capacity(s.len());
        for (site, c) in s.chars().enumerate() {
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::InvalidArgument("Pauli label may contain only IXYZ")),
            };
            factors.push((site, p));
        }
        Self::from_sites(s.len(), &factors)
    }
}

/// Borrowed ordering key of a term: the `(x, z)` bitstring pair.
///
/// Keys compare `x` first (last word most significant), then `z`, giving
/// a strict total order in which all Z-type strings (`x = 0`) form a
/// contiguous prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermKey<'a> {
    pub x: &'a [u64],
    pub z: &'a [u64],
}

impl Ord for TermKey<'_> {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        bits::cmp_words(self.x, other.x).then_with(|| bits::cmp_words(self.z, other.z))
    }
}

impl PartialOrd for TermKey<'_> {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order on `(x, z)` keys; both pairs must have equal word counts.
#[inline]
pub fn compare(a: TermKey<'_>, b: TermKey<'_>) -> Ordering {
    a.cmp(&b)
}

/// `popcount(z & x) mod 4`: the phase exponent making
/// `(-i)^phase Z^z X^x` Hermitian.
pub fn canonical_phase(z: &[u64], x: &[u64]) -> Result<u8> {
    if z.len() != x.len() {
        return Err(Error::SiteCountMismatch { left: z.len() * 64, right: x.len() * 64 });
    }
    Ok((bits::and_count(z, x) & 3) as u8)
}
