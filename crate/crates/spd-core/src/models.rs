// SPDX-License-Identifier: Apache-2.0

//! Spin-lattice Hamiltonians and their conserved-density observables.
//!
//! Chain coordinates in these builders are 1-based, matching the usual
//! way the couplings are written down; bit positions are 0-based
//! row-major. All lattices are open-boundary.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliTerm};
use crate::pauli_sum::PauliSum;
use crate::Complex64;

/// `H = Σ_j c_j H_j` as an ordered list of real coefficients and unit,
/// Hermitian-canonical Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<(f64, PauliTerm)>,
}

impl Hamiltonian {
    /// Validates that every string is unit-coefficient, canonical,
    /// distinct, and carried by a nonzero real coupling.
    pub fn new(n: usize, terms: Vec<(f64, PauliTerm)>) -> Result<Self> {
        for (c, t) in &terms {
            if t.n() != n {
                return Err(Error::SiteCountMismatch { left: n, right: t.n() });
            }
            if *c == 0.0 || !c.is_finite() {
                return Err(Error::InvalidArgument("coupling must be real, finite, nonzero"));
            }
            if t.coeff() != Complex64::new(1.0, 0.0) || !t.is_canonical() {
                return Err(Error::InvalidArgument(
                    "Hamiltonian strings must be unit canonical terms",
                ));
            }
        }
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                if terms[i].1.key() == terms[j].1.key() {
                    return Err(Error::InvalidArgument("duplicate Hamiltonian string"));
                }
            }
        }
        Ok(Self { n, terms })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Terms in emission order (the Trotter gate order).
    #[inline]
    pub fn terms(&self) -> &[(f64, PauliTerm)] {
        &self.terms
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The Hamiltonian as a sorted sparse sum.
    pub fn as_pauli_sum(&self) -> Result<PauliSum> {
        PauliSum::from_terms(
            self.n,
            self.terms.iter().map(|(c, t)| t.clone().scaled(*c)),
        )
    }
}

/// Open-boundary rectangular lattice in 1, 2, or 3 dimensions with
/// row-major site indexing (site 0 at the origin, last axis fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    extents: Vec<usize>,
}

impl LatticeSpec {
    pub fn new(extents: &[usize]) -> Result<Self> {
        if extents.is_empty() || extents.len() > 3 {
            return Err(Error::InvalidArgument("lattice must have 1, 2, or 3 extents"));
        }
        if extents.iter().any(|&e| e == 0) {
            return Err(Error::InvalidArgument("lattice extents must be positive"));
        }
        Ok(Self { extents: extents.to_vec() })
    }

    #[inline]
    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    #[inline]
    pub fn site_count(&self) -> usize {
        self.extents.iter().product()
    }

    /// Row-major linear index of a 0-based coordinate tuple.
    pub fn index(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.extents.len() {
            return Err(Error::InvalidArgument("coordinate arity mismatch"));
        }
        let mut idx = 0usize;
        for (c, e) in coords.iter().zip(&self.extents) {
            if c >= e {
                return Err(Error::InvalidArgument("coordinate outside lattice"));
            }
            idx = idx * e + c;
        }
        Ok(idx)
    }

    /// The 0-based linear index of the site at the middle coordinate of
    /// every axis. Requires all extents odd.
    pub fn central_site(&self) -> Result<usize> {
        if self.extents.iter().any(|e| e % 2 == 0) {
            return Err(Error::InvalidArgument(
                "central site requires odd extents on every axis",
            ));
        }
        let mid: Vec<usize> = self.extents.iter().map(|e| e / 2).collect();
        self.index(&mid)
    }
}

fn check_chain_length(l: usize) -> Result<()> {
    if l < 3 || l % 2 == 0 {
        return Err(Error::InvalidArgument("chain length must be odd and at least 3"));
    }
    Ok(())
}

/// Transverse-field strength of the tilted-field Ising chain.
pub const TILTED_X_FIELD: f64 = 1.4;
/// Longitudinal-field strength of the tilted-field Ising chain; the
/// same value enters the local-energy density.
pub const TILTED_Z_FIELD: f64 = 0.9045;

/// 1D tilted-field Ising chain on `l` sites (odd, `>= 3`):
/// `Σ_j Z_j Z_{j+1} + Σ_j (1.4 X_j + 0.9045 Z_j)`, bonds first, then the
/// per-site field pairs.
pub fn build_tilted_ising(l: usize) -> Result<Hamiltonian> {
    check_chain_length(l)?;
    let mut terms = Vec::with_capacity(3 * l - 1);
    for j in 0..l - 1 {
        terms.push((1.0, PauliTerm::from_sites(l, &[(j, Pauli::Z), (j + 1, Pauli::Z)])?));
    }
    for j in 0..l {
        terms.push((TILTED_X_FIELD, PauliTerm::single(l, j, Pauli::X)?));
        terms.push((TILTED_Z_FIELD, PauliTerm::single(l, j, Pauli::Z)?));
    }
    Hamiltonian::new(l, terms)
}

/// Local energy density of the tilted-field Ising chain at 1-based site
/// `j`: `½ Z_{j-1} Z_j + ½ Z_j Z_{j+1} + 1.4 X_j + 0.9045 Z_j`, with
/// out-of-range bond halves dropped at the chain ends.
pub fn local_energy(j: usize, l: usize) -> Result<PauliSum> {
    check_chain_length(l)?;
    if j < 1 || j > l {
        return Err(Error::SiteOutOfRange { site: j, n: l });
    }
    let s = j - 1;
    let mut terms = Vec::with_capacity(4);
    if s > 0 {
        terms.push(PauliTerm::from_sites(l, &[(s - 1, Pauli::Z), (s, Pauli::Z)])?.scaled(0.5));
    }
    if s + 1 < l {
        terms.push(PauliTerm::from_sites(l, &[(s, Pauli::Z), (s + 1, Pauli::Z)])?.scaled(0.5));
    }
    terms.push(PauliTerm::single(l, s, Pauli::X)?.scaled(TILTED_X_FIELD));
    terms.push(PauliTerm::single(l, s, Pauli::Z)?.scaled(TILTED_Z_FIELD));
    PauliSum::from_terms(l, terms)
}

/// Site index of rung `j` (1-based), leg `a` in {1, 2}, on a ladder of
/// length `l`.
#[inline]
fn ladder_site(j: usize, a: usize) -> usize {
    (j - 1) * 2 + (a - 1)
}

/// XX ladder on `2l` sites: leg and rung `XX + YY` couplings, all with
/// coefficient 1/4; legs in rung order, then rungs.
pub fn build_xx_ladder(l: usize) -> Result<Hamiltonian> {
    check_chain_length(l)?;
    let n = 2 * l;
    let mut terms = Vec::with_capacity(6 * l - 4);
    for j in 1..l {
        for a in [1, 2] {
            let (s0, s1) = (ladder_site(j, a), ladder_site(j + 1, a));
            terms.push((0.25, PauliTerm::from_sites(n, &[(s0, Pauli::X), (s1, Pauli::X)])?));
            terms.push((0.25, PauliTerm::from_sites(n, &[(s0, Pauli::Y), (s1, Pauli::Y)])?));
        }
    }
    for j in 1..=l {
        let (s0, s1) = (ladder_site(j, 1), ladder_site(j, 2));
        terms.push((0.25, PauliTerm::from_sites(n, &[(s0, Pauli::X), (s1, Pauli::X)])?));
        terms.push((0.25, PauliTerm::from_sites(n, &[(s0, Pauli::Y), (s1, Pauli::Y)])?));
    }
    Hamiltonian::new(n, terms)
}

/// Spin density on rung `j` (1-based) of the XX ladder:
/// `(Z_{j,1} + Z_{j,2}) / 2`.
pub fn ladder_density(j: usize, l: usize) -> Result<PauliSum> {
    check_chain_length(l)?;
    if j < 1 || j > l {
        return Err(Error::SiteOutOfRange { site: j, n: l });
    }
    let n = 2 * l;
    PauliSum::from_terms(
        n,
        [
            PauliTerm::single(n, ladder_site(j, 1), Pauli::Z)?.scaled(0.5),
            PauliTerm::single(n, ladder_site(j, 2), Pauli::Z)?.scaled(0.5),
        ],
    )
}

/// Bond and field layers of the transverse-field Ising model
/// `-Σ_{<jk>} X_j X_k - h Σ_j Z_j`: bonds in lexicographic site order
/// (each site links to its higher neighbor along every axis), then the
/// fields in site order.
pub fn tfim_layers(
    lattice: &LatticeSpec,
    h: f64,
) -> Result<(Vec<(f64, PauliTerm)>, Vec<(f64, PauliTerm)>)> {
    let n = lattice.site_count();
    let extents = lattice.extents();
    let dims = extents.len();
    let mut strides = alloc::vec![1usize; dims];
    for d in (0..dims.saturating_sub(1)).rev() {
        strides[d] = strides[d + 1] * extents[d + 1];
    }
    let mut bonds = Vec::new();
    let mut coords = alloc::vec![0usize; dims];
    for site in 0..n {
        let mut rem = site;
        for d in 0..dims {
            coords[d] = rem / strides[d];
            rem %= strides[d];
        }
        for d in 0..dims {
            if coords[d] + 1 < extents[d] {
                let nb = site + strides[d];
                bonds.push((-1.0, PauliTerm::from_sites(n, &[(site, Pauli::X), (nb, Pauli::X)])?));
            }
        }
    }
    let mut fields = Vec::with_capacity(n);
    if h != 0.0 {
        for site in 0..n {
            fields.push((-h, PauliTerm::single(n, site, Pauli::Z)?));
        }
    }
    Ok((bonds, fields))
}

/// Transverse-field Ising Hamiltonian on an open 1D/2D/3D lattice.
pub fn build_tfim(lattice: &LatticeSpec, h: f64) -> Result<Hamiltonian> {
    let (mut bonds, mut fields) = tfim_layers(lattice, h)?;
    bonds.append(&mut fields);
    Hamiltonian::new(lattice.site_count(), bonds)
}
