// SPDX-License-Identifier: Apache-2.0

//! Sorted sparse sums of Pauli strings.
//!
//! Terms are held in structure-of-arrays form: a coefficient array, a
//! phase array, and a flat word matrix with `2 * nw` words per term
//! (`x` words then `z` words). Terms are strictly sorted by [`TermKey`],
//! hold Hermitian-canonical phases, and never store an exactly zero
//! coefficient. Because keys order on `x` first, the Z-type terms
//! (`x = 0`) form a contiguous prefix, making zero-state expectations
//! and Z-type counts range scans.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::bits;
use crate::error::{Error, Result};
use crate::pauli::{neg_i_pow, PauliTerm, TermKey};
use crate::Complex64;

/// Default term-count guard: 2^31 entries.
pub const DEFAULT_TERM_LIMIT: usize = 1 << 31;

/// A sorted, duplicate-free sum of Pauli strings `O = Σ_P a_P P`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    nw: usize,
    coeffs: Vec<Complex64>,
    phases: Vec<u8>,
    words: Vec<u64>,
    term_limit: usize,
}

impl PauliSum {
    /// The empty sum (the zero operator) on `n` sites.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("site count must be positive"));
        }
        Ok(Self {
            n,
            nw: bits::words_for(n),
            coeffs: Vec::new(),
            phases: Vec::new(),
            words: Vec::new(),
            term_limit: DEFAULT_TERM_LIMIT,
        })
    }

    /// Builds a sum from arbitrary terms: canonicalizes phases, sorts,
    /// combines duplicate strings, and drops exact zeros.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = PauliTerm>,
    {
        let empty = Self::empty(n)?;
        let batch: Vec<PauliTerm> = terms.into_iter().collect();
        empty.merge_add(&batch)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Words per bitstring half (`ceil(n / 64)`).
    #[inline]
    pub fn words_per_string(&self) -> usize {
        self.nw
    }

    /// Number of stored terms `N`.
    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The term-count guard applied to growing operations.
    #[inline]
    pub fn term_limit(&self) -> usize {
        self.term_limit
    }

    /// Sets the term-count guard, carried across derived sums.
    #[must_use]
    pub fn with_term_limit(mut self, limit: usize) -> Self {
        self.term_limit = limit;
        self
    }

    #[inline]
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs[i]
    }

    #[inline]
    pub fn phase(&self, i: usize) -> u8 {
        self.phases[i]
    }

    /// The `x` words of term `i`.
    #[inline]
    pub fn x_words(&self, i: usize) -> &[u64] {
        &self.words[i * 2 * self.nw..i * 2 * self.nw + self.nw]
    }

    /// The `z` words of term `i`.
    #[inline]
    pub fn z_words(&self, i: usize) -> &[u64] {
        &self.words[i * 2 * self.nw + self.nw..(i + 1) * 2 * self.nw]
    }

    #[inline]
    pub fn key(&self, i: usize) -> TermKey<'_> {
        TermKey { x: self.x_words(i), z: self.z_words(i) }
    }

    /// Materializes term `i` as a standalone [`PauliTerm`].
    pub fn term(&self, i: usize) -> PauliTerm {
        PauliTerm::from_raw_parts(
            self.n,
            self.z_words(i).to_vec(),
            self.x_words(i).to_vec(),
            self.phases[i],
            self.coeffs[i],
        )
        .expect("stored term is valid")
    }

    /// Iterates materialized terms in key order.
    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        (0..self.len()).map(move |i| self.term(i))
    }

    /// Raw coefficient array, index-aligned with [`Self::key`].
    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Raw phase array.
    #[inline]
    pub fn phases(&self) -> &[u8] {
        &self.phases
    }

    /// Raw word matrix (`2 * nw` words per term: `x` then `z`).
    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Rebuilds a sum from raw arrays, revalidating every invariant.
    pub fn from_raw_parts(
        n: usize,
        coeffs: Vec<Complex64>,
        phases: Vec<u8>,
        words: Vec<u64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("site count must be positive"));
        }
        let nw = bits::words_for(n);
        let len = coeffs.len();
        if phases.len() != len || words.len() != len * 2 * nw {
            return Err(Error::InvalidArgument("raw array lengths are inconsistent"));
        }
        let sum = Self { n, nw, coeffs, phases, words, term_limit: DEFAULT_TERM_LIMIT };
        sum.check_invariants()?;
        Ok(sum)
    }

    /// Scans every stored invariant: strict key order, canonical phases,
    /// no zero coefficients, no bits beyond the site count.
    pub fn check_invariants(&self) -> Result<()> {
        let mask = bits::tail_mask(self.n);
        for i in 0..self.len() {
            if self.coeffs[i] == Complex64::new(0.0, 0.0) {
                return Err(Error::InvalidArgument("stored coefficient is zero"));
            }
            let canon = (bits::and_count(self.z_words(i), self.x_words(i)) & 3) as u8;
            if self.phases[i] != canon {
                return Err(Error::InvalidArgument("stored phase is not canonical"));
            }
            if self.x_words(i)[self.nw - 1] & !mask != 0
                || self.z_words(i)[self.nw - 1] & !mask != 0
            {
                return Err(Error::InvalidArgument("bits set beyond site count"));
            }
            if i > 0 && self.key(i - 1).cmp(&self.key(i)) != Ordering::Less {
                return Err(Error::InvalidArgument("terms out of order or duplicated"));
            }
        }
        Ok(())
    }

    /// Binary search for a key. `Ok(i)` is the position of the stored
    /// term, `Err(i)` the insertion index that preserves order.
    pub fn find(&self, key: TermKey<'_>) -> core::result::Result<usize, usize> {
        let mut lo = 0usize;
        let mut hi = self.len();
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.key(mid).cmp(&key) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Ok(mid),
            }
        }
        Err(lo)
    }

    /// Coefficient-wise sum of `self` and a batch of terms.
    ///
    /// The batch may contain duplicate strings and non-canonical phases;
    /// duplicates are combined in batch order. Exact-zero results are
    /// dropped. Fails with [`Error::TermLimit`] when the merge could
    /// exceed the term guard.
    pub fn merge_add(&self, batch: &[PauliTerm]) -> Result<Self> {
        for t in batch {
            if t.n() != self.n {
                return Err(Error::SiteCountMismatch { left: self.n, right: t.n() });
            }
        }
        let mut cand = Candidates::with_capacity(batch.len(), self.nw);
        for t in batch {
            let t = t.clone().canonicalized();
            cand.push(t.x_words(), t.z_words(), t.phase(), t.coeff());
        }
        let order = cand.sorted_order();
        let cand = cand.combined(&order);
        self.merge_candidates(None, cand, 0.0)
    }

    /// Internal merge of pre-sorted, key-unique candidates with the
    /// stored terms. `replace_coeffs`, when given, substitutes the stored
    /// coefficient array (used by the rotation kernel for the cosine
    /// scaling). Entries with `|a| < delta` or exactly zero are dropped.
    pub(crate) fn merge_candidates(
        &self,
        replace_coeffs: Option<&[Complex64]>,
        cand: Candidates,
        delta: f64,
    ) -> Result<Self> {
        let n_self = self.len();
        let n_cand = cand.len();
        let needed = n_self + n_cand;
        if needed > self.term_limit {
            return Err(Error::TermLimit {
                current: n_self,
                needed,
                limit: self.term_limit,
            });
        }
        let coeffs_in: &[Complex64] = replace_coeffs.unwrap_or(&self.coeffs);
        let delta_sq = delta * delta;
        let keep = |c: Complex64| c != Complex64::new(0.0, 0.0) && c.norm_sqr() >= delta_sq;

        let nw2 = 2 * self.nw;
        let mut out = Self {
            n: self.n,
            nw: self.nw,
            coeffs: Vec::with_capacity(needed),
            phases: Vec::with_capacity(needed),
            words: Vec::with_capacity(needed * nw2),
            term_limit: self.term_limit,
        };

        let mut i = 0usize;
        let mut j = 0usize;
        while i < n_self && j < n_cand {
            let a = &self.words[i * nw2..(i + 1) * nw2];
            let b = cand.words_of(j);
            match cmp_packed(a, b, self.nw) {
                Ordering::Less => {
                    if keep(coeffs_in[i]) {
                        out.coeffs.push(coeffs_in[i]);
                        out.phases.push(self.phases[i]);
                        out.words.extend_from_slice(a);
                    }
                    i += 1;
                }
                Ordering::Greater => {
                    if keep(cand.coeffs[j]) {
                        out.coeffs.push(cand.coeffs[j]);
                        out.phases.push(cand.phases[j]);
                        out.words.extend_from_slice(b);
                    }
                    j += 1;
                }
                Ordering::Equal => {
                    debug_assert_eq!(self.phases[i], cand.phases[j]);
                    let c = coeffs_in[i] + cand.coeffs[j];
                    if keep(c) {
                        out.coeffs.push(c);
                        out.phases.push(self.phases[i]);
                        out.words.extend_from_slice(a);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        while i < n_self {
            if keep(coeffs_in[i]) {
                out.coeffs.push(coeffs_in[i]);
                out.phases.push(self.phases[i]);
                out.words.extend_from_slice(&self.words[i * nw2..(i + 1) * nw2]);
            }
            i += 1;
        }
        while j < n_cand {
            if keep(cand.coeffs[j]) {
                out.coeffs.push(cand.coeffs[j]);
                out.phases.push(cand.phases[j]);
                out.words.extend_from_slice(cand.words_of(j));
            }
            j += 1;
        }
        Ok(out)
    }

    /// Removes exactly the entries with `|a_P| < delta` (strict); the
    /// boundary `|a_P| = delta` is kept, and `delta = 0` is the identity.
    #[must_use]
    pub fn truncate_threshold(&self, delta: f64) -> Self {
        let delta_sq = delta * delta;
        self.filtered(|i| self.coeffs[i].norm_sqr() >= delta_sq)
    }

    /// Removes exactly the entries with more than `m` X or Y factors;
    /// X-weight equal to `m` is kept.
    #[must_use]
    pub fn truncate_xweight(&self, m: u32) -> Self {
        self.filtered(|i| bits::count(self.x_words(i)) <= m)
    }

    fn filtered(&self, mut pred: impl FnMut(usize) -> bool) -> Self {
        let nw2 = 2 * self.nw;
        let mut out = Self {
            n: self.n,
            nw: self.nw,
            coeffs: Vec::new(),
            phases: Vec::new(),
            words: Vec::new(),
            term_limit: self.term_limit,
        };
        for i in 0..self.len() {
            if pred(i) {
                out.coeffs.push(self.coeffs[i]);
                out.phases.push(self.phases[i]);
                out.words.extend_from_slice(&self.words[i * nw2..(i + 1) * nw2]);
            }
        }
        out
    }

    /// Normalized Hilbert-Schmidt inner product `Tr[self† other] / 2^n`.
    ///
    /// Iterates the smaller sum and searches the larger, accumulating
    /// `conj(a_1) a_2 (-i)^(φ_2 - φ_1)` over shared strings in key order.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: other.n });
        }
        let (small, large, swapped) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..small.len() {
            if let Ok(j) = large.find(small.key(i)) {
                let (a1, p1, a2, p2) = if swapped {
                    (large.coeffs[j], large.phases[j], small.coeffs[i], small.phases[i])
                } else {
                    (small.coeffs[i], small.phases[i], large.coeffs[j], large.phases[j])
                };
                acc += a1.conj() * a2 * neg_i_pow((p2 + 4 - p1) & 3);
            }
        }
        Ok(acc)
    }

    /// Squared Frobenius norm `Σ |a_P|^2 = Tr[O†O]/2^n`.
    pub fn frobenius2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨0…0| O |0…0⟩`: the coefficient sum over the Z-type prefix.
    ///
    /// In canonical gauge Z-type terms carry phase 0, and every Z factor
    /// fixes `|0⟩`, so only the real coefficient sum remains for a
    /// Hermitian operator.
    pub fn expectation_zero(&self) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.count_ztype() {
            acc += self.coeffs[i] * neg_i_pow(self.phases[i]);
        }
        acc.re
    }

    /// Number of stored terms.
    #[inline]
    pub fn count_terms(&self) -> usize {
        self.len()
    }

    /// Number of Z-type terms (`x = 0`), a prefix count under the key
    /// order.
    pub fn count_ztype(&self) -> usize {
        let mut lo = 0usize;
        let mut hi = self.len();
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if bits::is_zero(self.x_words(mid)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Squared-coefficient mass per Pauli weight: `F_m = Σ_{|P|=m} |a_P|^2`.
    pub fn weight_spectrum(&self) -> BTreeMap<u32, f64> {
        let mut spectrum = BTreeMap::new();
        for i in 0..self.len() {
            let m = bits::or_count(self.x_words(i), self.z_words(i));
            *spectrum.entry(m).or_insert(0.0) += self.coeffs[i].norm_sqr();
        }
        spectrum
    }
}

/// Comparison of packed `[x | z]` rows: `x` words first, last word most
/// significant, then `z`.
#[inline]
pub(crate) fn cmp_packed(a: &[u64], b: &[u64], nw: usize) -> Ordering {
    bits::cmp_words(&a[..nw], &b[..nw]).then_with(|| bits::cmp_words(&a[nw..], &b[nw..]))
}

/// Structure-of-arrays candidate buffer used by merges and the rotation
/// kernel. Rows use the same packed `[x | z]` layout as [`PauliSum`].
pub(crate) struct Candidates {
    pub nw: usize,
    pub coeffs: Vec<Complex64>,
    pub phases: Vec<u8>,
    pub words: Vec<u64>,
}

impl Candidates {
    pub fn with_capacity(cap: usize, nw: usize) -> Self {
        Self {
            nw,
            coeffs: Vec::with_capacity(cap),
            phases: Vec::with_capacity(cap),
            words: Vec::with_capacity(cap * 2 * nw),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn words_of(&self, i: usize) -> &[u64] {
        &self.words[i * 2 * self.nw..(i + 1) * 2 * self.nw]
    }

    #[inline]
    pub fn push(&mut self, x: &[u64], z: &[u64], phase: u8, coeff: Complex64) {
        self.words.extend_from_slice(x);
        self.words.extend_from_slice(z);
        self.phases.push(phase);
        self.coeffs.push(coeff);
    }

    /// Key-sorted permutation of the rows; ties keep insertion order so
    /// duplicate combination is deterministic.
    pub fn sorted_order(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.len() as u32).collect();
        if self.nw == 1 {
            // Pack (x, z, index) so the sort runs on plain integer tuples.
            let mut tagged: Vec<(u64, u64, u32)> = (0..self.len())
                .map(|i| (self.words[2 * i], self.words[2 * i + 1], i as u32))
                .collect();
            tagged.sort_unstable();
            for (slot, &(_, _, i)) in order.iter_mut().zip(tagged.iter()) {
                *slot = i;
            }
        } else {
            let nw = self.nw;
            order.sort_by(|&a, &b| {
                cmp_packed(self.words_of(a as usize), self.words_of(b as usize), nw)
                    .then(a.cmp(&b))
            });
        }
        order
    }

    /// Gathers rows in `order`, combining duplicate keys by coefficient
    /// addition in `order` sequence and keeping exact zeros out.
    pub fn combined(self, order: &[u32]) -> Self {
        let mut out = Candidates::with_capacity(self.len(), self.nw);
        let mut idx = 0usize;
        while idx < order.len() {
            let first = order[idx] as usize;
            let mut coeff = self.coeffs[first];
            let mut next = idx + 1;
            while next < order.len()
                && cmp_packed(self.words_of(order[next] as usize), self.words_of(first), self.nw)
                    == Ordering::Equal
            {
                coeff += self.coeffs[order[next] as usize];
                next += 1;
            }
            if coeff != Complex64::new(0.0, 0.0) {
                let row = self.words_of(first);
                out.push(&row[..self.nw], &row[self.nw..], self.phases[first], coeff);
            }
            idx = next;
        }
        out
    }

    /// Gathers rows in `order` without combining (keys already unique).
    pub fn gathered(self, order: &[u32]) -> Self {
        let mut out = Candidates::with_capacity(self.len(), self.nw);
        for &i in order {
            let row = self.words_of(i as usize);
            out.push(
                &row[..self.nw],
                &row[self.nw..],
                self.phases[i as usize],
                self.coeffs[i as usize],
            );
        }
        out
    }
}

/// Rotation kernel: conjugates the sum by `exp(-i θ σ / 2)`.
///
/// Commuting terms pass through unchanged; each anticommuting term `a P`
/// contributes `cos(θ) a P` plus the canonicalized candidate
/// `i sin(θ) a (σ · P)`. Candidates are sorted, merged, and everything
/// below `delta` is discarded.
///
/// The word-width specializations produce bit-identical results to the
/// dynamic path (cross-checked in tests); they exist because this loop
/// is the entire cost of a simulation.
pub(crate) fn rotate(
    sum: &PauliSum,
    axis_x: &[u64],
    axis_z: &[u64],
    axis_phase: u8,
    cos_t: f64,
    sin_t: f64,
    delta: f64,
) -> Result<PauliSum> {
    if sin_t == 0.0 && cos_t == 1.0 {
        return Ok(sum.clone());
    }
    match sum.nw {
        1 => rotate_w::<1>(sum, axis_x, axis_z, axis_phase, cos_t, sin_t, delta),
        2 => rotate_w::<2>(sum, axis_x, axis_z, axis_phase, cos_t, sin_t, delta),
        _ => rotate_dyn(sum, axis_x, axis_z, axis_phase, cos_t, sin_t, delta),
    }
}

/// Whether the chunked (work-splittable) kernel should run. The chunked
/// and single-pass kernels emit bit-identical sums, so this switch can
/// depend on data size and pool width without affecting reproducibility.
/// Below four workers the chunk bookkeeping costs more than it saves.
#[cfg(feature = "parallel")]
fn use_chunked(n_terms: usize) -> bool {
    rayon::current_num_threads() >= 4 && n_terms >= 4 * ROTATE_CHUNK
}

#[cfg(not(feature = "parallel"))]
fn use_chunked(_n_terms: usize) -> bool {
    false
}

/// Candidate row of the fixed-width kernel. Keys compare `x` before
/// `z`, last word most significant.
struct CandRow<const W: usize> {
    x: [u64; W],
    z: [u64; W],
    phase: u8,
    coeff: Complex64,
}

#[inline(always)]
fn cmp_fixed<const W: usize>(
    ax: &[u64; W],
    az: &[u64; W],
    bx: &[u64; W],
    bz: &[u64; W],
) -> Ordering {
    for w in (0..W).rev() {
        match ax[w].cmp(&bx[w]) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    for w in (0..W).rev() {
        match az[w].cmp(&bz[w]) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    Ordering::Equal
}

#[inline(always)]
fn parity_and<const W: usize>(a: &[u64; W], b: &[u64; W]) -> u32 {
    let mut acc = 0u64;
    for w in 0..W {
        acc ^= a[w] & b[w];
    }
    acc.count_ones() & 1
}

/// Terms per work unit. A fixed constant: chunk boundaries must not
/// depend on thread count, so the output bit pattern never does either.
const ROTATE_CHUNK: usize = 1 << 15;

/// Output fragment of one merge chunk.
struct OutPiece {
    coeffs: Vec<Complex64>,
    phases: Vec<u8>,
    words: Vec<u64>,
}

#[cfg(feature = "parallel")]
fn map_chunks<T: Send, F: Fn(usize) -> T + Sync + Send>(count: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_chunks<T: Send, F: Fn(usize) -> T + Sync + Send>(count: usize, f: F) -> Vec<T> {
    (0..count).map(f).collect()
}

fn rotate_w<const W: usize>(
    sum: &PauliSum,
    axis_x: &[u64],
    axis_z: &[u64],
    axis_phase: u8,
    cos_t: f64,
    sin_t: f64,
    delta: f64,
) -> Result<PauliSum> {
    if use_chunked(sum.len()) {
        rotate_w_chunked::<W>(sum, axis_x, axis_z, axis_phase, cos_t, sin_t, delta)
    } else {
        rotate_w_single::<W>(sum, axis_x, axis_z, axis_phase, cos_t, sin_t, delta)
    }
}

/// Single-pass fixed-width kernel.
fn rotate_w_single<const W: usize>(
    sum: &PauliSum,
    axis_x: &[u64],
    axis_z: &[u64],
    axis_phase: u8,
    cos_t: f64,
    sin_t: f64,
    delta: f64,
) -> Result<PauliSum> {
    debug_assert_eq!(sum.nw, W);
    let n_terms = sum.len();
    let mut ax = [0u64; W];
    let mut az = [0u64; W];
    ax.copy_from_slice(axis_x);
    az.copy_from_slice(axis_z);

    let i_sin = Complex64::new(0.0, sin_t);
    let residual_factor =
        [i_sin, i_sin * neg_i_pow(1), i_sin * neg_i_pow(2), i_sin * neg_i_pow(3)];

    let words = &sum.words;
    let load = |i: usize| -> ([u64; W], [u64; W]) {
        let mut x = [0u64; W];
        let mut z = [0u64; W];
        x.copy_from_slice(&words[2 * W * i..2 * W * i + W]);
        z.copy_from_slice(&words[2 * W * i + W..2 * W * i + 2 * W]);
        (x, z)
    };

    let mut cand: Vec<CandRow<W>> = Vec::new();
    for i in 0..n_terms {
        let (x, z) = load(i);
        if (parity_and(&z, &ax) ^ parity_and(&x, &az)) == 0 {
            continue;
        }
        let swap = parity_and(&ax, &z) as u8;
        let raw = (axis_phase + sum.phases[i] + 2 * swap) & 3;
        let mut cx = [0u64; W];
        let mut cz = [0u64; W];
        let mut canon_count = 0u32;
        for w in 0..W {
            cx[w] = x[w] ^ ax[w];
            cz[w] = z[w] ^ az[w];
            canon_count += (cx[w] & cz[w]).count_ones();
        }
        let canon = (canon_count & 3) as u8;
        let residual = (raw + 4 - canon) & 3;
        cand.push(CandRow {
            x: cx,
            z: cz,
            phase: canon,
            coeff: sum.coeffs[i] * residual_factor[residual as usize],
        });
    }

    // σ·P is injective over distinct P, so keys are unique.
    cand.sort_unstable_by(|a, b| cmp_fixed(&a.x, &a.z, &b.x, &b.z));

    let needed = n_terms + cand.len();
    if needed > sum.term_limit {
        return Err(Error::TermLimit { current: n_terms, needed, limit: sum.term_limit });
    }
    let delta_sq = delta * delta;
    let zero = Complex64::new(0.0, 0.0);
    let mut out = PauliSum {
        n: sum.n,
        nw: W,
        coeffs: Vec::with_capacity(needed),
        phases: Vec::with_capacity(needed),
        words: Vec::with_capacity(needed * 2 * W),
        term_limit: sum.term_limit,
    };
    let mut push = |x: &[u64; W], z: &[u64; W], phase: u8, coeff: Complex64| {
        if coeff != zero && coeff.norm_sqr() >= delta_sq {
            out.words.extend_from_slice(x);
            out.words.extend_from_slice(z);
            out.phases.push(phase);
            out.coeffs.push(coeff);
        }
    };

    // Anticommutation is recomputed here instead of buffered: the merge
    // touches every term once either way and reclassification is a
    // handful of register ops.
    let mut i = 0usize;
    let mut j = 0usize;
    while i < n_terms {
        let (x, z) = load(i);
        let anti = (parity_and(&z, &ax) ^ parity_and(&x, &az)) == 1;
        let coeff = if anti { sum.coeffs[i] * cos_t } else { sum.coeffs[i] };
        let mut advanced = false;
        while j < cand.len() {
            match cmp_fixed(&cand[j].x, &cand[j].z, &x, &z) {
                Ordering::Less => {
                    push(&cand[j].x, &cand[j].z, cand[j].phase, cand[j].coeff);
                    j += 1;
                }
                Ordering::Equal => {
                    debug_assert_eq!(cand[j].phase, sum.phases[i]);
                    push(&x, &z, sum.phases[i], coeff + cand[j].coeff);
                    j += 1;
                    i += 1;
                    advanced = true;
                    break;
                }
                Ordering::Greater => break,
            }
        }
        if !advanced {
            push(&x, &z, sum.phases[i], coeff);
            i += 1;
        }
    }
    while j < cand.len() {
        push(&cand[j].x, &cand[j].z, cand[j].phase, cand[j].coeff);
        j += 1;
    }
    Ok(out)
}

/// Chunked fixed-width kernel; emits exactly the bit pattern of
/// [`rotate_w_single`] while letting chunks run on worker threads.
fn rotate_w_chunked<const W: usize>(
    sum: &PauliSum,
    axis_x: &[u64],
    axis_z: &[u64],
    axis_phase: u8,
    cos_t: f64,
    sin_t: f64,
    delta: f64,
) -> Result<PauliSum> {
    debug_assert_eq!(sum.nw, W);
    let n_terms = sum.len();
    let mut ax = [0u64; W];
    let mut az = [0u64; W];
    ax.copy_from_slice(axis_x);
    az.copy_from_slice(axis_z);

    // i sin(θ) (-i)^r for each phase residual r.
    let i_sin = Complex64::new(0.0, sin_t);
    let residual_factor =
        [i_sin, i_sin * neg_i_pow(1), i_sin * neg_i_pow(2), i_sin * neg_i_pow(3)];

    let words = &sum.words;
    let load = |i: usize| -> ([u64; W], [u64; W]) {
        let mut x = [0u64; W];
        let mut z = [0u64; W];
        x.copy_from_slice(&words[2 * W * i..2 * W * i + W]);
        z.copy_from_slice(&words[2 * W * i + W..2 * W * i + 2 * W]);
        (x, z)
    };

    // Candidate generation, chunked in fixed index ranges.
    let n_chunks = n_terms.div_ceil(ROTATE_CHUNK).max(1);
    let chunks: Vec<Vec<CandRow<W>>> = map_chunks(n_chunks, |c| {
        let start = c * ROTATE_CHUNK;
        let end = (start + ROTATE_CHUNK).min(n_terms);
        let mut local = Vec::new();
        for i in start..end {
            let (x, z) = load(i);
            if (parity_and(&z, &ax) ^ parity_and(&x, &az)) == 0 {
                continue;
            }
            let swap = parity_and(&ax, &z) as u8;
            let raw = (axis_phase + sum.phases[i] + 2 * swap) & 3;
            let mut cx = [0u64; W];
            let mut cz = [0u64; W];
            let mut canon_count = 0u32;
            for w in 0..W {
                cx[w] = x[w] ^ ax[w];
                cz[w] = z[w] ^ az[w];
                canon_count += (cx[w] & cz[w]).count_ones();
            }
            let canon = (canon_count & 3) as u8;
            let residual = (raw + 4 - canon) & 3;
            local.push(CandRow {
                x: cx,
                z: cz,
                phase: canon,
                coeff: sum.coeffs[i] * residual_factor[residual as usize],
            });
        }
        local
    });
    let mut cand: Vec<CandRow<W>> = Vec::with_capacity(chunks.iter().map(Vec::len).sum());
    for chunk in chunks {
        cand.extend(chunk);
    }

    // σ·P is injective over distinct P, so keys are unique and any
    // sorted order is the same sequence regardless of worker count.
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cand.par_sort_unstable_by(|a, b| cmp_fixed(&a.x, &a.z, &b.x, &b.z));
    }
    #[cfg(not(feature = "parallel"))]
    cand.sort_unstable_by(|a, b| cmp_fixed(&a.x, &a.z, &b.x, &b.z));

    let needed = n_terms + cand.len();
    if needed > sum.term_limit {
        return Err(Error::TermLimit { current: n_terms, needed, limit: sum.term_limit });
    }
    let delta_sq = delta * delta;
    let zero = Complex64::new(0.0, 0.0);

    // Merge-join per index chunk; candidate ranges come from binary
    // searching each chunk's first key, so every pair lands in exactly
    // one chunk. Anticommutation is recomputed instead of buffered: the
    // merge touches every term once either way and reclassification is
    // a handful of register ops.
    let lower_bound = |key: (&[u64; W], &[u64; W])| -> usize {
        cand.partition_point(|row| cmp_fixed(&row.x, &row.z, key.0, key.1) == Ordering::Less)
    };
    let mut bounds = Vec::with_capacity(n_chunks + 1);
    bounds.push(0usize);
    for c in 1..n_chunks {
        let (x, z) = load(c * ROTATE_CHUNK);
        bounds.push(lower_bound((&x, &z)));
    }
    bounds.push(cand.len());

    let pieces: Vec<OutPiece> = map_chunks(n_chunks, |c| {
        let (i0, i1) = (c * ROTATE_CHUNK, ((c + 1) * ROTATE_CHUNK).min(n_terms));
        let (j0, j1) = (bounds[c], bounds[c + 1]);
        let mut piece = OutPiece {
            coeffs: Vec::with_capacity(i1 - i0 + j1 - j0),
            phases: Vec::with_capacity(i1 - i0 + j1 - j0),
            words: Vec::with_capacity((i1 - i0 + j1 - j0) * 2 * W),
        };
        let mut push = |x: &[u64; W], z: &[u64; W], phase: u8, coeff: Complex64| {
            if coeff != zero && coeff.norm_sqr() >= delta_sq {
                piece.words.extend_from_slice(x);
                piece.words.extend_from_slice(z);
                piece.phases.push(phase);
                piece.coeffs.push(coeff);
            }
        };
        let mut i = i0;
        let mut j = j0;
        while i < i1 {
            let (x, z) = load(i);
            let anti = (parity_and(&z, &ax) ^ parity_and(&x, &az)) == 1;
            let coeff = if anti { sum.coeffs[i] * cos_t } else { sum.coeffs[i] };
            let mut advanced = false;
            while j < j1 {
                match cmp_fixed(&cand[j].x, &cand[j].z, &x, &z) {
                    Ordering::Less => {
                        push(&cand[j].x, &cand[j].z, cand[j].phase, cand[j].coeff);
                        j += 1;
                    }
                    Ordering::Equal => {
                        debug_assert_eq!(cand[j].phase, sum.phases[i]);
                        push(&x, &z, sum.phases[i], coeff + cand[j].coeff);
                        j += 1;
                        i += 1;
                        advanced = true;
                        break;
                    }
                    Ordering::Greater => break,
                }
            }
            if !advanced {
                push(&x, &z, sum.phases[i], coeff);
                i += 1;
            }
        }
        while j < j1 {
            push(&cand[j].x, &cand[j].z, cand[j].phase, cand[j].coeff);
            j += 1;
        }
        piece
    });

    let total: usize = pieces.iter().map(|p| p.coeffs.len()).sum();
    let mut out = PauliSum {
        n: sum.n,
        nw: W,
        coeffs: Vec::with_capacity(total),
        phases: Vec::with_capacity(total),
        words: Vec::with_capacity(total * 2 * W),
        term_limit: sum.term_limit,
    };
    for piece in pieces {
        out.coeffs.extend(piece.coeffs);
        out.phases.extend(piece.phases);
        out.words.extend(piece.words);
    }
    Ok(out)
}

/// Dynamic-width fallback of the rotation kernel (any site count).
fn rotate_dyn(
    sum: &PauliSum,
    axis_x: &[u64],
    axis_z: &[u64],
    axis_phase: u8,
    cos_t: f64,
    sin_t: f64,
    delta: f64,
) -> Result<PauliSum> {
    let n_terms = sum.len();
    let nw = sum.nw;

    // Classify terms against the axis.
    let mut anti = vec![false; n_terms];
    for (i, flag) in anti.iter_mut().enumerate() {
        *flag = bits::and_parity(sum.z_words(i), axis_x)
            ^ bits::and_parity(sum.x_words(i), axis_z);
    }
    let n_anti = anti.iter().filter(|&&a| a).count();

    // Cosine-scale the anticommuting coefficients.
    let mut kept = sum.coeffs.clone();
    for (c, &a) in kept.iter_mut().zip(&anti) {
        if a {
            *c *= cos_t;
        }
    }

    // Sine-scaled products σ·P, canonicalized on construction.
    let i_sin = Complex64::new(0.0, sin_t);
    let mut cand = Candidates::with_capacity(n_anti, nw);
    let mut row = vec![0u64; 2 * nw];
    for i in 0..n_terms {
        if !anti[i] {
            continue;
        }
        let (cx, cz) = row.split_at_mut(nw);
        for w in 0..nw {
            cx[w] = axis_x[w] ^ sum.x_words(i)[w];
            cz[w] = axis_z[w] ^ sum.z_words(i)[w];
        }
        let swap = bits::and_parity(axis_x, sum.z_words(i)) as u8;
        let raw = (axis_phase + sum.phases[i] + 2 * swap) & 3;
        let canon = (bits::and_count(cz, cx) & 3) as u8;
        let residual = (raw + 4 - canon) & 3;
        let coeff = sum.coeffs[i] * i_sin * neg_i_pow(residual);
        cand.push(cx, cz, canon, coeff);
    }

    // σ·P is injective, so candidate keys are unique: gather only.
    let order = cand.sorted_order();
    let cand = cand.gathered(&order);
    sum.merge_candidates(Some(&kept), cand, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use core::str::FromStr;

    fn t(label: &str, coeff: f64) -> PauliTerm {
        PauliTerm::from_str(label).unwrap().scaled(coeff)
    }

    fn sum_of(n: usize, terms: &[(&str, f64)]) -> PauliSum {
        PauliSum::from_terms(n, terms.iter().map(|&(l, c)| t(l, c))).unwrap()
    }

    #[test]
    fn empty_sum_behaves_like_zero() {
        let s = PauliSum::empty(3).unwrap();
        assert_eq!(s.len(), 0);
        assert_eq!(s.count_ztype(), 0);
        assert_eq!(s.expectation_zero(), 0.0);
        assert!(s.weight_spectrum().is_empty());
        let key = PauliTerm::identity(3).unwrap();
        assert_eq!(s.find(key.key()), Err(0));
    }

    #[test]
    fn merge_combines_duplicates() {
        let s = PauliSum::from_terms(1, [t("Z", 1.0), t("Z", 2.0)]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(0), Complex64::new(3.0, 0.0));
    }

    #[test]
    fn merge_empty_batch_is_identity() {
        let s = sum_of(2, &[("ZI", 0.5), ("XI", 1.4)]);
        let merged = s.merge_add(&[]).unwrap();
        assert_eq!(merged, s);
    }

    #[test]
    fn merge_cancels_to_empty() {
        let s = sum_of(2, &[("ZI", 0.5), ("XY", 1.5)]);
        let negated: Vec<PauliTerm> = s.terms().map(|p| {
            let c = p.coeff();
            p.with_coeff(-c)
        }).collect();
        let merged = s.merge_add(&negated).unwrap();
        assert!(merged.is_empty());
    }

    #[test]
    fn find_agrees_with_linear_scan() {
        let labels = ["III", "XIZ", "ZZZ", "YXI", "IZI", "XXX", "IIY"];
        let s = PauliSum::from_terms(3, labels.iter().map(|l| t(l, 1.0))).unwrap();
        s.check_invariants().unwrap();
        for probe in ["III", "XIZ", "YYY", "IZI", "ZII"] {
            let term = t(probe, 1.0);
            let by_scan = (0..s.len()).find(|&i| s.key(i) == term.key());
            match s.find(term.key()) {
                Ok(i) => assert_eq!(Some(i), by_scan),
                Err(ins) => {
                    assert_eq!(by_scan, None);
                    assert!(ins <= s.len());
                    if ins > 0 {
                        assert!(s.key(ins - 1) < term.key());
                    }
                    if ins < s.len() {
                        assert!(term.key() < s.key(ins));
                    }
                }
            }
        }
    }

    #[test]
    fn threshold_truncation_is_strict() {
        let s = sum_of(1, &[("Z", 0.5), ("X", 1e-9)]);
        let cut = s.truncate_threshold(1e-6);
        assert_eq!(cut.len(), 1);
        assert_eq!(cut.coeff(0), Complex64::new(0.5, 0.0));
        // |a| exactly delta stays.
        let boundary = s.truncate_threshold(0.5);
        assert_eq!(boundary.len(), 1);
        // delta = 0 is the identity.
        assert_eq!(s.truncate_threshold(0.0), s);
    }

    #[test]
    fn xweight_truncation_keeps_boundary() {
        let s = sum_of(4, &[("ZZII", 1.0), ("XXYY", 1.0)]);
        let cut = s.truncate_xweight(3);
        assert_eq!(cut.len(), 1);
        assert_eq!(cut.term(0).label(), "ZZII");
        assert_eq!(s.truncate_xweight(4).len(), 2);
        assert_eq!(s.truncate_xweight(64), s);
    }

    #[test]
    fn overlap_matches_hand_values() {
        let a = sum_of(2, &[("ZZ", 0.5), ("IX", 1.4)]);
        let b = sum_of(2, &[("ZZ", 0.5)]);
        let ov = a.overlap(&b).unwrap();
        assert!((ov.re - 0.25).abs() < 1e-15);
        assert_eq!(ov.im, 0.0);
        // Disjoint keys are orthogonal.
        let c = sum_of(2, &[("YY", 3.0)]);
        assert_eq!(b.overlap(&c).unwrap(), Complex64::new(0.0, 0.0));
        // Self-overlap is the squared Frobenius norm.
        let f2 = a.overlap(&a).unwrap();
        assert!((f2.re - a.frobenius2()).abs() < 1e-15);
    }

    #[test]
    fn zero_state_expectation_reads_ztype_prefix() {
        assert_eq!(sum_of(1, &[("Z", 1.0)]).expectation_zero(), 1.0);
        assert_eq!(sum_of(1, &[("X", 1.0)]).expectation_zero(), 0.0);
        let theta = 0.7f64;
        let s = sum_of(1, &[("Z", theta.cos()), ("Y", theta.sin())]);
        assert!((s.expectation_zero() - theta.cos()).abs() < 1e-15);
    }

    #[test]
    fn term_counts() {
        let s = sum_of(1, &[("Z", 1.0), ("X", 1.0)]);
        assert_eq!((s.count_terms(), s.count_ztype()), (2, 1));
        let s = sum_of(3, &[("ZZI", 1.0), ("IIZ", 1.0), ("XIZ", 1.0), ("YII", 1.0), ("III", 2.0)]);
        let scan = (0..s.len()).filter(|&i| bits::is_zero(s.x_words(i))).count();
        assert_eq!(s.count_ztype(), scan);
        assert_eq!(s.count_ztype(), 3);
    }

    #[test]
    fn weight_spectrum_sums_to_frobenius() {
        let s = sum_of(3, &[("XII", 1.4), ("ZII", 0.9), ("ZZI", 0.5), ("XYZ", 0.25)]);
        let spec = s.weight_spectrum();
        let total: f64 = spec.values().sum();
        assert!((total - s.frobenius2()).abs() < 1e-12);
        assert!((spec[&1] - (1.4f64 * 1.4 + 0.9 * 0.9)).abs() < 1e-12);
        assert!((spec[&3] - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn term_limit_guard_fires() {
        let s = sum_of(2, &[("ZI", 1.0), ("IZ", 1.0)]).with_term_limit(3);
        let batch = [t("XI", 1.0), t("IX", 1.0)];
        match s.merge_add(&batch) {
            Err(Error::TermLimit { current, needed, limit }) => {
                assert_eq!((current, needed, limit), (2, 4, 3));
            }
            other => panic!("expected TermLimit, got {other:?}"),
        }
    }

    #[test]
    fn from_raw_parts_round_trip_and_validation() {
        let s = sum_of(2, &[("ZI", 0.5), ("XY", 1.5), ("IZ", -2.0)]);
        let rebuilt = PauliSum::from_raw_parts(
            s.n(),
            s.coeffs().to_vec(),
            s.phases().to_vec(),
            s.words().to_vec(),
        )
        .unwrap();
        assert_eq!(rebuilt, s);
        // Corrupt the phase: validation must fail.
        let mut phases = s.phases().to_vec();
        phases[0] ^= 1;
        assert!(PauliSum::from_raw_parts(s.n(), s.coeffs().to_vec(), phases, s.words().to_vec())
            .is_err());
    }

    #[test]
    fn non_canonical_batch_terms_are_canonicalized() {
        // X·Z carries raw phase 2; the sum must store it canonically.
        let x = PauliTerm::single(1, 0, Pauli::X).unwrap();
        let z = PauliTerm::single(1, 0, Pauli::Z).unwrap();
        let xz = x.multiply(&z).unwrap();
        assert!(!xz.is_canonical());
        let s = PauliSum::from_terms(1, [xz]).unwrap();
        s.check_invariants().unwrap();
        assert_eq!(s.coeff(0), Complex64::new(0.0, -1.0)); // X·Z = -i Y
    }

    fn big_random_sum(n: usize, count: usize, seed: u64) -> PauliSum {
        use rand_core::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let batch: alloc::vec::Vec<PauliTerm> = (0..count)
            .map(|_| {
                let z = rng.next_u64() & mask;
                let x = rng.next_u64() & mask;
                let re = (rng.next_u64() as f64 / u64::MAX as f64) * 2.0 - 1.0;
                PauliTerm::from_raw_parts(n, alloc::vec![z], alloc::vec![x], 0, Complex64::new(re, 0.0))
                    .unwrap()
                    .canonicalized()
            })
            .collect();
        PauliSum::from_terms(n, batch).unwrap()
    }

    #[test]
    fn chunked_kernel_matches_single_pass() {
        // Multi-chunk sizes; both kernels must emit the same bit pattern.
        let sum = big_random_sum(40, 150_000, 3);
        let axis = PauliTerm::from_sites(40, &[(7, Pauli::X), (20, Pauli::Y)]).unwrap();
        let (c, s) = (0.923f64, 0.385f64);
        let single = rotate_w_single::<1>(
            &sum, axis.x_words(), axis.z_words(), axis.phase(), c, s, 1e-7,
        )
        .unwrap();
        let chunked = rotate_w_chunked::<1>(
            &sum, axis.x_words(), axis.z_words(), axis.phase(), c, s, 1e-7,
        )
        .unwrap();
        assert_eq!(single, chunked);
        single.check_invariants().unwrap();
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn chunked_kernel_is_thread_count_invariant() {
        let sum = big_random_sum(40, 150_000, 4);
        let axis = PauliTerm::from_sites(40, &[(3, Pauli::Z), (11, Pauli::X)]).unwrap();
        let run = |threads: usize| {
            let pool =
                rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                rotate_w_chunked::<1>(
                    &sum, axis.x_words(), axis.z_words(), axis.phase(), 0.6, 0.8, 1e-7,
                )
                .unwrap()
            })
        };
        let one = run(1);
        let eight = run(8);
        assert_eq!(one, eight);
    }
}
