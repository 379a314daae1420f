// SPDX-License-Identifier: Apache-2.0

//! Brute-force references, independent of the sparse kernel.
//!
//! Two tiers: dense `2^n × 2^n` matrices (small `n`, verifies the
//! operator algebra and conjugation conventions entry by entry) and
//! state vectors (larger `n`, verifies expectation values only). The
//! state-vector tier also provides an infinite-temperature trace
//! estimator over random-phase states, the standard typicality trick
//! for `Tr[A B(t)] / 2^n` at sizes where dense matrices are hopeless:
//! a random state with independent unit-modulus amplitudes satisfies
//! `E[|ψ⟩⟨ψ|] = I / 2^n`, so `⟨ψ| A B(t) |ψ⟩` estimates the normalized
//! trace with statistical error of order `2^{-n/2}` per sample.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::evolution::Schedule;
use crate::math;
use crate::pauli::{neg_i_pow, PauliTerm};
use crate::pauli_sum::PauliSum;
use crate::Complex64;

/// Largest site count the dense tier accepts.
pub const MAX_DENSE_SITES: usize = 12;
/// Largest site count the state-vector tier accepts.
pub const MAX_STATE_SITES: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense row-major `2^n × 2^n` complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DENSE_SITES {
            return Err(Error::SystemTooLarge { n, max: MAX_DENSE_SITES });
        }
        let dim = 1usize << n;
        Ok(Self { n, dim, data: vec![ZERO; dim * dim] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..m.dim {
            m.data[i * m.dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Matrix product `self · rhs`, skipping zero entries of `self`
    /// (Pauli factors and rotations are extremely sparse).
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: rhs.n });
        }
        let dim = self.dim;
        let mut out = Self::zeros(self.n)?;
        for row in 0..dim {
            for k in 0..dim {
                let v = self.data[row * dim + k];
                if v == ZERO {
                    continue;
                }
                let src = &rhs.data[k * dim..(k + 1) * dim];
                let dst = &mut out.data[row * dim..(row + 1) * dim];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += v * s;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    #[must_use]
    pub fn dagger(&self) -> Self {
        let mut out = self.clone();
        for row in 0..self.dim {
            for col in 0..self.dim {
                out.data[col * self.dim + row] = self.data[row * self.dim + col].conj();
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Self, factor: Complex64) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: other.n });
        }
        for (d, s) in self.data.iter_mut().zip(&other.data) {
            *d += factor * s;
        }
        Ok(())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Normalized Hilbert-Schmidt inner product `Tr[self† other] / 2^n`.
    pub fn hs_overlap(&self, other: &Self) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: other.n });
        }
        let mut acc = ZERO;
        for (a, b) in self.data.iter().zip(&other.data) {
            acc += a.conj() * b;
        }
        Ok(acc / self.dim as f64)
    }

    /// `⟨0…0| M |0…0⟩`.
    pub fn expectation_zero(&self) -> Complex64 {
        self.data[0]
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: other.n });
        }
        let mut max = 0.0f64;
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = (a - b).norm_sqr();
            if d > max {
                max = d;
            }
        }
        Ok(math::sqrt(max))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for row in 0..self.dim {
            for col in row..self.dim {
                let d = self.data[row * self.dim + col] - self.data[col * self.dim + row].conj();
                if d.norm_sqr() > tol * tol {
                    return false;
                }
            }
        }
        true
    }

    /// Largest entry magnitude of `self·other + other·self`.
    pub fn anticommutator_max(&self, other: &Self) -> Result<f64> {
        let mut ac = self.matmul(other)?;
        let rev = other.matmul(self)?;
        ac.add_scaled(&rev, Complex64::new(1.0, 0.0))?;
        let mut max = 0.0f64;
        for v in &ac.data {
            max = max.max(v.norm_sqr());
        }
        Ok(math::sqrt(max))
    }

    /// Largest entry magnitude of `self·other - other·self`.
    pub fn commutator_max(&self, other: &Self) -> Result<f64> {
        let mut ac = self.matmul(other)?;
        let rev = other.matmul(self)?;
        ac.add_scaled(&rev, Complex64::new(-1.0, 0.0))?;
        let mut max = 0.0f64;
        for v in &ac.data {
            max = max.max(v.norm_sqr());
        }
        Ok(math::sqrt(max))
    }
}

fn low_word(words: &[u64]) -> u64 {
    words.first().copied().unwrap_or(0)
}

/// Dense matrix of one Pauli term, honoring `coeff (-i)^phase Z^z X^x`
/// with site `k` on bit `k` of the basis index.
pub fn dense_term(term: &PauliTerm) -> Result<DenseOperator> {
    let mut m = DenseOperator::zeros(term.n())?;
    let x = low_word(term.x_words());
    let z = low_word(term.z_words());
    let front = term.coeff() * neg_i_pow(term.phase());
    let dim = m.dim;
    for col in 0..dim {
        let row = col ^ x as usize;
        let sign = if ((row as u64 & z).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
        m.data[row * dim + col] = front * sign;
    }
    Ok(m)
}

/// Dense matrix of a Pauli sum.
pub fn dense_sum(sum: &PauliSum) -> Result<DenseOperator> {
    let mut m = DenseOperator::zeros(sum.n())?;
    for term in sum.terms() {
        let t = dense_term(&term)?;
        m.add_scaled(&t, Complex64::new(1.0, 0.0))?;
    }
    Ok(m)
}

/// Dense `U_σ(θ) = exp(-i θ σ / 2) = cos(θ/2) I - i sin(θ/2) σ`
/// (valid because σ² = I for a unit Pauli string).
pub fn rotation_matrix(axis: &PauliTerm, angle: f64) -> Result<DenseOperator> {
    let mut u = DenseOperator::identity(axis.n())?;
    for v in u.data.iter_mut() {
        *v *= math::cos(angle / 2.0);
    }
    let sigma = dense_term(axis)?;
    u.add_scaled(&sigma, Complex64::new(0.0, -math::sin(angle / 2.0)))?;
    Ok(u)
}

/// Exact conjugation `U† O U` by one rotation, via matrix products.
pub fn conjugate_by_rotation(
    op: &DenseOperator,
    axis: &PauliTerm,
    angle: f64,
) -> Result<DenseOperator> {
    let u = rotation_matrix(axis, angle)?;
    u.dagger().matmul(&op.matmul(&u)?)
}

/// Conjugates by every rotation of one step schedule, front to back —
/// the same traversal the sparse kernel uses.
pub fn conjugate_by_step(op: &DenseOperator, schedule: &Schedule) -> Result<DenseOperator> {
    let mut current = op.clone();
    for rot in schedule.rotations() {
        current = conjugate_by_rotation(&current, rot.axis(), rot.angle())?;
    }
    Ok(current)
}

/// Dense reference for `steps` Trotter steps of Heisenberg evolution,
/// with no truncation anywhere.
pub fn exact_trotter_conjugation(
    initial: &PauliSum,
    schedule: &Schedule,
    steps: usize,
) -> Result<DenseOperator> {
    let mut dense = dense_sum(initial)?;
    for _ in 0..steps {
        dense = conjugate_by_step(&dense, schedule)?;
    }
    Ok(dense)
}

/// State vector over `n` sites, site `k` on bit `k` of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state `|0…0⟩`.
    pub fn zero_state(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_STATE_SITES {
            return Err(Error::SystemTooLarge { n, max: MAX_STATE_SITES });
        }
        let mut amps = vec![ZERO; 1usize << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Normalized random-phase state: every amplitude is `i^r 2^{-n/2}`
    /// with `r` drawn from a seeded stream.
    pub fn random_phase(n: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        if n == 0 || n > MAX_STATE_SITES {
            return Err(Error::SystemTooLarge { n, max: MAX_STATE_SITES });
        }
        let dim = 1usize << n;
        let scale = math::sqrt(1.0 / dim as f64);
        let mut amps = Vec::with_capacity(dim);
        let mut pool = 0u64;
        let mut left = 0u32;
        for _ in 0..dim {
            if left == 0 {
                pool = rng.next_u64();
                left = 32;
            }
            let r = (pool & 3) as u8;
            pool >>= 2;
            left -= 1;
            // i^r = (-i)^(4 - r)
            amps.push(neg_i_pow((4 - r) & 3) * scale);
        }
        Ok(Self { n, amps })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Applies `exp(-i θ σ / 2)` in place.
    pub fn apply_rotation(&mut self, axis: &PauliTerm, angle: f64) -> Result<()> {
        if axis.n() != self.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: axis.n() });
        }
        let x = low_word(axis.x_words()) as usize;
        let z = low_word(axis.z_words());
        let c = Complex64::new(math::cos(angle / 2.0), 0.0);
        let ms = Complex64::new(0.0, -math::sin(angle / 2.0));
        let front = ms * axis.coeff() * neg_i_pow(axis.phase());
        let dim = self.amps.len();
        if x == 0 {
            for (b, amp) in self.amps.iter_mut().enumerate() {
                let sign = if ((b as u64 & z).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
                *amp = (c + front * sign) * *amp;
            }
        } else {
            for b in 0..dim {
                let p = b ^ x;
                if p < b {
                    continue;
                }
                let sign_b = if ((b as u64 & z).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
                let sign_p = sign_b * if (x as u64 & z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
                let (ab, ap) = (self.amps[b], self.amps[p]);
                self.amps[b] = c * ab + front * sign_b * ap;
                self.amps[p] = c * ap + front * sign_p * ab;
            }
        }
        Ok(())
    }

    /// Applies the step unitary `U_step` (rotation list back to front).
    pub fn apply_step(&mut self, schedule: &Schedule) -> Result<()> {
        for rot in schedule.rotations().iter().rev() {
            self.apply_rotation(rot.axis(), rot.angle())?;
        }
        Ok(())
    }

    /// Applies `U_step†` (rotation list front to back, angles negated).
    pub fn apply_step_adjoint(&mut self, schedule: &Schedule) -> Result<()> {
        for rot in schedule.rotations() {
            self.apply_rotation(rot.axis(), -rot.angle())?;
        }
        Ok(())
    }

    /// `σ |ψ⟩` for a single term, including coefficient and phase.
    pub fn apply_term(&self, term: &PauliTerm) -> Result<Self> {
        if term.n() != self.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: term.n() });
        }
        let x = low_word(term.x_words()) as usize;
        let z = low_word(term.z_words());
        let front = term.coeff() * neg_i_pow(term.phase());
        let mut out = vec![ZERO; self.amps.len()];
        for (t, slot) in out.iter_mut().enumerate() {
            let sign = if ((t as u64 & z).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
            *slot = front * sign * self.amps[t ^ x];
        }
        Ok(Self { n: self.n, amps: out })
    }

    /// `O |ψ⟩` for a Pauli sum.
    pub fn apply_sum(&self, sum: &PauliSum) -> Result<Self> {
        if sum.n() != self.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: sum.n() });
        }
        let mut out = vec![ZERO; self.amps.len()];
        for term in sum.terms() {
            let x = low_word(term.x_words()) as usize;
            let z = low_word(term.z_words());
            let front = term.coeff() * neg_i_pow(term.phase());
            for (t, slot) in out.iter_mut().enumerate() {
                let sign = if ((t as u64 & z).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
                *slot += front * sign * self.amps[t ^ x];
            }
        }
        Ok(Self { n: self.n, amps: out })
    }

    /// `⟨self | other⟩`.
    pub fn dot(&self, other: &Self) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::SiteCountMismatch { left: self.n, right: other.n });
        }
        let mut acc = ZERO;
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// `⟨ψ| Z_site |ψ⟩`.
    pub fn z_expectation(&self, site: usize) -> Result<f64> {
        if site >= self.n {
            return Err(Error::SiteOutOfRange { site, n: self.n });
        }
        let mask = 1usize << site;
        let mut acc = 0.0f64;
        for (b, amp) in self.amps.iter().enumerate() {
            let sign = if b & mask == 0 { 1.0 } else { -1.0 };
            acc += sign * amp.norm_sqr();
        }
        Ok(acc)
    }
}

/// Schrödinger-picture reference `⟨ψ_k| Z_site |ψ_k⟩` for
/// `|ψ_k⟩ = U_step^k |0…0⟩`, for `k = 0..=steps`.
pub fn exact_expectation_series(
    schedule: &Schedule,
    site: usize,
    steps: usize,
) -> Result<Vec<f64>> {
    let mut state = StateVector::zero_state(schedule.n())?;
    let mut series = Vec::with_capacity(steps + 1);
    series.push(state.z_expectation(site)?);
    for _ in 0..steps {
        state.apply_step(schedule)?;
        series.push(state.z_expectation(site)?);
    }
    Ok(series)
}

/// Typicality estimate of the raw correlations
/// `Tr[q_j U^{-k} q_c U^k] / 2^n` for every density `q_j`, at each step
/// count in `record_steps` (ascending), averaged over `samples`
/// random-phase states drawn from `seed`.
pub fn typicality_correlations(
    schedule: &Schedule,
    densities: &[PauliSum],
    central: &PauliSum,
    record_steps: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one typicality sample"));
    }
    if record_steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("record steps must be strictly increasing"));
    }
    let n = schedule.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = vec![vec![0.0f64; densities.len()]; record_steps.len()];

    for _ in 0..samples {
        let psi = StateVector::random_phase(n, &mut rng)?;
        let mut evolved = psi.clone();
        let mut done = 0usize;
        for (ri, &target) in record_steps.iter().enumerate() {
            for _ in done..target {
                evolved.apply_step(schedule)?;
            }
            done = target;
            // z = U† q_c U |ψ⟩
            let mut back = evolved.apply_sum(central)?;
            for _ in 0..target {
                back.apply_step_adjoint(schedule)?;
            }
            for (j, q) in densities.iter().enumerate() {
                let probe = psi.apply_sum(q)?;
                raw[ri][j] += probe.dot(&back)?.re / samples as f64;
            }
        }
    }
    Ok(raw)
}
