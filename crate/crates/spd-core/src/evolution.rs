// SPDX-License-Identifier: Apache-2.0

//! Heisenberg-picture time evolution.
//!
//! A [`Schedule`] is one Trotter step written as an ordered rotation
//! list for the unitary `U_step = Π_k exp(-i θ_k σ_k / 2)`, factors read
//! left to right. Conjugation (`O ← U†OU`) consumes the list front to
//! back, because `(AB)†O(AB) = B†(A†OA)B`; preparing a state with the
//! same step applies it back to front. The state-vector oracle shares
//! this type, so a gate-order change breaks both sides identically.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::models::Hamiltonian;
use crate::pauli::PauliTerm;
use crate::pauli_sum::{self, PauliSum, DEFAULT_TERM_LIMIT};
use crate::Complex64;

/// One Pauli rotation `U_σ(θ) = exp(-i θ σ / 2)` about a unit,
/// Hermitian-canonical Pauli string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliRotation {
    axis: PauliTerm,
    angle: f64,
}

impl PauliRotation {
    pub fn new(axis: PauliTerm, angle: f64) -> Result<Self> {
        if axis.coeff() != Complex64::new(1.0, 0.0) || !axis.is_canonical() {
            return Err(Error::InvalidArgument("rotation axis must be a unit canonical term"));
        }
        if !angle.is_finite() {
            return Err(Error::InvalidArgument("rotation angle must be finite"));
        }
        Ok(Self { axis, angle })
    }

    #[inline]
    pub fn axis(&self) -> &PauliTerm {
        &self.axis
    }

    #[inline]
    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// The inverse rotation (negated angle).
    #[must_use]
    pub fn inverse(&self) -> Self {
        Self { axis: self.axis.clone(), angle: -self.angle }
    }
}

/// One Trotter step as an ordered list of Pauli rotations.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    n: usize,
    rotations: Vec<PauliRotation>,
}

impl Schedule {
    pub fn from_rotations(n: usize, rotations: Vec<PauliRotation>) -> Result<Self> {
        for r in &rotations {
            if r.axis.n() != n {
                return Err(Error::SiteCountMismatch { left: n, right: r.axis.n() });
            }
        }
        Ok(Self { n, rotations })
    }

    /// First-order splitting of `exp(-i H dt)`: one rotation per
    /// Hamiltonian term in emission order, with `θ_j = 2 c_j dt`.
    pub fn first_order(h: &Hamiltonian, dt: f64) -> Result<Self> {
        let rotations = h
            .terms()
            .iter()
            .map(|(c, t)| PauliRotation::new(t.clone(), 2.0 * c * dt))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rotations(h.n(), rotations)
    }

    /// Symmetrized splitting: the `outer` layer at half angle on both
    /// sides of the `inner` layer at full angle.
    pub fn symmetrized(
        n: usize,
        outer: &[(f64, PauliTerm)],
        inner: &[(f64, PauliTerm)],
        dt: f64,
    ) -> Result<Self> {
        let mut rotations = Vec::with_capacity(2 * outer.len() + inner.len());
        for (c, t) in outer {
            rotations.push(PauliRotation::new(t.clone(), c * dt)?);
        }
        for (c, t) in inner {
            rotations.push(PauliRotation::new(t.clone(), 2.0 * c * dt)?);
        }
        for (c, t) in outer {
            rotations.push(PauliRotation::new(t.clone(), c * dt)?);
        }
        Self::from_rotations(n, rotations)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn rotations(&self) -> &[PauliRotation] {
        &self.rotations
    }
}

/// Parameters of one evolution run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    /// Truncation threshold δ applied after every rotation.
    pub delta: f64,
    /// Trotter step Δt.
    pub dt: f64,
    /// Total evolution time; must be a whole number of steps.
    pub t_max: f64,
    /// X-weight cutoff M; `None` disables the X-truncation entirely.
    pub x_cutoff: Option<u32>,
    /// Apply the X-truncation every this many steps.
    pub x_period: usize,
    /// Term-count guard.
    pub max_terms: usize,
    /// Observable sampling stride in steps.
    pub record_every: usize,
}

impl EvolutionConfig {
    pub fn new(delta: f64, dt: f64, t_max: f64) -> Self {
        Self {
            delta,
            dt,
            t_max,
            x_cutoff: None,
            x_period: 5,
            max_terms: DEFAULT_TERM_LIMIT,
            record_every: 1,
        }
    }

    #[must_use]
    pub fn with_x_cutoff(mut self, m: u32, period: usize) -> Self {
        self.x_cutoff = Some(m);
        self.x_period = period;
        self
    }

    #[must_use]
    pub fn with_max_terms(mut self, limit: usize) -> Self {
        self.max_terms = limit;
        self
    }

    #[must_use]
    pub fn with_record_every(mut self, stride: usize) -> Self {
        self.record_every = stride;
        self
    }

    /// Number of Trotter steps `K = t_max / dt`.
    pub fn steps(&self) -> Result<usize> {
        self.validate()?;
        Ok(math::round(self.t_max / self.dt) as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidArgument("delta must be finite and non-negative"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument("dt must be finite and positive"));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::InvalidArgument("t_max must be finite and non-negative"));
        }
        let steps = math::round(self.t_max / self.dt);
        if math::abs(steps * self.dt - self.t_max) > 1e-9 * if self.t_max > 1.0 { self.t_max } else { 1.0 } {
            return Err(Error::InvalidArgument("t_max must be a whole number of steps"));
        }
        if self.x_period == 0 {
            return Err(Error::InvalidArgument("x_period must be positive"));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be positive"));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidArgument("max_terms must be positive"));
        }
        Ok(())
    }
}

/// Cheap per-step counters captured at recording instants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub n_terms: usize,
    pub n_ztype: usize,
}

/// How an evolution ended.
#[derive(Debug, Clone, PartialEq)]
pub enum EvolveStatus {
    Completed,
    /// The term guard fired during `step`; the trajectory holds the last
    /// state that still satisfied the guard.
    TermLimit { step: usize, error: Error },
}

/// Recorded counters, the final (or last-good) operator, and the
/// completion status of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub sum: PauliSum,
    pub status: EvolveStatus,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.status == EvolveStatus::Completed
    }
}

/// Conjugates the sum by one Pauli rotation and truncates at `delta`.
///
/// With `delta = 0` the map is the exact conjugation `U† O U`.
pub fn apply_rotation(sum: &PauliSum, rotation: &PauliRotation, delta: f64) -> Result<PauliSum> {
    if sum.n() != rotation.axis.n() {
        return Err(Error::SiteCountMismatch { left: sum.n(), right: rotation.axis.n() });
    }
    pauli_sum::rotate(
        sum,
        rotation.axis.x_words(),
        rotation.axis.z_words(),
        rotation.axis.phase(),
        math::cos(rotation.angle),
        math::sin(rotation.angle),
        delta,
    )
}

/// Applies every rotation of one step schedule in order, truncating
/// after each.
pub fn apply_step(sum: &PauliSum, schedule: &Schedule, delta: f64) -> Result<PauliSum> {
    let mut current = sum.clone();
    for rotation in &schedule.rotations {
        current = apply_rotation(&current, rotation, delta)?;
    }
    Ok(current)
}

/// One first-order Trotter step of `exp(-i H dt)` conjugation.
pub fn trotter_step(sum: &PauliSum, h: &Hamiltonian, dt: f64, delta: f64) -> Result<PauliSum> {
    apply_step(sum, &Schedule::first_order(h, dt)?, delta)
}

/// Runs `K = t_max / dt` first-order Trotter steps with per-rotation
/// threshold truncation and, when configured, X-weight truncation every
/// `x_period` steps. The observer runs at the recording stride with
/// read-only access to the evolving operator.
pub fn evolve<F>(
    initial: &PauliSum,
    h: &Hamiltonian,
    config: &EvolutionConfig,
    observer: F,
) -> Result<Trajectory>
where
    F: FnMut(&StepRecord, &PauliSum),
{
    evolve_schedule(initial, &Schedule::first_order(h, config.dt)?, config, observer)
}

/// [`evolve`] with an explicit step schedule.
pub fn evolve_schedule<F>(
    initial: &PauliSum,
    schedule: &Schedule,
    config: &EvolutionConfig,
    observer: F,
) -> Result<Trajectory>
where
    F: FnMut(&StepRecord, &PauliSum),
{
    evolve_schedule_from(initial, schedule, config, 0, observer)
}

/// Continues an evolution whose operator has already advanced to
/// `start_step` (used by checkpoint resume). The `t = start_step · dt`
/// record is emitted only when starting from step 0.
pub fn evolve_schedule_from<F>(
    initial: &PauliSum,
    schedule: &Schedule,
    config: &EvolutionConfig,
    start_step: usize,
    mut observer: F,
) -> Result<Trajectory>
where
    F: FnMut(&StepRecord, &PauliSum),
{
    config.validate()?;
    if initial.n() != schedule.n() {
        return Err(Error::SiteCountMismatch { left: initial.n(), right: schedule.n() });
    }
    let total_steps = config.steps()?;
    if start_step > total_steps {
        return Err(Error::InvalidArgument("start step beyond configured step count"));
    }

    let mut sum = initial.clone().with_term_limit(config.max_terms);
    let mut records = Vec::new();
    let record = |step: usize, sum: &PauliSum, records: &mut Vec<StepRecord>, obs: &mut F| {
        let rec = StepRecord {
            step,
            time: step as f64 * config.dt,
            n_terms: sum.len(),
            n_ztype: sum.count_ztype(),
        };
        records.push(rec);
        obs(&rec, sum);
    };

    if start_step == 0 {
        record(0, &sum, &mut records, &mut observer);
    }

    for step in start_step + 1..=total_steps {
        for rotation in &schedule.rotations {
            match apply_rotation(&sum, rotation, config.delta) {
                Ok(next) => sum = next,
                Err(error @ Error::TermLimit { .. }) => {
                    return Ok(Trajectory {
                        records,
                        sum,
                        status: EvolveStatus::TermLimit { step, error },
                    });
                }
                Err(other) => return Err(other),
            }
        }
        if let Some(m) = config.x_cutoff {
            if step % config.x_period == 0 {
                sum = sum.truncate_xweight(m);
            }
        }
        if step % config.record_every == 0 || step == total_steps {
            record(step, &sum, &mut records, &mut observer);
        }
    }

    Ok(Trajectory { records, sum, status: EvolveStatus::Completed })
}
