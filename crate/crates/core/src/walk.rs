//! Lattice geometry and exact simulators for pairs of simple random walks.
//!
//! Both walkers start at the origin. Discrete-time pairs move both walkers
//! once per step; continuous-time pairs are driven by a single rate-2 event
//! stream in which a fair coin decides which walker jumps.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported lattice dimension.
pub const MAX_DIMENSION: usize = 16;

/// Lattice dimension `d`, validated to `1 ..= MAX_DIMENSION`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_DIMENSION {
            return Err(Error::invalid(format!(
                "dimension must be in 1..={MAX_DIMENSION}, got {d}"
            )));
        }
        Ok(Dimension(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// `d` as a float, for formulas.
    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Number of nearest neighbours, `2d`.
    #[inline]
    pub fn neighbours(self) -> usize {
        2 * self.0
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point of ℤᵈ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    coords: Vec<i64>,
}

impl LatticePoint {
    pub fn origin(d: Dimension) -> Self {
        LatticePoint {
            coords: vec![0; d.get()],
        }
    }

    pub fn from_coords(coords: Vec<i64>) -> Result<Self> {
        Dimension::new(coords.len())?;
        Ok(LatticePoint { coords })
    }

    /// The unit vector `±e_axis`.
    pub fn unit(d: Dimension, axis: usize, positive: bool) -> Result<Self> {
        if axis >= d.get() {
            return Err(Error::invalid(format!("axis {axis} out of range for d={d}")));
        }
        let mut coords = vec![0; d.get()];
        coords[axis] = if positive { 1 } else { -1 };
        Ok(LatticePoint { coords })
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Exactly one nonzero coordinate, equal to ±1.
    pub fn is_unit_step(&self) -> bool {
        let mut nonzero = self.coords.iter().filter(|&&c| c != 0);
        matches!(nonzero.next(), Some(&c) if c.abs() == 1) && nonzero.next().is_none()
    }

    /// `self - other`, coordinate-wise.
    pub fn difference(&self, other: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.dim(), other.dim());
        LatticePoint {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        }
    }

    /// L1 norm.
    pub fn l1(&self) -> u64 {
        self.coords.iter().map(|c| c.unsigned_abs()).sum()
    }
}

/// A unit step `±e_axis`, encoded compactly for the simulation loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitStep {
    pub axis: usize,
    pub positive: bool,
}

impl UnitStep {
    /// Decodes an index in `0..2d`: axis `i >> 1`, even indices positive.
    #[inline]
    fn from_index(i: usize) -> Self {
        UnitStep {
            axis: i >> 1,
            positive: i & 1 == 0,
        }
    }

    #[inline]
    pub fn delta(self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }

    pub fn to_point(self, d: Dimension) -> LatticePoint {
        let mut coords = vec![0; d.get()];
        coords[self.axis] = self.delta();
        LatticePoint { coords }
    }
}

/// Identifies one reproducible random stream: a master seed plus a stream
/// index. Streams with distinct indices under the same master seed are
/// independent ChaCha8 streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_index,
        }
    }

    /// The seed for trial `index` under the same master seed.
    pub fn trial(self, index: u64) -> Self {
        SeedSpec {
            stream_index: index,
            ..self
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

#[inline]
fn draw_step<R: Rng + ?Sized>(d: Dimension, rng: &mut R) -> UnitStep {
    UnitStep::from_index(rng.random_range(0..d.neighbours()))
}

/// One of the `2d` unit vectors `±eᵢ`, uniformly.
pub fn uniform_step<R: Rng + ?Sized>(d: Dimension, rng: &mut R) -> LatticePoint {
    draw_step(d, rng).to_point(d)
}

/// Moves `point` by `step` and keeps `mismatched` equal to the number of
/// coordinates where `point` and `other` differ.
#[inline]
fn apply_step(point: &mut [i64], other: &[i64], step: UnitStep, mismatched: &mut usize) {
    let a = step.axis;
    let was_equal = point[a] == other[a];
    point[a] += step.delta();
    if was_equal {
        *mismatched += 1;
    } else if point[a] == other[a] {
        *mismatched -= 1;
    }
}

/// Which simulator produced a [`CollisionRecord`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Discrete,
    Continuous,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(Mode::Discrete),
            "continuous" => Ok(Mode::Continuous),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

/// Collision bookkeeping for one simulated pair.
///
/// Continuous mode: `component_count` is the number of maximal intervals of
/// `{t ≤ horizon : X(t) = Y(t)}` and `occupation_time` their total length;
/// `discrete_count` counts the embedded jump epochs (including time 0) at
/// which the walkers coincide, which is the same number.
///
/// Discrete mode: `discrete_count` is `#{0 ≤ n ≤ horizon : Xₙ = Yₙ}`,
/// `component_count` the number of maximal runs of consecutive collision
/// indices, and `occupation_time` the number of steps `n < horizon` spent
/// together (each a unit interval of the piecewise-constant path).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionRecord {
    pub mode: Mode,
    pub discrete_count: u64,
    pub component_count: u64,
    pub occupation_time: f64,
    pub horizon: f64,
    /// Whether the walkers sit on the same site at the horizon.
    pub ended_together: bool,
}

/// Positions of a discrete-time pair after `n` steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscretePairState {
    pub n: u64,
    pub x: LatticePoint,
    pub y: LatticePoint,
    mismatched: usize,
}

impl DiscretePairState {
    pub fn new(d: Dimension) -> Self {
        DiscretePairState {
            n: 0,
            x: LatticePoint::origin(d),
            y: LatticePoint::origin(d),
            mismatched: 0,
        }
    }

    #[inline]
    pub fn together(&self) -> bool {
        self.mismatched == 0
    }

    /// `Xₙ − Yₙ`.
    pub fn difference(&self) -> LatticePoint {
        self.x.difference(&self.y)
    }

    /// Both walkers take one independent uniform step, drawn as a single
    /// index in `0..(2d)²`.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&mut self, d: Dimension, rng: &mut R) {
        let k = d.neighbours();
        let r = rng.random_range(0..k * k);
        let sx = UnitStep::from_index(r / k);
        let sy = UnitStep::from_index(r % k);
        apply_step(&mut self.x.coords, &self.y.coords, sx, &mut self.mismatched);
        apply_step(&mut self.y.coords, &self.x.coords, sy, &mut self.mismatched);
        self.n += 1;
    }
}

/// Runs a discrete pair for `n_steps` and returns the final state.
pub fn discrete_pair_final_state(d: Dimension, n_steps: u64, seed: SeedSpec) -> DiscretePairState {
    let mut rng = seed.rng();
    let mut state = DiscretePairState::new(d);
    for _ in 0..n_steps {
        state.step(d, &mut rng);
    }
    state
}

/// Simulates two independent discrete-time walks from the origin for
/// `n_steps` steps, counting the indices `0 ≤ n ≤ n_steps` with `Xₙ = Yₙ`.
pub fn simulate_discrete_pair(d: Dimension, n_steps: u64, seed: SeedSpec) -> CollisionRecord {
    let mut rng = seed.rng();
    let mut state = DiscretePairState::new(d);
    let mut count = 1u64;
    let mut runs = 1u64;
    let mut occupation = 0u64;
    for _ in 0..n_steps {
        let was_together = state.together();
        if was_together {
            occupation += 1;
        }
        state.step(d, &mut rng);
        if state.together() {
            count += 1;
            if !was_together {
                runs += 1;
            }
        }
    }
    CollisionRecord {
        mode: Mode::Discrete,
        discrete_count: count,
        component_count: runs,
        occupation_time: occupation as f64,
        horizon: n_steps as f64,
        ended_together: state.together(),
    }
}

/// Positions of a continuous-time pair at time `t`, with the next jump
/// already scheduled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousPairState {
    pub t: f64,
    pub x: LatticePoint,
    pub y: LatticePoint,
    pub next_event: f64,
    mismatched: usize,
}

/// Which walker moved at a jump epoch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Walker {
    X,
    Y,
}

impl ContinuousPairState {
    /// Both walkers at the origin at time 0; draws the first holding time.
    pub fn new<R: Rng + ?Sized>(d: Dimension, rng: &mut R) -> Self {
        ContinuousPairState {
            t: 0.0,
            x: LatticePoint::origin(d),
            y: LatticePoint::origin(d),
            next_event: holding_time(rng),
            mismatched: 0,
        }
    }

    #[inline]
    pub fn together(&self) -> bool {
        self.mismatched == 0
    }

    /// Advances to the scheduled epoch, applies the jump, and schedules the
    /// next one. Returns who moved and how.
    #[inline]
    pub fn jump<R: Rng + ?Sized>(&mut self, d: Dimension, rng: &mut R) -> (Walker, UnitStep) {
        let k = d.neighbours();
        let r = rng.random_range(0..2 * k);
        let step = UnitStep::from_index(r % k);
        let walker = if r < k {
            apply_step(&mut self.x.coords, &self.y.coords, step, &mut self.mismatched);
            Walker::X
        } else {
            apply_step(&mut self.y.coords, &self.x.coords, step, &mut self.mismatched);
            Walker::Y
        };
        self.t = self.next_event;
        self.next_event = self.t + holding_time(rng);
        (walker, step)
    }
}

/// Holding time of the superposed rate-2 stream.
#[inline]
fn holding_time<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    // Exp1 can return exactly 0; keep epochs strictly increasing.
    0.5 * if e > 0.0 { e } else { f64::MIN_POSITIVE }
}

/// One entry of the optional event log: positions right after the jump at `time`
/// (the first entry is the initial state at time 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEvent {
    pub time: f64,
    pub x: LatticePoint,
    pub y: LatticePoint,
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !horizon.is_finite() || horizon < 0.0 {
        return Err(Error::invalid(format!(
            "horizon must be finite and nonnegative, got {horizon}"
        )));
    }
    Ok(())
}

fn run_continuous<F>(d: Dimension, horizon: f64, seed: SeedSpec, mut on_event: F) -> CollisionRecord
where
    F: FnMut(&ContinuousPairState),
{
    let mut rng = seed.rng();
    let mut state = ContinuousPairState::new(d, &mut rng);
    on_event(&state);
    let mut components = 1u64;
    let mut occupation = 0.0;
    while state.next_event <= horizon {
        if state.together() {
            occupation += state.next_event - state.t;
        }
        state.jump(d, &mut rng);
        on_event(&state);
        if state.together() {
            components += 1;
        }
    }
    if state.together() {
        occupation += horizon - state.t;
    }
    CollisionRecord {
        mode: Mode::Continuous,
        discrete_count: components,
        component_count: components,
        occupation_time: occupation,
        horizon,
        ended_together: state.together(),
    }
}

/// [`simulate_continuous_pair`] for callers that already validated `horizon`.
pub(crate) fn run_continuous_unchecked(d: Dimension, horizon: f64, seed: SeedSpec) -> CollisionRecord {
    run_continuous(d, horizon, seed, |_| {})
}

/// Simulates two independent continuous-time walks (each jumping at rate 1)
/// from the origin up to `horizon`.
pub fn simulate_continuous_pair(d: Dimension, horizon: f64, seed: SeedSpec) -> Result<CollisionRecord> {
    check_horizon(horizon)?;
    Ok(run_continuous(d, horizon, seed, |_| {}))
}

/// Same as [`simulate_continuous_pair`] but also returns every state visited.
/// Intended for invariant checks; production paths never store trajectories.
pub fn simulate_continuous_pair_logged(
    d: Dimension,
    horizon: f64,
    seed: SeedSpec,
) -> Result<(CollisionRecord, Vec<PairEvent>)> {
    check_horizon(horizon)?;
    let mut log = Vec::new();
    let record = run_continuous(d, horizon, seed, |s| {
        log.push(PairEvent {
            time: s.t,
            x: s.x.clone(),
            y: s.y.clone(),
        })
    });
    Ok((record, log))
}

/// Maximal intervals of `{t ∈ [0, horizon] : X(t) = Y(t)}` recovered
/// directly from an event log by comparing full positions.
pub fn collision_intervals(log: &[PairEvent], horizon: f64) -> Vec<(f64, f64)> {
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for (i, ev) in log.iter().enumerate() {
        if ev.x != ev.y {
            continue;
        }
        let end = log.get(i + 1).map_or(horizon, |next| next.time.min(horizon));
        match intervals.last_mut() {
            Some(last) if last.1 == ev.time => last.1 = end,
            _ => intervals.push((ev.time, end)),
        }
    }
    intervals
}

/// Simulates the embedded jump chain `Sₖ` of the difference process (a simple
/// random walk) and counts `#{0 ≤ k ≤ n_jumps : Sₖ = 0}`.
pub fn embedded_difference_walk(d: Dimension, n_jumps: u64, seed: SeedSpec) -> u64 {
    let mut visits = 0;
    embedded_walk(d, n_jumps, seed, |_| visits += 1);
    visits
}

/// The indices `k ≤ n_jumps` at which the embedded chain sits at the origin.
pub fn embedded_return_epochs(d: Dimension, n_jumps: u64, seed: SeedSpec) -> Vec<u64> {
    let mut epochs = Vec::new();
    embedded_walk(d, n_jumps, seed, |k| epochs.push(k));
    epochs
}

fn embedded_walk<F: FnMut(u64)>(d: Dimension, n_jumps: u64, seed: SeedSpec, mut on_return: F) {
    let mut rng = seed.rng();
    let mut pos = vec![0i64; d.get()];
    let mut nonzero = 0usize;
    on_return(0);
    for k in 1..=n_jumps {
        let step = draw_step(d, &mut rng);
        let c = &mut pos[step.axis];
        let was_zero = *c == 0;
        *c += step.delta();
        if was_zero {
            nonzero += 1;
        } else if *c == 0 {
            nonzero -= 1;
        }
        if nonzero == 0 {
            on_return(k);
        }
    }
}

/// Per-coordinate jump counts `N_j(horizon)` of the difference process, read
/// off the same superposed event stream as [`simulate_continuous_pair`].
pub fn coordinate_jump_counts(d: Dimension, horizon: f64, seed: SeedSpec) -> Result<Vec<u64>> {
    check_horizon(horizon)?;
    let mut rng = seed.rng();
    let mut state = ContinuousPairState::new(d, &mut rng);
    let mut counts = vec![0u64; d.get()];
    while state.next_event <= horizon {
        let (_, step) = state.jump(d, &mut rng);
        counts[step.axis] += 1;
    }
    Ok(counts)
}
