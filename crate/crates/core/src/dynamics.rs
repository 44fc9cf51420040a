//! Homothetic motion generated by a certified configuration.
//!
//! A configuration with `A_k = -c_k` at unit scale moves as `Q_k(t) = r(t) c_k`
//! where `r'' = -1/r^2`. Starting from rest this is a homothetic collapse that
//! reaches total collision at `t_c = pi / (2 sqrt 2)` (for `r(0) = 1`). Both
//! certified mass vectors must produce the same motion.
//!
//! Integration uses the Dormand-Prince 5(4) pair with its 4th-order
//! continuous extension, so runs with different step sequences can be
//! compared on a shared output grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_points, mass_vector, SymmetricConfig, Vec3};
use crate::masses::Certificate;
use crate::summation::{CompensatedSum, CompensatedSum3};
use crate::verify::accelerations_into;

/// Fraction of the collapse time over which the homothetic witness is judged.
pub const WITNESS_FRACTION: f64 = 0.9;

/// Free-fall time to collision of `r'' = -1/r^2` from rest at `r0`.
pub fn collapse_time(r0: f64) -> f64 {
    PI / (2.0 * 2f64.sqrt()) * r0.powf(1.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_end: f64,
    pub max_step: f64,
    /// Stop once the configuration scale drops to this value.
    pub collision_radius: f64,
    /// Points of the uniform output grid on `[0, t_stop]`.
    pub output_samples: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            t_end: WITNESS_FRACTION * collapse_time(1.0),
            max_step: 0.05,
            collision_radius: 1e-4,
            output_samples: 200,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("t_end", self.t_end),
            ("max_step", self.max_step),
            ("collision_radius", self.collision_radius),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} = {v} must be positive and finite")));
            }
        }
        if self.rel_tol < 1e-14 {
            return Err(Error::Domain(format!("rel_tol = {} is below 1e-14", self.rel_tol)));
        }
        if self.output_samples < 2 {
            return Err(Error::Domain("output_samples must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Reached `t_end`.
    Completed,
    /// Scale fell to `collision_radius`.
    Collision,
    /// Step size underflowed before either of the above; the trajectory is truncated.
    StepUnderflow,
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Debug, Clone)]
struct DenseStep {
    t0: f64,
    h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseStep {
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }
}

/// Continuous solution over `[t_start, t_stop]`.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    dim: usize,
    t_start: f64,
    t_stop: f64,
    y_start: Vec<f64>,
    steps: Vec<DenseStep>,
}

impl DenseSolution {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_stop(&self) -> f64 {
        self.t_stop
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// State at `t`, clamped to the covered interval.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let t = t.clamp(self.t_start, self.t_stop);
        if self.steps.is_empty() || t == self.t_start {
            out.copy_from_slice(&self.y_start);
            return;
        }
        let idx = self.steps.partition_point(|s| s.t0 + s.h < t).min(self.steps.len() - 1);
        self.steps[idx].eval_into(t, out);
    }

    /// End times of the accepted steps, truncated at `t_stop`.
    pub fn step_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(move |s| (s.t0 + s.h).min(self.t_stop))
    }
}

#[derive(Debug, Clone)]
pub struct Integration {
    pub solution: DenseSolution,
    pub stop: StopReason,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], rtol: f64, atol: f64) -> f64 {
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / err.len() as f64).sqrt()
}

/// Adaptive Dormand-Prince integration from `t = 0`.
///
/// `event` is evaluated on each accepted state; when it changes from
/// positive to non-positive the crossing is located on the dense output and
/// integration stops there with [`StopReason::Collision`].
pub fn dopri5<F, G>(
    mut rhs: F,
    y0: &[f64],
    settings: &IntegratorSettings,
    event: G,
) -> Result<Integration>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    G: Fn(&[f64]) -> f64,
{
    settings.validate()?;
    let dim = y0.len();
    let (rtol, atol) = (settings.rel_tol, settings.abs_tol);
    let t_end = settings.t_end;

    let mut solution = DenseSolution {
        dim,
        t_start: 0.0,
        t_stop: 0.0,
        y_start: y0.to_vec(),
        steps: Vec::new(),
    };
    if !(event(y0) > 0.0) {
        return Ok(Integration { solution, stop: StopReason::Collision, accepted_steps: 0, rejected_steps: 0 });
    }

    let mut t = 0.0;
    let mut y = y0.to_vec();
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; dim]);
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    rhs(t, &y, &mut k[0])?;

    // Initial step from the scale of y and y'.
    let d0 = error_norm(&y, &y, &y, rtol, atol);
    let d1 = error_norm(&k[0], &y, &y, rtol, atol);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(settings.max_step).min(t_end);

    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut last_rejected = false;
    let stop = loop {
        if t >= t_end {
            break StopReason::Completed;
        }
        h = h.min(settings.max_step).min(t_end - t);
        if h <= 1e-14 * t.abs().max(1.0) {
            break StopReason::StepUnderflow;
        }

        let mut stage_failed = false;
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                stage[i] = y[i] + h * acc;
            }
            if rhs(t + C[s] * h, &stage, &mut k[s]).is_err() {
                stage_failed = true;
                break;
            }
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }
        if stage_failed {
            rejected += 1;
            last_rejected = true;
            h *= 0.25;
            continue;
        }
        for i in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            err[i] = h * e;
        }
        let err_norm = error_norm(&err, &y, &y_new, rtol, atol);
        if !err_norm.is_finite() {
            rejected += 1;
            last_rejected = true;
            h *= 0.25;
            continue;
        }
        let mut fac = if err_norm == 0.0 { 10.0 } else { 0.9 * err_norm.powf(-0.2) };
        fac = fac.clamp(0.2, 10.0);

        if err_norm > 1.0 {
            rejected += 1;
            last_rejected = true;
            h *= fac.min(1.0);
            continue;
        }

        let mut rcont: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; dim]);
        for i in 0..dim {
            let ydiff = y_new[i] - y[i];
            let bspl = h * k[0][i] - ydiff;
            rcont[0][i] = y[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - h * k[6][i] - bspl;
            let mut d = 0.0;
            for (j, kj) in k.iter().enumerate() {
                d += D[j] * kj[i];
            }
            rcont[4][i] = h * d;
        }
        let step = DenseStep { t0: t, h, rcont };
        accepted += 1;

        if !(event(&y_new) > 0.0) {
            // Bisect the crossing on the interpolant.
            let (mut lo, mut hi) = (t, t + h);
            let mut buf = vec![0.0; dim];
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                step.eval_into(mid, &mut buf);
                if event(&buf) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            solution.steps.push(step);
            solution.t_stop = hi;
            return Ok(Integration { solution, stop: StopReason::Collision, accepted_steps: accepted, rejected_steps: rejected });
        }

        solution.steps.push(step);
        t = if t_end - (t + h) <= 1e-15 * t_end { t_end } else { t + h };
        std::mem::swap(&mut y, &mut y_new);
        k.swap(0, 6);
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h *= fac;
    };
    solution.t_stop = t;
    Ok(Integration { solution, stop, accepted_steps: accepted, rejected_steps: rejected })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarSample {
    pub time: f64,
    pub r: f64,
    pub rdot: f64,
}

#[derive(Debug, Clone)]
pub struct ScalarTrajectory {
    /// State at the start, at each accepted step, and at the stop time.
    pub samples: Vec<ScalarSample>,
    pub stop: StopReason,
    pub t_stop: f64,
    /// `max |E(t) - E(0)|` over `samples`, `E = rdot^2 / 2 - 1 / r`.
    pub max_energy_drift: f64,
    pub integration: Integration,
}

impl ScalarTrajectory {
    pub fn at(&self, t: f64) -> ScalarSample {
        let y = self.integration.solution.eval(t);
        ScalarSample { time: t, r: y[0], rdot: y[1] }
    }
}

fn scalar_energy(r: f64, v: f64) -> f64 {
    0.5 * v * v - 1.0 / r
}

/// Solve `r'' = -1/r^2` from `(r0, v0)`.
pub fn scalar_homographic(r0: f64, v0: f64, settings: &IntegratorSettings) -> Result<ScalarTrajectory> {
    if !(r0.is_finite() && r0 > 0.0) || !v0.is_finite() {
        return Err(Error::Domain(format!("initial radius {r0} must be positive, velocity {v0} finite")));
    }
    let collision_radius = settings.collision_radius;
    let integration = dopri5(
        |_, y, dy| {
            dy[0] = y[1];
            dy[1] = -1.0 / (y[0] * y[0]);
            Ok(())
        },
        &[r0, v0],
        settings,
        |y| y[0] - collision_radius,
    )?;
    let sol = &integration.solution;
    let mut times: Vec<f64> = std::iter::once(0.0).chain(sol.step_times()).collect();
    if times.last() != Some(&sol.t_stop()) {
        times.push(sol.t_stop());
    }
    let samples: Vec<ScalarSample> = times
        .into_iter()
        .map(|t| {
            let y = sol.eval(t);
            ScalarSample { time: t, r: y[0], rdot: y[1] }
        })
        .collect();
    let e0 = scalar_energy(r0, v0);
    let max_energy_drift = samples
        .iter()
        .map(|s| (scalar_energy(s.r, s.rdot) - e0).abs())
        .fold(0.0f64, f64::max);
    Ok(ScalarTrajectory {
        stop: integration.stop,
        t_stop: sol.t_stop(),
        samples,
        max_energy_drift,
        integration,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub time: f64,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    /// Least-squares `s` with `Q_k ~ s c_k`.
    pub scale_estimate: f64,
    /// `max_k |Q_k - s c_k|`.
    pub shape_residual: f64,
}

/// Conservation diagnostics over the output grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conservation {
    pub max_momentum_drift: f64,
    pub max_angular_momentum_drift: f64,
    /// `max |E(t) - E(0)| / |E(0)|`.
    pub max_relative_energy_drift: f64,
}

#[derive(Debug, Clone)]
pub struct NBodyRun {
    pub samples: Vec<TrajectorySample>,
    pub stop: StopReason,
    pub t_stop: f64,
    pub conservation: Conservation,
    pub integration: Integration,
    reference: Vec<Vec3>,
    body_masses: Vec<f64>,
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unpack(y: &[f64], nb: usize) -> (Vec<Vec3>, Vec<Vec3>) {
    let q = (0..nb).map(|k| [y[3 * k], y[3 * k + 1], y[3 * k + 2]]).collect();
    let off = 3 * nb;
    let v = (0..nb).map(|k| [y[off + 3 * k], y[off + 3 * k + 1], y[off + 3 * k + 2]]).collect();
    (q, v)
}

fn scale_estimate(positions: &[Vec3], reference: &[Vec3]) -> f64 {
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for (q, c) in positions.iter().zip(reference) {
        let cc = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
        if cc == 0.0 {
            continue;
        }
        num.add(q[0] * c[0] + q[1] * c[1] + q[2] * c[2]);
        den.add(cc);
    }
    num.value() / den.value()
}

fn scale_from_state(y: &[f64], reference: &[Vec3]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, c) in reference.iter().enumerate() {
        num += y[3 * k] * c[0] + y[3 * k + 1] * c[1] + y[3 * k + 2] * c[2];
        den += c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    }
    num / den
}

impl NBodyRun {
    /// Sample the dense solution at `t`.
    pub fn sample_at(&self, t: f64) -> TrajectorySample {
        let y = self.integration.solution.eval(t);
        let (positions, velocities) = unpack(&y, self.reference.len());
        let s = scale_estimate(&positions, &self.reference);
        let shape_residual = positions
            .iter()
            .zip(&self.reference)
            .map(|(q, c)| {
                let d = [q[0] - s * c[0], q[1] - s * c[1], q[2] - s * c[2]];
                (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
            })
            .fold(0.0f64, f64::max);
        TrajectorySample { time: t, positions, velocities, scale_estimate: s, shape_residual }
    }

    pub fn body_masses(&self) -> &[f64] {
        &self.body_masses
    }

    fn energy(&self, sample: &TrajectorySample) -> f64 {
        let m = &self.body_masses;
        let mut e = CompensatedSum::new();
        for (k, v) in sample.velocities.iter().enumerate() {
            e.add(0.5 * m[k] * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
        }
        let q = &sample.positions;
        for i in 0..q.len() {
            for j in (i + 1)..q.len() {
                let d = [q[i][0] - q[j][0], q[i][1] - q[j][1], q[i][2] - q[j][2]];
                e.add(-m[i] * m[j] / (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt());
            }
        }
        e.value()
    }

    fn momenta(&self, sample: &TrajectorySample) -> (Vec3, Vec3) {
        let mut p = CompensatedSum3::new();
        let mut l = CompensatedSum3::new();
        for ((q, v), &m) in sample.positions.iter().zip(&sample.velocities).zip(&self.body_masses) {
            p.add([m * v[0], m * v[1], m * v[2]]);
            let c = cross(*q, *v);
            l.add([m * c[0], m * c[1], m * c[2]]);
        }
        (p.value(), l.value())
    }
}

/// Uniform grid of `samples` points on `[0, t_stop]`.
pub fn uniform_grid(t_stop: f64, samples: usize) -> Vec<f64> {
    let last = samples.max(2) - 1;
    (0..=last)
        .map(|i| if i == last { t_stop } else { t_stop * i as f64 / last as f64 })
        .collect()
}

/// Integrate the full N-body system with [`crate::verify::accelerations`] as
/// the force evaluator. The initial positions serve as the reference shape
/// for the scale estimate and the collision stop.
pub fn nbody_integrate(
    points0: &[Vec3],
    velocities0: &[Vec3],
    body_masses: &[f64],
    settings: &IntegratorSettings,
) -> Result<NBodyRun> {
    let nb = points0.len();
    if velocities0.len() != nb || body_masses.len() != nb || nb < 2 {
        return Err(Error::Domain("positions, velocities and masses must have equal length >= 2".into()));
    }
    let reference = points0.to_vec();
    if reference.iter().all(|c| c == &[0.0; 3]) {
        return Err(Error::Degenerate("all bodies at the origin"));
    }
    // Rejects initial collisions.
    let mut acc = vec![[0.0; 3]; nb];
    accelerations_into(points0, body_masses, &mut acc)?;

    let mut y0 = Vec::with_capacity(6 * nb);
    y0.extend(points0.iter().flatten());
    y0.extend(velocities0.iter().flatten());

    let mut q = vec![[0.0; 3]; nb];
    let collision_radius = settings.collision_radius;
    let integration = dopri5(
        |_, y, dy| {
            for (k, qk) in q.iter_mut().enumerate() {
                *qk = [y[3 * k], y[3 * k + 1], y[3 * k + 2]];
            }
            accelerations_into(&q, body_masses, &mut acc)?;
            dy[..3 * nb].copy_from_slice(&y[3 * nb..]);
            for (k, a) in acc.iter().enumerate() {
                dy[3 * nb + 3 * k..3 * nb + 3 * k + 3].copy_from_slice(a);
            }
            Ok(())
        },
        &y0,
        settings,
        |y| scale_from_state(y, &reference) - collision_radius,
    )?;

    let t_stop = integration.solution.t_stop();
    let stop = integration.stop;
    let mut run = NBodyRun {
        samples: Vec::new(),
        stop,
        t_stop,
        conservation: Conservation {
            max_momentum_drift: 0.0,
            max_angular_momentum_drift: 0.0,
            max_relative_energy_drift: 0.0,
        },
        integration,
        reference,
        body_masses: body_masses.to_vec(),
    };
    let samples: Vec<TrajectorySample> = uniform_grid(t_stop, settings.output_samples)
        .into_iter()
        .map(|t| run.sample_at(t))
        .collect();

    let e0 = run.energy(&samples[0]);
    let (p0, l0) = run.momenta(&samples[0]);
    let mut cons = run.conservation;
    for s in &samples {
        let (p, l) = run.momenta(s);
        let dp = [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]];
        let dl = [l[0] - l0[0], l[1] - l0[1], l[2] - l0[2]];
        cons.max_momentum_drift = cons.max_momentum_drift.max((dp[0] * dp[0] + dp[1] * dp[1] + dp[2] * dp[2]).sqrt());
        cons.max_angular_momentum_drift =
            cons.max_angular_momentum_drift.max((dl[0] * dl[0] + dl[1] * dl[1] + dl[2] * dl[2]).sqrt());
        let de = ((run.energy(s) - e0) / e0).abs();
        cons.max_relative_energy_drift = cons.max_relative_energy_drift.max(de);
    }
    run.conservation = cons;
    run.samples = samples;
    Ok(run)
}

/// One row of the shared output grid of a [`MotionCheck`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotionRow {
    pub time: f64,
    /// `r(t)` from the scalar equation.
    pub r: f64,
    pub a: TrajectorySample,
    pub b: TrajectorySample,
    /// `max_k |Q^a_k - Q^b_k|`.
    pub deviation: f64,
    /// `max_k |Q_k - r(t) c_k|` over both runs.
    pub homographic_deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotionSummary {
    pub n: usize,
    pub t_end: f64,
    pub t_stop: f64,
    pub collapse_time: f64,
    pub stop_a: StopReason,
    pub stop_b: StopReason,
    pub stop_scalar: StopReason,
    /// The shared grid ends before `t_end`.
    pub truncated: bool,
    pub max_deviation: f64,
    pub max_homographic_deviation: f64,
    /// End of the witness window, `0.9 t_c`.
    pub witness_end: f64,
    /// Deviations restricted to `t <= witness_end`, away from the collision.
    pub witness_max_deviation: f64,
    pub witness_max_homographic_deviation: f64,
    pub max_shape_residual_a: f64,
    pub max_shape_residual_b: f64,
    pub conservation_a: Conservation,
    pub conservation_b: Conservation,
    pub scalar_energy_drift: f64,
}

#[derive(Debug, Clone)]
pub struct MotionCheck {
    pub summary: MotionSummary,
    pub rows: Vec<MotionRow>,
}

/// Evolve the certified configuration from rest under both mass vectors and
/// compare the runs with each other and with `r(t) c_k`.
pub fn perverse_motion_check(cert: &Certificate, settings: &IntegratorSettings) -> Result<MotionCheck> {
    cert.validate()?;
    settings.validate()?;
    let config = SymmetricConfig::new(cert.n, cert.alpha)?;
    let points = build_points(&config);
    let zero = vec![[0.0; 3]; points.len()];
    let masses_a = mass_vector(cert.n, &cert.mass_a);
    let masses_b = mass_vector(cert.n, &cert.mass_b);

    let (run_a, run_b, scalar) = std::thread::scope(|scope| {
        let ha = scope.spawn(|| nbody_integrate(&points, &zero, &masses_a, settings));
        let hb = scope.spawn(|| nbody_integrate(&points, &zero, &masses_b, settings));
        let scalar = scalar_homographic(1.0, 0.0, settings);
        (
            ha.join().expect("integration thread panicked"),
            hb.join().expect("integration thread panicked"),
            scalar,
        )
    });
    let (run_a, run_b, scalar) = (run_a?, run_b?, scalar?);

    let t_stop = run_a.t_stop.min(run_b.t_stop).min(scalar.t_stop);
    let rows: Vec<MotionRow> = uniform_grid(t_stop, settings.output_samples)
        .into_iter()
        .map(|t| {
            let a = run_a.sample_at(t);
            let b = run_b.sample_at(t);
            let r = scalar.at(t).r;
            let dist = |p: &Vec3, q: &Vec3| {
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
            };
            let deviation = a.positions.iter().zip(&b.positions).map(|(p, q)| dist(p, q)).fold(0.0f64, f64::max);
            let homographic_deviation = points
                .iter()
                .zip(a.positions.iter().zip(&b.positions))
                .map(|(c, (p, q))| {
                    let rc = [r * c[0], r * c[1], r * c[2]];
                    dist(p, &rc).max(dist(q, &rc))
                })
                .fold(0.0f64, f64::max);
            MotionRow { time: t, r, a, b, deviation, homographic_deviation }
        })
        .collect();

    let max_of = |f: &dyn Fn(&MotionRow) -> f64| rows.iter().map(f).fold(0.0f64, f64::max);
    let witness_end = WITNESS_FRACTION * collapse_time(1.0);
    let witness_max = |f: &dyn Fn(&MotionRow) -> f64| {
        rows.iter().filter(|r| r.time <= witness_end).map(f).fold(0.0f64, f64::max)
    };
    let summary = MotionSummary {
        n: cert.n,
        t_end: settings.t_end,
        t_stop,
        collapse_time: collapse_time(1.0),
        stop_a: run_a.stop,
        stop_b: run_b.stop,
        stop_scalar: scalar.stop,
        truncated: t_stop < settings.t_end,
        max_deviation: max_of(&|r| r.deviation),
        max_homographic_deviation: max_of(&|r| r.homographic_deviation),
        witness_end,
        witness_max_deviation: witness_max(&|r| r.deviation),
        witness_max_homographic_deviation: witness_max(&|r| r.homographic_deviation),
        max_shape_residual_a: max_of(&|r| r.a.shape_residual),
        max_shape_residual_b: max_of(&|r| r.b.shape_residual),
        conservation_a: run_a.conservation,
        conservation_b: run_b.conservation,
        scalar_energy_drift: scalar.max_energy_drift,
    };
    Ok(MotionCheck { summary, rows })
}
