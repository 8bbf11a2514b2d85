//! Chordal SLE in the upper half-plane.
//!
//! The driving function is piecewise constant: on `[t_k, t_{k+1}]` it equals
//! `W_{k+1}`, and the Loewner flow over that step is the vertical-slit map
//! `h(z) = W + √((z − W)² + 4Δt)`. The uniformizing map at `t_n` is
//! `h_{n−1} ∘ … ∘ h_0`; trace points are slit tips pulled back through the
//! earlier steps.

use std::io::Write;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::conformal::MarkedDomain;
use crate::error::{Error, Result};
use crate::rng::{chacha, derive_seed, stream_id};

pub const KAPPA: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivingFunction {
    pub dt: f64,
    /// `W_0 = 0, W_1, …, W_N` on the grid `t_k = k·dt`.
    pub samples: Vec<f64>,
    pub seed: Option<u64>,
}

impl DrivingFunction {
    pub fn from_samples(dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("time step {dt}")));
        }
        if samples.len() < 2 || samples[0] != 0.0 {
            return Err(Error::InvalidInput("driving samples must start at 0 and have a step".into()));
        }
        if samples.iter().any(|w| !w.is_finite()) {
            return Err(Error::NumericOverflow);
        }
        Ok(Self { dt, samples, seed: None })
    }

    pub fn zero(dt: f64, steps: usize) -> Result<Self> {
        Self::from_samples(dt, vec![0.0; steps + 1])
    }

    pub fn steps(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    /// `λ⁻¹ W(λ² t)`: the driving function of the trace scaled by `λ⁻¹`.
    pub fn rescaled(&self, lambda: f64) -> Self {
        Self {
            dt: self.dt / (lambda * lambda),
            samples: self.samples.iter().map(|w| w / lambda).collect(),
            seed: self.seed,
        }
    }
}

/// `√κ` times a Brownian motion sampled every `dt` up to `t_max`.
pub fn sample_driving_kappa(dt: f64, t_max: f64, kappa: f64, seed: u64) -> Result<DrivingFunction> {
    if !(dt > 0.0 && t_max >= dt && kappa >= 0.0) {
        return Err(Error::InvalidInput(format!("driving needs dt > 0 and T ≥ dt, got {dt}, {t_max}")));
    }
    let n = ((t_max / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let sd = (kappa * dt).sqrt();
    let mut rng = chacha(seed);
    let mut samples = Vec::with_capacity(n + 1);
    let mut w = 0.0;
    samples.push(w);
    for _ in 0..n {
        let g: f64 = StandardNormal.sample(&mut rng);
        w += sd * g;
        samples.push(w);
    }
    Ok(DrivingFunction { dt, samples, seed: Some(seed) })
}

pub fn sample_driving(dt: f64, t_max: f64, seed: u64) -> Result<DrivingFunction> {
    sample_driving_kappa(dt, t_max, KAPPA, seed)
}

/// One constant-driving step: duration and driving value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slit {
    pub dt: f64,
    pub w: f64,
}

fn upper(r: Complex64, sign_hint: f64) -> Complex64 {
    if r.im < 0.0 || (r.im == 0.0 && r.re * sign_hint < 0.0) {
        -r
    } else {
        Complex64::new(r.re, r.im.abs())
    }
}

impl Slit {
    /// `h(z) = W + √((z − W)² + 4Δt)` on the closed half-plane.
    #[inline]
    pub fn forward(self, z: Complex64) -> Complex64 {
        let u = z - self.w;
        self.w + upper((u * u + 4.0 * self.dt).sqrt(), u.re)
    }

    /// `h⁻¹(w) = W + √((w − W)² − 4Δt)`, landing in the closed half-plane.
    #[inline]
    pub fn inverse(self, w: Complex64) -> Complex64 {
        let u = w - self.w;
        let c = 2.0 * self.dt.sqrt();
        // product form keeps the branch continuous across the slit image
        let r = (u - c).sqrt() * (u + c).sqrt();
        self.w + upper(r, u.re)
    }

    #[inline]
    fn forward_real(self, x: f64) -> f64 {
        let u = x - self.w;
        self.w + u.signum() * (u * u + 4.0 * self.dt).sqrt()
    }

    #[inline]
    fn inverse_real(self, x: f64) -> f64 {
        let u = x - self.w;
        self.w + u.signum() * (u * u - 4.0 * self.dt).max(0.0).sqrt()
    }

    /// Tip of the slit after `σ ≤ Δt`.
    #[inline]
    pub fn tip(self, sigma: f64) -> Complex64 {
        Complex64::new(self.w, 2.0 * sigma.max(0.0).sqrt())
    }
}

/// A discretized Loewner chain with its trace at the grid times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoewnerState {
    slits: Vec<Slit>,
    times: Vec<f64>,
    trace: Vec<Complex64>,
}

impl Default for LoewnerState {
    fn default() -> Self {
        Self { slits: Vec::new(), times: vec![0.0], trace: vec![Complex64::new(0.0, 0.0)] }
    }
}

impl LoewnerState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_slits(slits: &[Slit]) -> Result<Self> {
        let mut s = Self::new();
        for &sl in slits {
            s.push(sl)?;
        }
        Ok(s)
    }

    /// Appends a step and records the new tip; `O(steps)`.
    pub fn push(&mut self, slit: Slit) -> Result<()> {
        if !(slit.dt >= 0.0 && slit.dt.is_finite() && slit.w.is_finite()) {
            return Err(Error::NumericOverflow);
        }
        let tip = self.preimage(self.slits.len(), slit.tip(slit.dt));
        if !(tip.re.is_finite() && tip.im.is_finite()) {
            return Err(Error::NumericOverflow);
        }
        self.slits.push(slit);
        self.times.push(self.capacity_time() + slit.dt);
        self.trace.push(tip);
        Ok(())
    }

    pub fn slits(&self) -> &[Slit] {
        &self.slits
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn trace(&self) -> &[Complex64] {
        &self.trace
    }

    pub fn tip(&self) -> Complex64 {
        *self.trace.last().expect("trace starts at 0")
    }

    pub fn capacity_time(&self) -> f64 {
        *self.times.last().expect("times start at 0")
    }

    /// Driving value at the end of step `k − 1` (0 for `k = 0`).
    pub fn driving_before(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.slits[k - 1].w
        }
    }

    /// `h_0⁻¹ ∘ … ∘ h_{k−1}⁻¹ (w)`.
    pub fn preimage(&self, k: usize, w: Complex64) -> Complex64 {
        self.slits[..k].iter().rev().fold(w, |z, s| s.inverse(z))
    }

    /// The uniformizing map `g_t` at the final time.
    pub fn uniformize(&self, z: Complex64) -> Complex64 {
        self.slits.iter().fold(z, |z, s| s.forward(z))
    }

    /// Trace point at time `t_k + σ`.
    pub fn point_at(&self, k: usize, sigma: f64) -> Complex64 {
        self.preimage(k, self.slits[k].tip(sigma))
    }

    /// Splits step `k` at `σ` into two steps with the same driving value;
    /// the chain is unchanged since equal-driving slits compose additively.
    pub fn split_step(&mut self, k: usize, sigma: f64) {
        let s = self.slits[k];
        if sigma <= 0.0 || sigma >= s.dt {
            return;
        }
        self.slits[k] = Slit { dt: sigma, w: s.w };
        self.slits.insert(k + 1, Slit { dt: s.dt - sigma, w: s.w });
        let t = self.times[k] + sigma;
        self.times.insert(k + 1, t);
        let p = self.preimage(k, Complex64::new(s.w, 2.0 * sigma.sqrt()));
        self.trace.insert(k + 1, p);
    }

    /// Trace points up to and including time `t`.
    pub fn trace_until(&self, t: f64) -> Vec<Complex64> {
        let n = self.times.partition_point(|&s| s <= t * (1.0 + 1e-14));
        self.trace[..n.max(1)].to_vec()
    }

    /// The `1/z` coefficient of `g_t(z) − z`, from the mean of
    /// `Re((g(z) − z)·z)` over midpoints of a large upper semicircle.
    pub fn capacity_coefficient(&self) -> f64 {
        let reach = self.trace.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let drive = self.slits.iter().map(|s| s.w.abs()).fold(0.0, f64::max);
        let radius = 10.0 * (reach + drive + 1.0);
        let m = 256;
        let mut acc = 0.0;
        for j in 0..m {
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
            let z0 = Complex64::from_polar(radius, theta);
            // accumulate the displacement step by step to avoid cancellation
            let mut z = z0;
            let mut disp = Complex64::new(0.0, 0.0);
            for s in &self.slits {
                let u = z - s.w;
                let r = upper((u * u + 4.0 * s.dt).sqrt(), u.re);
                let d = 4.0 * s.dt / (r + u);
                disp += d;
                z += d;
            }
            acc += (disp * z0).re;
        }
        acc / m as f64
    }

    /// Rows `(t, Re γ, Im γ)`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "re", "im"])?;
        for (t, z) in self.times.iter().zip(&self.trace) {
            w.serialize((t, z.re, z.im))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the chain of `w`; step `k` uses the driving value `W_{k+1}`.
pub fn loewner_trace(w: &DrivingFunction) -> Result<LoewnerState> {
    let mut s = LoewnerState::new();
    for k in 0..w.steps() {
        s.push(Slit { dt: w.dt, w: w.samples[k + 1] })?;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullSnapshot {
    /// Stopping index `j`, counted from 1.
    pub j: usize,
    /// Step of the chain in which the exit happened.
    pub step: usize,
    pub time: f64,
    pub driving: f64,
    pub tip: Complex64,
    pub tau: f64,
}

/// Exit of a chain from the half-disc of radius `eps`, in chain coordinates.
#[derive(Debug, Clone, Copy)]
struct Exit {
    step: usize,
    sigma: f64,
    point: Complex64,
}

const INITIAL_PIECE_SAMPLES: usize = 16;
const MAX_PIECE_SAMPLES: usize = 1 << 16;
/// A driving jump can restart the curve outside the half-disc. The exit is
/// then placed a sliver `JUMP_SLIVER·dt` into the step so that the jump is
/// kept in the chain.
const JUMP_SLIVER: f64 = 1e-12;

/// Scans the curve pieces of `slits`, shifted by `−shift`, for the first
/// point outside the closed half-disc of radius `eps`. Each piece is
/// subdivided until consecutive points move less than `eps/20`, or until
/// the gap cannot be split in floating point; the crossing itself is
/// located by bisection inside the step.
fn scan_exit(slits: &[Slit], shift: f64, eps: f64) -> Result<Option<Exit>> {
    let local: Vec<Slit> = slits.iter().map(|s| Slit { dt: s.dt, w: s.w - shift }).collect();
    let pull = |k: usize, w: Complex64| local[..k].iter().rev().fold(w, |z, s| s.inverse(z));
    for (k, s) in local.iter().enumerate() {
        if 2.0 * s.dt.sqrt() > 0.5 * eps {
            return Err(Error::ResolutionTooCoarse(format!(
                "step {} is too long for ε = {eps}",
                s.dt
            )));
        }
        let piece = |sigma: f64| pull(k, s.tip(sigma));
        let base = piece(0.0);
        if base.norm() > eps {
            let sigma = JUMP_SLIVER * s.dt;
            return Ok(Some(Exit { step: k, sigma, point: piece(sigma) }));
        }
        let step = eps / 20.0;
        // pending right endpoints, nearest on top; refined left to right
        let mut pending: Vec<(f64, Complex64)> = (1..=INITIAL_PIECE_SAMPLES)
            .rev()
            .map(|i| {
                let sigma = s.dt * (i as f64 / INITIAL_PIECE_SAMPLES as f64).powi(2);
                (sigma, piece(sigma))
            })
            .collect();
        let mut cur = (0.0, base);
        let mut evaluations = pending.len();
        while let Some(&next) = pending.last() {
            // near σ = 0 the piece can behave like a small power of σ
            let mid = if cur.0 == 0.0 { 0.25 * next.0 } else { 0.5 * (cur.0 + next.0) };
            let splittable = mid > cur.0 && mid < next.0;
            if (next.1 - cur.1).norm() >= step && splittable {
                evaluations += 1;
                if evaluations > MAX_PIECE_SAMPLES {
                    return Err(Error::ResolutionTooCoarse(format!("curve piece at step {k} cannot be resolved")));
                }
                pending.push((mid, piece(mid)));
                continue;
            }
            pending.pop();
            if next.1.norm() > eps {
                let (mut lo, mut hi) = (cur.0, next.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if piece(mid).norm() > eps {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok(Some(Exit { step: k, sigma: hi, point: piece(hi) }));
            }
            cur = next;
        }
    }
    Ok(None)
}

/// First exit after grid index `from` of the recentred trace from the
/// half-disc of radius `eps`. The ongoing trace after `t_from`, mapped by
/// `g_{t_from} − W(t_from)`, is the chain of the remaining steps.
pub fn first_exit_semiball(state: &LoewnerState, eps: f64, from: usize) -> Result<Option<HullSnapshot>> {
    exit_after(state, eps, from, state.driving_before(from))
}

fn exit_after(state: &LoewnerState, eps: f64, from: usize, shift: f64) -> Result<Option<HullSnapshot>> {
    if !(eps > 0.0) || from > state.slits.len() {
        return Err(Error::InvalidInput(format!("semi-ball exit with ε = {eps} from step {from}")));
    }
    let Some(e) = scan_exit(&state.slits[from..], shift, eps)? else {
        return Ok(None);
    };
    let step = from + e.step;
    let time = state.times[step] + e.sigma;
    Ok(Some(HullSnapshot {
        j: 0,
        step,
        time,
        driving: state.slits[step].w,
        tip: state.preimage(from, e.point + shift),
        tau: time - state.times[from],
    }))
}

/// Successive semi-ball stopping snapshots of a chain. Steps are split so
/// that every stopping time falls on a step boundary.
pub fn stopping_snapshots(state: &mut LoewnerState, eps: f64) -> Result<Vec<HullSnapshot>> {
    let mut out = Vec::new();
    let (mut from, mut shift) = (0, 0.0);
    while from < state.slits.len() {
        let Some(mut snap) = exit_after(state, eps, from, shift)? else {
            break;
        };
        let sigma = snap.time - state.times[snap.step];
        from = if sigma <= 0.0 {
            snap.step
        } else if sigma >= state.slits[snap.step].dt * (1.0 - 1e-9) {
            snap.step + 1
        } else {
            state.split_step(snap.step, sigma);
            snap.step + 1
        };
        shift = snap.driving;
        snap.j = out.len() + 1;
        out.push(snap);
    }
    Ok(out)
}

/// The polygon `a = 0, γ(T₁), γ(T₂), …` through the stopping tips.
pub fn polygonal_approximation(state: &mut LoewnerState, eps: f64) -> Result<(Vec<Complex64>, Vec<HullSnapshot>)> {
    let snaps = stopping_snapshots(state, eps)?;
    let mut poly = vec![Complex64::new(0.0, 0.0)];
    poly.extend(snaps.iter().map(|s| s.tip));
    Ok((poly, snaps))
}

/// Rows `(j, T_j, W(T_j), Re tip, Im tip)`.
pub fn write_snapshots_csv<W: Write>(snaps: &[HullSnapshot], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["j", "t", "w", "tip_re", "tip_im"])?;
    for s in snaps {
        w.serialize((s.j, s.time, s.driving, s.tip.re, s.tip.im))?;
    }
    w.flush()?;
    Ok(())
}

/// The chain stopped at successive semi-ball exits, each epoch driven by
/// fresh Brownian increments (the strong Markov property of the driving
/// motion at stopping times).
#[derive(Debug, Clone, Serialize)]
pub struct SemiBallWalk {
    pub eps: f64,
    pub dt: f64,
    pub snapshots: Vec<HullSnapshot>,
    /// `W(T_j) − W(T_{j−1})` for each epoch.
    pub increments: Vec<f64>,
    pub state: LoewnerState,
}

/// Runs `epochs` semi-ball epochs with step `dt = ε²/200`.
pub fn semiball_walk(eps: f64, epochs: usize, seed: u64) -> Result<SemiBallWalk> {
    semiball_walk_kappa(eps, epochs, KAPPA, seed)
}

pub fn semiball_walk_kappa(eps: f64, epochs: usize, kappa: f64, seed: u64) -> Result<SemiBallWalk> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("ε = {eps}")));
    }
    let dt = eps * eps / 200.0;
    // hcap of the half-disc bounds every epoch by ε²/2; allow twice that
    let horizon = eps * eps;
    let stream = stream_id("semiball-epoch");
    let mut state = LoewnerState::new();
    let (mut snapshots, mut increments) = (Vec::new(), Vec::new());
    let mut w0 = 0.0;
    for j in 0..epochs {
        let drive = sample_driving_kappa(dt, horizon, kappa, derive_seed(seed, stream, j as u64))?;
        // absolute driving values, so a rescan of the joined chain repeats
        // the same arithmetic
        let slits: Vec<Slit> = (0..drive.steps()).map(|k| Slit { dt, w: drive.samples[k + 1] + w0 }).collect();
        let e = scan_exit(&slits, w0, eps)?.ok_or(Error::StepBudgetExceeded(slits.len()))?;
        let start = state.slits.len();
        let t0 = state.capacity_time();
        for s in &slits[..e.step] {
            state.push(*s)?;
        }
        let last = slits[e.step];
        state.push(Slit { dt: e.sigma, w: last.w })?;
        let tip = state.preimage(start, e.point + w0);
        let tau = state.capacity_time() - t0;
        snapshots.push(HullSnapshot {
            j: j + 1,
            step: state.slits.len() - 1,
            time: state.capacity_time(),
            driving: last.w,
            tip,
            tau,
        });
        increments.push(last.w - w0);
        w0 = last.w;
    }
    Ok(SemiBallWalk { eps, dt, snapshots, increments, state })
}

/// Step size of the hitting simulation relative to `Y_c·|Y_d|`, where
/// `Y = g_t(x) − W_t` for the two marked points.
pub const HITTING_DT_FACTOR: f64 = 5e-3;
/// Step size relative to the squared distance to the nearer marked point.
/// Coarser steps overshoot the point about to be swallowed and bias the
/// hit toward it.
pub const HITTING_LOCAL_FACTOR: f64 = 1e-4;
/// Once one marked point is this much closer to the tip than the other,
/// the remaining excursion is drawn from its exact scaling law.
pub const HITTING_TERMINAL_RATIO: f64 = 1e-6;
const HITTING_MAX_STEPS: usize = 20_000_000;

/// Hit point on the real line of chordal SLE from 0 to ∞ on first reaching
/// `(−∞, d] ∪ [c, ∞)`, with `d < 0 < c`. The time step follows the current
/// scale `Y_c·|Y_d|`, so a curve that wanders far before hitting costs
/// only logarithmically many steps.
pub fn halfplane_hit(c: f64, d: f64, kappa: f64, seed: u64) -> Result<f64> {
    halfplane_hit_with(c, d, kappa, HITTING_DT_FACTOR, HITTING_LOCAL_FACTOR, seed)
}

pub fn halfplane_hit_with(c: f64, d: f64, kappa: f64, factor: f64, local: f64, seed: u64) -> Result<f64> {
    if !(d < 0.0 && c > 0.0 && c.is_finite() && d.is_finite()) {
        return Err(Error::InvalidMarks(format!("hitting needs d < 0 < c, got {d}, {c}")));
    }
    let mut rng = chacha(seed);
    let mut slits: Vec<Slit> = Vec::new();
    let (mut yc, mut yd, mut w) = (c, d, 0.0);
    loop {
        let (pc, pd) = (yc - w, w - yd);
        let rho = HITTING_TERMINAL_RATIO;
        if pc < rho * pd || pd < rho * pc {
            // far point effectively at infinity: the hit lies at distance
            // r·near beyond the near point with P(r > s) = Φ(1/s)
            let near = pc.min(pd);
            let u: f64 = rand::Rng::random(&mut rng);
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if crate::cardy::cardy_phi(mid) < u { lo = mid } else { hi = mid }
            }
            let r = 1.0 / (0.5 * (lo + hi));
            let target = if pc < pd { w + r * near } else { w - r * near };
            return Ok(slits.iter().rev().fold(target, |z, s| s.inverse_real(z)));
        }
        let dt = (factor * pc * pd).min(local * pc * pc).min(local * pd * pd);
        let g: f64 = StandardNormal.sample(&mut rng);
        w += (kappa * dt).sqrt() * g;
        if w >= yc || w <= yd {
            // the next slit grows from a real point beyond the swallowed mark
            return Ok(slits.iter().rev().fold(w, |z, s| s.inverse_real(z)));
        }
        let s = Slit { dt, w };
        yc = s.forward_real(yc);
        yd = s.forward_real(yd);
        slits.push(s);
        if slits.len() > HITTING_MAX_STEPS {
            return Err(Error::StepBudgetExceeded(HITTING_MAX_STEPS));
        }
    }
}

/// SLE₆ hitting position on the arc `cd` of a domain with marks `[a, c, d]`,
/// as an arc-length fraction from `c`. The target is the midpoint of the arc
/// `cd`; by locality the law up to the hit does not depend on it.
pub fn sle_hitting_sample(md: &MarkedDomain, seed: u64) -> Result<f64> {
    if md.marks().len() != 3 {
        return Err(Error::InvalidMarks("SLE hitting needs marks [a, c, d]".into()));
    }
    let b = md.arc_param(1, 2, 0.5);
    let m = md.marks();
    let with_b = md.with_marks(vec![m[0], m[1], b, m[2]])?;
    let chart = with_b.halfplane_chart(0, 2)?;
    let w = with_b.mark_prevertices();
    let real = |p: (f64, f64)| p.0 / p.1;
    let (c, d) = (real(chart.real_of_disc(w[1])), real(chart.real_of_disc(w[3])));
    let x = halfplane_hit(c, d, KAPPA, seed)?;
    let s = md.param_from_disc(chart.disc_of_real(x));
    Ok(md.arc_fraction(1, 2, s))
}
