//! Stationary random wall profiles.
//!
//! A wall profile is a finite cosine sum `h(y) = mean + Σ aₖ·cos(2π fₖ y + θₖ)`
//! held in closed form, so evaluation, translation and differentiation are
//! exact. Three families are provided:
//!
//! * `flat-offset`: `h ≡ amplitude`, the degenerate constant wall used by
//!   baseline oracles (amplitude 0 gives a perfectly flat channel).
//! * `shifted-periodic`: a fixed periodic profile `F` evaluated at a seeded
//!   uniform shift, `h(y) = F(y + s)`; every realization is the same curve
//!   translated, so derived quantities must agree across seeds.
//! * `truncated-fourier`: modes at pairwise irrationally related frequencies
//!   `√pₖ/2` (pₖ prime) with i.i.d. uniform phases; stationary and, thanks to
//!   the incommensurable frequencies, the family used for ergodic-averaging
//!   experiments.
//!
//! Profiles take values strictly inside `(δ, 1−δ)` by construction: the mean
//! is 1/2 and the amplitude budget is capped, never clipped (clipping would
//! distort the statistics of the derivatives). The slope budget
//! `2π Σ aₖ fₖ ≤ K` is likewise enforced at generation time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoughnessKind {
    FlatOffset,
    ShiftedPeriodic,
    TruncatedFourier,
}

impl std::fmt::Display for RoughnessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RoughnessKind::FlatOffset => "flat-offset",
            RoughnessKind::ShiftedPeriodic => "shifted-periodic",
            RoughnessKind::TruncatedFourier => "truncated-fourier",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for RoughnessKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat-offset" => Ok(RoughnessKind::FlatOffset),
            "shifted-periodic" => Ok(RoughnessKind::ShiftedPeriodic),
            "truncated-fourier" => Ok(RoughnessKind::TruncatedFourier),
            other => Err(Error::config(format!(
                "unknown roughness kind '{other}' (expected flat-offset, shifted-periodic or truncated-fourier)"
            ))),
        }
    }
}

/// Parameters of a wall-profile family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoughnessSpec {
    pub kind: RoughnessKind,
    /// Number of cosine modes (ignored by flat-offset).
    pub mode_count: usize,
    /// Total amplitude budget `Σ aₖ`. For flat-offset this is the wall depth.
    pub amplitude: f64,
    /// Margin δ: sampled values stay in (δ, 1−δ).
    pub clamp_margin: f64,
    /// Cap K on the profile slope `sup |h′|`.
    pub lipschitz_cap: f64,
    /// Period T of the underlying curve (shifted-periodic only).
    #[serde(default)]
    pub period_hint: Option<f64>,
}

impl RoughnessSpec {
    pub fn validate(&self) -> Result<()> {
        let d = self.clamp_margin;
        if !(d > 0.0 && d < 0.5) {
            return Err(Error::config(format!(
                "clamp_margin must lie in (0, 0.5), got {d}"
            )));
        }
        if !(self.lipschitz_cap > 0.0) {
            return Err(Error::config(format!(
                "lipschitz_cap must be positive, got {}",
                self.lipschitz_cap
            )));
        }
        if self.amplitude + d >= 1.0 {
            return Err(Error::config(format!(
                "amplitude {} + clamp_margin {} must stay below 1",
                self.amplitude, d
            )));
        }
        match self.kind {
            RoughnessKind::FlatOffset => {
                // The constant wall doubles as the flat diagnostic case, so
                // amplitude 0 (and depths up to 1−δ) are deliberately legal.
                if !(0.0..1.0).contains(&self.amplitude) {
                    return Err(Error::config(format!(
                        "flat-offset depth must lie in [0, 1), got {}",
                        self.amplitude
                    )));
                }
            }
            RoughnessKind::ShiftedPeriodic | RoughnessKind::TruncatedFourier => {
                if self.mode_count == 0 {
                    return Err(Error::config("mode_count must be at least 1"));
                }
                if !(self.amplitude > 0.0 && self.amplitude < 0.5) {
                    return Err(Error::config(format!(
                        "amplitude must lie in (0, 0.5), got {}",
                        self.amplitude
                    )));
                }
                // Profiles oscillate about mean 1/2, so the deviation budget
                // must also fit inside the margin band.
                if self.amplitude + d >= 0.5 {
                    return Err(Error::config(format!(
                        "amplitude {} + clamp_margin {} must stay below 0.5 so values fit in (δ, 1−δ) around the mean 1/2",
                        self.amplitude, d
                    )));
                }
                if self.kind == RoughnessKind::ShiftedPeriodic {
                    match self.period_hint {
                        Some(t) if t > 0.0 => {}
                        _ => {
                            return Err(Error::config(
                                "shifted-periodic requires a positive period_hint",
                            ))
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// One cosine mode `amp·cos(2π freq·y + phase)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Mode {
    pub freq: f64,
    pub amp: f64,
    pub phase: f64,
}

/// Closed-form profile of one wall.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WallProfile {
    pub mean: f64,
    pub modes: Vec<Mode>,
}

impl WallProfile {
    pub fn eval(&self, y: f64) -> f64 {
        let mut h = self.mean;
        for m in &self.modes {
            h += m.amp * (TWO_PI * m.freq * y + m.phase).cos();
        }
        h
    }

    /// Exact derivative dh/dy.
    pub fn eval_deriv(&self, y: f64) -> f64 {
        let mut d = 0.0;
        for m in &self.modes {
            d -= m.amp * TWO_PI * m.freq * (TWO_PI * m.freq * y + m.phase).sin();
        }
        d
    }

    /// Analytic upper bound on `sup |h′|`.
    pub fn slope_bound(&self) -> f64 {
        self.modes.iter().map(|m| m.amp.abs() * TWO_PI * m.freq).sum()
    }

    /// Total deviation budget `Σ |aₖ|`.
    pub fn deviation_bound(&self) -> f64 {
        self.modes.iter().map(|m| m.amp.abs()).sum()
    }

    fn shifted(&self, h: f64) -> WallProfile {
        WallProfile {
            mean: self.mean,
            modes: self
                .modes
                .iter()
                .map(|m| Mode {
                    freq: m.freq,
                    amp: m.amp,
                    phase: m.phase + TWO_PI * m.freq * h,
                })
                .collect(),
        }
    }

    /// Largest frequency present (0 for a constant wall).
    pub fn max_freq(&self) -> f64 {
        self.modes.iter().map(|m| m.freq).fold(0.0, f64::max)
    }
}

/// Bookkeeping attached to a sampled pair.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PairMetadata {
    /// Deviation budget actually realized (≤ requested amplitude when the
    /// Lipschitz cap binds).
    pub effective_amplitude: f64,
    /// Window the frequencies were snapped to, if `periodized` was applied.
    pub periodized_window: Option<f64>,
    /// Relative frequency adjustment of the worst-snapped mode.
    pub max_snap_rel: f64,
}

/// One realization of the two wall processes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryPair {
    pub seed: u64,
    pub spec: RoughnessSpec,
    pub lower: WallProfile,
    pub upper: WallProfile,
    pub metadata: PairMetadata,
}

/// First `n` primes, used for the incommensurable frequency ladder.
fn primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn gen_wall(spec: &RoughnessSpec, rng: &mut ChaCha8Rng) -> WallProfile {
    match spec.kind {
        RoughnessKind::FlatOffset => WallProfile {
            mean: spec.amplitude,
            modes: Vec::new(),
        },
        RoughnessKind::ShiftedPeriodic => {
            let t = spec.period_hint.expect("validated");
            let shift: f64 = rng.gen_range(0.0..t);
            let m = spec.mode_count;
            let norm: f64 = (1..=m).map(|k| 1.0 / (k * k) as f64).sum();
            // h(y) = 1/2 + Σ aₖ sin(2πk(y+s)/T), written in cosine form.
            let modes = (1..=m)
                .map(|k| {
                    let amp = spec.amplitude * (1.0 / (k * k) as f64) / norm;
                    let freq = k as f64 / t;
                    Mode {
                        freq,
                        amp,
                        phase: TWO_PI * freq * shift - std::f64::consts::FRAC_PI_2,
                    }
                })
                .collect();
            WallProfile { mean: 0.5, modes }
        }
        RoughnessKind::TruncatedFourier => {
            let m = spec.mode_count;
            let freqs: Vec<f64> = primes(m).iter().map(|&p| (p as f64).sqrt() / 2.0).collect();
            let phases: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..TWO_PI)).collect();
            let s1: f64 = (1..=m).map(|k| 1.0 / (k * k) as f64).sum();
            let sf: f64 = (1..=m)
                .map(|k| freqs[k - 1] / (k * k) as f64)
                .sum();
            // Scale so both the deviation budget and the slope cap hold.
            let c_amp = spec.amplitude / s1;
            let c_slope = spec.lipschitz_cap / (TWO_PI * sf);
            let c = c_amp.min(c_slope);
            let modes = (1..=m)
                .map(|k| Mode {
                    freq: freqs[k - 1],
                    amp: c / (k * k) as f64,
                    phase: phases[k - 1],
                })
                .collect();
            WallProfile { mean: 0.5, modes }
        }
    }
}

/// Draw one realization of the two wall processes.
///
/// The two walls use independent substreams of one counter-based generator,
/// so the result is a pure function of `(spec, seed)`.
pub fn sample_boundary(spec: &RoughnessSpec, seed: u64) -> Result<BoundaryPair> {
    spec.validate()?;
    if spec.kind == RoughnessKind::ShiftedPeriodic {
        // The curve is fixed by the spec; refuse slopes above the cap instead
        // of silently reshaping the requested profile.
        let t = spec.period_hint.expect("validated");
        let norm: f64 = (1..=spec.mode_count).map(|k| 1.0 / (k * k) as f64).sum();
        let bound: f64 = (1..=spec.mode_count)
            .map(|k| spec.amplitude * (1.0 / (k * k) as f64) / norm * TWO_PI * k as f64 / t)
            .sum();
        if bound > spec.lipschitz_cap {
            return Err(Error::config(format!(
                "shifted-periodic slope bound {bound:.6} exceeds lipschitz_cap {}; raise the cap or lower the amplitude",
                spec.lipschitz_cap
            )));
        }
    }
    let mut rng_l = ChaCha8Rng::seed_from_u64(seed);
    rng_l.set_stream(0);
    let mut rng_u = ChaCha8Rng::seed_from_u64(seed);
    rng_u.set_stream(1);
    let lower = gen_wall(spec, &mut rng_l);
    let upper = gen_wall(spec, &mut rng_u);
    let metadata = PairMetadata {
        effective_amplitude: lower.deviation_bound().max(upper.deviation_bound()),
        periodized_window: None,
        max_snap_rel: 0.0,
    };
    Ok(BoundaryPair {
        seed,
        spec: spec.clone(),
        lower,
        upper,
        metadata,
    })
}

/// Evaluate both wall heights at `y₁` (exact closed form).
pub fn evaluate(b: &BoundaryPair, y1: f64) -> (f64, f64) {
    (b.lower.eval(y1), b.upper.eval(y1))
}

/// Translate the realization: `evaluate(shift(b,h), y) = evaluate(b, y+h)`.
pub fn shift(b: &BoundaryPair, h: f64) -> BoundaryPair {
    BoundaryPair {
        seed: b.seed,
        spec: b.spec.clone(),
        lower: b.lower.shifted(h),
        upper: b.upper.shifted(h),
        metadata: b.metadata.clone(),
    }
}

/// Empirical Lipschitz constant: sup |Δh|/|Δy| over a dense grid on
/// `[0, window]`, maximized over both walls.
pub fn lipschitz_estimate(b: &BoundaryPair, window: f64) -> Result<f64> {
    if !(window > 0.0) {
        return Err(Error::config("lipschitz window must be positive"));
    }
    let fmax = b.lower.max_freq().max(b.upper.max_freq());
    if fmax == 0.0 {
        return Ok(0.0);
    }
    // Resolve the fastest oscillation well; cap the work for huge windows.
    let n = ((window * fmax * 128.0).ceil() as usize).clamp(1024, 1 << 21);
    let dy = window / n as f64;
    let mut sup: f64 = 0.0;
    for wall in [&b.lower, &b.upper] {
        let mut prev = wall.eval(0.0);
        for i in 1..=n {
            let v = wall.eval(i as f64 * dy);
            sup = sup.max((v - prev).abs() / dy);
            prev = v;
        }
    }
    Ok(sup)
}

/// Make both walls exactly periodic over a window of width `window` (in wall
/// coordinates) by snapping every frequency to the nearest positive multiple
/// of `1/window`, merging collided modes, and re-applying the amplitude and
/// slope budgets. Required before meshing a laterally periodic domain.
pub fn periodized(b: &BoundaryPair, window: f64) -> Result<BoundaryPair> {
    if !(window > 0.0) {
        return Err(Error::config("periodization window must be positive"));
    }
    let spec = &b.spec;
    let mut max_snap_rel: f64 = 0.0;
    let snap_wall = |wall: &WallProfile, max_snap: &mut f64| -> Result<WallProfile> {
        if wall.modes.is_empty() {
            return Ok(wall.clone());
        }
        // Snap frequencies, accumulating phasors per resulting frequency so
        // collided modes merge exactly.
        let mut acc: Vec<(f64, f64, f64)> = Vec::new(); // (freq, re, im)
        for m in &wall.modes {
            let k = (m.freq * window).round().max(1.0);
            let f = k / window;
            let rel = ((f - m.freq) / m.freq).abs();
            if rel > 0.25 {
                return Err(Error::config(format!(
                    "window {window} too small to represent mode frequency {}; snapping would shift it by {:.0}%",
                    m.freq,
                    rel * 100.0
                )));
            }
            *max_snap = max_snap.max(rel);
            // a·cos(ωy+θ) as the phasor a·e^{iθ}.
            let (re, im) = (m.amp * m.phase.cos(), m.amp * m.phase.sin());
            match acc.iter_mut().find(|(fr, _, _)| (*fr - f).abs() < 1e-12) {
                Some(slot) => {
                    slot.1 += re;
                    slot.2 += im;
                }
                None => acc.push((f, re, im)),
            }
        }
        let mut modes: Vec<Mode> = acc
            .into_iter()
            .map(|(f, re, im)| Mode {
                freq: f,
                amp: (re * re + im * im).sqrt(),
                phase: im.atan2(re),
            })
            .collect();
        // Re-impose the budgets spoiled by snapping.
        let dev: f64 = modes.iter().map(|m| m.amp).sum();
        let slope: f64 = modes.iter().map(|m| m.amp * TWO_PI * m.freq).sum();
        let dev_budget = match spec.kind {
            RoughnessKind::FlatOffset => f64::INFINITY,
            _ => spec.amplitude.min(0.5 - spec.clamp_margin - 1e-9),
        };
        let mut scale: f64 = 1.0;
        if dev > dev_budget {
            scale = scale.min(dev_budget / dev);
        }
        if slope > spec.lipschitz_cap {
            scale = scale.min(spec.lipschitz_cap / slope);
        }
        if scale < 1.0 {
            for m in &mut modes {
                m.amp *= scale;
            }
        }
        Ok(WallProfile {
            mean: wall.mean,
            modes,
        })
    };
    let lower = snap_wall(&b.lower, &mut max_snap_rel)?;
    let upper = snap_wall(&b.upper, &mut max_snap_rel)?;
    let metadata = PairMetadata {
        effective_amplitude: lower.deviation_bound().max(upper.deviation_bound()),
        periodized_window: Some(window),
        max_snap_rel,
    };
    Ok(BoundaryPair {
        seed: b.seed,
        spec: b.spec.clone(),
        lower,
        upper,
        metadata,
    })
}

/// Check that both walls repeat exactly over `window` (sampled check).
pub fn is_periodic_over(b: &BoundaryPair, window: f64, tol: f64) -> bool {
    for i in 0..64 {
        let y = -0.5 * window + window * (i as f64) / 64.0 + 0.0137;
        let (l0, u0) = evaluate(b, y);
        let (l1, u1) = evaluate(b, y + window);
        if (l0 - l1).abs() > tol || (u0 - u1).abs() > tol {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fourier_spec() -> RoughnessSpec {
        RoughnessSpec {
            kind: RoughnessKind::TruncatedFourier,
            mode_count: 8,
            amplitude: 0.2,
            clamp_margin: 0.1,
            lipschitz_cap: 2.0,
            period_hint: None,
        }
    }

    fn sine_spec() -> RoughnessSpec {
        RoughnessSpec {
            kind: RoughnessKind::ShiftedPeriodic,
            mode_count: 1,
            amplitude: 0.2,
            clamp_margin: 0.1,
            lipschitz_cap: 2.0,
            period_hint: Some(1.0),
        }
    }

    #[test]
    fn flat_offset_is_constant() {
        let spec = RoughnessSpec {
            kind: RoughnessKind::FlatOffset,
            mode_count: 0,
            amplitude: 0.3,
            clamp_margin: 0.1,
            lipschitz_cap: 1.0,
            period_hint: None,
        };
        let b = sample_boundary(&spec, 42).unwrap();
        assert_eq!(evaluate(&b, 7.2), (0.3, 0.3));
        assert_eq!(evaluate(&b, -123.456), (0.3, 0.3));
        assert_eq!(lipschitz_estimate(&b, 10.0).unwrap(), 0.0);
    }

    #[test]
    fn shifted_periodic_is_translated_sine() {
        // h(y) = 0.5 + 0.2 sin(2π(y+s)); at y = -s + 0.25 the value is 0.7.
        let b = sample_boundary(&sine_spec(), 3).unwrap();
        let m = b.lower.modes[0];
        assert_eq!(b.lower.modes.len(), 1);
        assert_abs_diff_eq!(m.amp, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(m.freq, 1.0, epsilon = 1e-15);
        // Recover the shift from the stored phase and check F(shift+0.25)=0.7.
        let s = (m.phase + std::f64::consts::FRAC_PI_2) / TWO_PI;
        let (hl, _) = evaluate(&b, 0.25 - s);
        assert_abs_diff_eq!(hl, 0.7, epsilon = 1e-12);
        // Period 1: evaluations repeat.
        for i in 0..100 {
            let y = i as f64 * 0.173;
            let (a0, b0) = evaluate(&b, y);
            let (a1, b1) = evaluate(&b, y + 1.0);
            assert_abs_diff_eq!(a0, a1, epsilon = 1e-12);
            assert_abs_diff_eq!(b0, b1, epsilon = 1e-12);
        }
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let spec = fourier_spec();
        let b1 = sample_boundary(&spec, 7).unwrap();
        let b2 = sample_boundary(&spec, 7).unwrap();
        let b3 = sample_boundary(&spec, 8).unwrap();
        for (m1, m2) in b1.lower.modes.iter().zip(&b2.lower.modes) {
            assert_eq!(m1.amp.to_bits(), m2.amp.to_bits());
            assert_eq!(m1.phase.to_bits(), m2.phase.to_bits());
            assert_eq!(m1.freq.to_bits(), m2.freq.to_bits());
        }
        assert!(b1
            .lower
            .modes
            .iter()
            .zip(&b3.lower.modes)
            .any(|(m1, m3)| m1.phase != m3.phase));
        // The two walls are independent draws.
        assert!(b1
            .lower
            .modes
            .iter()
            .zip(&b1.upper.modes)
            .any(|(l, u)| l.phase != u.phase));
    }

    #[test]
    fn range_stays_inside_margins() {
        let spec = fourier_spec();
        let d = spec.clamp_margin;
        for seed in 0..50 {
            let b = sample_boundary(&spec, seed).unwrap();
            for i in 0..2000 {
                let y = (i as f64) * 0.77 - 731.0;
                let (hl, hu) = evaluate(&b, y);
                assert!(hl > d && hl < 1.0 - d, "hl={hl} out of range");
                assert!(hu > d && hu < 1.0 - d, "hu={hu} out of range");
            }
        }
    }

    #[test]
    fn shift_matches_translated_evaluation() {
        let b = sample_boundary(&fourier_spec(), 11).unwrap();
        let h = 2.341;
        let bs = shift(&b, h);
        for i in 0..200 {
            let y = i as f64 * 0.31 - 30.0;
            let (l0, u0) = evaluate(&bs, y);
            let (l1, u1) = evaluate(&b, y + h);
            assert_abs_diff_eq!(l0, l1, epsilon = 1e-12);
            assert_abs_diff_eq!(u0, u1, epsilon = 1e-12);
        }
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let b = sample_boundary(&fourier_spec(), 11).unwrap();
        let bs = shift(&b, 0.0);
        for (m0, m1) in b.lower.modes.iter().zip(&bs.lower.modes) {
            assert_eq!(m0.phase.to_bits(), m1.phase.to_bits());
        }
    }

    #[test]
    fn shift_group_law() {
        let b = sample_boundary(&fourier_spec(), 19).unwrap();
        let ab = shift(&shift(&b, 1.25), -0.75);
        let once = shift(&b, 0.5);
        for i in 0..100 {
            let y = i as f64 * 0.47 - 20.0;
            let (l0, u0) = evaluate(&ab, y);
            let (l1, u1) = evaluate(&once, y);
            assert_abs_diff_eq!(l0, l1, epsilon = 1e-12);
            assert_abs_diff_eq!(u0, u1, epsilon = 1e-12);
        }
    }

    #[test]
    fn lipschitz_estimate_matches_analytic_sine() {
        // sup |d/dy (0.5 + 0.2 sin(2πy))| = 0.4π.
        let b = sample_boundary(&sine_spec(), 5).unwrap();
        let est = lipschitz_estimate(&b, 4.0).unwrap();
        let exact = 0.4 * std::f64::consts::PI;
        assert!(
            (est - exact).abs() / exact < 0.01,
            "estimate {est} vs analytic {exact}"
        );
        assert!(est <= exact + 1e-9);
    }

    #[test]
    fn fourier_respects_lipschitz_cap() {
        let mut spec = fourier_spec();
        spec.lipschitz_cap = 0.7;
        for seed in 0..10 {
            let b = sample_boundary(&spec, seed).unwrap();
            let est = lipschitz_estimate(&b, 20.0).unwrap();
            assert!(est <= 0.7 + 1e-9, "estimate {est} above cap");
            assert!(b.lower.slope_bound() <= 0.7 + 1e-12);
        }
    }

    #[test]
    fn fourier_mean_is_stationary_across_seeds() {
        // Two seeds: empirical means over a long window agree within three
        // standard errors of the lateral fluctuations.
        let spec = fourier_spec();
        let mean_of = |seed: u64| {
            let b = sample_boundary(&spec, seed).unwrap();
            let n = 100_000;
            let mut acc = 0.0;
            let mut acc2 = 0.0;
            for i in 0..n {
                let y = i as f64 * 0.1;
                let v = b.lower.eval(y);
                acc += v;
                acc2 += v * v;
            }
            let m = acc / n as f64;
            let var = acc2 / n as f64 - m * m;
            (m, (var / n as f64).sqrt())
        };
        let (m1, se1) = mean_of(101);
        let (m2, se2) = mean_of(202);
        let se = (se1 * se1 + se2 * se2).sqrt();
        // Lateral samples are correlated, so inflate the naive standard error.
        assert!(
            (m1 - m2).abs() < 30.0 * se.max(1e-6),
            "means {m1} vs {m2}, se {se}"
        );
    }

    #[test]
    fn invalid_specs_are_refused() {
        let mut s = fourier_spec();
        s.amplitude = 0.45;
        s.clamp_margin = 0.45;
        assert!(matches!(sample_boundary(&s, 0), Err(Error::Config(_))));
        let mut s = fourier_spec();
        s.lipschitz_cap = -1.0;
        assert!(matches!(sample_boundary(&s, 0), Err(Error::Config(_))));
        let mut s = sine_spec();
        s.period_hint = None;
        assert!(matches!(sample_boundary(&s, 0), Err(Error::Config(_))));
        // Steep periodic curve above the cap is refused, not reshaped.
        let mut s = sine_spec();
        s.lipschitz_cap = 1.0; // analytic slope is 0.4π ≈ 1.257
        assert!(matches!(sample_boundary(&s, 0), Err(Error::Config(_))));
    }

    #[test]
    fn periodization_snaps_and_keeps_budgets() {
        let spec = fourier_spec();
        let b = sample_boundary(&spec, 13).unwrap();
        let w = 8.0;
        let bp = periodized(&b, w).unwrap();
        assert!(is_periodic_over(&bp, w, 1e-10));
        assert!(!is_periodic_over(&b, w, 1e-10));
        assert!(bp.lower.slope_bound() <= spec.lipschitz_cap + 1e-12);
        assert!(bp.lower.deviation_bound() <= spec.amplitude + 1e-12);
        assert_eq!(bp.metadata.periodized_window, Some(w));
        for m in &bp.lower.modes {
            let k = m.freq * w;
            assert_abs_diff_eq!(k, k.round(), epsilon = 1e-9);
        }
    }

    #[test]
    fn periodization_of_periodic_curve_is_identity() {
        let b = sample_boundary(&sine_spec(), 21).unwrap();
        let bp = periodized(&b, 3.0).unwrap();
        for i in 0..50 {
            let y = i as f64 * 0.21;
            let (l0, _) = evaluate(&b, y);
            let (l1, _) = evaluate(&bp, y);
            assert_abs_diff_eq!(l0, l1, epsilon = 1e-12);
        }
    }

    #[test]
    fn stationarity_two_sample_ks() {
        // Fixed lag: the sample of h(0) across seeds and the sample of h(lag)
        // across seeds come from the same distribution.
        let spec = fourier_spec();
        let n = 300;
        let mut a: Vec<f64> = Vec::with_capacity(n);
        let mut b: Vec<f64> = Vec::with_capacity(n);
        for seed in 0..n as u64 {
            let pair = sample_boundary(&spec, seed).unwrap();
            a.push(pair.lower.eval(0.0));
            b.push(pair.lower.eval(17.3));
        }
        a.sort_by(|x, y| x.total_cmp(y));
        b.sort_by(|x, y| x.total_cmp(y));
        // Two-sample Kolmogorov–Smirnov statistic.
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < n && j < n {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / n as f64 - j as f64 / n as f64).abs());
        }
        // Critical value at level 0.01 for equal sample sizes.
        let crit = 1.628 * (2.0 / n as f64).sqrt();
        assert!(d < crit, "KS statistic {d} exceeds critical value {crit}");
    }
}
