//! Green function evaluators with rigorous tail bounds.
//!
//! On orbits certified inside W_R the estimators telescope: each increment
//! is bounded by explicit constants from the escape region, so summing the
//! geometric (or arithmetico-geometric) tails gives a certified error. Off
//! the region the definitional partial sums are reported as best-effort
//! values with an extrapolated tail estimate, never as certified ones.

use num_complex::Complex64;

use crate::algebra::{Poly1, SkewProduct};
use crate::error::{Error, Result};
use crate::escape::{
    base_escape_radius, classify_orbit, BaseOrbit, BaseStatus, EscapeRegion, OrbitStatus,
    SkewOrbit,
};
use crate::logpolar::LogC;
use crate::weights::{h_restricted, ExtendedRational, WeightSpec};

/// An extended real value: finite, +inf, or -inf.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum ExtReal {
    Finite(f64),
    PlusInf,
    MinusInf,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PlusInf => f64::INFINITY,
            ExtReal::MinusInf => f64::NEG_INFINITY,
        }
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PlusInf => write!(f, "+inf"),
            ExtReal::MinusInf => write!(f, "-inf"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GreenStatus {
    /// |value - true value| <= error_bound.
    Certified,
    /// No certified rate available; error_bound is an extrapolated estimate.
    BestEffort,
    /// Orbit classification did not resolve within the budget.
    Undecided,
}

impl std::fmt::Display for GreenStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GreenStatus::Certified => "Certified",
            GreenStatus::BestEffort => "BestEffort",
            GreenStatus::Undecided => "Undecided",
        };
        write!(f, "{s}")
    }
}

/// A Green function estimate with its error bound and provenance.
#[derive(Clone, Copy, Debug)]
pub struct GreenValue {
    pub value: ExtReal,
    pub error_bound: f64,
    pub iterations: usize,
    pub status: GreenStatus,
}

impl GreenValue {
    fn certified(value: f64, error_bound: f64, iterations: usize) -> Self {
        Self {
            value: ExtReal::Finite(value),
            error_bound,
            iterations,
            status: GreenStatus::Certified,
        }
    }

    fn certified_inf(value: ExtReal, iterations: usize) -> Self {
        Self {
            value,
            error_bound: 0.0,
            iterations,
            status: GreenStatus::Certified,
        }
    }
}

/// Per-step floating arithmetic slack folded into transported error bounds.
fn slack(n: usize) -> f64 {
    1e-12 * (n as f64 + 1.0)
}

fn log_plus(x: f64) -> f64 {
    x.max(0.0)
}

/// ln(e^lm + 1), i.e. ln(|z| + 1) from ln|z|; 0 for z = 0.
fn softplus(lm: f64) -> f64 {
    if lm == f64::NEG_INFINITY {
        0.0
    } else if lm > 40.0 {
        lm + (-lm).exp().ln_1p()
    } else {
        lm.exp().ln_1p()
    }
}

/// True when q(z, 0) is identically zero, so w = 0 absorbs the fiber orbit.
fn fiber_collapses<C: crate::coeff::Coeff>(f: &SkewProduct<C>) -> bool {
    f.q.terms().all(|(_, m, _)| m > 0)
}

/// Scans a definitional partial sequence, estimating the remaining tail by
/// geometric extrapolation of the increments. Returns (value, estimate, step).
fn best_effort_scan(values: &[f64], tol: f64) -> (f64, f64, usize) {
    let mut zero_run = 0usize;
    let mut prev_delta = f64::NAN;
    let mut ratios: [f64; 3] = [f64::NAN; 3];
    let mut last = (values[0], f64::INFINITY, 0usize);
    for n in 1..values.len() {
        let v = values[n];
        if !v.is_finite() {
            // numeric range of the trail is exhausted; keep the last good value
            return last;
        }
        let delta = (v - values[n - 1]).abs();
        // increments at rounding level mean the sequence has settled
        let tiny = 1e-13 * (1.0 + v.abs());
        if delta <= tiny {
            zero_run += 1;
            if zero_run >= 3 && n >= 4 {
                return (v, if delta == 0.0 { 0.0 } else { 10.0 * tiny }, n);
            }
        } else {
            zero_run = 0;
        }
        if prev_delta.is_finite() && prev_delta > tiny {
            ratios.rotate_left(1);
            ratios[2] = delta / prev_delta;
        }
        prev_delta = delta;
        let rho = ratios
            .iter()
            .copied()
            .filter(|r| r.is_finite())
            .fold(f64::NAN, f64::max);
        let est = if rho.is_finite() && rho < 0.95 {
            let rho = rho.max(0.5);
            2.0 * delta * rho / (1.0 - rho)
        } else {
            18.0 * delta
        };
        last = (v, est, n);
        if n >= 8 && est <= tol && rho.is_finite() && rho < 0.95 {
            return last;
        }
    }
    last
}

/// G_p(z) = lim delta^{-n} log+ |p^n(z)|. Certified once the orbit passes
/// the escape radius; value 0 with BestEffort status while it stays below.
pub fn green_base(p: &Poly1<Complex64>, z: Complex64, tol: f64, n_max: usize) -> GreenValue {
    let delta = p.degree().expect("nonzero p");
    let (r_p, _) = base_escape_radius(p);
    let ln_rp = r_p.ln();
    let inv_delta = 1.0 / delta as f64;
    let mut orbit = BaseOrbit::new(p, z);
    let mut escaped = false;
    let mut last = (0usize, f64::NEG_INFINITY);
    for n in 0..=n_max {
        let lz = match orbit.next() {
            Some(s) => s,
            None => break,
        };
        last = (n, lz.log_abs());
        if lz.log_abs() > ln_rp {
            escaped = true;
            // two-sided per-step constant: |z| > r_p gives
            // (1-eps)|z|^delta <= |p(z)| <= (1+eps)|z|^delta
            let eps = coeff_tail_at(p, lz.log_abs().exp().min(1e300).max(r_p));
            let c_eps = (1.0 + eps).ln().max(-(1.0 - eps).ln());
            let tail = inv_delta.powi(n as i32) * c_eps / (delta as f64 - 1.0);
            let bound = tail + slack(n);
            if bound <= tol || tail <= 1e-15 {
                let value = inv_delta.powi(n as i32) * lz.log_abs();
                return GreenValue::certified(value, bound, n);
            }
        }
    }
    if escaped {
        // range-limited: still certified, with the achieved bound
        let (n, lm) = last;
        let eps = coeff_tail_at(p, r_p);
        let c_eps = (1.0 + eps).ln().max(-(1.0 - eps).ln());
        let tail = inv_delta.powi(n as i32) * c_eps / (delta as f64 - 1.0);
        return GreenValue::certified(inv_delta.powi(n as i32) * lm, tail + slack(n), n);
    }
    GreenValue {
        value: ExtReal::Finite(0.0),
        error_bound: inv_delta.powi(n_max as i32) * (ln_rp.max(0.0) + 1.0),
        iterations: n_max,
        status: GreenStatus::BestEffort,
    }
}

fn coeff_tail_at(p: &Poly1<Complex64>, radius: f64) -> f64 {
    let delta = p.degree().expect("nonzero") as i32;
    p.terms()
        .filter(|&(e, _)| (e as i32) < delta)
        .map(|(e, c)| {
            use crate::coeff::Coeff;
            c.abs_f64() * radius.powi(e as i32 - delta)
        })
        .sum()
}

/// Collects trail values of a per-step functional until `stop` returns a
/// result or the budget runs out.
fn run_trail<T>(
    f: &SkewProduct<Complex64>,
    z: Complex64,
    w: Complex64,
    n_max: usize,
    mut visit: impl FnMut(usize, LogC, LogC) -> Option<T>,
) -> (Option<T>, usize) {
    let mut orbit = SkewOrbit::new(f, z, w);
    let mut steps = 0;
    for n in 0..=n_max {
        match orbit.next() {
            None => break,
            Some((lz, lw)) => {
                steps = n;
                if let Some(t) = visit(n, lz, lw) {
                    return (Some(t), steps);
                }
            }
        }
    }
    (None, steps)
}

/// Definitional best-effort evaluation: computes v_n along the orbit and
/// extrapolates the tail. `MinusInf` appears when the sequence hits log of
/// zero (only the big-G sequence can).
fn definitional_partial(
    f: &SkewProduct<Complex64>,
    z: Complex64,
    w: Complex64,
    tol: f64,
    n_max: usize,
    status: GreenStatus,
    seq: impl Fn(usize, LogC, LogC) -> f64,
) -> GreenValue {
    let mut values: Vec<f64> = Vec::new();
    let (hit_nonfinite, _) = run_trail(f, z, w, n_max, |n, lz, lw| {
        let v = seq(n, lz, lw);
        if !v.is_finite() {
            return Some(v);
        }
        values.push(v);
        None
    });
    // A -inf partial early in the trail is a genuine log of zero (collapsed
    // fiber); deep in the trail the finite prefix carries the information.
    if let Some(nf) = hit_nonfinite {
        if values.len() < 8 {
            return GreenValue {
                value: if nf == f64::NEG_INFINITY {
                    ExtReal::MinusInf
                } else {
                    ExtReal::Finite(0.0)
                },
                error_bound: f64::INFINITY,
                iterations: values.len(),
                status,
            };
        }
    }
    if values.is_empty() {
        return GreenValue {
            value: ExtReal::Finite(0.0),
            error_bound: f64::INFINITY,
            iterations: 0,
            status,
        };
    }
    let (value, est, n) = best_effort_scan(&values, tol);
    GreenValue {
        value: ExtReal::Finite(value),
        error_bound: est,
        iterations: n,
        status,
    }
}

/// G_z^alpha for delta > d with alpha = gamma/(delta - d):
/// lim d^{-n} log |Q_z^n(w) / p^n(z)^alpha|.
pub fn green_fiber_ratio(
    f: &SkewProduct<Complex64>,
    region: &EscapeRegion,
    z: Complex64,
    w: Complex64,
    tol: f64,
    n_max: usize,
) -> Result<GreenValue> {
    if f.delta <= f.d {
        return Err(Error::WrongCase {
            required: "delta > d with alpha = gamma/(delta-d)",
        });
    }
    let alpha = region.alpha;
    let d = f.d as f64;
    let inv_d = 1.0 / d;
    let log_r = region.log_r();

    // w-collapse: the ratio sequence is identically zero in log+ form
    if w == Complex64::new(0.0, 0.0) && fiber_collapses(f) {
        return Ok(GreenValue::certified(0.0, 0.0, 0));
    }

    let class = classify_orbit(f, region, z, w, n_max);
    match class.status {
        OrbitStatus::EntersWR { entry } => {
            let mut result: Option<GreenValue> = None;
            run_trail(f, z, w, n_max + 64, |n, lz, lw| {
                if n < entry {
                    return None;
                }
                let tail = inv_d.powi(n as i32) * log_r / (d - 1.0);
                let bound = tail + slack(n);
                if bound <= tol || tail <= 1e-15 || n == n_max + 64 {
                    let g = inv_d.powi(n as i32) * (lw.log_abs() - alpha * lz.log_abs());
                    result = Some(GreenValue::certified(g, bound, n));
                    return Some(());
                }
                None
            });
            Ok(result.expect("trail reaches the stopping step"))
        }
        OrbitStatus::BaseBounded { .. } | OrbitStatus::Undecided { .. } => {
            let status = if matches!(class.status, OrbitStatus::BaseBounded { .. }) {
                GreenStatus::BestEffort
            } else {
                GreenStatus::Undecided
            };
            Ok(definitional_partial(f, z, w, tol, n_max, status, |n, lz, lw| {
                if lw.is_zero() {
                    return 0.0;
                }
                if lz.is_zero() {
                    // the ratio degenerates on the fiber z = 0
                    return 0.0;
                }
                inv_d.powi(n as i32) * log_plus(lw.log_abs() - alpha * lz.log_abs())
            }))
        }
    }
}

/// The fiberwise Green function G_z(w) = lim d^{-n} log+ |Q_z^n(w)|.
///
/// delta < d (and the nondegenerate delta <= d case): certified on W_R entry
/// via the corrected estimator whose increments telescope; delta >= d with
/// gamma != 0: +inf on certified A_f points. Base-bounded points fall back
/// to best-effort direct iteration.
pub fn green_fiber(
    f: &SkewProduct<Complex64>,
    region: &EscapeRegion,
    z: Complex64,
    w: Complex64,
    tol: f64,
    n_max: usize,
) -> GreenValue {
    let d = f.d as f64;
    let inv_d = 1.0 / d;

    if w == Complex64::new(0.0, 0.0) && fiber_collapses(f) {
        // Q_z^n(0) = 0 for every n, so the log+ limit is exactly 0
        return GreenValue::certified(0.0, 0.0, 0);
    }

    let class = classify_orbit(f, region, z, w, n_max);
    match class.status {
        OrbitStatus::EntersWR { entry } => {
            if f.delta >= f.d && f.gamma != 0 {
                // G_z = +inf on A_f (delta > d; and both signs of alpha at delta = d)
                return GreenValue::certified_inf(ExtReal::PlusInf, entry);
            }
            // delta < d, or gamma = 0 with delta <= d: corrected estimator
            // value_m = d^{-N} [d^{-m} log|w_{N+m}| + corr(m)],
            // corr(m) = gamma/(d-delta) (delta/d)^m log|z_N| (0 when gamma = 0)
            let n_entry = entry;
            let log_r = region.log_r();
            let log_r0 = region.log_r0();
            let gamma = f.gamma as f64;
            let delta = f.delta as f64;
            let ratio = delta / d;
            let scale_n = inv_d.powi(n_entry as i32);
            let mut lm_z_entry = 0.0f64;
            let mut result: Option<GreenValue> = None;
            run_trail(f, z, w, n_max + 64, |n, lz, lw| {
                if n < n_entry {
                    return None;
                }
                let m = n - n_entry;
                if m == 0 {
                    lm_z_entry = lz.log_abs();
                }
                let corr = if f.gamma == 0 {
                    0.0
                } else {
                    gamma / (d - delta) * ratio.powi(m as i32) * lm_z_entry
                };
                let tail_gamma = if f.gamma == 0 {
                    0.0
                } else {
                    gamma * log_r0 * ratio.powi(m as i32) / (d - delta)
                };
                let tail = tail_gamma + log_r * inv_d.powi(m as i32) / (d - 1.0);
                let bound = scale_n * tail + slack(n);
                if bound <= tol || tail <= 1e-15 || n == n_max + 64 {
                    let inner = inv_d.powi(m as i32) * lw.log_abs() + corr;
                    result = Some(GreenValue::certified(scale_n * inner, bound, n));
                    return Some(());
                }
                None
            });
            result.expect("trail reaches the stopping step")
        }
        OrbitStatus::BaseBounded { .. } | OrbitStatus::Undecided { .. } => {
            let status = if matches!(class.status, OrbitStatus::BaseBounded { .. }) {
                GreenStatus::BestEffort
            } else {
                GreenStatus::Undecided
            };
            definitional_partial(f, z, w, tol, n_max, status, |n, _, lw| {
                inv_d.powi(n as i32) * log_plus(lw.log_abs())
            })
        }
    }
}

/// The weighted Green function G_f^alpha with |(z,w)|_alpha = max{(|z|+1)^alpha, |w|}.
pub fn green_weighted(
    f: &SkewProduct<Complex64>,
    spec: &WeightSpec<Complex64>,
    region: Option<&EscapeRegion>,
    z: Complex64,
    w: Complex64,
    tol: f64,
    n_max: usize,
) -> Result<GreenValue> {
    let alpha = match &spec.alpha {
        ExtendedRational::Finite(_) => spec.alpha.to_f64(),
        ExtendedRational::NegInfinity => {
            return Err(Error::WrongCase {
                required: "finite alpha (use the big-G or normalized limits for q = b(z) w^d)",
            })
        }
    };
    if f.delta > f.d {
        // G_f^alpha = alpha G_p on all of C^2
        let scale = alpha.max(1.0);
        let gp = green_base(&f.p, z, tol / scale, n_max);
        return Ok(GreenValue {
            value: ExtReal::Finite(alpha * gp.value.to_f64()),
            error_bound: alpha.abs() * gp.error_bound + slack(gp.iterations),
            iterations: gp.iterations,
            status: gp.status,
        });
    }
    if f.delta < f.d {
        // G_f^alpha = G_f = G_z on C^2
        let region = region.ok_or(Error::Domain(
            "green_weighted for delta < d needs the escape region".into(),
        ))?;
        return Ok(green_fiber(f, region, z, w, tol, n_max));
    }
    // delta = d
    let region = region.ok_or(Error::Domain(
        "green_weighted for delta = d needs the escape region".into(),
    ))?;
    if f.gamma != 0 {
        // +inf on A_f, max{alpha, 0} G_p on B_f
        let class = classify_orbit(f, region, z, w, n_max);
        match class.status {
            OrbitStatus::EntersWR { entry } => {
                Ok(GreenValue::certified_inf(ExtReal::PlusInf, entry))
            }
            OrbitStatus::BaseBounded { .. } => {
                let d = f.d as f64;
                Ok(definitional_partial(
                    f,
                    z,
                    w,
                    tol,
                    n_max,
                    GreenStatus::BestEffort,
                    |n, lz, lw| {
                        let norm = (alpha * softplus(lz.log_abs())).max(lw.log_abs());
                        (1.0 / d).powi(n as i32) * log_plus(norm)
                    },
                ))
            }
            OrbitStatus::Undecided { steps } => {
                let scale = alpha.max(0.0);
                let collapsed = w == Complex64::new(0.0, 0.0) && fiber_collapses(f);
                let gp = green_base(&f.p, z, tol / scale.max(1.0), n_max);
                let certified_bf = collapsed
                    && matches!(class.base, BaseStatus::BaseEscapes { .. })
                    && gp.status == GreenStatus::Certified;
                Ok(GreenValue {
                    value: ExtReal::Finite(scale * gp.value.to_f64()),
                    error_bound: scale * gp.error_bound + slack(gp.iterations),
                    iterations: steps.max(gp.iterations),
                    status: if certified_bf {
                        GreenStatus::Certified
                    } else {
                        GreenStatus::Undecided
                    },
                })
            }
        }
    } else {
        // nondegenerate delta = d: G_f^alpha = max{alpha G_p, G_z}
        let scale = alpha.max(1.0);
        let gp = green_base(&f.p, z, tol / (2.0 * scale), n_max);
        let gz = green_fiber(f, region, z, w, tol / 2.0, n_max);
        let gz_v = match gz.value {
            ExtReal::Finite(v) => v,
            inf => return Ok(GreenValue { value: inf, ..gz }),
        };
        let value = (alpha * gp.value.to_f64()).max(gz_v);
        let status = match (gp.status, gz.status) {
            (GreenStatus::Certified, GreenStatus::Certified) => GreenStatus::Certified,
            (_, GreenStatus::Undecided) | (GreenStatus::Undecided, _) => GreenStatus::Undecided,
            _ => GreenStatus::BestEffort,
        };
        Ok(GreenValue {
            value: ExtReal::Finite(value),
            error_bound: alpha.abs() * gp.error_bound + gz.error_bound,
            iterations: gp.iterations.max(gz.iterations),
            status,
        })
    }
}

/// The (n gamma d^{n-1})-normalized limit for delta = d, gamma != 0
/// (equals G_p on A_f, 0 on B_f). Converges at rate O(1/n); best effort.
pub fn green_normalized(
    f: &SkewProduct<Complex64>,
    region: &EscapeRegion,
    z: Complex64,
    w: Complex64,
    n_max: usize,
) -> Result<GreenValue> {
    if f.delta != f.d || f.gamma == 0 {
        return Err(Error::WrongCase {
            required: "delta = d and gamma != 0",
        });
    }
    let d = f.d as f64;
    let gamma = f.gamma as f64;
    let ln_d = d.ln();
    let value_at = |n: usize, lw: LogC| -> f64 {
        if n == 0 {
            return 0.0;
        }
        let num = log_plus(lw.log_abs());
        if num == 0.0 {
            return 0.0;
        }
        // num / (n gamma d^{n-1}) without overflowing the denominator
        (num.ln() - (n as f64 * gamma).ln() - (n as f64 - 1.0) * ln_d).exp()
    };
    let mut values: Vec<f64> = Vec::new();
    let mut entry_lw: Option<f64> = None;
    let mut gp_partials: Vec<f64> = Vec::new();
    let class = classify_orbit(f, region, z, w, n_max);
    let entry = match class.status {
        OrbitStatus::EntersWR { entry } => Some(entry),
        _ => None,
    };
    run_trail(f, z, w, n_max, |n, lz, lw| {
        if Some(n) == entry {
            entry_lw = Some(lw.log_abs());
        }
        gp_partials.push((1.0 / d).powi(n as i32) * log_plus(lz.log_abs()));
        values.push(value_at(n, lw));
        None::<()>
    });
    let n = values.len() - 1;
    let value = values[n];
    let err = match entry_lw {
        Some(lw_entry) => {
            // (d/(n gamma)) (log r + |log|w_N||) plus the averaging defect of
            // the base partial sums
            let term = d / (n as f64 * gamma) * (region.log_r() + lw_entry.abs());
            let mean: f64 = gp_partials.iter().sum::<f64>() / gp_partials.len() as f64;
            let defect = (mean - gp_partials[n]).abs();
            term + defect
        }
        None => {
            let prev = if n >= 1 { values[n - 1] } else { 0.0 };
            (value - prev).abs() * n as f64
        }
    };
    Ok(GreenValue {
        value: ExtReal::Finite(value),
        error_bound: err,
        iterations: n,
        status: GreenStatus::BestEffort,
    })
}

/// The function G for delta = d, gamma != 0:
/// G(z, w) = lim d^{-n} log |Q_z^n(w) / p^n(z)^{n gamma / d}|.
/// Certified on A_f; -inf (certified) on the collapsed fiber when the base
/// escapes; -inf with Undecided status otherwise.
pub fn green_g(
    f: &SkewProduct<Complex64>,
    region: &EscapeRegion,
    z: Complex64,
    w: Complex64,
    tol: f64,
    n_max: usize,
) -> Result<GreenValue> {
    if f.delta != f.d || f.gamma == 0 {
        return Err(Error::WrongCase {
            required: "delta = d and gamma != 0",
        });
    }
    let d = f.d as f64;
    let inv_d = 1.0 / d;
    let gamma = f.gamma as f64;

    let class = classify_orbit(f, region, z, w, n_max);
    match class.status {
        OrbitStatus::EntersWR { entry } => {
            // inner estimator from the entry point, then transport through
            // G = d^{-N} G(f^N) - N (gamma/d) G_p(z)
            let log_r = region.log_r();
            let log_r0 = region.log_r0();
            let scale_n = inv_d.powi(entry as i32);
            let n_coef = entry as f64 * gamma / d;
            let gp = if entry > 0 {
                green_base(&f.p, z, tol / (2.0 * n_coef.max(1.0)), n_max)
            } else {
                GreenValue::certified(0.0, 0.0, 0)
            };
            let x = inv_d;
            let mut result: Option<GreenValue> = None;
            run_trail(f, z, w, n_max + 64, |n, lz, lw| {
                if n < entry {
                    return None;
                }
                let m = n - entry;
                // tail of sum_{k>=m} [d^{-(k+1)} log r + ((k+1)/d^{k+1})(gamma/d) log r0]
                let t1 = log_r * inv_d.powi(m as i32) / (d - 1.0);
                let t2_sum = x.powi(m as i32 + 1) * ((m as f64 + 1.0) - m as f64 * x)
                    / ((1.0 - x) * (1.0 - x));
                let t2 = gamma / d * log_r0 * t2_sum;
                let tail = t1 + t2;
                let bound = scale_n * tail + n_coef * gp.error_bound + slack(n);
                if bound <= tol || tail <= 1e-15 || n == n_max + 64 {
                    let inner =
                        inv_d.powi(m as i32) * (lw.log_abs() - m as f64 * gamma / d * lz.log_abs());
                    let value = scale_n * inner - n_coef * gp.value.to_f64();
                    result = Some(GreenValue::certified(value, bound, n));
                    return Some(());
                }
                None
            });
            Ok(result.expect("trail reaches the stopping step"))
        }
        OrbitStatus::BaseBounded { .. } => {
            Ok(definitional_partial(
                f,
                z,
                w,
                tol,
                n_max,
                GreenStatus::BestEffort,
                |n, lz, lw| {
                    if lw.is_zero() {
                        return f64::NEG_INFINITY;
                    }
                    let zpart = if n == 0 || lz.is_zero() {
                        if n == 0 { 0.0 } else { return f64::NEG_INFINITY }
                    } else {
                        n as f64 * gamma / d * lz.log_abs()
                    };
                    inv_d.powi(n as i32) * (lw.log_abs() - zpart)
                },
            ))
        }
        OrbitStatus::Undecided { steps } => {
            let collapsed = w == Complex64::new(0.0, 0.0) && fiber_collapses(f);
            let certified_bf = collapsed && matches!(class.base, BaseStatus::BaseEscapes { .. });
            Ok(GreenValue {
                value: ExtReal::MinusInf,
                error_bound: 0.0,
                iterations: steps,
                status: if certified_bf {
                    GreenStatus::Certified
                } else {
                    GreenStatus::Undecided
                },
            })
        }
    }
}

/// The degree-normalized limit (deg f^n)^{-1} log+ |f^n(z, w)|_alpha,
/// defined for delta != d, or delta = d with alpha <= 0.
pub fn green_deg_normalized(
    f_exact: &SkewProduct<crate::coeff::ExactComplex>,
    f: &SkewProduct<Complex64>,
    spec: &WeightSpec<Complex64>,
    z: Complex64,
    w: Complex64,
    n_max: usize,
    budget: usize,
) -> Result<GreenValue> {
    let alpha = spec.alpha.to_f64();
    if f.delta == f.d && alpha > 0.0 {
        return Err(Error::WrongCase {
            required: "delta != d, or delta = d with alpha <= 0",
        });
    }
    let d = f.d as f64;
    let delta = f.delta as f64;
    let gamma = f.gamma as f64;
    // ln deg(f^n): closed forms on the alpha <= 0 equality branches,
    // symbolic composition elsewhere (budget permitting).
    let equality_branch = f.delta <= f.d && alpha <= 0.0;
    let mut ln_degs: Vec<f64> = vec![0.0]; // n = 0: deg = 1
    if equality_branch {
        for n in 1..=n_max {
            let ln_deg = if f.delta < f.d {
                let inner = 1.0 + gamma / (d - delta) * (1.0 - (delta / d).powi(n as i32));
                n as f64 * d.ln() + inner.ln()
            } else {
                n as f64 * d.ln() + (gamma / d * n as f64).ln_1p()
            };
            ln_degs.push(ln_deg);
        }
    } else {
        let mut iterate = f_exact.clone();
        let mut n = 1usize;
        loop {
            let deg = iterate
                .p
                .degree()
                .unwrap()
                .max(iterate.q.total_degree().unwrap());
            ln_degs.push((deg as f64).ln());
            if n >= n_max {
                break;
            }
            match f_exact.compose(&iterate, budget) {
                Ok(next) => iterate = next,
                Err(_) => break,
            }
            n += 1;
        }
    }
    let n_cap = ln_degs.len() - 1;
    let mut values: Vec<f64> = Vec::new();
    run_trail(f, z, w, n_cap, |n, lz, lw| {
        let ln_norm = if alpha == f64::NEG_INFINITY {
            lw.log_abs()
        } else {
            (alpha * softplus(lz.log_abs())).max(lw.log_abs())
        };
        let num = log_plus(ln_norm);
        let v = if n == 0 {
            num
        } else if num == 0.0 {
            0.0
        } else {
            (num.ln() - ln_degs[n]).exp()
        };
        values.push(v);
        None::<()>
    });
    let n = values.len() - 1;
    let err = if n >= 1 {
        (values[n] - values[n - 1]).abs()
    } else {
        f64::INFINITY
    };
    Ok(GreenValue {
        value: ExtReal::Finite(values[n]),
        error_bound: err,
        iterations: n,
        status: GreenStatus::BestEffort,
    })
}

/// One row of the near-infinity asymptotic comparison.
#[derive(Clone, Debug)]
pub struct AsymptoticRow {
    pub z: Complex64,
    pub g_alpha: GreenValue,
    pub g_h: GreenValue,
    pub diff: f64,
}

/// Compares G_z^alpha(c z^alpha) against G_h(c) along a ladder of base
/// points; the differences should shrink as |z| grows.
pub fn asymptotic_check(
    f: &SkewProduct<Complex64>,
    spec: &WeightSpec<Complex64>,
    region: &EscapeRegion,
    c: Complex64,
    z_ladder: &[Complex64],
    tol: f64,
    n_max: usize,
) -> Result<Vec<AsymptoticRow>> {
    if f.delta == f.d {
        return Err(Error::WrongCase {
            required: "delta != d with alpha = gamma/(delta-d)",
        });
    }
    if !spec.dominant_monomial_ok {
        return Err(Error::WrongCase {
            required: "alpha = gamma/(delta-d)",
        });
    }
    let alpha = spec.alpha.to_f64();
    let h1 = h_restricted(&spec.h);
    let mut rows = Vec::with_capacity(z_ladder.len());
    for &z in z_ladder {
        let w = c * z.powf(alpha);
        let g_alpha = if f.delta > f.d {
            green_fiber_ratio(f, region, z, w, tol, n_max)?
        } else {
            // for delta < d, G_z^alpha = G_z on A_p x C
            green_fiber(f, region, z, w, tol, n_max)
        };
        let g_h = green_base(&h1, c, tol, n_max);
        let diff = (g_alpha.value.to_f64() - g_h.value.to_f64()).abs();
        rows.push(AsymptoticRow {
            z,
            g_alpha,
            g_h,
            diff,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly2;
    use crate::coeff::ExactComplex as EC;
    use crate::escape::certified_region;
    use crate::weights::analyze;
    use rand::{Rng, SeedableRng};

    fn sp(p: Vec<(u32, i64)>, q: Vec<(u32, u32, i64)>) -> SkewProduct<Complex64> {
        SkewProduct::new(
            Poly1::from_terms(p.into_iter().map(|(e, c)| (e, EC::from_int(c)))),
            Poly2::from_terms(q.into_iter().map(|(n, m, c)| (n, m, EC::from_int(c)))),
        )
        .unwrap()
        .to_float()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const TOL: f64 = 1e-9;
    const NMAX: usize = 2000;

    #[test]
    fn green_base_cases() {
        let p = Poly1::monomial(2, c(1.0, 0.0));
        let g = green_base(&p, c(2.0, 0.0), TOL, NMAX);
        assert_eq!(g.status, GreenStatus::Certified);
        assert!((g.value.to_f64() - 2.0f64.ln()).abs() <= g.error_bound);
        assert!(g.error_bound <= TOL);

        let g = green_base(&p, c(0.5, 0.0), TOL, NMAX);
        assert_eq!(g.value.to_f64(), 0.0);

        // period-2 orbit 0 -> -1 -> 0 of z^2 - 1
        let p = Poly1::from_terms([(2, c(1.0, 0.0)), (0, c(-1.0, 0.0))]);
        let g = green_base(&p, c(0.0, 0.0), TOL, NMAX);
        assert_eq!(g.value.to_f64(), 0.0);
        assert_eq!(g.status, GreenStatus::BestEffort);
    }

    #[test]
    fn green_base_functional_equation() {
        let p = Poly1::from_terms([(3, c(1.0, 0.0)), (1, c(0.5, 0.0)), (0, c(0.2, 0.1))]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let gz = green_base(&p, z, TOL, NMAX);
            let gpz = green_base(&p, p.eval(z), TOL, NMAX);
            assert!(
                (gpz.value.to_f64() - 3.0 * gz.value.to_f64()).abs() <= 2.0 * TOL + 3.0 * gz.error_bound,
                "functional equation violated at {z}"
            );
        }
    }

    #[test]
    fn fiber_ratio_monomial_closed_form() {
        // f = (z^3, z^2 w^2): G_z^alpha = log+ |z^-2 w| exactly
        let f = sp(vec![(3, 1)], vec![(2, 2, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();
        let g = green_fiber_ratio(&f, &region, c(2.0, 0.0), c(16.0, 0.0), TOL, NMAX).unwrap();
        assert!((g.value.to_f64() - 4.0f64.ln()).abs() <= g.error_bound.max(1e-12));

        let g = green_fiber_ratio(&f, &region, c(2.0, 0.0), c(4.0, 0.0), TOL, NMAX).unwrap();
        assert!(g.value.to_f64().abs() <= g.error_bound.max(1e-12));

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let z = Complex64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(-3.1..3.1));
            let w = Complex64::from_polar(rng.gen_range(0.1..1000.0), rng.gen_range(-3.1..3.1));
            let expect = log_plus((w.norm() / z.norm().powi(2)).ln());
            let g = green_fiber_ratio(&f, &region, z, w, TOL, NMAX).unwrap();
            assert!(
                (g.value.to_f64() - expect).abs() <= g.error_bound + 1e-9,
                "at ({z}, {w}): got {:?} want {expect}",
                g
            );
            assert!(g.error_bound <= 1e-9);
        }
    }

    #[test]
    fn fiber_monomial_delta_lt_d() {
        // Example family (z^2, z w^3): G_z = log+ |z w|
        let f = sp(vec![(2, 1)], vec![(1, 3, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();
        let g = green_fiber(&f, &region, c(2.0, 0.0), c(3.0, 0.0), TOL, NMAX);
        assert!((g.value.to_f64() - 6.0f64.ln()).abs() <= g.error_bound + 1e-12);
        assert_eq!(g.status, GreenStatus::Certified);
        assert!(g.error_bound <= TOL);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let z = Complex64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(-3.1..3.1));
            let w = Complex64::from_polar(rng.gen_range(0.1..1000.0), rng.gen_range(-3.1..3.1));
            let expect = log_plus((z.norm() * w.norm()).ln());
            let g = green_fiber(&f, &region, z, w, TOL, NMAX);
            assert!(
                (g.value.to_f64() - expect).abs() <= g.error_bound + 1e-9,
                "at ({z}, {w}): got {:?} want {expect}",
                g
            );
            assert!(g.error_bound <= 1e-9, "bound {} too big", g.error_bound);
        }
    }

    #[test]
    fn fiber_infinite_and_collapsed() {
        // delta > d: G_z = +inf on A_f
        let f = sp(vec![(3, 1)], vec![(2, 2, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();
        let z = c(region.r * 2.0, 0.0);
        let w = c(region.r * (region.r * 2.0).powi(2) * 2.0, 0.0);
        let g = green_fiber(&f, &region, z, w, TOL, NMAX);
        assert_eq!(g.value, ExtReal::PlusInf);
        assert_eq!(g.status, GreenStatus::Certified);

        // (z^2, z w^2) at (2, 0): w collapses, G_z = 0 exactly
        let f = sp(vec![(2, 1)], vec![(1, 2, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();
        let g = green_fiber(&f, &region, c(2.0, 0.0), c(0.0, 0.0), TOL, NMAX);
        assert_eq!(g.value, ExtReal::Finite(0.0));
        assert_eq!(g.status, GreenStatus::Certified);
    }

    #[test]
    fn big_g_monomial_closed_form() {
        // Example family (z^2, z w^2): G = log|w| on z != 0
        let f = sp(vec![(2, 1)], vec![(1, 2, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();

        let g = green_g(&f, &region, c(2.0, 0.0), c(5.0, 0.0), TOL, NMAX).unwrap();
        assert!((g.value.to_f64() - 5.0f64.ln()).abs() <= g.error_bound + 1e-12);
        assert_eq!(g.status, GreenStatus::Certified);

        let g = green_g(&f, &region, c(3.0, 0.0), c(1.0, 0.0), TOL, NMAX).unwrap();
        assert!(g.value.to_f64().abs() <= g.error_bound + 1e-12);

        let g = green_g(&f, &region, c(2.0, 0.0), c(0.0, 0.0), TOL, NMAX).unwrap();
        assert_eq!(g.value, ExtReal::MinusInf);
        assert_eq!(g.status, GreenStatus::Certified);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let z = Complex64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(-3.1..3.1));
            let w = Complex64::from_polar(rng.gen_range(0.1..1000.0), rng.gen_range(-3.1..3.1));
            let expect = w.norm().ln();
            let g = green_g(&f, &region, z, w, TOL, NMAX).unwrap();
            assert!(
                (g.value.to_f64() - expect).abs() <= g.error_bound + 1e-9,
                "at ({z}, {w}): got {:?} want {expect}",
                g
            );
            assert!(g.error_bound <= 1e-9);
        }
    }

    #[test]
    fn big_g_functional_equation() {
        // G(f(z, w)) = d G(z, w) + gamma G_p(z) for delta = d
        let f = sp(vec![(2, 1)], vec![(1, 2, 1), (2, 1, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut tested = 0;
        while tested < 50 {
            let lm_z = region.r.ln() + rng.gen_range(0.05..1.0);
            let lm_w = region.r.ln() + region.alpha * lm_z + rng.gen_range(0.05..1.0);
            let z = Complex64::from_polar(lm_z.exp(), rng.gen_range(-3.1..3.1));
            let w = Complex64::from_polar(lm_w.exp(), rng.gen_range(-3.1..3.1));
            let g = green_g(&f, &region, z, w, TOL, NMAX).unwrap();
            let (fz, fw) = f.apply(z, w);
            let gf = green_g(&f, &region, fz, fw, TOL, NMAX).unwrap();
            let gp = green_base(&f.p, z, TOL, NMAX);
            let lhs = gf.value.to_f64();
            let rhs = 2.0 * g.value.to_f64() + 1.0 * gp.value.to_f64();
            assert!(
                (lhs - rhs).abs() <= 3.0 * TOL + gf.error_bound + 2.0 * g.error_bound + gp.error_bound,
                "G functional equation violated at ({z}, {w}): {lhs} vs {rhs}"
            );
            tested += 1;
        }
    }

    #[test]
    fn fiber_functional_equation_delta_lt_d() {
        // d G_z(w) = G_{p(z)}(q_z(w)) on certified points
        let f = sp(vec![(2, 1)], vec![(1, 3, 1), (0, 2, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let lm_z = region.r.ln() + rng.gen_range(0.05..1.0);
            let lm_w = region.r.ln() + region.alpha * lm_z + rng.gen_range(0.05..1.0);
            let z = Complex64::from_polar(lm_z.exp(), rng.gen_range(-3.1..3.1));
            let w = Complex64::from_polar(lm_w.exp(), rng.gen_range(-3.1..3.1));
            let g = green_fiber(&f, &region, z, w, TOL, NMAX);
            let (fz, fw) = f.apply(z, w);
            let g2 = green_fiber(&f, &region, fz, fw, TOL, NMAX);
            assert!(
                (g2.value.to_f64() - 3.0 * g.value.to_f64()).abs()
                    <= 2.0 * TOL + g2.error_bound + 3.0 * g.error_bound,
                "fiber functional equation violated at ({z}, {w})"
            );
        }
    }

    #[test]
    fn telescoping_contract_on_region_samples() {
        let maps = [
            sp(vec![(3, 1)], vec![(2, 2, 1), (1, 1, 1)]),
            sp(vec![(2, 1)], vec![(1, 3, 1), (0, 2, 1)]),
            sp(vec![(2, 1)], vec![(1, 2, 1), (2, 1, 1)]),
            sp(vec![(2, 1)], vec![(1, 2, 1)]),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for f in &maps {
            let spec = analyze(f);
            let region = certified_region(f, &spec).unwrap();
            let d = f.d as f64;
            let delta = f.delta as f64;
            let gamma = f.gamma as f64;
            for _ in 0..200 {
                let (lz0, lw0) = crate::escape::sample_region_point(&region, &mut rng);
                let z = lz0.to_c64();
                let w = lw0.to_c64();
                // collect the estimator increments along 12 steps
                let orbit: Vec<(LogC, LogC)> = SkewOrbit::new(f, z, w).take(13).collect();
                for n in 0..orbit.len() - 1 {
                    let (lz, lw) = orbit[n];
                    let (lzn, lwn) = orbit[n + 1];
                    let (inc, bound) = if f.delta > f.d {
                        let g_n = (1.0 / d).powi(n as i32)
                            * (lw.log_abs() - region.alpha * lz.log_abs());
                        let g_n1 = (1.0 / d).powi(n as i32 + 1)
                            * (lwn.log_abs() - region.alpha * lzn.log_abs());
                        ((g_n1 - g_n).abs(), region.log_r() / d.powi(n as i32 + 1))
                    } else if f.delta < f.d || f.gamma == 0 {
                        let corr = |k: usize, lmz0: f64| {
                            if f.gamma == 0 {
                                0.0
                            } else {
                                gamma / (d - delta) * (delta / d).powi(k as i32) * lmz0
                            }
                        };
                        let lmz0 = orbit[0].0.log_abs();
                        let g_n = (1.0 / d).powi(n as i32) * lw.log_abs() + corr(n, lmz0);
                        let g_n1 = (1.0 / d).powi(n as i32 + 1) * lwn.log_abs() + corr(n + 1, lmz0);
                        let b = if f.gamma == 0 {
                            region.log_r() / d.powi(n as i32 + 1)
                        } else {
                            gamma / d * (delta / d).powi(n as i32) * region.log_r0()
                                + region.log_r() / d.powi(n as i32 + 1)
                        };
                        ((g_n1 - g_n).abs(), b)
                    } else {
                        let g_n = (1.0 / d).powi(n as i32)
                            * (lw.log_abs() - n as f64 * gamma / d * lz.log_abs());
                        let g_n1 = (1.0 / d).powi(n as i32 + 1)
                            * (lwn.log_abs() - (n as f64 + 1.0) * gamma / d * lzn.log_abs());
                        let b = region.log_r() / d.powi(n as i32 + 1)
                            + (n as f64 + 1.0) / d.powi(n as i32 + 1) * gamma / d
                                * region.log_r0();
                        ((g_n1 - g_n).abs(), b)
                    };
                    assert!(
                        inc <= bound + 1e-11,
                        "telescoping violated for {:?} at n={n}: {inc} > {bound}",
                        f.q
                    );
                }
            }
        }
    }

    #[test]
    fn weighted_cases() {
        // delta > d: alpha G_p everywhere
        let f = sp(vec![(3, 1)], vec![(2, 2, 1)]);
        let spec = analyze(&f);
        let g = green_weighted(&f, &spec, None, c(2.0, 0.0), c(123.0, 4.0), TOL, NMAX).unwrap();
        assert!((g.value.to_f64() - 2.0 * 2.0f64.ln()).abs() <= g.error_bound + 1e-12);
        assert!(g.error_bound <= TOL);

        // delta < d: equals G_z
        let f = sp(vec![(2, 1)], vec![(1, 3, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();
        let g = green_weighted(&f, &spec, Some(&region), c(2.0, 0.0), c(3.0, 0.0), TOL, NMAX)
            .unwrap();
        assert!((g.value.to_f64() - 6.0f64.ln()).abs() <= g.error_bound + 1e-12);

        // delta = d, gamma != 0, point on the collapsed fiber w = 0 with
        // escaping base: max{alpha, 0} G_p, certified
        let f = sp(vec![(2, 1)], vec![(1, 2, 1), (2, 1, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();
        let g = green_weighted(&f, &spec, Some(&region), c(2.0, 0.0), c(0.0, 0.0), TOL, NMAX)
            .unwrap();
        assert!((g.value.to_f64() - 2.0f64.ln()).abs() <= g.error_bound + 1e-12);
        assert_eq!(g.status, GreenStatus::Certified);

        // alpha = -inf rejected
        let f = sp(vec![(2, 1)], vec![(1, 2, 1)]);
        let spec = analyze(&f);
        assert!(matches!(
            green_weighted(&f, &spec, None, c(2.0, 0.0), c(1.0, 0.0), TOL, NMAX),
            Err(Error::WrongCase { .. })
        ));
    }

    #[test]
    fn normalized_limit_monomial() {
        let f = sp(vec![(2, 1)], vec![(1, 2, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();
        // (2, 1): value = log 2 exactly for every n
        let g = green_normalized(&f, &region, c(2.0, 0.0), c(1.0, 0.0), 60).unwrap();
        assert!((g.value.to_f64() - 2.0f64.ln()).abs() < 1e-12);

        // (2, 3) at n = 100: within (2/100) log 3 of log 2
        let g = green_normalized(&f, &region, c(2.0, 0.0), c(3.0, 0.0), 100).unwrap();
        assert!((g.value.to_f64() - 2.0f64.ln()).abs() < 0.05);

        // bounded base
        let g = green_normalized(&f, &region, c(0.5, 0.0), c(7.0, 0.0), 100).unwrap();
        assert!(g.value.to_f64().abs() < 1e-6);
    }

    #[test]
    fn deg_normalized_cases() {
        use crate::algebra::{Poly1 as P1, Poly2 as P2};
        let fe = SkewProduct::new(
            P1::monomial(2, EC::from_int(1)),
            P2::monomial(1, 3, EC::from_int(1)),
        )
        .unwrap();
        let f = fe.to_float();
        let spec = analyze(&f);
        // deg(f^n) = 2*3^n - 2^n; limit = (1/2) log 6 at (2, 3)
        let g = green_deg_normalized(&fe, &f, &spec, c(2.0, 0.0), c(3.0, 0.0), 60, 1 << 20)
            .unwrap();
        assert!(
            (g.value.to_f64() - 0.5 * 6.0f64.ln()).abs() < 1e-6,
            "got {:?}",
            g
        );

        // bounded orbit
        let g = green_deg_normalized(&fe, &f, &spec, c(0.3, 0.0), c(0.3, 0.0), 60, 1 << 20)
            .unwrap();
        assert!(g.value.to_f64().abs() < 1e-9);

        // monomial delta > d: limit = alpha G_p / max{alpha, 1}
        let fe = SkewProduct::new(
            P1::monomial(3, EC::from_int(1)),
            P2::monomial(2, 2, EC::from_int(1)),
        )
        .unwrap();
        let f = fe.to_float();
        let spec = analyze(&f);
        let g = green_deg_normalized(&fe, &f, &spec, c(2.0, 0.0), c(5.0, 0.0), 18, 1 << 20)
            .unwrap();
        let expect = 2.0 * 2.0f64.ln() / 2.0;
        assert!((g.value.to_f64() - expect).abs() < 1e-3, "got {:?}", g);
    }

    #[test]
    fn asymptotics_monomial_exact() {
        let f = sp(vec![(3, 1)], vec![(2, 2, 1)]);
        let spec = analyze(&f);
        let region = certified_region(&f, &spec).unwrap();
        let ladder: Vec<Complex64> = [1e2, 1e4, 1e6].iter().map(|&r| c(r, 0.0)).collect();
        let rows = asymptotic_check(&f, &spec, &region, c(3.0, 0.0), &ladder, TOL, NMAX).unwrap();
        for row in &rows {
            assert!(row.diff < 1e-8, "monomial asymptotic diff {}", row.diff);
        }
    }

    #[test]
    fn harmonicity_probe() {
        // mean over a small w-circle equals the center value (pluriharmonic)
        let maps = [
            sp(vec![(3, 1)], vec![(2, 2, 1), (1, 1, 1)]),
            sp(vec![(2, 1)], vec![(1, 3, 1), (0, 2, 1)]),
        ];
        for f in &maps {
            let spec = analyze(f);
            let region = certified_region(f, &spec).unwrap();
            let tol = 1e-7;
            let z = c(region.r * 1.5, 0.2);
            let w0 = c(region.r * (region.r * 1.5).powf(region.alpha) * 2.0, 0.0);
            let eval = |w: Complex64| -> f64 {
                if f.delta > f.d {
                    green_fiber_ratio(f, &region, z, w, tol, NMAX)
                        .unwrap()
                        .value
                        .to_f64()
                } else {
                    green_fiber(f, &region, z, w, tol, NMAX).value.to_f64()
                }
            };
            let center = eval(w0);
            let rho = 1e-3;
            let mean: f64 = (0..16)
                .map(|k| {
                    let th = std::f64::consts::TAU * k as f64 / 16.0;
                    eval(w0 + Complex64::from_polar(rho, th))
                })
                .sum::<f64>()
                / 16.0;
            assert!(
                (mean - center).abs() < 1e-5,
                "harmonicity probe failed: mean {mean} vs center {center}"
            );
        }
    }

    #[test]
    fn degenerate_fiber_never_enters() {
        // b(z) = z - 3 vanishes at z = 3 inside A_p; the fiber over any
        // preimage of 3 collapses and must never certify entry
        let f = SkewProduct::new(
            Poly1::monomial(3, EC::from_int(1)),
            Poly2::from_terms([(1, 2, EC::from_int(1)), (0, 2, EC::from_int(-3))]),
        )
        .unwrap()
        .to_float();
        let spec = analyze(&f);
        assert!(spec.dominant_monomial_ok);
        let region = certified_region(&f, &spec).unwrap();
        assert!(region.r > 3.0, "region must exclude the root of b");
        for wmag in [0.5, 5.0, 500.0, 5e6] {
            let oc = classify_orbit(&f, &region, c(3.0, 0.0), c(wmag, 0.0), 300);
            assert!(
                !matches!(oc.status, OrbitStatus::EntersWR { .. }),
                "degenerate fiber entered W_R at w = {wmag}"
            );
        }
    }
}
