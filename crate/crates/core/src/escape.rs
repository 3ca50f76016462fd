//! Certified escape regions W_R with explicit dominance constants
//! r1 < 1 < r2, and orbit classification against them.
//!
//! The constants are derived from coefficient sums: on the region every
//! non-dominant term of q is bounded by a negative power of R, so the sum
//! S(R) of those bounds controls |q / (z^gamma w^d) - 1| (respectively the
//! ratio against w^d or against p(z)^alpha, depending on the case).

use num_complex::Complex64;

use crate::algebra::{Poly1, SkewProduct};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::logpolar::{eval_poly1_log, eval_poly2_log, LogC};
use crate::weights::WeightSpec;

/// Which shape of escape region applies.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RegionKind {
    /// gamma != 0 with finite alpha: { |z| > R, |w| > R |z|^alpha }
    GammaNonzero,
    /// gamma = 0: { |w| > R |z|^alpha, |w| > R^(alpha+1) }
    Nondegenerate,
    /// delta = d with q = b(z) w^d: { |z| > R, w != 0 }
    FiberFree,
}

/// A forward-invariant region on which the dominance inequalities of the
/// applicable case hold with the stored constants.
#[derive(Clone, Debug)]
pub struct EscapeRegion {
    pub r: f64,
    /// Lower/upper dominance ratio bounds. For delta > d these bound
    /// |q/p^alpha| / |w/z^alpha|^d; otherwise they bound |q/(z^gamma w^d)|
    /// (with gamma = 0 for the nondegenerate kind).
    pub r1: f64,
    pub r2: f64,
    pub kind: RegionKind,
    /// alpha as f64; NEG_INFINITY for the fiber-free kind.
    pub alpha: f64,
    /// Base escape radius (r >= r_p) and the coefficient bound of p at r.
    pub r_p: f64,
    pub eps_p: f64,
    /// The non-dominant coefficient sum S(r) <= 1/4.
    pub s_sum: f64,
    pub delta: u32,
    pub d: u32,
    pub gamma: u32,
}

impl EscapeRegion {
    /// max(log(1+eps), -log(1-eps)): two-sided bound for |log|p(z)/z^delta||.
    pub fn log_r0(&self) -> f64 {
        (1.0 + self.eps_p).ln().max(-(1.0 - self.eps_p).ln())
    }

    /// max(-log r1, log r2): two-sided bound for the dominance ratio.
    pub fn log_r(&self) -> f64 {
        (-self.r1.ln()).max(self.r2.ln())
    }
}

/// Coefficient tail of a monic polynomial at radius R:
/// sum over non-leading terms of |a_i| R^(i - delta).
fn coeff_tail(p: &Poly1<Complex64>, radius: f64) -> f64 {
    let delta = p.degree().expect("nonzero") as i32;
    p.terms()
        .filter(|&(e, _)| (e as i32) < delta)
        .map(|(e, c)| c.abs_f64() * radius.powi(e as i32 - delta))
        .sum()
}

/// Returns (R_p, eps_p) with R_p >= 2, eps_p <= 1/2 such that
/// |p(z)/z^delta - 1| <= eps_p for |z| > R_p; such z escape to infinity.
pub fn base_escape_radius(p: &Poly1<Complex64>) -> (f64, f64) {
    let mut r = 2.0;
    while coeff_tail(p, r) > 0.5 {
        r *= 2.0;
    }
    (r, coeff_tail(p, r))
}

/// Non-dominant coefficient sum at radius R for the gamma-carrying kinds.
/// Each term contributes |c| R^((n - gamma) + (1 + alpha)(m - d)); the
/// exponent is < 0 by the choice of alpha.
fn s_sum_gamma(f: &SkewProduct<Complex64>, alpha: f64, radius: f64) -> f64 {
    let (gamma, d) = (f.gamma as f64, f.d as f64);
    f.q.terms()
        .filter(|&(n, m, _)| !(n == f.gamma && m == f.d))
        .map(|(n, m, c)| {
            let e = if m == f.d {
                n as f64 - gamma
            } else {
                (n as f64 - gamma) + (1.0 + alpha) * (m as f64 - d)
            };
            c.abs_f64() * radius.powf(e)
        })
        .sum()
}

/// Non-dominant sum for the nondegenerate kind: |c| R^(n + (alpha+1)(m-d)).
fn s_sum_nondegenerate(f: &SkewProduct<Complex64>, alpha: f64, radius: f64) -> f64 {
    f.q.terms()
        .filter(|&(n, m, _)| !(n == 0 && m == f.d))
        .map(|(n, m, c)| {
            let e = n as f64 + (alpha + 1.0) * (m as f64 - f.d as f64);
            c.abs_f64() * radius.powf(e)
        })
        .sum()
}

/// Builds a certified escape region for a monic-normalized skew product.
///
/// Fails with `DominanceUnavailable` when delta > d and alpha exceeds
/// gamma/(delta-d): there z^gamma w^d does not dominate q on any region of
/// this shape, and only the weighted closed form applies.
pub fn certified_region<C: Coeff>(
    f: &SkewProduct<Complex64>,
    spec: &WeightSpec<C>,
) -> Result<EscapeRegion> {
    if !f.is_monic() {
        return Err(Error::Domain(
            "certified_region requires a monic-normalized map".into(),
        ));
    }
    if !spec.dominant_monomial_ok {
        return Err(Error::DominanceUnavailable);
    }
    let alpha = spec.alpha.to_f64();
    let kind = if f.gamma == 0 {
        RegionKind::Nondegenerate
    } else if !spec.alpha.is_finite() {
        RegionKind::FiberFree
    } else {
        RegionKind::GammaNonzero
    };
    let (r_p, _) = base_escape_radius(&f.p);
    let mut radius = r_p.max(2.0);
    for _ in 0..200 {
        let eps = coeff_tail(&f.p, radius);
        let ok = match kind {
            RegionKind::GammaNonzero | RegionKind::FiberFree => {
                let s = s_sum_gamma(f, alpha, radius);
                let epsfac =
                    (1.0 + eps).powf(alpha.max(0.0)) * (1.0 - eps).powf(alpha.min(0.0));
                let invariance = if kind == RegionKind::FiberFree {
                    true
                } else {
                    (1.0 - s) * radius.powi(f.d as i32 - 1) >= 2.0 * epsfac
                };
                s <= 0.25
                    && invariance
                    && (1.0 - eps) * radius.powi(f.delta as i32 - 1) >= 1.0 + 1e-9
            }
            RegionKind::Nondegenerate => {
                let s = s_sum_nondegenerate(f, alpha, radius);
                let a1 = alpha + 1.0;
                let big_m = (1.0 + coeff_tail(&f.p, r_p)) * r_p.powi(f.delta as i32);
                let c2 = (1.0 - s) * radius.powf(a1 * (f.d as f64 - 1.0)) >= 2.0;
                let c3a = (1.0 - s) * radius.powf(a1 * f.d as f64 - 1.0)
                    >= 2.0 * big_m.powf(alpha.max(0.0));
                let c3b = if alpha > 0.0 {
                    (1.0 - s)
                        * radius.powf(a1 * (f.d as f64 - f.delta as f64) + f.delta as f64 - 1.0)
                        >= 2.0 * (1.0 + eps).powf(alpha)
                } else {
                    true
                };
                s <= 0.25 && c2 && c3a && c3b
            }
        };
        if ok {
            let eps_p = coeff_tail(&f.p, radius);
            let s_sum = match kind {
                RegionKind::Nondegenerate => s_sum_nondegenerate(f, alpha, radius),
                _ => s_sum_gamma(f, alpha, radius),
            };
            let (r1, r2) = if f.delta > f.d && kind == RegionKind::GammaNonzero {
                // inequality against p(z)^alpha picks up the base distortion
                (
                    (1.0 - s_sum) * (1.0 + eps_p).powf(-alpha),
                    (1.0 + s_sum) * (1.0 - eps_p).powf(-alpha),
                )
            } else {
                (1.0 - s_sum, 1.0 + s_sum)
            };
            return Ok(EscapeRegion {
                r: radius,
                r1,
                r2,
                kind,
                alpha,
                r_p,
                eps_p,
                s_sum,
                delta: f.delta,
                d: f.d,
                gamma: f.gamma,
            });
        }
        radius *= 2.0;
    }
    Err(Error::Domain(
        "no certified radius found within 200 doublings".into(),
    ))
}

/// Membership test on log-magnitudes (branch-free: only |z|, |w| enter).
pub fn in_region_log(region: &EscapeRegion, lz: LogC, lw: LogC) -> bool {
    let lm_z = lz.log_abs();
    let lm_w = lw.log_abs();
    let ln_r = region.r.ln();
    match region.kind {
        RegionKind::GammaNonzero => {
            lm_z > ln_r && lm_w > ln_r + region.alpha * lm_z
        }
        RegionKind::Nondegenerate => {
            let weighted = if region.alpha == 0.0 {
                0.0
            } else {
                region.alpha * lm_z
            };
            lm_w > ln_r + weighted && lm_w > (region.alpha + 1.0) * ln_r
        }
        RegionKind::FiberFree => lm_z > ln_r && !lw.is_zero(),
    }
}

pub fn in_region(region: &EscapeRegion, z: Complex64, w: Complex64) -> bool {
    in_region_log(region, LogC::from_c64(z), LogC::from_c64(w))
}

/// Classification of one orbit against the region and the base dynamics.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrbitStatus {
    /// First entry step into W_R; forward invariance then certifies the
    /// point in A_f.
    EntersWR { entry: usize },
    /// |p^n(z)| stayed <= R_p for all checked steps.
    BaseBounded { steps: usize },
    Undecided { steps: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BaseStatus {
    BaseEscapes { step: usize },
    BaseBoundedSoFar,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OrbitClass {
    pub status: OrbitStatus,
    pub base: BaseStatus,
}

/// Magnitude band outside which iteration switches to log-polar form.
const PLAIN_BAND_LO: f64 = 1e-100;
const PLAIN_BAND_HI: f64 = 1e100;
/// Log-magnitude cap: past this the orbit state itself leaves f64 range.
pub const LM_MAX: f64 = 1e300;

fn out_of_band(v: Complex64) -> bool {
    let m = v.norm();
    !m.is_finite() || (m != 0.0 && !(PLAIN_BAND_LO..=PLAIN_BAND_HI).contains(&m))
}

/// Whether a log-polar state has left the representable log range
/// (exact zeros are fine; only finite-but-huge log-magnitudes fuse).
fn log_range_exhausted(l: LogC) -> bool {
    match l {
        LogC::Zero => false,
        LogC::Val { lm, .. } => !lm.is_finite() || lm.abs() > LM_MAX,
    }
}

enum State {
    Plain(Complex64, Complex64),
    Log(LogC, LogC),
}

impl State {
    fn logs(&self) -> (LogC, LogC) {
        match self {
            State::Plain(z, w) => (LogC::from_c64(*z), LogC::from_c64(*w)),
            State::Log(z, w) => (*z, *w),
        }
    }
}

/// Iterator over the orbit of f in log-polar form. Yields the image of
/// f^k(z, w) for k = 0, 1, ...; fuses once a log-magnitude exceeds
/// [`LM_MAX`]. Arithmetic runs in plain `Complex64` while magnitudes stay
/// inside [1e-100, 1e100] and in log-polar form outside, so escape toward
/// infinity never overflows.
pub struct SkewOrbit<'a> {
    f: &'a SkewProduct<Complex64>,
    state: Option<State>,
}

impl<'a> SkewOrbit<'a> {
    pub fn new(f: &'a SkewProduct<Complex64>, z: Complex64, w: Complex64) -> Self {
        Self {
            f,
            state: Some(State::Plain(z, w)),
        }
    }
}

impl Iterator for SkewOrbit<'_> {
    type Item = (LogC, LogC);

    fn next(&mut self) -> Option<(LogC, LogC)> {
        let state = self.state.take()?;
        let (lz, lw) = state.logs();
        if log_range_exhausted(lz) || log_range_exhausted(lw) {
            return None;
        }
        self.state = Some(match state {
            State::Plain(pz, pw) => {
                let (nz, nw) = self.f.apply(pz, pw);
                if out_of_band(nz) || out_of_band(nw) {
                    // redo the step in log form from the previous state
                    let (plz, plw) = (LogC::from_c64(pz), LogC::from_c64(pw));
                    State::Log(
                        eval_poly1_log(&self.f.p, plz),
                        eval_poly2_log(&self.f.q, plz, plw),
                    )
                } else {
                    State::Plain(nz, nw)
                }
            }
            State::Log(plz, plw) => State::Log(
                eval_poly1_log(&self.f.p, plz),
                eval_poly2_log(&self.f.q, plz, plw),
            ),
        });
        Some((lz, lw))
    }
}

/// Base-only orbit iterator for p, same overflow strategy as [`SkewOrbit`].
pub struct BaseOrbit<'a> {
    p: &'a Poly1<Complex64>,
    plain: Option<Complex64>,
    log: Option<LogC>,
}

impl<'a> BaseOrbit<'a> {
    pub fn new(p: &'a Poly1<Complex64>, z: Complex64) -> Self {
        Self {
            p,
            plain: Some(z),
            log: None,
        }
    }
}

impl Iterator for BaseOrbit<'_> {
    type Item = LogC;

    fn next(&mut self) -> Option<LogC> {
        if let Some(z) = self.plain {
            let out = LogC::from_c64(z);
            let nz = self.p.eval(z);
            if out_of_band(nz) {
                self.plain = None;
                self.log = Some(eval_poly1_log(self.p, out));
            } else {
                self.plain = Some(nz);
            }
            return Some(out);
        }
        let lz = self.log.take()?;
        if log_range_exhausted(lz) {
            return None;
        }
        self.log = Some(eval_poly1_log(self.p, lz));
        Some(lz)
    }
}

/// Iterates f, reporting the first W_R entry, base-boundedness, or Undecided.
pub fn classify_orbit(
    f: &SkewProduct<Complex64>,
    region: &EscapeRegion,
    z: Complex64,
    w: Complex64,
    n_max: usize,
) -> OrbitClass {
    let mut base = BaseStatus::BaseBoundedSoFar;
    let ln_rp = region.r_p.ln();
    let mut orbit = SkewOrbit::new(f, z, w);
    let mut last = 0usize;
    for n in 0..=n_max {
        let (lz, lw) = match orbit.next() {
            Some(s) => s,
            None => {
                return OrbitClass {
                    status: OrbitStatus::Undecided { steps: last },
                    base,
                }
            }
        };
        last = n;
        if base == BaseStatus::BaseBoundedSoFar && lz.log_abs() > ln_rp {
            base = BaseStatus::BaseEscapes { step: n };
        }
        if in_region_log(region, lz, lw) {
            return OrbitClass {
                status: OrbitStatus::EntersWR { entry: n },
                base,
            };
        }
    }
    let status = match base {
        BaseStatus::BaseBoundedSoFar => OrbitStatus::BaseBounded { steps: n_max },
        BaseStatus::BaseEscapes { .. } => OrbitStatus::Undecided { steps: n_max },
    };
    OrbitClass { status, base }
}

/// Samples a log-polar point log-uniformly in a slab just inside the region.
#[cfg(test)]
pub(crate) fn sample_region_point(
    region: &EscapeRegion,
    rng: &mut impl rand::Rng,
) -> (LogC, LogC) {
    let u: f64 = rng.gen_range(0.02..1.5);
    let v: f64 = rng.gen_range(0.02..1.5);
    let lm_z = region.r.ln() + u;
    let lm_w = match region.kind {
        RegionKind::GammaNonzero => region.r.ln() + region.alpha * lm_z + v,
        RegionKind::Nondegenerate => (region.r.ln() + region.alpha * lm_z + v)
            .max((region.alpha + 1.0) * region.r.ln() + v),
        RegionKind::FiberFree => rng.gen_range(-3.0..3.0),
    };
    let arg_z = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let arg_w = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    (
        LogC::Val { lm: lm_z, arg: arg_z },
        LogC::Val { lm: lm_w, arg: arg_w },
    )
}
