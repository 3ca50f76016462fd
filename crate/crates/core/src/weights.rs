//! The weight alpha of a skew product, its case analysis, the weighted
//! homogeneous top part h of q, and weight growth of iterates.
//!
//! All weight arithmetic is exact rational; alpha is never floated.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{Poly1, Poly2, SkewProduct};
use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// An exact rational extended with minus infinity. The infinite value arises
/// only for delta = d with q = b(z) w^d.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExtendedRational {
    Finite(BigRational),
    NegInfinity,
}

impl ExtendedRational {
    pub fn from_int(n: i64) -> Self {
        ExtendedRational::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        ExtendedRational::Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtendedRational::Finite(r) => Some(r),
            ExtendedRational::NegInfinity => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRational::Finite(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedRational::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            ExtendedRational::NegInfinity => f64::NEG_INFINITY,
        }
    }
}

impl std::fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedRational::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ExtendedRational::NegInfinity => write!(f, "-inf"),
        }
    }
}

/// Relation between the base degree delta and the fiber degree d.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DeltaRel {
    Gt,
    Lt,
    Eq,
}

/// Which branch of the case analysis produced alpha.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CaseTag {
    pub rel: DeltaRel,
    pub gamma_zero: bool,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rel = match self.rel {
            DeltaRel::Gt => "delta>d",
            DeltaRel::Lt => "delta<d",
            DeltaRel::Eq => "delta=d",
        };
        let g = if self.gamma_zero { "gamma=0" } else { "gamma!=0" };
        write!(f, "{rel}, {g}")
    }
}

/// The weight alpha together with the top part h and case bookkeeping.
#[derive(Clone, Debug)]
pub struct WeightSpec<C: Coeff> {
    pub alpha: ExtendedRational,
    pub case_tag: CaseTag,
    /// Weighted homogeneous part of q of maximal weight. For alpha = -inf
    /// (q = b(z) w^d) every term has w-exponent d and h = q.
    pub h: Poly2<C>,
    /// True iff z^gamma w^d attains the maximal weight: always for
    /// delta <= d, and for delta > d exactly when alpha = gamma/(delta-d).
    pub dominant_monomial_ok: bool,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_uu(num: u32, den: u32) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The weight alpha of f per the case analysis on (delta vs d, gamma).
pub fn alpha<C: Coeff>(f: &SkewProduct<C>) -> ExtendedRational {
    let delta = f.delta;
    let d = f.d;
    let gamma = f.gamma;
    if gamma == 0 {
        // nondegenerate definition with lambda = max(delta, d):
        // alpha = max n_j / (lambda - m_j) over terms with m_j < lambda,
        // and 0 when q has no z at all.
        let lambda = f.lambda;
        let mut best: Option<BigRational> = None;
        for (n, m, _) in f.q.terms() {
            if m < lambda {
                let cand = rat_uu(n, lambda - m);
                if best.as_ref().map(|b| cand > *b).unwrap_or(true) {
                    best = Some(cand);
                }
            }
        }
        ExtendedRational::Finite(best.unwrap_or_else(BigRational::zero))
    } else if delta > d {
        let mut best: Option<BigRational> = None;
        for (n, m, _) in f.q.terms() {
            let cand = rat_uu(n, delta - m);
            if best.as_ref().map(|b| cand > *b).unwrap_or(true) {
                best = Some(cand);
            }
        }
        ExtendedRational::Finite(best.expect("q is nonzero"))
    } else {
        // delta <= d, gamma != 0
        let mut best: Option<BigRational> = None;
        if delta < d {
            best = Some(-rat_uu(gamma, d - delta));
        }
        for (n, m, _) in f.q.terms() {
            if m < d {
                let cand = (rat(n as i64) - rat(gamma as i64)) / rat((d - m) as i64);
                if best.as_ref().map(|b| cand > *b).unwrap_or(true) {
                    best = Some(cand);
                }
            }
        }
        match best {
            Some(a) => ExtendedRational::Finite(a),
            // delta = d and every term sits at w-exponent d: q = b(z) w^d
            None => ExtendedRational::NegInfinity,
        }
    }
}

/// Weight of a single monomial z^n w^m, namely n + alpha m.
pub fn monomial_weight(n: u32, m: u32, alpha: &BigRational) -> BigRational {
    rat(n as i64) + alpha * rat(m as i64)
}

/// Maximal weight n + alpha m over the stored terms of q.
pub fn weight_of_poly<C: Coeff>(q: &Poly2<C>, alpha: &ExtendedRational) -> Result<BigRational> {
    let a = alpha.finite().ok_or(Error::AlphaNotFinite)?;
    q.terms()
        .map(|(n, m, _)| monomial_weight(n, m, a))
        .max()
        .ok_or_else(|| Error::Domain("weight of the zero polynomial".into()))
}

/// Sub-polynomial of q consisting of all terms of maximal weight.
pub fn weighted_top_part<C: Coeff>(q: &Poly2<C>, alpha: &ExtendedRational) -> Result<Poly2<C>> {
    let a = alpha.finite().ok_or(Error::AlphaNotFinite)?;
    let top = weight_of_poly(q, alpha)?;
    Ok(Poly2::from_terms(q.terms().filter_map(|(n, m, c)| {
        if monomial_weight(n, m, a) == top {
            Some((n, m, c.clone()))
        } else {
            None
        }
    })))
}

/// The one-variable restriction c -> h(1, c).
pub fn h_restricted<C: Coeff>(h: &Poly2<C>) -> Poly1<C> {
    let mut out = Poly1::zero();
    for (_, m, c) in h.terms() {
        out.add_term(m, c.clone());
    }
    out
}

/// Full weight analysis of a skew product.
pub fn analyze<C: Coeff>(f: &SkewProduct<C>) -> WeightSpec<C> {
    let a = alpha(f);
    let case_tag = CaseTag {
        rel: if f.delta > f.d {
            DeltaRel::Gt
        } else if f.delta < f.d {
            DeltaRel::Lt
        } else {
            DeltaRel::Eq
        },
        gamma_zero: f.gamma == 0,
    };
    let (h, dominant_monomial_ok) = match &a {
        ExtendedRational::Finite(afin) => {
            let h = weighted_top_part(&f.q, &a).expect("finite alpha");
            let ok = if f.delta > f.d {
                *afin == rat_uu(f.gamma, f.delta - f.d)
            } else {
                true
            };
            (h, ok)
        }
        // q = b(z) w^d: every term already has maximal w-exponent
        ExtendedRational::NegInfinity => (f.q.clone(), true),
    };
    WeightSpec {
        alpha: a,
        case_tag,
        h,
        dominant_monomial_ok,
    }
}

fn big_pow(base: u32, e: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(base).pow(e))
}

/// gamma_n = (delta^{n-1} + delta^{n-2} d + ... + d^{n-1}) gamma
pub fn gamma_n(delta: u32, d: u32, gamma: u32, n: u32) -> BigRational {
    let mut sum = BigRational::zero();
    for i in 0..n {
        sum += big_pow(delta, n - 1 - i) * big_pow(d, i);
    }
    sum * rat(gamma as i64)
}

/// One weight-growth comparison: the actual maximal weight of the fiber
/// component of f^n against the case prediction.
#[derive(Clone, Debug)]
pub struct WeightGrowthReport {
    pub n: u32,
    pub predicted: BigRational,
    pub actual: BigRational,
    pub matches: bool,
}

/// Symbolically composes f with itself n times and compares the maximal
/// weight of Q_z^n to the prediction: alpha lambda^n when gamma = 0,
/// alpha delta^n when delta > d, gamma_n + alpha d^n when delta <= d.
pub fn check_weight_growth<C: Coeff>(
    f: &SkewProduct<C>,
    n: u32,
    budget: usize,
) -> Result<WeightGrowthReport> {
    let a = alpha(f);
    let afin = a.finite().ok_or(Error::AlphaNotFinite)?.clone();
    let mut iterate = f.clone();
    for _ in 1..n {
        iterate = f.compose(&iterate, budget)?;
    }
    let actual = weight_of_poly(&iterate.q, &a)?;
    let predicted = if f.gamma == 0 {
        &afin * big_pow(f.lambda, n)
    } else if f.delta > f.d {
        &afin * big_pow(f.delta, n)
    } else {
        gamma_n(f.delta, f.d, f.gamma, n) + &afin * big_pow(f.d, n)
    };
    let matches = actual == predicted;
    Ok(WeightGrowthReport {
        n,
        predicted,
        actual,
        matches,
    })
}
