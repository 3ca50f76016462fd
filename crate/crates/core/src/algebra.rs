//! Sparse exact-exponent polynomials in one and two variables, and the
//! skew-product type `f(z, w) = (p(z), q(z, w))` with formal composition.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coeff::{Coeff, ExactComplex};
use crate::error::{Error, Result};

/// Sparse univariate polynomial; keys are exponents, values nonzero coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly1<C: Coeff> {
    terms: BTreeMap<u32, C>,
}

impl<C: Coeff> Poly1<C> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, C)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// A single monomial c * z^e.
    pub fn monomial(e: u32, c: C) -> Self {
        Self::from_terms([(e, c)])
    }

    pub fn add_term(&mut self, e: u32, c: C) {
        if c.negligible() {
            return;
        }
        match self.terms.remove(&e) {
            None => {
                self.terms.insert(e, c);
            }
            Some(prev) => {
                let sum = prev.add(&c);
                if !sum.negligible() {
                    self.terms.insert(e, sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&C> {
        self.terms.iter().next_back().map(|(_, c)| c)
    }

    pub fn coeff(&self, e: u32) -> Option<&C> {
        self.terms.get(&e)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &C)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                out.add_term(ea + eb, ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            out.add_term(e, c.mul(s));
        }
        out
    }

    /// Horner-style evaluation over exponents sorted descending.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prev: Option<u32> = None;
        for (e, c) in self.terms.iter().rev() {
            match prev {
                None => acc = c.to_c64(),
                Some(pe) => acc = acc * z.powi((pe - e) as i32) + c.to_c64(),
            }
            prev = Some(*e);
        }
        match prev {
            None => Complex64::new(0.0, 0.0),
            Some(e) => acc * z.powi(e as i32),
        }
    }

    /// Substitute another polynomial for the variable.
    pub fn compose(&self, inner: &Self, budget: usize) -> Result<Self> {
        let max_e = match self.degree() {
            None => return Ok(Self::zero()),
            Some(d) => d,
        };
        let mut powers: Vec<Self> = Vec::with_capacity(max_e as usize + 1);
        powers.push(Self::monomial(0, C::one()));
        for i in 1..=max_e {
            let next = powers[(i - 1) as usize].mul(inner);
            if next.term_count() > budget {
                return Err(Error::TermBudgetExceeded { budget });
            }
            powers.push(next);
        }
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            out = out.add(&powers[e as usize].scale(c));
            if out.term_count() > budget {
                return Err(Error::TermBudgetExceeded { budget });
            }
        }
        Ok(out)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly1<D> {
        Poly1::from_terms(self.terms().map(|(e, c)| (e, f(c))))
    }
}

impl Poly1<ExactComplex> {
    pub fn to_float(&self) -> Poly1<Complex64> {
        self.map_coeffs(|c| c.to_c64())
    }
}

/// Sparse bivariate polynomial; keys are `(z_exp, w_exp)` pairs.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly2<C: Coeff> {
    terms: BTreeMap<(u32, u32), C>,
}

impl<C: Coeff> Poly2<C> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, u32, C)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (n, m, c) in terms {
            p.add_term(n, m, c);
        }
        p
    }

    pub fn monomial(n: u32, m: u32, c: C) -> Self {
        Self::from_terms([(n, m, c)])
    }

    pub fn add_term(&mut self, n: u32, m: u32, c: C) {
        if c.negligible() {
            return;
        }
        match self.terms.remove(&(n, m)) {
            None => {
                self.terms.insert((n, m), c);
            }
            Some(prev) => {
                let sum = prev.add(&c);
                if !sum.negligible() {
                    self.terms.insert((n, m), sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree in w, or `None` for the zero polynomial.
    pub fn deg_w(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, m)| m).max()
    }

    pub fn deg_z(&self) -> Option<u32> {
        self.terms.keys().map(|&(n, _)| n).max()
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(n, m)| n + m).max()
    }

    pub fn coeff(&self, n: u32, m: u32) -> Option<&C> {
        self.terms.get(&(n, m))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &C)> {
        self.terms.iter().map(|(&(n, m), c)| (n, m, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient polynomial of w^m, as a polynomial in z.
    pub fn w_coefficient(&self, m: u32) -> Poly1<C> {
        Poly1::from_terms(
            self.terms()
                .filter(|&(_, mm, _)| mm == m)
                .map(|(n, _, c)| (n, c.clone())),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, m, c) in other.terms() {
            out.add_term(n, m, c.clone());
        }
        out
    }

    pub fn mul_checked(&self, other: &Self, budget: usize) -> Result<Self> {
        let mut out = Self::zero();
        for (na, ma, ca) in self.terms() {
            for (nb, mb, cb) in other.terms() {
                out.add_term(na + nb, ma + mb, ca.mul(cb));
            }
            if out.term_count() > budget {
                return Err(Error::TermBudgetExceeded { budget });
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero();
        for (n, m, c) in self.terms() {
            out.add_term(n, m, c.mul(s));
        }
        out
    }

    /// Evaluation as a polynomial in w whose coefficients are Horner forms in z.
    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        // group by w-exponent, descending
        let mut by_m: BTreeMap<u32, Poly1<C>> = BTreeMap::new();
        for (n, m, c) in self.terms() {
            by_m.entry(m).or_insert_with(Poly1::zero).add_term(n, c.clone());
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prev: Option<u32> = None;
        for (m, pz) in by_m.iter().rev() {
            let v = pz.eval(z);
            match prev {
                None => acc = v,
                Some(pm) => acc = acc * w.powi((pm - m) as i32) + v,
            }
            prev = Some(*m);
        }
        match prev {
            None => Complex64::new(0.0, 0.0),
            Some(m) => acc * w.powi(m as i32),
        }
    }

    /// Substitute `z -> zsub(z)` and `w -> wsub(z, w)`.
    pub fn compose(&self, zsub: &Poly1<C>, wsub: &Self, budget: usize) -> Result<Self> {
        let max_n = self.terms.keys().map(|&(n, _)| n).max().unwrap_or(0);
        let max_m = self.deg_w().unwrap_or(0);
        let zsub2 = Self::from_terms(zsub.terms().map(|(e, c)| (e, 0, c.clone())));
        let mut zpow: Vec<Self> = Vec::with_capacity(max_n as usize + 1);
        zpow.push(Self::monomial(0, 0, C::one()));
        for i in 1..=max_n {
            let next = zpow[(i - 1) as usize].mul_checked(&zsub2, budget)?;
            zpow.push(next);
        }
        let mut wpow: Vec<Self> = Vec::with_capacity(max_m as usize + 1);
        wpow.push(Self::monomial(0, 0, C::one()));
        for i in 1..=max_m {
            let next = wpow[(i - 1) as usize].mul_checked(wsub, budget)?;
            wpow.push(next);
        }
        let mut out = Self::zero();
        for (n, m, c) in self.terms() {
            let prod = zpow[n as usize].mul_checked(&wpow[m as usize], budget)?;
            out = out.add(&prod.scale(c));
            if out.term_count() > budget {
                return Err(Error::TermBudgetExceeded { budget });
            }
        }
        Ok(out)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly2<D> {
        Poly2::from_terms(self.terms().map(|(n, m, c)| (n, m, f(c))))
    }
}

impl Poly2<ExactComplex> {
    pub fn to_float(&self) -> Poly2<Complex64> {
        self.map_coeffs(|c| c.to_c64())
    }
}

/// A polynomial skew product `f(z, w) = (p(z), q(z, w))` with its derived
/// integers: delta = deg p, d = deg_w q, gamma = deg b where b is the
/// coefficient polynomial of w^d, and lambda = max(delta, d).
#[derive(Clone, PartialEq, Debug)]
pub struct SkewProduct<C: Coeff> {
    pub p: Poly1<C>,
    pub q: Poly2<C>,
    pub delta: u32,
    pub d: u32,
    pub gamma: u32,
    pub lambda: u32,
}

impl<C: Coeff> SkewProduct<C> {
    /// Validates the standing assumptions delta >= 2 and d >= 2.
    pub fn new(p: Poly1<C>, q: Poly2<C>) -> Result<Self> {
        let delta = p
            .degree()
            .ok_or_else(|| Error::Domain("p must be nonzero".into()))?;
        let d = q
            .deg_w()
            .ok_or_else(|| Error::Domain("q must be nonzero".into()))?;
        if delta < 2 || d < 2 {
            return Err(Error::Domain("delta >= 2 and d >= 2 required".into()));
        }
        let b = q.w_coefficient(d);
        let gamma = b.degree().expect("w-leading coefficient is nonzero");
        Ok(Self {
            p,
            q,
            delta,
            d,
            gamma,
            lambda: delta.max(d),
        })
    }

    /// The coefficient polynomial b(z) of w^d.
    pub fn b(&self) -> Poly1<C> {
        self.q.w_coefficient(self.d)
    }

    pub fn apply(&self, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
        (self.p.eval(z), self.q.eval(z, w))
    }

    /// Formal composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Self, budget: usize) -> Result<Self> {
        let p = self.p.compose(&other.p, budget)?;
        let q = self.q.compose(&other.p, &other.q, budget)?;
        SkewProduct::new(p, q)
    }

    pub fn is_monic(&self) -> bool {
        self.p.leading_coeff().map(|c| *c == C::one()) == Some(true)
            && self.b().leading_coeff().map(|c| *c == C::one()) == Some(true)
    }

    /// Conjugate by sigma(z, w) = (s z, t w) so that p and b become monic.
    /// s is the principal (delta-1)-th root of 1/a and t the principal
    /// (d-1)-th root of 1/(b_gamma s^gamma). Returns `None` when the roots
    /// are not representable in the coefficient type (exact mode only).
    pub fn normalize_monic(&self) -> Option<(Self, (C, C))> {
        if self.is_monic() {
            return Some((self.clone(), (C::one(), C::one())));
        }
        let a = self.p.leading_coeff().expect("p nonzero").clone();
        let s = a.inv().principal_kth_root(self.delta - 1)?;
        let b_lead = self.b().leading_coeff().expect("b nonzero").clone();
        let t = b_lead
            .mul(&s.pow_u(self.gamma))
            .inv()
            .principal_kth_root(self.d - 1)?;
        let s_inv = s.inv();
        let t_inv = t.inv();
        // p_new(z) = p(s z) / s, q_new(z, w) = q(s z, t w) / t
        let p_new = Poly1::from_terms(
            self.p
                .terms()
                .map(|(e, c)| (e, c.mul(&s.pow_u(e)).mul(&s_inv))),
        );
        let q_new = Poly2::from_terms(
            self.q
                .terms()
                .map(|(n, m, c)| (n, m, c.mul(&s.pow_u(n)).mul(&t.pow_u(m)).mul(&t_inv))),
        );
        let f = SkewProduct::new(p_new, q_new).expect("conjugacy preserves degrees");
        Some((f, (s, t)))
    }
}

impl SkewProduct<ExactComplex> {
    pub fn to_float(&self) -> SkewProduct<Complex64> {
        SkewProduct::new(self.p.to_float(), self.q.to_float())
            .expect("float conversion preserves degrees")
    }
}
