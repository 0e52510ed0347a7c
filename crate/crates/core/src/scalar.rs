//! Coefficient algebra: finite sums of `c * monomial * exp(i <k, x>)`.
//!
//! Every value is kept in canonical form. Two canonical scalars represent the
//! same function (up to [`ZERO_TOL`]) exactly when their term lists agree.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;
use thiserror::Error;

/// Coefficients with magnitude at or below this are pruned.
pub const ZERO_TOL: f64 = 1e-9;
/// Frequencies closer than this are merged.
pub const FREQ_TOL: f64 = 1e-12;
/// Largest polynomial exponent a term may carry.
pub const EXPONENT_CAP: u32 = 16;

/// Coordinate name.
pub type Var = Arc<str>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("exponent {exponent} of `{var}` exceeds the cap of {cap}")]
    ExponentCap {
        var: String,
        exponent: u32,
        cap: u32,
    },
    #[error("no value assigned to coordinate `{0}`")]
    MissingCoordinate(String),
    #[error("division by a scalar that is not a single exponential term")]
    NotInvertible,
}

/// One summand `coeff * prod(var^pow) * exp(i * sum(freq * var))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    /// Sorted by name, every exponent positive.
    pub powers: Vec<(Var, u32)>,
    /// Sorted by name, every frequency nonzero.
    pub freqs: Vec<(Var, f64)>,
}

impl Term {
    fn key_cmp(&self, other: &Term) -> Ordering {
        cmp_freqs(&self.freqs, &other.freqs).then_with(|| self.powers.cmp(&other.powers))
    }

    fn same_key(&self, other: &Term) -> bool {
        self.powers == other.powers
            && self.freqs.len() == other.freqs.len()
            && self
                .freqs
                .iter()
                .zip(&other.freqs)
                .all(|(a, b)| a.0 == b.0 && a.1 == b.1)
    }

    fn degree_in(&self, var: &str) -> u32 {
        self.powers
            .iter()
            .find(|(v, _)| &**v == var)
            .map_or(0, |(_, p)| *p)
    }

    fn freq_in(&self, var: &str) -> f64 {
        self.freqs
            .iter()
            .find(|(v, _)| &**v == var)
            .map_or(0.0, |(_, k)| *k)
    }

    fn is_pure_constant(&self) -> bool {
        self.powers.is_empty() && self.freqs.is_empty()
    }
}

fn cmp_freqs(a: &[(Var, f64)], b: &[(Var, f64)]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.0.cmp(&y.0).then_with(|| x.1.total_cmp(&y.1));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

fn merge_powers(a: &[(Var, u32)], b: &[(Var, u32)]) -> Result<Vec<(Var, u32)>, ScalarError> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let pick = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match pick {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let exponent = a[i].1 + b[j].1;
                if exponent > EXPONENT_CAP {
                    return Err(ScalarError::ExponentCap {
                        var: a[i].0.to_string(),
                        exponent,
                        cap: EXPONENT_CAP,
                    });
                }
                out.push((a[i].0.clone(), exponent));
                i += 1;
                j += 1;
            }
        }
    }
    Ok(out)
}

fn merge_freqs(a: &[(Var, f64)], b: &[(Var, f64)]) -> Vec<(Var, f64)> {
    let mut out: Vec<(Var, f64)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let pick = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match pick {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let k = a[i].1 + b[j].1;
                if k.abs() > FREQ_TOL {
                    out.push((a[i].0.clone(), k));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Element of the coefficient algebra, always canonical.
#[derive(Debug, Clone, Default)]
pub struct Scalar {
    terms: Vec<Term>,
}

impl PartialEq for Scalar {
    /// Equality up to the zero threshold.
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_terms(vec![Term {
            coeff: c,
            powers: Vec::new(),
            freqs: Vec::new(),
        }])
    }

    pub fn real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    pub fn imag_unit() -> Self {
        Self::constant(Complex64::i())
    }

    /// The coordinate function `var`.
    pub fn var(var: &str) -> Self {
        Self::from_terms(vec![Term {
            coeff: Complex64::new(1.0, 0.0),
            powers: vec![(Var::from(var), 1)],
            freqs: Vec::new(),
        }])
    }

    /// `exp(i * k * var)`.
    pub fn exp_i(var: &str, k: f64) -> Self {
        let freqs = if k.abs() > FREQ_TOL {
            vec![(Var::from(var), k)]
        } else {
            Vec::new()
        };
        Self::from_terms(vec![Term {
            coeff: Complex64::new(1.0, 0.0),
            powers: Vec::new(),
            freqs,
        }])
    }

    /// `cos(k * var)`.
    pub fn cos(var: &str, k: f64) -> Self {
        (Self::exp_i(var, k) + Self::exp_i(var, -k)) * Complex64::new(0.5, 0.0)
    }

    /// `sin(k * var)`.
    pub fn sin(var: &str, k: f64) -> Self {
        (Self::exp_i(var, k) - Self::exp_i(var, -k)) * Complex64::new(0.0, -0.5)
    }

    /// Builds a canonical scalar from arbitrary terms.
    pub fn from_terms(mut terms: Vec<Term>) -> Self {
        snap_frequencies(&mut terms);
        terms.sort_by(|a, b| a.key_cmp(b));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.same_key(&t) => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.norm() > ZERO_TOL);
        Scalar { terms: merged }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this scalar does not depend on any coordinate.
    pub fn as_constant(&self) -> Option<Complex64> {
        match self.terms.as_slice() {
            [] => Some(Complex64::new(0.0, 0.0)),
            [t] if t.is_pure_constant() => Some(t.coeff),
            _ => None,
        }
    }

    /// True for a single term without polynomial factors, i.e. a unit of the algebra.
    pub fn is_unit(&self) -> bool {
        matches!(self.terms.as_slice(), [t] if t.powers.is_empty())
    }

    /// Inverse of a unit.
    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        match self.terms.as_slice() {
            [t] if t.powers.is_empty() => Ok(Scalar::from_terms(vec![Term {
                coeff: Complex64::new(1.0, 0.0) / t.coeff,
                powers: Vec::new(),
                freqs: t.freqs.iter().map(|(v, k)| (v.clone(), -k)).collect(),
            }])),
            _ => Err(ScalarError::NotInvertible),
        }
    }

    /// Divides by a real number without passing through complex division.
    pub fn div_real(&self, x: f64) -> Scalar {
        Scalar::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: Complex64::new(t.coeff.re / x, t.coeff.im / x),
                    ..t.clone()
                })
                .collect(),
        )
    }

    /// Coordinates this scalar depends on, sorted.
    pub fn variables(&self) -> Vec<Var> {
        let mut vars: Vec<Var> = self
            .terms
            .iter()
            .flat_map(|t| {
                t.powers
                    .iter()
                    .map(|p| p.0.clone())
                    .chain(t.freqs.iter().map(|f| f.0.clone()))
            })
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    pub fn depends_on(&self, var: &str) -> bool {
        self.terms
            .iter()
            .any(|t| t.degree_in(var) > 0 || t.freq_in(var) != 0.0)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(Term {
                    coeff: a.coeff * b.coeff,
                    powers: merge_powers(&a.powers, &b.powers)?,
                    freqs: merge_freqs(&a.freqs, &b.freqs),
                });
            }
        }
        Ok(Scalar::from_terms(out))
    }

    /// Integer power by repeated multiplication.
    pub fn checked_pow(&self, n: u32) -> Result<Scalar, ScalarError> {
        let mut acc = Scalar::one();
        for _ in 0..n {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Exact partial derivative.
    pub fn differentiate(&self, var: &str) -> Scalar {
        let mut out = Vec::new();
        for t in &self.terms {
            let p = t.degree_in(var);
            if p > 0 {
                let powers = t
                    .powers
                    .iter()
                    .filter_map(|(v, e)| {
                        if &**v == var {
                            (e - 1 > 0).then(|| (v.clone(), e - 1))
                        } else {
                            Some((v.clone(), *e))
                        }
                    })
                    .collect();
                out.push(Term {
                    coeff: t.coeff * p as f64,
                    powers,
                    freqs: t.freqs.clone(),
                });
            }
            let k = t.freq_in(var);
            if k != 0.0 {
                out.push(Term {
                    coeff: t.coeff * Complex64::new(0.0, k),
                    ..t.clone()
                });
            }
        }
        Scalar::from_terms(out)
    }

    /// `int_0^1 a dtau` over the coordinate `var`, with integration by parts
    /// for polynomial factors in `var`.
    pub fn integrate_unit_period(&self, var: &str) -> Scalar {
        let out = self
            .terms
            .iter()
            .map(|t| {
                let p = t.degree_in(var);
                let k = t.freq_in(var);
                Term {
                    coeff: t.coeff * monomial_exp_integral(p, k),
                    powers: t
                        .powers
                        .iter()
                        .filter(|(v, _)| &**v != var)
                        .cloned()
                        .collect(),
                    freqs: t
                        .freqs
                        .iter()
                        .filter(|(v, _)| &**v != var)
                        .cloned()
                        .collect(),
                }
            })
            .collect();
        Scalar::from_terms(out)
    }

    /// Numeric value; `lookup` supplies coordinate values.
    pub fn evaluate<F>(&self, lookup: F) -> Result<Complex64, ScalarError>
    where
        F: Fn(&str) -> Option<f64>,
    {
        let mut sum = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let mut value = t.coeff;
            for (v, e) in &t.powers {
                let x = lookup(v).ok_or_else(|| ScalarError::MissingCoordinate(v.to_string()))?;
                value *= x.powi(*e as i32);
            }
            let mut phase = 0.0;
            for (v, k) in &t.freqs {
                let x = lookup(v).ok_or_else(|| ScalarError::MissingCoordinate(v.to_string()))?;
                phase += k * x;
            }
            if phase != 0.0 {
                value *= Complex64::from_polar(1.0, phase);
            }
            sum += value;
        }
        Ok(sum)
    }

    pub fn conjugate(&self) -> Scalar {
        Scalar::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.conj(),
                    powers: t.powers.clone(),
                    freqs: t.freqs.iter().map(|(v, k)| (v.clone(), -k)).collect(),
                })
                .collect(),
        )
    }

    /// True when every term has a conjugate partner, i.e. the function is real valued.
    pub fn is_real(&self) -> bool {
        (self - &self.conjugate()).is_zero()
    }

    /// Real-valued, with every monomial of total degree at most one and no
    /// frequencies: `c0 + sum c_v v`. Returns `(c0, [(v, c_v)])`.
    pub fn as_affine(&self) -> Option<(Complex64, Vec<(Var, Complex64)>)> {
        let mut c0 = Complex64::new(0.0, 0.0);
        let mut lin = Vec::new();
        for t in &self.terms {
            if !t.freqs.is_empty() {
                return None;
            }
            match t.powers.as_slice() {
                [] => c0 += t.coeff,
                [(v, 1)] => lin.push((v.clone(), t.coeff)),
                _ => return None,
            }
        }
        Some((c0, lin))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest coefficient magnitude, a crude size measure.
    pub fn max_coeff(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.norm())
            .fold(0.0, f64::max)
    }
}

/// `int_0^1 tau^p exp(i k tau) dtau`.
fn monomial_exp_integral(p: u32, k: f64) -> Complex64 {
    if k.abs() <= FREQ_TOL {
        return Complex64::new(1.0 / (p as f64 + 1.0), 0.0);
    }
    let ik = Complex64::new(0.0, k);
    let e = Complex64::from_polar(1.0, k);
    let mut acc = (e - 1.0) / ik;
    for j in 1..=p {
        acc = e / ik - acc * (j as f64) / ik;
    }
    acc
}

/// Replaces frequencies that agree within [`FREQ_TOL`] by one representative
/// per coordinate so that sorting and merging become exact.
fn snap_frequencies(terms: &mut [Term]) {
    let mut seen: Vec<(Var, Vec<f64>)> = Vec::new();
    for t in terms.iter() {
        for (v, k) in &t.freqs {
            match seen.iter_mut().find(|(w, _)| w == v) {
                Some((_, ks)) => ks.push(*k),
                None => seen.push((v.clone(), vec![*k])),
            }
        }
    }
    if seen.iter().all(|(_, ks)| ks.len() < 2) {
        return;
    }
    for (_, ks) in &mut seen {
        ks.sort_by(f64::total_cmp);
        let mut rep = ks[0];
        for k in ks.iter_mut() {
            if (*k - rep).abs() <= FREQ_TOL {
                *k = rep;
            } else {
                rep = *k;
            }
        }
    }
    let snap = |v: &Var, k: f64| -> f64 {
        let (_, ks) = seen.iter().find(|(w, _)| w == v).expect("collected above");
        let i = ks.partition_point(|x| *x < k - FREQ_TOL);
        match ks.get(i) {
            Some(r) if (r - k).abs() <= 2.0 * FREQ_TOL => *r,
            _ => k,
        }
    };
    for t in terms.iter_mut() {
        for f in t.freqs.iter_mut() {
            f.1 = snap(&f.0, f.1);
        }
    }
}

// ---------------------------------------------------------------------------
// operators

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        Scalar::from_terms(terms)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: -t.coeff,
                    ..t.clone()
                })
                .collect(),
        }
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics if the product exceeds [`EXPONENT_CAP`]; use
    /// [`Scalar::checked_mul`] on untrusted input.
    fn mul(self, rhs: &Scalar) -> Scalar {
        match self.checked_mul(rhs) {
            Ok(s) => s,
            Err(e) => panic!("{e}"),
        }
    }
}

impl Mul<Complex64> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Complex64) -> Scalar {
        Scalar::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * rhs,
                    ..t.clone()
                })
                .collect(),
        )
    }
}

impl Mul<f64> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: f64) -> Scalar {
        Scalar::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * rhs,
                    ..t.clone()
                })
                .collect(),
        )
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Mul<Complex64> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Complex64) -> Scalar {
        &self * rhs
    }
}

impl Mul<f64> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: f64) -> Scalar {
        &self * rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::real(x)
    }
}

impl From<Complex64> for Scalar {
    fn from(c: Complex64) -> Self {
        Scalar::constant(c)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let terms: Vec<Term> = iter.flat_map(|s| s.terms).collect();
        Scalar::from_terms(terms)
    }
}

// ---------------------------------------------------------------------------
// rendering

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pieces = self.render_pieces();
        if pieces.is_empty() {
            return f.write_str("0");
        }
        for (i, (negative, body)) in pieces.iter().enumerate() {
            match (i, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => f.write_str(body)?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl Scalar {
    /// True when the rendering is a single product (no top-level sum).
    pub fn renders_as_product(&self) -> bool {
        self.render_pieces().len() <= 1
    }

    fn render_pieces(&self) -> Vec<(bool, String)> {
        let mut used = vec![false; self.terms.len()];
        let mut pieces = Vec::new();
        for i in 0..self.terms.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let t = &self.terms[i];
            if t.freqs.is_empty() {
                pieces.push(render_product(t.coeff, &t.powers, None));
                continue;
            }
            let partner = (0..self.terms.len()).find(|&j| {
                !used[j]
                    && self.terms[j].powers == t.powers
                    && self.terms[j].freqs.len() == t.freqs.len()
                    && self.terms[j]
                        .freqs
                        .iter()
                        .zip(&t.freqs)
                        .all(|(a, b)| a.0 == b.0 && a.1 == -b.1)
            });
            let positive = t.freqs[0].1 > 0.0;
            match partner {
                Some(j) => {
                    used[j] = true;
                    let (plus, minus, theta) = if positive {
                        (t.coeff, self.terms[j].coeff, &t.freqs)
                    } else {
                        (self.terms[j].coeff, t.coeff, &self.terms[j].freqs)
                    };
                    let (a, b) = if minus == plus.conj() {
                        (
                            Complex64::new(2.0 * plus.re, 0.0),
                            Complex64::new(-2.0 * plus.im, 0.0),
                        )
                    } else {
                        (plus + minus, Complex64::i() * (plus - minus))
                    };
                    let arg = render_linear(theta, false);
                    if a.norm() > ZERO_TOL {
                        pieces.push(render_product(a, &t.powers, Some(format!("cos({arg})"))));
                    }
                    if b.norm() > ZERO_TOL {
                        pieces.push(render_product(b, &t.powers, Some(format!("sin({arg})"))));
                    }
                }
                None => {
                    let arg = render_linear(&t.freqs, true);
                    pieces.push(render_product(
                        t.coeff,
                        &t.powers,
                        Some(format!("exp({arg})")),
                    ));
                }
            }
        }
        pieces
    }
}

/// Renders `sum k_v v` (times `i` when `imaginary`).
fn render_linear(freqs: &[(Var, f64)], imaginary: bool) -> String {
    let mut out = String::new();
    for (n, (v, k)) in freqs.iter().enumerate() {
        let negative = *k < 0.0;
        let mag = k.abs();
        let mut body = if mag == 1.0 {
            String::new()
        } else {
            format!("{}*", render_real(mag))
        };
        if imaginary {
            body.push_str("i*");
        }
        body.push_str(v);
        match (n, negative) {
            (0, true) => out.push('-'),
            (_, true) => out.push_str(" - "),
            (0, false) => {}
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

/// Returns `(leading minus, body)` for `coeff * powers * func`.
fn render_product(coeff: Complex64, powers: &[(Var, u32)], func: Option<String>) -> (bool, String) {
    let mut factors: Vec<String> = Vec::new();
    for (v, e) in powers {
        factors.push(if *e == 1 {
            v.to_string()
        } else {
            format!("{v}^{e}")
        });
    }
    if let Some(f) = func {
        factors.push(f);
    }
    let (negative, c) = render_coeff(coeff);
    let body = match (c, factors.is_empty()) {
        (None, true) => "1".to_string(),
        (None, false) => factors.join("*"),
        (Some(c), true) => c,
        (Some(c), false) => format!("{c}*{}", factors.join("*")),
    };
    (negative, body)
}

/// Coefficient with its sign pulled out; `None` stands for magnitude one.
fn render_coeff(c: Complex64) -> (bool, Option<String>) {
    if c.im == 0.0 {
        let negative = c.re < 0.0;
        let mag = c.re.abs();
        return (negative, (mag != 1.0).then(|| render_real(mag)));
    }
    if c.re == 0.0 {
        let negative = c.im < 0.0;
        let mag = c.im.abs();
        let body = if mag == 1.0 {
            "i".to_string()
        } else {
            format!("{}*i", render_real(mag))
        };
        return (negative, Some(body));
    }
    let re = if c.re < 0.0 {
        format!("-{}", render_real(-c.re))
    } else {
        render_real(c.re)
    };
    let im = if c.im < 0.0 {
        format!(" - {}*i", render_real(-c.im))
    } else {
        format!(" + {}*i", render_real(c.im))
    };
    (false, Some(format!("({re}{im})")))
}

/// Renders a nonnegative real, preferring a closed form that evaluates back to
/// the identical float (left-associative `*` and `/`).
pub fn render_real(x: f64) -> String {
    debug_assert!(x >= 0.0);
    if x == x.trunc() && x < 1e15 {
        return format!("{}", x as i64);
    }
    let pi = std::f64::consts::PI;
    for q in 2..=12u32 {
        let n = (x * q as f64).round();
        if (1.0..1e6).contains(&n) && n / q as f64 == x {
            return format!("{}/{}", n as i64, q);
        }
    }
    for q in 1..=12u32 {
        let n = (x * q as f64 / pi).round();
        if !(1.0..=1e4).contains(&n) {
            continue;
        }
        let value = if n == 1.0 { pi } else { n * pi };
        let value = if q == 1 { value } else { value / q as f64 };
        if value == x {
            let head = if n == 1.0 {
                "pi".to_string()
            } else {
                format!("{}*pi", n as i64)
            };
            return if q == 1 { head } else { format!("{head}/{q}") };
        }
    }
    for m in [2u32, 3, 5, 6] {
        let r = (m as f64).sqrt();
        if 1.0 / r == x {
            return format!("1/sqrt({m})");
        }
        for q in 1..=12u32 {
            let n = (x * q as f64 / r).round();
            if !(1.0..=1e4).contains(&n) {
                continue;
            }
            let value = if n == 1.0 { r } else { n * r };
            let value = if q == 1 { value } else { value / q as f64 };
            if value == x {
                let head = if n == 1.0 {
                    format!("sqrt({m})")
                } else {
                    format!("{}*sqrt({m})", n as i64)
                };
                return if q == 1 { head } else { format!("{head}/{q}") };
            }
        }
        for q in 1..=12u32 {
            let n = (x * r * q as f64).round();
            if !(1.0..1e4).contains(&n) || (q == 1 && n == 1.0) {
                continue;
            }
            if n / r / q as f64 == x {
                return if q == 1 {
                    format!("{}/sqrt({m})", n as i64)
                } else {
                    format!("{}/sqrt({m})/{q}", n as i64)
                };
            }
        }
    }
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn at(t: f64) -> impl Fn(&str) -> Option<f64> {
        move |v| (v == "t").then_some(t)
    }

    #[test]
    fn cos_squared_is_product_to_sum() {
        let c = Scalar::cos("t", 2.0 * PI);
        let expected = Scalar::real(0.5) + Scalar::cos("t", 4.0 * PI) * 0.5;
        assert_eq!(&c * &c, expected);
    }

    #[test]
    fn times_zero_is_zero() {
        assert!((Scalar::var("x") * Scalar::zero()).is_zero());
    }

    #[test]
    fn cos_sin_double_angle() {
        let p = Scalar::cos("t", 2.0 * PI) * Scalar::sin("t", 2.0 * PI);
        assert_eq!(p, Scalar::sin("t", 4.0 * PI) * 0.5);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            Scalar::cos("t", 2.0 * PI).differentiate("t"),
            Scalar::sin("t", 2.0 * PI) * (-2.0 * PI)
        );
        let x2y = Scalar::var("x") * Scalar::var("x") * Scalar::var("y");
        assert_eq!(
            x2y.differentiate("x"),
            Scalar::var("x") * Scalar::var("y") * 2.0
        );
        let te = Scalar::var("t") * Scalar::exp_i("t", 2.0 * PI);
        let expected = Scalar::exp_i("t", 2.0 * PI) + te.clone() * Complex64::new(0.0, 2.0 * PI);
        assert_eq!(te.differentiate("t"), expected);
    }

    #[test]
    fn unit_period_integrals() {
        assert!(Scalar::cos("t", 2.0 * PI)
            .integrate_unit_period("t")
            .is_zero());
        assert_eq!(Scalar::one().integrate_unit_period("t"), Scalar::one());
        // oracle: midpoint rule with 10^4 nodes
        let f = Scalar::real(2.0) + Scalar::cos("t", 2.0 * PI);
        let n = 10_000;
        let quad: f64 = (0..n)
            .map(|j| {
                let t = (j as f64 + 0.5) / n as f64;
                2.0 + (2.0 * PI * t).cos()
            })
            .sum::<f64>()
            / n as f64;
        let exact = f.integrate_unit_period("t").as_constant().unwrap();
        assert!((exact.re - quad).abs() < 1e-9);
        assert!((exact.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn integration_by_parts_matches_quadrature() {
        let f = Scalar::var("t") * Scalar::var("t") * Scalar::sin("t", 2.0 * PI);
        let exact = f.integrate_unit_period("t").as_constant().unwrap();
        let n = 20_000;
        let quad: f64 = (0..n)
            .map(|j| {
                let t = (j as f64 + 0.5) / n as f64;
                t * t * (2.0 * PI * t).sin()
            })
            .sum::<f64>()
            / n as f64;
        assert!((exact.re - quad).abs() < 1e-8, "{exact} vs {quad}");
        assert!((exact.re + 1.0 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn evaluation_examples() {
        let c = Scalar::cos("t", 2.0 * PI).evaluate(at(0.25)).unwrap();
        assert!(c.norm() < 1e-12);
        let x2y = Scalar::var("x") * Scalar::var("x") * Scalar::var("y");
        let v = x2y
            .evaluate(|n| match n {
                "x" => Some(2.0),
                "y" => Some(3.0),
                _ => None,
            })
            .unwrap();
        assert!((v.re - 12.0).abs() < 1e-12);
        let s = Scalar::sin("t", 4.0 * PI).evaluate(at(0.125)).unwrap();
        assert!((s.re - 1.0).abs() < 1e-12);
        assert_eq!(
            Scalar::var("x").evaluate(|_| None),
            Err(ScalarError::MissingCoordinate("x".into()))
        );
    }

    #[test]
    fn zero_identities() {
        let c = Scalar::cos("t", 2.0 * PI);
        let s = Scalar::sin("t", 2.0 * PI);
        assert!((&c * &c + &s * &s - Scalar::one()).is_zero());
        assert!(!(&c - &s).is_zero());
        assert!((Scalar::sin("t", 4.0 * PI) - &s * &c * 2.0).is_zero());
    }

    #[test]
    fn conjugation() {
        let a = Scalar::exp_i("t", 2.0 * PI) * Complex64::i();
        let expected = Scalar::exp_i("t", -2.0 * PI) * Complex64::new(0.0, -1.0);
        assert_eq!(a.conjugate(), expected);
        let r = Scalar::real(2.0) + Scalar::cos("t", 2.0 * PI);
        assert_eq!(r.conjugate(), r);
        assert!(r.is_real());
        assert_eq!(a.conjugate().conjugate(), a);
    }

    #[test]
    fn exponent_cap_is_an_error() {
        let x8 = Scalar::var("x").checked_pow(8).unwrap();
        assert!(x8.checked_mul(&x8).is_ok());
        let x9 = Scalar::var("x").checked_pow(9).unwrap();
        assert!(matches!(
            x9.checked_mul(&x8),
            Err(ScalarError::ExponentCap { exponent: 17, .. })
        ));
    }

    #[test]
    fn frequencies_merge_within_tolerance() {
        let a = Scalar::exp_i("t", 6.0 * PI);
        let b = Scalar::exp_i("t", 2.0 * PI) * Scalar::exp_i("t", 4.0 * PI);
        assert_eq!((a - b).num_terms(), 0);
    }

    #[test]
    fn rendering() {
        let f = Scalar::real(2.0) + Scalar::cos("t", 2.0 * PI);
        assert_eq!(f.to_string(), "2 + cos(2*pi*t)");
        let g = Scalar::exp_i("x", 2.0 * PI) * Complex64::new(0.0, 2f64.sqrt());
        assert_eq!(g.to_string(), "sqrt(2)*i*exp(2*pi*i*x)");
        assert_eq!(Scalar::sin("t", 4.0 * PI).to_string(), "sin(4*pi*t)");
        assert_eq!((Scalar::var("y") * -1.0).to_string(), "-y");
        assert_eq!(Scalar::real(0.5).to_string(), "1/2");
        assert_eq!(Scalar::real(1.0 / 2f64.sqrt()).to_string(), "1/sqrt(2)");
        assert_eq!(Scalar::zero().to_string(), "0");
    }

    #[test]
    fn affine_detection() {
        let a = Scalar::var("x") * (2.0 * PI) + Scalar::real(1.0);
        let (c0, lin) = a.as_affine().unwrap();
        assert_eq!(c0, Complex64::new(1.0, 0.0));
        assert_eq!(lin.len(), 1);
        assert!(Scalar::cos("x", 1.0).as_affine().is_none());
    }
}
