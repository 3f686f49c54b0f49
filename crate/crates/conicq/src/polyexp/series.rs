use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use super::poly::HomPoly;
use super::{fmt_q, Q};

/// A single term p(x)·r^s·(log r)^k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogRadialTerm {
    #[serde(serialize_with = "super::json::ser_poly")]
    pub poly: HomPoly,
    #[serde(serialize_with = "super::json::ser_q")]
    pub s: Q,
    #[serde(rename = "logk")]
    pub k: u32,
}

impl LogRadialTerm {
    pub fn new(poly: HomPoly, s: Q, k: u32) -> Self {
        Self { poly, s, k }
    }

    /// Total homogeneity: polynomial degree plus s.
    pub fn homogeneity(&self) -> Q {
        Q::from_integer(self.poly.degree().into()) + &self.s
    }

    pub fn eval(&self, x: [f64; 4]) -> f64 {
        use num_traits::ToPrimitive;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s = self.s.to_f64().unwrap_or(f64::NAN);
        self.poly.eval(x) * r.powf(s) * r.ln().powi(self.k as i32)
    }
}

impl fmt::Display for LogRadialTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.poly)?;
        if !self.s.is_zero() {
            write!(f, "*r^{}", fmt_q(&self.s))?;
        }
        match self.k {
            0 => Ok(()),
            1 => write!(f, "*log(r)"),
            k => write!(f, "*log(r)^{k}"),
        }
    }
}

/// Ordering key: homogeneity, then log power, then polynomial degree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub h: Q,
    pub k: u32,
    pub deg: u32,
}

impl TermKey {
    pub fn s(&self) -> Q {
        &self.h - Q::from_integer(self.deg.into())
    }
}

/// A finite sum of log-radial terms in canonical form.
///
/// Every polynomial is reduced to degree at most one in x4 by moving factors
/// of r² into the radial power, and terms sharing (degree, s, k) are merged,
/// so two sums represent the same function exactly when they are equal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogSeries {
    terms: BTreeMap<TermKey, HomPoly>,
}

impl LogSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_term(t: &LogRadialTerm) -> Self {
        let mut s = Self::new();
        s.add_term(&t.poly, &t.s, t.k);
        s
    }

    pub fn from_terms<'a>(ts: impl IntoIterator<Item = &'a LogRadialTerm>) -> Self {
        let mut s = Self::new();
        for t in ts {
            s.add_term(&t.poly, &t.s, t.k);
        }
        s
    }

    /// The polynomial p viewed as p·r⁰.
    pub fn from_poly(p: &HomPoly) -> Self {
        let mut s = Self::new();
        s.add_term(p, &Q::zero(), 0);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds p·r^s·(log r)^k.
    pub fn add_term(&mut self, p: &HomPoly, s: &Q, k: u32) {
        if p.is_zero() {
            return;
        }
        let h = Q::from_integer(p.degree().into()) + s;
        for rho in p.r2_layers() {
            if rho.is_zero() {
                continue;
            }
            let key = TermKey { h: h.clone(), k, deg: rho.degree() };
            self.add_canonical(key, &rho);
        }
    }

    fn add_canonical(&mut self, key: TermKey, rho: &HomPoly) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(rho.clone());
            }
            Entry::Occupied(mut o) => {
                let sum = &*o.get() + rho;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &HomPoly)> {
        self.terms.iter()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> Vec<LogRadialTerm> {
        self.terms
            .iter()
            .map(|(key, p)| LogRadialTerm::new(p.clone(), key.s(), key.k))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.add_canonical(k.clone(), p);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.add_canonical(k.clone(), &-p);
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Self { terms: self.terms.iter().map(|(k, p)| (k.clone(), p.scale(c))).collect() }
    }

    /// Multiplies every term by r^a.
    pub fn shift(&self, a: &Q) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, p)| (TermKey { h: &k.h + a, k: k.k, deg: k.deg }, p.clone()))
                .collect(),
        }
    }

    /// Product, keeping only terms of homogeneity below `cutoff` when given.
    pub fn mul(&self, other: &Self, cutoff: Option<&Q>) -> Self {
        let mut out = Self::new();
        for (ka, pa) in &self.terms {
            for (kb, pb) in &other.terms {
                let h = &ka.h + &kb.h;
                if cutoff.is_some_and(|c| h >= *c) {
                    continue;
                }
                let p = pa * pb;
                let s = &h - Q::from_integer(p.degree().into());
                out.add_term(&p, &s, ka.k + kb.k);
            }
        }
        out
    }

    pub fn truncate_below(&self, order: &Q) -> Self {
        Self { terms: self.terms.iter().filter(|(k, _)| k.h < *order).map(|(k, p)| (k.clone(), p.clone())).collect() }
    }

    pub fn at_homogeneity(&self, h: &Q) -> Self {
        Self { terms: self.terms.iter().filter(|(k, _)| k.h == *h).map(|(k, p)| (k.clone(), p.clone())).collect() }
    }

    pub fn min_homogeneity(&self) -> Option<Q> {
        self.terms.keys().next().map(|k| k.h.clone())
    }

    /// Δ(p·r^s·L^k) = r^{s-2}[s(s+2+2m)·p·L^k + 2k(s+1+m)·p·L^{k-1} + k(k-1)·p·L^{k-2}] + Δp·r^s·L^k
    /// with L = log r and m = deg p.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::new();
        for (key, p) in &self.terms {
            let s = key.s();
            let m = Q::from_integer(key.deg.into());
            let k = key.k;
            let s2 = &s - Q::from_integer(2.into());
            let c0 = &s * (&s + Q::from_integer(2.into()) + &m * Q::from_integer(2.into()));
            out.add_term(&p.scale(&c0), &s2, k);
            if k >= 1 {
                let c1 = Q::from_integer((2 * k).into()) * (&s + Q::one() + &m);
                out.add_term(&p.scale(&c1), &s2, k - 1);
            }
            if k >= 2 {
                let c2 = Q::from_integer((k * (k - 1)).into());
                out.add_term(&p.scale(&c2), &s2, k - 2);
            }
            let lp = p.laplacian();
            if !lp.is_zero() {
                out.add_term(&lp, &s, k);
            }
        }
        out
    }

    pub fn biharmonic(&self) -> Self {
        self.laplacian().laplacian()
    }

    pub fn eval(&self, x: [f64; 4]) -> f64 {
        self.terms().iter().map(|t| t.eval(x)).sum()
    }
}

impl fmt::Display for LogSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Applies the Laplacian to one term.
pub fn laplacian(term: &LogRadialTerm) -> Vec<LogRadialTerm> {
    LogSeries::from_term(term).laplacian().terms()
}

/// Applies Δ² to a sum of terms.
pub fn biharmonic(terms: &[LogRadialTerm]) -> Vec<LogRadialTerm> {
    LogSeries::from_terms(terms).biharmonic().terms()
}
