use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{fmt_q, Q};

/// Exponent tuple of a monomial in x1..x4.
pub type Exps = [u32; 4];

/// Homogeneous polynomial of a fixed degree in four variables with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HomPoly {
    degree: u32,
    coeffs: BTreeMap<Exps, Q>,
}

fn exps_degree(e: &Exps) -> u32 {
    e.iter().sum()
}

impl HomPoly {
    pub fn zero(degree: u32) -> Self {
        Self { degree, coeffs: BTreeMap::new() }
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial([0; 4], c)
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn monomial(e: Exps, c: Q) -> Self {
        let mut p = Self::zero(exps_degree(&e));
        p.add_coeff(e, c);
        p
    }

    /// The coordinate function x_{i+1}.
    pub fn var(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    /// r² = x1² + x2² + x3² + x4².
    pub fn r2() -> Self {
        let mut p = Self::zero(2);
        for i in 0..4 {
            let mut e = [0; 4];
            e[i] = 2;
            p.add_coeff(e, Q::one());
        }
        p
    }

    /// Builds a polynomial of the given degree; `None` if an exponent tuple has the wrong degree.
    pub fn from_terms(degree: u32, terms: impl IntoIterator<Item = (Exps, Q)>) -> Option<Self> {
        let mut p = Self::zero(degree);
        for (e, c) in terms {
            if exps_degree(&e) != degree {
                return None;
            }
            p.add_coeff(e, c);
        }
        Some(p)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<Exps, Q> {
        &self.coeffs
    }

    pub fn coeff(&self, e: &Exps) -> Q {
        self.coeffs.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_coeff(&mut self, e: Exps, c: Q) {
        debug_assert_eq!(exps_degree(&e), self.degree);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same_degree(&self, other: &Self) -> u32 {
        if self.is_zero() {
            return other.degree;
        }
        if other.is_zero() {
            return self.degree;
        }
        assert_eq!(self.degree, other.degree, "adding polynomials of different degree");
        self.degree
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.degree);
        }
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    /// ∂/∂x_{i+1}.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.degree.saturating_sub(1));
        for (e, c) in &self.coeffs {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                out.add_coeff(f, c * Q::from_integer(e[i].into()));
            }
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.degree.saturating_sub(2));
        for (e, c) in &self.coeffs {
            for i in 0..4 {
                if e[i] >= 2 {
                    let mut f = *e;
                    f[i] -= 2;
                    out.add_coeff(f, c * Q::from_integer((e[i] * (e[i] - 1)).into()));
                }
            }
        }
        out
    }

    pub fn mul_r2(&self) -> Self {
        self * &Self::r2()
    }

    /// The operator r²Δ, which maps degree m to itself.
    pub fn r2_laplacian(&self) -> Self {
        let l = self.laplacian();
        if l.is_zero() {
            Self::zero(self.degree)
        } else {
            l.mul_r2()
        }
    }

    /// Splits p = r²·q + ρ with ρ of degree at most one in x4.
    pub fn reduce_x4(&self) -> (Self, Self) {
        let mut rem = self.clone();
        let mut quot = Self::zero(self.degree.saturating_sub(2));
        loop {
            let pick = rem
                .coeffs
                .iter()
                .filter(|(e, _)| e[3] >= 2)
                .max_by_key(|(e, _)| (e[3], **e))
                .map(|(e, c)| (*e, c.clone()));
            let Some((e, c)) = pick else { break };
            let mut f = e;
            f[3] -= 2;
            // x^e = x^f·(r² - x1² - x2² - x3²)
            quot.add_coeff(f, c.clone());
            rem.add_coeff(e, -c.clone());
            for i in 0..3 {
                let mut g = f;
                g[i] += 2;
                rem.add_coeff(g, -c.clone());
            }
        }
        (quot, rem)
    }

    /// Writes p = Σ_j r^{2j}·ρ_j with every ρ_j of degree at most one in x4.
    pub fn r2_layers(&self) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = self.clone();
        loop {
            let (q, rho) = cur.reduce_x4();
            out.push(rho);
            if q.is_zero() {
                break;
            }
            cur = q;
        }
        out
    }

    pub fn eval(&self, x: [f64; 4]) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .map(|(e, c)| {
                let m: f64 = (0..4).map(|i| x[i].powi(e[i] as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * m
            })
            .sum()
    }

    /// Largest power of x4 present.
    pub fn x4_degree(&self) -> u32 {
        self.coeffs.keys().map(|e| e[3]).max().unwrap_or(0)
    }
}

impl Add for &HomPoly {
    type Output = HomPoly;
    fn add(self, rhs: &HomPoly) -> HomPoly {
        let mut out = self.clone();
        out.degree = self.check_same_degree(rhs);
        for (e, c) in &rhs.coeffs {
            out.add_coeff(*e, c.clone());
        }
        out
    }
}

impl Sub for &HomPoly {
    type Output = HomPoly;
    fn sub(self, rhs: &HomPoly) -> HomPoly {
        let mut out = self.clone();
        out.degree = self.check_same_degree(rhs);
        for (e, c) in &rhs.coeffs {
            out.add_coeff(*e, -c.clone());
        }
        out
    }
}

impl Neg for &HomPoly {
    type Output = HomPoly;
    fn neg(self) -> HomPoly {
        self.scale(&-Q::one())
    }
}

impl Mul for &HomPoly {
    type Output = HomPoly;
    fn mul(self, rhs: &HomPoly) -> HomPoly {
        let mut out = HomPoly::zero(self.degree + rhs.degree);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &rhs.coeffs {
                let e = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                out.add_coeff(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            if n > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let mono: Vec<String> = (0..4)
                .filter(|&i| e[i] > 0)
                .map(|i| if e[i] == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e[i]) })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_q(&a), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Number of monomials of degree m in four variables.
pub fn dim_homogeneous(m: u32) -> u64 {
    let m = u64::from(m);
    (m + 1) * (m + 2) * (m + 3) / 6
}

/// All exponent tuples of degree m, in lexicographic order.
pub fn monomials(m: u32) -> Vec<Exps> {
    let mut out = Vec::new();
    for a in 0..=m {
        for b in 0..=m - a {
            for c in 0..=m - a - b {
                out.push([a, b, c, m - a - b - c]);
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn laplacian_of_r2_is_eight() {
        assert_eq!(HomPoly::r2().laplacian(), HomPoly::constant(q(8, 1)));
    }

    #[test]
    fn reduce_x4_round_trip() {
        let p = &(&HomPoly::var(3) * &HomPoly::var(3)) * &(&HomPoly::var(3) * &HomPoly::var(0));
        let (quot, rem) = p.reduce_x4();
        assert!(rem.x4_degree() <= 1);
        assert_eq!(&(&quot * &HomPoly::r2()) + &rem, p);
        let layers = p.r2_layers();
        let mut back = HomPoly::zero(4);
        let mut r2j = HomPoly::one();
        for rho in &layers {
            back = &back + &(&r2j * rho);
            r2j = r2j.mul_r2();
        }
        assert_eq!(back, p);
    }

    #[test]
    fn monomial_count() {
        for m in 0..7 {
            assert_eq!(monomials(m).len() as u64, dim_homogeneous(m));
        }
    }

    #[test]
    fn display_is_readable() {
        let p = &HomPoly::monomial([2, 0, 0, 0], q(1, 45)) - &HomPoly::monomial([0, 1, 1, 0], q(3, 1));
        assert_eq!(p.to_string(), "-3*x2*x3 + 1/45*x1^2");
    }
}
