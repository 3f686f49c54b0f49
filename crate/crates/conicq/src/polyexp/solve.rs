use num_traits::{One, Zero};
use serde::Serialize;

use super::poly::HomPoly;
use super::series::{LogRadialTerm, LogSeries};
use super::{ExpansionError, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigenEntry {
    pub j: u32,
    pub lambda: i64,
    pub multiplicity: u64,
}

/// Spectrum of r²Δ on homogeneous polynomials of degree m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigenTable {
    pub m: u32,
    pub entries: Vec<EigenEntry>,
}

/// λ_j = 2j(2 + 2m - 2j).
pub fn eigenvalue(m: u32, j: u32) -> i64 {
    let (m, j) = (i64::from(m), i64::from(j));
    2 * j * (2 + 2 * m - 2 * j)
}

/// Dimension of harmonic polynomials of degree d in four variables, (d+1)².
pub fn harmonic_dim(d: u32) -> u64 {
    let d = u64::from(d);
    (d + 1) * (d + 1)
}

pub fn eigen_table(m: u32) -> EigenTable {
    let entries = (0..=m / 2)
        .map(|j| EigenEntry { j, lambda: eigenvalue(m, j), multiplicity: harmonic_dim(m - 2 * j) })
        .collect();
    EigenTable { m, entries }
}

/// Splits f into eigencomponents φ_j = r^{2j}·h_j of r²Δ (h_j harmonic), paired with λ_j.
///
/// Uses the spectral projectors Π_{i≠j}(r²Δ - λ_i)/(λ_j - λ_i).
pub fn eigen_components(f: &HomPoly) -> Vec<(u32, Q, HomPoly)> {
    let m = f.degree();
    let lams: Vec<Q> = (0..=m / 2).map(|j| Q::from_integer(eigenvalue(m, j).into())).collect();
    let mut out = Vec::new();
    for (j, lj) in lams.iter().enumerate() {
        let mut phi = f.clone();
        for (i, li) in lams.iter().enumerate() {
            if i == j || phi.is_zero() {
                continue;
            }
            let shifted = &phi.r2_laplacian() - &phi.scale(li);
            phi = shifted.scale(&(Q::one() / (lj - li)));
        }
        if !phi.is_zero() {
            out.push((j as u32, lj.clone(), phi));
        }
    }
    out
}

/// Harmonic part of f (the j = 0 eigencomponent).
pub fn harmonic_projection(f: &HomPoly) -> HomPoly {
    eigen_components(f)
        .into_iter()
        .find(|(j, _, _)| *j == 0)
        .map(|(_, _, p)| p)
        .unwrap_or_else(|| HomPoly::zero(f.degree()))
}

/// Solves ΔG = f·r^σ·(log r)^k for G as a sum of φ_j·r^{σ+2}·(log r)^l.
///
/// The only admitted collision is the r⁻² channel (σ = -2, harmonic part of
/// degree at most 2), which is resolved with one extra power of log r.
pub fn solve_laplace(f: &HomPoly, sigma: &Q, k: u32) -> Result<LogSeries, ExpansionError> {
    let mut out = LogSeries::new();
    let m = Q::from_integer(f.degree().into());
    let two = Q::from_integer(2.into());
    let big_s = sigma + &two;
    let shift = &big_s * (&big_s + &two + &m * &two);
    let b = &two * (&big_s + Q::one() + &m);
    for (j, lam, phi) in eigen_components(f) {
        let t = &lam + &shift;
        let k = k as usize;
        let mut gamma = vec![Q::zero(); k + 3];
        if !t.is_zero() {
            // t·γ_l + b(l+1)·γ_{l+1} + (l+2)(l+1)·γ_{l+2} = δ_{lk}
            gamma[k] = Q::one() / &t;
            for l in (0..k).rev() {
                let rhs = &b * Q::from_integer(((l + 1) as i64).into()) * &gamma[l + 1]
                    + Q::from_integer((((l + 2) * (l + 1)) as i64).into()) * &gamma[l + 2];
                gamma[l] = -rhs / &t;
            }
        } else {
            if *sigma != Q::from_integer((-2).into()) {
                return Err(ExpansionError::Resonance { degree: f.degree(), j, eigenvalue: lam, shift: -shift });
            }
            if f.degree() > 2 {
                return Err(ExpansionError::Scope(format!(
                    "resonant r^-2 source of degree {} (at most 2 is supported)",
                    f.degree()
                )));
            }
            if b.is_zero() {
                // (l+2)(l+1)·γ_{l+2} = δ_{lk}
                gamma[k + 2] = Q::one() / Q::from_integer((((k + 2) * (k + 1)) as i64).into());
            } else {
                gamma[k + 1] = Q::one() / (&b * Q::from_integer(((k + 1) as i64).into()));
                for l in (0..k).rev() {
                    gamma[l + 1] = -Q::from_integer(((l + 2) as i64).into()) * &gamma[l + 2] / &b;
                }
            }
        }
        for (l, g) in gamma.iter().enumerate() {
            if !g.is_zero() {
                out.add_term(&phi.scale(g), &big_s, l as u32);
            }
        }
    }
    Ok(out)
}

/// Solves ΔG = F for a sum F of terms.
pub fn solve_laplace_series(src: &LogSeries) -> Result<LogSeries, ExpansionError> {
    let mut out = LogSeries::new();
    for (key, p) in src.iter() {
        out = out.add(&solve_laplace(p, &key.s(), key.k)?);
    }
    Ok(out)
}

/// Removes terms that are individually biharmonic.
pub fn drop_kernel(g: &LogSeries) -> LogSeries {
    let mut out = LogSeries::new();
    for t in g.terms() {
        let single = LogSeries::from_term(&t);
        if !single.biharmonic().is_zero() {
            out = out.add(&single);
        }
    }
    out
}

/// Solves Δ²G = F for a sum of terms by two Laplacian inversions.
pub fn solve_biharmonic_series(src: &LogSeries) -> Result<LogSeries, ExpansionError> {
    let g1 = solve_laplace_series(src)?;
    let g2 = solve_laplace_series(&g1)?;
    Ok(drop_kernel(&g2))
}

/// Δ²G = f·r^{4β}·(log r)^k.
pub fn solve_biharmonic_terms(f: &HomPoly, beta: &Q, k: u32) -> Result<LogSeries, ExpansionError> {
    let sigma = beta * Q::from_integer(4.into());
    let mut src = LogSeries::new();
    src.add_term(f, &sigma, k);
    solve_biharmonic_series(&src)
}

/// Δ²E - f·r^{4β}·(log r)^k.
pub fn linear_residual(e: &[LogRadialTerm], f: &HomPoly, beta: &Q, k: u32) -> Vec<LogRadialTerm> {
    let mut src = LogSeries::new();
    src.add_term(f, &(beta * Q::from_integer(4.into())), k);
    LogSeries::from_terms(e).biharmonic().sub(&src).terms()
}
