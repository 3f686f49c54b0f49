use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::poly::HomPoly;
use super::series::{LogRadialTerm, LogSeries};
use super::solve::{solve_biharmonic_series, solve_biharmonic_terms};
use super::{ExpansionError, Q};

/// Which shape of expansion applies at a given cone index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CaseLabel {
    /// 1: -(k+1)/(k+2) < β < -k/(k+1); 2: β = -2k/(2k+1); 3: β = -(2k-1)/(2k).
    pub case: u8,
    pub k: u64,
}

pub fn case_label(beta: &Q) -> Result<CaseLabel, ExpansionError> {
    check_beta(beta)?;
    let x = -beta;
    let (n, d) = (x.numer().clone(), x.denom().clone());
    if &d - &n == num_bigint::BigInt::one() {
        let nn = n.to_u64().ok_or_else(|| ExpansionError::InvalidInput("beta too large".into()))?;
        return Ok(if nn.is_even() {
            CaseLabel { case: 2, k: nn / 2 }
        } else {
            CaseLabel { case: 3, k: (nn + 1) / 2 }
        });
    }
    // k = floor(x / (1 - x))
    let ratio = &x / (Q::one() - &x);
    let k = ratio.floor().to_integer().to_u64().ok_or_else(|| ExpansionError::InvalidInput("beta too large".into()))?;
    Ok(CaseLabel { case: 1, k })
}

fn check_beta(beta: &Q) -> Result<(), ExpansionError> {
    if !(beta.is_negative() && *beta > -Q::one()) {
        return Err(ExpansionError::InvalidInput(format!("beta must lie in (-1, 0), got {beta}")));
    }
    Ok(())
}

/// A formal solution of Δ²E = e^{4E}·r^{4β}, certified below `remainder_order`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expansion {
    #[serde(serialize_with = "super::json::ser_q")]
    pub beta: Q,
    pub terms: Vec<LogRadialTerm>,
    /// The residual of the equation has no terms of homogeneity below this.
    #[serde(serialize_with = "super::json::ser_q")]
    pub remainder_order: Q,
    pub case: Option<CaseLabel>,
}

impl Expansion {
    pub fn series(&self) -> LogSeries {
        LogSeries::from_terms(&self.terms)
    }
}

/// Solves Δ²E = f·r^{4β}·(log r)^k exactly.
pub fn solve_biharmonic(f: &HomPoly, beta: &Q, k: u32) -> Result<Expansion, ExpansionError> {
    let g = solve_biharmonic_terms(f, beta, k)?;
    // the identity holds exactly, so nothing is left over at any order
    let remainder_order = g
        .terms()
        .iter()
        .map(|t| t.homogeneity())
        .max()
        .unwrap_or_else(|| Q::from_integer(4.into()) * beta + Q::from_integer(4.into()))
        + Q::one();
    Ok(Expansion { beta: beta.clone(), terms: g.terms(), remainder_order, case: None })
}

/// e^{4W} truncated below homogeneity `cutoff`; W must have positive homogeneity throughout.
fn exp4(w: &LogSeries, cutoff: &Q) -> Result<LogSeries, ExpansionError> {
    let mut total = LogSeries::from_poly(&HomPoly::one());
    if w.is_zero() {
        return Ok(total);
    }
    let h_min = w.min_homogeneity().expect("nonempty");
    if !h_min.is_positive() {
        return Err(ExpansionError::InvalidInput("expansion has a constant or singular term".into()));
    }
    let four_w = w.scale(&Q::from_integer(4.into()));
    let mut power = LogSeries::from_poly(&HomPoly::one());
    let mut n = 1u64;
    loop {
        if Q::from_integer(n.into()) * &h_min >= *cutoff {
            break;
        }
        power = power.mul(&four_w, Some(cutoff)).scale(&(Q::one() / Q::from_integer(n.into())));
        if power.is_zero() {
            break;
        }
        total = total.add(&power);
        n += 1;
    }
    Ok(total)
}

/// Δ²E - e^{4E}·r^{4β}, keeping terms of homogeneity below `order`.
pub fn residual_series(e: &LogSeries, beta: &Q, order: &Q) -> Result<LogSeries, ExpansionError> {
    let four_beta = Q::from_integer(4.into()) * beta;
    let cutoff = order - &four_beta;
    let src = exp4(e, &cutoff)?.shift(&four_beta);
    Ok(e.biharmonic().sub(&src).truncate_below(order))
}

/// The terms of Δ²E - e^{4E}·r^{4β} with homogeneity below `order`; empty when E is certified.
pub fn verify_residual(e: &Expansion, beta: &Q, order: &Q) -> Result<Vec<LogRadialTerm>, ExpansionError> {
    Ok(residual_series(&e.series(), beta, order)?.terms())
}

/// Largest order the degree-3 jets can certify, 4(β+1).
pub fn max_order(beta: &Q) -> Q {
    Q::from_integer(4.into()) * (beta + Q::one())
}

/// Builds the formal expansion at a cone point of index β from polynomial jets of degree 1 to 3.
pub fn formal_expansion(beta: &Q, jets: &[HomPoly], order: &Q) -> Result<Expansion, ExpansionError> {
    check_beta(beta)?;
    let case = case_label(beta)?;
    if *order > max_order(beta) {
        return Err(ExpansionError::Scope(format!(
            "order {order} exceeds 4(beta+1) = {}, which needs jets of degree above 3",
            max_order(beta)
        )));
    }
    let mut jet_series = LogSeries::new();
    for j in jets {
        if j.is_zero() {
            continue;
        }
        if j.degree() == 0 {
            return Err(ExpansionError::InvalidInput("jets must not contain a constant term".into()));
        }
        if j.degree() > 3 {
            return Err(ExpansionError::Scope(format!("jet of degree {} (at most 3)", j.degree())));
        }
        jet_series = jet_series.add(&LogSeries::from_poly(j));
    }
    let mut singular = LogSeries::new();
    for _ in 0..10_000 {
        let e = jet_series.add(&singular);
        let r = residual_series(&e, beta, order)?;
        let Some(h0) = r.min_homogeneity() else {
            return Ok(Expansion { beta: beta.clone(), terms: e.terms(), remainder_order: order.clone(), case: Some(case) });
        };
        let level = r.at_homogeneity(&h0).scale(&-Q::one());
        let fix = solve_biharmonic_series(&level).map_err(|err| match err {
            ExpansionError::Scope(m) => ExpansionError::Scope(format!("{m}; order must not exceed {}", h0)),
            other => other,
        })?;
        if fix.is_zero() {
            return Err(ExpansionError::Internal(format!("level {h0} could not be cleared")));
        }
        singular = singular.add(&fix);
    }
    Err(ExpansionError::Internal("expansion did not terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyexp::q;

    #[test]
    fn case_labels() {
        assert_eq!(case_label(&q(-1, 4)).unwrap(), CaseLabel { case: 1, k: 0 });
        assert_eq!(case_label(&q(-1, 2)).unwrap(), CaseLabel { case: 3, k: 1 });
        assert_eq!(case_label(&q(-2, 3)).unwrap(), CaseLabel { case: 2, k: 1 });
        assert_eq!(case_label(&q(-3, 4)).unwrap(), CaseLabel { case: 3, k: 2 });
        assert_eq!(case_label(&q(-3, 5)).unwrap(), CaseLabel { case: 1, k: 1 });
        assert!(case_label(&q(0, 1)).is_err());
    }

    #[test]
    fn zero_jets_quarter() {
        let e = formal_expansion(&q(-1, 4), &[], &q(3, 1)).unwrap();
        assert_eq!(e.terms[0], LogRadialTerm::new(HomPoly::constant(q(1, 45)), q(3, 1), 0));
        assert!(verify_residual(&e, &q(-1, 4), &q(3, 1)).unwrap().is_empty());
    }

    #[test]
    fn half_with_linear_jet_has_log_channel() {
        let beta = q(-1, 2);
        let jets = [HomPoly::var(0).scale(&q(1, 3))];
        let e = formal_expansion(&beta, &jets, &q(1, 1)).unwrap();
        assert!(e.terms.iter().any(|t| t.k == 1 && t.s == q(2, 1) && t.poly.degree() == 1), "{:?}", e.terms);
        assert!(verify_residual(&e, &beta, &q(1, 1)).unwrap().is_empty());
        // the cubic source at homogeneity 1 is resonant
        assert!(matches!(formal_expansion(&beta, &jets, &q(2, 1)), Err(ExpansionError::Scope(_))));
    }

    #[test]
    fn perturbation_is_caught() {
        let beta = q(-1, 3);
        let jets = [HomPoly::var(1), &HomPoly::var(0) * &HomPoly::var(2)];
        let order = max_order(&beta);
        let mut e = formal_expansion(&beta, &jets, &order).unwrap();
        assert!(verify_residual(&e, &beta, &order).unwrap().is_empty());
        let t = e.terms.iter_mut().find(|t| t.s != q(0, 1)).unwrap();
        let (ex, c) = t.poly.coeffs().iter().next().map(|(a, b)| (*a, b.clone())).unwrap();
        t.poly = &t.poly + &HomPoly::monomial(ex, c.signum());
        let res = verify_residual(&e, &beta, &order).unwrap();
        assert!(!res.is_empty());
    }

    #[test]
    fn scope_limits() {
        assert!(matches!(formal_expansion(&q(-1, 4), &[], &q(4, 1)), Err(ExpansionError::Scope(_))));
        let cubic = &HomPoly::var(0) * &(&HomPoly::var(1) * &HomPoly::var(2));
        assert!(matches!(formal_expansion(&q(-1, 2), &[cubic], &q(2, 1)), Err(ExpansionError::Scope(_))));
        assert!(formal_expansion(&q(1, 2), &[], &q(1, 1)).is_err());
    }
}
