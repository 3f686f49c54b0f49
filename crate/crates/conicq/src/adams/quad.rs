use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the odd-indexed Kronrod nodes
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("no convergence after {intervals} intervals: estimate {value}, error {error}")]
    NoConvergence { value: f64, error: f64, intervals: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn kronrod(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<Piece, QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { x })
        }
    };
    let fc = eval(c)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = eval(c - dx)? + eval(c + dx)?;
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    Ok(Piece { a, b, value: k * h, error: ((k - g) * h).abs() })
}

/// Adaptive Gauss-Kronrod integration over [a, b], splitting first at `breaks`.
///
/// Converges when the summed error estimate is below max(abs_tol, rel_tol·|value|).
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult, QuadError> {
    const MAX_INTERVALS: usize = 4000;
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    edges.extend(inner);
    edges.push(b);
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in edges.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod(&mut f, w[0], w[1])?);
            evals += 15;
        }
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadResult { value, error, evals });
        }
        let Some(worst) = heap.pop() else {
            return Ok(QuadResult { value, error, evals });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if heap.len() >= MAX_INTERVALS || mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            return Err(QuadError::NoConvergence { value, error, intervals: heap.len() });
        }
        heap.push(kronrod(&mut f, worst.a, mid)?);
        heap.push(kronrod(&mut f, mid, worst.b)?);
        evals += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15 && (g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_panel_exact_for_polynomials() {
        for p in 0..=22 {
            let got = kronrod(&mut |x: f64| x.powi(p), 0.0, 1.0).unwrap().value;
            assert!((got - 1.0 / f64::from(p + 1)).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn endpoint_singularity_and_breaks() {
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &[], 1e-10, 0.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
        let r = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], 1e-12, 0.0).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn reports_failures() {
        assert!(matches!(integrate(|_| f64::NAN, 0.0, 1.0, &[], 1e-8, 0.0), Err(QuadError::NonFinite { .. })));
        assert!(matches!(
            integrate(|x: f64| 1.0 / x, 0.0, 1.0, &[], 1e-12, 0.0),
            Err(QuadError::NoConvergence { .. }) | Err(QuadError::NonFinite { .. })
        ));
    }
}
