//! Closed-form predictors for the exception limits.
//!
//! Two power-of-two threshold families (X1, X2) bound the verified limits
//! from above, an integer exponent function H envelopes their natural logs,
//! and a step-4 extrapolation estimates limits that have not been scanned:
//! each unit step in either order adds 4 to the log of the nearest known
//! entry. Exponents are kept as exact rationals (the equal-order branch
//! divides by the order) and turned into a float once, at the end.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scanner::KnownLimits;

/// An exact power of two with a rational exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pow2 {
    log2: Ratio<i64>,
}

impl Pow2 {
    pub fn log2(&self) -> Ratio<i64> {
        self.log2
    }

    /// Rendered value, `2^log2`.
    pub fn value(&self) -> f64 {
        let e = *self.log2.numer() as f64 / *self.log2.denom() as f64;
        e.exp2()
    }
}

fn x_exponent(a: u32, b: u32, diag_coeff: i64) -> Ratio<i64> {
    let (ai, bi) = (a as i64, b as i64);
    if a == 0 && b == 0 {
        Ratio::from_integer((ai + 1) * (bi + 1) * (ai + bi + 2))
    } else if a == b {
        Ratio::new((ai + 1) * (bi + 1) * (ai + bi + 3), ai) - Ratio::from_integer(diag_coeff * ai)
    } else {
        Ratio::from_integer((ai + 1) * (bi + 1) * (ai + bi + 2) - (ai + bi - 2))
    }
}

/// First threshold family: every even `2n >= 2 * threshold_x1(a, b)` is
/// conjectured to decompose for the pair `(a, b)`.
pub fn threshold_x1(a: u32, b: u32) -> Pow2 {
    Pow2 {
        log2: x_exponent(a, b, 1),
    }
}

/// Second, tighter threshold family; identical to X1 off the diagonal.
pub fn threshold_x2(a: u32, b: u32) -> Pow2 {
    Pow2 {
        log2: x_exponent(a, b, 2),
    }
}

/// Integer exponent enveloping ln L(a,b) from above.
pub fn envelope_exponent(a: u32, b: u32) -> u64 {
    let s = (a + b) as u64;
    match (a, b) {
        (0, 0) => 2 * (s + 1),
        (_, 0) | (0, _) => 4 * s,
        _ => 4 * (s + 1),
    }
}

/// Exponential form of the envelope, `e^h(a,b)`.
pub fn envelope_threshold(a: u32, b: u32) -> f64 {
    (envelope_exponent(a, b) as f64).exp()
}

/// Natural log of a verified limit.
pub fn ln_limit(a: u32, b: u32, known: &KnownLimits) -> Result<f64> {
    known
        .get(a, b)
        .map(|l| (l as f64).ln())
        .ok_or(Error::UnknownPair { a, b })
}

/// Step-4 estimate of L(a,b): from the known entries at minimal step
/// distance (sum of order differences), take the largest log and add 4 per
/// step. Known pairs estimate to their own exact value.
pub fn estimate_limit(a: u32, b: u32, known: &KnownLimits) -> Result<f64> {
    let (qa, qb) = (a.max(b), a.min(b));
    let mut best: Option<(u32, f64)> = None;
    for ((ka, kb), l) in known.pairs() {
        if ka > qa || kb > qb {
            continue;
        }
        let dist = (qa - ka) + (qb - kb);
        let ln = (l as f64).ln() + 4.0 * dist as f64;
        best = match best {
            Some((d, v)) if d < dist || (d == dist && v >= ln) => Some((d, v)),
            _ => Some((dist, ln)),
        };
    }
    match best {
        Some((_, ln)) => Ok(ln.exp()),
        None => Err(Error::NotEstimable { a, b }),
    }
}

/// Ordered pairs (P, Q) with L(P) < L(Q) while X2(P) > X2(Q): the places
/// where the second family predicts the known ordering backwards.
pub fn x2_order_inversions(known: &KnownLimits) -> Vec<((u32, u32), (u32, u32))> {
    let entries: Vec<((u32, u32), u64)> = known.pairs().collect();
    let mut inversions = Vec::new();
    for (i, &(p, lp)) in entries.iter().enumerate() {
        for &(q, lq) in &entries[i + 1..] {
            let (small, big) = if lp < lq {
                ((p, lp), (q, lq))
            } else if lq < lp {
                ((q, lq), (p, lp))
            } else {
                continue;
            };
            if threshold_x2(small.0 .0, small.0 .1) > threshold_x2(big.0 .0, big.0 .1) {
                inversions.push((small.0, big.0));
            }
        }
    }
    inversions.sort();
    inversions
}

/// One cell of the estimated-limit matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum LimitCell {
    /// A verified value, exact.
    Known(u64),
    /// A step-4 extrapolation.
    Estimated(f64),
}

/// All predictor matrices evaluated over `0..dim` in both orders.
#[derive(Clone, Debug, Serialize)]
pub struct PredictorTables {
    pub dim: usize,
    /// X1 values, indexed `[a][b]`.
    pub x1: Vec<Vec<f64>>,
    /// X2 values.
    pub x2: Vec<Vec<f64>>,
    /// H exponents.
    pub h: Vec<Vec<u64>>,
    /// e^H values.
    pub fy: Vec<Vec<f64>>,
    /// ln L where verified.
    pub g: Vec<Vec<Option<f64>>>,
    /// Verified limits and step-4 estimates.
    pub l_est: Vec<Vec<LimitCell>>,
}

impl PredictorTables {
    pub fn build(dim: usize, known: &KnownLimits) -> Self {
        let mut tables = PredictorTables {
            dim,
            x1: vec![vec![0.0; dim]; dim],
            x2: vec![vec![0.0; dim]; dim],
            h: vec![vec![0; dim]; dim],
            fy: vec![vec![0.0; dim]; dim],
            g: vec![vec![None; dim]; dim],
            l_est: vec![vec![LimitCell::Estimated(0.0); dim]; dim],
        };
        for a in 0..dim {
            for b in 0..dim {
                let (au, bu) = (a as u32, b as u32);
                tables.x1[a][b] = threshold_x1(au, bu).value();
                tables.x2[a][b] = threshold_x2(au, bu).value();
                tables.h[a][b] = envelope_exponent(au, bu);
                tables.fy[a][b] = envelope_threshold(au, bu);
                tables.g[a][b] = known.get(au, bu).map(|l| (l as f64).ln());
                tables.l_est[a][b] = match known.get(au, bu) {
                    Some(l) => LimitCell::Known(l),
                    None => LimitCell::Estimated(
                        estimate_limit(au, bu, known).expect("(0,0) is always an ancestor"),
                    ),
                };
            }
        }
        tables
    }
}
