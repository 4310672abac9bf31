//! Semi-infinite integrals of oscillating, algebraically decaying integrands.
//!
//! The half-line is cut into half periods of the carrier frequency, each
//! piece is integrated adaptively, and the sequence of partial sums is
//! accelerated with Wynn's epsilon algorithm.

use super::quadrature::{integrate, integrate_upper, Estimate, QuadratureSpec};
use crate::error::{Error, Result};

const MAX_CYCLES: usize = 20_000;
const TABLE_LEN: usize = 24;
const MAX_HALF_PERIODS: f64 = 101.0;

/// Limit of a sequence of partial sums estimated by Wynn's epsilon algorithm.
///
/// Returns the highest even-order entry of the table built on `sums`.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return sums.last().copied().unwrap_or(0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur = sums.to_vec();
    let mut best = sums[n - 1];
    let mut order = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                // Column has converged to machine precision.
                return if order % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        order += 1;
        prev = cur;
        cur = next;
        if order % 2 == 0 {
            let v = cur[cur.len() - 1];
            if v.is_finite() {
                best = v;
            }
        }
    }
    best
}

/// `∫_0^∞ g(z) dz` where `g` carries an oscillation `cos(ωz + θ(z))` with a
/// slowly varying phase and an amplitude that decays at least like `z^{-1-ε}`.
///
/// `scale` is the typical length over which the amplitude of `g` varies. Pieces
/// are at least that long, and when `omega` is zero (no oscillation) the
/// half-line is compactified with that scale instead.
pub fn integrate_oscillatory<G: Fn(f64) -> f64>(
    g: G,
    omega: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let omega = omega.abs();
    if omega == 0.0 || std::f64::consts::PI / omega > 1e6 * scale {
        return integrate_upper(&g, 0.0, scale, spec);
    }
    let half_period = std::f64::consts::PI / omega;
    // Odd multiples of the half period keep consecutive pieces alternating.
    // Pieces span the amplitude scale where that needs few oscillations and
    // are capped so each stays within the subdivision budget.
    let mut multiple = (scale / half_period).clamp(1.0, MAX_HALF_PERIODS).ceil();
    if multiple % 2.0 == 0.0 {
        multiple += 1.0;
    }
    let step = half_period * multiple;
    let piece_spec = spec.scaled(1e-2);

    let mut sums: Vec<f64> = Vec::with_capacity(TABLE_LEN);
    let mut partial = 0.0;
    let mut piece_err = 0.0;
    let mut last_extrapolated = f64::NAN;
    let mut stable = 0usize;
    let mut small = 0usize;
    let mut left = 0.0;
    for _ in 0..MAX_CYCLES {
        let right = left + step;
        let piece = integrate(&g, left, right, &piece_spec)?;
        left = right;
        partial += piece.value;
        piece_err += piece.error;
        if sums.len() == TABLE_LEN {
            sums.remove(0);
        }
        sums.push(partial);

        let target = spec.target(partial);
        if piece.value.abs() <= 1e-3 * target {
            small += 1;
            if small >= 3 {
                return Ok(Estimate {
                    value: partial,
                    error: piece_err + piece.value.abs(),
                });
            }
        } else {
            small = 0;
        }

        if sums.len() >= 5 {
            let extrapolated = wynn_epsilon(&sums);
            let change = (extrapolated - last_extrapolated).abs();
            if change <= 0.5 * target {
                stable += 1;
                if stable >= 2 {
                    return Ok(Estimate {
                        value: extrapolated,
                        error: change + piece_err,
                    });
                }
            } else {
                stable = 0;
            }
            last_extrapolated = extrapolated;
        }
    }
    Err(Error::NonConvergence {
        what: "oscillatory integral",
        estimate: last_extrapolated,
        error: f64::NAN,
    })
}
