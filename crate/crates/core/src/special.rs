//! The kernel `β₁(x) = ∫₁^∞ e^{-xu} du/u`, i.e. the exponential integral `E₁(x)`.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `β₁(x)` for `x > 0`, with relative error below `1e-13`.
///
/// Uses the convergent power series for `x ≤ 1` and a continued fraction evaluated by the
/// modified Lentz method for `x > 1`. Values underflow to `0.0` for `x ≳ 700`.
pub fn beta1(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::OutsideDomain(x));
    }
    Ok(if x <= 1.0 { series(x) } else { continued_fraction(x) })
}

/// `β₁(x) + log x`, which extends smoothly to `x = 0` with value `-γ`.
pub fn beta1_plus_log(x: f64) -> f64 {
    if x <= 1.0 {
        series_tail(x) - EULER_GAMMA
    } else {
        continued_fraction(x) + x.ln()
    }
}

/// Upper bound `β₁(x) ≤ e^{-x}/x`, valid for `x > 0`.
pub fn beta1_upper(x: f64) -> f64 {
    (-x).exp() / x
}

fn series_tail(x: f64) -> f64 {
    // Σ_{k≥1} (-1)^{k+1} x^k / (k·k!)
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= x / kf;
        let t = term / kf;
        if k % 2 == 1 {
            sum += t;
        } else {
            sum -= t;
        }
        if t < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn series(x: f64) -> f64 {
    -EULER_GAMMA - x.ln() + series_tail(x)
}

fn continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}
