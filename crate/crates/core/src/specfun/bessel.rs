use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_4;

// Power series below, Chebyshev fits of the trapezoid rule on the integral
// representation in the middle, asymptotic series above.
const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 20.0;
const TRAPEZOID_STEP: f64 = 0.1;
// exp(-40) is far below double precision relative to the leading node.
const TRAPEZOID_DECAY: f64 = 40.0;

fn check_positive(what: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: x,
            reason: "argument must be positive",
        })
    }
}

/// MacDonald function `K0(x)` for `x > 0`.
///
/// Relative accuracy is about `1e-13` on `[1e-8, 700]`; beyond the
/// exponential underflow threshold the result is exactly zero.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check_positive("bessel_k0", x)?;
    if x < SERIES_LIMIT {
        return Ok(k0_series(x));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(scaled_large(x) * (-x).exp())
}

/// `exp(x) K0(x)`, which stays representable far past the underflow of `K0`.
pub fn bessel_k0_scaled(x: f64) -> Result<f64> {
    check_positive("bessel_k0_scaled", x)?;
    if x < SERIES_LIMIT {
        return Ok(k0_series(x) * x.exp());
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(scaled_large(x))
}

fn scaled_large(x: f64) -> f64 {
    if x < ASYMPTOTIC_LIMIT {
        middle_fits().scaled.eval(x)
    } else {
        asymptotic_scaled(x)
    }
}

/// `-(ln(x/2) + gamma) I0(x) + sum (x^2/4)^k / (k!)^2 H_k`
fn k0_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let mut term = 1.0; // (x^2/4)^k / (k!)^2
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut rest = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        rest += term * harmonic;
        if term * harmonic < 1e-18 * rest.abs().max(1e-300) {
            break;
        }
    }
    -log_term * i0 + rest
}

fn asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let next = -term * (2.0 * kf - 1.0).powi(2) / (kf * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (FRAC_PI_2 / x).sqrt() * sum
}

const CHEB_PANELS: [(f64, f64); 3] = [(SERIES_LIMIT, 4.0), (4.0, 8.0), (8.0, ASYMPTOTIC_LIMIT)];
const CHEB_TERMS: usize = 32;

/// Piecewise Chebyshev interpolant of `sqrt(x) g(x)` on `[2, 20]`.
struct ChebyshevFit {
    coeffs: [[f64; CHEB_TERMS]; 3],
}

impl ChebyshevFit {
    fn build(g: impl Fn(f64) -> f64) -> Self {
        let n = CHEB_TERMS as f64;
        let mut coeffs = [[0.0; CHEB_TERMS]; 3];
        for (panel, &(a, b)) in CHEB_PANELS.iter().enumerate() {
            let samples: Vec<(f64, f64)> = (0..CHEB_TERMS)
                .map(|k| {
                    let theta = PI * (k as f64 + 0.5) / n;
                    let x = 0.5 * (a + b) + 0.5 * (b - a) * theta.cos();
                    (theta, x.sqrt() * g(x))
                })
                .collect();
            for (j, c) in coeffs[panel].iter_mut().enumerate() {
                *c = 2.0 / n
                    * samples
                        .iter()
                        .map(|&(theta, f)| f * (j as f64 * theta).cos())
                        .sum::<f64>();
            }
        }
        Self { coeffs }
    }

    fn eval(&self, x: f64) -> f64 {
        let panel = CHEB_PANELS
            .iter()
            .position(|&(_, b)| x <= b)
            .unwrap_or(CHEB_PANELS.len() - 1);
        let (a, b) = CHEB_PANELS[panel];
        let y = (2.0 * x - a - b) / (b - a);
        let c = &self.coeffs[panel];
        // Clenshaw recurrence.
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in c[1..].iter().rev() {
            let b0 = 2.0 * y * b1 - b2 + ck;
            b2 = b1;
            b1 = b0;
        }
        (y * b1 - b2 + 0.5 * c[0]) / x.sqrt()
    }
}

struct MiddleFits {
    scaled: ChebyshevFit,
    tail: ChebyshevFit,
}

fn middle_fits() -> &'static MiddleFits {
    static FITS: OnceLock<MiddleFits> = OnceLock::new();
    FITS.get_or_init(|| MiddleFits {
        // e^x K0(x) = int_0^inf exp(-x (cosh t - 1)) dt
        scaled: ChebyshevFit::build(|x| trapezoid(x, |_| 1.0)),
        // e^x int_x^inf K0 = int_0^inf exp(-x (cosh t - 1)) / cosh t dt
        tail: ChebyshevFit::build(|x| trapezoid(x, |t| 1.0 / t.cosh())),
    })
}

/// Trapezoid sum of `exp(-x (cosh t - 1)) w(t)` over `t >= 0`.
fn trapezoid(x: f64, weight: impl Fn(f64) -> f64) -> f64 {
    let mut sum = 0.5 * weight(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * TRAPEZOID_STEP;
        let decay = x * (t.cosh() - 1.0);
        sum += (-decay).exp() * weight(t);
        if decay > TRAPEZOID_DECAY {
            break;
        }
        k += 1;
    }
    sum * TRAPEZOID_STEP
}

/// `int_0^x K0(t) dt` for `x >= 0`, absolute accuracy better than `1e-13`.
///
/// The logarithmic endpoint at zero is integrated analytically through the
/// term-by-term integral of the small-argument series; above `x = 2` the
/// complement `pi/2 - int_x^inf K0` is used.
pub fn k0_cumulative(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            what: "k0_cumulative",
            value: x,
            reason: "argument must be non-negative",
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= SERIES_LIMIT {
        return Ok(cumulative_series(x));
    }
    Ok(FRAC_PI_2 - tail_large(x))
}

/// `int_x^inf K0(t) dt` for `x >= 0`.
pub fn k0_tail(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            what: "k0_tail",
            value: x,
            reason: "argument must be non-negative",
        });
    }
    if x == 0.0 {
        return Ok(FRAC_PI_2);
    }
    if x <= SERIES_LIMIT {
        return Ok(FRAC_PI_2 - cumulative_series(x));
    }
    Ok(tail_large(x))
}

fn tail_large(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    if x < ASYMPTOTIC_LIMIT {
        return (-x).exp() * middle_fits().tail.eval(x);
    }
    // int_x^inf K0 = int_0^inf exp(-x cosh t) / cosh t dt
    (-x).exp() * trapezoid(x, |t| 1.0 / t.cosh())
}

/// Term-by-term integral of the small-argument expansion of `K0`:
/// `sum_k a_k x^{2k+1}/(2k+1) [H_k + 1/(2k+1) - gamma - ln(x/2)]`,
/// `a_k = 1/(4^k (k!)^2)`.
fn cumulative_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    let mut coeff = x; // a_k x^{2k+1}
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for k in 0..80 {
        if k > 0 {
            let kf = k as f64;
            coeff *= y / (kf * kf);
            harmonic += 1.0 / kf;
        }
        let odd = (2 * k + 1) as f64;
        let term = coeff / odd * (harmonic + 1.0 / odd - EULER_GAMMA - log_half);
        sum += term;
        if k > 2 && term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}
