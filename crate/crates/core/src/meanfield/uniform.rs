use std::f64::consts::PI;

use rayon::prelude::*;

use super::rest::{potential_rest, spin_vector, vector_potential_moment};
use super::{check_electron, NONREL_SPEED_LIMIT};
use crate::specfun::{gauss_legendre, integrate_oscillatory, QuadArray, QuadValue, QuadratureSpec};
use crate::spinor::{bispinor_u, current_vector, energy};
use crate::{Complex64, Electron, Error, FourVector, Result, Spin, ThreeVector};

/// Quadrature settings for [`potential_uniform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformSpec {
    /// Trapezoid nodes in the azimuth about `r`.
    pub n_phi: usize,
    /// Gauss-Legendre nodes in `cos θ` beyond the `~q|r|` needed to resolve
    /// the plane wave.
    pub extra_polar: usize,
    /// Radial half-period summation.
    pub radial: QuadratureSpec,
}

impl Default for UniformSpec {
    fn default() -> Self {
        Self {
            n_phi: 24,
            extra_polar: 16,
            radial: QuadratureSpec::new(1e-13, 1e-8, 400).expect("valid"),
        }
    }
}

impl UniformSpec {
    fn validate(&self) -> Result<()> {
        if self.n_phi < 4 || self.extra_polar < 4 {
            return Err(Error::InvalidSpec("angular grid too small"));
        }
        self.radial.validate()
    }
}

/// Mean four-potential of a packet moving with central momentum `k0`.
///
/// The static part (rest potential plus moment field) is added in closed
/// form; the momentum-space remainder
/// `2e Re ∫d³q/(2π)³ (2π/ω)[J(k0) e^{-iνt}/(ω-ν) - J(0)/ω] e^{iq·r}`
/// is integrated with the angular average inside and the radial integral
/// summed over half-periods of the plane wave. Since `|ν| < ω` for all `q`
/// the denominator never vanishes.
pub fn potential_uniform(
    r: ThreeVector,
    t: f64,
    k0: ThreeVector,
    spin: Spin,
    electron: &Electron,
    spec: &UniformSpec,
) -> Result<FourVector<f64>> {
    check_electron(electron)?;
    spec.validate()?;
    if !(k0.norm() <= NONREL_SPEED_LIMIT) {
        return Err(Error::Validity(format!(
            "|k0| = {} exceeds the validity limit {NONREL_SPEED_LIMIT}",
            k0.norm()
        )));
    }
    let radius = r.norm();
    let a0 = potential_rest(radius, electron)?;
    let moment = vector_potential_moment(r, spin_vector(spin), electron)?;
    if k0 == ThreeVector::ZERO || electron.charge == 0.0 {
        return Ok(FourVector::from_parts(a0, moment));
    }

    let m = electron.mass;
    let rs = r * m;
    let ts = t * m;
    let rn = rs.norm();
    let axis = rs * (1.0 / rn);
    let helper = if axis.x.abs() < 0.9 {
        ThreeVector::X
    } else {
        ThreeVector::Y
    };
    let ea = axis.cross(helper).unit().expect("non-parallel helper");
    let eb = axis.cross(ea);
    let azimuth: Vec<(f64, f64)> = (0..spec.n_phi)
        .map(|j| (2.0 * PI * j as f64 / spec.n_phi as f64).sin_cos())
        .collect();
    let w_phi = 2.0 * PI / spec.n_phi as f64;

    let mode = |q: f64, n: ThreeVector| -> [f64; 4] {
        let qv = n * q;
        let half = qv * 0.5;
        let (p_out, p_in) = (k0 - half, k0 + half);
        let moving = current_vector(&bispinor_u(spin, p_out), &bispinor_u(spin, p_in));
        let nu = 2.0 * k0.dot(qv) / (energy(p_in) + energy(p_out));
        let rest = current_vector(&bispinor_u(spin, -half), &bispinor_u(spin, half));
        let kr = q * rn * n.dot(axis);
        let wave = Complex64::from_polar(1.0, kr);
        let a = Complex64::from_polar(1.0, kr - nu * ts) / (q - nu);
        let b = wave / q;
        [0, 1, 2, 3].map(|mu| (moving.component(mu) * a - rest.component(mu) * b).re)
    };

    let shell = |q: f64| -> QuadArray<4> {
        let n_polar = spec.extra_polar + (0.7 * q * rn).ceil() as usize;
        let rule = gauss_legendre(n_polar);
        let sum = rule
            .nodes
            .par_iter()
            .zip(rule.weights.par_iter())
            .map(|(&x, &wx)| {
                let s = (1.0 - x * x).max(0.0).sqrt();
                let mut acc = [0.0; 4];
                for &(sp, cp) in &azimuth {
                    let n = (ea * cp + eb * sp) * s + axis * x;
                    let v = mode(q, n);
                    for mu in 0..4 {
                        acc[mu] += wx * v[mu];
                    }
                }
                QuadArray(acc)
            })
            .reduce(|| QuadArray([0.0; 4]), |a, b| QuadArray([0, 1, 2, 3].map(|i| a.0[i] + b.0[i])));
        // 2e · q/(4π²) · Δφ
        sum * (2.0 * electron.charge * q * w_phi / (4.0 * PI * PI))
    };

    let res = integrate_oscillatory(shell, 0.0, f64::INFINITY, PI / rn, &spec.radial)?;
    if !res.converged {
        return Err(Error::Quadrature {
            value: res.value.magnitude(),
            error_estimate: res.error_estimate,
        });
    }
    let rem = res.value.0.map(|v| v * m);
    Ok(FourVector::new(
        a0 + rem[0],
        [moment.x + rem[1], moment.y + rem[2], moment.z + rem[3]],
    ))
}
