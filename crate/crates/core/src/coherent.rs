//! Zeroth-order coherent photon cloud.
//!
//! Momenta are in units of the electron mass and times in units of `1/m`;
//! `charge` is the coupling `e` (so `e² = α` for the physical electron).

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::specfun::{gauss_hermite, gauss_legendre, integrate, QuadValue, QuadratureSpec};
use crate::spinor::{
    bispinor_u, contract, current_vector, energy, polarization_basis, FourVector,
    PolarizationBasis, Spin, ThreeVector,
};
use crate::{Error, Result};

/// Below this `δ·m` the stationary-phase reduction is not trustworthy.
pub const MIN_RELIABLE_WIDTH: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacket {
    /// Width `δ` in units of `1/m`.
    pub width: f64,
    pub k0: ThreeVector,
    pub spin: Spin,
}

impl WavePacket {
    pub fn new(width: f64, k0: ThreeVector, spin: Spin) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::Domain {
                what: "WavePacket::width",
                value: width,
                reason: "width must be positive and finite",
            });
        }
        if !k0.is_finite() {
            return Err(Error::Validity("packet momentum must be finite".into()));
        }
        Ok(Self { width, k0, spin })
    }

    pub fn at_rest(width: f64) -> Result<Self> {
        Self::new(width, ThreeVector::ZERO, Spin::Up)
    }

    /// Warning text when the packet is too narrow for the stationary-phase
    /// reduction.
    pub fn validity_warning(&self) -> Option<String> {
        (self.width < MIN_RELIABLE_WIDTH).then(|| {
            format!(
                "packet width {} is below {} Compton wavelengths",
                self.width, MIN_RELIABLE_WIDTH
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonMode {
    /// Polarization index: 0 scalar, 1 and 2 transverse, 3 longitudinal.
    pub alpha: usize,
    pub q: ThreeVector,
}

impl PhotonMode {
    pub fn new(alpha: usize, q: ThreeVector) -> Result<Self> {
        if alpha > 3 {
            return Err(Error::Validity(format!("polarization index {alpha} > 3")));
        }
        if !(q.norm() > 0.0) || !q.is_finite() {
            return Err(Error::Domain {
                what: "PhotonMode::q",
                value: q.norm(),
                reason: "photon momentum must be nonzero and finite",
            });
        }
        Ok(Self { alpha, q })
    }

    pub fn omega(&self) -> f64 {
        self.q.norm()
    }

    /// `g_q = sqrt(2π/ω)`
    pub fn coupling(&self) -> f64 {
        (2.0 * PI / self.omega()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude {
    pub mode: PhotonMode,
    pub t: f64,
    pub amplitude: Complex64,
    pub chi: f64,
}

/// The stationary-phase current `f(q, t) = f(q, 0) e^{-iνt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryCurrent {
    pub q: ThreeVector,
    /// `p_m = k0 - Δk`
    pub p_m: ThreeVector,
    pub f0: FourVector<Complex64>,
    /// `ν = ε₊ - ε₋`
    pub nu: f64,
}

impl StationaryCurrent {
    pub fn new(q: ThreeVector, packet: &WavePacket, delta_k: ThreeVector, charge: f64) -> Self {
        let p_m = packet.k0 - delta_k;
        let half = q * 0.5;
        let (p_out, p_in) = (p_m - half, p_m + half);
        let j = current_vector(&bispinor_u(packet.spin, p_out), &bispinor_u(packet.spin, p_in));
        // ε₊ - ε₋ = 2 p_m·q / (ε₊ + ε₋), free of cancellation.
        let nu = 2.0 * p_m.dot(q) / (energy(p_in) + energy(p_out));
        Self {
            q,
            p_m,
            f0: j.scale(Complex64::from(charge)),
            nu,
        }
    }

    pub fn at(&self, t: f64) -> FourVector<Complex64> {
        self.f0.scale(Complex64::from_polar(1.0, -self.nu * t))
    }

    /// On-shell continuity residual `ν f⁰ - q·f` (time independent).
    pub fn continuity_residual(&self) -> f64 {
        (self.f0.t * self.nu - self.f0.spatial_dot(self.q)).norm()
    }
}

/// Current amplitude in the stationary-phase approximation.
pub fn f_stationary(
    q: ThreeVector,
    t: f64,
    packet: &WavePacket,
    delta_k: ThreeVector,
    charge: f64,
) -> FourVector<Complex64> {
    StationaryCurrent::new(q, packet, delta_k, charge).at(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCurrent {
    pub value: FourVector<Complex64>,
    /// Largest component difference between the two Hermite orders.
    pub residual: f64,
}

const HERMITE_LOW: usize = 16;
const HERMITE_HIGH: usize = 24;
const HERMITE_TOLERANCE: f64 = 1e-8;

/// Current amplitude as the normalized Gaussian average of `ū γ^μ u` with
/// weight `exp[-2δ²(p - p_m)²]`, by tensor-product Gauss-Hermite quadrature.
///
/// The average is normalized so that `f⁰ → e` as `q → 0`.
pub fn f_gaussian(
    q: ThreeVector,
    t: f64,
    packet: &WavePacket,
    delta_k: ThreeVector,
    charge: f64,
) -> Result<GaussianCurrent> {
    let p_m = packet.k0 - delta_k;
    let hi = hermite_average(q, t, packet, p_m, HERMITE_HIGH);
    let lo = hermite_average(q, t, packet, p_m, HERMITE_LOW);
    let residual = (0..4)
        .map(|mu| (hi.component(mu) - lo.component(mu)).norm())
        .fold(0.0, f64::max);
    let value = hi.scale(Complex64::from(charge));
    let residual = residual * charge.abs();
    let scale = (0..4).map(|mu| value.component(mu).norm()).fold(charge.abs(), f64::max);
    if residual > HERMITE_TOLERANCE * scale {
        return Err(Error::Quadrature {
            value: value.t.norm(),
            error_estimate: residual,
        });
    }
    Ok(GaussianCurrent { value, residual })
}

fn hermite_average(
    q: ThreeVector,
    t: f64,
    packet: &WavePacket,
    p_m: ThreeVector,
    order: usize,
) -> FourVector<Complex64> {
    let rule = gauss_hermite(order);
    // exp(-2δ² y²) = exp(-s²) with y = s / (√2 δ)
    let stretch = 1.0 / (2f64.sqrt() * packet.width);
    let norm = PI.powf(-1.5);
    let half = q * 0.5;
    let zero = Complex64::new(0.0, 0.0);
    let mut acc = FourVector::new(zero, [zero; 3]);
    for (&sx, &wx) in rule.nodes.iter().zip(&rule.weights) {
        for (&sy, &wy) in rule.nodes.iter().zip(&rule.weights) {
            for (&sz, &wz) in rule.nodes.iter().zip(&rule.weights) {
                let p = p_m + ThreeVector::new(sx, sy, sz) * stretch;
                let (p_out, p_in) = (p - half, p + half);
                let j = current_vector(
                    &bispinor_u(packet.spin, p_out),
                    &bispinor_u(packet.spin, p_in),
                );
                let nu = 2.0 * p.dot(q) / (energy(p_in) + energy(p_out));
                let w = Complex64::from_polar(wx * wy * wz * norm, -nu * t);
                acc.t += j.t * w;
                for k in 0..3 {
                    acc.space[k] += j.space[k] * w;
                }
            }
        }
    }
    acc
}

/// `Q` and `χ` for the pure-phase current `f(0) e^{-iνt}` in closed form.
pub fn amplitude_closed_form(
    mode: PhotonMode,
    basis: &PolarizationBasis,
    t: f64,
    current: &StationaryCurrent,
) -> CoherentAmplitude {
    let g = mode.coupling();
    let a = contract(&basis.vectors[mode.alpha], &current.f0);
    let omega_shift = mode.omega() - current.nu;
    let (amplitude, chi) = closed_form(g, a, omega_shift, 0.0, t);
    CoherentAmplitude {
        mode,
        t,
        amplitude,
        chi,
    }
}

/// Contribution to `Q` accumulated between `t1` and `t2`.
pub fn amplitude_interval(
    mode: PhotonMode,
    basis: &PolarizationBasis,
    t1: f64,
    t2: f64,
    current: &StationaryCurrent,
) -> Complex64 {
    let g = mode.coupling();
    let a = contract(&basis.vectors[mode.alpha], &current.f0);
    closed_form(g, a, mode.omega() - current.nu, t1, t2).0
}

const RESONANCE: f64 = 1e-12;

/// `Q(t1→t2) = -g a (e^{iΩt2} - e^{iΩt1})/Ω` and, for `t1 = 0`,
/// `χ = -g²|a|² (t - sin(Ωt)/Ω)/Ω`.
fn closed_form(g: f64, a: Complex64, omega: f64, t1: f64, t2: f64) -> (Complex64, f64) {
    if omega.abs() < RESONANCE {
        return (Complex64::new(0.0, -g * (t2 - t1)) * a, 0.0);
    }
    // e^{ix} - 1 = -2 sin²(x/2) + i sin x
    let em1 = |x: f64| Complex64::new(-2.0 * (0.5 * x).sin().powi(2), x.sin());
    let diff = em1(omega * t2) - em1(omega * t1);
    let amplitude = -a * g * diff / omega;
    let x = omega * t2;
    let bracket = if x.abs() < 1e-3 {
        // (x - sin x)/Ω² via its series
        let x2 = x * x;
        t2 * t2 * t2 * omega * (1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0)
    } else {
        (t2 - x.sin() / omega) / omega
    };
    let chi = -g * g * a.norm_sqr() * bracket;
    (amplitude, chi)
}

/// `Q` and `χ` by direct quadrature for an arbitrary current history.
///
/// `χ = ∫ Im(Q̇* Q) dt'` is evaluated with `Q(t')` obtained by an inner
/// quadrature at every outer node.
pub fn amplitude_numeric<F>(
    mode: PhotonMode,
    basis: &PolarizationBasis,
    t: f64,
    f: F,
    spec: &QuadratureSpec,
) -> Result<CoherentAmplitude>
where
    F: Fn(f64) -> FourVector<Complex64> + Sync,
{
    if !(t >= 0.0) {
        return Err(Error::Domain {
            what: "amplitude_numeric",
            value: t,
            reason: "time must be non-negative",
        });
    }
    let g = mode.coupling();
    let omega = mode.omega();
    let e = basis.vectors[mode.alpha];
    let q_dot = |s: f64| Complex64::new(0.0, -g) * contract(&e, &f(s)) * Complex64::from_polar(1.0, omega * s);
    let q_at = |s: f64| -> Result<Complex64> {
        Ok(integrate(q_dot, 0.0, s, spec)?.require_converged()?.value)
    };
    let amplitude = q_at(t)?;
    let failure = std::sync::Mutex::new(None);
    let chi = integrate(
        |s: f64| match q_at(s) {
            Ok(qs) => (q_dot(s).conj() * qs).im,
            Err(err) => {
                failure.lock().unwrap().get_or_insert(err);
                0.0
            }
        },
        0.0,
        t,
        spec,
    )?;
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    Ok(CoherentAmplitude {
        mode,
        t,
        amplitude,
        chi: chi.require_converged()?.value,
    })
}

/// Integration grid for mode sums `Σ_q → ∫d³q/(2π)³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudGrid {
    /// Gauss-Legendre nodes in `cos θ`.
    pub n_theta: usize,
    /// Trapezoid nodes in `φ`.
    pub n_phi: usize,
    /// Radial cutoff in units of `m`.
    pub q_max: f64,
    pub radial: QuadratureSpec,
}

impl Default for CloudGrid {
    fn default() -> Self {
        Self {
            n_theta: 32,
            n_phi: 64,
            q_max: 20.0,
            radial: QuadratureSpec::default().with_tolerances(1e-16, 1e-9),
        }
    }
}

impl CloudGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 2 || self.n_phi < 2 {
            return Err(Error::Validity("angular grid needs at least 2 nodes per axis".into()));
        }
        if !(self.q_max > 0.0) || !self.q_max.is_finite() {
            return Err(Error::Domain {
                what: "CloudGrid::q_max",
                value: self.q_max,
                reason: "cutoff must be positive and finite",
            });
        }
        self.radial.validate()
    }
}

/// Totals for one polarization or one summation convention.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModeTotals {
    pub n_photons: f64,
    pub delta_k: ThreeVector,
    /// `Σ ω |Q(t)|²`
    pub delta_e: f64,
    /// `Σ ω ⟨|Q|²⟩` averaged over long times.
    pub e_cloud_average: f64,
}

impl ModeTotals {
    fn weighted(parts: &[ModeTotals; 4], weights: [f64; 4]) -> Self {
        let mut out = ModeTotals::default();
        for (p, w) in parts.iter().zip(weights) {
            out.n_photons += w * p.n_photons;
            out.delta_k = out.delta_k + p.delta_k * w;
            out.delta_e += w * p.delta_e;
            out.e_cloud_average += w * p.e_cloud_average;
        }
        out
    }
}

/// How the four polarizations are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarizationSum {
    /// Modes 1 and 2 only.
    Transverse,
    /// All four with weight `+1`.
    AllPositive,
    /// All four with weight `-g_αα`, i.e. the scalar mode counted negative.
    MetricWeighted,
}

impl PolarizationSum {
    pub fn weights(self) -> [f64; 4] {
        match self {
            PolarizationSum::Transverse => [0.0, 1.0, 1.0, 0.0],
            PolarizationSum::AllPositive => [1.0; 4],
            PolarizationSum::MetricWeighted => [-1.0, 1.0, 1.0, 1.0],
        }
    }
}

/// Relative change tolerated when the radial cutoff is doubled.
pub const UV_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CloudSummary {
    pub t: f64,
    /// Transverse-mode totals (the default convention).
    pub delta_k: ThreeVector,
    pub delta_e: f64,
    pub n_photons: f64,
    /// `Σ ω|Q(t)|²`; coincides with `delta_e` at this order.
    pub e_cloud: f64,
    pub e_cloud_average: f64,
    pub per_alpha: [ModeTotals; 4],
    /// Relative growth of `n_photons` and `e_cloud_average` per polarization
    /// when the cutoff is doubled.
    pub uv_growth: [f64; 4],
    pub uv_converged: [bool; 4],
    pub grid: CloudGrid,
}

impl CloudSummary {
    pub fn totals(&self, convention: PolarizationSum) -> ModeTotals {
        ModeTotals::weighted(&self.per_alpha, convention.weights())
    }
}

/// Radial moments `[q² n, q³ n, q³ n̄]` for each polarization.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Moments([[f64; 3]; 4]);

impl Add for Moments {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self
    }
}

impl Sub for Moments {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            for (x, y) in a.iter_mut().zip(b) {
                *x -= y;
            }
        }
        self
    }
}

impl Mul<f64> for Moments {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for a in self.0.iter_mut() {
            for x in a.iter_mut() {
                *x *= s;
            }
        }
        self
    }
}

impl QuadValue for Moments {
    fn zero() -> Self {
        Self::default()
    }

    // Error control sees only combinations that do not depend on how the
    // transverse pair is oriented.
    fn magnitude(&self) -> f64 {
        let m = &self.0;
        (0..3).fold(0.0, |acc: f64, k| {
            acc.max(m[0][k].abs())
                .max(m[3][k].abs())
                .max((m[1][k] + m[2][k]).abs())
        })
    }

    fn all_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

fn radial_moments(
    direction: ThreeVector,
    basis: PolarizationBasis,
    packet: WavePacket,
    delta_k: ThreeVector,
    charge: f64,
    t: f64,
) -> impl Fn(f64) -> Moments {
    move |q: f64| {
        let current = StationaryCurrent::new(direction * q, &packet, delta_k, charge);
        let g2 = 2.0 * PI / q;
        let shift = q - current.nu;
        let mut m = Moments::default();
        for (alpha, row) in m.0.iter_mut().enumerate() {
            let a2 = contract(&basis.vectors[alpha], &current.f0).norm_sqr();
            // |Q|² = g²|a|² 4 sin²(Ωt/2)/Ω², long-time mean 2g²|a|²/Ω²
            let s = (0.5 * shift * t).sin();
            let n = g2 * a2 * 4.0 * s * s / (shift * shift);
            let n_avg = 2.0 * g2 * a2 / (shift * shift);
            *row = [q * q * n, q * q * q * n, q * q * q * n_avg];
        }
        m
    }
}

/// Photon-cloud observables at time `t`, integrated over the mode grid.
///
/// Per-polarization totals are kept so that any summation convention can be
/// formed afterwards; the headline fields use the transverse modes.
pub fn cloud_summary(
    packet: &WavePacket,
    t: f64,
    delta_k: ThreeVector,
    charge: f64,
    grid: &CloudGrid,
) -> Result<CloudSummary> {
    cloud_summary_rotated(packet, t, delta_k, charge, grid, 0.0)
}

/// As [`cloud_summary`], with the transverse polarization pair of every
/// mode rotated by `angle` about its wave vector.
pub fn cloud_summary_rotated(
    packet: &WavePacket,
    t: f64,
    delta_k: ThreeVector,
    charge: f64,
    grid: &CloudGrid,
    angle: f64,
) -> Result<CloudSummary> {
    grid.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "cloud_summary",
            value: t,
            reason: "time must be non-negative and finite",
        });
    }
    let cos_rule = gauss_legendre(grid.n_theta);
    let dphi = 2.0 * PI / grid.n_phi as f64;
    let mut directions = Vec::with_capacity(grid.n_theta * grid.n_phi);
    for (&c, &wc) in cos_rule.nodes.iter().zip(&cos_rule.weights) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..grid.n_phi {
            let phi = j as f64 * dphi;
            directions.push((ThreeVector::new(s * phi.cos(), s * phi.sin(), c), wc * dphi));
        }
    }

    let per_direction: Vec<Result<(ThreeVector, f64, Moments, Moments)>> = directions
        .par_iter()
        .map(|&(n, w)| {
            let basis = polarization_basis(n)?.rotated(angle);
            let f = radial_moments(n, basis, *packet, delta_k, charge, t);
            let core = integrate(&f, 0.0, grid.q_max, &grid.radial)?;
            let tail = integrate(&f, grid.q_max, 2.0 * grid.q_max, &grid.radial)?;
            Ok((n, w, core.value, tail.value))
        })
        .collect();

    let norm = 1.0 / (8.0 * PI * PI * PI);
    let mut per_alpha = [ModeTotals::default(); 4];
    let mut tails = [[0.0; 2]; 4];
    for item in per_direction {
        let (n, w, core, tail) = item?;
        for alpha in 0..4 {
            let [m2, m3, m3_avg] = core.0[alpha];
            let totals = &mut per_alpha[alpha];
            totals.n_photons += w * norm * m2;
            totals.delta_e += w * norm * m3;
            totals.delta_k = totals.delta_k + n * (w * norm * m3);
            totals.e_cloud_average += w * norm * m3_avg;
            tails[alpha][0] += w * norm * tail.0[alpha][0];
            tails[alpha][1] += w * norm * tail.0[alpha][2];
        }
    }

    let mut uv_growth = [0.0; 4];
    let mut uv_converged = [true; 4];
    for alpha in 0..4 {
        let p = &per_alpha[alpha];
        let rel = |tail: f64, base: f64| if base != 0.0 { (tail / base).abs() } else { tail.abs() };
        let growth = rel(tails[alpha][0], p.n_photons).max(rel(tails[alpha][1], p.e_cloud_average));
        uv_growth[alpha] = growth;
        uv_converged[alpha] = growth <= UV_TOLERANCE;
    }

    let transverse = ModeTotals::weighted(&per_alpha, PolarizationSum::Transverse.weights());
    Ok(CloudSummary {
        t,
        delta_k: transverse.delta_k,
        delta_e: transverse.delta_e,
        n_photons: transverse.n_photons,
        e_cloud: transverse.delta_e,
        e_cloud_average: transverse.e_cloud_average,
        per_alpha,
        uv_growth,
        uv_converged,
        grid: *grid,
    })
}

/// One time point of the self-consistent solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfConsistentPoint {
    pub t: f64,
    pub delta_k: ThreeVector,
    /// `p_m = k0 - Δk` entering the dressed current.
    pub p_m: ThreeVector,
    pub iterations: usize,
    /// Successive `Δk` iterates, starting from zero.
    pub history: Vec<ThreeVector>,
    /// Ratios of successive iterate changes.
    pub contraction: Vec<f64>,
}

pub const SELF_CONSISTENT_TOLERANCE: f64 = 1e-8;
pub const SELF_CONSISTENT_MAX_ITERATIONS: usize = 100;

/// Fixed-point loop `Δk → f → Q → Δk` at every time in `t_grid`.
pub fn solve_self_consistent(
    packet: &WavePacket,
    t_grid: &[f64],
    charge: f64,
    grid: &CloudGrid,
) -> Result<Vec<SelfConsistentPoint>> {
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Validity("time grid must be ascending from t >= 0".into()));
    }
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut dk = ThreeVector::ZERO;
        let mut history = vec![dk];
        let mut changes: Vec<f64> = Vec::new();
        let mut converged = false;
        for _ in 0..SELF_CONSISTENT_MAX_ITERATIONS {
            let next = cloud_summary(packet, t, dk, charge, grid)?.delta_k;
            let change = (next - dk).norm();
            dk = next;
            history.push(dk);
            changes.push(change);
            if change < SELF_CONSISTENT_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                what: "solve_self_consistent",
                iterations: SELF_CONSISTENT_MAX_ITERATIONS,
                last_change: changes.last().copied().unwrap_or(f64::NAN),
                history: history.iter().map(|v| v.norm()).collect(),
            });
        }
        let contraction = changes
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect();
        out.push(SelfConsistentPoint {
            t,
            delta_k: dk,
            p_m: packet.k0 - dk,
            iterations: changes.len(),
            history,
            contraction,
        });
    }
    Ok(out)
}
