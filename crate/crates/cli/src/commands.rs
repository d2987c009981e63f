//! Subcommand definitions and their computations.

use clap::{Subcommand, ValueEnum};
use serde_json::json;

use dressed_core::audit::AuditLog;
use dressed_core::coherent::{cloud_summary, solve_self_consistent, CloudGrid, PolarizationSum, WavePacket};
use dressed_core::gbfock::{
    build_space, displaced_vacuum, displaced_vacuum_series, eigen_residual, evolve_forced,
};
use dressed_core::infrared::{
    angular_spectrum, delta_shift, loglog_slope, photon_spectrum, total_photon_number,
    CollisionSpec, SphereGrid,
};
use dressed_core::linalg::CMatrix;
use dressed_core::meanfield::{
    lienard_wiechert, log_grid, moment_form_factor, potential_profile, potential_retarded,
    potential_uniform, self_energy, spin_vector, vector_potential_moment, Trajectory, UniformSpec,
};
use dressed_core::{Complex64, Electron, Spin, ThreeVector};

use crate::config::RunConfig;
use crate::report::{Report, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpinArg {
    Up,
    Down,
}

impl From<SpinArg> for Spin {
    fn from(s: SpinArg) -> Self {
        match s {
            SpinArg::Up => Spin::Up,
            SpinArg::Down => Spin::Down,
        }
    }
}

fn parse_vector(s: &str) -> Result<ThreeVector, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|e| format!("`{p}`: {e}"))?;
    }
    Ok(ThreeVector::from_array(v))
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM, got `{s}`"))?;
    let re = re.trim().parse().map_err(|e| format!("`{re}`: {e}"))?;
    let im = im.trim().parse().map_err(|e| format!("`{im}`: {e}"))?;
    Ok(Complex64::new(re, im))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaArg {
    Auto,
    Value(f64),
}

fn parse_delta(s: &str) -> Result<DeltaArg, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(DeltaArg::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(DeltaArg::Value(v)),
        Ok(v) => Err(format!("Δ must be non-negative, got {v}")),
        Err(e) => Err(format!("expected `auto` or a number: {e}")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rest-frame scalar potential profile against the Coulomb field.
    Potential {
        #[arg(long, default_value_t = 0.01)]
        r_min: f64,
        #[arg(long, default_value_t = 50.0)]
        r_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Field self-energy: quadrature against the closed form e²m.
    Selfenergy,
    /// Magnetic-moment form factor and dipole vector potential.
    Moment {
        #[arg(long, default_value_t = 0.01)]
        r_min: f64,
        #[arg(long, default_value_t = 50.0)]
        r_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, value_enum, default_value_t = SpinArg::Up)]
        spin: SpinArg,
    },
    /// Four-potential of a uniformly moving electron and its Lorentz-condition residual.
    Uniform {
        #[arg(long, value_parser = parse_vector)]
        k0: ThreeVector,
        #[arg(long, default_value_t = 0.5)]
        r_min: f64,
        #[arg(long, default_value_t = 5.0)]
        r_max: f64,
        #[arg(long, default_value_t = 8)]
        points: usize,
        /// Direction of the sampled ray.
        #[arg(long, value_parser = parse_vector, default_value = "0.6,0,0.8")]
        direction: ThreeVector,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long, value_enum, default_value_t = SpinArg::Up)]
        spin: SpinArg,
    },
    /// Retarded kernel potential of a uniformly moving charge against Lienard-Wiechert.
    Retarded {
        #[arg(long, value_parser = parse_vector, default_value = "0.1,0,0")]
        v: ThreeVector,
        #[arg(long, default_value_t = 0.1)]
        r_min: f64,
        #[arg(long, default_value_t = 50.0)]
        r_max: f64,
        #[arg(long, default_value_t = 40)]
        points: usize,
        #[arg(long, value_parser = parse_vector, default_value = "0,0.6,0.8")]
        direction: ThreeVector,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Emitted-photon spectrum of a collision with the reaction shift.
    Spectrum {
        #[arg(long, value_parser = parse_vector)]
        v1: ThreeVector,
        #[arg(long, value_parser = parse_vector)]
        v2: ThreeVector,
        /// `auto` solves for the shift; a number fixes it (0 is classical).
        #[arg(long, value_parser = parse_delta, default_value = "auto")]
        delta: DeltaArg,
        #[arg(long, default_value_t = 1e-4)]
        omega_min: f64,
        #[arg(long, default_value_t = 1e-2)]
        omega_max: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        /// Direction for the per-polarization columns.
        #[arg(long, value_parser = parse_vector, default_value = "0,1,0")]
        direction: ThreeVector,
        /// Upper limit of the photon-number integral.
        #[arg(long, default_value_t = 1.0)]
        number_cutoff: f64,
    },
    /// Self-consistent reaction shift for a small-angle kick.
    Delta {
        #[arg(long)]
        speed: f64,
        /// Velocity change as a fraction of the speed (at most 0.2).
        #[arg(long, default_value_t = 0.1)]
        kick: f64,
    },
    /// Photon-cloud summary and self-consistent momentum loss.
    Cloud {
        #[arg(long)]
        width: f64,
        #[arg(long, value_parser = parse_vector, default_value = "0,0,0")]
        k0: ThreeVector,
        #[arg(long)]
        t: f64,
        /// Time points from t/steps to t for the self-consistent trajectory.
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = SpinArg::Up)]
        spin: SpinArg,
    },
    /// Indefinite-metric Fock-space invariants and the forced oscillator.
    Gbcheck {
        #[arg(long, default_value_t = 64)]
        n_trunc: usize,
        #[arg(long, value_parser = parse_complex, default_value = "0.5,0")]
        q0: Complex64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
}

fn electron(config: &RunConfig) -> Electron {
    Electron::with_coupling(config.mass, config.alpha)
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn ray(direction: ThreeVector) -> Result<ThreeVector, CliError> {
    direction.unit().ok_or_else(|| usage("--direction must be a nonzero vector"))
}

pub fn execute(command: &Command, config: &RunConfig) -> Result<Report, CliError> {
    let e = electron(config);
    let mut audit = AuditLog::new(config.mass, config.alpha);
    match *command {
        Command::Potential { r_min, r_max, points } => {
            audit.potential_conventions();
            let profile = potential_profile(&e, r_min, r_max, points)?;
            let mut table = Table::new(&["r", "a0", "coulomb", "ratio"]);
            for &(r, a0) in &profile.samples {
                let coulomb = e.charge / r;
                table.push(vec![r, a0, coulomb, a0 / coulomb]);
            }
            let mut report = Report::new("potential", audit);
            report.table = Some(table);
            Ok(report)
        }
        Command::Selfenergy => {
            let s = self_energy(&e)?;
            let mut report = Report::new("selfenergy", audit);
            report.set("numeric", s.numeric);
            report.set("analytic", s.analytic);
            report.set("rel_err", s.relative_error);
            report.set("quadrature_error", s.quadrature_error);
            Ok(report)
        }
        Command::Moment { r_min, r_max, points, spin } => {
            let s = spin_vector(spin.into());
            let mu = s * (e.charge / e.mass);
            let mut table = Table::new(&["r", "phi", "r_phi", "a_x", "a_y", "a_z", "dipole_y", "ratio"]);
            // Sampled along x̂, where A points along ±ŷ.
            for r in log_grid(r_min, r_max, points)? {
                let phi = moment_form_factor(r, e.mass)?;
                let a = vector_potential_moment(ThreeVector::X * r, s, &e)?;
                let dipole = (ThreeVector::X * (-1.0 / (r * r))).cross(mu);
                table.push(vec![r, phi, r * phi, a.x, a.y, a.z, dipole.y, a.y / dipole.y]);
            }
            let mut report = Report::new("moment", audit);
            report.table = Some(table);
            Ok(report)
        }
        Command::Uniform { k0, r_min, r_max, points, direction, t, spin } => {
            audit.uniform_conventions();
            let n = ray(direction)?;
            let spec = UniformSpec::default();
            let spin: Spin = spin.into();
            let at = |p: ThreeVector, tt: f64| potential_uniform(p, tt, k0, spin, &e, &spec);
            let mut table = Table::new(&["r", "a0", "a_x", "a_y", "a_z"]);
            for r in log_grid(r_min, r_max, points)? {
                let a = at(n * r, t)?;
                table.push(vec![r, a.t, a.space[0], a.space[1], a.space[2]]);
            }
            let probe = n * (r_min * r_max).sqrt();
            let h = 2e-3 / e.mass;
            let dt = (at(probe, t + h)?.t - at(probe, t - h)?.t) / (2.0 * h);
            let mut div = 0.0;
            let mut scale = dt.abs();
            for (i, axis) in [ThreeVector::X, ThreeVector::Y, ThreeVector::Z].into_iter().enumerate() {
                let plus = at(probe + axis * h, t)?.spatial().to_array()[i];
                let minus = at(probe - axis * h, t)?.spatial().to_array()[i];
                let d = (plus - minus) / (2.0 * h);
                div += d;
                scale += d.abs();
            }
            let mut report = Report::new("uniform", audit);
            report.table = Some(table);
            report.set("lorentz_probe_r", probe.norm());
            report.set("lorentz_residual", (dt + div).abs());
            report.set("lorentz_relative_residual", (dt + div).abs() / scale);
            Ok(report)
        }
        Command::Retarded { v, r_min, r_max, points, direction, t } => {
            let n = ray(direction)?;
            let traj = Trajectory::uniform(ThreeVector::ZERO, v)?;
            let mut table = Table::new(&["r", "a0", "lienard_wiechert", "ratio"]);
            for r in log_grid(r_min, r_max, points)? {
                let p = traj.position(t) + n * r;
                let a = potential_retarded(p, t, &traj, &e)?.t;
                let lw = lienard_wiechert(p, t, &traj, &e)?.t;
                table.push(vec![r, a, lw, a / lw]);
            }
            let mut report = Report::new("retarded", audit);
            report.table = Some(table);
            report.set("speed", v.norm());
            Ok(report)
        }
        Command::Spectrum {
            v1,
            v2,
            delta,
            omega_min,
            omega_max,
            points,
            direction,
            number_cutoff,
        } => {
            if !(omega_min > 0.0 && omega_max > omega_min) || points < 2 {
                return Err(usage("need 0 < --omega-min < --omega-max and --points >= 2"));
            }
            let spec = CollisionSpec::new(v1, v2, config.mass, config.alpha)?;
            let delta = match delta {
                DeltaArg::Value(d) => d * config.mass,
                DeltaArg::Auto => {
                    let shift = delta_shift(&spec)?;
                    audit.delta_trace(&shift);
                    shift.delta
                }
            };
            audit.spectrum_conventions(number_cutoff * config.mass);
            let grid = SphereGrid::new(
                config.sphere_polar.unwrap_or(64),
                config.sphere_phi.unwrap_or(64),
            )?;
            let n = ray(direction)?;
            let mut table = Table::new(&["omega", "angular", "n1", "n2"]);
            let mut fit = Vec::with_capacity(points);
            for w in log_grid(omega_min, omega_max, points)? {
                let w = w * config.mass;
                let ang = angular_spectrum(&spec, w, delta, &grid)?;
                let (n1, n2) = photon_spectrum(&spec, w, n, delta)?;
                table.push(vec![w, ang, n1, n2]);
                fit.push((w, ang));
            }
            let mut report = Report::new("spectrum", audit);
            report.table = Some(table);
            report.set("delta", delta);
            report.set("slope", loglog_slope(&fit));
            let lower = omega_min * config.mass;
            let upper = number_cutoff * config.mass;
            if upper > lower {
                report.set("photon_number", total_photon_number(&spec, delta, lower, upper, &grid)?);
                report.set("photon_number_omega_max", upper);
            }
            Ok(report)
        }
        Command::Delta { speed, kick } => {
            if !(kick > 0.0 && kick <= 0.2) {
                return Err(usage("--kick must lie in (0, 0.2]"));
            }
            let v1 = ThreeVector::new(speed, 0.0, 0.0);
            let v2 = ThreeVector::new(speed * (1.0 - kick * kick / 2.0), speed * kick, 0.0);
            let spec = CollisionSpec::new(v1, v2, config.mass, config.alpha)?;
            let shift = delta_shift(&spec)?;
            audit.delta_trace(&shift);
            let nonrel = 4.0 / 3.0 * config.alpha * config.mass * speed * speed;
            let mut report = Report::new("delta", audit);
            report.set("delta", shift.delta);
            report.set("seed", shift.seed);
            report.set("first_iterate", shift.first_iterate);
            report.set("iterations", shift.iterations as f64);
            report.set("coefficient", shift.coefficient);
            report.set("nonrelativistic", nonrel);
            report.set("ratio_to_nonrelativistic", shift.delta / nonrel);
            report.set("trace", json!(shift.trace));
            Ok(report)
        }
        Command::Cloud { width, k0, t, steps, spin } => {
            if t.is_nan() || t <= 0.0 || steps == 0 {
                return Err(usage("need --t > 0 and --steps >= 1"));
            }
            let defaults = CloudGrid::default();
            let mut grid = CloudGrid {
                n_theta: config.n_theta.unwrap_or(defaults.n_theta),
                n_phi: config.n_phi.unwrap_or(defaults.n_phi),
                q_max: config.q_max.unwrap_or(defaults.q_max),
                ..defaults
            };
            if let Some(tol) = config.rel_tol {
                grid.radial = grid.radial.with_tolerances(1e-16, tol);
            }
            audit.cloud_conventions(&grid);
            let packet = WavePacket::new(width, k0, spin.into())?;
            if let Some(w) = packet.validity_warning() {
                audit.push("cloud.validity", w, "stationary-phase reduction");
            }
            let times: Vec<f64> = (1..=steps).map(|i| t * i as f64 / steps as f64).collect();
            let trajectory = solve_self_consistent(&packet, &times, e.charge, &grid)?;
            let mut table = Table::new(&[
                "t", "dk_x", "dk_y", "dk_z", "n_photons", "delta_e", "e_cloud_average", "iterations",
            ]);
            let mut last = None;
            for point in &trajectory {
                let s = cloud_summary(&packet, point.t, point.delta_k, e.charge, &grid)?;
                table.push(vec![
                    point.t,
                    point.delta_k.x,
                    point.delta_k.y,
                    point.delta_k.z,
                    s.n_photons,
                    s.delta_e,
                    s.e_cloud_average,
                    point.iterations as f64,
                ]);
                last = Some(s);
            }
            let s = last.expect("at least one time point");
            let mut report = Report::new("cloud", audit);
            report.table = Some(table);
            report.set("self_energy", e.alpha() * e.mass);
            for (name, convention) in [
                ("transverse", PolarizationSum::Transverse),
                ("all_positive", PolarizationSum::AllPositive),
                ("metric_weighted", PolarizationSum::MetricWeighted),
            ] {
                let totals = s.totals(convention);
                report.set(
                    name,
                    json!({
                        "n_photons": totals.n_photons,
                        "delta_e": totals.delta_e,
                        "e_cloud_average": totals.e_cloud_average,
                        "delta_k": totals.delta_k.to_array(),
                    }),
                );
            }
            report.set("uv_growth", json!(s.uv_growth));
            report.set("uv_converged", json!(s.uv_converged));
            Ok(report)
        }
        Command::Gbcheck { n_trunc, q0, omega, steps } => {
            audit.gupta_bleuler_conventions();
            let space = build_space(n_trunc, omega)?;
            let comm = space.commutator();
            let mut comm_dev: f64 = 0.0;
            for i in 0..n_trunc - 1 {
                for j in 0..n_trunc {
                    let expected = if i == j { -1.0 } else { 0.0 };
                    comm_dev = comm_dev.max((comm[(i, j)] - Complex64::new(expected, 0.0)).norm());
                }
            }
            let eta = CMatrix::diagonal(&space.eta);
            let adjoint_dev = (&(&(&eta * &space.b_dag) * &eta) - &space.b.adjoint()).max_abs();
            let h0_dev = (0..n_trunc)
                .map(|n| (space.h0[(n, n)] - Complex64::new(omega * n as f64, 0.0)).norm())
                .fold(0.0, f64::max);
            let state = displaced_vacuum(&space, q0)?;
            let series = displaced_vacuum_series(&space, q0)?;
            let amplitude = q0 * omega;
            let forced = evolve_forced(&space, |_| amplitude, 0.0, 1.0, steps)?;
            let mut report = Report::new("gbcheck", audit);
            report.set("commutator_deviation", comm_dev);
            report.set("eta_adjoint_deviation", adjoint_dev);
            report.set("h0_deviation_from_plus_omega_n", h0_dev);
            report.set("eigen_residual", eigen_residual(&space, &state, q0));
            report.set("eta_norm", state.eta_norm());
            report.set("tail_mass", state.tail_mass());
            report.set("expm_vs_series", state.aux_distance(&series) / series.aux_norm());
            report.set("forced_q_re", forced.q.re);
            report.set("forced_q_im", forced.q.im);
            report.set("forced_phase", forced.phase);
            report.set("forced_printed_phase", forced.printed_phase);
            report.set("forced_overlap_deviation", (forced.overlap - Complex64::new(1.0, 0.0)).norm());
            report.set("forced_aux_difference", forced.aux_difference);
            Ok(report)
        }
    }
}
