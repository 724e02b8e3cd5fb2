use std::sync::Arc;

use super::config::SimConfig;
use super::noise::{Frozen, NoiseModel};
use super::radius::RadiusSchedule;
use super::scheme::{Propagator, Scheme};
use crate::error::{invalid, Error, Result};
use crate::field::{FourierField, SpectralVelocity};
use crate::spectral::{project_constraints, ProductBackend};
use crate::stochastic::{good_set_indicator, grid_steps, sample_path, BrownianPath};

/// Relative tolerance on the constraints of the initial datum.
pub const INITIAL_CONSTRAINT_TOLERANCE: f64 = 1e-10;

/// Target number of recorded samples per run.
pub const RECORD_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Completed,
    Blowup,
    RadiusExhausted,
    GoodsetExit,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Completed => "completed",
            Status::Blowup => "blowup",
            Status::RadiusExhausted => "radius_exhausted",
            Status::GoodsetExit => "goodset_exit",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub w: f64,
    pub phi: f64,
    pub gevrey_u: f64,
    pub l2_u: f64,
    pub gevrey_v: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub samples: Vec<Sample>,
    pub status: Status,
    pub t_final: f64,
    /// Whether the path stayed in the good set up to `t_final`.
    pub goodset: bool,
    pub radius: RadiusSchedule,
    pub backend: &'static str,
    pub final_state: SpectralVelocity,
}

impl RunRecord {
    pub fn max_gevrey_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.gevrey_u).fold(0.0, f64::max)
    }

    pub fn initial(&self) -> &Sample {
        &self.samples[0]
    }
}

/// Resolved run context shared by the steppers.
pub struct Stepper {
    pub cfg: SimConfig,
    pub model: Arc<dyn NoiseModel>,
    pub scheme: Arc<dyn Scheme>,
    pub backend: Arc<dyn ProductBackend>,
    pub prop: Propagator,
}

impl Stepper {
    /// `weight_exponent` is the largest `phi kmax^s` the results will be
    /// measured with; it drives the `auto` backend choice.
    pub fn new(cfg: &SimConfig, weight_exponent: f64) -> Result<Self> {
        cfg.validate()?;
        let model = cfg.noise_model()?;
        let lat = crate::lattice::Lattice::shared(cfg.n);
        let rates = lat
            .magnitudes()
            .iter()
            .map(|&k| model.decay(cfg, k))
            .collect();
        Ok(Stepper {
            cfg: cfg.clone(),
            scheme: cfg.scheme_impl()?,
            backend: cfg.backend_for(weight_exponent)?,
            model,
            prop: Propagator::new(rates),
        })
    }

    /// One step from `t` with the noise frozen at `w`, followed by the
    /// constraint projection.
    pub fn step(&self, u: &SpectralVelocity, dt: f64, w: f64) -> Result<SpectralVelocity> {
        if u.truncation() != self.cfg.n {
            return Err(Error::TruncationMismatch {
                left: u.truncation(),
                right: self.cfg.n,
            });
        }
        let frozen = Frozen {
            nu: self.cfg.nu,
            s: self.cfg.s,
            w,
            backend: self.backend.as_ref(),
        };
        let linear_only = self.cfg.linear_only;
        let model = self.model.as_ref();
        let mut rhs = |v: &SpectralVelocity| -> Result<SpectralVelocity> {
            if linear_only {
                Ok(SpectralVelocity::zeros_on(v.lattice().clone()))
            } else {
                model.nonlinear(v, &frozen)
            }
        };
        let next = self.scheme.step(u, dt, &self.prop, &mut rhs)?;
        if next
            .components()
            .iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NormOverflow);
        }
        Ok(project_constraints(&next))
    }
}

fn require_noise(cfg: &SimConfig, name: &str) -> Result<()> {
    if cfg.noise != name {
        return Err(invalid(format!(
            "configuration has noise `{}`, expected `{name}`",
            cfg.noise
        )));
    }
    Ok(())
}

/// One random-diffusion step with `W` frozen at its value at `t`.
pub fn step_diffusion(
    u: &SpectralVelocity,
    t: f64,
    dt: f64,
    path: &BrownianPath,
    cfg: &SimConfig,
) -> Result<SpectralVelocity> {
    require_noise(cfg, "diffusion")?;
    let kmax = u.lattice().max_magnitude();
    let w = path.value_at(t);
    Stepper::new(cfg, cfg.nu * w.abs() * kmax.powf(cfg.s))?.step(u, dt, w)
}

/// One random-damping step with `W` frozen at its value at `t`.
pub fn step_damping(
    u: &SpectralVelocity,
    t: f64,
    dt: f64,
    path: &BrownianPath,
    cfg: &SimConfig,
) -> Result<SpectralVelocity> {
    require_noise(cfg, "damping")?;
    Stepper::new(cfg, cfg.phi0 * u.lattice().max_magnitude())?.step(u, dt, path.value_at(t))
}

/// Runs on stream 0 of `cfg.seed` (the zero path when `nu = 0`).
pub fn run(u0: &SpectralVelocity, cfg: &SimConfig) -> Result<RunRecord> {
    let path = if cfg.nu == 0.0 {
        BrownianPath::zero(cfg.t_end, cfg.dt)?
    } else {
        sample_path(cfg.t_end, cfg.dt, cfg.seed)?
    };
    run_with_path(u0, cfg, &path)
}

pub fn run_with_path(
    u0: &SpectralVelocity,
    cfg: &SimConfig,
    path: &BrownianPath,
) -> Result<RunRecord> {
    run_with_observer(u0, cfg, path, &mut |_, _| {})
}

/// `observer(t, U(t))` is called at every grid time, starting with `t = 0`.
pub fn run_with_observer(
    u0: &SpectralVelocity,
    cfg: &SimConfig,
    path: &BrownianPath,
    observer: &mut dyn FnMut(f64, &SpectralVelocity),
) -> Result<RunRecord> {
    cfg.validate()?;
    if u0.truncation() != cfg.n {
        return Err(Error::TruncationMismatch {
            left: u0.truncation(),
            right: cfg.n,
        });
    }
    let report = u0.check_invariants();
    if !report.holds(INITIAL_CONSTRAINT_TOLERANCE) {
        return Err(invalid(format!(
            "initial datum violates the constraints (relative defect {:.3e})",
            report.worst_relative()
        )));
    }
    if path.horizon() < cfg.t_end * (1.0 - 1e-12) {
        return Err(invalid(format!(
            "path horizon {} shorter than T = {}",
            path.horizon(),
            cfg.t_end
        )));
    }
    let model = cfg.noise_model()?;
    let radius = cfg.radius_for(u0)?;
    let s_norm = model.norm_s(cfg);
    let kmax = u0.lattice().max_magnitude();
    let steps = grid_steps(cfg.t_end, cfg.dt);
    let w_abs = path.values.iter().map(|w| w.abs()).fold(0.0, f64::max);
    let phi_max = radius.eval(0.0).max(radius.eval(cfg.t_end)).max(0.0);
    let weight = phi_max * kmax.powf(s_norm) + model.multiplier_exponent(cfg, kmax, w_abs);
    let stepper = Stepper::new(cfg, weight)?;
    let stride = (steps / RECORD_POINTS).max(1);
    let diffusion = cfg.noise == "diffusion";

    let measure = |t: f64, w: f64, u: &SpectralVelocity| -> Result<Sample> {
        let phi = radius.eval(t);
        let gevrey_u = cfg.gevrey_norm(u, phi.max(0.0))?;
        let gevrey_v = model
            .recover_v(cfg, &radius, u, t, w)
            .and_then(|v| cfg.gevrey_norm(&v, model.v_radius(cfg, &radius, t)))
            .ok();
        Ok(Sample {
            t,
            w,
            phi,
            gevrey_u,
            l2_u: u.l2_norm(),
            gevrey_v,
        })
    };

    let mut samples = vec![measure(0.0, 0.0, u0)?];
    let threshold = cfg.blowup_factor * samples[0].gevrey_u;
    let mut u = u0.clone();
    let mut status = Status::Completed;
    let mut t_final = 0.0;
    observer(0.0, &u);
    for i in 0..steps {
        let t = i as f64 * cfg.dt;
        let w = path.value_at(t);
        if let Some(exit) = model.exit(cfg, &radius, t, w) {
            status = exit;
            break;
        }
        let t_next = if i + 1 == steps {
            cfg.t_end
        } else {
            (i + 1) as f64 * cfg.dt
        };
        let next = match stepper.step(&u, t_next - t, w) {
            Ok(next) => next,
            Err(Error::ExponentCap { .. }) if diffusion => {
                status = Status::GoodsetExit;
                break;
            }
            Err(Error::NormOverflow) => {
                status = Status::Blowup;
                break;
            }
            Err(e) => return Err(e),
        };
        u = next;
        t_final = t_next;
        observer(t_next, &u);
        let w_next = path.value_at(t_next);
        let record = (i + 1) % stride == 0 || i + 1 == steps;
        let sample = match measure(t_next, w_next, &u) {
            Ok(s) => s,
            Err(Error::ExponentCap { .. }) if diffusion => {
                status = Status::GoodsetExit;
                break;
            }
            Err(e) => return Err(e),
        };
        let blown =
            !sample.gevrey_u.is_finite() || (threshold > 0.0 && sample.gevrey_u > threshold);
        if record || blown {
            samples.push(sample);
        }
        if blown {
            status = Status::Blowup;
            break;
        }
    }
    if status == Status::Completed && t_final < cfg.t_end {
        t_final = cfg.t_end;
    }
    let goodset = if cfg.nu > 0.0 && cfg.alpha > 0.0 {
        let verdict = good_set_indicator(path, &cfg.good_set());
        verdict.first_violation.is_none_or(|tv| tv > t_final)
    } else {
        true
    };
    Ok(RunRecord {
        samples,
        status,
        t_final,
        goodset,
        radius,
        backend: stepper.backend.name(),
        final_state: u,
    })
}

/// `V = Gamma^{-1} U` at time `t`.
pub fn recover_v(
    u: &SpectralVelocity,
    w: f64,
    t: f64,
    cfg: &SimConfig,
) -> Result<SpectralVelocity> {
    let model = cfg.noise_model()?;
    let radius = match cfg.radius {
        Some(r) => r,
        None if cfg.noise == "diffusion" => model.radius(cfg, u)?,
        None => RadiusSchedule::constant(cfg.phi0),
    };
    model.recover_v(cfg, &radius, u, t, w)
}
