//! Experiment files: `key = value` pairs, `[section]` headers, `#` comments
//! (TOML syntax, so string values are quoted). Every diagnostic names the
//! offending line.

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use hydrostat::dynamics::SimConfig;
use hydrostat::initial::{self, InitialParams};
use hydrostat::stochastic::GoodSetParams;
use hydrostat::SpectralVelocity;
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type Field<T> = Option<Spanned<T>>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: Field<String>,
    out: Field<String>,
    run: Option<Spanned<RawRun>>,
    initial: Option<Spanned<RawInitial>>,
    ensemble: Option<Spanned<RawEnsemble>>,
    goodset: Option<Spanned<RawGoodSet>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    noise: Field<String>,
    scheme: Field<String>,
    backend: Field<String>,
    n: Field<i64>,
    dt: Field<f64>,
    t_end: Field<f64>,
    nu: Field<f64>,
    s: Field<f64>,
    sigma: Field<f64>,
    alpha: Field<f64>,
    beta: Field<f64>,
    eta: Field<f64>,
    phi0: Field<f64>,
    c_sigma: Field<f64>,
    c_star: Field<f64>,
    blowup_factor: Field<f64>,
    seed: Field<i64>,
    seeds: Field<Vec<i64>>,
    linear_only: Field<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    family: Field<String>,
    amplitude: Field<f64>,
    /// Rescales the datum to this Gevrey norm at the run's initial radius.
    gevrey_size: Field<f64>,
    seed: Field<i64>,
    decay: Field<f64>,
    rho: Field<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    epsilon: Field<f64>,
    paths: Field<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGoodSet {
    alpha: Field<f64>,
    beta: Field<f64>,
    nu: Field<f64>,
    t_end: Field<f64>,
    dt: Field<f64>,
    paths: Field<i64>,
}

#[derive(Debug, Clone)]
pub struct InitialSpec {
    pub family: String,
    pub params: InitialParams,
    pub gevrey_size: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub epsilon: f64,
    pub paths: usize,
    /// Whether `nu` was given; otherwise the smallest admissible value is used.
    pub nu_given: bool,
}

#[derive(Debug, Clone)]
pub struct GoodSetSpec {
    pub params: GoodSetParams,
    pub t_end: f64,
    pub dt: f64,
    pub paths: usize,
}

/// A parsed experiment file.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: String,
    pub out: PathBuf,
    pub sim: SimConfig,
    pub seeds: Vec<u64>,
    pub initial: InitialSpec,
    pub ensemble: Option<EnsembleSpec>,
    pub goodset: Option<GoodSetSpec>,
}

pub const DEFAULT_OUT: &str = "hydrostat-out";
pub const DEFAULT_PATHS: usize = 100;

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())]
            .matches('\n')
            .count()
            + 1
    }

    fn err<T>(&self, span: Range<usize>, message: impl Into<String>) -> Result<T, ConfigError> {
        Err(ConfigError {
            line: Some(self.line(span)),
            message: message.into(),
        })
    }

    fn positive(&self, field: &Field<f64>, key: &str) -> Result<Option<f64>, ConfigError> {
        self.checked(field, key, |v| v > 0.0, "must be positive")
    }

    fn non_negative(&self, field: &Field<f64>, key: &str) -> Result<Option<f64>, ConfigError> {
        self.checked(field, key, |v| v >= 0.0, "must be non-negative")
    }

    fn checked(
        &self,
        field: &Field<f64>,
        key: &str,
        ok: impl Fn(f64) -> bool,
        what: &str,
    ) -> Result<Option<f64>, ConfigError> {
        match field {
            Some(v) if !v.get_ref().is_finite() || !ok(*v.get_ref()) => {
                self.err(v.span(), format!("`{key}` {what}, got {}", v.get_ref()))
            }
            Some(v) => Ok(Some(*v.get_ref())),
            None => Ok(None),
        }
    }

    fn count(&self, field: &Field<i64>, key: &str, min: i64) -> Result<Option<usize>, ConfigError> {
        match field {
            Some(v) if *v.get_ref() < min => self.err(
                v.span(),
                format!("`{key}` must be at least {min}, got {}", v.get_ref()),
            ),
            Some(v) => Ok(Some(*v.get_ref() as usize)),
            None => Ok(None),
        }
    }

    fn seed(&self, field: &Spanned<i64>) -> Result<u64, ConfigError> {
        u64::try_from(*field.get_ref()).or_else(|_| {
            self.err(
                field.span(),
                format!("seed must be non-negative, got {}", field.get_ref()),
            )
        })
    }
}

fn value<T: Clone>(field: &Field<T>) -> Option<T> {
    field.as_ref().map(|v| v.get_ref().clone())
}

/// Line of a table header, if the table is present.
fn section_line<T>(src: &Source<'_>, table: &Option<Spanned<T>>) -> Option<usize> {
    table.as_ref().map(|t| src.line(t.span()))
}

pub fn load(path: &Path) -> Result<ExperimentSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        line: None,
        message: format!("cannot read: {e}"),
    })?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| ConfigError {
        line: e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1),
        message: e.message().to_string(),
    })?;
    let src = Source { text };
    let run_line = section_line(&src, &raw.run);
    let run = raw.run.map(Spanned::into_inner).unwrap_or_default();

    let noise = value(&run.noise).unwrap_or_else(|| "diffusion".into());
    let mut sim = match noise.as_str() {
        "damping" => SimConfig::damping(),
        "none" => SimConfig::deterministic(),
        _ => SimConfig::diffusion(),
    };
    sim.noise = noise;
    if let Some(v) = value(&run.scheme) {
        sim.scheme = v;
    }
    if let Some(v) = value(&run.backend) {
        sim.backend = v;
    }
    if let Some(n) = src.count(&run.n, "n", 1)? {
        sim.n = n;
    }
    if let Some(v) = src.positive(&run.dt, "dt")? {
        sim.dt = v;
    }
    if let Some(v) = src.positive(&run.t_end, "t_end")? {
        sim.t_end = v;
    }
    if let Some(v) = src.non_negative(&run.nu, "nu")? {
        sim.nu = v;
    }
    if let Some(v) = src.non_negative(&run.s, "s")? {
        sim.s = v;
    }
    if let Some(v) = src.positive(&run.sigma, "sigma")? {
        sim.sigma = v;
    }
    if let Some(v) = src.non_negative(&run.alpha, "alpha")? {
        sim.alpha = v;
    }
    if let Some(v) = src.non_negative(&run.beta, "beta")? {
        sim.beta = v;
    }
    sim.eta = src.non_negative(&run.eta, "eta")?;
    if let Some(v) = src.positive(&run.phi0, "phi0")? {
        sim.phi0 = v;
    }
    sim.c_sigma = src.positive(&run.c_sigma, "c_sigma")?;
    sim.c_star = src.positive(&run.c_star, "c_star")?;
    if let Some(v) = src.checked(
        &run.blowup_factor,
        "blowup_factor",
        |v| v > 1.0,
        "must exceed 1",
    )? {
        sim.blowup_factor = v;
    }
    if let Some(v) = value(&run.linear_only) {
        sim.linear_only = v;
    }
    let seeds = match (&run.seed, &run.seeds) {
        (Some(_), Some(list)) => {
            return src.err(list.span(), "give either `seed` or `seeds`, not both")
        }
        (Some(s), None) => vec![src.seed(s)?],
        (None, Some(list)) if list.get_ref().is_empty() => {
            return src.err(list.span(), "`seeds` must not be empty")
        }
        (None, Some(list)) => list
            .get_ref()
            .iter()
            .map(|&s| {
                u64::try_from(s).or_else(|_| {
                    src.err(list.span(), format!("seed must be non-negative, got {s}"))
                })
            })
            .collect::<Result<_, _>>()?,
        (None, None) => vec![0],
    };
    sim.seed = seeds[0];

    let ini = raw.initial.map(Spanned::into_inner).unwrap_or_default();
    let family = value(&ini.family).unwrap_or_else(|| "two-mode".into());
    if initial::registry().get(&family).is_err() {
        let span = ini.family.as_ref().map(|f| f.span()).unwrap_or(0..0);
        return src.err(
            span,
            format!(
                "unknown initial-data family `{family}` (known: {})",
                initial::registry().names().join(", ")
            ),
        );
    }
    let defaults = InitialParams::default();
    let norm_s = if sim.s > 0.0 && sim.noise != "damping" {
        sim.s
    } else {
        1.0
    };
    let initial = InitialSpec {
        family,
        params: InitialParams {
            amplitude: src
                .non_negative(&ini.amplitude, "amplitude")?
                .unwrap_or(defaults.amplitude),
            seed: ini
                .seed
                .as_ref()
                .map(|s| src.seed(s))
                .transpose()?
                .unwrap_or(defaults.seed),
            // Spectrum matched to the tracked norm unless given.
            decay: src
                .non_negative(&ini.decay, "decay")?
                .unwrap_or(sim.sigma * norm_s + 2.0),
            rho: src.non_negative(&ini.rho, "rho")?.unwrap_or(defaults.rho),
        },
        gevrey_size: src.positive(&ini.gevrey_size, "gevrey_size")?,
    };

    let ensemble = match raw.ensemble {
        Some(e) => {
            let line = src.line(e.span());
            let e = e.into_inner();
            let epsilon = match src.checked(
                &e.epsilon,
                "epsilon",
                |v| v > 0.0 && v < 1.0,
                "must lie in (0, 1)",
            )? {
                Some(v) => v,
                None => {
                    return Err(ConfigError {
                        line: Some(line),
                        message: "[ensemble] needs `epsilon`".into(),
                    })
                }
            };
            let paths = src.count(&e.paths, "paths", 1)?.unwrap_or(DEFAULT_PATHS);
            Some(EnsembleSpec {
                epsilon,
                paths,
                nu_given: run.nu.is_some(),
            })
        }
        None => None,
    };

    let goodset = match raw.goodset {
        Some(g) => {
            let line = src.line(g.span());
            let g = g.into_inner();
            let need = |field: Option<f64>, key: &str| {
                field.ok_or_else(|| ConfigError {
                    line: Some(line),
                    message: format!("[goodset] needs `{key}`"),
                })
            };
            let alpha = need(src.non_negative(&g.alpha, "alpha")?, "alpha")?;
            let beta = need(src.non_negative(&g.beta, "beta")?, "beta")?;
            let nu = need(src.positive(&g.nu, "nu")?, "nu")?;
            let params = GoodSetParams::new(alpha, beta, nu).map_err(|e| ConfigError {
                line: Some(line),
                message: e.to_string(),
            })?;
            Some(GoodSetSpec {
                params,
                t_end: need(src.positive(&g.t_end, "t_end")?, "t_end")?,
                dt: src.positive(&g.dt, "dt")?.unwrap_or(1e-3),
                paths: src.count(&g.paths, "paths", 1)?.unwrap_or(DEFAULT_PATHS),
            })
        }
        None => None,
    };

    // Cross-field checks on the assembled run are reported at the [run] header.
    sim.validate().map_err(|e| ConfigError {
        line: run_line,
        message: e.to_string(),
    })?;
    Ok(ExperimentSpec {
        name: value(&raw.name).unwrap_or_else(|| "experiment".into()),
        out: value(&raw.out)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        sim,
        seeds,
        initial,
        ensemble,
        goodset,
    })
}

impl ExperimentSpec {
    /// The initial datum for this experiment, rescaled if `gevrey_size` is set.
    pub fn initial_datum(&self) -> hydrostat::Result<SpectralVelocity> {
        use hydrostat::FourierField;
        let u = initial::build(&self.initial.family, self.sim.n, &self.initial.params)?;
        match self.initial.gevrey_size {
            Some(size) if !u.is_zero() => {
                let phi = match self.sim.noise.as_str() {
                    "diffusion" => self.sim.alpha + self.sim.eta_value(),
                    _ => self.sim.phi0,
                };
                let norm = self.sim.gevrey_norm(&u, phi)?;
                Ok(u.scaled(size / norm))
            }
            _ => Ok(u),
        }
    }
}
