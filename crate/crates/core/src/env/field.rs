use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::rng::{open_unit_f64, site_key, stream, unit_f64};
use super::{Grid, Site, Window};
use crate::csv::{self, fmt_real};
use crate::error::{Error, Result};

/// Law of a single weight `ω_x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Gaussian {
        mean: f64,
        sd: f64,
    },
    /// `ω = −log G` with `G ~ Gamma(shape, 1)`.
    InverseLogGamma {
        shape: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Constant {
        c: f64,
    },
}

impl WeightSpec {
    pub fn standard_gaussian() -> Self {
        WeightSpec::Gaussian { mean: 0.0, sd: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, name: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::param(format!("{name} must be finite, got {x}")))
            }
        };
        match *self {
            WeightSpec::Gaussian { mean, sd } => {
                finite(mean, "mean")?;
                finite(sd, "sd")?;
                if sd <= 0.0 {
                    return Err(Error::param(format!("gaussian sd must be positive, got {sd}")));
                }
            }
            WeightSpec::InverseLogGamma { shape } => {
                finite(shape, "shape")?;
                if shape <= 0.0 {
                    return Err(Error::param(format!(
                        "inverse log-gamma shape must be positive, got {shape}"
                    )));
                }
            }
            WeightSpec::Uniform { a, b } => {
                finite(a, "a")?;
                finite(b, "b")?;
                if a >= b {
                    return Err(Error::param(format!("uniform needs a < b, got a={a}, b={b}")));
                }
            }
            WeightSpec::Constant { c } => finite(c, "c")?,
        }
        Ok(())
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, WeightSpec::Constant { .. })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            WeightSpec::Gaussian { mean, .. } => mean,
            WeightSpec::InverseLogGamma { shape } => -statrs::function::gamma::digamma(shape),
            WeightSpec::Uniform { a, b } => 0.5 * (a + b),
            WeightSpec::Constant { c } => c,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            WeightSpec::Gaussian { sd, .. } => sd * sd,
            WeightSpec::InverseLogGamma { shape } => trigamma(shape),
            WeightSpec::Uniform { a, b } => (b - a) * (b - a) / 12.0,
            WeightSpec::Constant { .. } => 0.0,
        }
    }

    /// Weight at `site` for `seed`. Pure in its arguments.
    pub fn sample_at(&self, seed: u64, site: Site) -> f64 {
        let bits = site_key(seed, stream::WEIGHTS, site);
        match *self {
            WeightSpec::Constant { c } => c,
            WeightSpec::Uniform { a, b } => a + (b - a) * unit_f64(bits),
            WeightSpec::Gaussian { mean, sd } => {
                // Box–Muller on two keyed uniforms.
                let u1 = open_unit_f64(bits);
                let u2 = unit_f64(super::rng::mix64(bits ^ 0x6761_7573_7369_616e));
                let r = (-2.0 * u1.ln()).sqrt();
                mean + sd * r * (std::f64::consts::TAU * u2).cos()
            }
            WeightSpec::InverseLogGamma { shape } => {
                let mut rng = ChaCha8Rng::seed_from_u64(bits);
                let g: f64 = Gamma::new(shape, 1.0).expect("validated shape").sample(&mut rng);
                -g.max(f64::MIN_POSITIVE).ln()
            }
        }
    }
}

/// ψ'(x) by upward recurrence and the asymptotic series.
pub(crate) fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + 1.0 / x + x2 / 2.0 + (1.0 / x) * x2 * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 / 30.0)))
}

/// Anything that can report the weight at an arbitrary site.
pub trait SiteWeights: Sync {
    fn weight(&self, s: Site) -> f64;

    /// Region where `weight` is defined; `None` means all of Z².
    fn bounds(&self) -> Option<Window> {
        None
    }

    /// Identifies the environment when known; equal for a sampler and any
    /// unshifted field generated from the same spec and seed.
    fn fingerprint(&self) -> Option<u64> {
        None
    }
}

/// Unbounded on-demand view of the environment `(spec, seed)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightSampler {
    pub spec: WeightSpec,
    pub seed: u64,
}

impl WeightSampler {
    pub fn new(spec: WeightSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        Ok(WeightSampler { spec, seed })
    }
}

impl SiteWeights for WeightSampler {
    #[inline]
    fn weight(&self, s: Site) -> f64 {
        self.spec.sample_at(self.seed, s)
    }

    fn fingerprint(&self) -> Option<u64> {
        Some(spec_fingerprint(&self.spec, self.seed, Site::new(0, 0)))
    }
}

/// The environment restricted to a window, stored densely.
///
/// `offset` records accumulated shifts: `value(y) = sample(seed, y + offset)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightField {
    spec: Option<WeightSpec>,
    seed: u64,
    offset: Site,
    fingerprint: u64,
    values: Grid<f64>,
}

fn spec_fingerprint(spec: &WeightSpec, seed: u64, offset: Site) -> u64 {
    let words: [f64; 2] = match *spec {
        WeightSpec::Gaussian { mean, sd } => [mean, sd],
        WeightSpec::InverseLogGamma { shape } => [shape, 0.0],
        WeightSpec::Uniform { a, b } => [a, b],
        WeightSpec::Constant { c } => [c, 0.0],
    };
    let tag = match spec {
        WeightSpec::Gaussian { .. } => 1,
        WeightSpec::InverseLogGamma { .. } => 2,
        WeightSpec::Uniform { .. } => 3,
        WeightSpec::Constant { .. } => 4,
    };
    let k = super::rng::key2(seed, stream::WEIGHTS, offset.u as u64, offset.v as u64);
    super::rng::key2(k ^ tag, words[0].to_bits(), words[1].to_bits(), 1)
}

/// Fill `window` with independent variates of `spec` keyed by `seed`.
pub fn generate_field(spec: WeightSpec, seed: u64, window: Window) -> Result<WeightField> {
    spec.validate()?;
    let window = Window::new(window.origin, window.width, window.height)?;
    Ok(WeightField {
        spec: Some(spec),
        seed,
        offset: Site::new(0, 0),
        fingerprint: spec_fingerprint(&spec, seed, Site::new(0, 0)),
        values: Grid::from_fn(window, |s| spec.sample_at(seed, s)),
    })
}

/// `shift_view(f, z).value(y) == f.value(y + z)`.
pub fn shift_view(field: &WeightField, z: Site) -> Result<WeightField> {
    let o = field.values.window().origin;
    let (u, v) =
        o.u.checked_sub(z.u)
            .zip(o.v.checked_sub(z.v))
            .ok_or_else(|| Error::param(format!("shift by {z} is not representable")))?;
    let window = field.values.window().translate(Site::new(u, v) - o);
    Ok(WeightField {
        spec: field.spec,
        seed: field.seed,
        offset: field.offset + z,
        fingerprint: match &field.spec {
            Some(spec) => spec_fingerprint(spec, field.seed, field.offset + z),
            None if z == Site::new(0, 0) => field.fingerprint,
            None => super::rng::key2(field.fingerprint, stream::WEIGHTS, z.u as u64, z.v as u64),
        },
        values: field.values.clone().retarget(window),
    })
}

impl WeightField {
    /// Field built from explicit values, row-major in `v`. Used for hand
    /// fixtures; such a field has no generating spec.
    pub fn from_values(window: Window, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::param(format!(
                "expected {} values for window {window}, got {}",
                window.len(),
                values.len()
            )));
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::param(format!("weights must be finite, got {x}")));
        }
        let fingerprint = values.iter().fold(
            super::rng::site_key(0x6669_7874, stream::WEIGHTS, window.origin),
            |acc, x| super::rng::mix64(acc ^ x.to_bits()),
        );
        Ok(WeightField {
            spec: None,
            seed: 0,
            offset: Site::new(0, 0),
            fingerprint,
            values: Grid::from_vec(window, values),
        })
    }

    pub fn window(&self) -> &Window {
        self.values.window()
    }

    /// Generating law; `None` for fields built from explicit values.
    pub fn spec(&self) -> Option<WeightSpec> {
        self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn offset(&self) -> Site {
        self.offset
    }

    /// Identifies the underlying environment; equal for restrictions of one field.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn value(&self, s: Site) -> Result<f64> {
        let i = self.window().check(s)?;
        Ok(self.values.values()[i])
    }

    /// Unchecked lookup for hot loops; panics outside the window.
    #[inline]
    pub fn at(&self, s: Site) -> f64 {
        self.values[s]
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.values
    }

    /// Sub-field over `window`; must lie inside this field's window.
    pub fn restrict(&self, window: Window) -> Result<WeightField> {
        if !self.window().contains_window(&window) {
            return Err(Error::OutOfWindow {
                site: window.corner(),
                window: self.window().to_string(),
            });
        }
        Ok(WeightField {
            spec: self.spec,
            seed: self.seed,
            offset: self.offset,
            fingerprint: self.fingerprint,
            values: Grid::from_fn(window, |s| self.values[s]),
        })
    }

    /// Rows `(u, v, omega)`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        csv::write(
            path,
            &["u", "v", "omega"],
            self.values
                .iter()
                .map(|(s, w)| vec![s.u.to_string(), s.v.to_string(), fmt_real(*w)]),
        )
    }
}

impl SiteWeights for WeightField {
    #[inline]
    fn weight(&self, s: Site) -> f64 {
        self.values[s]
    }

    fn bounds(&self) -> Option<Window> {
        Some(*self.window())
    }

    fn fingerprint(&self) -> Option<u64> {
        Some(self.fingerprint)
    }
}
