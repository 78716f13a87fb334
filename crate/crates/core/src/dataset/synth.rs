use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Dataset, Field, ProcessMapRecord, SYNTHETIC_PREFIX};
use crate::error::{Error, Result};
use crate::polyfit::SymbolicEquation;

/// Sampling envelope and noise for [`synth_generate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthOptions {
    pub n: usize,
    pub power_range: (f64, f64),
    pub velocity_range: (f64, f64),
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            n: 281,
            power_range: (50.0, 500.0),
            velocity_range: (100.0, 2000.0),
            noise_sigma: 0.0,
            seed: 42,
        }
    }
}

/// Draws `(power, velocity)` uniformly and sets the equation's target field
/// to `eq(P, V) + N(0, sigma)`. Every other field is zero. Targets are kept
/// even where the equation is negative.
pub fn synth_generate(eq: &SymbolicEquation, opts: &SynthOptions) -> Result<Dataset> {
    let spec = eq.feature_spec()?;
    if let Some(e) = spec.entries().iter().find(|e| !matches!(e.field, Field::Power | Field::Velocity)) {
        return Err(Error::contract(format!(
            "synthetic data only covers power and velocity; equation uses `{}`",
            e.name()
        )));
    }
    let target: Field = eq.target().parse()?;
    if matches!(target, Field::Power | Field::Velocity) {
        return Err(Error::contract("target cannot be power or velocity"));
    }
    if opts.n < 2 {
        return Err(Error::contract(format!("need at least 2 records, got {}", opts.n)));
    }
    let (p0, p1) = opts.power_range;
    let (v0, v1) = opts.velocity_range;
    if !(p0 > 0.0 && p1 > p0 && v0 > 0.0 && v1 > v0 && p1.is_finite() && v1.is_finite()) {
        return Err(Error::contract(format!(
            "ranges must be positive and non-degenerate, got P {:?} V {:?}",
            opts.power_range, opts.velocity_range
        )));
    }
    let sigma = opts.noise_sigma;
    let noise = Normal::new(0.0, sigma)
        .ok()
        .filter(|_| sigma.is_finite() && sigma >= 0.0)
        .ok_or_else(|| Error::contract(format!("noise sigma must be finite and >= 0, got {sigma}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut records = Vec::with_capacity(opts.n);
    for _ in 0..opts.n {
        let p = rng.random_range(p0..p1);
        let v = rng.random_range(v0..v1);
        let clean = eq.evaluate_raw(|f| match f {
            Field::Power => Some(p),
            Field::Velocity => Some(v),
            _ => None,
        })?;
        let mut r = ProcessMapRecord::from_values([p, v, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let value = if sigma > 0.0 { clean + noise.sample(&mut rng) } else { clean };
        r.set(target, value);
        records.push(r);
    }
    Dataset::new(records, format!("{SYNTHETIC_PREFIX} seed={}", opts.seed))
}
