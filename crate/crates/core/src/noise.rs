//! Gaussian noise streams and Johnson-noise helpers.
//!
//! Every stream is a ChaCha8 keystream keyed by the master seed and selected
//! by a 64-bit stream id, so any stream can be opened directly without
//! generating the ones before it. Stream ids follow a fixed layout:
//! `bit_index * 8 + slot`, where slots 0..=3 are the LA, HA, LB and HB
//! generators, slot 4 is the per-bit state coin and 5..=7 are reserved.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::Generator;
use crate::error::{Error, Result};

/// Recorded in run metadata so that artifacts can be regenerated.
pub const GENERATOR_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9) seeded via seed_from_u64(master_seed), \
     set_stream(stream_id); N(0,1) via rand_distr 0.5 StandardNormal (ziggurat), scaled by sqrt(variance); \
     stream_id = bit_index*8 + slot (LA=0, HA=1, LB=2, HB=3, state coin=4)";

/// Boltzmann constant in J/K (exact SI value).
pub const BOLTZMANN_CONSTANT: f64 = 1.380649e-23;

const SLOTS_PER_BIT: u64 = 8;
const COIN_SLOT: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamSeed {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl StreamSeed {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Stream of `generator` during bit `bit_index`.
    pub fn for_generator(master_seed: u64, bit_index: u64, generator: Generator) -> Self {
        Self::new(master_seed, bit_index * SLOTS_PER_BIT + generator.index())
    }

    /// Stream holding the random state coin of bit `bit_index`.
    pub fn for_state_coin(master_seed: u64, bit_index: u64) -> Self {
        Self::new(master_seed, bit_index * SLOTS_PER_BIT + COIN_SLOT)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Fills `out` with zero-mean Gaussian samples of the given variance.
pub fn fill_gaussian(out: &mut [f64], variance: f64, seed: StreamSeed) {
    if variance == 0.0 {
        out.fill(0.0);
        return;
    }
    let sigma = variance.sqrt();
    let mut rng = seed.rng();
    for x in out.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *x = sigma * z;
    }
}

/// `n` i.i.d. samples from `N(0, variance)`, deterministic in `seed`.
pub fn gaussian_block(n: usize, variance: f64, seed: StreamSeed) -> Vec<f64> {
    debug_assert!(variance >= 0.0);
    let mut out = vec![0.0; n];
    fill_gaussian(&mut out, variance, seed);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohnsonParams {
    temperature: f64,
    bandwidth: f64,
}

impl JohnsonParams {
    /// `temperature` in kelvin, `bandwidth` in hertz; both must be positive.
    pub fn new(temperature: f64, bandwidth: f64) -> Result<Self> {
        positive("temperature", temperature)?;
        positive("bandwidth", bandwidth)?;
        Ok(Self {
            temperature,
            bandwidth,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn boltzmann_constant(&self) -> f64 {
        BOLTZMANN_CONSTANT
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

/// Band-limited thermal noise voltage variance `4kTRB` in V².
pub fn johnson_variance(resistance: f64, params: &JohnsonParams) -> Result<f64> {
    positive("resistance", resistance)?;
    Ok(4.0 * BOLTZMANN_CONSTANT * params.temperature * resistance * params.bandwidth)
}

/// Temperature at which `resistance` would produce `variance` of Johnson
/// noise over `bandwidth`. Inverse of [`johnson_variance`].
pub fn effective_temperature(resistance: f64, variance: f64, bandwidth: f64) -> Result<f64> {
    positive("resistance", resistance)?;
    positive("variance", variance)?;
    positive("bandwidth", bandwidth)?;
    Ok(variance / (4.0 * BOLTZMANN_CONSTANT * resistance * bandwidth))
}
