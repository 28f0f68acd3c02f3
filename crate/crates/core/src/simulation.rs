//! Monte-Carlo key exchange and the eavesdropper's view of it.
//!
//! Each bit draws fresh noise for the two connected generators, forms the
//! wire signals and reduces them to the three second-order statistics an
//! eavesdropper can measure. Bit-error rates come from pooling one statistic
//! over all bits and classifying against its median.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{line_signals, LineSignals, LineState, NoiseVariances, ResistorQuad};
use crate::error::{Error, Result};
use crate::noise::{gaussian_block, StreamSeed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StatePolicy {
    /// Even bits LH, odd bits HL.
    #[default]
    Alternate,
    /// Fair coin per bit from the bit's dedicated coin stream.
    Random,
}

impl StatePolicy {
    pub fn name(self) -> &'static str {
        match self {
            StatePolicy::Alternate => "alternate",
            StatePolicy::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub quad: ResistorQuad,
    pub vars: NoiseVariances,
    pub samples_per_bit: usize,
    pub num_bits: usize,
    pub master_seed: u64,
    pub state_policy: StatePolicy,
}

impl SimConfig {
    pub const DEFAULT_SAMPLES_PER_BIT: usize = 1000;
    pub const DEFAULT_NUM_BITS: usize = 1_000_000;

    pub fn new(quad: ResistorQuad, vars: NoiseVariances) -> Self {
        Self {
            quad,
            vars,
            samples_per_bit: Self::DEFAULT_SAMPLES_PER_BIT,
            num_bits: Self::DEFAULT_NUM_BITS,
            master_seed: 0,
            state_policy: StatePolicy::Alternate,
        }
    }

    pub fn with_bits(mut self, num_bits: usize) -> Self {
        self.num_bits = num_bits;
        self
    }

    pub fn with_samples(mut self, samples_per_bit: usize) -> Self {
        self.samples_per_bit = samples_per_bit;
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_policy(mut self, state_policy: StatePolicy) -> Self {
        self.state_policy = state_policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_bit < 2 {
            return Err(Error::InvalidConfig(format!(
                "samples_per_bit must be at least 2, got {}",
                self.samples_per_bit
            )));
        }
        if self.num_bits == 0 {
            return Err(Error::InvalidConfig("num_bits must be at least 1".into()));
        }
        Ok(())
    }

    /// True line state of bit `bit_index` under the configured policy.
    pub fn state_of(&self, bit_index: u64) -> LineState {
        match self.state_policy {
            StatePolicy::Alternate => {
                if bit_index.is_multiple_of(2) {
                    LineState::Lh
                } else {
                    LineState::Hl
                }
            }
            StatePolicy::Random => {
                let mut rng = StreamSeed::for_state_coin(self.master_seed, bit_index).rng();
                if rng.random::<bool>() {
                    LineState::Hl
                } else {
                    LineState::Lh
                }
            }
        }
    }

    /// First bit index whose true state is `state`, if any.
    pub fn first_bit_in_state(&self, state: LineState) -> Option<u64> {
        (0..self.num_bits as u64).find(|&i| self.state_of(i) == state)
    }
}

/// What the eavesdropper measures during one bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitStats {
    pub true_state: LineState,
    /// Unbiased sample variance of `V_E` in V².
    pub var_v: f64,
    /// Unbiased sample variance of `I_E` in A².
    pub var_i: f64,
    /// Plain sample mean of `V_E·I_E` in V·A.
    pub cross: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Indicator {
    CurrentVariance,
    VoltageVariance,
    CrossCorrelation,
}

impl Indicator {
    pub const ALL: [Indicator; 3] = [
        Indicator::CurrentVariance,
        Indicator::VoltageVariance,
        Indicator::CrossCorrelation,
    ];

    pub fn value(self, stats: &BitStats) -> f64 {
        match self {
            Indicator::CurrentVariance => stats.var_i,
            Indicator::VoltageVariance => stats.var_v,
            Indicator::CrossCorrelation => stats.cross,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Indicator::CurrentVariance => "current_variance",
            Indicator::VoltageVariance => "voltage_variance",
            Indicator::CrossCorrelation => "cross_correlation",
        }
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn bit_signals(state: LineState, config: &SimConfig, bit_index: u64) -> Result<LineSignals> {
    let (alice, bob) = state.generators();
    let n = config.samples_per_bit;
    let seed = config.master_seed;
    let va = gaussian_block(
        n,
        config.vars.variance(alice),
        StreamSeed::for_generator(seed, bit_index, alice),
    );
    let vb = gaussian_block(
        n,
        config.vars.variance(bob),
        StreamSeed::for_generator(seed, bit_index, bob),
    );
    line_signals(state, &config.quad, &va, &vb)
}

fn reduce(state: LineState, signals: &LineSignals) -> BitStats {
    let n = signals.len() as f64;
    let (v, i) = (signals.v_e(), signals.i_e());
    let mean_v = v.iter().sum::<f64>() / n;
    let mean_i = i.iter().sum::<f64>() / n;
    let mut ss_v = 0.0;
    let mut ss_i = 0.0;
    let mut cross = 0.0;
    for (&v, &i) in v.iter().zip(i) {
        ss_v += (v - mean_v) * (v - mean_v);
        ss_i += (i - mean_i) * (i - mean_i);
        cross += v * i;
    }
    BitStats {
        true_state: state,
        var_v: ss_v / (n - 1.0),
        var_i: ss_i / (n - 1.0),
        cross: cross / n,
    }
}

fn check_bit(config: &SimConfig, bit_index: u64) -> Result<()> {
    config.validate()?;
    if bit_index >= config.num_bits as u64 {
        return Err(Error::InvalidConfig(format!(
            "bit index {bit_index} out of range for {} bits",
            config.num_bits
        )));
    }
    Ok(())
}

/// Eavesdropper statistics for bit `bit_index` transferred in `state`.
pub fn simulate_bit(state: LineState, config: &SimConfig, bit_index: u64) -> Result<BitStats> {
    check_bit(config, bit_index)?;
    let signals = bit_signals(state, config, bit_index)?;
    Ok(reduce(state, &signals))
}

/// Simulates every bit of the exchange in parallel on the current rayon pool.
/// The result is ordered by bit index and does not depend on the pool size.
pub fn run_exchange(config: &SimConfig) -> Result<Vec<BitStats>> {
    config.validate()?;
    (0..config.num_bits as u64)
        .into_par_iter()
        .map(|bit| {
            let state = config.state_of(bit);
            bit_signals(state, config, bit).map(|s| reduce(state, &s))
        })
        .collect()
}

/// Raw `(V_E, I_E)` samples of one bit, the same samples [`simulate_bit`]
/// reduces for that bit.
pub fn scatter_trace(
    state: LineState,
    config: &SimConfig,
    bit_index: u64,
) -> Result<Vec<(f64, f64)>> {
    check_bit(config, bit_index)?;
    Ok(bit_signals(state, config, bit_index)?.pairs().collect())
}

/// Eavesdropper success on one indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEntry {
    pub indicator: Indicator,
    /// Misclassified fraction in `[0, 1]`.
    pub ber: f64,
    /// `|ber - 0.5|`.
    pub leak: f64,
    /// Median of the pooled indicator values.
    pub threshold: f64,
    pub bits_lh: usize,
    pub bits_hl: usize,
}

impl BerEntry {
    pub fn bits(&self) -> usize {
        self.bits_lh + self.bits_hl
    }
}

fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (lower, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let below = lower
            .iter()
            .copied()
            .max_by(f64::total_cmp)
            .unwrap_or(upper);
        below + (upper - below) / 2.0
    }
}

/// Median-threshold classifier: values above the pooled median are called HL,
/// values at or below it LH.
pub fn estimate_ber(stats: &[BitStats], indicator: Indicator) -> Result<BerEntry> {
    let bits_lh = stats
        .iter()
        .filter(|s| s.true_state == LineState::Lh)
        .count();
    let bits_hl = stats.len() - bits_lh;
    if bits_lh == 0 || bits_hl == 0 {
        return Err(Error::DegenerateInput(
            "bit-error estimation needs bits in both LH and HL states",
        ));
    }
    let mut values: Vec<f64> = stats.iter().map(|s| indicator.value(s)).collect();
    let threshold = median(&mut values);
    let errors = stats
        .iter()
        .filter(|s| {
            let called = if indicator.value(s) > threshold {
                LineState::Hl
            } else {
                LineState::Lh
            };
            called != s.true_state
        })
        .count();
    let ber = errors as f64 / stats.len() as f64;
    Ok(BerEntry {
        indicator,
        ber,
        leak: (ber - 0.5).abs(),
        threshold,
        bits_lh,
        bits_hl,
    })
}

/// [`estimate_ber`] for every indicator, in [`Indicator::ALL`] order.
pub fn ber_report(stats: &[BitStats]) -> Result<Vec<BerEntry>> {
    Indicator::ALL
        .iter()
        .map(|&ind| estimate_ber(stats, ind))
        .collect()
}

/// Per-state counts over shared, uniformly spaced bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub indicator: Indicator,
    /// `bin_count + 1` edges from the pooled minimum to the pooled maximum.
    pub edges: Vec<f64>,
    pub counts_lh: Vec<u64>,
    pub counts_hl: Vec<u64>,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.counts_lh.len()
    }

    pub fn pooled(&self) -> Vec<u64> {
        self.counts_lh
            .iter()
            .zip(&self.counts_hl)
            .map(|(a, b)| a + b)
            .collect()
    }

    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, u64, u64)> + '_ {
        (0..self.bin_count()).map(|k| {
            (
                self.edges[k],
                self.edges[k + 1],
                self.counts_lh[k],
                self.counts_hl[k],
            )
        })
    }
}

pub fn histogram(stats: &[BitStats], indicator: Indicator, bin_count: usize) -> Result<Histogram> {
    if stats.is_empty() {
        return Err(Error::DegenerateInput("histogram of an empty bit sequence"));
    }
    if bin_count == 0 {
        return Err(Error::InvalidConfig("bin_count must be at least 1".into()));
    }
    let (lo, hi) = stats
        .iter()
        .map(|s| indicator.value(s))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    let bins = bin_count as f64;
    let mut edges: Vec<f64> = (0..=bin_count)
        .map(|k| lo + span * (k as f64 / bins))
        .collect();
    edges[bin_count] = hi;

    let mut counts_lh = vec![0u64; bin_count];
    let mut counts_hl = vec![0u64; bin_count];
    for s in stats {
        let v = indicator.value(s);
        let k = if span > 0.0 {
            (((v - lo) / span * bins) as usize).min(bin_count - 1)
        } else {
            0
        };
        match s.true_state {
            LineState::Lh => counts_lh[k] += 1,
            LineState::Hl => counts_hl[k] += 1,
        }
    }
    Ok(Histogram {
        indicator,
        edges,
        counts_lh,
        counts_hl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_variances;
    use proptest::prelude::*;

    fn asymmetric_config() -> SimConfig {
        let quad = ResistorQuad::from_kilohms(1.0, 10.0, 5.0, 9.0).unwrap();
        let vars = solve_variances(&quad, 1.0).unwrap();
        SimConfig::new(quad, vars).with_seed(7)
    }

    fn synthetic(lh: &[f64], hl: &[f64]) -> Vec<BitStats> {
        let make = |state, v: f64| BitStats {
            true_state: state,
            var_v: v,
            var_i: v,
            cross: v,
        };
        lh.iter()
            .map(|&v| make(LineState::Lh, v))
            .chain(hl.iter().map(|&v| make(LineState::Hl, v)))
            .collect()
    }

    #[test]
    fn config_validation() {
        let cfg = asymmetric_config();
        assert!(cfg.clone().with_samples(1).validate().is_err());
        assert!(cfg.clone().with_bits(0).validate().is_err());
        assert!(cfg.clone().with_samples(2).with_bits(1).validate().is_ok());
        assert!(simulate_bit(LineState::Lh, &cfg.clone().with_bits(3), 3).is_err());
    }

    #[test]
    fn zero_noise_bit() {
        let quad = ResistorQuad::from_kilohms(1.0, 10.0, 5.0, 9.0).unwrap();
        let vars = NoiseVariances::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let cfg = SimConfig::new(quad, vars).with_bits(2);
        let s = simulate_bit(LineState::Lh, &cfg, 0).unwrap();
        assert_eq!((s.var_v, s.var_i, s.cross), (0.0, 0.0, 0.0));
        let trace = scatter_trace(LineState::Hl, &cfg, 1).unwrap();
        assert_eq!(trace.len(), 1000);
        assert!(trace.iter().all(|&(v, i)| v == 0.0 && i == 0.0));
    }

    #[test]
    fn simulate_bit_is_deterministic() {
        let cfg = asymmetric_config().with_bits(10);
        let a = simulate_bit(LineState::Hl, &cfg, 5).unwrap();
        let b = simulate_bit(LineState::Hl, &cfg, 5).unwrap();
        assert_eq!(a.var_v.to_bits(), b.var_v.to_bits());
        assert_eq!(a.var_i.to_bits(), b.var_i.to_bits());
        assert_eq!(a.cross.to_bits(), b.cross.to_bits());
    }

    #[test]
    fn scatter_matches_simulated_bit() {
        let cfg = asymmetric_config().with_bits(4).with_samples(64);
        let trace = scatter_trace(LineState::Lh, &cfg, 2).unwrap();
        let n = trace.len() as f64;
        let cross = trace.iter().map(|(v, i)| v * i).sum::<f64>() / n;
        let stats = simulate_bit(LineState::Lh, &cfg, 2).unwrap();
        assert!((cross - stats.cross).abs() <= 1e-15 * cross.abs().max(1e-12));
    }

    #[test]
    fn alternate_policy_states() {
        let cfg = asymmetric_config().with_bits(4).with_samples(4);
        let states: Vec<_> = run_exchange(&cfg)
            .unwrap()
            .iter()
            .map(|s| s.true_state)
            .collect();
        assert_eq!(
            states,
            [LineState::Lh, LineState::Hl, LineState::Lh, LineState::Hl]
        );
        assert_eq!(cfg.first_bit_in_state(LineState::Hl), Some(1));
    }

    #[test]
    fn run_exchange_repeats_exactly() {
        let cfg = asymmetric_config()
            .with_bits(64)
            .with_samples(32)
            .with_policy(StatePolicy::Random);
        assert_eq!(run_exchange(&cfg).unwrap(), run_exchange(&cfg).unwrap());
    }

    #[test]
    fn run_exchange_matches_simulate_bit() {
        let cfg = asymmetric_config()
            .with_bits(16)
            .with_samples(16)
            .with_policy(StatePolicy::Random);
        let all = run_exchange(&cfg).unwrap();
        for (i, s) in all.iter().enumerate() {
            assert_eq!(*s, simulate_bit(s.true_state, &cfg, i as u64).unwrap());
        }
    }

    #[test]
    fn separated_values() {
        let stats = synthetic(&[1.0, 2.0], &[3.0, 4.0]);
        for ind in Indicator::ALL {
            let e = estimate_ber(&stats, ind).unwrap();
            assert_eq!(e.threshold, 2.5);
            assert_eq!(e.ber, 0.0);
            assert_eq!(e.leak, 0.5);
            assert_eq!((e.bits_lh, e.bits_hl), (2, 2));
        }
    }

    #[test]
    fn inverted_values() {
        let stats = synthetic(&[3.0, 4.0], &[1.0, 2.0]);
        let e = estimate_ber(&stats, Indicator::CrossCorrelation).unwrap();
        assert_eq!(e.ber, 1.0);
        assert_eq!(e.leak, 0.5);
    }

    #[test]
    fn ties_go_to_lh() {
        // median of [1, 1, 1] is 1; every value is <= threshold.
        let stats = synthetic(&[1.0, 1.0], &[1.0]);
        let e = estimate_ber(&stats, Indicator::VoltageVariance).unwrap();
        assert_eq!(e.threshold, 1.0);
        assert!((e.ber - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_state_is_degenerate() {
        let stats = synthetic(&[1.0, 2.0], &[]);
        assert!(matches!(
            estimate_ber(&stats, Indicator::CurrentVariance),
            Err(Error::DegenerateInput(_))
        ));
        assert!(estimate_ber(&[], Indicator::CurrentVariance).is_err());
    }

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&mut [5.0, 1.0, 3.0]), 3.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&mut [7.0]), 7.0);
    }

    #[test]
    fn two_value_histogram() {
        let stats = synthetic(&[1.0], &[3.0]);
        let h = histogram(&stats, Indicator::VoltageVariance, 2).unwrap();
        assert_eq!(h.edges, [1.0, 2.0, 3.0]);
        assert_eq!(h.pooled(), [1, 1]);
        assert_eq!(h.counts_lh, [1, 0]);
        assert_eq!(h.counts_hl, [0, 1]);
    }

    #[test]
    fn flat_histogram_has_one_occupied_bin() {
        let stats = synthetic(&[2.0, 2.0], &[2.0]);
        let h = histogram(&stats, Indicator::CurrentVariance, 10).unwrap();
        assert_eq!(h.pooled().iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.pooled().iter().sum::<u64>(), 3);
    }

    #[test]
    fn histogram_errors() {
        assert!(matches!(
            histogram(&[], Indicator::CurrentVariance, 4),
            Err(Error::DegenerateInput(_))
        ));
        let stats = synthetic(&[1.0], &[2.0]);
        assert!(histogram(&stats, Indicator::CurrentVariance, 0).is_err());
    }

    proptest! {
        #[test]
        fn histogram_conserves_bits(
            lh in prop::collection::vec(-1e3..1e3f64, 1..50),
            hl in prop::collection::vec(-1e3..1e3f64, 1..50),
            bins in 1usize..64,
        ) {
            let stats = synthetic(&lh, &hl);
            let h = histogram(&stats, Indicator::CrossCorrelation, bins).unwrap();
            prop_assert_eq!(h.counts_lh.iter().sum::<u64>(), lh.len() as u64);
            prop_assert_eq!(h.counts_hl.iter().sum::<u64>(), hl.len() as u64);
            prop_assert_eq!(h.edges.len(), bins + 1);
        }

        #[test]
        fn ber_is_invariant_under_monotone_maps(
            lh in prop::collection::vec(-5.0..5.0f64, 1..40),
            hl in prop::collection::vec(-5.0..5.0f64, 1..40),
            scale in 0.1..10.0f64,
            shift in -3.0..3.0f64,
        ) {
            let stats = synthetic(&lh, &hl);
            // exp(x) is strictly increasing; affine with positive scale too.
            let mapped: Vec<BitStats> = stats
                .iter()
                .map(|s| BitStats { cross: (s.cross * scale + shift).exp(), ..*s })
                .collect();
            let a = estimate_ber(&stats, Indicator::CrossCorrelation).unwrap();
            let b = estimate_ber(&mapped, Indicator::CrossCorrelation).unwrap();
            prop_assert_eq!(a.ber, b.ber);
        }
    }
}
