use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kljn_core::{
    ber_report, check_security, histogram, run_exchange, scatter_trace, BerEntry, Generator,
    Indicator, LineState, SecurityResiduals, SimConfig, GENERATOR_ALGORITHM,
};

use crate::artifacts::{self, Metadata, ScatterBits};
use crate::config::{ConfigFile, Variances};
use crate::error::CliError;

fn out_err(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

/// Prints `name,variance_v2,rms_v` for the four generators.
///
/// Values are rounded (5 decimals for variances, 3 for RMS) unless `full` is
/// set, in which case they carry 17 significant digits.
pub fn solve(config: &ConfigFile, full: bool, out: &mut impl Write) -> Result<(), CliError> {
    let vars = config.solved_variances()?;
    writeln!(out, "name,variance_v2,rms_v").map_err(out_err)?;
    for g in Generator::ALL {
        let (var, rms) = (vars.variance(g), vars.rms(g));
        let line = if full {
            format!(
                "{},{},{}",
                g.label(),
                artifacts::fmt_f64(var),
                artifacts::fmt_f64(rms)
            )
        } else {
            format!("{},{var:.5},{rms:.3}", g.label())
        };
        writeln!(out, "{line}").map_err(out_err)?;
    }
    Ok(())
}

/// Prints the three residuals and `PASS`/`FAIL`. Returns whether it passed.
pub fn check(
    config: &ConfigFile,
    tolerance: f64,
    solve_first: bool,
    out: &mut impl Write,
) -> Result<bool, CliError> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let quad = config.quad()?;
    let vars = if solve_first {
        config.solved_variances()?
    } else {
        config.explicit_variances()?.ok_or_else(|| {
            CliError::Usage("config has no variances_v2 block (use --solve to derive it)".into())
        })?
    };
    let res: SecurityResiduals = check_security(&quad, &vars);
    let pass = res.is_secure(tolerance);
    for (name, value) in [
        ("current_residual", res.current_residual),
        ("voltage_residual", res.voltage_residual),
        ("cross_residual", res.cross_residual),
    ] {
        writeln!(out, "{name},{}", artifacts::fmt_f64(value)).map_err(out_err)?;
    }
    writeln!(out, "{}", if pass { "PASS" } else { "FAIL" }).map_err(out_err)?;
    Ok(pass)
}

/// Command-line overrides for `run`.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub bits: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub bins: Option<usize>,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub ber: Vec<BerEntry>,
    pub files: Vec<PathBuf>,
}

pub fn run(config: &ConfigFile, opts: &RunOptions, out_dir: &Path) -> Result<RunSummary, CliError> {
    let mut effective = config.clone();
    if let Some(bits) = opts.bits {
        effective.num_bits = bits;
    }
    if let Some(samples) = opts.samples {
        effective.samples_per_bit = samples;
    }
    if let Some(seed) = opts.seed {
        effective.master_seed = seed;
    }
    if let Some(bins) = opts.bins {
        effective.histogram_bins = Some(bins);
    }
    let bins = effective.histogram_bins();
    if bins == 0 {
        return Err(CliError::Usage(
            "histogram bin count must be at least 1".into(),
        ));
    }

    let quad = effective.quad()?;
    let vars = effective.effective_variances()?;
    effective.variances_v2 = Some(Variances::from(&vars));
    let sim = SimConfig {
        quad,
        vars,
        samples_per_bit: effective.samples_per_bit,
        num_bits: effective.num_bits,
        master_seed: effective.master_seed,
        state_policy: effective.state_policy.into(),
    };
    sim.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let stats = pool.install(|| run_exchange(&sim))?;
    let ber = ber_report(&stats)?;

    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut files = Vec::new();

    let path = out_dir.join(artifacts::BER_FILE);
    artifacts::write_ber(&path, &ber)?;
    files.push(path);

    for ind in Indicator::ALL {
        let hist = histogram(&stats, ind, bins)?;
        let path = out_dir.join(artifacts::histogram_file(ind));
        artifacts::write_histogram(&path, &hist)?;
        files.push(path);
    }

    let scatter_bits = ScatterBits {
        lh: first_bit(&stats, LineState::Lh),
        hl: first_bit(&stats, LineState::Hl),
    };
    let mut traces = Vec::new();
    for (state, bit) in [
        (LineState::Lh, scatter_bits.lh),
        (LineState::Hl, scatter_bits.hl),
    ] {
        if let Some(bit) = bit {
            traces.push(scatter_trace(state, &sim, bit)?);
        }
    }
    let path = out_dir.join(artifacts::SCATTER_FILE);
    let slices: Vec<&[(f64, f64)]> = traces.iter().map(Vec::as_slice).collect();
    artifacts::write_scatter(&path, &slices)?;
    files.push(path);

    let meta = Metadata {
        config: effective,
        generator_algorithm: GENERATOR_ALGORITHM.to_string(),
        tool_version: format!("kljn {}", env!("CARGO_PKG_VERSION")),
        scatter_bits,
        artifacts: files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
    };
    let path = out_dir.join(artifacts::METADATA_FILE);
    artifacts::write_metadata(&path, &meta)?;
    files.push(path);

    Ok(RunSummary { ber, files })
}

fn first_bit(stats: &[kljn_core::BitStats], state: LineState) -> Option<u64> {
    stats
        .iter()
        .position(|s| s.true_state == state)
        .map(|i| i as u64)
}
