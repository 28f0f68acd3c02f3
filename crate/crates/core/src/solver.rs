//! Generator variances that make LH and HL indistinguishable.
//!
//! Given the four resistors and `⟨V_LA²⟩`, the remaining three variances follow
//! in closed form from equating, between the two states, the wire current
//! variance, the wire voltage variance and the mean power flow `⟨V_E·I_E⟩`.

use crate::circuit::{theoretical_moments, Generator, LineState, NoiseVariances, ResistorQuad};
use crate::error::{Error, Result};

/// Below this magnitude both sides of a condition are treated as zero and the
/// residual becomes absolute.
const ABSOLUTE_FLOOR: f64 = 1e-30;

/// Relative size of a denominator against its terms below which it is singular.
const SINGULAR_RATIO: f64 = 1e-15;

/// Relative mismatch of the three security conditions between LH and HL.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecurityResiduals {
    /// Current variance `⟨I_E²⟩`.
    pub current_residual: f64,
    /// Voltage variance `⟨V_E²⟩`.
    pub voltage_residual: f64,
    /// Mean power flow `⟨V_E·I_E⟩`.
    pub cross_residual: f64,
}

impl SecurityResiduals {
    pub fn max(&self) -> f64 {
        self.current_residual
            .max(self.voltage_residual)
            .max(self.cross_residual)
    }

    pub fn is_secure(&self, tolerance: f64) -> bool {
        self.current_residual < tolerance
            && self.voltage_residual < tolerance
            && self.cross_residual < tolerance
    }
}

fn residual(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    let diff = (lhs - rhs).abs();
    if scale < ABSOLUTE_FLOOR {
        diff
    } else {
        diff / scale
    }
}

pub fn check_security(quad: &ResistorQuad, vars: &NoiseVariances) -> SecurityResiduals {
    let lh = theoretical_moments(LineState::Lh, quad, vars);
    let hl = theoretical_moments(LineState::Hl, quad, vars);
    SecurityResiduals {
        current_residual: residual(lh.current_variance, hl.current_variance),
        voltage_residual: residual(lh.voltage_variance, hl.voltage_variance),
        cross_residual: residual(lh.cross_moment, hl.cross_moment),
    }
}

/// Ratio `numerator / denominator`, where `terms` are the summands of the
/// denominator used to judge whether it cancelled to (numerically) zero.
fn ratio(generator: Generator, numerator: f64, denominator: f64, terms: &[f64]) -> Result<f64> {
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    if denominator.abs() < SINGULAR_RATIO * scale {
        return Err(Error::SingularDenominator {
            name: generator.variance_name(),
            denominator,
            scale,
        });
    }
    Ok(numerator / denominator)
}

fn positive(generator: Generator, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        return Ok(value);
    }
    let kind = if value < 0.0 {
        "negative"
    } else if value == 0.0 {
        "zero"
    } else {
        "not finite"
    };
    Err(Error::Infeasible {
        name: generator.variance_name(),
        kind,
        value,
    })
}

/// Solves for `⟨V_HB²⟩`, `⟨V_HA²⟩` and `⟨V_LB²⟩` given `⟨V_LA²⟩`.
///
/// Every solved variance must be strictly positive; otherwise the quad cannot
/// be made secure and [`Error::Infeasible`] names the first offending
/// generator in the order HB, HA, LB.
pub fn solve_variances(quad: &ResistorQuad, v_la_sq: f64) -> Result<NoiseVariances> {
    if !(v_la_sq.is_finite() && v_la_sq > 0.0) {
        return Err(Error::InvalidVariance {
            name: "v_la_sq",
            value: v_la_sq,
        });
    }
    let (la, ha, lb, hb) = (quad.r_la(), quad.r_ha(), quad.r_lb(), quad.r_hb());

    let hb_ratio = ratio(
        Generator::Hb,
        lb * (ha + hb) - ha * hb - hb * hb,
        la * la + lb * (la - ha) - ha * la,
        &[la * la, lb * la, lb * ha, ha * la],
    )?;
    let ha_ratio = ratio(
        Generator::Ha,
        ha * ha + lb * (hb + ha) + ha * hb,
        la * la + lb * (la + hb) + hb * la,
        &[la * la, lb * la, lb * hb, hb * la],
    )?;
    let lb_ratio = ratio(
        Generator::Lb,
        lb * lb + lb * (ha - hb) - ha * hb,
        la * la + la * (hb - ha) - ha * hb,
        &[la * la, la * hb, la * ha, ha * hb],
    )?;

    let v_hb_sq = positive(Generator::Hb, v_la_sq * hb_ratio)?;
    let v_ha_sq = positive(Generator::Ha, v_la_sq * ha_ratio)?;
    let v_lb_sq = positive(Generator::Lb, v_la_sq * lb_ratio)?;
    NoiseVariances::new(v_la_sq, v_ha_sq, v_lb_sq, v_hb_sq)
}

/// Outcome of [`is_feasible`].
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Why the quad was rejected; `None` when feasible.
    pub diagnostic: Option<String>,
}

pub fn is_feasible(quad: &ResistorQuad, v_la_sq: f64) -> Feasibility {
    match solve_variances(quad, v_la_sq) {
        Ok(_) => Feasibility {
            feasible: true,
            diagnostic: None,
        },
        Err(err) => Feasibility {
            feasible: false,
            diagnostic: Some(err.to_string()),
        },
    }
}
