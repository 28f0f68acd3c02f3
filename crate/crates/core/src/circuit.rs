//! Circuit model of the generalized KLJN loop.
//!
//! In each bit period exactly one Alice resistor and one Bob resistor close the
//! loop through an ideal (zero-resistance) wire. Positive wire current flows
//! from Bob's terminal toward Alice's terminal.

use std::fmt;

use crate::error::{Error, Result};

/// The four resistances of a generalized configuration, in ohms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResistorQuad {
    r_la: f64,
    r_ha: f64,
    r_lb: f64,
    r_hb: f64,
}

impl ResistorQuad {
    pub fn new(r_la: f64, r_ha: f64, r_lb: f64, r_hb: f64) -> Result<Self> {
        for (name, value) in [
            ("r_la", r_la),
            ("r_ha", r_ha),
            ("r_lb", r_lb),
            ("r_hb", r_hb),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidResistance { name, value });
            }
        }
        if r_la == r_ha {
            return Err(Error::IndistinguishableResistors {
                low: "r_la",
                high: "r_ha",
                value: r_la,
            });
        }
        if r_lb == r_hb {
            return Err(Error::IndistinguishableResistors {
                low: "r_lb",
                high: "r_hb",
                value: r_lb,
            });
        }
        Ok(Self {
            r_la,
            r_ha,
            r_lb,
            r_hb,
        })
    }

    /// Convenience constructor taking kilo-ohms.
    pub fn from_kilohms(r_la: f64, r_ha: f64, r_lb: f64, r_hb: f64) -> Result<Self> {
        Self::new(r_la * 1e3, r_ha * 1e3, r_lb * 1e3, r_hb * 1e3)
    }

    pub fn r_la(&self) -> f64 {
        self.r_la
    }

    pub fn r_ha(&self) -> f64 {
        self.r_ha
    }

    pub fn r_lb(&self) -> f64 {
        self.r_lb
    }

    pub fn r_hb(&self) -> f64 {
        self.r_hb
    }

    pub fn resistance(&self, generator: Generator) -> f64 {
        match generator {
            Generator::La => self.r_la,
            Generator::Ha => self.r_ha,
            Generator::Lb => self.r_lb,
            Generator::Hb => self.r_hb,
        }
    }

    /// Resistances `(alice, bob)` that close the loop in `state`.
    pub fn connected(&self, state: LineState) -> (f64, f64) {
        let (a, b) = state.generators();
        (self.resistance(a), self.resistance(b))
    }

    /// Same quad with every resistance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.r_la * factor,
            self.r_ha * factor,
            self.r_lb * factor,
            self.r_hb * factor,
        )
    }
}

/// Variances of the four noise generators, in V².
///
/// Zero is accepted so that a silent generator can be modelled; the solver
/// only ever produces strictly positive values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVariances {
    v_la_sq: f64,
    v_ha_sq: f64,
    v_lb_sq: f64,
    v_hb_sq: f64,
}

impl NoiseVariances {
    pub fn new(v_la_sq: f64, v_ha_sq: f64, v_lb_sq: f64, v_hb_sq: f64) -> Result<Self> {
        for (name, value) in [
            ("v_la_sq", v_la_sq),
            ("v_ha_sq", v_ha_sq),
            ("v_lb_sq", v_lb_sq),
            ("v_hb_sq", v_hb_sq),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidVariance { name, value });
            }
        }
        Ok(Self {
            v_la_sq,
            v_ha_sq,
            v_lb_sq,
            v_hb_sq,
        })
    }

    pub fn v_la_sq(&self) -> f64 {
        self.v_la_sq
    }

    pub fn v_ha_sq(&self) -> f64 {
        self.v_ha_sq
    }

    pub fn v_lb_sq(&self) -> f64 {
        self.v_lb_sq
    }

    pub fn v_hb_sq(&self) -> f64 {
        self.v_hb_sq
    }

    pub fn variance(&self, generator: Generator) -> f64 {
        match generator {
            Generator::La => self.v_la_sq,
            Generator::Ha => self.v_ha_sq,
            Generator::Lb => self.v_lb_sq,
            Generator::Hb => self.v_hb_sq,
        }
    }

    pub fn rms(&self, generator: Generator) -> f64 {
        self.variance(generator).sqrt()
    }

    pub fn is_strictly_positive(&self) -> bool {
        Generator::ALL.iter().all(|&g| self.variance(g) > 0.0)
    }
}

/// One of the four noise generators, in stream-layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    La,
    Ha,
    Lb,
    Hb,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::La, Generator::Ha, Generator::Lb, Generator::Hb];

    /// Index used in the noise stream layout (`LA=0, HA=1, LB=2, HB=3`).
    pub fn index(self) -> u64 {
        match self {
            Generator::La => 0,
            Generator::Ha => 1,
            Generator::Lb => 2,
            Generator::Hb => 3,
        }
    }

    /// Display name of the generator variance, e.g. `⟨V_HB²⟩`.
    pub fn variance_name(self) -> &'static str {
        match self {
            Generator::La => "⟨V_LA²⟩",
            Generator::Ha => "⟨V_HA²⟩",
            Generator::Lb => "⟨V_LB²⟩",
            Generator::Hb => "⟨V_HB²⟩",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Generator::La => "V_LA",
            Generator::Ha => "V_HA",
            Generator::Lb => "V_LB",
            Generator::Hb => "V_HB",
        }
    }
}

/// Which resistor pair is on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LineState {
    /// Alice connects `R_LA`, Bob connects `R_HB`.
    Lh,
    /// Alice connects `R_HA`, Bob connects `R_LB`.
    Hl,
}

impl LineState {
    /// Connected `(alice, bob)` generators.
    pub fn generators(self) -> (Generator, Generator) {
        match self {
            LineState::Lh => (Generator::La, Generator::Hb),
            LineState::Hl => (Generator::Ha, Generator::Lb),
        }
    }
}

impl fmt::Display for LineState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineState::Lh => "LH",
            LineState::Hl => "HL",
        })
    }
}

/// Wire voltage and current sample series seen by the eavesdropper.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSignals {
    v_e: Vec<f64>,
    i_e: Vec<f64>,
}

impl LineSignals {
    pub fn v_e(&self) -> &[f64] {
        &self.v_e
    }

    pub fn i_e(&self) -> &[f64] {
        &self.i_e
    }

    pub fn len(&self) -> usize {
        self.v_e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v_e.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.v_e.iter().copied().zip(self.i_e.iter().copied())
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.v_e, self.i_e)
    }
}

/// Instantaneous wire voltage and current for one bit period.
///
/// `alice_source` holds the connected Alice generator (`V_LA` in LH, `V_HA` in
/// HL) and `bob_source` the connected Bob generator (`V_HB` in LH, `V_LB` in HL).
pub fn line_signals(
    state: LineState,
    quad: &ResistorQuad,
    alice_source: &[f64],
    bob_source: &[f64],
) -> Result<LineSignals> {
    if alice_source.len() != bob_source.len() {
        return Err(Error::LengthMismatch {
            alice: alice_source.len(),
            bob: bob_source.len(),
        });
    }
    if alice_source.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (r_a, r_b) = quad.connected(state);
    let loop_r = r_a + r_b;
    let (v_e, i_e) = alice_source
        .iter()
        .zip(bob_source)
        .map(|(&va, &vb)| ((r_b * va + r_a * vb) / loop_r, (vb - va) / loop_r))
        .unzip();
    Ok(LineSignals { v_e, i_e })
}

/// Exact second moments of the wire signals for independent zero-mean sources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// `⟨I_E²⟩` in A².
    pub current_variance: f64,
    /// `⟨V_E²⟩` in V².
    pub voltage_variance: f64,
    /// `⟨V_E·I_E⟩` in V·A, the mean power flowing from Bob to Alice.
    pub cross_moment: f64,
}

impl Moments {
    pub fn as_array(&self) -> [f64; 3] {
        [
            self.current_variance,
            self.voltage_variance,
            self.cross_moment,
        ]
    }
}

pub fn theoretical_moments(
    state: LineState,
    quad: &ResistorQuad,
    vars: &NoiseVariances,
) -> Moments {
    let (g_a, g_b) = state.generators();
    let (r_a, r_b) = (quad.resistance(g_a), quad.resistance(g_b));
    let (s_a, s_b) = (vars.variance(g_a), vars.variance(g_b));
    let denom = (r_a + r_b) * (r_a + r_b);
    Moments {
        current_variance: (s_a + s_b) / denom,
        voltage_variance: (r_b * r_b * s_a + r_a * r_a * s_b) / denom,
        cross_moment: (r_a * s_b - r_b * s_a) / denom,
    }
}
