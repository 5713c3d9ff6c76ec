// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Irradiation histories: the C20 reference history and its proportional
//! rescaling to sampled inputs.

use serde::{Deserialize, Serialize};

use super::AssemblyInput;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cycle {
    /// `burnup` in MWd/kgU, `power` in W/gU, `boron` in ppm.
    Burnup { burnup: f64, power: f64, boron: f64 },
    /// Inter-cycle cooling, days.
    Cooling { days: f64 },
}

impl Cycle {
    /// Length of the cycle in days. For burnup cycles this is
    /// burnup/power converted from kWd/gU to days.
    pub fn duration_days(&self) -> f64 {
        match *self {
            Cycle::Burnup { burnup, power, .. } => 1000.0 * burnup / power,
            Cycle::Cooling { days } => days,
        }
    }

    pub fn is_burnup(&self) -> bool {
        matches!(self, Cycle::Burnup { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrradiationHistory {
    pub cycles: Vec<Cycle>,
    /// Kelvin, applied to every burnup cycle.
    pub fuel_temp: f64,
}

/// Enrichment of the C20 reference assembly, percent.
pub const C20_ENRICHMENT: f64 = 3.095;
/// Fuel temperature of the C20 reference assembly, K.
pub const C20_FUEL_TEMP: f64 = 887.0;

/// The C20 burnup history: four burnup cycles separated by three
/// cooling periods.
pub fn reference_history() -> IrradiationHistory {
    IrradiationHistory {
        cycles: vec![
            Cycle::Burnup { burnup: 11.247, power: 10.9, boron: 143.0 },
            Cycle::Cooling { days: 85.0 },
            Cycle::Burnup { burnup: 9.377, power: 35.1, boron: 459.0 },
            Cycle::Cooling { days: 56.0 },
            Cycle::Burnup { burnup: 7.454, power: 23.9, boron: 342.0 },
            Cycle::Cooling { days: 1927.0 },
            Cycle::Burnup { burnup: 7.642, power: 28.7, boron: 299.0 },
        ],
        fuel_temp: C20_FUEL_TEMP,
    }
}

impl IrradiationHistory {
    pub fn total_burnup(&self) -> f64 {
        self.cycles
            .iter()
            .map(|c| match c {
                Cycle::Burnup { burnup, .. } => *burnup,
                Cycle::Cooling { .. } => 0.0,
            })
            .sum()
    }

    pub fn total_cooling_days(&self) -> f64 {
        self.cycles
            .iter()
            .map(|c| match c {
                Cycle::Cooling { days } => *days,
                Cycle::Burnup { .. } => 0.0,
            })
            .sum()
    }

    /// Average boron over burnup cycles (unweighted by cycle length).
    pub fn mean_boron(&self) -> f64 {
        let (sum, count) = self.cycles.iter().fold((0.0, 0usize), |(s, n), c| match c {
            Cycle::Burnup { boron, .. } => (s + boron, n + 1),
            Cycle::Cooling { .. } => (s, n),
        });
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }

    /// Checks the alternating burnup/cooling structure and positivity.
    pub fn validate(&self) -> Result<()> {
        let cycles = &self.cycles;
        if cycles.is_empty() || !cycles[0].is_burnup() || !cycles[cycles.len() - 1].is_burnup() {
            return Err(Error::Domain(
                "history must start and end with a burnup cycle".into(),
            ));
        }
        for pair in cycles.windows(2) {
            if pair[0].is_burnup() == pair[1].is_burnup() {
                return Err(Error::Domain(
                    "history must alternate burnup and cooling cycles".into(),
                ));
            }
        }
        for c in cycles {
            let ok = match *c {
                Cycle::Burnup { burnup, power, boron } => {
                    burnup >= 0.0 && power > 0.0 && boron >= 0.0
                }
                Cycle::Cooling { days } => days >= 0.0,
            };
            if !ok || !c.duration_days().is_finite() {
                return Err(Error::Domain(format!("invalid cycle {c:?}")));
            }
        }
        if !(self.fuel_temp > 0.0) {
            return Err(Error::Domain("fuel temperature must be positive".into()));
        }
        Ok(())
    }
}

/// Rescales `base` so its total burnup, mean boron and total cooling match
/// `input`, keeping the ratios between cycles and the cycle powers.
pub fn build_history(base: &IrradiationHistory, input: &AssemblyInput) -> Result<IrradiationHistory> {
    base.validate()?;
    let burnup = base.total_burnup();
    let boron = base.mean_boron();
    let cooling = base.total_cooling_days();
    if !(burnup > 0.0) {
        return Err(Error::DegenerateBase("zero total burnup".into()));
    }
    if !(boron > 0.0) {
        return Err(Error::DegenerateBase("zero mean boron".into()));
    }
    if !(cooling > 0.0) {
        return Err(Error::DegenerateBase("zero total cooling".into()));
    }
    let fb = input.burnup / burnup;
    let fc = input.cooling_days / cooling;
    let fboron = input.boron / boron;
    let cycles = base
        .cycles
        .iter()
        .map(|c| match *c {
            Cycle::Burnup { burnup, power, boron } => Cycle::Burnup {
                burnup: burnup * fb,
                power,
                boron: boron * fboron,
            },
            Cycle::Cooling { days } => Cycle::Cooling { days: days * fc },
        })
        .collect();
    Ok(IrradiationHistory {
        cycles,
        fuel_temp: input.fuel_temp,
    })
}
