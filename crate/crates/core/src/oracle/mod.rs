// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Reduced-order depletion oracle.
//!
//! [`Oracle::simulate`] maps the five assembly inputs to 53 outputs:
//!
//! 1. the C20 reference history is rescaled to the input
//!    ([`build_history`]);
//! 2. fresh UO2 (enrichment % U-235, the rest U-238, by mass) is depleted
//!    cycle by cycle with `N(t+dt) = exp(A dt) N(t)`;
//! 3. the end-of-life inventory gives the 28 reported concentrations (g/tU);
//! 4. the inventory is decayed to each of the 25 cooling times and the
//!    decay heat `sum_i lambda_i N_i Q_i` is reported in W/tU.
//!
//! During burnup cycles the rate matrix adds transmutation terms whose rates
//! are `power * sigma * flux_per_power`, modulated linearly by the fuel
//! temperature and boron deviation from the chain's reference conditions.
//! Radioactive fission products are fed by a constant source proportional
//! to the cycle power, so the cycle update is affine; it is evaluated
//! exactly by exponentiating the source-augmented matrix.

pub mod chain;
pub mod expm;
pub mod history;

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use chain::NuclideChain;
pub use history::{build_history, reference_history, Cycle, IrradiationHistory};

use chain::{AVOGADRO, GRAMS_PER_TONNE, SECONDS_PER_DAY, SECONDS_PER_YEAR};
use crate::{Error, Result, N_DECAY_HEAT, N_INPUTS, N_NUCLIDES, N_OUTPUTS};

/// Cooling times after end of life at which decay heat is reported, years.
pub const COOLING_TIMES_YEARS: [f64; N_DECAY_HEAT] = [
    2.0, 5.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0, 19.0, 20.0, 21.0, 22.0,
    23.0, 24.0, 25.0, 26.0, 27.0, 28.0, 29.0, 30.0, 100.0, 1000.0,
];

/// Reported nuclides, in output column order.
pub const NUCLIDE_NAMES: [&str; N_NUCLIDES] = [
    "U-234", "U-235", "U-236", "U-238", "Np-237", "Pu-236", "Pu-238", "Pu-239", "Pu-240",
    "Pu-241", "Pu-242", "Am-241", "Am-242m", "Am-243", "Cm-242", "Cm-243", "Cm-244", "Cm-245",
    "Cm-246", "U-237", "Np-239", "Am-242", "Am-244", "Cm-247", "Cm-248", "Bk-249", "Cs-137",
    "Sr-90",
];

/// Column names of the five inputs.
pub const INPUT_NAMES: [&str; N_INPUTS] = [
    "enrichment_pct",
    "burnup_MWdkgU",
    "fuel_temp_K",
    "boron_ppm",
    "cooling_days",
];

/// Column names of the 53 outputs: `dh_2y`, ..., `dh_1000y`, then nuclide
/// labels such as `Am242m` (g/tU).
pub fn output_names() -> Vec<String> {
    COOLING_TIMES_YEARS
        .iter()
        .map(|t| format!("dh_{t}y"))
        .chain(NUCLIDE_NAMES.iter().map(|n| n.replace('-', "")))
        .collect()
}

/// The five sampled assembly parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssemblyInput {
    /// U-235 mass percent.
    pub enrichment: f64,
    /// MWd/kgU.
    pub burnup: f64,
    /// K.
    pub fuel_temp: f64,
    /// Cycle-average boron, ppm.
    pub boron: f64,
    /// Total inter-cycle cooling, days.
    pub cooling_days: f64,
}

impl AssemblyInput {
    /// The C20 reference assembly.
    pub fn c20() -> Self {
        let h = reference_history();
        Self {
            enrichment: history::C20_ENRICHMENT,
            burnup: h.total_burnup(),
            fuel_temp: h.fuel_temp,
            boron: h.mean_boron(),
            cooling_days: h.total_cooling_days(),
        }
    }

    pub fn to_array(&self) -> [f64; N_INPUTS] {
        [
            self.enrichment,
            self.burnup,
            self.fuel_temp,
            self.boron,
            self.cooling_days,
        ]
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != N_INPUTS {
            return Err(Error::Dimension(format!(
                "expected {N_INPUTS} inputs, got {}",
                x.len()
            )));
        }
        Ok(Self {
            enrichment: x[0],
            burnup: x[1],
            fuel_temp: x[2],
            boron: x[3],
            cooling_days: x[4],
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in INPUT_NAMES.iter().zip(self.to_array()) {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.enrichment >= 100.0 {
            return Err(Error::Domain(format!(
                "enrichment must be below 100%, got {}",
                self.enrichment
            )));
        }
        Ok(())
    }
}

/// Decay heat (W/tU) at [`COOLING_TIMES_YEARS`] and end-of-life
/// concentrations (g/tU) of [`NUCLIDE_NAMES`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnfOutput {
    pub decay_heat: [f64; N_DECAY_HEAT],
    pub concentrations: [f64; N_NUCLIDES],
}

impl SnfOutput {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(N_OUTPUTS);
        v.extend_from_slice(&self.decay_heat);
        v.extend_from_slice(&self.concentrations);
        v
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != N_OUTPUTS {
            return Err(Error::Dimension(format!(
                "expected {N_OUTPUTS} outputs, got {}",
                v.len()
            )));
        }
        let mut out = SnfOutput {
            decay_heat: [0.0; N_DECAY_HEAT],
            concentrations: [0.0; N_NUCLIDES],
        };
        out.decay_heat.copy_from_slice(&v[..N_DECAY_HEAT]);
        out.concentrations.copy_from_slice(&v[N_DECAY_HEAT..]);
        Ok(out)
    }

    /// Decay heat at an arbitrary cooling time inside the reported grid,
    /// interpolated linearly in log(heat).
    pub fn decay_heat_at(&self, years: f64) -> Result<f64> {
        let t = &COOLING_TIMES_YEARS;
        if !(years >= t[0] && years <= t[N_DECAY_HEAT - 1]) {
            return Err(Error::Domain(format!(
                "cooling time {years} y outside [{}, {}] y",
                t[0],
                t[N_DECAY_HEAT - 1]
            )));
        }
        let k = t.partition_point(|&x| x < years).max(1);
        let (t0, t1) = (t[k - 1], t[k]);
        let (h0, h1) = (self.decay_heat[k - 1], self.decay_heat[k]);
        let w = (years - t0) / (t1 - t0);
        if h0 > 0.0 && h1 > 0.0 {
            Ok((h0.ln() * (1.0 - w) + h1.ln() * w).exp())
        } else {
            Ok(h0 * (1.0 - w) + h1 * w)
        }
    }
}

/// Clears round-off negatives left by the matrix exponential. Entries more
/// negative than a tiny fraction of the inventory indicate a real problem.
fn clean_state(state: &mut [f64]) -> Result<()> {
    let total: f64 = state.iter().map(|v| v.abs()).sum();
    for v in state.iter_mut() {
        if !v.is_finite() {
            return Err(Error::Data("non-finite nuclide amount".into()));
        }
        if *v < 0.0 {
            if -*v > 1e-10 * total {
                return Err(Error::Data(format!("negative nuclide amount {v}")));
            }
            *v = 0.0;
        }
    }
    Ok(())
}

fn check_state(state: &[f64], n: usize) -> Result<()> {
    if state.len() != n {
        return Err(Error::Dimension(format!(
            "state has {} entries, chain has {n}",
            state.len()
        )));
    }
    if let Some(v) = state.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("nuclide amounts must be >= 0, got {v}")));
    }
    Ok(())
}

fn propagate(m: &DMatrix<f64>, state: &[f64]) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = (m * DVector::from_column_slice(state)).iter().copied().collect();
    clean_state(&mut out)?;
    Ok(out)
}

/// Advances a nuclide inventory (mol/tU) through one cycle.
///
/// Cooling cycles apply pure decay. Burnup cycles add transmutation at the
/// cycle's power and boron and the given fuel temperature, plus the
/// fission-product source.
pub fn deplete_cycle(
    state: &[f64],
    cycle: &Cycle,
    chain: &NuclideChain,
    fuel_temp: f64,
) -> Result<Vec<f64>> {
    check_state(state, chain.len())?;
    let dt = cycle.duration_days() * SECONDS_PER_DAY;
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("invalid cycle duration {dt} s")));
    }
    match *cycle {
        Cycle::Cooling { .. } => {
            let a = chain.decay_matrix() * dt;
            let m = expm(&a)?;
            propagate(&m, state)
        }
        Cycle::Burnup { power, boron, .. } => {
            let a = chain.burnup_matrix(power, boron, fuel_temp) * dt;
            let source = chain.fission_source(power) * dt;
            deplete_affine(&a, &source, state)
        }
    }
}

fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite rate matrix entry".into()));
    }
    expm::expm(a).ok_or_else(|| Error::Data("matrix exponential failed".into()))
}

/// `x' = exp(A) x + phi(A) s` via the augmented matrix `[[A, s/c], [0, 0]]`
/// acting on `[x, c]`. `c` keeps the source column on the scale of `A`.
fn deplete_affine(a: &DMatrix<f64>, source: &DVector<f64>, state: &[f64]) -> Result<Vec<f64>> {
    let n = state.len();
    let c = source.iter().map(|v| v.abs()).sum::<f64>();
    let c = if c > 0.0 { c } else { 1.0 };
    let mut aug = DMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(a);
    for i in 0..n {
        aug[(i, n)] = source[i] / c;
    }
    let m = expm(&aug)?;
    let mut x = DVector::zeros(n + 1);
    x.rows_mut(0, n).copy_from_slice(state);
    x[n] = c;
    let y = m * x;
    let mut out: Vec<f64> = y.rows(0, n).iter().copied().collect();
    clean_state(&mut out)?;
    Ok(out)
}

/// The oracle: chain data, base history and cached post-irradiation decay
/// propagators.
#[derive(Debug, Clone)]
pub struct Oracle {
    chain: NuclideChain,
    base: IrradiationHistory,
    decay: DMatrix<f64>,
    /// `exp(A_decay (t_k - t_{k-1}))` for the reporting grid.
    post_eol: Vec<DMatrix<f64>>,
    heat: Vec<f64>,
}

impl Oracle {
    pub fn new(chain: NuclideChain) -> Result<Self> {
        Self::with_base(chain, reference_history())
    }

    pub fn with_base(chain: NuclideChain, base: IrradiationHistory) -> Result<Self> {
        base.validate()?;
        for (k, (&idx, want)) in chain.outputs.iter().zip(NUCLIDE_NAMES).enumerate() {
            if chain.nuclides[idx].name != want {
                return Err(Error::Config(format!(
                    "chain output {k} is {}, expected {want}",
                    chain.nuclides[idx].name
                )));
            }
        }
        for name in ["U-235", "U-238"] {
            if chain.index_of(name).is_none() {
                return Err(Error::Config(format!("chain lacks {name}")));
            }
        }
        let decay = chain.decay_matrix();
        let mut post_eol = Vec::with_capacity(N_DECAY_HEAT);
        let mut prev = 0.0;
        for &t in &COOLING_TIMES_YEARS {
            post_eol.push(expm(&(&decay * ((t - prev) * SECONDS_PER_YEAR)))?);
            prev = t;
        }
        let heat = chain
            .nuclides
            .iter()
            .map(|n| n.decay_constant * n.heat_per_decay * AVOGADRO)
            .collect();
        Ok(Self {
            chain,
            base,
            decay,
            post_eol,
            heat,
        })
    }

    /// Process-wide oracle built from the embedded chain.
    pub fn shared() -> &'static Oracle {
        static SHARED: OnceLock<Oracle> = OnceLock::new();
        SHARED.get_or_init(|| Oracle::new(NuclideChain::default()).expect("embedded chain is valid"))
    }

    pub fn chain(&self) -> &NuclideChain {
        &self.chain
    }

    pub fn base_history(&self) -> &IrradiationHistory {
        &self.base
    }

    /// Oracle identifier recorded in dataset metadata.
    pub fn version(&self) -> String {
        format!("bateman-oracle/{}", self.chain.version)
    }

    /// Fresh UO2 inventory in mol/tU.
    pub fn fresh_fuel(&self, enrichment: f64) -> Vec<f64> {
        let mut state = vec![0.0; self.chain.len()];
        for (name, mass_fraction) in [("U-235", enrichment / 100.0), ("U-238", 1.0 - enrichment / 100.0)] {
            let i = self.chain.index_of(name).expect("checked in constructor");
            state[i] = mass_fraction * GRAMS_PER_TONNE / self.chain.nuclides[i].mass_amu;
        }
        state
    }

    /// End-of-life inventory (mol/tU) for an input.
    pub fn end_of_life(&self, input: &AssemblyInput) -> Result<Vec<f64>> {
        input.validate()?;
        let history = build_history(&self.base, input)?;
        let mut state = self.fresh_fuel(input.enrichment);
        for cycle in &history.cycles {
            state = match cycle {
                Cycle::Cooling { days } => {
                    let m = expm(&(&self.decay * (days * SECONDS_PER_DAY)))?;
                    propagate(&m, &state)?
                }
                Cycle::Burnup { .. } => deplete_cycle(&state, cycle, &self.chain, history.fuel_temp)?,
            };
        }
        Ok(state)
    }

    /// Decay heat of an inventory, W/tU.
    pub fn decay_heat(&self, state: &[f64]) -> f64 {
        state.iter().zip(&self.heat).map(|(n, h)| n * h).sum()
    }

    pub fn simulate(&self, input: &AssemblyInput) -> Result<SnfOutput> {
        let mut state = self.end_of_life(input)?;
        let mut concentrations = [0.0; N_NUCLIDES];
        for (c, &i) in concentrations.iter_mut().zip(&self.chain.outputs) {
            *c = state[i] * self.chain.nuclides[i].mass_amu;
        }
        let mut decay_heat = [0.0; N_DECAY_HEAT];
        for (dh, m) in decay_heat.iter_mut().zip(&self.post_eol) {
            state = propagate(m, &state)?;
            *dh = self.decay_heat(&state);
        }
        Ok(SnfOutput {
            decay_heat,
            concentrations,
        })
    }
}

/// [`Oracle::simulate`] on the shared default oracle.
pub fn simulate(input: &AssemblyInput) -> Result<SnfOutput> {
    Oracle::shared().simulate(input)
}
