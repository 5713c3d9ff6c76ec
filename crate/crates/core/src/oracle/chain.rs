// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Nuclide chain data: decay constants, decay heat, transmutation reactions
//! and fission-product yields.
//!
//! The data lives in a versioned TOML file. The default chain is embedded in
//! the binary; another file can be loaded with [`NuclideChain::from_path`].

use std::collections::HashMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::{Error, Result, N_NUCLIDES};

/// Embedded default chain.
pub const DEFAULT_CHAIN_TOML: &str = include_str!("../../data/chain_v1.toml");

pub const SECONDS_PER_DAY: f64 = 86_400.0;
pub const DAYS_PER_YEAR: f64 = 365.25;
pub const SECONDS_PER_YEAR: f64 = SECONDS_PER_DAY * DAYS_PER_YEAR;
pub const MEV_TO_J: f64 = 1.602_176_634e-13;
pub const AVOGADRO: f64 = 6.022_140_76e23;
/// Grams of initial uranium per tonne.
pub const GRAMS_PER_TONNE: f64 = 1.0e6;

const FISSION_PRODUCT_LUMP: &str = "fp-stable";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    version: String,
    flux_per_power: f64,
    fission_energy_j: f64,
    reference_fuel_temp_k: f64,
    reference_boron_ppm: f64,
    outputs: Vec<String>,
    nuclide: Vec<NuclideEntry>,
    #[serde(default)]
    reaction: Vec<ReactionEntry>,
    #[serde(default, rename = "yield")]
    yields: Vec<YieldEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NuclideEntry {
    name: String,
    mass_amu: f64,
    half_life_y: Option<f64>,
    #[serde(default)]
    heat_mev: f64,
    #[serde(default)]
    decay: Vec<(String, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReactionEntry {
    nuclide: String,
    kind: ReactionKind,
    sigma_b: f64,
    #[serde(default)]
    temp_coeff: f64,
    #[serde(default)]
    boron_coeff: f64,
    #[serde(default)]
    products: Vec<(String, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct YieldEntry {
    nuclide: String,
    fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReactionKind {
    Capture,
    Fission,
    N2n,
}

#[derive(Debug, Clone)]
pub struct Nuclide {
    pub name: String,
    pub mass_amu: f64,
    /// 1/s; zero for stable nuclides.
    pub decay_constant: f64,
    /// J per decay.
    pub heat_per_decay: f64,
    /// (daughter index, branching fraction)
    pub decays: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct Reaction {
    pub parent: usize,
    pub kind: ReactionKind,
    pub sigma_b: f64,
    pub temp_coeff: f64,
    pub boron_coeff: f64,
    /// (product index, atoms produced per reaction)
    pub products: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct NuclideChain {
    pub version: String,
    pub nuclides: Vec<Nuclide>,
    pub reactions: Vec<Reaction>,
    /// (nuclide index, cumulative yield per fission)
    pub fission_yields: Vec<(usize, f64)>,
    /// 1/(s barn) per W/gU.
    pub flux_per_power: f64,
    pub fission_energy_j: f64,
    pub reference_fuel_temp_k: f64,
    pub reference_boron_ppm: f64,
    /// Indices of the reported nuclides, in output column order.
    pub outputs: Vec<usize>,
    index: HashMap<String, usize>,
}

impl Default for NuclideChain {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_CHAIN_TOML).expect("embedded chain data is valid")
    }
}

impl NuclideChain {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: ChainFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("chain file: {e}")))?;
        Self::build(raw)
    }

    fn build(raw: ChainFile) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, n) in raw.nuclide.iter().enumerate() {
            if index.insert(n.name.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate nuclide {}", n.name)));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Config(format!("unknown nuclide {name}")))
        };

        let mut nuclides = Vec::with_capacity(raw.nuclide.len());
        for n in &raw.nuclide {
            let decay_constant = match n.half_life_y {
                Some(t) if t > 0.0 && t.is_finite() => std::f64::consts::LN_2 / (t * SECONDS_PER_YEAR),
                Some(t) => {
                    return Err(Error::Config(format!("{}: invalid half-life {t}", n.name)));
                }
                None => 0.0,
            };
            if !(n.mass_amu > 0.0) || !(n.heat_mev >= 0.0) {
                return Err(Error::Config(format!("{}: invalid mass or heat", n.name)));
            }
            let decays = n
                .decay
                .iter()
                .map(|(d, f)| Ok((lookup(d)?, *f)))
                .collect::<Result<Vec<_>>>()?;
            if decay_constant > 0.0 {
                let total: f64 = decays.iter().map(|(_, f)| f).sum();
                if (total - 1.0).abs() > 1e-12 || decays.iter().any(|&(_, f)| f < 0.0) {
                    return Err(Error::Config(format!(
                        "{}: decay branches must be non-negative and sum to 1 (got {total})",
                        n.name
                    )));
                }
            } else if !decays.is_empty() {
                return Err(Error::Config(format!("{}: stable nuclide lists decays", n.name)));
            }
            nuclides.push(Nuclide {
                name: n.name.clone(),
                mass_amu: n.mass_amu,
                decay_constant,
                heat_per_decay: n.heat_mev * MEV_TO_J,
                decays,
            });
        }
        if !nuclides.iter().any(|n| n.decay_constant == 0.0) {
            return Err(Error::Config("chain has no stable sink".into()));
        }

        let lump = lookup(FISSION_PRODUCT_LUMP)?;
        let mut reactions = Vec::with_capacity(raw.reaction.len());
        for r in &raw.reaction {
            let parent = lookup(&r.nuclide)?;
            if !(r.sigma_b >= 0.0) {
                return Err(Error::Config(format!("{}: negative cross section", r.nuclide)));
            }
            let products = match r.kind {
                ReactionKind::Fission => {
                    if !r.products.is_empty() {
                        return Err(Error::Config(format!(
                            "{}: fission products come from the yield table",
                            r.nuclide
                        )));
                    }
                    vec![(lump, 2.0)]
                }
                ReactionKind::Capture | ReactionKind::N2n => {
                    let products = r
                        .products
                        .iter()
                        .map(|(p, f)| Ok((lookup(p)?, *f)))
                        .collect::<Result<Vec<_>>>()?;
                    let total: f64 = products.iter().map(|(_, f)| f).sum();
                    if (total - 1.0).abs() > 1e-12 {
                        return Err(Error::Config(format!(
                            "{}: reaction products must sum to 1 (got {total})",
                            r.nuclide
                        )));
                    }
                    products
                }
            };
            reactions.push(Reaction {
                parent,
                kind: r.kind,
                sigma_b: r.sigma_b,
                temp_coeff: r.temp_coeff,
                boron_coeff: r.boron_coeff,
                products,
            });
        }

        let fission_yields = raw
            .yields
            .iter()
            .map(|y| {
                if !(y.fraction >= 0.0) {
                    return Err(Error::Config(format!("{}: negative yield", y.nuclide)));
                }
                Ok((lookup(&y.nuclide)?, y.fraction))
            })
            .collect::<Result<Vec<_>>>()?;
        let yield_sum: f64 = fission_yields.iter().map(|(_, y)| y).sum();
        if yield_sum > 2.0 {
            return Err(Error::Config(format!("fission yields sum to {yield_sum} > 2")));
        }

        if raw.outputs.len() != N_NUCLIDES {
            return Err(Error::Config(format!(
                "chain reports {} nuclides, expected {N_NUCLIDES}",
                raw.outputs.len()
            )));
        }
        let outputs = raw
            .outputs
            .iter()
            .map(|n| lookup(n))
            .collect::<Result<Vec<_>>>()?;

        for (name, v) in [
            ("flux_per_power", raw.flux_per_power),
            ("fission_energy_j", raw.fission_energy_j),
            ("reference_fuel_temp_k", raw.reference_fuel_temp_k),
            ("reference_boron_ppm", raw.reference_boron_ppm),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }

        Ok(Self {
            version: raw.version,
            nuclides,
            reactions,
            fission_yields,
            flux_per_power: raw.flux_per_power,
            fission_energy_j: raw.fission_energy_j,
            reference_fuel_temp_k: raw.reference_fuel_temp_k,
            reference_boron_ppm: raw.reference_boron_ppm,
            outputs,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.nuclides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nuclides.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Column labels of the reported nuclides, e.g. `Am242m`.
    pub fn output_labels(&self) -> Vec<String> {
        self.outputs
            .iter()
            .map(|&i| self.nuclides[i].name.replace('-', ""))
            .collect()
    }

    /// Pure-decay rate matrix `A` with `dN/dt = A N`, 1/s.
    pub fn decay_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut a = DMatrix::zeros(n, n);
        for (j, nuc) in self.nuclides.iter().enumerate() {
            if nuc.decay_constant > 0.0 {
                a[(j, j)] -= nuc.decay_constant;
                for &(d, f) in &nuc.decays {
                    a[(d, j)] += f * nuc.decay_constant;
                }
            }
        }
        a
    }

    /// Effective rate (1/s) of one reaction under the given conditions.
    pub fn reaction_rate(&self, r: &Reaction, power: f64, boron: f64, fuel_temp: f64) -> f64 {
        let dt = (fuel_temp - self.reference_fuel_temp_k) / self.reference_fuel_temp_k;
        let db = (boron - self.reference_boron_ppm) / self.reference_boron_ppm;
        let factor = ((1.0 + r.temp_coeff * dt) * (1.0 + r.boron_coeff * db)).max(0.0);
        power * r.sigma_b * self.flux_per_power * factor
    }

    /// Decay plus transmutation matrix for a burnup cycle, 1/s.
    pub fn burnup_matrix(&self, power: f64, boron: f64, fuel_temp: f64) -> DMatrix<f64> {
        let mut a = self.decay_matrix();
        for r in &self.reactions {
            let rate = self.reaction_rate(r, power, boron, fuel_temp);
            a[(r.parent, r.parent)] -= rate;
            for &(p, f) in &r.products {
                a[(p, r.parent)] += f * rate;
            }
        }
        a
    }

    /// Fission-product production during a burnup cycle, mol/(tU s).
    pub fn fission_source(&self, power: f64) -> DVector<f64> {
        let fissions_per_second = power * GRAMS_PER_TONNE / self.fission_energy_j / AVOGADRO;
        let mut s = DVector::zeros(self.len());
        for &(i, y) in &self.fission_yields {
            s[i] += y * fissions_per_second;
        }
        s
    }
}
