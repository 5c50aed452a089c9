use std::sync::OnceLock;

use midscale::gtransform::Kernel;
use serde::Deserialize;

/// The versioned defaults document, embedded at build time.
pub const DEFAULTS_TOML: &str = include_str!("../defaults.toml");

#[derive(Debug, Clone, Deserialize)]
pub struct Defaults {
    pub version: u32,
    pub seed: u64,
    pub mcmc: McmcDefaults,
    pub moments: MomentsDefaults,
    pub table1: Table1Defaults,
    pub catalan: CatalanDefaults,
    pub sample: SampleDefaults,
    pub esd: EsdDefaults,
    pub hellinger: SamplesDefaults,
    pub kl_bound: SamplesDefaults,
    pub fk_density: FkDefaults,
    pub sweep: SweepDefaults,
}

#[derive(Debug, Clone, Deserialize)]
pub struct McmcDefaults {
    pub chains: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub step_scale: f64,
    pub kernel: Kernel,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MomentsDefaults {
    pub eval: Vec<(i64, i64)>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Table1Defaults {
    pub probes: Vec<(i64, i64)>,
    pub band: (f64, f64),
}

#[derive(Debug, Clone, Deserialize)]
pub struct CatalanDefaults {
    pub n: i64,
    pub p: i64,
    pub kmax: u32,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SampleDefaults {
    pub draws: usize,
    pub kernel: Kernel,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EsdDefaults {
    pub draws: usize,
    pub chains: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub ks_threshold: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SamplesDefaults {
    pub samples: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FkDefaults {
    pub n_z: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SweepDefaults {
    pub gamma: f64,
    pub n_grid: Vec<usize>,
    pub samples: usize,
}

pub fn defaults() -> &'static Defaults {
    static D: OnceLock<Defaults> = OnceLock::new();
    D.get_or_init(|| toml::from_str(DEFAULTS_TOML).expect("embedded defaults.toml is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_document_parses() {
        let d = defaults();
        assert_eq!(d.version, 1);
        assert_eq!(d.seed, 0x5EED_2017);
        assert_eq!(d.table1.probes, vec![(100_000_000, 1000), (10_000_000, 10_000)]);
        assert_eq!(d.mcmc.kernel, Kernel::Spectral);
    }
}
