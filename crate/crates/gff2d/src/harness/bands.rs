//! Versioned pass-band table, loaded from `bands.toml` in the repo.

use serde::Deserialize;
use std::collections::BTreeMap;
use std::sync::OnceLock;

#[derive(Debug, Clone, Deserialize)]
pub struct Band {
    pub experiment: String,
    pub kind: String,
    pub tolerance: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub min_burn_in: Option<u64>,
    pub min_recorded: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
struct BandsFile {
    version: u32,
    band: Vec<Band>,
}

#[derive(Debug)]
pub struct Bands {
    pub version: u32,
    map: BTreeMap<String, Band>,
}

impl Bands {
    pub fn get(&self, experiment: &str) -> Option<&Band> {
        self.map.get(experiment)
    }
}

/// The table shipped with this build.
pub fn default_bands() -> &'static Bands {
    static BANDS: OnceLock<Bands> = OnceLock::new();
    BANDS.get_or_init(|| {
        let file: BandsFile =
            toml::from_str(include_str!("bands.toml")).expect("bands.toml must parse");
        Bands {
            version: file.version,
            map: file.band.into_iter().map(|b| (b.experiment.clone(), b)).collect(),
        }
    })
}
