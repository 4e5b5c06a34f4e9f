//! Pipeline configuration as a TOML document with one table per stage.
//! Every key is optional; unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attention::AttentionParams;
use crate::error::{Error, Result};
use crate::eval::{LossWeights, VirtualNormalParams};
use crate::labeling::{ClassMapping, CrfParams, LayoutClass};
use crate::recon::ReconParams;
use crate::synth::CuboidScene;

/// Settings of the cue extraction chain outside the CRF and reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CueParams {
    /// Probability given to the observed class in the unary term.
    pub confidence: f64,
    /// Odd window of the boundary median filter.
    pub median_window: usize,
    /// Modified z-score above which a meridian is rejected.
    pub mad_z: f64,
    /// Reconstruct the bottom boundary by exact projection instead of the
    /// mirrored chain.
    pub exact: bool,
}

impl Default for CueParams {
    fn default() -> Self {
        Self {
            confidence: 0.75,
            median_window: 5,
            mad_z: 3.5,
            exact: false,
        }
    }
}

impl CueParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.confidence > 0.25 && self.confidence < 1.0) {
            return Err(Error::Config(format!(
                "cues.confidence must lie in (0.25, 1), got {}",
                self.confidence
            )));
        }
        if self.median_window == 0 || self.median_window % 2 == 0 {
            return Err(Error::Config(format!(
                "cues.median_window must be odd, got {}",
                self.median_window
            )));
        }
        if !(self.mad_z > 0.0) || !self.mad_z.is_finite() {
            return Err(Error::Config(format!(
                "cues.mad_z must be positive, got {}",
                self.mad_z
            )));
        }
        Ok(())
    }
}

/// Depth range over which metrics are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricParams {
    pub min_depth: f64,
    pub max_depth: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        Self {
            min_depth: 0.1,
            max_depth: 10.0,
        }
    }
}

/// Training losses: per-scale weights plus virtual-normal sampling.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossParams {
    pub weights: LossWeights,
    pub virtual_normal: VirtualNormalParams,
}

/// Synthetic room generation for `synth-room`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthParams {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    /// Camera halfway between floor and ceiling.
    pub symmetric: bool,
    /// Fraction of label pixels replaced by not-layout holes.
    pub label_holes: f64,
    /// Explicit room; when absent one is drawn from `seed`.
    pub scene: Option<CuboidScene>,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            width: 512,
            height: 256,
            seed: 0,
            symmetric: false,
            label_holes: 0.0,
            scene: None,
        }
    }
}

impl SynthParams {
    pub fn scene(&self) -> Result<CuboidScene> {
        let scene = match self.scene {
            Some(s) => s,
            None => CuboidScene::sample(self.seed, self.width, self.height, self.symmetric),
        };
        scene.validate()?;
        Ok(scene)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub crf: CrfParams,
    pub recon: ReconParams,
    pub attention: AttentionParams,
    pub loss: LossParams,
    pub metrics: MetricParams,
    pub cues: CueParams,
    pub synth: SynthParams,
    /// Semantic label id (as a string key) to layout class name.
    pub mapping: BTreeMap<String, String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            crf: CrfParams::default(),
            recon: ReconParams::default(),
            attention: AttentionParams::default(),
            loss: LossParams::default(),
            metrics: MetricParams::default(),
            cues: CueParams::default(),
            synth: SynthParams::default(),
            mapping: LayoutClass::ALL
                .iter()
                .map(|c| (c.id().to_string(), c.name().to_string()))
                .collect(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration is plain data")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::format(path, e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.crf.validate()?;
        self.recon.validate()?;
        self.attention.validate()?;
        self.loss.weights.validate()?;
        self.cues.validate()?;
        let m = self.metrics;
        if !(m.min_depth >= 0.0 && m.min_depth < m.max_depth) {
            return Err(Error::Config(format!(
                "metrics range [{}, {}] is empty",
                m.min_depth, m.max_depth
            )));
        }
        self.class_mapping().map(|_| ())
    }

    pub fn class_mapping(&self) -> Result<ClassMapping> {
        let mut out = ClassMapping::new();
        for (k, v) in &self.mapping {
            let id: u32 = k
                .parse()
                .map_err(|_| Error::Config(format!("mapping key {k:?} is not a label id")))?;
            let class = LayoutClass::from_name(v)
                .ok_or_else(|| Error::Config(format!("mapping.{k}: unknown layout class {v:?}")))?;
            out.insert(id, class);
        }
        Ok(out)
    }
}
