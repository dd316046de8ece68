//! Experiment configuration: one JSON document with per-section defaults, so
//! an empty config runs the desk-scale defaults of every subcommand.

use crate::error::CoreError;
use crate::grid::Geometry;
use crate::operators::{SpatialSymbol, TwistedSymbol};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridCfg {
    pub n: usize,
    pub l: f64,
}

impl Default for GridCfg {
    fn default() -> Self {
        GridCfg { n: 128, l: 16.0 }
    }
}

impl GridCfg {
    pub fn geometry(&self) -> Result<Geometry, CoreError> {
        Geometry::new(self.n, self.l)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExponentTuple {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

impl Default for ExponentTuple {
    fn default() -> Self {
        ExponentTuple { p: 3.0, q: 3.0, r: 1.5, s: 1.0 }
    }
}

/// Random band-limited ensemble: x-modes listed explicitly, y-modes on the
/// dyadic-style annulus lo < |i2| <= hi (positive half; hermitian
/// symmetrization fills the other sign).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleCfg {
    pub trials: usize,
    pub x_indices: Vec<i64>,
    pub y_band: (i64, i64),
}

impl Default for EnsembleCfg {
    fn default() -> Self {
        EnsembleCfg { trials: 20, x_indices: vec![-8, -4, 0, 4, 8], y_band: (8, 24) }
    }
}

impl EnsembleCfg {
    pub fn y_indices(&self) -> Vec<i64> {
        (self.y_band.0 + 1..=self.y_band.1).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepCfg {
    pub dilations: Vec<i32>,
}

impl Default for SweepCfg {
    fn default() -> Self {
        SweepCfg { dilations: vec![-2, -1, 0, 1, 2] }
    }
}

/// Spatial amplitude for T_sigma runs: sigma = amplitude(x) * symbol(tau).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmplitudeCfg {
    /// 1 + depth * sin(2 pi x / L)
    SinusoidalX { depth: f64 },
}

impl AmplitudeCfg {
    pub fn spatial_symbol(&self, geo: Geometry, base: TwistedSymbol) -> SpatialSymbol {
        match self {
            AmplitudeCfg::SinusoidalX { depth } => {
                let d = *depth;
                let l = geo.l;
                SpatialSymbol::Separable {
                    amplitude: std::sync::Arc::new(move |x, _y| {
                        Complex64::new(1.0 + d * (2.0 * PI * x / l).sin(), 0.0)
                    }),
                    base,
                }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RecoveryCfg {
    pub grid: Option<GridCfg>,
    pub symbol: Option<String>,
    pub xi0: (f64, f64),
    pub eta0: (f64, f64),
    pub eps: Vec<f64>,
}

impl Default for RecoveryCfg {
    fn default() -> Self {
        RecoveryCfg {
            grid: Some(GridCfg { n: 64, l: 32.0 }),
            // smooth plateau around the probe pair (0, 1/2), support constant 2
            symbol: Some("theta(2*tau1) * theta(4*(abs(tau2) - 0.5))".into()),
            xi0: (0.0, -0.5),
            eta0: (0.0, 0.5),
            eps: vec![0.5, 0.25, 0.125],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeCfg {
    pub grid: Option<GridCfg>,
    pub symbol: Option<String>,
    pub lambdas: Vec<f64>,
    pub g_carrier: (f64, f64),
    /// Scale the g carrier's second component by lambda (keeps a
    /// cone-supported symbol fed on-support as lambda grows).
    pub g_tracks: bool,
    pub packet_width: f64,
}

impl Default for ProbeCfg {
    fn default() -> Self {
        ProbeCfg {
            grid: Some(GridCfg { n: 256, l: 1.0 }),
            symbol: Some("1".into()),
            lambdas: vec![4.0, 8.0, 16.0],
            g_carrier: (0.0, 3.0),
            g_tracks: false,
            packet_width: 2.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct LeibnizCfg {
    pub s: usize,
    pub trials: usize,
    pub x_indices: Vec<i64>,
    pub y_band: (i64, i64),
}

impl Default for LeibnizCfg {
    fn default() -> Self {
        // x-content stays under index 24 so s-fold products clear Nyquist at N=128
        LeibnizCfg {
            s: 2,
            trials: 3,
            x_indices: vec![-24, -16, -8, 0, 8, 16, 24],
            y_band: (8, 24),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct DecomposeCfg {
    pub n_max: usize,
    pub n_max_list: Vec<usize>,
    pub m_quad: Option<usize>,
}

impl Default for DecomposeCfg {
    fn default() -> Self {
        DecomposeCfg { n_max: 8, n_max_list: vec![2, 4, 8, 16], m_quad: None }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ApplyCfg {
    pub f: String,
    pub g: String,
    pub output: String,
    /// Path of an exported decomposition JSON; when set, apply the
    /// synthesized paraproduct sum instead of the generic multiplier.
    pub decomposition: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct PartitionCfg {
    pub k_min: i32,
    pub k_max: i32,
    pub samples: usize,
}

impl Default for PartitionCfg {
    fn default() -> Self {
        PartitionCfg { k_min: -4, k_max: 3, samples: 10_000 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub grid: GridCfg,
    pub symbol: String,
    pub exponents: ExponentTuple,
    pub ensemble: EnsembleCfg,
    pub sweep: SweepCfg,
    pub spatial_amplitude: Option<AmplitudeCfg>,
    pub recovery: RecoveryCfg,
    pub probe: ProbeCfg,
    pub leibniz: LeibnizCfg,
    pub decompose: DecomposeCfg,
    pub apply: ApplyCfg,
    pub partition: PartitionCfg,
    /// Out-of-range probe: skip the support and exponent gates and label the
    /// output accordingly.
    pub probe_mode: bool,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: GridCfg::default(),
            symbol: "cone(1)".into(),
            exponents: ExponentTuple::default(),
            ensemble: EnsembleCfg::default(),
            sweep: SweepCfg::default(),
            spatial_amplitude: None,
            recovery: RecoveryCfg::default(),
            probe: ProbeCfg::default(),
            leibniz: LeibnizCfg::default(),
            decompose: DecomposeCfg::default(),
            apply: ApplyCfg::default(),
            partition: PartitionCfg::default(),
            probe_mode: false,
            seed: 42,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self, CoreError> {
        serde_json::from_str(s).map_err(|e| CoreError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
