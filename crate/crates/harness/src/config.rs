//! Experiment configuration: one JSON document per run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemSpec,
    pub algorithm: AlgorithmSpec,
    pub horizon: Horizon,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    /// Seeds every random draw of the run (instances included).
    pub seed: u64,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Csv, OutputKind::Report]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// `½⟨Q(x − shift), x − shift⟩` with `Q = B diag(λ) Bᵀ`.
    Quadratic {
        eigenvalues: Vec<f64>,
        /// Rows of the orthonormal basis `B`; identity when absent.
        #[serde(default)]
        basis: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        shift: Option<Vec<f64>>,
    },
    Lasso {
        m: usize,
        n: usize,
        sparsity: usize,
        #[serde(default)]
        weight: Option<f64>,
    },
    GroupLasso {
        m: usize,
        n: usize,
        group_size: usize,
        active_groups: usize,
        #[serde(default)]
        weight: Option<f64>,
    },
    TvDenoise {
        n: usize,
        jumps: usize,
        #[serde(default)]
        weight: Option<f64>,
    },
    Nuclear {
        size: usize,
        rank: usize,
        measurements: usize,
        #[serde(default)]
        weight: Option<f64>,
    },
}

impl ProblemSpec {
    pub fn is_rls(&self) -> bool {
        !matches!(self, Self::Quadratic { .. })
    }
}

/// Time-dependent coefficient of the continuous systems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Const(f64),
    /// `coef · t^exp`.
    Power { coef: f64, exp: f64 },
    /// `c + d/t`.
    ConstPlusInv { c: f64, d: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    /// Gradient method with Hessian damping. On least-squares problems it
    /// runs on the metric envelope, where `s` defaults to 1.
    Igahd {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        s: Option<f64>,
        #[serde(default)]
        x0: Option<Vec<f64>>,
    },
    Fista {
        alpha: f64,
        #[serde(default)]
        s: Option<f64>,
        #[serde(default)]
        x0: Option<Vec<f64>>,
    },
    /// Proximal method with constant damping and scaling.
    Ipahd {
        alpha: f64,
        beta: f64,
        b: f64,
        h: f64,
        #[serde(default)]
        x0: Option<Vec<f64>>,
    },
    IpahdSc {
        mu: f64,
        beta: f64,
        s: f64,
        #[serde(default)]
        x0: Option<Vec<f64>>,
    },
    IgahdSc {
        mu: f64,
        beta: f64,
        s: f64,
        #[serde(default)]
        x0: Option<Vec<f64>>,
    },
    /// The continuous system with vanishing viscous damping `α/t`.
    DinAvd {
        alpha: f64,
        beta: CoefficientSpec,
        b: CoefficientSpec,
        #[serde(default = "one")]
        t0: f64,
        #[serde(default)]
        x0: Option<Vec<f64>>,
        #[serde(default)]
        v0: Option<Vec<f64>>,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    /// The continuous strongly convex system with constant viscous damping.
    DynSc {
        gamma: f64,
        beta: f64,
        #[serde(default)]
        x0: Option<Vec<f64>>,
        #[serde(default)]
        v0: Option<Vec<f64>>,
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    1e-10
}

impl AlgorithmSpec {
    pub fn is_continuous(&self) -> bool {
        matches!(self, Self::DinAvd { .. } | Self::DynSc { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Horizon {
    Iterations(usize),
    Time(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    Csv,
    Svg,
    Report,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.check_shape()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Structural checks that do not need the problem data.
    fn check_shape(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("name `{}` must be a non-empty file stem", self.name));
        }
        match (self.algorithm.is_continuous(), self.horizon) {
            (true, Horizon::Iterations(_)) => return bad("continuous systems need a `time` horizon".into()),
            (false, Horizon::Time(_)) => return bad("discrete methods need an `iterations` horizon".into()),
            (_, Horizon::Time(t)) if !(t > 0.0) || !t.is_finite() => return bad(format!("time horizon {t} must be positive")),
            (_, Horizon::Iterations(0)) => return bad("iteration horizon must be positive".into()),
            _ => {}
        }
        if self.problem.is_rls() && !matches!(self.algorithm, AlgorithmSpec::Igahd { .. } | AlgorithmSpec::Fista { .. }) {
            return bad("least-squares problems run with `igahd` or `fista` only".into());
        }
        Ok(())
    }
}
