use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::asymptotics::McConfig;
use crate::combin::KCAP;
use crate::entries::{BaseDistribution, BaseModel, EntryModel, ScaleRule};
use crate::error::{Error, Result};
use crate::patterns::{LinkPattern, MaskKind, MaskSpec, MatrixSpec};
use crate::spectra::{Solver, MAX_DIMENSION};

/// Pattern and mask; the dimension comes from the experiment's `n` list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixTemplate {
    pub pattern: LinkPattern,
    #[serde(default)]
    pub mask: MaskSpec,
}

impl MatrixTemplate {
    pub fn at(&self, n: usize) -> MatrixSpec {
        MatrixSpec {
            pattern: self.pattern,
            n,
            mask: self.mask,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<PathBuf>,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            report: None,
            histogram: None,
            bins: default_bins(),
        }
    }
}

fn default_bins() -> usize {
    101
}

fn default_z_cap() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub matrix: MatrixTemplate,
    pub entries: EntryModel,
    pub n: Vec<usize>,
    pub replicates: usize,
    pub kmax: usize,
    pub seed: u64,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default = "default_z_cap")]
    pub z_cap: f64,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentConfig {
    pub fn new(
        pattern: LinkPattern,
        entries: EntryModel,
        n: Vec<usize>,
        replicates: usize,
        kmax: usize,
        seed: u64,
    ) -> Self {
        ExperimentConfig {
            matrix: MatrixTemplate {
                pattern,
                mask: MaskSpec::NONE,
            },
            entries,
            n,
            replicates,
            kmax,
            seed,
            mc: McConfig::default(),
            solver: Solver::Auto,
            z_cap: default_z_cap(),
            output: OutputPaths::default(),
        }
    }

    pub fn with_mask(mut self, mask: MaskSpec) -> Self {
        self.matrix.mask = mask;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.kmax == 0 || self.kmax > KCAP {
            return Err(Error::Config(format!(
                "kmax must lie in 1..={KCAP}, got {}",
                self.kmax
            )));
        }
        if self.n.is_empty() {
            return Err(Error::Config("the n list is empty".into()));
        }
        if !(self.z_cap > 0.0) {
            return Err(Error::Config("z_cap must be positive".into()));
        }
        if self.output.bins == 0 {
            return Err(Error::Config("histogram bins must be at least 1".into()));
        }
        for &n in &self.n {
            if n > MAX_DIMENSION {
                return Err(Error::capacity(
                    "matrix dimension",
                    n as u128,
                    MAX_DIMENSION as u128,
                ));
            }
            self.matrix.at(n).validate()?;
            self.entries.validate_at(n)?;
        }
        Ok(())
    }
}

/// Builds an entry model from a short name.
///
/// * `normal`, `rademacher`, `uniform`: unit-variance entries scaled by
///   `n^{-1/2}`; append `@band` to scale by `m^{-1/2}` with `m = ⌊alpha·n⌋`.
/// * `bernoulli` (or `sparse`): Bernoulli(λ/n).
/// * `binomial:<m>`: Binomial(m, λ/n).
pub fn parse_model(name: &str, lambda: Option<f64>, alpha: Option<f64>) -> Result<EntryModel> {
    let (head, band) = match name.strip_suffix("@band") {
        Some(h) => (h, true),
        None => (name, false),
    };
    let need_lambda =
        || lambda.ok_or_else(|| Error::Config(format!("model '{name}' needs --lambda")));
    let dist = match head {
        "normal" | "gaussian" => Some(BaseDistribution::Normal),
        "rademacher" => Some(BaseDistribution::Rademacher),
        "uniform" => Some(BaseDistribution::Uniform),
        _ => None,
    };
    let base = if let Some(dist) = dist {
        let scale = if band {
            ScaleRule::InvSqrtBandwidth {
                alpha: alpha
                    .ok_or_else(|| Error::Config(format!("model '{name}' needs --alpha")))?,
            }
        } else {
            ScaleRule::InvSqrtN
        };
        BaseModel::ScaledIid { dist, scale }
    } else if band {
        return Err(Error::Config(format!(
            "'@band' scaling applies to normal, rademacher and uniform only, not '{head}'"
        )));
    } else if head == "bernoulli" || head == "sparse" {
        BaseModel::SparseBernoulli {
            lambda: need_lambda()?,
        }
    } else if let Some(m) = head.strip_prefix("binomial:") {
        let trials = m
            .parse()
            .map_err(|_| Error::Config(format!("bad trial count in '{name}'")))?;
        BaseModel::Binomial {
            trials,
            lambda: need_lambda()?,
        }
    } else {
        return Err(Error::Config(format!("unknown model '{name}'")));
    };
    Ok(EntryModel::new(base))
}

/// Mask from CLI flags.
pub fn parse_mask(kind: MaskKind, alpha: Option<f64>) -> Result<MaskSpec> {
    Ok(match kind {
        MaskKind::None => MaskSpec::NONE,
        MaskKind::Triangular => MaskSpec::TRIANGULAR,
        MaskKind::BandTypeI | MaskKind::BandTypeII => MaskSpec {
            kind,
            alpha: Some(alpha.ok_or_else(|| Error::Config("band masks need --alpha".into()))?),
            m: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let cfg = ExperimentConfig::new(
            LinkPattern::SymmetricCirculant,
            EntryModel::new(BaseModel::normal()),
            vec![100, 200],
            10,
            6,
            1,
        );
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);

        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["replicas"] = serde_json::json!(3);
        assert!(matches!(
            ExperimentConfig::from_json(&value.to_string()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn minimal_config() {
        let text = r#"{
            "matrix": {"pattern": "rc", "mask": {"kind": "band1", "alpha": 0.5}},
            "entries": {"base": {"family": "scaled_iid", "dist": "normal",
                                 "scale": {"inv_sqrt_bandwidth": {"alpha": 0.5}}}},
            "n": [50], "replicates": 4, "kmax": 4, "seed": 9
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.z_cap, 3.0);
        assert_eq!(cfg.output.bins, 101);
        assert_eq!(
            cfg.matrix.at(50).validate().unwrap(),
            crate::patterns::Mask::BandI { m: 25 }
        );
    }

    #[test]
    fn invalid_configs() {
        let base = ExperimentConfig::new(
            LinkPattern::ReverseCirculant,
            EntryModel::new(BaseModel::normal()),
            vec![10],
            1,
            4,
            0,
        );
        let mut c = base.clone();
        c.kmax = 11;
        assert!(c.validate().is_err());
        let c = base.clone().with_mask(MaskSpec::TRIANGULAR);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = base.clone();
        c.n = vec![5000];
        assert!(matches!(c.validate(), Err(Error::Capacity { .. })));
        let mut c = base;
        c.entries = EntryModel::new(BaseModel::SparseBernoulli { lambda: 20.0 });
        assert!(c.validate().is_err());
    }

    #[test]
    fn model_names() {
        assert_eq!(
            parse_model("normal", None, None).unwrap().base,
            BaseModel::normal()
        );
        assert_eq!(
            parse_model("bernoulli", Some(3.0), None).unwrap().base,
            BaseModel::SparseBernoulli { lambda: 3.0 }
        );
        assert_eq!(
            parse_model("binomial:2", Some(1.0), None).unwrap().base,
            BaseModel::Binomial {
                trials: 2,
                lambda: 1.0
            }
        );
        assert_eq!(
            parse_model("rademacher@band", None, Some(0.5))
                .unwrap()
                .base,
            BaseModel::ScaledIid {
                dist: BaseDistribution::Rademacher,
                scale: ScaleRule::InvSqrtBandwidth { alpha: 0.5 }
            }
        );
        assert!(parse_model("bernoulli", None, None).is_err());
        assert!(parse_model("cauchy", None, None).is_err());
        assert!(parse_model("sparse@band", Some(1.0), Some(0.5)).is_err());
    }
}
