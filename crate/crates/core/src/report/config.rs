//! Suite configuration, read from TOML and overridable from the command line.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::Setting;
use crate::quadrature::QuadratureSpec;
use crate::verifiers::identity::MAX_HIGHER_ORDER;
use crate::verifiers::ExponentTuple;

use super::statements::{lookup, suite_statements};

/// Free exponents of a CKN tuple. `r` and `c` are solved from the balance
/// conditions when absent; a missing `b` means the Hölder equality case
/// `b = −d/p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSpec {
    pub p: f64,
    pub q: f64,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl ExponentSpec {
    pub fn free(p: f64, q: f64, delta: f64, b: f64) -> Self {
        Self {
            p,
            q,
            delta,
            b: Some(b),
            r: None,
            c: None,
        }
    }

    pub fn resolve(&self, d: f64) -> Result<ExponentTuple> {
        let (p, q, delta) = (self.p, self.q, self.delta);
        let b = self.b.unwrap_or(-d / p);
        let r = self.r.unwrap_or_else(|| 1.0 / (delta / p + (1.0 - delta) / q));
        let c = self.c.unwrap_or(-(d / p) * delta + b * (1.0 - delta));
        ExponentTuple::new(p, q, r, delta, b, c, d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    pub complex: bool,
    pub nonseparable: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            count: 20,
            complex: true,
            nonseparable: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub p_values: Vec<f64>,
    pub k_values: Vec<usize>,
    /// Cutoff parameter of ψ_δ.
    pub delta: f64,
    pub epsilons: Vec<f64>,
    pub higher_epsilons: Vec<f64>,
    /// Allowed excess of the last ratio over 1.
    pub bound: f64,
    pub higher_bound: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            p_values: vec![2.0],
            k_values: vec![2],
            delta: 0.1,
            epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4],
            higher_epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            bound: 0.01,
            higher_bound: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            formats: vec!["json".into(), "csv".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    pub statements: Vec<String>,
    /// Cylinder settings for the Euclidean statements.
    pub settings: Vec<String>,
    /// Groups for the homogeneous statements.
    pub homogeneous: Vec<String>,
    pub p_values: Vec<f64>,
    pub k_values: Vec<usize>,
    pub exponents: Vec<ExponentSpec>,
    pub corpus: CorpusConfig,
    pub quadrature: QuadratureSpec,
    pub sweep: SweepConfig,
    /// Cartesian cross-checks of the H¹ and homogeneous reductions.
    pub spot_checks: bool,
    pub output: OutputConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: "default".into(),
            statements: suite_statements("default").unwrap().into_iter().map(String::from).collect(),
            settings: ["euclidean:n=1,N=1", "euclidean:n=2,N=2", "euclidean:n=3,N=2", "euclidean:n=3,N=3"]
                .into_iter()
                .map(String::from)
                .collect(),
            homogeneous: vec!["homogeneous:nu=1,2".into(), "homogeneous:nu=1,1".into()],
            p_values: vec![1.5, 2.0, 3.0],
            k_values: vec![1, 2, 3],
            exponents: vec![
                ExponentSpec::free(2.0, 2.0, 0.5, 0.0),
                ExponentSpec::free(2.0, 3.0, 0.4, 0.5),
                ExponentSpec::free(3.0, 1.5, 0.3, 0.7),
                ExponentSpec::free(2.0, 3.0, 0.0, 0.2),
                ExponentSpec::free(3.0, 2.0, 1.0, 0.2),
                ExponentSpec {
                    b: None,
                    ..ExponentSpec::free(2.0, 2.0, 0.5, 0.0)
                },
            ],
            corpus: CorpusConfig::default(),
            quadrature: QuadratureSpec::default(),
            sweep: SweepConfig::default(),
            spot_checks: true,
            output: OutputConfig::default(),
        }
    }
}

impl SuiteConfig {
    pub fn named(name: &str) -> Result<Self> {
        let statements = suite_statements(name)?.into_iter().map(String::from).collect();
        let mut c = Self {
            suite: name.into(),
            statements,
            ..Self::default()
        };
        if name == "quick" {
            c.corpus.count = 3;
            c.settings = vec!["euclidean:n=2,N=2".into(), "euclidean:n=3,N=2".into()];
            c.homogeneous = vec!["homogeneous:nu=1,2".into()];
            c.p_values = vec![2.0];
            c.k_values = vec![1, 2];
            c.spot_checks = false;
        }
        Ok(c)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, output location excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        let json = serde_json::to_string(&c).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn euclidean_settings(&self) -> Result<Vec<Setting>> {
        self.settings
            .iter()
            .map(|s| match Setting::parse(s)? {
                st @ Setting::EuclideanCylinder { .. } => Ok(st),
                other => Err(Error::Config(format!("`settings` lists cylinders only, got {other}"))),
            })
            .collect()
    }

    pub fn homogeneous_settings(&self) -> Result<Vec<Setting>> {
        self.homogeneous
            .iter()
            .map(|s| match Setting::parse(s)? {
                st @ Setting::HomogeneousGroup { .. } => Ok(st),
                other => Err(Error::Config(format!("`homogeneous` lists homogeneous groups only, got {other}"))),
            })
            .collect()
    }

    /// Everything that can be checked without computing.
    pub fn validate(&self) -> Result<()> {
        for id in &self.statements {
            lookup(id)?;
        }
        let eu = self.euclidean_settings()?;
        let hom = self.homogeneous_settings()?;
        if let Some(p) = self.p_values.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
            return Err(Error::Config(format!("p values must exceed 1, got {p}")));
        }
        if let Some(k) = self.k_values.iter().find(|k| **k == 0 || **k > MAX_HIGHER_ORDER) {
            return Err(Error::Config(format!("k values must lie in 1..={MAX_HIGHER_ORDER}, got {k}")));
        }
        if self.corpus.count == 0 {
            return Err(Error::Config("corpus count must be at least 1".into()));
        }
        self.quadrature.validate()?;
        let has = |id: &str| self.statements.iter().any(|s| s == id);
        let mut dims: Vec<f64> = Vec::new();
        if has("ckn-5.1") || has("higher-ckn") {
            dims.extend(eu.iter().map(|s| s.dimension_parameter()));
        }
        if has("ckn-strat-5.6") {
            dims.push(Setting::StratifiedH1.dimension_parameter());
        }
        if has("ckn-hom-5.9") {
            dims.extend(hom.iter().map(|s| s.dimension_parameter()));
        }
        for e in &self.exponents {
            for &d in &dims {
                e.resolve(d)?;
            }
        }
        if has("sharp-sweep") {
            let s = &self.sweep;
            for list in [&s.epsilons, &s.higher_epsilons] {
                if list.is_empty() || list.iter().any(|e| !(*e > 0.0 && *e <= 0.2)) || list.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(Error::Config("sweep ε lists must be strictly decreasing in (0, 0.2]".into()));
                }
            }
            if !(s.delta > 0.0) || s.p_values.iter().any(|p| !(*p > 1.0)) {
                return Err(Error::Config("sweeps need δ > 0 and p > 1".into()));
            }
            if let Some(k) = s.k_values.iter().find(|k| **k == 0 || **k > MAX_HIGHER_ORDER) {
                return Err(Error::Config(format!("sweep k values must lie in 1..={MAX_HIGHER_ORDER}, got {k}")));
            }
        }
        for f in &self.output.formats {
            if f != "json" && f != "csv" {
                return Err(Error::Config(format!("unknown output format `{f}`")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let c = SuiteConfig::named("full").unwrap();
        let back = SuiteConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn partial_toml_uses_defaults() {
        let c = SuiteConfig::from_toml("statements = [\"id-3.2\"]\n[corpus]\nseed = 9\n").unwrap();
        assert_eq!(c.corpus.seed, 9);
        assert_eq!(c.corpus.count, 20);
        assert_eq!(c.p_values, vec![1.5, 2.0, 3.0]);
        assert!(SuiteConfig::from_toml("statments = []").is_err());
    }

    #[test]
    fn hash_ignores_output_dir() {
        let mut a = SuiteConfig::default();
        let h = a.hash();
        a.output.dir = Some("/tmp/x".into());
        assert_eq!(a.hash(), h);
        a.corpus.seed += 1;
        assert_ne!(a.hash(), h);
        assert_eq!(h.len(), 64);
    }

    #[test]
    fn unbalanced_tuple_rejected() {
        let mut c = SuiteConfig::named("inequalities").unwrap();
        c.exponents = vec![ExponentSpec {
            r: Some(2.5),
            ..ExponentSpec::free(2.0, 2.0, 0.5, 0.0)
        }];
        assert!(matches!(c.validate(), Err(Error::Hypothesis(_))));
        c.statements = vec!["id-3.2".into()];
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_statement_rejected() {
        let c = SuiteConfig {
            statements: vec!["id-3.2".into(), "sob-3.7".into()],
            ..SuiteConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::UnknownStatement(s)) if s == "sob-3.7"));
    }

    #[test]
    fn holder_spec_resolves_per_dimension() {
        let e = SuiteConfig::default().exponents[5];
        let t = e.resolve(3.0).unwrap();
        assert!(t.is_holder_equality());
        assert_eq!(t.b, -1.5);
    }
}
