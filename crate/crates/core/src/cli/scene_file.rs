use std::path::Path;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hypersurface::{
    Family, GraphParams, ImmersionScene, PerturbedParams, QuadricChart, Tolerances,
    DEFAULT_NUM_SAMPLES, DEFAULT_SAMPLE_BOX,
};
use crate::paracomplex::QuadricSpec;
use crate::theorems::TheoremId;

pub const SCENE_VERSION: u32 = 1;

/// On-disk scene description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: u32,
    pub scene: SceneSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub suites: SuiteSelection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub family: String,
    #[serde(default)]
    pub params: Value,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_num_samples")]
    pub num_samples: usize,
    #[serde(default = "default_sample_box")]
    pub sample_box: f64,
    /// Explicit chart points; drawn from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Vec<f64>>>,
}

fn default_num_samples() -> usize {
    DEFAULT_NUM_SAMPLES
}

fn default_sample_box() -> f64 {
    DEFAULT_SAMPLE_BOX
}

/// `"all"` or an explicit list of suite ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SuiteSelection {
    Keyword(AllKeyword),
    List(Vec<TheoremId>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AllKeyword {
    #[serde(rename = "all")]
    All,
}

impl Default for SuiteSelection {
    fn default() -> Self {
        SuiteSelection::Keyword(AllKeyword::All)
    }
}

impl SuiteSelection {
    /// Selected ids in canonical order, without duplicates.
    pub fn ids(&self) -> Vec<TheoremId> {
        match self {
            SuiteSelection::Keyword(AllKeyword::All) => TheoremId::ALL.to_vec(),
            SuiteSelection::List(list) => TheoremId::ALL
                .into_iter()
                .filter(|id| list.contains(id))
                .collect(),
        }
    }
}

/// Chart parameters; base point and tangent basis are derived when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartParams {
    pub quadric: QuadricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangent_basis: Option<Vec<Vec<f64>>>,
}

impl ChartParams {
    fn into_chart(self, seed: u64) -> Result<QuadricChart> {
        match (self.base_point, self.tangent_basis) {
            (Some(base_point), Some(tangent_basis)) => {
                let chart = QuadricChart {
                    quadric: self.quadric,
                    base_point,
                    tangent_basis,
                };
                chart.validate()?;
                Ok(chart)
            }
            (Some(base_point), None) => QuadricChart::through(self.quadric, base_point),
            (None, None) => QuadricChart::generate(self.quadric, seed),
            (None, Some(_)) => Err(Error::Scene(
                "tangent_basis given without base_point".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbedFileParams {
    pub quadric: QuadricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangent_basis: Option<Vec<Vec<f64>>>,
    pub epsilon: f64,
    /// Direction projected onto the `J̃`-invariant distribution; seeded when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

/// Seeded unit direction in `R^dim`.
pub fn default_direction(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d1ec);
    let d = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0));
    (d.normalize()).iter().copied().collect()
}

fn parse_params<T: DeserializeOwned>(params: &Value, family: &str) -> Result<T> {
    serde_path_to_error::deserialize(params.clone()).map_err(|e| {
        let path = e.path().to_string();
        Error::Scene(format!(
            "scene.params ({family}) at `{path}`: {}",
            e.inner()
        ))
    })
}

impl SceneSpec {
    pub fn family_from_params(&self) -> Result<Family> {
        let family = self.family.as_str();
        match family {
            "hyperbola" => {
                if !self.params.is_null() {
                    parse_params::<NoParams>(&self.params, family)?;
                }
                Ok(Family::Hyperbola)
            }
            "quadric_radial" => {
                let params: ChartParams = parse_params(&self.params, family)?;
                Ok(Family::QuadricRadial(params.into_chart(self.seed)?))
            }
            "perturbed_transversal" => {
                let p: PerturbedFileParams = parse_params(&self.params, family)?;
                let dim = p.quadric.ambient_dim();
                let direction = p.direction.unwrap_or_else(|| default_direction(dim, self.seed));
                let chart = ChartParams {
                    quadric: p.quadric,
                    base_point: p.base_point,
                    tangent_basis: p.tangent_basis,
                }
                .into_chart(self.seed)?;
                Ok(Family::PerturbedTransversal(PerturbedParams {
                    chart,
                    epsilon: p.epsilon,
                    direction,
                }))
            }
            "explicit_graph" => Ok(Family::ExplicitGraph(parse_params::<GraphParams>(&self.params, family)?)),
            other => Err(Error::Scene(format!(
                "scene.family: unknown family `{other}` (expected hyperbola, quadric_radial, explicit_graph or perturbed_transversal)"
            ))),
        }
    }
}

impl SceneFile {
    pub fn from_json(text: &str) -> Result<SceneFile> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: SceneFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Scene(format!(
                "line {} column {}, field `{path}`: {inner}",
                inner.line(),
                inner.column()
            ))
        })?;
        file.check()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<SceneFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scene(format!("cannot read {}: {e}", path.display())))?;
        SceneFile::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scene files serialize");
        text.push('\n');
        text
    }

    fn check(&self) -> Result<()> {
        if self.version != SCENE_VERSION {
            return Err(Error::Scene(format!(
                "version: expected {SCENE_VERSION}, found {}",
                self.version
            )));
        }
        if !(self.tolerances.engine > 0.0 && self.tolerances.theorem > 0.0) {
            return Err(Error::Scene(
                "tolerances: engine and theorem must be positive".into(),
            ));
        }
        if self.scene.num_samples == 0 {
            return Err(Error::Scene("scene.num_samples: must be at least 1".into()));
        }
        if !(self.scene.sample_box > 0.0) {
            return Err(Error::Scene("scene.sample_box: must be positive".into()));
        }
        if let SuiteSelection::List(list) = &self.suites {
            if list.is_empty() {
                return Err(Error::Scene("suites: empty list".into()));
            }
        }
        Ok(())
    }

    /// Builds the scene, drawing samples from the seed unless they are listed.
    pub fn build(&self) -> Result<ImmersionScene> {
        let family = self.scene.family_from_params()?;
        match &self.scene.samples {
            Some(samples) => {
                if samples.is_empty() {
                    return Err(Error::Scene("scene.samples: empty list".into()));
                }
                ImmersionScene::new(family, self.scene.n, samples.clone(), self.tolerances)
            }
            None => ImmersionScene::with_random_samples(
                family,
                self.scene.n,
                self.scene.seed,
                self.scene.num_samples,
                self.scene.sample_box,
                self.tolerances,
            ),
        }
    }
}

/// Scene file for a radial quadric chart with explicit base point, basis and samples.
pub fn quadric_scene_file(scene: &ImmersionScene, seed: u64, sample_box: f64) -> Result<SceneFile> {
    let Family::QuadricRadial(chart) = &scene.family else {
        return Err(Error::Scene("not a quadric_radial scene".into()));
    };
    let params = ChartParams {
        quadric: chart.quadric.clone(),
        base_point: Some(chart.base_point.clone()),
        tangent_basis: Some(chart.tangent_basis.clone()),
    };
    Ok(SceneFile {
        version: SCENE_VERSION,
        scene: SceneSpec {
            family: "quadric_radial".into(),
            params: serde_json::to_value(params).map_err(|e| Error::Scene(e.to_string()))?,
            n: scene.n,
            seed,
            num_samples: scene.samples.len(),
            sample_box,
            samples: Some(scene.samples.clone()),
        },
        tolerances: scene.tolerances,
        suites: SuiteSelection::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_hyperbola_file() {
        let file =
            SceneFile::from_json(r#"{"version":1,"scene":{"family":"hyperbola","n":0}}"#).unwrap();
        assert_eq!(file.suites.ids().len(), 9);
        let scene = file.build().unwrap();
        assert_eq!(scene.samples.len(), DEFAULT_NUM_SAMPLES);
        assert!(scene
            .samples
            .iter()
            .all(|u| u[0].abs() <= DEFAULT_SAMPLE_BOX));
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = SceneFile::from_json(
            "{\"version\":1,\n\"scene\":{\"family\":\"hyperbola\",\"n\":\"zero\"}}",
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("scene.n") && err.contains("line 2"), "{err}");
        let err = SceneFile::from_json(r#"{"version":2,"scene":{"family":"hyperbola","n":0}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("version"));
        let err = SceneFile::from_json(r#"{"version":1,"scene":{"family":"torus","n":0}}"#)
            .unwrap()
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("torus"));
        let err = SceneFile::from_json(
            r#"{"version":1,"scene":{"family":"quadric_radial","n":0,"params":{"quadric":{"n":0}}}}"#,
        )
        .unwrap()
        .build()
        .unwrap_err();
        assert!(err.to_string().contains("scene.params"), "{err}");
    }

    #[test]
    fn suite_lists_are_canonicalized() {
        let file = SceneFile::from_json(
            r#"{"version":1,"scene":{"family":"hyperbola","n":0},"suites":["THM_EQUIV","TW_WZORY","THM_EQUIV"]}"#,
        )
        .unwrap();
        assert_eq!(
            file.suites.ids(),
            vec![TheoremId::StructureIdentities, TheoremId::Equivalence]
        );
        assert!(SceneFile::from_json(
            r#"{"version":1,"scene":{"family":"hyperbola","n":0},"suites":"some"}"#
        )
        .is_err());
    }
}
