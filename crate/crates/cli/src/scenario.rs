//! Scenario documents.
//!
//! ```json
//! {
//!   "quality": {"qH": 0.4, "q1": 0.2, "q2": 0.2, "qL": 0.2},
//!   "sender_types": {"kind": "uniform"},
//!   "threshold": 0.5
//! }
//! ```
//!
//! `quality` may instead be `{"Q": .., "sigma": .., "lambda": ..}`;
//! `threshold` may be a number, `{"R1": .., "R2": ..}`, `{"R": .., "b": .., "d": ..}`
//! or `"infinite"`.

use std::fmt;

use reco_core::extensions::{MultiRecCount, ThresholdPair};
use reco_core::{QualityDistribution, QualityParams, RecoError, RecommendationSystem, TypeDistribution};
use serde::{Deserialize, Serialize};

#[allow(non_snake_case)]
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuality {
    qH: Option<f64>,
    q1: Option<f64>,
    q2: Option<f64>,
    qL: Option<f64>,
    Q: Option<f64>,
    sigma: Option<f64>,
    lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "RawQuality")]
pub struct Quality(pub QualityDistribution);

/// Always written in the four-probability form.
struct RawQualityOut([f64; 4]);

impl Serialize for RawQualityOut {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Quality", 4)?;
        st.serialize_field("qH", &self.0[0])?;
        st.serialize_field("q1", &self.0[1])?;
        st.serialize_field("q2", &self.0[2])?;
        st.serialize_field("qL", &self.0[3])?;
        st.end()
    }
}

impl TryFrom<RawQuality> for Quality {
    type Error = String;

    fn try_from(raw: RawQuality) -> Result<Self, String> {
        let direct = [raw.qH, raw.q1, raw.q2, raw.qL];
        let params = [raw.Q, raw.sigma, raw.lambda];
        let any_direct = direct.iter().any(Option::is_some);
        let any_params = params.iter().any(Option::is_some);
        let q = match (any_direct, any_params) {
            (true, true) => return Err("give either qH/q1/q2/qL or Q/sigma/lambda, not both".into()),
            (false, false) => return Err("expected qH/q1/q2/qL or Q/sigma/lambda".into()),
            (true, false) => {
                let [Some(h), Some(a), Some(b), Some(l)] = direct else {
                    return Err("all of qH, q1, q2, qL are required".into());
                };
                QualityDistribution::new(h, a, b, l)
            }
            (false, true) => {
                let [Some(prevalence), Some(sigma), Some(lambda)] = params else {
                    return Err("all of Q, sigma, lambda are required".into());
                };
                QualityParams { prevalence, good_odds: Some(sigma), controversial_odds: Some(lambda) }.to_quality()
            }
        };
        q.map(Quality).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Single(f64),
    Pair(ThresholdPair),
    Multi { r: f64, counts: MultiRecCount },
    Infinite,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawThreshold {
    Number(f64),
    Word(String),
    Object(ThresholdObject),
}

#[allow(non_snake_case)]
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdObject {
    R: Option<f64>,
    R1: Option<f64>,
    R2: Option<f64>,
    b: Option<u32>,
    d: Option<u32>,
}

fn check_r(r: f64) -> Result<f64, String> {
    if r > 0.0 && r < 1.0 {
        Ok(r)
    } else {
        Err(RecoError::ThresholdOutOfRange(r).to_string())
    }
}

impl TryFrom<RawThreshold> for Threshold {
    type Error = String;

    fn try_from(raw: RawThreshold) -> Result<Self, String> {
        match raw {
            RawThreshold::Number(r) => Ok(Threshold::Single(check_r(r)?)),
            RawThreshold::Word(w) if w == "infinite" => Ok(Threshold::Infinite),
            RawThreshold::Word(w) => Err(format!("unknown threshold {w:?}, expected a number, an object or \"infinite\"")),
            RawThreshold::Object(o) => match o {
                ThresholdObject { R: None, R1: Some(r1), R2: Some(r2), b: None, d: None } => {
                    ThresholdPair::new(check_r(r1)?, check_r(r2)?).map(Threshold::Pair).map_err(|e| e.to_string())
                }
                ThresholdObject { R: Some(r), R1: None, R2: None, b: Some(b), d: Some(d) } => {
                    let counts = MultiRecCount::new(b, d).map_err(|e| e.to_string())?;
                    Ok(Threshold::Multi { r: check_r(r)?, counts })
                }
                _ => Err("expected exactly one of {R1, R2} or {R, b, d}".into()),
            },
        }
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Threshold::try_from(RawThreshold::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Threshold {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Threshold::Single(r) => s.serialize_f64(*r),
            Threshold::Infinite => s.serialize_str("infinite"),
            Threshold::Pair(p) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("R1", &p.r1())?;
                m.serialize_entry("R2", &p.r2())?;
                m.end()
            }
            Threshold::Multi { r, counts } => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("R", r)?;
                m.serialize_entry("b", &counts.buys())?;
                m.serialize_entry("d", &counts.dont_buys())?;
                m.end()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub quality: Quality,
    pub sender_types: TypeDistribution,
    #[serde(default)]
    pub receiver_types: Option<TypeDistribution>,
    pub threshold: Threshold,
}

impl Serialize for Scenario {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Scenario", 4)?;
        st.serialize_field("quality", &RawQualityOut(self.quality.0.as_array()))?;
        st.serialize_field("sender_types", &self.sender_types)?;
        if let Some(g) = &self.receiver_types {
            st.serialize_field("receiver_types", g)?;
        }
        st.serialize_field("threshold", &self.threshold)?;
        st.end()
    }
}

#[derive(Debug)]
pub struct ScenarioError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ScenarioError {}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| ScenarioError {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

impl Scenario {
    pub fn quality(&self) -> QualityDistribution {
        self.quality.0
    }

    pub fn receivers(&self) -> &TypeDistribution {
        self.receiver_types.as_ref().unwrap_or(&self.sender_types)
    }

    /// The single-threshold system at `r`.
    pub fn system_at(&self, r: f64) -> Result<RecommendationSystem, RecoError> {
        RecommendationSystem::with_distinct_receivers(self.quality(), self.sender_types.clone(), self.receivers().clone(), r)
    }

    /// The threshold a single-threshold command should use.
    pub fn single_threshold(&self) -> Result<f64, String> {
        match self.threshold {
            Threshold::Single(r) | Threshold::Multi { r, .. } => Ok(r),
            Threshold::Pair(_) => Err("this command needs a single threshold; the scenario has {R1, R2}".into()),
            Threshold::Infinite => Err("this command needs a single threshold; the scenario is \"infinite\"".into()),
        }
    }

    pub fn system(&self) -> Result<RecommendationSystem, String> {
        self.system_at(self.single_threshold()?).map_err(|e| e.to_string())
    }
}
