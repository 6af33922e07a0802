//! Reward laws on `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A point-mass mixture on `[0, 1]`.
///
/// `TwoPoint(p, a, b)` puts mass `p` on `a` and `1 - p` on `b`; it is the
/// canonical form. `Dirac(a)` behaves as `TwoPoint(1, a, _)` and
/// `Bernoulli(p)` as `TwoPoint(p, 1, 0)`.
///
/// Serialized as `{"dirac":0.9}`, `{"bernoulli":0.5}` or
/// `{"twopoint":[p,a,b]}`. Parameters are validated on deserialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", try_from = "RawDistribution")]
pub enum ArmDistribution {
    Dirac(f64),
    Bernoulli(f64),
    TwoPoint(f64, f64, f64),
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum RawDistribution {
    Dirac(f64),
    Bernoulli(f64),
    TwoPoint(f64, f64, f64),
}

impl TryFrom<RawDistribution> for ArmDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Dirac(a) => ArmDistribution::dirac(a),
            RawDistribution::Bernoulli(p) => ArmDistribution::bernoulli(p),
            RawDistribution::TwoPoint(p, a, b) => ArmDistribution::two_point(p, a, b),
        }
    }
}

fn unit(name: &'static str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::param(name, format!("{x} is outside [0, 1]")))
    }
}

impl ArmDistribution {
    pub fn dirac(a: f64) -> Result<Self> {
        Ok(ArmDistribution::Dirac(unit("dirac", a)?))
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Ok(ArmDistribution::Bernoulli(unit("bernoulli", p)?))
    }

    pub fn two_point(p: f64, a: f64, b: f64) -> Result<Self> {
        Ok(ArmDistribution::TwoPoint(
            unit("twopoint.p", p)?,
            unit("twopoint.a", a)?,
            unit("twopoint.b", b)?,
        ))
    }

    /// Canonical `(p, a, b)` form.
    pub fn as_two_point(&self) -> (f64, f64, f64) {
        match *self {
            ArmDistribution::Dirac(a) => (1.0, a, a),
            ArmDistribution::Bernoulli(p) => (p, 1.0, 0.0),
            ArmDistribution::TwoPoint(p, a, b) => (p, a, b),
        }
    }

    /// Success probability if the law is supported on `{0, 1}`.
    pub fn as_bernoulli(&self) -> Option<f64> {
        match *self {
            ArmDistribution::Bernoulli(p) => Some(p),
            ArmDistribution::TwoPoint(p, a, b) if a == 1.0 && b == 0.0 => Some(p),
            ArmDistribution::TwoPoint(p, a, b) if a == 0.0 && b == 1.0 => Some(1.0 - p),
            ArmDistribution::Dirac(a) if a == 0.0 || a == 1.0 => Some(a),
            _ => None,
        }
    }

    pub fn is_dirac(&self) -> bool {
        match *self {
            ArmDistribution::Dirac(_) => true,
            ArmDistribution::Bernoulli(p) => p == 0.0 || p == 1.0,
            ArmDistribution::TwoPoint(p, a, b) => p == 0.0 || p == 1.0 || a == b,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ArmDistribution::Dirac(a) => a,
            ArmDistribution::Bernoulli(p) => p,
            ArmDistribution::TwoPoint(p, a, b) => p * a + (1.0 - p) * b,
        }
    }

    pub fn variance(&self) -> f64 {
        let (p, a, b) = self.as_two_point();
        p * (1.0 - p) * (a - b) * (a - b)
    }

    /// Draws one reward. Every variant consumes exactly one uniform, so
    /// equivalent representations stay aligned on a shared stream.
    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.uniform();
        match *self {
            ArmDistribution::Dirac(a) => a,
            ArmDistribution::Bernoulli(p) => {
                if u < p {
                    1.0
                } else {
                    0.0
                }
            }
            ArmDistribution::TwoPoint(p, a, b) => {
                if u < p {
                    a
                } else {
                    b
                }
            }
        }
    }
}
