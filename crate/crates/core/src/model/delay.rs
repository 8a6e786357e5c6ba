//! Delay distributions and expectation quadrature.
//!
//! A delay is either a point mass or a density restricted to a finite support
//! `[lo, hi]`. Densities with unbounded support are truncated at the
//! `1 - TRUNCATION_MASS` quantile unless an explicit upper bound is given, and
//! are always renormalised on the truncated support with the same composite
//! trapezoid rule that is later used for expectations. Expectations of the
//! constant weight are therefore exactly one up to rounding.

use std::borrow::Cow;

use statrs::distribution::{Continuous, ContinuousCDF, Gamma};

use super::ModelError;

/// Default number of equally spaced quadrature nodes per density.
pub const DEFAULT_NODES: usize = 257;
/// Probability mass discarded when truncating an unbounded density.
pub const TRUNCATION_MASS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureNode {
    /// Delay value.
    pub at: f64,
    /// Probability weight; the weights of one spec sum to one.
    pub weight: f64,
}

/// Shape of an (untruncated) delay density on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityShape {
    /// Flat on the support.
    Uniform,
    Exponential { mean: f64 },
    /// Gamma with `shape ≥ 1` (bounded density at zero).
    Gamma { shape: f64, scale: f64 },
}

impl DensityShape {
    fn validate(&self) -> Result<(), ModelError> {
        match *self {
            DensityShape::Uniform => Ok(()),
            DensityShape::Exponential { mean } if mean.is_finite() && mean > 0.0 => Ok(()),
            DensityShape::Exponential { mean } => Err(ModelError::InvalidDelay(format!(
                "exponential mean must be positive, got {mean}"
            ))),
            DensityShape::Gamma { shape, scale }
                if shape.is_finite() && shape >= 1.0 && scale.is_finite() && scale > 0.0 =>
            {
                Ok(())
            }
            DensityShape::Gamma { shape, scale } => Err(ModelError::InvalidDelay(format!(
                "gamma needs shape >= 1 and scale > 0, got shape {shape}, scale {scale}"
            ))),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        match *self {
            DensityShape::Uniform => 1.0,
            DensityShape::Exponential { mean } => (-x / mean).exp() / mean,
            DensityShape::Gamma { shape, scale } => gamma(shape, scale).pdf(x),
        }
    }

    fn upper_quantile(&self, mass: f64) -> Option<f64> {
        match *self {
            DensityShape::Uniform => None,
            DensityShape::Exponential { mean } => Some(-mean * mass.ln()),
            DensityShape::Gamma { shape, scale } => Some(gamma(shape, scale).inverse_cdf(1.0 - mass)),
        }
    }

    fn rescale(&self, factor: f64) -> Self {
        match *self {
            DensityShape::Uniform => DensityShape::Uniform,
            DensityShape::Exponential { mean } => DensityShape::Exponential { mean: mean * factor },
            DensityShape::Gamma { shape, scale } => DensityShape::Gamma {
                shape,
                scale: scale * factor,
            },
        }
    }

    /// Short textual form used in configuration files.
    pub fn describe(&self) -> String {
        match *self {
            DensityShape::Uniform => "uniform".to_string(),
            DensityShape::Exponential { mean } => format!("exponential:{mean}"),
            DensityShape::Gamma { shape, scale } => format!("gamma:{shape}:{scale}"),
        }
    }

    /// Inverse of [`DensityShape::describe`].
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let parts: Vec<&str> = text.trim().split(':').map(str::trim).collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| ModelError::InvalidDelay(format!("bad number `{s}` in density `{text}`")))
        };
        let shape = match parts.as_slice() {
            ["uniform"] => DensityShape::Uniform,
            ["exponential", mean] => DensityShape::Exponential { mean: num(mean)? },
            ["gamma", shape, scale] => DensityShape::Gamma {
                shape: num(shape)?,
                scale: num(scale)?,
            },
            _ => {
                return Err(ModelError::InvalidDelay(format!(
                    "unknown density `{text}` (expected uniform, exponential:<mean> or gamma:<shape>:<scale>)"
                )))
            }
        };
        shape.validate()?;
        Ok(shape)
    }
}

fn gamma(shape: f64, scale: f64) -> Gamma {
    Gamma::new(shape, 1.0 / scale).expect("gamma parameters validated")
}

/// A density truncated to `[lo, hi]` together with its quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayDensity {
    shape: DensityShape,
    lo: f64,
    hi: f64,
    nodes: Vec<QuadratureNode>,
}

impl DelayDensity {
    /// Builds the truncated, renormalised density. `hi = None` truncates at
    /// the `1 - TRUNCATION_MASS` quantile and is rejected for uniform shapes.
    pub fn new(shape: DensityShape, lo: f64, hi: Option<f64>, node_count: usize) -> Result<Self, ModelError> {
        shape.validate()?;
        if !(lo.is_finite() && lo >= 0.0) {
            return Err(ModelError::InvalidDelay(format!("support lower bound must be >= 0, got {lo}")));
        }
        let hi = match hi {
            Some(hi) => hi,
            None => shape.upper_quantile(TRUNCATION_MASS).ok_or_else(|| {
                ModelError::InvalidDelay("a uniform density needs an explicit upper bound".into())
            })?,
        };
        if !(hi.is_finite() && hi > lo) {
            return Err(ModelError::InvalidDelay(format!("support must satisfy hi > lo, got [{lo}, {hi}]")));
        }
        if node_count < 2 {
            return Err(ModelError::InvalidDelay(format!("need at least 2 nodes, got {node_count}")));
        }

        let step = (hi - lo) / (node_count - 1) as f64;
        let mut nodes: Vec<QuadratureNode> = (0..node_count)
            .map(|k| {
                let at = if k + 1 == node_count { hi } else { lo + k as f64 * step };
                let end = if k == 0 || k + 1 == node_count { 0.5 } else { 1.0 };
                QuadratureNode {
                    at,
                    weight: end * step * shape.pdf(at),
                }
            })
            .collect();
        let mass: f64 = nodes.iter().map(|n| n.weight).sum();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(ModelError::InvalidDelay(format!(
                "density has no mass on [{lo}, {hi}] (integral {mass})"
            )));
        }
        for n in &mut nodes {
            n.weight /= mass;
        }
        Ok(Self { shape, lo, hi, nodes })
    }

    pub fn uniform(lo: f64, hi: f64, node_count: usize) -> Result<Self, ModelError> {
        Self::new(DensityShape::Uniform, lo, Some(hi), node_count)
    }

    pub fn shape(&self) -> DensityShape {
        self.shape
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[QuadratureNode] {
        &self.nodes
    }

    /// Same density with a different number of nodes.
    pub fn with_node_count(&self, node_count: usize) -> Result<Self, ModelError> {
        Self::new(self.shape, self.lo, Some(self.hi), node_count)
    }
}

/// Distribution of one delay.
#[derive(Debug, Clone, PartialEq)]
pub enum DelaySpec {
    PointMass(f64),
    Density(DelayDensity),
}

impl DelaySpec {
    pub fn point(value: f64) -> Result<Self, ModelError> {
        if value.is_finite() && value >= 0.0 {
            Ok(DelaySpec::PointMass(value))
        } else {
            Err(ModelError::InvalidDelay(format!("point delay must be >= 0, got {value}")))
        }
    }

    pub fn nodes(&self) -> Cow<'_, [QuadratureNode]> {
        match self {
            DelaySpec::PointMass(at) => Cow::Owned(vec![QuadratureNode { at: *at, weight: 1.0 }]),
            DelaySpec::Density(d) => Cow::Borrowed(d.nodes()),
        }
    }

    /// Largest delay value with positive weight.
    pub fn horizon(&self) -> f64 {
        match self {
            DelaySpec::PointMass(at) => *at,
            DelaySpec::Density(d) => d.hi(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.nodes().iter().map(|n| n.at * n.weight).sum()
    }

    /// Distribution of `factor · T`.
    pub fn rescale(&self, factor: f64) -> Result<Self, ModelError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(ModelError::InvalidDelay(format!("rescale factor must be positive, got {factor}")));
        }
        Ok(match self {
            DelaySpec::PointMass(at) => DelaySpec::PointMass(at * factor),
            DelaySpec::Density(d) => DelaySpec::Density(DelayDensity::new(
                d.shape.rescale(factor),
                d.lo * factor,
                Some(d.hi * factor),
                d.node_count(),
            )?),
        })
    }
}

/// `E[weight(T)]` for `T` distributed as `spec`.
///
/// Point masses evaluate the weight once, exactly; densities use the composite
/// trapezoid rule on the spec's nodes.
pub fn delay_expectation(spec: &DelaySpec, weight: impl Fn(f64) -> f64) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for node in spec.nodes().iter() {
        let value = weight(node.at);
        if !value.is_finite() {
            return Err(ModelError::NonFiniteWeight { node: node.at, value });
        }
        total += node.weight * value;
    }
    Ok(total)
}

/// The three delays of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySet {
    /// Incubation inside the vector.
    pub vector: DelaySpec,
    /// Incubation inside the human host.
    pub host: DelaySpec,
    /// Duration of naturally acquired immunity.
    pub immunity: DelaySpec,
}

impl DelaySet {
    pub fn points(vector: f64, host: f64, immunity: f64) -> Result<Self, ModelError> {
        Ok(Self {
            vector: DelaySpec::point(vector)?,
            host: DelaySpec::point(host)?,
            immunity: DelaySpec::point(immunity)?,
        })
    }

    /// Total parasite life-cycle horizon `h1 + h2`.
    pub fn cycle_horizon(&self) -> f64 {
        self.vector.horizon() + self.host.horizon()
    }

    /// History length needed by the dynamics: `max(h1 + h2, h3)`.
    pub fn max_lag(&self) -> f64 {
        self.cycle_horizon().max(self.immunity.horizon())
    }

    pub fn rescale(&self, factor: f64) -> Result<Self, ModelError> {
        Ok(Self {
            vector: self.vector.rescale(factor)?,
            host: self.host.rescale(factor)?,
            immunity: self.immunity.rescale(factor)?,
        })
    }
}
