//! Graphon representations over σ-finite spaces.

pub mod analytic;
pub mod profile;
pub mod spec;
pub mod step;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

pub use analytic::{
    AnalyticGraphon, Boundary, Components, Discretization, Family, IntervalBlocks, MixedMembership,
    PowerLaw, SimplexMeasure, Truncation, TruncationSpec,
};
pub use profile::DegreeProfile;
pub use spec::{ComponentsSpec, GraphonSpec};
pub use step::{Partition, StepGraphon, TailTruncation};

use crate::error::{Error, Result};
use crate::quadrature::Estimate;

/// Either a step graphon or a member of one of the analytic families.
#[derive(Debug, Clone, PartialEq)]
pub enum Graphon {
    Step(StepGraphon),
    Analytic(AnalyticGraphon),
}

impl From<StepGraphon> for Graphon {
    fn from(w: StepGraphon) -> Self {
        Graphon::Step(w)
    }
}

impl From<AnalyticGraphon> for Graphon {
    fn from(w: AnalyticGraphon) -> Self {
        Graphon::Analytic(w)
    }
}

impl Graphon {
    /// `W(x, y)`; features are `[x]` on ℝ₊ and `[w_1, …, w_K, x]` for
    /// mixed membership. Zero outside the (truncated) support.
    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Graphon::Step(w) => w.evaluate(x[0], y[0]),
            Graphon::Analytic(w) => w.evaluate(x, y),
        }
    }

    pub fn l1_norm(&self) -> Estimate {
        match self {
            Graphon::Step(w) => Estimate::exact(w.l1_norm()),
            Graphon::Analytic(w) => w.l1_norm(),
        }
    }

    pub fn degree_profile(&self) -> Result<DegreeProfile> {
        match self {
            Graphon::Step(w) => Ok(w.degree_profile()),
            Graphon::Analytic(w) => w.degree_profile(),
        }
    }

    pub fn truncate_tail(&self, eps: f64) -> Result<TailTruncation<Graphon>> {
        match self {
            Graphon::Step(w) => {
                let t = w.truncate_tail(eps)?;
                Ok(TailTruncation {
                    mass_bound: t.mass_bound,
                    graphon: Graphon::Step(t.graphon),
                    residual: t.residual,
                })
            }
            Graphon::Analytic(w) => {
                let t = w.truncate_tail(eps)?;
                Ok(TailTruncation {
                    mass_bound: t.mass_bound,
                    graphon: Graphon::Analytic(t.graphon),
                    residual: t.residual,
                })
            }
        }
    }

    pub fn ambient_infinite(&self) -> bool {
        match self {
            Graphon::Step(w) => w.ambient_infinite(),
            Graphon::Analytic(w) => w.ambient_infinite(),
        }
    }

    pub fn feature_dim(&self) -> usize {
        match self {
            Graphon::Step(_) => 1,
            Graphon::Analytic(w) => w.feature_dim(),
        }
    }

    pub fn as_step(&self) -> Option<&StepGraphon> {
        match self {
            Graphon::Step(w) => Some(w),
            Graphon::Analytic(_) => None,
        }
    }

    /// Rejects kernels with values outside `[0, 1]`.
    ///
    /// Analytic families are probability-valued by construction.
    pub fn check_probability_valued(&self) -> Result<()> {
        match self {
            Graphon::Step(w) => w.check_probability_valued(),
            Graphon::Analytic(_) => Ok(()),
        }
    }

    /// Finite-mass region from which vertex features are drawn.
    ///
    /// For step graphons this is the union of the explicit blocks; for the
    /// analytic families it is the truncated support.
    pub fn sampling_region(&self) -> FeatureRegion {
        match self {
            Graphon::Step(w) => FeatureRegion::Interval {
                len: w.total_mass(),
            },
            Graphon::Analytic(w) => match w.family() {
                Family::CaronFox { .. } | Family::RegionIndicator { .. } => {
                    FeatureRegion::Interval { len: w.x_max() }
                }
                Family::InfiniteBlock(b) => FeatureRegion::Intervals(b.intervals().to_vec()),
                Family::MixedMembership(mm) => FeatureRegion::SimplexProduct {
                    simplex: mm.simplex().clone(),
                    len: match mm.components() {
                        Components::Step { masses, .. } => masses.iter().sum(),
                        Components::CaronFox { .. } => w.x_max(),
                    },
                },
            },
        }
    }

    pub fn to_spec(&self) -> GraphonSpec {
        GraphonSpec::from(self)
    }

    /// Step form: the graphon itself, or the exact flattening of block families.
    pub fn to_step(&self) -> Result<StepGraphon> {
        match self {
            Graphon::Step(w) => Ok(w.clone()),
            Graphon::Analytic(w) => w.flatten_to_line(),
        }
    }
}

/// Region of feature space with its (finite) measure.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureRegion {
    /// `[0, len]`.
    Interval { len: f64 },
    /// Union of disjoint intervals.
    Intervals(Vec<(f64, f64)>),
    /// Simplex measure × `[0, len]`.
    SimplexProduct { simplex: SimplexMeasure, len: f64 },
}

impl FeatureRegion {
    pub fn mass(&self) -> f64 {
        match self {
            FeatureRegion::Interval { len } => *len,
            FeatureRegion::Intervals(iv) => iv.iter().map(|&(a, b)| b - a).sum(),
            FeatureRegion::SimplexProduct { simplex, len } => simplex.total_mass() * len,
        }
    }

    /// Draws a feature point from the normalized measure on the region.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let mass = self.mass();
        if !(mass > 0.0) {
            return Err(Error::InvalidArgument(
                "cannot draw from a region of zero mass".into(),
            ));
        }
        Ok(match self {
            FeatureRegion::Interval { len } => vec![rng.random::<f64>() * len],
            FeatureRegion::Intervals(iv) => {
                let mut u = rng.random::<f64>() * mass;
                let mut point = iv.last().map_or(0.0, |&(_, b)| b);
                for &(a, b) in iv {
                    if u < b - a {
                        point = a + u;
                        break;
                    }
                    u -= b - a;
                }
                vec![point]
            }
            FeatureRegion::SimplexProduct { simplex, len } => {
                let mut point = match simplex {
                    SimplexMeasure::Uniform { k } => {
                        let e: Vec<f64> = (0..*k).map(|_| Exp1.sample(rng)).collect();
                        let s: f64 = e.iter().sum();
                        e.into_iter().map(|x| x / s).collect()
                    }
                    SimplexMeasure::Cells { weights, masses } => {
                        let total: f64 = masses.iter().sum();
                        let mut u = rng.random::<f64>() * total;
                        let mut pick = weights.len() - 1;
                        for (i, m) in masses.iter().enumerate() {
                            if u < *m {
                                pick = i;
                                break;
                            }
                            u -= m;
                        }
                        weights[pick].clone()
                    }
                };
                point.push(rng.random::<f64>() * len);
                point
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn interval_union_samples_stay_inside() {
        let region = FeatureRegion::Intervals(vec![(0.0, 1.0), (5.0, 7.0)]);
        assert_eq!(region.mass(), 3.0);
        let mut rng = stream_rng(1, 0);
        let mut hits_second = 0;
        for _ in 0..3000 {
            let x = region.sample(&mut rng).unwrap()[0];
            assert!((0.0..1.0).contains(&x) || (5.0..7.0).contains(&x));
            hits_second += (x >= 5.0) as usize;
        }
        // expected 2000, sd ≈ 26
        assert!((hits_second as f64 - 2000.0).abs() < 150.0);
    }

    #[test]
    fn simplex_samples_are_probability_vectors() {
        let region = FeatureRegion::SimplexProduct {
            simplex: SimplexMeasure::Uniform { k: 3 },
            len: 2.0,
        };
        let mut rng = stream_rng(2, 0);
        for _ in 0..100 {
            let p = region.sample(&mut rng).unwrap();
            assert_eq!(p.len(), 4);
            assert!((p[..3].iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!((0.0..2.0).contains(&p[3]));
        }
    }

    #[test]
    fn zero_region_is_rejected() {
        let region = FeatureRegion::Interval { len: 0.0 };
        assert!(region.sample(&mut stream_rng(0, 0)).is_err());
    }
}
