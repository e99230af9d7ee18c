use serde::{Deserialize, Serialize};

/// The map `λ ↦ μ({D_W > λ})` as a right-continuous step function.
///
/// Stored as degree levels with the mass carrying each level, sorted by
/// decreasing degree. For step graphons the levels are the exact block
/// degrees; for analytic families they are quadrature values on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    levels: Vec<(f64, f64)>,
    exact: bool,
}

impl DegreeProfile {
    pub fn from_levels(mut levels: Vec<(f64, f64)>, exact: bool) -> Self {
        levels.retain(|&(_, m)| m > 0.0);
        levels.sort_by(|a, b| b.0.total_cmp(&a.0));
        Self { levels, exact }
    }

    /// `μ({D_W > λ})`.
    pub fn mass_above(&self, lambda: f64) -> f64 {
        self.levels
            .iter()
            .take_while(|&&(d, _)| d > lambda)
            .map(|&(_, m)| m)
            .sum()
    }

    /// Degree levels `(D, mass)` in decreasing order of `D`.
    pub fn levels(&self) -> &[(f64, f64)] {
        &self.levels
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `∫_0^∞ μ({D_W > λ}) dλ`, which equals `∫ max(D_W, 0) dμ`.
    pub fn layer_cake_integral(&self) -> f64 {
        self.levels.iter().map(|&(d, m)| d.max(0.0) * m).sum()
    }

    /// `∫ D_W^k dμ` over the tabulated levels.
    pub fn moment(&self, k: u32) -> f64 {
        self.levels
            .iter()
            .map(|&(d, m)| d.powi(k as i32) * m)
            .sum()
    }

    /// Points where the profile jumps, in increasing order.
    pub fn discontinuities(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.levels.iter().map(|&(d, _)| d).collect();
        pts.reverse();
        pts.dedup();
        pts
    }
}
