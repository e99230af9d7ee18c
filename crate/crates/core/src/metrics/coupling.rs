use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MARGINAL_TOLERANCE: f64 = 1e-10;

/// Nonnegative matrix whose row sums are `row_masses` and column sums are `col_masses`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub row_masses: Vec<f64>,
    pub col_masses: Vec<f64>,
    /// Row-major `rows × cols` entries.
    pub entries: Vec<f64>,
}

impl Coupling {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.col_masses.len() + j]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.col_masses.len().max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// Largest deviation of a row or column sum from its prescribed mass.
    pub fn marginal_error(&self) -> f64 {
        let c = self.col_masses.len();
        let mut err: f64 = 0.0;
        for (i, m) in self.row_masses.iter().enumerate() {
            let s: f64 = self.entries[i * c..(i + 1) * c].iter().sum();
            err = err.max((s - m).abs());
        }
        for (j, m) in self.col_masses.iter().enumerate() {
            let s: f64 = (0..self.row_masses.len()).map(|i| self.entries[i * c + j]).sum();
            err = err.max((s - m).abs());
        }
        err
    }
}

/// Interval-overlap coupling of two block decompositions of `[0, M)`.
///
/// Entry `(i, j)` is the length of the overlap of the `i`-th interval of the
/// first decomposition with the `j`-th interval of the second.
pub fn build_coupling(masses1: &[f64], masses2: &[f64]) -> Result<Coupling> {
    let t1: f64 = masses1.iter().sum();
    let t2: f64 = masses2.iter().sum();
    if (t1 - t2).abs() > MARGINAL_TOLERANCE {
        return Err(Error::MassMismatch {
            left: t1,
            right: t2,
        });
    }
    for (index, &mass) in masses1.iter().chain(masses2).enumerate() {
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::NonPositiveMass { index, mass });
        }
    }
    let (r, c) = (masses1.len(), masses2.len());
    let mut b1 = cumulative(masses1);
    let mut b2 = cumulative(masses2);
    // both decompositions end at the same point
    let end = t1.max(t2);
    if let Some(last) = b1.last_mut() {
        *last = end;
    }
    if let Some(last) = b2.last_mut() {
        *last = end;
    }
    let mut entries = vec![0.0; r * c];
    let (mut i, mut j) = (0, 0);
    while i < r && j < c {
        let overlap = b1[i + 1].min(b2[j + 1]) - b1[i].max(b2[j]);
        if overlap > 0.0 {
            entries[i * c + j] = overlap;
        }
        if b1[i + 1] <= b2[j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    Ok(Coupling {
        row_masses: masses1.to_vec(),
        col_masses: masses2.to_vec(),
        entries,
    })
}

fn cumulative(masses: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(masses.len() + 1);
    let mut acc = 0.0;
    out.push(acc);
    for &m in masses {
        acc += m;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_marginals() {
        let c = build_coupling(&[1.0, 1.0], &[2.0]).unwrap();
        assert_eq!(c.matrix(), vec![vec![1.0], vec![1.0]]);
    }

    #[test]
    fn identity_overlap() {
        let c = build_coupling(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(c.matrix(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn uneven_overlap() {
        let c = build_coupling(&[1.5, 0.5], &[1.0, 1.0]).unwrap();
        assert_eq!(c.matrix(), vec![vec![1.0, 0.5], vec![0.0, 0.5]]);
    }

    #[test]
    fn rejects_mass_mismatch() {
        assert!(matches!(
            build_coupling(&[1.0], &[1.5]),
            Err(Error::MassMismatch { .. })
        ));
    }
}
