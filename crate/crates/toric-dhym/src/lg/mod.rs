//! Mirror Landau-Ginzburg side: the potential W = Σ aᵢ x^{vᵢ}, the
//! I-function and Γ̂-integral, periods over the positive real cycle,
//! critical points and the residue pairing.

mod critical;
mod ifunc;
mod model;
mod quadrature;

pub use critical::{critical_points, critical_points_with, newton_polytope_volume, residue_pairing, LaurentPoly};
pub use ifunc::{
    asymptotic_sweep, enumerate_curve_classes, gamma_lhs, i_function, AsymptoticSweep, CurveClass, IFunction,
};
pub use model::{build_lg, check_relations, LgModel, NovikovPoint, RelationCheck};
pub use quadrature::{positive_cycle_period, positive_cycle_period_with};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodMethod {
    Quadrature,
    GammaLhs,
    Saddle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodResult {
    pub value: Complex64,
    pub method: PeriodMethod,
    pub error_estimate: f64,
    /// Novikov truncation order for series methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// Factor applied to the cohomological side; the positive-cycle integral
    /// needs none.
    pub normalization: f64,
    /// Refinement level reached by quadrature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
}

/// Gaussian elimination with partial pivoting; None when singular.
pub(crate) fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[p][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col..n {
                let t = f * a[col][c];
                a[r][c] -= t;
            }
            let t = f * b[col];
            b[r] -= t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

pub(crate) fn det_complex(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let Some(p) = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())) else {
            return Complex64::new(0.0, 0.0);
        };
        if a[p][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != col {
            a.swap(col, p);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let t = f * a[col][c];
                a[r][c] -= t;
            }
        }
    }
    det
}
