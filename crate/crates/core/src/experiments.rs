//! Convergence tables over a family of spaces against a fixed target.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pointed::{rho0, rho_pointed, QuadratureScheme};
use crate::pyramid::{rho, slice_converge_report, PointedHandle, PyramidHandle, RhoParams};
use crate::scalar::Scalar;
use crate::zoo::Generated;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqMetric {
    Rho,
    /// Pointed `ρ` at the canonical basepoints.
    RhoPointed,
    Rho0,
    /// Slice Hausdorff distance at a fixed `(N, D)`.
    Slice,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub label: String,
    pub lo: f64,
    pub hi: f64,
    pub hi_certified: f64,
    pub certified: bool,
    pub seconds: f64,
}

/// One row per term: the distance from the term to `target`.
pub fn sequence_table<T: Scalar>(
    terms: &[(String, Generated<T>)],
    target: &Generated<T>,
    metric: SeqMetric,
    p: &RhoParams,
    slice: (usize, f64),
) -> Result<Vec<SequenceRow>> {
    let mut rows = Vec::with_capacity(terms.len());
    for (label, g) in terms {
        let start = Instant::now();
        let (lo, hi, hi_cert, certified) = match metric {
            SeqMetric::Rho => {
                let e = rho(&PyramidHandle::Finite(g.space.clone()), &PyramidHandle::Finite(target.space.clone()), p)?;
                (e.total.lo, e.total.hi, e.total_hi_certified, e.certified)
            }
            SeqMetric::RhoPointed => {
                let e = rho_pointed(&PointedHandle::Finite(g.pointed()), &PointedHandle::Finite(target.pointed()), p)?;
                (e.total.lo, e.total.hi, e.total_hi_certified, e.certified)
            }
            SeqMetric::Rho0 => {
                let r = rho0(&g.pointed(), &target.pointed(), &QuadratureScheme::default(), p)?;
                let (lo, hi) = (T::lit(r.total.lo), T::lit(r.total.hi));
                (lo, hi, hi, r.certified)
            }
            SeqMetric::Slice => {
                let b = slice_converge_report(
                    &[PyramidHandle::Finite(g.space.clone())],
                    &PyramidHandle::Finite(target.space.clone()),
                    slice.0,
                    T::lit(slice.1),
                    p,
                )?[0];
                (b.value.lo, b.value.hi, b.hi_certified, b.certified)
            }
        };
        rows.push(SequenceRow {
            label: label.clone(),
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
            hi_certified: hi_cert.to_f64_lossy(),
            certified,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ExtReal;
    use crate::zoo::{generate, SpaceRecipe};

    fn sigma(n: usize) -> Generated<f64> {
        generate(&SpaceRecipe::Sigma { n, d: ExtReal::Finite(1.0) }).unwrap()
    }

    #[test]
    fn sigma_trend() {
        let terms: Vec<_> = (1..=4).map(|n| (format!("sigma({n})"), sigma(n))).collect();
        let rows = sequence_table(&terms, &sigma(6), SeqMetric::Rho, &RhoParams::default(), (4, 1.0)).unwrap();
        for (n, r) in (1..=4).zip(&rows) {
            let want = 0.5f64.powi(n + 1);
            assert!(r.lo <= want + 1e-9 && want <= r.hi + 1e-9, "{n}: {r:?}");
        }
        let constant = vec![("a".to_string(), sigma(3)), ("b".to_string(), sigma(3))];
        for m in [SeqMetric::Rho, SeqMetric::Slice, SeqMetric::RhoPointed] {
            let rows = sequence_table(&constant, &sigma(3), m, &RhoParams::default(), (3, 1.0)).unwrap();
            assert!(rows.iter().all(|r| r.lo == 0.0));
        }
    }
}
