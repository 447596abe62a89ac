//! Pointed slices, `ρ` between pointed spaces, and `ρ₀`, the integral of
//! `ρ` between `1/r`-rescaled balls against `r e^{-r²} dr`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::metric::PointedSpace;
use crate::order::precsim_pointed;
use crate::pyramid::{slice_hausdorff, PointedHandle, RhoEstimate, RhoParams, Side};
use crate::scalar::Scalar;

/// `ρ((X,x₀),(Y,y₀))` over pointed slices with base-preserving domination.
pub fn rho_pointed<T: Scalar>(
    a: &PointedHandle<T>,
    b: &PointedHandle<T>,
    p: &RhoParams,
) -> Result<RhoEstimate<T>> {
    p.validate()?;
    let per = (1..=p.n_max)
        .map(|n| (n, slice_hausdorff(Side::pointed(a), Side::pointed(b), n, T::lit(n as f64), p)))
        .collect();
    Ok(RhoEstimate::assemble(per))
}

/// `(r⁻¹ B(x₀, r), x₀)`.
pub fn rescaled_ball<T: Scalar>(x: &PointedSpace<T>, r: T) -> PointedSpace<T> {
    x.ball(r).scale(T::one() / r)
}

/// `ρ` between the `1/r`-rescaled closed balls of radius `r`.
pub fn rescaled_ball_rho<T: Scalar>(
    a: &PointedSpace<T>,
    b: &PointedSpace<T>,
    r: T,
    p: &RhoParams,
) -> Result<RhoEstimate<T>> {
    if !(r > T::zero()) {
        return Err(Error::InvalidParameter("ball radius must be positive".into()));
    }
    let ha = PointedHandle::Finite(rescaled_ball(a, r));
    let hb = PointedHandle::Finite(rescaled_ball(b, r));
    rho_pointed(&ha, &hb, p)
}

/// Radii at which the integrand is evaluated; cells between consecutive
/// radii carry the mass of `r e^{-r²} dr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureScheme {
    pub r_min: f64,
    pub r_max: f64,
    pub radii: Vec<f64>,
}

impl Default for QuadratureScheme {
    fn default() -> Self {
        Self::geometric(0.05, 3.0, 32).expect("valid defaults")
    }
}

impl QuadratureScheme {
    pub fn geometric(r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) || count < 2 {
            return Err(Error::InvalidParameter("need 0 < r_min < r_max and at least 2 nodes".into()));
        }
        let q = (r_max / r_min).powf(1.0 / (count - 1) as f64);
        let mut radii: Vec<f64> = (0..count).map(|i| r_min * q.powi(i as i32)).collect();
        radii[count - 1] = r_max;
        Ok(QuadratureScheme { r_min, r_max, radii })
    }

    /// `∫_{r_i}^{r_{i+1}} r e^{-r²} dr` per cell.
    pub fn cell_masses(&self) -> Vec<f64> {
        self.radii.windows(2).map(|w| 0.5 * ((-w[0] * w[0]).exp() - (-w[1] * w[1]).exp())).collect()
    }

    /// Trapezoid weight of every node: half of each adjacent cell.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let m = self.cell_masses();
        self.radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let left = if i > 0 { m[i - 1] } else { 0.0 };
                let right = m.get(i).copied().unwrap_or(0.0);
                (r, 0.5 * (left + right))
            })
            .collect()
    }

    /// Mass below `r_min` times the integrand bound 2.
    pub fn lower_tail(&self) -> f64 {
        1.0 - (-self.r_min * self.r_min).exp()
    }

    /// Mass above `r_max` times the integrand bound 2.
    pub fn upper_tail(&self) -> f64 {
        (-self.r_max * self.r_max).exp()
    }
}

/// Variation allowed between two radii: `8 |1 - r₂/r₁|`, symmetrized.
pub fn ball_modulus(r1: f64, r2: f64) -> f64 {
    8.0 * (1.0 - r2 / r1).abs().max((1.0 - r1 / r2).abs())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeValue {
    pub r: f64,
    pub lo: f64,
    pub hi: f64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rho0Report {
    pub nodes: Vec<NodeValue>,
    pub lower_tail: f64,
    pub upper_tail: f64,
    pub total: Interval<f64>,
    pub certified: bool,
}

impl Rho0Report {
    /// `{nodes: [{r, lo, hi}], tails, total_lo, total_hi}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "nodes": self.nodes.iter().map(|n| json!({"r": n.r, "lo": n.lo, "hi": n.hi})).collect::<Vec<_>>(),
            "tails": {"lower": self.lower_tail, "upper": self.upper_tail},
            "total_lo": self.total.lo,
            "total_hi": self.total.hi,
            "certified": self.certified,
        })
    }
}

/// `ρ₀` enclosed from node intervals. Between nodes the integrand is
/// bounded through [`ball_modulus`] and the range `[0, 2]`; the two tails
/// contribute to the upper end only.
pub fn rho0<T: Scalar>(
    a: &PointedSpace<T>,
    b: &PointedSpace<T>,
    scheme: &QuadratureScheme,
    p: &RhoParams,
) -> Result<Rho0Report> {
    if scheme.radii.len() < 2 || scheme.radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("quadrature radii must increase".into()));
    }
    let nodes: Vec<NodeValue> = scheme
        .radii
        .par_iter()
        .map(|&r| {
            let est = rescaled_ball_rho(a, b, T::lit(r), p)?;
            Ok(NodeValue {
                r,
                lo: est.total.lo.to_f64_lossy().clamp(0.0, 2.0),
                hi: est.total.hi.to_f64_lossy().clamp(0.0, 2.0),
                certified: est.certified,
            })
        })
        .collect::<Result<_>>()?;
    let masses = scheme.cell_masses();
    let (mut lo, mut hi) = (0.0, 0.0);
    for (i, w) in masses.iter().enumerate() {
        let (u, v) = (&nodes[i], &nodes[i + 1]);
        let m = ball_modulus(u.r, v.r);
        lo += w * (u.lo.max(v.lo) - m).max(0.0);
        hi += w * (u.hi.min(v.hi) + m).min(2.0);
    }
    let (lt, ut) = (scheme.lower_tail(), scheme.upper_tail());
    Ok(Rho0Report {
        certified: nodes.iter().all(|n| n.certified),
        nodes,
        lower_tail: lt,
        upper_tail: ut,
        total: Interval::new(lo, (hi + lt + ut).max(lo)),
    })
}

/// Finite proxy for strong equivalence: the balls agree up to `∼` at every
/// quadrature radius.
pub fn strongly_equivalent_at<T: Scalar>(
    a: &PointedSpace<T>,
    b: &PointedSpace<T>,
    scheme: &QuadratureScheme,
    tol: T,
) -> Result<bool> {
    for &r in &scheme.radii {
        let (ba, bb) = (a.ball(T::lit(r)), b.ball(T::lit(r)));
        if !(precsim_pointed(&ba, &bb, tol)? && precsim_pointed(&bb, &ba, tol)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
