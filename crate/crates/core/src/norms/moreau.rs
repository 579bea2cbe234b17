//! Moreau envelope on the sample: inf-convolution with a quadratic.
//!
//! `M_λf(x) = min_y f(y) + d(x,y)²/(2λ)` smooths f from below while keeping
//! `M_λf ≤ f` pointwise and `M_λf → f` as λ → 0 wherever f is continuous on
//! the sample scale. With coordinates present the metric is Euclidean;
//! otherwise the caller supplies a distance matrix. Quadratic cost in the
//! sample size — fine at the grid sizes we run.

use crate::error::Error;
use crate::space::ExhaustedSpace;
use crate::Result;

/// Pointwise Moreau envelope. `distances[i][j]` are metric distances (not
/// squared); omit it to use Euclidean distance on `space.coords`.
pub fn moreau_envelope(
    space: &ExhaustedSpace,
    f: &[f64],
    lambda: f64,
    distances: Option<&[Vec<f64>]>,
) -> Result<Vec<f64>> {
    space.check_sample(f)?;
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::input(format!("lambda must be positive, got {lambda}")));
    }
    let n = space.len();
    let d2 = |x: usize, y: usize| -> Result<f64> {
        if let Some(mat) = distances {
            if mat.len() != n || mat[x].len() != n {
                return Err(Error::input("distance matrix shape does not match the sample"));
            }
            let d = mat[x][y];
            if !d.is_finite() || d < 0.0 {
                return Err(Error::input("distances must be finite and >= 0"));
            }
            Ok(d * d)
        } else {
            let coords = space.coords.as_ref().ok_or_else(|| {
                Error::input("no coordinates on the space; pass an explicit distance matrix")
            })?;
            let (a, b) = (&coords[x], &coords[y]);
            Ok(a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum())
        }
    };
    let mut out = Vec::with_capacity(n);
    for x in 0..n {
        let mut best = f64::INFINITY;
        for y in 0..n {
            let cand = f[y] + d2(x, y)? / (2.0 * lambda);
            if cand < best {
                best = cand;
            }
        }
        out.push(best);
    }
    Ok(out)
}
