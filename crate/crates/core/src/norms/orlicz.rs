//! Luxemburg gauge built on the sharp norm.
//!
//! Because the underlying functional is a sup, the Orlicz constraint
//! `sup Φ(W|f−c|/λ) ≤ 1` collapses to `Φ(sharp/λ) ≤ 1`, so the gauge is the
//! infimum of λ with that property. We still compute it by bisection on λ
//! rather than by inverting Φ so that custom Young functions only need
//! evaluation, and so the identity `lux = sharp / Φ⁻¹(1)` stays available
//! as an independent cross-check.

use crate::error::Error;
use crate::norms::sharp::sharp_norm;
use crate::space::ExhaustedSpace;
use crate::weights::{Weight, YoungFunction};
use crate::Result;

/// Luxemburg norm of the class of f: inf { λ > 0 : Φ(sharp/λ) ≤ 1 }.
pub fn luxemburg_norm(
    space: &ExhaustedSpace,
    f: &[f64],
    w: &Weight,
    phi: &YoungFunction,
) -> Result<f64> {
    let sharp = sharp_norm(space, f, w)?.value;
    if sharp == 0.0 {
        return Ok(0.0);
    }
    // feasibility of a candidate λ; evaluation overflow means infeasible
    let feasible = |lam: f64| -> bool {
        match phi.eval(sharp / lam) {
            Ok(v) => v <= 1.0,
            Err(_) => false,
        }
    };
    let mut hi = sharp.max(1.0);
    let mut grow = 0;
    while !feasible(hi) {
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::NoRoot(format!(
                "no feasible scale below {hi:e} for the Orlicz gauge"
            )));
        }
    }
    let mut lo = hi;
    while lo > f64::MIN_POSITIVE * 4.0 && feasible(lo / 2.0) {
        lo /= 2.0;
    }
    lo /= 2.0; // lo infeasible (or at the floor), hi feasible
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(hi)
}
