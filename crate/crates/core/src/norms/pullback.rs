//! Transport of sharp norms along a coarse map between exhausted spaces.
//!
//! If heights satisfy `h_A ≤ A₀·h_B∘φ + B₀` then polynomial weights compare
//! by `(1+h_A)^p ≤ [(1+A₀+|B₀|)(1+h_B∘φ)]^p`, so the pulled-back class obeys
//! `sharp_A(f∘φ) ≤ (1+A₀+|B₀|)^p · sharp_B(f)` — evaluated at B's optimal
//! center and then improved by A's own infimum, which is why the inequality
//! is exact on samples. The affine coefficients are either fitted from the
//! height graph or supplied and verified pointwise.

use crate::error::Error;
use crate::norms::sharp::sharp_norm;
use crate::space::{fit_coarse_affine, ExhaustedSpace};
use crate::weights::Weight;
use crate::Result;

#[derive(Debug, Clone)]
pub struct PullbackCheck {
    /// Slope of the height comparison h_A ≤ a0·h_B∘φ + b0.
    pub a0: f64,
    pub b0: f64,
    /// (1 + a0 + |b0|)^p.
    pub constant: f64,
    /// sharp_A(f∘φ).
    pub lhs: f64,
    /// sharp_B(f).
    pub rhs_sharp: f64,
    /// constant · sharp_B(f).
    pub rhs_bound: f64,
}

/// Checks the transported norm bound. `map[x]` is the index in `space_b` of
/// the image of sample point x. `star`, when given, is a claimed `(A₀, B₀)`
/// pair and is verified against every point; otherwise the pair is fitted
/// (slope from the upper affine envelope of the height graph, floor 1, then
/// the exact worst-case intercept).
pub fn pullback_check(
    space_a: &ExhaustedSpace,
    space_b: &ExhaustedSpace,
    map: &[usize],
    f_on_b: &[f64],
    w: &Weight,
    star: Option<(f64, f64)>,
) -> Result<PullbackCheck> {
    space_b.check_sample(f_on_b)?;
    if map.len() != space_a.len() {
        return Err(Error::input(format!(
            "map has {} entries for a {}-point domain",
            map.len(),
            space_a.len()
        )));
    }
    if let Some(bad) = map.iter().find(|ix| **ix >= space_b.len()) {
        return Err(Error::input(format!(
            "map image index {bad} out of range for a {}-point target",
            space_b.len()
        )));
    }
    let p = match w {
        Weight::Polynomial { p } => *p,
        _ => {
            return Err(Error::input(
                "norm transport is proved for polynomial weights; got a different scale",
            ))
        }
    };
    let hb_pulled: Vec<f64> = map.iter().map(|&ix| space_b.h[ix]).collect();
    let (a0, b0) = match star {
        Some((a, b)) => {
            if !a.is_finite() || !b.is_finite() || a <= 0.0 {
                return Err(Error::input(format!("claimed pair needs A0 > 0 finite, got ({a}, {b})")));
            }
            for x in 0..space_a.len() {
                if space_a.h[x] > a * hb_pulled[x] + b + 1e-9 {
                    return Err(Error::assertion(format!(
                        "claimed pair (A0={a}, B0={b}) fails at id {}: h_A = {} > {}",
                        space_a.ids[x],
                        space_a.h[x],
                        a * hb_pulled[x] + b
                    )));
                }
            }
            (a, b)
        }
        None => {
            let fit = fit_coarse_affine(&hb_pulled, &space_a.h)?;
            let a = fit.upper_slope.max(1.0);
            // exact worst-case intercept so the comparison holds pointwise
            let b = space_a
                .h
                .iter()
                .zip(&hb_pulled)
                .map(|(ha, hb)| ha - a * hb)
                .fold(f64::NEG_INFINITY, f64::max);
            (a, b)
        }
    };
    let constant = (1.0 + a0 + b0.abs()).powf(p);
    let f_pulled: Vec<f64> = map.iter().map(|&ix| f_on_b[ix]).collect();
    let lhs = sharp_norm(space_a, &f_pulled, w)?.value;
    let rhs_sharp = sharp_norm(space_b, f_on_b, w)?.value;
    let rhs_bound = constant * rhs_sharp;
    if lhs > rhs_bound + 1e-9 * (1.0 + rhs_bound) {
        return Err(Error::assertion(format!(
            "transport bound failed: sharp_A(f∘φ) = {lhs} > {rhs_bound}"
        )));
    }
    Ok(PullbackCheck { a0, b0, constant, lhs, rhs_sharp, rhs_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heights(n: usize, step: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * step).collect()
    }

    #[test]
    fn identity_map_is_free() {
        let h = heights(501, 0.1);
        let a = ExhaustedSpace::from_heights(h.clone()).unwrap();
        let b = ExhaustedSpace::from_heights(h).unwrap();
        let map: Vec<usize> = (0..a.len()).collect();
        let f: Vec<f64> = a.h.iter().map(|x| (x * 0.9).sin() / (1.0 + x)).collect();
        let w = Weight::polynomial(2.0).unwrap();
        let chk = pullback_check(&a, &b, &map, &f, &w, None).unwrap();
        assert!((chk.lhs - chk.rhs_sharp).abs() < 1e-12);
        assert!(chk.lhs <= chk.rhs_bound + 1e-12);
        assert!((chk.a0 - 1.0).abs() < 1e-6);
        assert!(chk.b0.abs() < 1e-6);
    }

    #[test]
    fn affine_height_change_fits_exactly() {
        // h_A = 2·h_B + 3 on the nose
        let hb = heights(301, 0.05);
        let ha: Vec<f64> = hb.iter().map(|t| 2.0 * t + 3.0).collect();
        let a = ExhaustedSpace::from_heights(ha).unwrap();
        let b = ExhaustedSpace::from_heights(hb).unwrap();
        let map: Vec<usize> = (0..a.len()).collect();
        let f: Vec<f64> = b.h.iter().map(|t| 1.0 / (1.0 + t * t)).collect();
        let w = Weight::polynomial(1.0).unwrap();
        let chk = pullback_check(&a, &b, &map, &f, &w, None).unwrap();
        assert!((chk.a0 - 2.0).abs() < 1e-9, "a0 = {}", chk.a0);
        assert!((chk.b0 - 3.0).abs() < 1e-9, "b0 = {}", chk.b0);
        assert!((chk.constant - 6.0).abs() < 1e-7);
        assert!(chk.lhs <= chk.rhs_bound + 1e-9);
    }

    #[test]
    fn claimed_pair_is_verified() {
        let hb = heights(101, 0.1);
        let ha: Vec<f64> = hb.iter().map(|t| 2.0 * t).collect();
        let a = ExhaustedSpace::from_heights(ha).unwrap();
        let b = ExhaustedSpace::from_heights(hb).unwrap();
        let map: Vec<usize> = (0..a.len()).collect();
        let f = vec![0.0; b.len()];
        let w = Weight::polynomial(1.0).unwrap();
        assert!(pullback_check(&a, &b, &map, &f, &w, Some((2.0, 0.0))).is_ok());
        let err = pullback_check(&a, &b, &map, &f, &w, Some((1.0, 0.5))).unwrap_err();
        assert!(matches!(err, Error::Assertion(_)));
    }

    #[test]
    fn map_shape_is_validated() {
        let a = ExhaustedSpace::from_heights(heights(10, 1.0)).unwrap();
        let b = ExhaustedSpace::from_heights(heights(5, 1.0)).unwrap();
        let w = Weight::polynomial(1.0).unwrap();
        let f = vec![0.0; 5];
        assert!(pullback_check(&a, &b, &[0, 1], &f, &w, None).is_err());
        assert!(pullback_check(&a, &b, &vec![9; 10], &f, &w, None).is_err());
    }

    #[test]
    fn exponential_weight_is_refused() {
        let a = ExhaustedSpace::from_heights(heights(10, 1.0)).unwrap();
        let b = ExhaustedSpace::from_heights(heights(10, 1.0)).unwrap();
        let map: Vec<usize> = (0..10).collect();
        let f = vec![0.0; 10];
        let w = Weight::exponential(1.0).unwrap();
        assert!(pullback_check(&a, &b, &map, &f, &w, None).is_err());
    }
}
