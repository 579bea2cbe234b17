//! Weighted L^q norms and the sup-into-L^q comparison.
//!
//! The comparison layers the measure by annuli: on each band the weight is at
//! least its value at the inner radius, so `∫ (|f−L|)^q dμ` is controlled by
//! `sup W|f−L|` times a volume series `Σ μ(A_k)(1+R_k)^{−pq}`. The series is
//! summable exactly when pq exceeds the volume growth exponent — that is the
//! embedding criterion this module reports on, together with the concrete
//! layered constant on the supplied ladder.

use crate::error::Error;
use crate::norms::sharp::fixed_norm;
use crate::space::{ExhaustedSpace, VolumeGrowth};
use crate::weights::Weight;
use crate::Result;

/// `( Σ (W(h)|f−L|)^q μ )^{1/q}` over the sample.
pub fn weighted_lq_norm(
    space: &ExhaustedSpace,
    f: &[f64],
    w: &Weight,
    l: f64,
    q: f64,
) -> Result<f64> {
    space.check_sample(f)?;
    if !l.is_finite() {
        return Err(Error::input(format!("centering constant must be finite, got {l}")));
    }
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::input(format!("exponent q must be positive, got {q}")));
    }
    let wv = w.eval_many(&space.h)?;
    let mut acc = 0.0_f64;
    for i in 0..f.len() {
        acc += (wv[i] * (f[i] - l).abs()).powf(q) * space.mu[i];
    }
    if !acc.is_finite() {
        return Err(Error::input("weighted L^q sum overflowed; lower q or the weight order"));
    }
    Ok(acc.powf(1.0 / q))
}

#[derive(Debug, Clone)]
pub struct LqEmbedding {
    pub p_times_q: f64,
    pub gamma: f64,
    /// pq > γ: the layered series stabilizes as the ladder extends.
    pub exponent_ok: bool,
    /// μ{h≤R₀} + Σ μ(A_k)(1+R_k)^{−pq} + μ{h>R_last}(1+R_last)^{−pq}.
    pub layered_sum: f64,
    /// layered_sum^{1/q}: multiplies the sup norm in the comparison.
    pub layered_constant: f64,
    /// Unweighted L^q norm of f − L on the sample.
    pub unweighted_lq: f64,
    /// Weighted sup norm of f − L.
    pub sup_norm: f64,
    /// unweighted_lq ≤ layered_constant · sup_norm, which holds on samples
    /// whenever the fit's c_fit honestly dominates the band volumes.
    pub bound_ok: bool,
}

/// Compares the unweighted L^q norm against the weighted sup norm through
/// the layered volume series on `growth.ladder`. The weight must be of
/// polynomial order for the layering to close.
pub fn lq_embedding_check(
    space: &ExhaustedSpace,
    f: &[f64],
    w: &Weight,
    l: f64,
    q: f64,
    growth: &VolumeGrowth,
) -> Result<LqEmbedding> {
    space.check_sample(f)?;
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::input(format!("exponent q must be positive, got {q}")));
    }
    let p = match w {
        Weight::Polynomial { p } => *p,
        _ => {
            return Err(Error::input(
                "layered comparison needs a polynomial weight; other orders don't layer by powers of 1+R",
            ))
        }
    };
    if growth.ladder.len() < 2 {
        return Err(Error::insufficient("volume ladder needs at least 2 radii"));
    }
    let pq = p * q;
    // band masses from the cumulative volumes V(R) = μ{h ≤ R}
    let vol_at = |r: f64| -> f64 {
        space
            .h
            .iter()
            .zip(&space.mu)
            .filter(|(hh, _)| **hh <= r)
            .map(|(_, m)| m)
            .sum()
    };
    let total: f64 = space.mu.iter().sum();
    let mut layered_sum = growth.ladder[0].1; // μ{h ≤ R₀}
    for k in 1..growth.ladder.len() {
        let (r_lo, v_lo) = growth.ladder[k - 1];
        let (_, v_hi) = growth.ladder[k];
        layered_sum += (v_hi - v_lo) * (1.0 + r_lo).powf(-pq);
    }
    let (r_last, v_last) = *growth.ladder.last().unwrap();
    layered_sum += (total - v_last).max(0.0) * (1.0 + r_last).powf(-pq);
    debug_assert!((vol_at(growth.ladder[0].0) - growth.ladder[0].1).abs() <= 1e-9 * (1.0 + total));
    let layered_constant = layered_sum.powf(1.0 / q);
    let sup_norm = fixed_norm(space, f, w, l)?.value;
    let one = Weight::polynomial(0.0).expect("constant weight");
    let unweighted_lq = weighted_lq_norm(space, f, &one, l, q)?;
    let bound_ok = unweighted_lq <= layered_constant * sup_norm * (1.0 + 1e-9) + 1e-12;
    Ok(LqEmbedding {
        p_times_q: pq,
        gamma: growth.gamma,
        exponent_ok: pq > growth.gamma,
        layered_sum,
        layered_constant,
        unweighted_lq,
        sup_norm,
        bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fit_volume_growth;

    fn line_space(n: usize, step: f64) -> ExhaustedSpace {
        let h: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mu = vec![step; n];
        ExhaustedSpace::new(ids, h, mu, None, None).unwrap()
    }

    #[test]
    fn lq_of_indicator_recovers_measure() {
        let space = line_space(1000, 0.1);
        let f: Vec<f64> = space.h.iter().map(|x| if *x < 10.0 { 2.0 } else { 0.0 }).collect();
        let one = Weight::polynomial(0.0).unwrap();
        // ∫ |f|^2 dμ = 4 · 10 ⇒ norm √40
        let n2 = weighted_lq_norm(&space, &f, &one, 0.0, 2.0).unwrap();
        assert!((n2 - 40.0_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn embedding_holds_when_pq_clears_gamma() {
        let space = line_space(4001, 0.05); // h up to 200, γ ≈ 1
        let f: Vec<f64> = space.h.iter().map(|x| 1.0 / (1.0 + x)).collect();
        let w = Weight::polynomial(1.0).unwrap();
        let ladder: Vec<f64> = (0..9).map(|k| 2.0_f64.powi(k) / 2.0).collect();
        let growth = fit_volume_growth(&space, &ladder).unwrap();
        assert!((growth.gamma - 1.0).abs() < 0.05);
        let emb = lq_embedding_check(&space, &f, &w, 0.0, 2.0, &growth).unwrap();
        assert!(emb.exponent_ok);
        assert!(emb.bound_ok, "lq {} vs layered {}", emb.unweighted_lq, emb.layered_constant * emb.sup_norm);
    }

    #[test]
    fn borderline_exponent_is_flagged() {
        let space = line_space(4001, 0.05);
        let f: Vec<f64> = space.h.iter().map(|x| 1.0 / (1.0 + x)).collect();
        let w = Weight::polynomial(0.4).unwrap();
        let ladder: Vec<f64> = (0..9).map(|k| 2.0_f64.powi(k) / 2.0).collect();
        let growth = fit_volume_growth(&space, &ladder).unwrap();
        let emb = lq_embedding_check(&space, &f, &w, 0.0, 2.0, &growth).unwrap();
        assert!(!emb.exponent_ok); // pq = 0.8 < γ ≈ 1
    }

    #[test]
    fn non_polynomial_weight_is_rejected() {
        let space = line_space(100, 0.1);
        let f = vec![0.0; 100];
        let w = Weight::exponential(1.0).unwrap();
        let ladder = vec![1.0, 2.0, 4.0, 8.0];
        let growth = fit_volume_growth(&space, &ladder).unwrap();
        assert!(lq_embedding_check(&space, &f, &w, 0.0, 2.0, &growth).is_err());
    }
}
