//! Critical-order search across a one-parameter weight scale.
//!
//! Convergence of the weighted tail is monotone along each scale: strengthen
//! the weight and a convergent profile eventually diverges. The classifier
//! bisects on that transition. A profile that fails to converge even at the
//! bottom of the bracket is reported one-sidedly as slower than the whole
//! scale, and one that survives the top as faster — no critical order is
//! invented in either case.

use crate::error::Error;
use crate::norms::sharp::{fixed_norm, sharp_norm, Centering};
use crate::norms::tails::{asymptotic_constant, AsymptoticEstimate, RateStatus, ShellPolicy};
use crate::space::ExhaustedSpace;
use crate::weights::Weight;
use crate::Result;

/// One-parameter weight families ordered by strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// (1+h)^p, parameter p.
    Algebraic,
    /// e^{αh}, parameter α.
    Exponential,
    /// (1 + ln(1+h))^q, parameter q.
    LogPolynomial,
}

impl Scale {
    pub fn weight(&self, param: f64) -> Result<Weight> {
        match self {
            Scale::Algebraic => Weight::polynomial(param),
            Scale::Exponential => Weight::exponential(param),
            Scale::LogPolynomial => Weight::log_polynomial(0.0, param),
        }
    }

    pub fn default_bracket(&self) -> (f64, f64) {
        match self {
            Scale::Algebraic => (0.0, 8.0),
            Scale::Exponential => (0.0, 4.0),
            Scale::LogPolynomial => (0.0, 8.0),
        }
    }

    pub fn param_name(&self) -> &'static str {
        match self {
            Scale::Algebraic => "p",
            Scale::Exponential => "alpha",
            Scale::LogPolynomial => "q",
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Scale::Algebraic => "algebraic",
            Scale::Exponential => "exponential",
            Scale::LogPolynomial => "log_polynomial",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RateClassification {
    pub scale: Scale,
    /// Transition parameter; for one-sided outcomes, the bracket edge.
    pub critical: f64,
    /// Final bisection bracket (equal endpoints when one-sided).
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// "slower_than_scale" or "faster_than_scale" when no transition lies
    /// inside the default bracket.
    pub one_sided: Option<&'static str>,
    /// Estimated limsup at the strongest convergent probe.
    pub constant_at_critical: Option<f64>,
    /// Parameter that constant was measured at (the midpoint when it
    /// converges there, otherwise the convergent bracket edge).
    pub constant_evaluated_at: Option<f64>,
}

/// Bisects the convergence/divergence transition of
/// `limsup w_param(h)|f − c|` along the given scale.
pub fn classify_rate(
    space: &ExhaustedSpace,
    f: &[f64],
    scale: Scale,
    centering: Centering,
    tol: f64,
    policy: ShellPolicy,
) -> Result<RateClassification> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::input(format!("bisection tolerance must be positive, got {tol}")));
    }
    let probe = |param: f64| -> Result<AsymptoticEstimate> {
        asymptotic_constant(space, f, &scale.weight(param)?, centering, policy)
    };
    let (mut lo, mut hi) = scale.default_bracket();
    let at_lo = probe(lo)?;
    let at_hi = probe(hi)?;
    if at_lo.status == RateStatus::Inconclusive && at_hi.status == RateStatus::Inconclusive {
        return Err(Error::insufficient(format!(
            "profile is inconclusive at both bracket edges {}={} and {}={}; deepen the grid",
            scale.param_name(),
            lo,
            scale.param_name(),
            hi
        )));
    }
    if at_lo.status != RateStatus::Converges {
        return Ok(RateClassification {
            scale,
            critical: lo,
            bracket: (lo, lo),
            iterations: 0,
            one_sided: Some("slower_than_scale"),
            constant_at_critical: None,
            constant_evaluated_at: None,
        });
    }
    if at_hi.status == RateStatus::Converges {
        return Ok(RateClassification {
            scale,
            critical: hi,
            bracket: (hi, hi),
            iterations: 0,
            one_sided: Some("faster_than_scale"),
            constant_at_critical: at_hi.value,
            constant_evaluated_at: Some(hi),
        });
    }
    let mut iterations = 0;
    while hi - lo > tol && iterations < 60 {
        let mid = 0.5 * (lo + hi);
        if probe(mid)?.status == RateStatus::Converges {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let critical = 0.5 * (lo + hi);
    let at_mid = probe(critical)?;
    let (constant_at_critical, constant_evaluated_at) = if at_mid.status == RateStatus::Converges {
        (at_mid.value, Some(critical))
    } else {
        let back = probe(lo)?;
        if back.status == RateStatus::Converges {
            (back.value, Some(lo))
        } else {
            (None, None)
        }
    };
    Ok(RateClassification {
        scale,
        critical,
        bracket: (lo, hi),
        iterations,
        one_sided: None,
        constant_at_critical,
        constant_evaluated_at,
    })
}

#[derive(Debug, Clone)]
pub struct PProfile {
    pub p_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub centering: Centering,
    /// Some(true) for fixed centering, where log-convexity always holds and
    /// is enforced; None for sharp centering, where it can genuinely fail.
    pub log_convex_ok: Option<bool>,
    /// Largest log-convexity violation over interior grid triples (≤ 0 when
    /// the profile is convex).
    pub max_convexity_gap: f64,
}

/// Norm of the class of f under (1+h)^p across a grid of orders p. The
/// profile is nondecreasing in p for either centering; with a fixed center
/// it is also log-convex, being a pointwise sup of log-affine maps of p.
/// Violations of either enforced shape are reported as assertion failures.
pub fn p_profile(
    space: &ExhaustedSpace,
    f: &[f64],
    p_grid: &[f64],
    centering: Centering,
) -> Result<PProfile> {
    if p_grid.len() < 2 {
        return Err(Error::input("profile grid needs at least 2 orders"));
    }
    if p_grid.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::input("profile orders must be finite and >= 0"));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("profile orders must be strictly increasing"));
    }
    let mut values = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let w = Weight::polynomial(p)?;
        let v = match centering {
            Centering::Fixed(l) => fixed_norm(space, f, &w, l)?.value,
            Centering::Sharp => sharp_norm(space, f, &w)?.value,
        };
        values.push(v);
    }
    for (k, pair) in values.windows(2).enumerate() {
        if pair[1] < pair[0] - 1e-9 * (1.0 + pair[0]) {
            return Err(Error::assertion(format!(
                "norm profile decreased from p={} to p={}: {} > {}",
                p_grid[k],
                p_grid[k + 1],
                pair[0],
                pair[1]
            )));
        }
    }
    let mut max_convexity_gap = f64::NEG_INFINITY;
    if values.iter().all(|v| *v > 0.0) {
        for k in 1..values.len() - 1 {
            let (p1, p2, p3) = (p_grid[k - 1], p_grid[k], p_grid[k + 1]);
            let lam = (p3 - p2) / (p3 - p1);
            let chord = lam * values[k - 1].ln() + (1.0 - lam) * values[k + 1].ln();
            max_convexity_gap = max_convexity_gap.max(values[k].ln() - chord);
        }
    } else {
        max_convexity_gap = 0.0; // all-zero profile (constant class) is flat
    }
    if !max_convexity_gap.is_finite() {
        max_convexity_gap = 0.0;
    }
    let log_convex_ok = match centering {
        Centering::Fixed(_) => {
            if max_convexity_gap > 1e-9 {
                return Err(Error::assertion(format!(
                    "fixed-center profile is not log-convex: gap {max_convexity_gap}"
                )));
            }
            Some(true)
        }
        Centering::Sharp => None,
    };
    Ok(PProfile {
        p_grid: p_grid.to_vec(),
        values,
        centering,
        log_convex_ok,
        max_convexity_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lingrid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exponential_decay_has_unit_critical_alpha() {
        let h = lingrid(0.0, 40.0, 4001);
        let f: Vec<f64> = h.iter().map(|x| (-x).exp()).collect();
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let cls = classify_rate(
            &space,
            &f,
            Scale::Exponential,
            Centering::Fixed(0.0),
            0.01,
            ShellPolicy::default(),
        )
        .unwrap();
        assert!(cls.one_sided.is_none());
        assert!((cls.critical - 1.0).abs() <= 0.01, "alpha* = {}", cls.critical);
        let c = cls.constant_at_critical.expect("constant");
        assert!((c - 1.0).abs() < 0.1, "constant = {c}");
    }

    #[test]
    fn quadratic_decay_has_critical_order_two() {
        let h = lingrid(0.0, 1e4, 20001);
        let f: Vec<f64> = h.iter().map(|x| (1.0 + x).powi(-2)).collect();
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let cls = classify_rate(
            &space,
            &f,
            Scale::Algebraic,
            Centering::Fixed(0.0),
            0.01,
            ShellPolicy::default(),
        )
        .unwrap();
        assert!(cls.one_sided.is_none());
        assert!((cls.critical - 2.0).abs() <= 0.05, "p* = {}", cls.critical);
        let c = cls.constant_at_critical.expect("constant");
        assert!((c - 1.0).abs() <= 0.05, "constant = {c}");
    }

    #[test]
    fn constants_interpolate_multiplicatively_on_the_algebraic_scale() {
        // between two orders where the estimate converges, the middle-order
        // constant is controlled by the endpoint product (10% slack for the
        // estimator); clean power decay sends all three to zero, which is
        // exactly what the product predicts
        let h = lingrid(0.0, 1e4, 20001);
        let f: Vec<f64> = h.iter().map(|x| (1.0 + x).powi(-3)).collect();
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let theta = 0.5;
        let (p1, p2) = (0.5, 2.0);
        let value = |p: f64| {
            let w = Weight::polynomial(p).unwrap();
            let est =
                asymptotic_constant(&space, &f, &w, Centering::Fixed(0.0), ShellPolicy::default())
                    .unwrap();
            assert_eq!(est.status, RateStatus::Converges, "p = {p}");
            est.value.unwrap()
        };
        let (v1, vm, v2) = (value(p1), value(theta * p1 + (1.0 - theta) * p2), value(p2));
        assert!(
            vm <= v1.powf(theta) * v2.powf(1.0 - theta) * 1.1 + 1e-12,
            "middle {vm} vs endpoints {v1}, {v2}"
        );
    }

    #[test]
    fn growth_is_slower_than_every_order() {
        let h = lingrid(0.0, 1e4, 20001);
        let f: Vec<f64> = h.iter().map(|x| (1.0 + x).ln()).collect();
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let cls = classify_rate(
            &space,
            &f,
            Scale::Algebraic,
            Centering::Fixed(0.0),
            0.01,
            ShellPolicy::default(),
        )
        .unwrap();
        assert_eq!(cls.one_sided, Some("slower_than_scale"));
        assert!(cls.constant_at_critical.is_none());
    }

    #[test]
    fn constant_class_is_faster_than_the_scale() {
        let h = lingrid(0.0, 100.0, 2001);
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let f = vec![5.0; 2001];
        let cls = classify_rate(
            &space,
            &f,
            Scale::Exponential,
            Centering::Fixed(5.0),
            0.01,
            ShellPolicy::default(),
        )
        .unwrap();
        assert_eq!(cls.one_sided, Some("faster_than_scale"));
        assert_eq!(cls.constant_at_critical, Some(0.0));
    }

    #[test]
    fn profile_is_monotone_and_log_convex_for_fixed_center() {
        let h = lingrid(0.0, 50.0, 2001);
        let f: Vec<f64> = h.iter().map(|x| (-0.3 * x).exp() * (1.0 + (2.0 * x).sin())).collect();
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let grid = [0.0, 0.5, 1.0, 1.7, 2.5, 4.0];
        let prof = p_profile(&space, &f, &grid, Centering::Fixed(0.0)).unwrap();
        assert_eq!(prof.log_convex_ok, Some(true));
        assert!(prof.max_convexity_gap <= 1e-9);
        for pair in prof.values.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12);
        }
    }

    #[test]
    fn sharp_profile_reports_gap_without_enforcing() {
        // two points: the sharp value is W2/(1+W2)·span, which is strictly
        // log-concave in p — the convexity gap must come back positive
        let space = ExhaustedSpace::from_heights(vec![0.0, 1.0]).unwrap();
        let f = vec![0.0, 1.0];
        let grid = [0.0, 1.0, 2.0];
        let prof = p_profile(&space, &f, &grid, Centering::Sharp).unwrap();
        assert_eq!(prof.log_convex_ok, None);
        assert!(prof.max_convexity_gap > 1e-6, "gap = {}", prof.max_convexity_gap);
    }

    #[test]
    fn bad_grids_are_rejected() {
        let space = ExhaustedSpace::from_heights(lingrid(0.0, 10.0, 11)).unwrap();
        let f = vec![0.0; 11];
        assert!(p_profile(&space, &f, &[1.0], Centering::Sharp).is_err());
        assert!(p_profile(&space, &f, &[1.0, 1.0], Centering::Sharp).is_err());
        assert!(p_profile(&space, &f, &[-1.0, 1.0], Centering::Sharp).is_err());
        assert!(classify_rate(
            &space,
            &f,
            Scale::Algebraic,
            Centering::Sharp,
            0.0,
            ShellPolicy::default()
        )
        .is_err());
    }
}
