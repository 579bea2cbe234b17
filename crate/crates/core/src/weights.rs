//! Admissible weight families and Young functions.
//!
//! A weight `φ : [0,∞) → [1,∞)` is *admissible* when it is continuous,
//! nondecreasing, normalized to `φ(0) = 1`, and submultiplicative up to a
//! constant: `φ(r+s) ≤ K·φ(r)·φ(s)`. The built-in families are
//! `(1+t)^p`, `(1+t)^p (1+ln(1+t))^q`, and `e^{αt}`; arbitrary bodies in the
//! expression language are accepted as `custom:` weights and can be audited
//! with [`check_admissibility`].

use crate::error::Error;
use crate::expr::Expr;
use crate::Result;

pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum Weight {
    Polynomial { p: f64 },
    LogPolynomial { p: f64, q: f64 },
    Exponential { alpha: f64 },
    Custom { expr: Expr },
}

impl Weight {
    pub fn polynomial(p: f64) -> Result<Weight> {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::input(format!("polynomial weight needs p >= 0, got {p}")));
        }
        Ok(Weight::Polynomial { p })
    }

    pub fn log_polynomial(p: f64, q: f64) -> Result<Weight> {
        if !p.is_finite() || !q.is_finite() || p < 0.0 || q < 0.0 {
            return Err(Error::input(format!(
                "log-polynomial weight needs p, q >= 0, got p={p} q={q}"
            )));
        }
        Ok(Weight::LogPolynomial { p, q })
    }

    pub fn exponential(alpha: f64) -> Result<Weight> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::input(format!(
                "exponential weight needs alpha >= 0, got {alpha}"
            )));
        }
        Ok(Weight::Exponential { alpha })
    }

    pub fn custom(body: &str) -> Result<Weight> {
        let expr = Expr::parse(body, &["t"])?;
        Ok(Weight::Custom { expr })
    }

    /// Parses the mini-syntax used by the CLI and scenario files:
    /// `poly:p=2`, `logpoly:p=1,q=2`, `exp:a=0.5`, `custom:(1+t)^2`.
    pub fn parse_spec(spec: &str) -> Result<Weight> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::input(format!("weight spec `{spec}` is missing `:`")))?;
        let params = |rest: &str| -> Result<Vec<(String, f64)>> {
            rest.split(',')
                .map(|kv| {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| Error::input(format!("bad weight parameter `{kv}`")))?;
                    let v: f64 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::input(format!("bad number in weight spec: `{v}`")))?;
                    Ok((k.trim().to_string(), v))
                })
                .collect()
        };
        let get = |ps: &[(String, f64)], name: &str| -> Result<f64> {
            ps.iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::input(format!("weight spec `{spec}` missing `{name}=`")))
        };
        match kind.trim() {
            "poly" => {
                let ps = params(rest)?;
                Weight::polynomial(get(&ps, "p")?)
            }
            "logpoly" => {
                let ps = params(rest)?;
                Weight::log_polynomial(get(&ps, "p")?, get(&ps, "q")?)
            }
            "exp" => {
                let ps = params(rest)?;
                Weight::exponential(get(&ps, "a")?)
            }
            "custom" => Weight::custom(rest),
            other => Err(Error::input(format!("unknown weight kind `{other}`"))),
        }
    }

    /// Canonical spec-string form (inverse of [`Weight::parse_spec`]).
    pub fn spec_string(&self) -> String {
        match self {
            Weight::Polynomial { p } => format!("poly:p={p}"),
            Weight::LogPolynomial { p, q } => format!("logpoly:p={p},q={q}"),
            Weight::Exponential { alpha } => format!("exp:a={alpha}"),
            Weight::Custom { expr } => format!("custom:{}", expr.source()),
        }
    }

    /// Raw evaluation without the `φ ≥ 1` range check. Used by the
    /// admissibility auditor, which must be able to *report* violations.
    fn eval_raw(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::input(format!("weight argument must be >= 0, got {t}")));
        }
        let v = match self {
            Weight::Polynomial { p } => (1.0 + t).powf(*p),
            Weight::LogPolynomial { p, q } => {
                (1.0 + t).powf(*p) * (1.0 + (1.0 + t).ln()).powf(*q)
            }
            Weight::Exponential { alpha } => (alpha * t).exp(),
            Weight::Custom { expr } => expr.eval(&[t])?,
        };
        if !v.is_finite() {
            return Err(Error::WeightRange(format!(
                "weight {} overflows at t={t}",
                self.spec_string()
            )));
        }
        Ok(v)
    }

    /// Evaluates `φ(t)`; errors when the result leaves `[1, ∞)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = self.eval_raw(t)?;
        if v < 1.0 - NORMALIZATION_TOL {
            return Err(Error::WeightRange(format!(
                "weight {} takes value {v} < 1 at t={t}",
                self.spec_string()
            )));
        }
        Ok(v)
    }

    pub fn eval_many(&self, ts: &[f64]) -> Result<Vec<f64>> {
        ts.iter().map(|&t| self.eval(t)).collect()
    }
}

/// Result of auditing a weight on a finite grid.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub monotone_ok: bool,
    pub normalized_ok: bool,
    /// Smallest K with `φ(r+s) ≤ K·φ(r)·φ(s)` over all grid pairs.
    pub submult_constant_k: f64,
    /// Pairs whose ratio `φ(r+s)/(φ(r)φ(s))` exceeds the caller's cap.
    pub violations: Vec<(f64, f64, f64)>,
    pub grid_max: f64,
}

/// Audits monotonicity, normalization, and submultiplicativity of `w` on a
/// strictly increasing grid that must include 0. `violation_cap` is the
/// largest acceptable ratio; every pair above it is reported.
pub fn check_admissibility(
    w: &Weight,
    grid: &[f64],
    violation_cap: f64,
) -> Result<AdmissibilityReport> {
    if grid.is_empty() {
        return Err(Error::input("admissibility grid is empty"));
    }
    if !grid.iter().any(|&g| g == 0.0) {
        return Err(Error::input("admissibility grid must include 0"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("admissibility grid must be strictly increasing"));
    }
    let vals: Vec<f64> = grid.iter().map(|&t| w.eval_raw(t)).collect::<Result<_>>()?;
    let monotone_ok = vals
        .windows(2)
        .all(|v| v[1] >= v[0] - 1e-12 * (1.0 + v[0].abs()));
    let normalized_ok = {
        let idx = grid.iter().position(|&g| g == 0.0).unwrap();
        (vals[idx] - 1.0).abs() <= NORMALIZATION_TOL
    };
    let mut k: f64 = 0.0;
    let mut violations = Vec::new();
    for (i, &r) in grid.iter().enumerate() {
        for &s in &grid[i..] {
            let num = w.eval_raw(r + s)?;
            let den = vals[i] * w.eval_raw(s)?;
            let ratio = if den > 0.0 { num / den } else { f64::INFINITY };
            if ratio > k {
                k = ratio;
            }
            if ratio > violation_cap {
                violations.push((r, s, ratio));
            }
        }
    }
    Ok(AdmissibilityReport {
        monotone_ok,
        normalized_ok,
        submult_constant_k: k,
        violations,
        grid_max: *grid.last().unwrap(),
    })
}

// ------------------------------------------------------------ Young side --

/// Young function `Φ` (convex, increasing, `Φ(0)=0`) used by the Luxemburg
/// gauge.
#[derive(Debug, Clone)]
pub enum YoungFunction {
    /// `Φ(y) = y^e` with `e ≥ 1`.
    Power { e: f64 },
    /// `Φ(y) = e^y − 1`.
    ExpMinusOne,
    /// Arbitrary body over the variable `y`.
    Custom { expr: Expr },
}

impl YoungFunction {
    pub fn power(e: f64) -> Result<YoungFunction> {
        if !e.is_finite() || e < 1.0 {
            return Err(Error::input(format!("power Young function needs e >= 1, got {e}")));
        }
        Ok(YoungFunction::Power { e })
    }

    pub fn custom(body: &str) -> Result<YoungFunction> {
        let expr = Expr::parse(body, &["y"])?;
        Ok(YoungFunction::Custom { expr })
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        if !y.is_finite() || y < 0.0 {
            return Err(Error::input(format!("Young argument must be >= 0, got {y}")));
        }
        let v = match self {
            YoungFunction::Power { e } => y.powf(*e),
            YoungFunction::ExpMinusOne => y.exp() - 1.0,
            YoungFunction::Custom { expr } => expr.eval(&[y])?,
        };
        if !v.is_finite() {
            return Err(Error::input(format!("Young function overflows at y={y}")));
        }
        Ok(v)
    }

    /// `Φ^{-1}(1)`: closed form for the built-ins, monotone bisection for
    /// custom bodies (bracket grown geometrically from [0,1], then bisected
    /// to 1e-12).
    pub fn inverse_at_one(&self) -> Result<f64> {
        match self {
            YoungFunction::Power { .. } => Ok(1.0),
            YoungFunction::ExpMinusOne => Ok(std::f64::consts::LN_2),
            YoungFunction::Custom { .. } => {
                let at_zero = self.eval(0.0)?;
                if at_zero.abs() > 1e-9 {
                    return Err(Error::input(format!(
                        "Young function must vanish at 0, got {at_zero}"
                    )));
                }
                let mut lo = 0.0_f64;
                let mut hi = 1.0_f64;
                while self.eval(hi)? < 1.0 {
                    lo = hi;
                    hi *= 2.0;
                    if hi > 1e12 {
                        return Err(Error::NoRoot(
                            "Young function never reaches 1 on [0, 1e12]".into(),
                        ));
                    }
                }
                for _ in 0..200 {
                    if hi - lo <= 1e-12 * lo.max(1.0) {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid)? < 1.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }
}

/// Returns `(Φ(y), Φ^{-1}(1))`.
pub fn young_eval_and_inverse(phi: &YoungFunction, y: f64) -> Result<(f64, f64)> {
    Ok((phi.eval(y)?, phi.inverse_at_one()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_values() {
        let t = std::f64::consts::E - 1.0;
        let w = Weight::log_polynomial(1.0, 1.0).unwrap();
        let expect = 2.0 * std::f64::consts::E;
        assert!((w.eval(t).unwrap() - expect).abs() < 1e-12 * expect);

        let w = Weight::exponential(0.5).unwrap();
        assert!((w.eval(4.0).unwrap() - std::f64::consts::E.powi(2)).abs() < 1e-12);

        let w = Weight::polynomial(3.0).unwrap();
        assert_eq!(w.eval(1.0).unwrap(), 8.0);
    }

    #[test]
    fn polynomial_products_compose() {
        let w1 = Weight::polynomial(1.5).unwrap();
        let w2 = Weight::polynomial(2.0).unwrap();
        let w12 = Weight::polynomial(3.5).unwrap();
        for i in 0..50 {
            let t = 0.3 * i as f64;
            let prod = w1.eval(t).unwrap() * w2.eval(t).unwrap();
            let direct = w12.eval(t).unwrap();
            assert!((prod - direct).abs() <= 1e-9 * (1.0 + direct));
        }
    }

    #[test]
    fn poly_vs_exponential_ratio_eventually_nonincreasing() {
        let poly = Weight::polynomial(1.0).unwrap();
        let expw = Weight::exponential(1.0).unwrap();
        let grid: Vec<f64> = (0..=400).map(|i| i as f64 * 0.1).collect();
        let ratios: Vec<f64> = grid
            .iter()
            .map(|&t| poly.eval(t).unwrap() / expw.eval(t).unwrap())
            .collect();
        let top = ratios.len() - ratios.len() / 10;
        for w in ratios[top..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn admissibility_of_builtins() {
        let grid = [0.0, 1.0, 2.0, 4.0];
        for w in [
            Weight::polynomial(3.0).unwrap(),
            Weight::exponential(2.0).unwrap(),
            Weight::log_polynomial(1.0, 2.0).unwrap(),
        ] {
            let rep = check_admissibility(&w, &grid, 1.0 + 1e-9).unwrap();
            assert!(rep.monotone_ok, "{}", w.spec_string());
            assert!(rep.normalized_ok, "{}", w.spec_string());
            assert!(rep.submult_constant_k <= 1.0 + 1e-9, "{}", w.spec_string());
            assert!(rep.violations.is_empty(), "{}", w.spec_string());
            assert_eq!(rep.grid_max, 4.0);
        }
    }

    #[test]
    fn decreasing_custom_weight_flagged() {
        let w = Weight::custom("1/(1+t)").unwrap();
        let rep = check_admissibility(&w, &[0.0, 1.0], 10.0).unwrap();
        assert!(!rep.monotone_ok);
        assert!(rep.normalized_ok);
        // but plain evaluation refuses values below 1
        assert!(matches!(w.eval(1.0), Err(Error::WeightRange(_))));
    }

    #[test]
    fn grid_validation() {
        let w = Weight::polynomial(1.0).unwrap();
        assert!(check_admissibility(&w, &[], 2.0).is_err());
        assert!(check_admissibility(&w, &[1.0, 2.0], 2.0).is_err());
        assert!(check_admissibility(&w, &[0.0, 2.0, 1.0], 2.0).is_err());
    }

    #[test]
    fn spec_string_round_trip() {
        for spec in ["poly:p=2", "logpoly:p=1,q=2", "exp:a=0.5", "custom:(1+t)^2*(1+ln(1+t))"] {
            let w = Weight::parse_spec(spec).unwrap();
            assert_eq!(w.spec_string(), spec);
        }
        assert!(Weight::parse_spec("poly").is_err());
        assert!(Weight::parse_spec("poly:p=-1").is_err());
        assert!(Weight::parse_spec("gauss:s=1").is_err());
    }

    #[test]
    fn young_inverses() {
        assert_eq!(YoungFunction::power(2.0).unwrap().inverse_at_one().unwrap(), 1.0);
        assert_eq!(
            YoungFunction::ExpMinusOne.inverse_at_one().unwrap(),
            std::f64::consts::LN_2
        );
        // custom body matching ExpMinusOne agrees with the closed form
        let c = YoungFunction::custom("exp(y)-1").unwrap();
        let inv = c.inverse_at_one().unwrap();
        assert!((inv - std::f64::consts::LN_2).abs() < 1e-11);
        // and a custom power
        let c = YoungFunction::custom("y^3").unwrap();
        assert!((c.inverse_at_one().unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn young_validation() {
        assert!(YoungFunction::power(0.5).is_err());
        // a Young function that never reaches 1
        let c = YoungFunction::custom("y/(1+y)/2").unwrap();
        assert!(matches!(c.inverse_at_one(), Err(Error::NoRoot(_))));
        // nonzero at 0 rejected
        let c = YoungFunction::custom("1+y").unwrap();
        assert!(c.inverse_at_one().is_err());
    }

    #[test]
    fn eval_rejects_negative_argument() {
        let w = Weight::polynomial(2.0).unwrap();
        assert!(w.eval(-0.5).is_err());
    }
}
