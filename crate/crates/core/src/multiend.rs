//! Spaces with several ends, each carrying its own height and weight.
//!
//! A decomposition splits the sample into a core and labelled ends. The
//! anisotropic norm weighs each end by its own scale and the core by 1, and
//! takes a single common centering constant — so a function can only have a
//! small anisotropic norm when every end approaches the *same* limit. The
//! asymptotic search below makes that concrete: it minimizes the worst
//! per-end limsup over the center, seeding the search with each end's
//! empirical limit, and refuses to report a constant when no center makes
//! all ends converge.

use crate::error::Error;
use crate::norms::sharp::weighted_center;
use crate::norms::tails::{estimate_limsup, AsymptoticEstimate, RateStatus, ShellPolicy};
use crate::space::ExhaustedSpace;
use crate::weights::Weight;
use crate::Result;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct End {
    pub label: String,
    pub ids: Vec<String>,
    /// End-adapted height, aligned with `ids`.
    pub h: Vec<f64>,
    pub weight: Weight,
}

#[derive(Debug, Clone)]
pub struct EndDecomposition {
    pub core_ids: Vec<String>,
    pub ends: Vec<End>,
}

/// Index-resolved view of one end.
struct ResolvedEnd {
    label: String,
    idx: Vec<usize>,
    h: Vec<f64>,
    w: Vec<f64>,
}

struct Resolved {
    core: Vec<usize>,
    ends: Vec<ResolvedEnd>,
}

impl EndDecomposition {
    /// Checks the decomposition is a partition of the sample and resolves
    /// ids to indices, evaluating each end's weight along its own height.
    fn resolve(&self, space: &ExhaustedSpace) -> Result<Resolved> {
        let mut pos: HashMap<&str, usize> = HashMap::new();
        for (i, id) in space.ids.iter().enumerate() {
            pos.insert(id.as_str(), i);
        }
        let mut seen = vec![false; space.len()];
        let mut take = |id: &str| -> Result<usize> {
            let i = *pos
                .get(id)
                .ok_or_else(|| Error::input(format!("decomposition names unknown id {id:?}")))?;
            if seen[i] {
                return Err(Error::input(format!("id {id:?} appears twice in the decomposition")));
            }
            seen[i] = true;
            Ok(i)
        };
        let core: Vec<usize> =
            self.core_ids.iter().map(|id| take(id)).collect::<Result<_>>()?;
        let mut ends = Vec::with_capacity(self.ends.len());
        let mut labels: Vec<&str> = Vec::new();
        for end in &self.ends {
            if end.label.is_empty() {
                return Err(Error::input("end labels must be nonempty"));
            }
            if labels.contains(&end.label.as_str()) {
                return Err(Error::input(format!("duplicate end label {:?}", end.label)));
            }
            labels.push(&end.label);
            if end.ids.is_empty() {
                return Err(Error::input(format!("end {:?} has no points", end.label)));
            }
            if end.ids.len() != end.h.len() {
                return Err(Error::input(format!(
                    "end {:?}: {} ids but {} heights",
                    end.label,
                    end.ids.len(),
                    end.h.len()
                )));
            }
            if end.h.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::input(format!(
                    "end {:?} heights must be finite and >= 0",
                    end.label
                )));
            }
            let idx: Vec<usize> = end.ids.iter().map(|id| take(id)).collect::<Result<_>>()?;
            let w = end.weight.eval_many(&end.h)?;
            ends.push(ResolvedEnd { label: end.label.clone(), idx, h: end.h.clone(), w });
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::input(format!(
                "id {:?} belongs to neither the core nor any end",
                space.ids[i]
            )));
        }
        Ok(Resolved { core, ends })
    }

    /// Weight attached to each sample point: 1 on the core, the end's own
    /// weight along its height elsewhere.
    pub fn block_weights(&self, space: &ExhaustedSpace) -> Result<Vec<f64>> {
        let res = self.resolve(space)?;
        let mut w = vec![1.0; space.len()];
        for end in &res.ends {
            for (k, &i) in end.idx.iter().enumerate() {
                w[i] = end.w[k];
            }
        }
        Ok(w)
    }
}

#[derive(Debug, Clone)]
pub struct EndNorm {
    pub label: String,
    /// Sup of this end's weighted error at the global center.
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub struct AnisoReport {
    pub value: f64,
    pub c_star: f64,
    /// Sup of |f − c*| over the core.
    pub core_osc: f64,
    pub per_end: Vec<EndNorm>,
}

/// Anisotropic sharp norm: one center, per-end weights, core weighed by 1.
pub fn aniso_sharp_norm(
    space: &ExhaustedSpace,
    f: &[f64],
    dec: &EndDecomposition,
) -> Result<AnisoReport> {
    space.check_sample(f)?;
    let res = dec.resolve(space)?;
    let w = dec.block_weights(space)?;
    let (c_star, value) = weighted_center(&w, f);
    let core_osc = res.core.iter().map(|&i| (f[i] - c_star).abs()).fold(0.0, f64::max);
    let per_end = res
        .ends
        .iter()
        .map(|end| EndNorm {
            label: end.label.clone(),
            norm: end
                .idx
                .iter()
                .zip(&end.w)
                .map(|(&i, wi)| wi * (f[i] - c_star).abs())
                .fold(0.0, f64::max),
        })
        .collect();
    Ok(AnisoReport { value, c_star, core_osc, per_end })
}

fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Value at sorted rank `q·(n−1)` (lower interpolation).
fn quantile_value(h: &[f64], q: f64) -> f64 {
    let mut s: Vec<f64> = h.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s[(q * (s.len() as f64 - 1.0)) as usize]
}

#[derive(Debug, Clone)]
pub struct EndLimit {
    pub label: String,
    /// Median of f over the deep decile of the end.
    pub limit: f64,
    pub deep_points: usize,
    /// Estimate of weight·|f − limit| along the end at its own limit.
    pub residual: AsymptoticEstimate,
}

/// Per-end limit candidates: median of f over each end's deepest decile,
/// with the residual rate measured at that value.
pub fn end_limits(
    space: &ExhaustedSpace,
    f: &[f64],
    dec: &EndDecomposition,
    policy: ShellPolicy,
) -> Result<Vec<EndLimit>> {
    space.check_sample(f)?;
    let res = dec.resolve(space)?;
    let mut out = Vec::with_capacity(res.ends.len());
    for end in &res.ends {
        let thresh = quantile_value(&end.h, 0.9);
        let mut deep: Vec<f64> = end
            .idx
            .iter()
            .zip(&end.h)
            .filter(|(_, hh)| **hh > thresh)
            .map(|(&i, _)| f[i])
            .collect();
        if deep.len() < 5 {
            return Err(Error::insufficient(format!(
                "end {:?} has only {} points beyond its 0.9-quantile height; need 5",
                end.label,
                deep.len()
            )));
        }
        let deep_points = deep.len();
        let limit = median(&mut deep);
        let vals: Vec<f64> = end
            .idx
            .iter()
            .zip(&end.w)
            .map(|(&i, wi)| wi * (f[i] - limit).abs())
            .collect();
        let residual = estimate_limsup(&end.h, &vals, policy, limit)?;
        out.push(EndLimit { label: end.label.clone(), limit, deep_points, residual });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EndAsymptotic {
    pub label: String,
    pub limit: Option<f64>,
    /// Rate of weight·|f − limit| along the end, at its own limit.
    pub residual: Option<AsymptoticEstimate>,
    /// Smallest converging per-end limsup seen over all evaluated centers.
    pub constant: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct AnisoAsymptotic {
    pub status: RateStatus,
    /// min over centers of the worst per-end limsup, when some center works.
    pub value: Option<f64>,
    pub c_star: Option<f64>,
    /// An end that still diverges at the least-bad center, when none works.
    pub witness: Option<String>,
    pub per_end: Vec<EndAsymptotic>,
    pub evaluations: usize,
}

/// Joint evaluation of all ends at one center.
#[derive(Clone)]
struct JointEval {
    /// (status, limsup value) per end, in decomposition order.
    per_end: Vec<(RateStatus, Option<f64>)>,
    status: RateStatus,
    /// max per-end value when every end converges.
    worst: Option<f64>,
}

fn eval_center(res: &Resolved, f: &[f64], policy: ShellPolicy, c: f64) -> Result<JointEval> {
    let mut per_end = Vec::with_capacity(res.ends.len());
    let mut worst = 0.0_f64;
    let mut any_div = false;
    let mut any_inc = false;
    for end in &res.ends {
        let vals: Vec<f64> = end
            .idx
            .iter()
            .zip(&end.w)
            .map(|(&i, wi)| wi * (f[i] - c).abs())
            .collect();
        let est = estimate_limsup(&end.h, &vals, policy, c)?;
        match est.status {
            RateStatus::Converges => worst = worst.max(est.value.unwrap_or(0.0)),
            RateStatus::Diverges => any_div = true,
            RateStatus::Inconclusive => any_inc = true,
        }
        per_end.push((est.status, est.value));
    }
    let status = if any_div {
        RateStatus::Diverges
    } else if any_inc {
        RateStatus::Inconclusive
    } else {
        RateStatus::Converges
    };
    let worst = if status == RateStatus::Converges { Some(worst) } else { None };
    Ok(JointEval { per_end, status, worst })
}

/// Minimizes the worst per-end limsup over the centering constant. The
/// candidate set is each end's empirical limit plus a coarse sweep of the
/// sample range; a golden-section pass then refines around the best
/// candidate. All evaluations are pooled, so the reported per-end constants
/// are minima over the same centers as the global one — the global constant
/// can never undercut the worst per-end constant.
pub fn aniso_asymptotic(
    space: &ExhaustedSpace,
    f: &[f64],
    dec: &EndDecomposition,
    policy: ShellPolicy,
) -> Result<AnisoAsymptotic> {
    space.check_sample(f)?;
    let res = dec.resolve(space)?;
    let limits = end_limits(space, f, dec, policy).ok();
    let fmin = f.iter().cloned().fold(f64::INFINITY, f64::min);
    let fmax = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut cand: Vec<f64> = Vec::new();
    if let Some(ls) = &limits {
        cand.extend(ls.iter().map(|l| l.limit));
    }
    let sweep = 33;
    for k in 0..sweep {
        cand.push(fmin + (fmax - fmin) * k as f64 / (sweep - 1) as f64);
    }
    cand.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cand.dedup();
    let mut pool: Vec<(f64, JointEval)> = Vec::new();
    for &c in &cand {
        pool.push((c, eval_center(&res, f, policy, c)?));
    }
    let best_cand = pool
        .iter()
        .filter(|(_, e)| e.status == RateStatus::Converges)
        .min_by(|a, b| a.1.worst.partial_cmp(&b.1.worst).unwrap())
        .map(|(c, _)| *c);
    if let Some(best) = best_cand {
        if cand.len() >= 2 {
            let i = cand.iter().position(|c| *c == best).unwrap();
            let mut lo =
                if i > 0 { cand[i - 1] } else { best - (cand[1] - cand[0]) };
            let mut hi = if i + 1 < cand.len() {
                cand[i + 1]
            } else {
                best + (cand[cand.len() - 1] - cand[cand.len() - 2])
            };
            let gold = (5.0_f64.sqrt() - 1.0) / 2.0;
            let peek = |c: f64, pool: &mut Vec<(f64, JointEval)>| -> Result<f64> {
                if let Some((_, e)) = pool.iter().find(|(cc, _)| *cc == c) {
                    return Ok(e.worst.unwrap_or(f64::INFINITY));
                }
                let e = eval_center(&res, f, policy, c)?;
                let v = e.worst.unwrap_or(f64::INFINITY);
                pool.push((c, e));
                Ok(v)
            };
            let mut x1 = hi - gold * (hi - lo);
            let mut x2 = lo + gold * (hi - lo);
            let mut f1 = peek(x1, &mut pool)?;
            let mut f2 = peek(x2, &mut pool)?;
            for _ in 0..60 {
                if f1 < f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - gold * (hi - lo);
                    f1 = peek(x1, &mut pool)?;
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + gold * (hi - lo);
                    f2 = peek(x2, &mut pool)?;
                }
            }
        }
    }
    let evaluations = pool.len();
    let mut per_end: Vec<EndAsymptotic> = res
        .ends
        .iter()
        .enumerate()
        .map(|(k, end)| {
            let constant = pool
                .iter()
                .filter_map(|(_, e)| match e.per_end[k] {
                    (RateStatus::Converges, v) => Some(v.unwrap_or(0.0)),
                    _ => None,
                })
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
            EndAsymptotic { label: end.label.clone(), limit: None, residual: None, constant }
        })
        .collect();
    if let Some(ls) = limits {
        for l in ls {
            if let Some(pe) = per_end.iter_mut().find(|pe| pe.label == l.label) {
                pe.limit = Some(l.limit);
                pe.residual = Some(l.residual);
            }
        }
    }
    let best = pool
        .iter()
        .filter(|(_, e)| e.status == RateStatus::Converges)
        .min_by(|a, b| a.1.worst.partial_cmp(&b.1.worst).unwrap());
    if let Some((c, e)) = best {
        return Ok(AnisoAsymptotic {
            status: RateStatus::Converges,
            value: e.worst,
            c_star: Some(*c),
            witness: None,
            per_end,
            evaluations,
        });
    }
    let any_div = pool.iter().any(|(_, e)| e.status == RateStatus::Diverges);
    let witness = if any_div {
        // least-bad center still leaves some end diverging; name one
        pool.iter()
            .min_by_key(|(_, e)| {
                e.per_end.iter().filter(|(s, _)| *s == RateStatus::Diverges).count()
            })
            .and_then(|(_, e)| {
                e.per_end
                    .iter()
                    .position(|(s, _)| *s == RateStatus::Diverges)
                    .map(|k| res.ends[k].label.clone())
            })
    } else {
        None
    };
    Ok(AnisoAsymptotic {
        status: if any_div { RateStatus::Diverges } else { RateStatus::Inconclusive },
        value: None,
        c_star: None,
        witness,
        per_end,
        evaluations,
    })
}

#[derive(Debug, Clone)]
pub struct Projection {
    /// f with each end's limit ramped off: the projected class vanishes at
    /// every end.
    pub g: Vec<f64>,
    pub limits: Vec<(String, f64)>,
}

/// Subtracts each end's limit beyond a ramp placed at that end's 0.5–0.7
/// height quantiles. Deep-decile points sit entirely above the ramp, so the
/// projected sample has end limits exactly zero and the map is idempotent.
pub fn project_vanishing(
    space: &ExhaustedSpace,
    f: &[f64],
    dec: &EndDecomposition,
    policy: ShellPolicy,
) -> Result<Projection> {
    space.check_sample(f)?;
    let res = dec.resolve(space)?;
    let lims = end_limits(space, f, dec, policy)?;
    let mut g = f.to_vec();
    let mut limits = Vec::with_capacity(lims.len());
    for (end, l) in res.ends.iter().zip(&lims) {
        let r0 = quantile_value(&end.h, 0.5);
        let r1 = quantile_value(&end.h, 0.7);
        if r1 <= r0 {
            return Err(Error::insufficient(format!(
                "end {:?} heights are too clustered to place a ramp",
                end.label
            )));
        }
        for (k, &i) in end.idx.iter().enumerate() {
            let chi = ((end.h[k] - r0) / (r1 - r0)).clamp(0.0, 1.0);
            g[i] -= chi * l.limit;
        }
        limits.push((end.label.clone(), l.limit));
    }
    Ok(Projection { g, limits })
}

#[derive(Debug, Clone)]
pub struct GluingCheck {
    /// Anisotropic sharp norm with the common center.
    pub global: f64,
    /// Sharp seminorm of the core alone (half its oscillation).
    pub core_osc: f64,
    /// Each end's own sharp norm, centered independently.
    pub per_end_own: Vec<(String, f64)>,
    /// max(core_osc, per-end own norms): the glued lower bound.
    pub rhs: f64,
    /// global / rhs (1 when both vanish).
    pub ratio: f64,
}

/// Compares the anisotropic norm against the glued lower bound in which
/// every piece chooses its own center. The global value can only exceed it:
/// a common center is one admissible choice for every piece.
pub fn gluing_check(
    space: &ExhaustedSpace,
    f: &[f64],
    dec: &EndDecomposition,
) -> Result<GluingCheck> {
    space.check_sample(f)?;
    let res = dec.resolve(space)?;
    let global = aniso_sharp_norm(space, f, dec)?.value;
    let core_osc = if res.core.is_empty() {
        0.0
    } else {
        let w = vec![1.0; res.core.len()];
        let fv: Vec<f64> = res.core.iter().map(|&i| f[i]).collect();
        weighted_center(&w, &fv).1
    };
    let mut rhs = core_osc;
    let mut per_end_own = Vec::with_capacity(res.ends.len());
    for end in &res.ends {
        let fv: Vec<f64> = end.idx.iter().map(|&i| f[i]).collect();
        let own = weighted_center(&end.w, &fv).1;
        rhs = rhs.max(own);
        per_end_own.push((end.label.clone(), own));
    }
    if global + 1e-9 * (1.0 + global) < rhs {
        return Err(Error::assertion(format!(
            "glued pieces exceed the global norm: {rhs} > {global}"
        )));
    }
    let ratio = if rhs == 0.0 {
        1.0
    } else {
        global / rhs
    };
    Ok(GluingCheck { global, core_osc, per_end_own, rhs, ratio })
}

/// Two ends of the real line: heights |x|−1 past ±1, everything in between
/// is core. Used by tests and the strip scenario.
pub fn line_decomposition(xs: &[f64], ids: &[String], weight: &Weight) -> EndDecomposition {
    let mut plus = End {
        label: "+inf".into(),
        ids: Vec::new(),
        h: Vec::new(),
        weight: weight.clone(),
    };
    let mut minus = End {
        label: "-inf".into(),
        ids: Vec::new(),
        h: Vec::new(),
        weight: weight.clone(),
    };
    let mut core_ids = Vec::new();
    for (x, id) in xs.iter().zip(ids) {
        if *x > 1.0 {
            plus.ids.push(id.clone());
            plus.h.push(x - 1.0);
        } else if *x < -1.0 {
            minus.ids.push(id.clone());
            minus.h.push(-x - 1.0);
        } else {
            core_ids.push(id.clone());
        }
    }
    EndDecomposition { core_ids, ends: vec![minus, plus] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::sharp::sharp_norm;

    fn strip() -> (ExhaustedSpace, Vec<f64>, EndDecomposition) {
        let n = 8201;
        let xs: Vec<f64> = (0..n).map(|i| -41.0 + 82.0 * i as f64 / (n - 1) as f64).collect();
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let h: Vec<f64> = xs.iter().map(|x| (x.abs() - 1.0).max(0.0)).collect();
        let space = ExhaustedSpace::new(ids.clone(), h, vec![1.0; n], None, None).unwrap();
        let w = Weight::polynomial(1.0).unwrap();
        let dec = line_decomposition(&xs, &ids, &w);
        (space, xs, dec)
    }

    #[test]
    fn partition_is_validated() {
        let space = ExhaustedSpace::from_heights(vec![0.0, 1.0, 2.0]).unwrap();
        let w = Weight::polynomial(1.0).unwrap();
        // id "2" missing
        let dec = EndDecomposition {
            core_ids: vec!["0".into()],
            ends: vec![End {
                label: "e".into(),
                ids: vec!["1".into()],
                h: vec![0.0],
                weight: w.clone(),
            }],
        };
        assert!(dec.resolve(&space).is_err());
        // id repeated
        let dec = EndDecomposition {
            core_ids: vec!["0".into(), "1".into(), "2".into()],
            ends: vec![End {
                label: "e".into(),
                ids: vec!["2".into()],
                h: vec![0.0],
                weight: w,
            }],
        };
        assert!(dec.resolve(&space).is_err());
    }

    #[test]
    fn single_end_matches_plain_sharp_norm() {
        let n = 501;
        let h: Vec<f64> = (0..n).map(|i| i as f64 * 0.1).collect();
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let space = ExhaustedSpace::new(ids.clone(), h.clone(), vec![1.0; n], None, None).unwrap();
        let f: Vec<f64> = h.iter().map(|x| (-x).exp() * (3.0 * x).cos()).collect();
        let w = Weight::polynomial(2.0).unwrap();
        let dec = EndDecomposition {
            core_ids: vec![],
            ends: vec![End { label: "e".into(), ids, h: h.clone(), weight: w.clone() }],
        };
        let aniso = aniso_sharp_norm(&space, &f, &dec).unwrap();
        let plain = sharp_norm(&space, &f, &w).unwrap();
        assert!((aniso.value - plain.value).abs() <= 1e-12 * (1.0 + plain.value));
    }

    #[test]
    fn common_limit_yields_small_constant() {
        let (space, xs, dec) = strip();
        let f: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 + x * x)).collect();
        let rep = aniso_asymptotic(&space, &f, &dec, ShellPolicy::default()).unwrap();
        assert_eq!(rep.status, RateStatus::Converges);
        assert!(rep.value.unwrap() <= 1e-3, "C = {:?}", rep.value);
    }

    #[test]
    fn distinct_limits_make_the_class_large() {
        let (space, xs, dec) = strip();
        let f: Vec<f64> = xs.iter().map(|x| x.tanh()).collect();
        let rep = aniso_asymptotic(&space, &f, &dec, ShellPolicy::default()).unwrap();
        assert_eq!(rep.status, RateStatus::Diverges);
        assert!(rep.witness.is_some());
        for pe in &rep.per_end {
            let lim = pe.limit.unwrap();
            assert!((lim.abs() - 1.0).abs() <= 0.01, "limit = {lim}");
            let res = pe.residual.as_ref().unwrap();
            assert_eq!(res.status, RateStatus::Converges);
            assert!(res.value.unwrap() <= 1e-6);
        }
    }

    #[test]
    fn projection_vanishes_and_is_idempotent() {
        let (space, xs, dec) = strip();
        let f: Vec<f64> = xs.iter().map(|x| x.tanh() + 0.2 / (1.0 + x * x)).collect();
        let proj = project_vanishing(&space, &f, &dec, ShellPolicy::default()).unwrap();
        let lims_after = end_limits(&space, &proj.g, &dec, ShellPolicy::default()).unwrap();
        for l in &lims_after {
            assert!(l.limit.abs() <= 1e-12, "{}: {}", l.label, l.limit);
        }
        let twice = project_vanishing(&space, &proj.g, &dec, ShellPolicy::default()).unwrap();
        for (a, b) in proj.g.iter().zip(&twice.g) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn gluing_never_exceeds_global() {
        let (space, xs, dec) = strip();
        let f: Vec<f64> = xs.iter().map(|x| x.tanh() + (0.5 * x).sin() / (1.0 + x.abs())).collect();
        let chk = gluing_check(&space, &f, &dec).unwrap();
        assert!(chk.rhs <= chk.global + 1e-9 * (1.0 + chk.global));
        assert!(chk.ratio >= 1.0 - 1e-9);
    }

    #[test]
    fn per_end_constants_bound_the_global_one() {
        let (space, xs, dec) = strip();
        let f: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 + x * x) + 0.01 * (x / 50.0)).collect();
        let rep = aniso_asymptotic(&space, &f, &dec, ShellPolicy::default()).unwrap();
        if rep.status == RateStatus::Converges {
            let global = rep.value.unwrap();
            for pe in &rep.per_end {
                if let Some(c) = pe.constant {
                    assert!(global >= c - 1e-12, "{}: {c} > {global}", pe.label);
                }
            }
        }
    }
}
