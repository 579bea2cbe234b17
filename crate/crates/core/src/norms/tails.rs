//! Tail functionals and the shell-based limsup estimator.
//!
//! The estimator partitions the sample into geometric annuli, records each
//! annulus's sup and where it is attained, and classifies the last three
//! shells by their log-log growth slope: a profile whose sup still grows like
//! `(1+h)^β` with `β` above a small threshold is called divergent, one whose
//! slopes sit at or below the threshold is called convergent, and mixed signs
//! are reported as inconclusive rather than guessed. Convergent values are
//! Aitken-accelerated when the shell sups drift one-sidedly, which removes
//! the first-order truncation bias of slowly converging profiles.

use crate::error::Error;
use crate::norms::sharp::{weighted_center, Centering};
use crate::space::ExhaustedSpace;
use crate::weights::Weight;
use crate::Result;

/// Values above this cap are reported as diverging rather than as floats.
pub const DIVERGENCE_CAP: f64 = 1e15;
/// Log-log slope separating growth from stagnation across shells.
pub const GROWTH_SLOPE_TOL: f64 = 0.005;
/// Shell sups at or below this are treated as an exact zero tail.
pub const DRIFT_TINY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateStatus {
    Converges,
    Diverges,
    Inconclusive,
}

impl RateStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RateStatus::Converges => "converges",
            RateStatus::Diverges => "diverges",
            RateStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AsymptoticEstimate {
    pub status: RateStatus,
    /// Estimated limsup; present only when status is Converges.
    pub value: Option<f64>,
    pub shells_used: usize,
    /// |s₃ − s₂| / s₃ over the last two shells (0 for a zero tail).
    pub relative_drift: f64,
    /// Log-log slopes of the last two shell steps, when defined.
    pub slopes: Option<(f64, f64)>,
    /// Centering constant the weighted errors were measured against.
    pub center: f64,
}

/// Geometric annulus ladder: radii `r0·ratio^k`, first band reaching down to
/// the smallest sample height, last band capped at the largest.
#[derive(Debug, Clone, Copy)]
pub struct ShellPolicy {
    pub r0: f64,
    pub ratio: f64,
}

impl Default for ShellPolicy {
    fn default() -> Self {
        ShellPolicy { r0: 1.0, ratio: 2.0 }
    }
}

impl ShellPolicy {
    fn validate(&self) -> Result<()> {
        if !self.r0.is_finite() || self.r0 <= 0.0 || !self.ratio.is_finite() || self.ratio <= 1.0 {
            return Err(Error::input(format!(
                "shell policy needs r0 > 0 and ratio > 1, got r0={} ratio={}",
                self.r0, self.ratio
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Shell {
    pub lo: f64,
    #[allow(dead_code)]
    pub hi: f64,
    pub sup: f64,
    pub h_at_sup: f64,
}

/// Nonempty annuli `(lo, hi]` with their sup of `vals` and its height.
pub(crate) fn shell_partition(h: &[f64], vals: &[f64], policy: ShellPolicy) -> Vec<Shell> {
    let hmax = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let hmin = h.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut edges = vec![if hmin <= 0.0 { 0.0 } else { hmin * 0.999999 }];
    let mut r = policy.r0;
    while r < hmax {
        edges.push(r);
        r *= policy.ratio;
    }
    edges.push(hmax);
    let mut out = Vec::new();
    for k in 0..edges.len() - 1 {
        let (lo, hi) = (edges[k], edges[k + 1]);
        let mut best: Option<(f64, f64)> = None;
        for (hh, vv) in h.iter().zip(vals) {
            if lo < *hh && *hh <= hi {
                if best.map_or(true, |(bv, _)| *vv > bv) {
                    best = Some((*vv, *hh));
                }
            }
        }
        if let Some((sup, h_at_sup)) = best {
            out.push(Shell { lo, hi, sup, h_at_sup });
        }
    }
    out
}

/// Classifies the limsup of `vals` (nonnegative weighted errors) along
/// increasing `h` from the last three shells. Needs at least 4 nonempty
/// shells; shallower samples are refused, not guessed.
pub fn estimate_limsup(
    h: &[f64],
    vals: &[f64],
    policy: ShellPolicy,
    center: f64,
) -> Result<AsymptoticEstimate> {
    policy.validate()?;
    if h.len() != vals.len() || h.is_empty() {
        return Err(Error::input("height and value columns must be nonempty and aligned"));
    }
    if h.iter().any(|v| !v.is_finite()) || vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::input("shell estimator needs finite heights and nonnegative values"));
    }
    let sh = shell_partition(h, vals, policy);
    if sh.len() < 4 {
        return Err(Error::insufficient(format!(
            "only {} nonempty shells under the r0={} ratio={} ladder; need 4 — extend the grid",
            sh.len(),
            policy.r0,
            policy.ratio
        )));
    }
    let n = sh.len();
    let (s1, h1) = (sh[n - 3].sup, sh[n - 3].h_at_sup);
    let (s2, h2) = (sh[n - 2].sup, sh[n - 2].h_at_sup);
    let (s3, h3) = (sh[n - 1].sup, sh[n - 1].h_at_sup);
    let relative_drift = if s3 > DRIFT_TINY { (s3 - s2).abs() / s3 } else { 0.0 };
    if s1.max(s2).max(s3) <= DRIFT_TINY {
        return Ok(AsymptoticEstimate {
            status: RateStatus::Converges,
            value: Some(s3),
            shells_used: n,
            relative_drift,
            slopes: None,
            center,
        });
    }
    let gr = |sa: f64, ha: f64, sb: f64, hb: f64| -> f64 {
        if sa <= 0.0 || sb <= 0.0 {
            f64::NEG_INFINITY
        } else {
            (sb / sa).ln() / ((1.0 + hb) / (1.0 + ha)).ln()
        }
    };
    let g1 = gr(s1, h1, s2, h2);
    let g2 = gr(s2, h2, s3, h3);
    let status;
    let mut value = None;
    if g1.min(g2) > GROWTH_SLOPE_TOL {
        status = RateStatus::Diverges;
    } else if g1.max(g2) <= GROWTH_SLOPE_TOL {
        status = RateStatus::Converges;
        let d1 = s2 - s1;
        let d2 = s3 - s2;
        let mut val = s3;
        if (d2 - d1).abs() > 1e-9 * (1.0 + s3.abs()) && d1 * d2 > 0.0 {
            let ait = s3 - d2 * d2 / (d2 - d1);
            if ait.is_finite() {
                val = ait.max(0.0);
            }
        }
        value = Some(val);
    } else {
        status = RateStatus::Inconclusive;
    }
    Ok(AsymptoticEstimate {
        status,
        value,
        shells_used: n,
        relative_drift,
        slopes: Some((g1, g2)),
        center,
    })
}

/// Center used by the sharp variant of [`asymptotic_constant`]: the limit of
/// f, extrapolated from the medians of the last three shells. A minimax
/// center would equioscillate the weighted error across the tail and mask
/// genuine convergence; only the limit itself survives an unbounded weight,
/// and the deepest median alone leaves an offset that the weight magnifies.
/// Aitken acceleration on the shell medians kills that offset for monotone
/// tails; when the medians are not monotone we fall back to the deepest one.
fn tail_center(h: &[f64], f: &[f64], policy: ShellPolicy) -> Result<f64> {
    let sh = shell_partition(h, f, policy);
    if sh.len() < 4 {
        return Err(Error::insufficient(format!(
            "only {} nonempty shells; need 4 for tail centering",
            sh.len()
        )));
    }
    let median = |lo: f64, hi: f64| -> f64 {
        let mut block: Vec<f64> = h
            .iter()
            .zip(f)
            .filter(|(hh, _)| **hh > lo && **hh <= hi)
            .map(|(_, fv)| *fv)
            .collect();
        block.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = block.len();
        if n % 2 == 1 {
            block[n / 2]
        } else {
            0.5 * (block[n / 2 - 1] + block[n / 2])
        }
    };
    let m: Vec<f64> = sh[sh.len() - 3..].iter().map(|s| median(s.lo, s.hi)).collect();
    let (d1, d2) = (m[1] - m[0], m[2] - m[1]);
    if d1 * d2 > 0.0 && (d2 - d1).abs() > 1e-9 * (1.0 + m[2].abs()) {
        let accelerated = m[2] - d2 * d2 / (d2 - d1);
        if accelerated.is_finite() {
            return Ok(accelerated);
        }
    }
    Ok(m[2])
}

/// Estimates `limsup_{h→∞} φ(h)|f − c|` with `c` either supplied (Fixed) or
/// estimated from the deepest shell (Sharp).
pub fn asymptotic_constant(
    space: &ExhaustedSpace,
    f: &[f64],
    w: &Weight,
    centering: Centering,
    policy: ShellPolicy,
) -> Result<AsymptoticEstimate> {
    space.check_sample(f)?;
    let wv = w.eval_many(&space.h)?;
    let c = match centering {
        Centering::Fixed(l) => {
            if !l.is_finite() {
                return Err(Error::input(format!("centering constant must be finite, got {l}")));
            }
            l
        }
        Centering::Sharp => tail_center(&space.h, f, policy)?,
    };
    let vals: Vec<f64> = wv.iter().zip(f).map(|(wi, fi)| wi * (fi - c).abs()).collect();
    estimate_limsup(&space.h, &vals, policy, c)
}

#[derive(Debug, Clone, Copy)]
pub struct LadderEntry {
    pub r: f64,
    /// Sup of the weighted error beyond radius r, at the global sharp center.
    pub tail: f64,
    /// Sup of the weighted error inside radius r, at the same center.
    pub local: f64,
}

#[derive(Debug, Clone)]
pub struct TailLadder {
    pub c_star: f64,
    pub sharp: f64,
    pub entries: Vec<LadderEntry>,
    /// Whether the weighted error profile is nonincreasing in h over the
    /// outer half of the sample — the hypothesis under which a finite tail
    /// bound upgrades to a finite norm.
    pub monotone_tail: bool,
    pub limit_estimate: Option<AsymptoticEstimate>,
}

fn validate_ladder(ladder: &[f64], require_zero: bool) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::input("radius ladder is empty"));
    }
    if ladder.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::input("radius ladder must be finite and >= 0"));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("radius ladder must be strictly increasing"));
    }
    if require_zero && ladder[0] != 0.0 {
        return Err(Error::input("radius ladder must include R = 0"));
    }
    Ok(())
}

/// Tail/local split of the weighted error at the global sharp center, per
/// ladder radius. The tail column is nonincreasing and the local column
/// nondecreasing by construction; both are verified.
pub fn tail_ladder(
    space: &ExhaustedSpace,
    f: &[f64],
    w: &Weight,
    ladder: &[f64],
) -> Result<TailLadder> {
    space.check_sample(f)?;
    validate_ladder(ladder, true)?;
    let wv = w.eval_many(&space.h)?;
    let (c, sharp) = weighted_center(&wv, f);
    let werr: Vec<f64> = wv.iter().zip(f).map(|(wi, fi)| wi * (fi - c).abs()).collect();
    let entries: Vec<LadderEntry> = ladder
        .iter()
        .map(|&r| {
            let mut tail = 0.0_f64;
            let mut local = 0.0_f64;
            for (hh, e) in space.h.iter().zip(&werr) {
                if *hh > r {
                    tail = tail.max(*e);
                } else {
                    local = local.max(*e);
                }
            }
            LadderEntry { r, tail, local }
        })
        .collect();
    for pair in entries.windows(2) {
        if pair[1].tail > pair[0].tail + 1e-12 * (1.0 + pair[0].tail) {
            return Err(Error::assertion(format!(
                "tail sup increased along the ladder: T({}) = {} < T({}) = {}",
                pair[0].r, pair[0].tail, pair[1].r, pair[1].tail
            )));
        }
        if pair[1].local + 1e-12 * (1.0 + pair[1].local) < pair[0].local {
            return Err(Error::assertion(format!(
                "local sup decreased along the ladder at R = {}",
                pair[1].r
            )));
        }
    }
    // profile of max weighted error per distinct height, outer half
    let mut by_h: Vec<(f64, f64)> = space.h.iter().cloned().zip(werr.iter().cloned()).collect();
    by_h.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut profile: Vec<(f64, f64)> = Vec::new();
    for (hh, e) in by_h {
        match profile.last_mut() {
            Some(last) if last.0 == hh => last.1 = last.1.max(e),
            _ => profile.push((hh, e)),
        }
    }
    let outer = &profile[profile.len() / 2..];
    let monotone_tail = outer
        .windows(2)
        .all(|pair| pair[1].1 <= pair[0].1 + 1e-12 * (1.0 + pair[0].1));
    let limit_estimate = estimate_limsup(&space.h, &werr, ShellPolicy::default(), c).ok();
    Ok(TailLadder { c_star: c, sharp, entries, monotone_tail, limit_estimate })
}

#[derive(Debug, Clone, Copy)]
pub struct PatchCheck {
    pub sharp: f64,
    pub patched: f64,
    pub gap: f64,
}

/// `min_R max{local_R, tail_R}` against the sharp norm. Both sides use the
/// same optimal center, so the patched value reproduces the norm exactly
/// whenever the two parts cover the sample.
pub fn patch_check(
    space: &ExhaustedSpace,
    f: &[f64],
    w: &Weight,
    ladder: &[f64],
) -> Result<PatchCheck> {
    space.check_sample(f)?;
    validate_ladder(ladder, false)?;
    let wv = w.eval_many(&space.h)?;
    let (c, sharp) = weighted_center(&wv, f);
    let mut patched = f64::INFINITY;
    for &r in ladder {
        let mut tail = 0.0_f64;
        let mut local = 0.0_f64;
        for i in 0..f.len() {
            let e = wv[i] * (f[i] - c).abs();
            if space.h[i] > r {
                tail = tail.max(e);
            } else {
                local = local.max(e);
            }
        }
        patched = patched.min(tail.max(local));
    }
    Ok(PatchCheck { sharp, patched, gap: patched - sharp })
}

#[derive(Debug, Clone)]
pub struct Truncation {
    /// The truncated sample: f on the core, the tail center past the ramp.
    pub g: Vec<f64>,
    /// Minimax center of the tail {h > R0}.
    pub c: f64,
    /// Tail sup at that center; bounds the sharp norm of f − g.
    pub error_bound: f64,
}

/// Replaces f beyond the ramp `[R0, R1]` by its tail center, interpolating
/// linearly in h. The sharp norm of the difference class is bounded by the
/// tail functional at R0.
pub fn truncate_to_core(
    space: &ExhaustedSpace,
    f: &[f64],
    w: &Weight,
    r0: f64,
    r1: f64,
) -> Result<Truncation> {
    space.check_sample(f)?;
    if !r0.is_finite() || !r1.is_finite() || r1 <= r0 {
        return Err(Error::input(format!("ramp needs R1 > R0, got R0={r0} R1={r1}")));
    }
    let wv = w.eval_many(&space.h)?;
    let mut ws = Vec::new();
    let mut fs = Vec::new();
    for i in 0..f.len() {
        if space.h[i] > r0 {
            ws.push(wv[i]);
            fs.push(f[i]);
        }
    }
    if fs.is_empty() {
        return Err(Error::input(format!("no sample points beyond R0 = {r0}")));
    }
    let (c, error_bound) = weighted_center(&ws, &fs);
    let g: Vec<f64> = space
        .h
        .iter()
        .zip(f)
        .map(|(hh, fi)| {
            let eta = ((r1 - hh) / (r1 - r0)).clamp(0.0, 1.0);
            eta * fi + (1.0 - eta) * c
        })
        .collect();
    Ok(Truncation { g, c, error_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::sharp::sharp_norm;

    fn lingrid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exponential_matched_weight_converges_to_one() {
        let h = lingrid(0.0, 40.0, 4001);
        let f: Vec<f64> = h.iter().map(|x| (-x).exp()).collect();
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let est = asymptotic_constant(
            &space,
            &f,
            &Weight::exponential(1.0).unwrap(),
            Centering::Fixed(0.0),
            ShellPolicy::default(),
        )
        .unwrap();
        assert_eq!(est.status, RateStatus::Converges);
        assert!((est.value.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn undershoot_and_overshoot() {
        let h = lingrid(0.0, 40.0, 4001);
        let f: Vec<f64> = h.iter().map(|x| (-x).exp()).collect();
        let space = ExhaustedSpace::from_heights(h.clone()).unwrap();
        let und = asymptotic_constant(
            &space,
            &f,
            &Weight::exponential(0.5).unwrap(),
            Centering::Fixed(0.0),
            ShellPolicy::default(),
        )
        .unwrap();
        assert_eq!(und.status, RateStatus::Converges);
        assert!(und.value.unwrap() <= 1e-6);
        let over = asymptotic_constant(
            &space,
            &f,
            &Weight::exponential(1.5).unwrap(),
            Centering::Fixed(0.0),
            ShellPolicy::default(),
        )
        .unwrap();
        assert_eq!(over.status, RateStatus::Diverges);
        assert!(over.value.is_none());
    }

    #[test]
    fn shallow_grid_is_refused() {
        let space = ExhaustedSpace::from_heights(lingrid(0.0, 3.0, 50)).unwrap();
        let f = vec![1.0; 50];
        let err = asymptotic_constant(
            &space,
            &f,
            &Weight::polynomial(1.0).unwrap(),
            Centering::Fixed(0.0),
            ShellPolicy::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Insufficient(_)));
    }

    #[test]
    fn sharp_centering_tracks_tail_offset() {
        // f → 7 at infinity; sharp centering should land near 7 and converge
        let h = lingrid(0.0, 200.0, 4001);
        let f: Vec<f64> = h.iter().map(|x| 7.0 + 1.0 / (1.0 + x)).collect();
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let est = asymptotic_constant(
            &space,
            &f,
            &Weight::polynomial(0.5).unwrap(),
            Centering::Sharp,
            ShellPolicy::default(),
        )
        .unwrap();
        assert_eq!(est.status, RateStatus::Converges);
        assert!((est.center - 7.0).abs() < 0.02, "center = {}", est.center);
    }

    #[test]
    fn ladder_split_is_monotone_and_patch_exact() {
        let h = lingrid(0.0, 40.0, 2001);
        let f: Vec<f64> = h.iter().map(|x| (-x).exp() + 0.3 * (x * 0.7).sin() / (1.0 + x)).collect();
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let w = Weight::polynomial(1.0).unwrap();
        let tl = tail_ladder(&space, &f, &w, &[0.0, 5.0, 10.0, 20.0, 40.0]).unwrap();
        for pair in tl.entries.windows(2) {
            assert!(pair[1].tail <= pair[0].tail + 1e-12);
            assert!(pair[1].local >= pair[0].local - 1e-12);
        }
        // last radius covers the sample: local equals the sharp norm there
        let last = tl.entries.last().unwrap();
        assert!((last.local - tl.sharp).abs() <= 1e-12 * (1.0 + tl.sharp));
        assert_eq!(last.tail, 0.0);
        let pc = patch_check(&space, &f, &w, &[0.0, 5.0, 10.0, 20.0, 40.0]).unwrap();
        assert!(pc.gap.abs() <= 1e-9 * (1.0 + pc.sharp));
        // arbitrary interior ladder still never undercuts the norm
        let pc = patch_check(&space, &f, &w, &[3.0, 7.0]).unwrap();
        assert!(pc.gap >= -1e-9 * (1.0 + pc.sharp));
    }

    #[test]
    fn ladder_validation() {
        let space = ExhaustedSpace::from_heights(lingrid(0.0, 40.0, 101)).unwrap();
        let f = vec![0.0; 101];
        let w = Weight::polynomial(1.0).unwrap();
        assert!(tail_ladder(&space, &f, &w, &[]).is_err());
        assert!(tail_ladder(&space, &f, &w, &[1.0, 2.0]).is_err()); // missing 0
        assert!(tail_ladder(&space, &f, &w, &[0.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn constant_sample_has_zero_ladder() {
        let space = ExhaustedSpace::from_heights(lingrid(0.0, 40.0, 101)).unwrap();
        let f = vec![3.25; 101];
        let w = Weight::exponential(1.0).unwrap();
        let tl = tail_ladder(&space, &f, &w, &[0.0, 10.0, 20.0, 30.0]).unwrap();
        assert!(tl.entries.iter().all(|e| e.tail == 0.0 && e.local == 0.0));
        assert_eq!(tl.sharp, 0.0);
        assert!(tl.monotone_tail);
    }

    #[test]
    fn truncation_bounds_the_difference_class() {
        let h = lingrid(0.0, 40.0, 2001);
        let f: Vec<f64> = h.iter().map(|x| (-x).exp()).collect();
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let w = Weight::polynomial(2.0).unwrap();
        let tr = truncate_to_core(&space, &f, &w, 10.0, 20.0).unwrap();
        let diff: Vec<f64> = f.iter().zip(&tr.g).map(|(a, b)| a - b).collect();
        let sharp_diff = sharp_norm(&space, &diff, &w).unwrap().value;
        assert!(
            sharp_diff <= tr.error_bound + 1e-9 * (1.0 + tr.error_bound),
            "{} vs {}",
            sharp_diff,
            tr.error_bound
        );
        // core untouched
        for i in 0..f.len() {
            if space.h[i] <= 10.0 {
                assert_eq!(f[i], tr.g[i]);
            }
        }
    }

    #[test]
    fn truncation_of_eventually_constant_sample_is_exact() {
        let h = lingrid(0.0, 30.0, 301);
        let f: Vec<f64> = h.iter().map(|x| if *x > 8.0 { 4.0 } else { 4.0 + (8.0 - x) }).collect();
        let space = ExhaustedSpace::from_heights(h).unwrap();
        let w = Weight::polynomial(1.0).unwrap();
        let tr = truncate_to_core(&space, &f, &w, 10.0, 15.0).unwrap();
        assert_eq!(tr.error_bound, 0.0);
        assert_eq!(tr.c, 4.0);
        assert_eq!(tr.g, f);
    }

    #[test]
    fn truncation_validation() {
        let space = ExhaustedSpace::from_heights(lingrid(0.0, 5.0, 11)).unwrap();
        let f = vec![0.0; 11];
        let w = Weight::polynomial(1.0).unwrap();
        assert!(truncate_to_core(&space, &f, &w, 3.0, 2.0).is_err());
        assert!(truncate_to_core(&space, &f, &w, 9.0, 12.0).is_err());
    }
}
