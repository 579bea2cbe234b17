//! Sampled exhausted spaces.
//!
//! A space is a finite sample of points carrying an exhaustion height
//! `h ≥ 0`, a point mass `μ > 0`, and optionally coordinates and a discrete
//! membership level (the index of the first compact piece containing the
//! point). Everything downstream — norms, tails, rates — consumes this
//! columnar form.

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone)]
pub struct ExhaustedSpace {
    pub ids: Vec<String>,
    pub h: Vec<f64>,
    pub mu: Vec<f64>,
    /// Optional point coordinates, uniform dimension.
    pub coords: Option<Vec<Vec<f64>>>,
    /// Optional membership level per point (0 = not yet inside any piece).
    pub membership: Option<Vec<u32>>,
}

impl ExhaustedSpace {
    pub fn new(
        ids: Vec<String>,
        h: Vec<f64>,
        mu: Vec<f64>,
        coords: Option<Vec<Vec<f64>>>,
        membership: Option<Vec<u32>>,
    ) -> Result<ExhaustedSpace> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::input("space has no points"));
        }
        if h.len() != n || mu.len() != n {
            return Err(Error::input(format!(
                "column lengths disagree: {} ids, {} h, {} mu",
                n,
                h.len(),
                mu.len()
            )));
        }
        {
            let mut seen = std::collections::HashSet::with_capacity(n);
            for id in &ids {
                if !seen.insert(id.as_str()) {
                    return Err(Error::input(format!("duplicate point id `{id}`")));
                }
            }
        }
        for (i, &v) in h.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::input(format!("h must be finite and >= 0, got {v} at `{}`", ids[i])));
            }
        }
        for (i, &v) in mu.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::input(format!("mu must be finite and > 0, got {v} at `{}`", ids[i])));
            }
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(Error::input("coordinate column length disagrees with ids"));
            }
            let d = c[0].len();
            if d == 0 {
                return Err(Error::input("coordinates must have dimension >= 1"));
            }
            for (i, row) in c.iter().enumerate() {
                if row.len() != d {
                    return Err(Error::input(format!("mixed coordinate dimensions at `{}`", ids[i])));
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::input(format!("non-finite coordinate at `{}`", ids[i])));
                }
            }
        }
        if let Some(m) = &membership {
            if m.len() != n {
                return Err(Error::input("membership column length disagrees with ids"));
            }
            // deeper pieces must sit at least as far out: the smallest h seen
            // on each level may not decrease with the level
            let mut min_h: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
            for (&lvl, &hv) in m.iter().zip(&h) {
                let e = min_h.entry(lvl).or_insert(f64::INFINITY);
                if hv < *e {
                    *e = hv;
                }
            }
            let mut prev = f64::NEG_INFINITY;
            for (lvl, hv) in min_h {
                if hv < prev - 1e-12 {
                    return Err(Error::input(format!(
                        "membership level {lvl} reaches h={hv}, below an earlier level"
                    )));
                }
                prev = prev.max(hv);
            }
        }
        Ok(ExhaustedSpace { ids, h, mu, coords, membership })
    }

    /// Space with unit masses and ids "0", "1", ... — the common test shape.
    pub fn from_heights(h: Vec<f64>) -> Result<ExhaustedSpace> {
        let n = h.len();
        ExhaustedSpace::new(
            (0..n).map(|i| i.to_string()).collect(),
            h,
            vec![1.0; n],
            None,
            None,
        )
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn max_h(&self) -> f64 {
        self.h.iter().cloned().fold(0.0, f64::max)
    }

    /// Checks that `f` is a sample over this space: right length, all finite.
    pub fn check_sample(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::input(format!(
                "sample has {} values but the space has {} points",
                f.len(),
                self.len()
            )));
        }
        if let Some(i) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("non-finite sample value at `{}`", self.ids[i])));
        }
        Ok(())
    }
}

/// A named function sample over a space.
#[derive(Debug, Clone)]
pub struct FunctionSample {
    pub name: String,
    pub values: Vec<f64>,
}

/// Builds a height function from membership levels. Level 0 maps to 0; level
/// `m ≥ 1` maps to `(m−2)(m−1)/2 + (m−1)·frac` with the per-point annulus
/// fraction `frac ∈ [0, 1]` (1 when absent), so successive levels tile
/// consecutive height bands and the result is monotone in the level.
pub fn build_exhaustion_from_membership(
    membership: &[u32],
    fraction: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if let Some(fr) = fraction {
        if fr.len() != membership.len() {
            return Err(Error::input("fraction column length disagrees with membership"));
        }
        if let Some(&bad) = fr.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(Error::input(format!("annulus fraction {bad} outside [0, 1]")));
        }
    }
    Ok(membership
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            if m == 0 {
                0.0
            } else {
                let m = m as f64;
                let frac = fraction.map_or(1.0, |fr| fr[i]);
                (m - 2.0) * (m - 1.0) / 2.0 + (m - 1.0) * frac
            }
        })
        .collect())
}

// -------------------------------------------------- coarse affine bounds --

/// Affine envelope `a·x + b ≤ y ≤ A·x + B` fitted to paired heights.
#[derive(Debug, Clone, Copy)]
pub struct CoarseAffine {
    pub upper_slope: f64,
    pub upper_intercept: f64,
    pub lower_slope: f64,
    pub lower_intercept: f64,
}

impl CoarseAffine {
    /// `(1 + max(A, 1/a) + max(|B|, |b|))^p`, a bound on the ratio of
    /// polynomial-weight norms transported through the envelope. Needs a
    /// strictly increasing lower bound (`a > 0`).
    pub fn norm_ratio_bound(&self, p: f64) -> Result<f64> {
        if self.lower_slope <= 0.0 {
            return Err(Error::input(format!(
                "norm-ratio bound needs lower slope > 0, got {}",
                self.lower_slope
            )));
        }
        let slope = self.upper_slope.max(1.0 / self.lower_slope);
        let shift = self.upper_intercept.abs().max(self.lower_intercept.abs());
        Ok((1.0 + slope + shift).powf(p))
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Upper and lower convex hulls of a point cloud, as vertex lists with
/// strictly increasing x. Input must be sorted by (x, y).
fn hulls(pts: &[(f64, f64)]) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    upper.reverse();
    (upper, lower)
}

/// Hull edge whose x-span contains `x_bar`; ties at a vertex take the edge
/// to its right. Returns (slope, intercept).
fn edge_at(hull: &[(f64, f64)], x_bar: f64) -> (f64, f64) {
    if hull.len() == 1 {
        return (0.0, hull[0].1);
    }
    let mut j = 0;
    while j + 2 < hull.len() && x_bar >= hull[j + 1].0 {
        j += 1;
    }
    let (x0, y0) = hull[j];
    let (x1, y1) = hull[j + 1];
    let slope = (y1 - y0) / (x1 - x0);
    (slope, y0 - slope * x0)
}

/// Fits the tightest (mean-absolute-deviation optimal) affine envelope
/// `a·x + b ≤ y ≤ A·x + B` to the pairs `(x_i, y_i)`. Both lines support the
/// convex hull of the cloud, at the hull edges straddling the mean of x.
/// Needs at least two distinct x values.
pub fn fit_coarse_affine(x: &[f64], y: &[f64]) -> Result<CoarseAffine> {
    if x.len() != y.len() {
        return Err(Error::input("paired height columns have different lengths"));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::input("non-finite value in paired heights"));
    }
    let mut pts: Vec<(f64, f64)> = x.iter().cloned().zip(y.iter().cloned()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let distinct_x = {
        let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        xs.dedup();
        xs.len()
    };
    if distinct_x < 2 {
        return Err(Error::insufficient(
            "affine envelope needs at least two distinct heights",
        ));
    }
    let x_bar = x.iter().sum::<f64>() / x.len() as f64;
    let (upper, lower) = hulls(&pts);
    let (us, ui) = edge_at(&upper, x_bar);
    let (ls, li) = edge_at(&lower, x_bar);
    Ok(CoarseAffine {
        upper_slope: us,
        upper_intercept: ui,
        lower_slope: ls,
        lower_intercept: li,
    })
}

// ------------------------------------------------------- volume growth --

#[derive(Debug, Clone)]
pub struct VolumeGrowth {
    /// Fitted growth exponent of `V(R)` against `(1+R)`.
    pub gamma: f64,
    /// Smallest constant with `V(R) ≤ c·(1+R)^γ` over the fit range.
    pub c_fit: f64,
    /// `(R, V(R))` for every ladder radius.
    pub ladder: Vec<(f64, f64)>,
}

/// Measures `V(R) = μ{h ≤ R}` along a strictly increasing radius ladder and
/// fits `log V` against `log(1+R)` by least squares over the outer half of
/// the ladder. Small or flat ladders are rejected rather than fitted.
pub fn fit_volume_growth(space: &ExhaustedSpace, ladder: &[f64]) -> Result<VolumeGrowth> {
    if ladder.is_empty() {
        return Err(Error::input("volume ladder is empty"));
    }
    if ladder.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::input("volume ladder radii must be finite and >= 0"));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("volume ladder must be strictly increasing"));
    }
    let volumes: Vec<(f64, f64)> = ladder
        .iter()
        .map(|&r| {
            let v = space
                .h
                .iter()
                .zip(&space.mu)
                .filter(|(h, _)| **h <= r)
                .map(|(_, m)| m)
                .sum::<f64>();
            (r, v)
        })
        .collect();
    let positive: Vec<(f64, f64)> = volumes.iter().cloned().filter(|(_, v)| *v > 0.0).collect();
    if positive.len() < 4 {
        return Err(Error::insufficient(format!(
            "only {} ladder radii capture any mass; need at least 4",
            positive.len()
        )));
    }
    let outer = &positive[positive.len() / 2..];
    {
        let mut vs: Vec<f64> = outer.iter().map(|(_, v)| *v).collect();
        vs.dedup();
        if vs.len() < 2 {
            return Err(Error::insufficient(
                "volume is flat over the outer ladder; growth exponent is not identifiable",
            ));
        }
    }
    let xs: Vec<f64> = outer.iter().map(|(r, _)| (1.0 + r).ln()).collect();
    let ys: Vec<f64> = outer.iter().map(|(_, v)| v.ln()).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let gamma = sxy / sxx;
    let c_fit = outer
        .iter()
        .map(|(r, v)| v / (1.0 + r).powf(gamma))
        .fold(0.0, f64::max);
    Ok(VolumeGrowth { gamma, c_fit, ladder: volumes })
}

// ---------------------------------------------------------- graph ends --

/// Undirected graph whose nodes carry membership levels.
#[derive(Debug, Clone)]
pub struct Graph {
    pub node_ids: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub levels: Vec<u32>,
}

impl Graph {
    pub fn new(node_ids: Vec<String>, edges: Vec<(usize, usize)>, levels: Vec<u32>) -> Result<Graph> {
        let n = node_ids.len();
        if n == 0 {
            return Err(Error::input("graph has no nodes"));
        }
        if levels.len() != n {
            return Err(Error::input("graph level column length disagrees with nodes"));
        }
        {
            let mut seen = std::collections::HashSet::with_capacity(n);
            for id in &node_ids {
                if !seen.insert(id.as_str()) {
                    return Err(Error::input(format!("duplicate graph node id `{id}`")));
                }
            }
        }
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::input(format!("edge ({u}, {v}) references a missing node")));
            }
        }
        Ok(Graph { node_ids, edges, levels })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

#[derive(Debug, Clone)]
pub struct EndsReport {
    /// Components of the subgraph above the deepest inspected threshold.
    pub ends: usize,
    /// True when every consecutive threshold pair in the window matches
    /// components one-to-one.
    pub stable: bool,
    /// Length of the run of one-to-one steps counted down from the top.
    pub stability_depth: usize,
    /// Component count per inspected threshold, deepest first.
    pub components_per_level: Vec<usize>,
}

/// Counts connected components of `{level > t}` for the top `window`
/// thresholds `t = L−window, …, L−1` (`L` = deepest level present) and
/// tracks how components split or die between consecutive thresholds.
pub fn detect_graph_ends(graph: &Graph, window: u32) -> Result<EndsReport> {
    let top = graph.levels.iter().cloned().max().unwrap_or(0);
    if window == 0 {
        return Err(Error::input("ends window must be >= 1"));
    }
    if window > top {
        return Err(Error::input(format!(
            "ends window {window} exceeds the deepest level {top}"
        )));
    }
    let n = graph.node_ids.len();
    // component label per node for each threshold, deepest threshold first
    let thresholds: Vec<u32> = (top - window..top).collect();
    let mut labels: Vec<Vec<Option<usize>>> = Vec::with_capacity(thresholds.len());
    let mut counts = Vec::with_capacity(thresholds.len());
    for &t in &thresholds {
        let keep: Vec<bool> = graph.levels.iter().map(|&m| m > t).collect();
        let mut uf = UnionFind::new(n);
        for &(u, v) in &graph.edges {
            if keep[u] && keep[v] {
                uf.union(u, v);
            }
        }
        let mut roots: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        let mut lab = vec![None; n];
        for i in 0..n {
            if keep[i] {
                let r = uf.find(i);
                let next = roots.len();
                let c = *roots.entry(r).or_insert(next);
                lab[i] = Some(c);
            }
        }
        counts.push(roots.len());
        labels.push(lab);
    }
    // step k joins thresholds[k] (coarser) and thresholds[k+1] (finer):
    // one-to-one iff distinct finer components land in distinct coarser ones
    // and every coarser component receives one
    let steps = thresholds.len().saturating_sub(1);
    let mut bijective = vec![true; steps];
    for k in 0..steps {
        let coarse = &labels[k];
        let fine = &labels[k + 1];
        let mut image: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        let mut injective = true;
        for i in 0..n {
            if let Some(fc) = fine[i] {
                let cc = coarse[i].expect("finer set is contained in coarser set");
                match image.entry(fc) {
                    std::collections::hash_map::Entry::Occupied(e) => {
                        if *e.get() != cc {
                            injective = false;
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(cc);
                    }
                }
            }
        }
        let hit: std::collections::HashSet<usize> = image.values().cloned().collect();
        let surjective = hit.len() == counts[k];
        let distinct_images: std::collections::HashSet<usize> = image.values().cloned().collect();
        let one_to_one = injective && surjective && distinct_images.len() == counts[k + 1];
        bijective[k] = one_to_one;
    }
    let mut depth = 0;
    for k in (0..steps).rev() {
        if bijective[k] {
            depth += 1;
        } else {
            break;
        }
    }
    Ok(EndsReport {
        ends: counts[0],
        stable: bijective.iter().all(|b| *b),
        stability_depth: depth,
        components_per_level: counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_heights() {
        let m = [0u32, 1, 2, 3, 4];
        let h = build_exhaustion_from_membership(&m, None).unwrap();
        assert_eq!(h, vec![0.0, 0.0, 1.0, 3.0, 6.0]);
        let frac = [1.0, 0.5, 0.5, 0.5, 0.5];
        let h = build_exhaustion_from_membership(&m, Some(&frac)).unwrap();
        assert_eq!(h, vec![0.0, 0.0, 0.5, 2.0, 4.5]);
        // monotone in level whatever the fractions
        assert!(h.windows(2).all(|w| w[0] <= w[1]));
        assert!(build_exhaustion_from_membership(&m, Some(&[2.0; 5])).is_err());
    }

    #[test]
    fn space_validation() {
        assert!(ExhaustedSpace::from_heights(vec![]).is_err());
        assert!(ExhaustedSpace::from_heights(vec![1.0, -2.0]).is_err());
        assert!(ExhaustedSpace::new(
            vec!["a".into(), "a".into()],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            None,
            None
        )
        .is_err());
        // membership levels may not reach below an earlier level
        assert!(ExhaustedSpace::new(
            vec!["a".into(), "b".into()],
            vec![5.0, 1.0],
            vec![1.0, 1.0],
            None,
            Some(vec![1, 2])
        )
        .is_err());
    }

    #[test]
    fn affine_envelope_of_oscillation() {
        let x: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = x.iter().map(|&t| t + t.sin()).collect();
        let ca = fit_coarse_affine(&x, &y).unwrap();
        for (&xi, &yi) in x.iter().zip(&y) {
            assert!(yi <= ca.upper_slope * xi + ca.upper_intercept + 1e-9);
            assert!(yi >= ca.lower_slope * xi + ca.lower_intercept - 1e-9);
        }
        // the envelope hugs y = x ± 1
        assert!((ca.upper_slope - 1.0).abs() < 1e-3);
        assert!((ca.upper_intercept - 1.0).abs() < 1e-2);
        assert!((ca.lower_slope - 1.0).abs() < 1e-3);
        assert!((ca.lower_intercept + 1.0).abs() < 1e-2);
        let bound = ca.norm_ratio_bound(2.0).unwrap();
        assert!(bound >= 1.0 && bound.is_finite());
    }

    #[test]
    fn affine_envelope_degenerate() {
        assert!(fit_coarse_affine(&[1.0, 1.0], &[2.0, 3.0]).is_err());
        assert!(fit_coarse_affine(&[1.0], &[2.0]).is_err());
    }

    #[test]
    fn affine_envelope_exact_line() {
        let x = [0.0, 1.0, 2.0, 5.0];
        let y: Vec<f64> = x.iter().map(|&t| 3.0 * t + 2.0).collect();
        let ca = fit_coarse_affine(&x, &y).unwrap();
        assert!((ca.upper_slope - 3.0).abs() < 1e-12);
        assert!((ca.upper_intercept - 2.0).abs() < 1e-12);
        assert!((ca.lower_slope - 3.0).abs() < 1e-12);
        assert!((ca.lower_intercept - 2.0).abs() < 1e-12);
    }

    #[test]
    fn volume_growth_on_a_line() {
        // unit masses at integer heights: V(R) ≈ R + 1, so γ ≈ 1
        let space = ExhaustedSpace::from_heights((0..500).map(|i| i as f64).collect()).unwrap();
        let ladder: Vec<f64> = (0..9).map(|k| 2.0_f64.powi(k)).collect();
        let vg = fit_volume_growth(&space, &ladder).unwrap();
        assert!((vg.gamma - 1.0).abs() < 0.05, "gamma = {}", vg.gamma);
        for (r, v) in &vg.ladder[vg.ladder.len() / 2..] {
            assert!(*v <= vg.c_fit * (1.0 + r).powf(vg.gamma) + 1e-9);
        }
    }

    #[test]
    fn volume_growth_guards() {
        let space = ExhaustedSpace::from_heights(vec![0.0, 1.0, 2.0]).unwrap();
        assert!(fit_volume_growth(&space, &[1.0, 2.0]).is_err());
        // flat outer half
        let flat = ExhaustedSpace::from_heights(vec![0.0, 0.5, 0.6, 0.7]).unwrap();
        assert!(fit_volume_growth(&flat, &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0]).is_err());
    }

    fn path_graph(n: usize, center: usize) -> Graph {
        // levels grow with distance from `center`
        let ids = (0..n).map(|i| i.to_string()).collect();
        let edges = (0..n - 1).map(|i| (i, i + 1)).collect();
        let levels = (0..n).map(|i| (i as i64 - center as i64).unsigned_abs() as u32 + 1).collect();
        Graph::new(ids, edges, levels).unwrap()
    }

    #[test]
    fn path_has_two_ends() {
        let g = path_graph(41, 20);
        let rep = detect_graph_ends(&g, 6).unwrap();
        assert_eq!(rep.ends, 2);
        assert!(rep.stable);
        assert_eq!(rep.stability_depth, 5);
        assert_eq!(rep.components_per_level, vec![2; 6]);
    }

    #[test]
    fn star_has_arm_count_ends() {
        // 4 arms of length 12 glued at a hub
        let arms = 4;
        let len = 12;
        let n = 1 + arms * len;
        let ids = (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        let mut edges = Vec::new();
        let mut levels = vec![1u32; n];
        for a in 0..arms {
            for j in 0..len {
                let node = 1 + a * len + j;
                let prev = if j == 0 { 0 } else { node - 1 };
                edges.push((prev, node));
                levels[node] = j as u32 + 2;
            }
        }
        let g = Graph::new(ids, edges, levels).unwrap();
        let rep = detect_graph_ends(&g, 5).unwrap();
        assert_eq!(rep.ends, 4);
        assert!(rep.stable);
    }

    #[test]
    fn grid_has_one_end() {
        // 21x21 grid, levels = sup-distance from the middle
        let side = 21i64;
        let mid = 10i64;
        let idx = |x: i64, y: i64| (x * side + y) as usize;
        let mut ids = Vec::new();
        let mut levels = Vec::new();
        let mut edges = Vec::new();
        for x in 0..side {
            for y in 0..side {
                ids.push(format!("{x}_{y}"));
                levels.push(((x - mid).abs().max((y - mid).abs()) + 1) as u32);
                if x + 1 < side {
                    edges.push((idx(x, y), idx(x + 1, y)));
                }
                if y + 1 < side {
                    edges.push((idx(x, y), idx(x, y + 1)));
                }
            }
        }
        let g = Graph::new(ids, edges, levels).unwrap();
        let rep = detect_graph_ends(&g, 5).unwrap();
        assert_eq!(rep.ends, 1);
        assert!(rep.stable);
    }

    #[test]
    fn dying_branch_breaks_stability() {
        // a path with a short stub near one end: the stub's component dies
        // partway up the window
        let mut g = path_graph(41, 20);
        let stub_anchor = 35; // level 16
        let base = g.node_ids.len();
        for j in 0..3usize {
            g.node_ids.push(format!("stub{j}"));
            g.levels.push(17 + j as u32);
            g.edges.push(if j == 0 { (stub_anchor, base) } else { (base + j - 1, base + j) });
        }
        let g = Graph::new(g.node_ids, g.edges, g.levels).unwrap();
        let rep = detect_graph_ends(&g, 8).unwrap();
        assert!(!rep.stable);
        assert!(rep.stability_depth < 7);
    }

    #[test]
    fn ends_window_validation() {
        let g = path_graph(9, 4);
        assert!(detect_graph_ends(&g, 0).is_err());
        assert!(detect_graph_ends(&g, 99).is_err());
    }

    #[test]
    fn ends_invariant_under_relabeling() {
        let g = path_graph(31, 15);
        // reverse node order
        let n = g.node_ids.len();
        let perm: Vec<usize> = (0..n).rev().collect();
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let ids2 = perm.iter().map(|&o| g.node_ids[o].clone()).collect();
        let levels2 = perm.iter().map(|&o| g.levels[o]).collect();
        let edges2 = g.edges.iter().map(|&(u, v)| (inv[u], inv[v])).collect();
        let g2 = Graph::new(ids2, edges2, levels2).unwrap();
        let a = detect_graph_ends(&g, 6).unwrap();
        let b = detect_graph_ends(&g2, 6).unwrap();
        assert_eq!(a.ends, b.ends);
        assert_eq!(a.stable, b.stable);
        assert_eq!(a.stability_depth, b.stability_depth);
        assert_eq!(a.components_per_level, b.components_per_level);
    }
}
