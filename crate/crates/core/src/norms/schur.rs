//! Schur-type boundedness test for integral kernels on the sample.
//!
//! For `Tf(x) = Σ_y K(x,y) f(y) μ(y)` the weighted-sup operator norm is
//! controlled by the row constant `C₁ = max_x Σ_y K(x,y) W(x)/W(y) μ(y)`:
//! each output error is an average of input errors with those coefficients.
//! The column constant `C₂` is the usual companion for interpolation against
//! L¹ and is reported alongside. The guarantee concerns the seminorm over
//! constants only when the kernel is row-stochastic (so T fixes constants);
//! for general bounded kernels the empirical ratio is still measured and
//! checked against C₁, since `sharp(Tf) ≤ C₁·sup W|f|`-type bounds degrade
//! gracefully when probes are centered.

use crate::error::Error;
use crate::norms::sharp::sharp_norm;
use crate::space::ExhaustedSpace;
use crate::weights::Weight;
use crate::Result;

/// Dense nonnegative kernel K(x,y), row index = output point.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub entries: Vec<Vec<f64>>,
}

impl Kernel {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::input("kernel is empty"));
        }
        for row in &entries {
            if row.len() != n {
                return Err(Error::input(format!(
                    "kernel must be square: row of length {} in a {}-point kernel",
                    row.len(),
                    n
                )));
            }
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::input("kernel entries must be finite and >= 0"));
            }
        }
        Ok(Kernel { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Moving-average kernel on a path: row x averages the window of radius
    /// `radius` around x, weighted by μ, rows normalized to sum 1 against μ.
    pub fn moving_average(space: &ExhaustedSpace, radius: usize) -> Result<Self> {
        let n = space.len();
        if n == 0 {
            return Err(Error::input("empty space"));
        }
        let mut entries = vec![vec![0.0; n]; n];
        for x in 0..n {
            let lo = x.saturating_sub(radius);
            let hi = (x + radius).min(n - 1);
            let mass: f64 = (lo..=hi).map(|y| space.mu[y]).sum();
            for y in lo..=hi {
                entries[x][y] = 1.0 / mass;
            }
        }
        Ok(Kernel { entries })
    }
}

#[derive(Debug, Clone)]
pub struct SchurReport {
    /// max_x Σ_y K(x,y) W(x)/W(y) μ(y) — the operator-norm bound.
    pub c1: f64,
    /// max_y Σ_x K(x,y) μ(x).
    pub c2: f64,
    /// Both constants finite.
    pub bounded: bool,
    /// Largest observed sharp(Tf)/sharp(f) over the probe set.
    pub empirical_ratio: f64,
    pub probes_used: usize,
}

/// Applies the kernel to a sample: `Tf(x) = Σ_y K(x,y) f(y) μ(y)`.
pub fn apply_kernel(space: &ExhaustedSpace, kernel: &Kernel, f: &[f64]) -> Result<Vec<f64>> {
    space.check_sample(f)?;
    if kernel.len() != space.len() {
        return Err(Error::input(format!(
            "kernel size {} does not match sample size {}",
            kernel.len(),
            space.len()
        )));
    }
    Ok(kernel
        .entries
        .iter()
        .map(|row| row.iter().zip(f).zip(&space.mu).map(|((k, v), m)| k * v * m).sum())
        .collect())
}

/// Computes both Schur constants and stress-tests the row bound on the
/// probes: any observed ratio above C₁ is a refutation and comes back as an
/// assertion error, not a report field.
pub fn schur_test(
    space: &ExhaustedSpace,
    kernel: &Kernel,
    w: &Weight,
    probes: &[Vec<f64>],
) -> Result<SchurReport> {
    if kernel.len() != space.len() {
        return Err(Error::input(format!(
            "kernel size {} does not match space size {}",
            kernel.len(),
            space.len()
        )));
    }
    let wv = w.eval_many(&space.h)?;
    let n = space.len();
    let mut c1 = 0.0_f64;
    for x in 0..n {
        let mut row = 0.0;
        for y in 0..n {
            row += kernel.entries[x][y] * wv[x] / wv[y] * space.mu[y];
        }
        c1 = c1.max(row);
    }
    let mut c2 = 0.0_f64;
    for y in 0..n {
        let mut col = 0.0;
        for x in 0..n {
            col += kernel.entries[x][y] * space.mu[x];
        }
        c2 = c2.max(col);
    }
    let mut empirical_ratio = 0.0_f64;
    let mut probes_used = 0;
    for f in probes {
        let nf = sharp_norm(space, f, w)?.value;
        if nf <= 1e-12 {
            continue;
        }
        let tf = apply_kernel(space, kernel, f)?;
        let ntf = sharp_norm(space, &tf, w)?.value;
        empirical_ratio = empirical_ratio.max(ntf / nf);
        probes_used += 1;
    }
    if empirical_ratio > c1 + 1e-9 * (1.0 + c1) {
        return Err(Error::assertion(format!(
            "observed ratio {empirical_ratio} exceeds the row bound C1 = {c1}"
        )));
    }
    Ok(SchurReport { c1, c2, bounded: c1.is_finite() && c2.is_finite(), empirical_ratio, probes_used })
}
