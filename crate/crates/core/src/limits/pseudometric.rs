//! Uniform limit of identified distance matrices.

use serde::Serialize;

use super::DistanceMatrix;
use crate::error::{Error, Result};

/// Tails at or below this are treated as zero.
pub const TAIL_TOLERANCE: f64 = 1e-9;
/// Slack allowed in the pseudo-metric axioms.
pub const AXIOM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitVerdict {
    Converged,
    NoConvergence,
}

#[derive(Debug, Clone, Serialize)]
pub struct PseudoMetric {
    /// Estimate of the limit: the last member's matrix.
    pub limit: DistanceMatrix,
    /// `sup |d_j - d_k|` for every pair of members.
    pub deviations: Vec<Vec<f64>>,
    /// `tails[j] = max_{k > j} sup |d_j - d_k|`.
    pub tails: Vec<f64>,
    pub strictly_decreasing: bool,
    pub verdict: LimitVerdict,
    pub zeta: f64,
    /// Classes of samples joined by limit distances below `zeta`, singletons omitted.
    pub zero_classes: Vec<Vec<usize>>,
    pub max_triangle_violation: f64,
    pub max_diagonal: f64,
    pub min_off_diagonal: f64,
    pub axioms_hold: bool,
}

impl PseudoMetric {
    /// Whether all listed samples share one zero-class.
    pub fn same_class(&self, samples: &[usize]) -> bool {
        samples.len() < 2
            || self
                .zero_classes
                .iter()
                .any(|c| samples.iter().all(|s| c.binary_search(s).is_ok()))
    }
}

fn zero_classes(d: &DistanceMatrix, zeta: f64) -> Vec<Vec<usize>> {
    let n = d.size;
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for i in 0..n {
        for j in i + 1..n {
            if d.get(i, j) < zeta {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut classes: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = root(&mut parent, i);
        classes.entry(r).or_default().push(i);
    }
    classes.into_values().filter(|c| c.len() > 1).collect()
}

/// Cauchy analysis of a sequence of matrices on identified samples.
///
/// Convergence is declared when the tails strictly decrease or all vanish.
pub fn limit_pseudometric(matrices: &[DistanceMatrix], zeta: f64) -> Result<PseudoMetric> {
    let m = matrices.len();
    if m < 3 {
        return Err(Error::Config(format!(
            "a limit needs at least 3 members, got {m}"
        )));
    }
    if !(zeta >= 0.0) {
        return Err(Error::Config(format!(
            "zero-class threshold must be nonnegative, got {zeta}"
        )));
    }
    let mut deviations = vec![vec![0.0; m]; m];
    for j in 0..m {
        for k in j + 1..m {
            let dev = matrices[j].uniform_deviation(&matrices[k])?;
            deviations[j][k] = dev;
            deviations[k][j] = dev;
        }
    }
    let tails: Vec<f64> = (0..m - 1)
        .map(|j| deviations[j][j + 1..].iter().copied().fold(0.0, f64::max))
        .collect();
    let strictly_decreasing = tails.windows(2).all(|w| w[1] < w[0]);
    let vanishing = tails.iter().all(|&t| t <= TAIL_TOLERANCE);
    let limit = matrices[m - 1].clone();
    let max_triangle_violation = limit.max_triangle_violation();
    let (min_off_diagonal, max_diagonal) = limit.extremes();
    let axioms_hold = max_triangle_violation <= AXIOM_TOLERANCE
        && max_diagonal <= AXIOM_TOLERANCE
        && min_off_diagonal >= -AXIOM_TOLERANCE;
    Ok(PseudoMetric {
        zero_classes: zero_classes(&limit, zeta),
        limit,
        deviations,
        tails,
        strictly_decreasing,
        verdict: if strictly_decreasing || vanishing {
            LimitVerdict::Converged
        } else {
            LimitVerdict::NoConvergence
        },
        zeta,
        max_triangle_violation,
        max_diagonal,
        min_off_diagonal,
        axioms_hold,
    })
}
