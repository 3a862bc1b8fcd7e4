use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest admissible ratio between consecutive gaps of a geometric grid.
pub const MAX_GEOMETRIC_RATIO: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Spacing<T> {
    Uniform,
    /// Consecutive gaps grow by this ratio away from the inner radius.
    Geometric(T),
}

/// Interior nodes of the annulus `(ε, R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid<T> {
    pub epsilon: T,
    pub r_outer: T,
    pub nodes: Vec<T>,
    pub spacing: Spacing<T>,
}

impl<T: Real> RadialGrid<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Gap between node `i` and its left neighbour (`ε` for `i = 0`).
    pub fn gap_left(&self, i: usize) -> T {
        let left = if i == 0 {
            self.epsilon
        } else {
            self.nodes[i - 1]
        };
        self.nodes[i] - left
    }

    /// Gap between node `i` and its right neighbour (`R` for the last node).
    pub fn gap_right(&self, i: usize) -> T {
        let right = self.nodes.get(i + 1).copied().unwrap_or(self.r_outer);
        right - self.nodes[i]
    }

    pub fn min_gap(&self) -> T {
        (0..=self.len())
            .map(|i| {
                if i == self.len() {
                    self.gap_right(i - 1)
                } else {
                    self.gap_left(i)
                }
            })
            .fold(T::infinity(), T::min)
    }

    /// Evaluate `f` at every node.
    pub fn sample(&self, f: impl Fn(T) -> T) -> Vec<T> {
        self.nodes.iter().map(|&r| f(r)).collect()
    }

    /// Linear interpolation of nodal `values` at `r`, using the nodes only
    /// (no boundary values); clamps outside the node range.
    pub fn interpolate(&self, values: &[T], r: T) -> T {
        let nodes = &self.nodes;
        if r <= nodes[0] {
            return values[0];
        }
        if r >= nodes[nodes.len() - 1] {
            return values[values.len() - 1];
        }
        let k = nodes.partition_point(|&x| x <= r);
        let (r0, r1) = (nodes[k - 1], nodes[k]);
        let w = (r - r0) / (r1 - r0);
        values[k - 1] * (T::one() - w) + values[k] * w
    }

    /// Geometric grid whose first gap is at most `first_gap_fraction * ε`;
    /// the node count grows like `log(R/ε)`.
    pub fn graded(epsilon: T, r_outer: T, ratio: T, first_gap_fraction: T) -> Result<Self> {
        if !(first_gap_fraction > T::zero()) {
            return Err(Error::Domain("first gap fraction must be positive".into()));
        }
        check_ratio(ratio)?;
        if !(epsilon > T::zero() && epsilon < r_outer) {
            return Err(Error::Domain(format!(
                "grid needs 0 < eps < R, got ({epsilon}, {r_outer})"
            )));
        }
        let target = first_gap_fraction * epsilon;
        let gaps = ((T::one() + (r_outer - epsilon) * (ratio - T::one()) / target).ln()
            / ratio.ln())
        .ceil()
        .to_usize()
        .ok_or_else(|| Error::Domain("grid too large".into()))?;
        build_grid(epsilon, r_outer, gaps.max(4) - 1, Spacing::Geometric(ratio))
    }
}

fn check_ratio<T: Real>(q: T) -> Result<()> {
    if !(q >= T::one() && q <= T::lit(MAX_GEOMETRIC_RATIO)) {
        return Err(Error::Domain(format!(
            "geometric ratio must lie in [1, {MAX_GEOMETRIC_RATIO}], got {q}"
        )));
    }
    Ok(())
}

/// `count` interior nodes of `(ε, R)`.
pub fn build_grid<T: Real>(
    epsilon: T,
    r_outer: T,
    count: usize,
    spacing: Spacing<T>,
) -> Result<RadialGrid<T>> {
    if !(epsilon > T::zero() && epsilon < r_outer && r_outer.is_finite()) {
        return Err(Error::Domain(format!(
            "grid needs 0 < eps < R < inf, got ({epsilon}, {r_outer})"
        )));
    }
    if count < 3 {
        return Err(Error::Domain(format!(
            "grid needs at least 3 nodes, got {count}"
        )));
    }
    let width = r_outer - epsilon;
    let gaps = count + 1;
    let nodes: Vec<T> = match spacing {
        Spacing::Uniform => (1..=count)
            .map(|k| epsilon + width * T::from_count(k) / T::from_count(gaps))
            .collect(),
        Spacing::Geometric(q) => {
            check_ratio(q)?;
            if q == T::one() {
                return build_grid(epsilon, r_outer, count, Spacing::Uniform)
                    .map(|g| RadialGrid { spacing, ..g });
            }
            // h_k = h0 q^k, k = 0..count, summing to R - ε
            let h0 = width * (q - T::one()) / (q.powi(gaps as i32) - T::one());
            let mut r = epsilon;
            let mut h = h0;
            let mut nodes = Vec::with_capacity(count);
            for _ in 0..count {
                r = r + h;
                nodes.push(r);
                h = h * q;
            }
            nodes
        }
    };
    let ok =
        nodes[0] > epsilon && nodes[count - 1] < r_outer && nodes.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(Error::Domain(
            "grid nodes not strictly increasing inside (eps, R); reduce count or ratio".into(),
        ));
    }
    Ok(RadialGrid {
        epsilon,
        r_outer,
        nodes,
        spacing,
    })
}
