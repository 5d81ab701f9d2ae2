//! Two-user rate regions: linear constraints plus a sampled boundary.

use serde::Serialize;

use crate::scalar::Real;

/// Default number of boundary samples.
pub const BOUNDARY_POINTS: usize = 512;

/// `a1·R1 + a2·R2 ≤ c`, rates in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Halfplane<T> {
    pub name: String,
    pub a1: T,
    pub a2: T,
    pub c: T,
}

impl<T: Real> Halfplane<T> {
    pub fn new(name: impl Into<String>, a1: T, a2: T, c: T) -> Self {
        Self {
            name: name.into(),
            a1,
            a2,
            c,
        }
    }

    /// Largest `R2` allowed at `r1`; `+∞` if the constraint ignores `R2`
    /// and is met, `-∞` if `r1` alone violates it.
    pub fn max_r2(&self, r1: T) -> T {
        if self.a2 > T::zero() {
            (self.c - self.a1 * r1) / self.a2
        } else if self.a1 * r1 <= self.c + T::tol(1e-12) {
            T::infinity()
        } else {
            T::neg_infinity()
        }
    }

    pub fn slack(&self, r1: T, r2: T) -> T {
        self.c - self.a1 * r1 - self.a2 * r2
    }
}

/// A convex region in the nonnegative quadrant, described by `R2_max(R1)` on
/// a grid of `R1` values. `-∞` marks an `R1` outside the region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegion<T> {
    pub halfplanes: Vec<Halfplane<T>>,
    pub r1: Vec<T>,
    pub r2: Vec<T>,
}

/// `n` evenly spaced points on `[0, r1_max]`.
pub fn r1_grid<T: Real>(r1_max: T, n: usize) -> Vec<T> {
    let n = n.max(2);
    let last = T::of_usize(n - 1);
    (0..n).map(|i| r1_max * T::of_usize(i) / last).collect()
}

impl<T: Real> RateRegion<T> {
    /// Boundary computed from the constraints; `R2` is clipped at zero from
    /// below only when already negative (marked infeasible).
    pub fn from_halfplanes(halfplanes: Vec<Halfplane<T>>, grid: Vec<T>) -> Self {
        let r2 = grid.iter().map(|&x| envelope(&halfplanes, x)).collect();
        Self {
            halfplanes,
            r1: grid,
            r2,
        }
    }

    pub fn from_curve(grid: Vec<T>, r2: Vec<T>) -> Self {
        assert_eq!(grid.len(), r2.len());
        let r2 = r2.into_iter().map(normalize).collect();
        Self {
            halfplanes: Vec::new(),
            r1: grid,
            r2,
        }
    }

    pub fn len(&self) -> usize {
        self.r1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r1.is_empty()
    }

    /// Exact value from the halfplanes (for halfplane-defined regions).
    pub fn halfplane_r2(&self, r1: T) -> T {
        envelope(&self.halfplanes, r1)
    }

    /// Pointwise intersection on a shared grid.
    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.r1, other.r1, "regions must share an R1 grid");
        let mut halfplanes = self.halfplanes.clone();
        halfplanes.extend(other.halfplanes.iter().cloned());
        Self {
            halfplanes,
            r1: self.r1.clone(),
            r2: self.r2.iter().zip(&other.r2).map(|(&a, &b)| a.min(b)).collect(),
        }
    }

    /// Largest sampled `R1 + R2`.
    pub fn max_sum(&self) -> T {
        self.r1
            .iter()
            .zip(&self.r2)
            .filter(|(_, r2)| r2.is_finite())
            .fold(T::neg_infinity(), |m, (&a, &b)| m.max(a + b))
    }

    /// Upper estimate of `max (R1 + R2)` valid for a nonincreasing boundary:
    /// between consecutive samples the sum is at most `r1[i+1] + r2[i]`.
    pub fn max_sum_upper(&self) -> T {
        let n = self.len();
        let mut best = self.max_sum();
        for i in 0..n.saturating_sub(1) {
            if self.r2[i].is_finite() {
                best = best.max(self.r1[i + 1] + self.r2[i]);
            }
        }
        best
    }

    pub fn max_r1(&self) -> T {
        self.r1
            .iter()
            .zip(&self.r2)
            .filter(|(_, r2)| r2.is_finite())
            .fold(T::neg_infinity(), |m, (&a, _)| m.max(a))
    }

    /// Membership by the sampled boundary (linear interpolation) and the
    /// constraints, with absolute slack `tol`.
    pub fn contains(&self, r1: T, r2: T, tol: T) -> bool {
        if r1 < -tol || r2 < -tol {
            return false;
        }
        if self.halfplanes.iter().any(|h| h.slack(r1, r2) < -tol) {
            return false;
        }
        let b = self.interpolate(r1);
        b.is_finite() && r2 <= b + tol
    }

    /// Linear interpolation of the boundary; `-∞` outside the grid or where
    /// either neighbour is infeasible.
    pub fn interpolate(&self, r1: T) -> T {
        let n = self.len();
        if n == 0 || r1 < self.r1[0] || r1 > self.r1[n - 1] {
            return T::neg_infinity();
        }
        let i = self.r1.partition_point(|&x| x <= r1).clamp(1, n - 1);
        let (x0, x1) = (self.r1[i - 1], self.r1[i]);
        let (y0, y1) = (self.r2[i - 1], self.r2[i]);
        if r1 == x0 {
            return y0;
        }
        if !(y0.is_finite() && y1.is_finite()) {
            return if r1 == x1 { y1 } else { T::neg_infinity() };
        }
        y0 + (y1 - y0) * (r1 - x0) / (x1 - x0)
    }

    /// Least concave majorant of the feasible samples, evaluated on the grid.
    pub fn upper_concave_envelope(&self) -> Self {
        let pts: Vec<(T, T)> = self
            .r1
            .iter()
            .zip(&self.r2)
            .filter(|(_, y)| y.is_finite())
            .map(|(&x, &y)| (x, y))
            .collect();
        let mut hull: Vec<(T, T)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // drop b if it lies on or below the chord a→p
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross >= T::zero() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let r2 = self
            .r1
            .iter()
            .map(|&x| {
                if hull.is_empty() || x < hull[0].0 || x > hull[hull.len() - 1].0 {
                    return T::neg_infinity();
                }
                let i = hull.partition_point(|h| h.0 <= x).clamp(1, hull.len().max(2) - 1);
                if hull.len() == 1 {
                    return hull[0].1;
                }
                let (a, b) = (hull[i - 1], hull[i]);
                if x == a.0 {
                    a.1
                } else {
                    a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
                }
            })
            .collect();
        Self {
            halfplanes: self.halfplanes.clone(),
            r1: self.r1.clone(),
            r2,
        }
    }
}

/// Negative `R2` bounds mean the `R1` value is infeasible.
fn normalize<T: Real>(v: T) -> T {
    if v.is_nan() || v < T::zero() {
        T::neg_infinity()
    } else {
        v
    }
}

/// Exact `max (w1·R1 + w2·R2)` over the polygon cut out by `hps` and the
/// nonnegative quadrant, by vertex enumeration. `-∞` if the polygon is empty.
pub fn halfplane_max_weighted<T: Real>(hps: &[Halfplane<T>], w1: T, w2: T) -> T {
    let z = T::zero();
    let mut lines: Vec<(T, T, T)> = hps.iter().map(|h| (h.a1, h.a2, h.c)).collect();
    lines.push((-T::one(), z, z));
    lines.push((z, -T::one(), z));
    let tol = T::tol(1e-9);
    let mut best = T::neg_infinity();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a, b, c) = lines[i];
            let (d, e, f) = lines[j];
            let det = a * e - b * d;
            if det.abs() <= T::tol(1e-15) {
                continue;
            }
            let x = (c * e - b * f) / det;
            let y = (a * f - c * d) / det;
            let feasible = lines.iter().all(|&(p, q, r)| p * x + q * y <= r + tol * r.abs().max(T::one()));
            if feasible {
                best = best.max(w1 * x + w2 * y);
            }
        }
    }
    best
}

fn envelope<T: Real>(hps: &[Halfplane<T>], r1: T) -> T {
    normalize(hps.iter().fold(T::infinity(), |m, h| m.min(h.max_r2(r1))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> RateRegion<f64> {
        let hps = vec![
            Halfplane::new("R1", 1.0, 0.0, 1.0),
            Halfplane::new("R2", 0.0, 1.0, 1.0),
            Halfplane::new("sum", 1.0, 1.0, 1.5),
        ];
        RateRegion::from_halfplanes(hps, r1_grid(1.2, 13))
    }

    #[test]
    fn boundary_from_constraints() {
        let r = square();
        assert_eq!(r.r2[0], 1.0);
        assert!((r.r2[10] - 0.5).abs() < 1e-12);
        assert_eq!(r.r2[12], f64::NEG_INFINITY);
        assert!((r.max_sum() - 1.5).abs() < 1e-12);
        assert!(r.contains(0.5, 0.9, 1e-12));
        assert!(!r.contains(0.9, 0.9, 1e-12));
    }

    #[test]
    fn upper_estimate_dominates_samples() {
        let r = square();
        assert!(r.max_sum_upper() >= r.max_sum());
        assert!(r.max_sum_upper() <= 1.5 + 0.1 + 1e-12);
    }

    #[test]
    fn concave_envelope_fills_dents() {
        let g = r1_grid(1.0, 5);
        let r = RateRegion::from_curve(g, vec![1.0_f64, 0.5, 0.6, 0.2, 0.0]);
        let e = r.upper_concave_envelope();
        assert!(e.r2.iter().zip(&r.r2).all(|(a, b)| a >= b));
        // chord from (0,1) to (0.5,0.6) passes 0.8 at 0.25
        assert!((e.r2[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn vertex_max_sum() {
        let r = square();
        assert!((halfplane_max_weighted(&r.halfplanes, 1.0, 1.0) - 1.5).abs() < 1e-12);
        assert!((halfplane_max_weighted(&r.halfplanes, 2.0, 1.0) - 2.5).abs() < 1e-12);
        let empty = vec![Halfplane::new("neg", 1.0, 1.0, -1.0)];
        assert_eq!(halfplane_max_weighted(&empty, 1.0, 1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn intersection_is_pointwise_min() {
        let a = square();
        let hps = vec![Halfplane::new("R2", 0.0, 1.0, 0.7)];
        let b = RateRegion::from_halfplanes(hps, a.r1.clone());
        let c = a.intersect(&b);
        assert!(c.r2.iter().zip(&a.r2).all(|(x, y)| x <= y));
        assert_eq!(c.halfplanes.len(), 4);
    }
}
