//! Small derivative-free solvers: bisection and Nelder–Mead.

use crate::scalar::Real;

/// Largest `x ∈ [lo, hi]` (to within `tol`) for which `pred` holds, assuming
/// `pred` is true on `[lo, x*]` and false beyond. Returns `lo` if `pred(lo)`
/// fails and `hi` if `pred(hi)` holds.
pub fn bisect_last_true<T: Real>(mut lo: T, mut hi: T, tol: T, mut pred: impl FnMut(T) -> bool) -> T {
    if !pred(lo) {
        return lo;
    }
    if pred(hi) {
        return hi;
    }
    while hi - lo > tol {
        let mid = (lo + hi) * T::half();
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Root of a continuous `f` with `f(lo)` and `f(hi)` of opposite signs.
pub fn bisect_root<T: Real>(mut lo: T, mut hi: T, tol: T, mut f: impl FnMut(T) -> T) -> Option<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Some(lo);
    }
    if fhi == T::zero() {
        return Some(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return None;
    }
    while hi - lo > tol {
        let mid = (lo + hi) * T::half();
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Some(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some((lo + hi) * T::half())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Stop when the simplex value spread falls below this.
    pub f_tol: f64,
    /// Stop when the simplex diameter falls below this.
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iter: 400,
            f_tol: 1e-13,
            x_tol: 1e-10,
        }
    }
}

impl NelderMead {
    /// Minimizes `f` from `x0` with initial simplex offsets `step`.
    /// Infeasible points should evaluate to `+∞`; a `-∞` value ends the
    /// search immediately.
    pub fn minimize<T: Real>(&self, mut f: impl FnMut(&[T]) -> T, x0: &[T], step: &[T]) -> (Vec<T>, T) {
        let n = x0.len();
        let mut pts: Vec<Vec<T>> = Vec::with_capacity(n + 1);
        pts.push(x0.to_vec());
        for i in 0..n {
            let mut p = x0.to_vec();
            p[i] = p[i] + step[i];
            pts.push(p);
        }
        let mut vals: Vec<T> = pts.iter().map(|p| f(p)).collect();
        let (alpha, gamma, rho, sigma) = (T::one(), T::two(), T::half(), T::half());
        let nn = T::of_usize(n);
        for _ in 0..self.max_iter {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();
            if vals[0] == T::neg_infinity() {
                break;
            }
            let spread = vals[n] - vals[0];
            let diam = pts[1..]
                .iter()
                .flat_map(|p| p.iter().zip(&pts[0]).map(|(&a, &b)| (a - b).abs()))
                .fold(T::zero(), |m, d| m.max(d));
            if vals[n].is_finite() && spread.abs() <= T::lit(self.f_tol) && diam <= T::lit(self.x_tol) {
                break;
            }
            if diam <= T::lit(self.x_tol) * T::lit(1e-3) {
                break;
            }
            let centroid: Vec<T> = (0..n)
                .map(|k| pts[..n].iter().fold(T::zero(), |a, p| a + p[k]) / nn)
                .collect();
            let along = |coef: T| -> Vec<T> {
                centroid
                    .iter()
                    .zip(&pts[n])
                    .map(|(&c, &w)| c + coef * (c - w))
                    .collect()
            };
            let xr = along(alpha);
            let fr = f(&xr);
            if fr < vals[0] {
                let xe = along(gamma);
                let fe = f(&xe);
                if fe < fr {
                    pts[n] = xe;
                    vals[n] = fe;
                } else {
                    pts[n] = xr;
                    vals[n] = fr;
                }
                continue;
            }
            if fr < vals[n - 1] {
                pts[n] = xr;
                vals[n] = fr;
                continue;
            }
            let (xc, fc) = if fr < vals[n] {
                let xc = along(rho);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
                continue;
            }
            // shrink toward the best vertex
            for i in 1..=n {
                let p: Vec<T> = pts[0]
                    .iter()
                    .zip(&pts[i])
                    .map(|(&b, &x)| b + sigma * (x - b))
                    .collect();
                vals[i] = f(&p);
                pts[i] = p;
            }
        }
        let best = (0..=n)
            .min_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        (pts[best].clone(), vals[best])
    }
}
