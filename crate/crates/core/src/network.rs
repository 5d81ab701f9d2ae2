//! M-user networks: many-to-one and one-to-many certificates, the vector
//! genie, and the three-user symmetric smart-genie search.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{build_gaussian_system, labels, GenieSpec, GenieSpec3Sym, InterferenceNetwork, LinearSignal};
use crate::error::{Error, Result};
use crate::linalg::eig2;
use crate::scalar::{half_log2, to_db, Real};
use crate::search::bisect_last_true;

/// A cyclic permutation of the users (zero-based), `pi[r] = π(r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderingFunction {
    pi: Vec<usize>,
}

impl OrderingFunction {
    /// Validates range, the orbit of the first user, and `π^M = id`, in that
    /// order; the error names the first violated property.
    pub fn new(pi: Vec<usize>) -> Result<Self> {
        let m = pi.len();
        if m == 0 {
            return Err(Error::InvalidOrdering("range: empty ordering".into()));
        }
        if let Some((r, &t)) = pi.iter().enumerate().find(|(_, &t)| t >= m) {
            return Err(Error::InvalidOrdering(format!(
                "range: π({}) = {} is not a user in 1..={m}",
                r + 1,
                t + 1
            )));
        }
        let mut seen = vec![false; m];
        let mut r = 0;
        for _ in 0..m {
            seen[r] = true;
            r = pi[r];
        }
        if let Some(miss) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidOrdering(format!(
                "orbit: the orbit of user 1 never reaches user {}",
                miss + 1
            )));
        }
        let f = Self { pi };
        if let Some(r) = (0..m).find(|&r| f.pow(r, m) != r) {
            return Err(Error::InvalidOrdering(format!("periodicity: π^{m}({}) ≠ {}", r + 1, r + 1)));
        }
        Ok(f)
    }

    /// From one-based images, as written in the literature.
    pub fn from_one_based(pi: &[usize]) -> Result<Self> {
        if pi.contains(&0) {
            return Err(Error::InvalidOrdering("range: user indices start at 1".into()));
        }
        Self::new(pi.iter().map(|&t| t - 1).collect())
    }

    /// `r → r+1 (mod M)`.
    pub fn cyclic(m: usize) -> Result<Self> {
        Self::new((0..m).map(|r| (r + 1) % m).collect())
    }

    /// All orderings of `m` users (the `(m−1)!` cyclic permutations).
    pub fn all(m: usize) -> Vec<Self> {
        fn extend(order: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
            if order.len() == used.len() {
                out.push(order.clone());
                return;
            }
            for t in 1..used.len() {
                if !used[t] {
                    used[t] = true;
                    order.push(t);
                    extend(order, used, out);
                    order.pop();
                    used[t] = false;
                }
            }
        }
        if m == 0 {
            return Vec::new();
        }
        let mut used = vec![false; m];
        used[0] = true;
        let mut cycles = Vec::new();
        extend(&mut vec![0], &mut used, &mut cycles);
        cycles
            .into_iter()
            .map(|cyc| {
                let mut pi = vec![0; m];
                for k in 0..m {
                    pi[cyc[k]] = cyc[(k + 1) % m];
                }
                Self { pi }
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn apply(&self, r: usize) -> usize {
        self.pi[r]
    }

    /// `π^k(r)`
    pub fn pow(&self, mut r: usize, k: usize) -> usize {
        for _ in 0..k {
            r = self.pi[r];
        }
        r
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.pi
    }
}

/// Side information `S_{r,k} = Y_{π^k(r)}` with `X_{π(r)}, …, X_{π^k(r)}`
/// removed, `k = 1..M−1`. Each signal keeps the noise of the receiver it
/// was taken from.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorGenie<T> {
    pi: OrderingFunction,
    signals: Vec<Vec<LinearSignal<T>>>,
}

impl<T: Real> VectorGenie<T> {
    pub fn new(net: &InterferenceNetwork<T>, pi: &OrderingFunction) -> Result<Self> {
        let m = net.users();
        if pi.len() != m {
            return Err(Error::InvalidOrdering(format!(
                "range: ordering covers {} users, network has {m}",
                pi.len()
            )));
        }
        let signals = (0..m)
            .map(|r| {
                (1..m)
                    .map(|k| {
                        let q = pi.pow(r, k);
                        let mut x: Vec<T> = (0..m).map(|t| net.gain(q, t)).collect();
                        for j in 1..=k {
                            x[pi.pow(r, j)] = T::zero();
                        }
                        LinearSignal { x, noise: q }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { pi: pi.clone(), signals })
    }

    pub fn cyclic(net: &InterferenceNetwork<T>) -> Result<Self> {
        Self::new(net, &OrderingFunction::cyclic(net.users())?)
    }

    pub fn users(&self) -> usize {
        self.signals.len()
    }

    pub fn ordering(&self) -> &OrderingFunction {
        &self.pi
    }

    /// `[S_{r,1}, …, S_{r,M−1}]`
    pub fn signals(&self, r: usize) -> &[LinearSignal<T>] {
        &self.signals[r]
    }

    /// The last signal of every receiver carries no interference: apart from
    /// `X_r` it is pure noise.
    pub fn last_signal_interference_free(&self) -> bool {
        let m = self.users();
        (0..m).all(|r| {
            self.signals[r]
                .last()
                .is_none_or(|s| s.x.iter().enumerate().all(|(t, &c)| t == r || c == T::zero()))
        })
    }

    /// `S_r = Ỹ_{π(r)} \ X_{π(r)}` with `Ỹ_q = [Y_q, S_{q,1}, …, S_{q,M−2}]`,
    /// checked on coefficient vectors and noise indices.
    pub fn stacking_identity(&self, net: &InterferenceNetwork<T>) -> bool {
        let m = self.users();
        (0..m).all(|r| {
            let q = self.pi.apply(r);
            (0..m - 1).all(|k| {
                let s = &self.signals[r][k];
                let (mut x, noise) = if k == 0 {
                    ((0..m).map(|t| net.gain(q, t)).collect::<Vec<T>>(), q)
                } else {
                    let prev = &self.signals[q][k - 1];
                    (prev.x.clone(), prev.noise)
                };
                x[q] = T::zero();
                x == s.x && noise == s.noise
            })
        })
    }
}

/// `build_vector_genie(net, π)`
pub fn build_vector_genie<T: Real>(net: &InterferenceNetwork<T>, pi: &OrderingFunction) -> Result<VectorGenie<T>> {
    VectorGenie::new(net, pi)
}

/// `Σ_i I(X_i; Y_i, S_i)` for any vector-valued genie (vector or three-user).
pub fn genie_sum_bound_m<T: Real>(net: &InterferenceNetwork<T>, genie: &GenieSpec<T>) -> Result<T> {
    let m = net.users();
    let sys = build_gaussian_system(net, Some(genie))?;
    let mut total = T::zero();
    for i in 0..m {
        let mut obs = vec![labels::y(i)];
        obs.extend((1..m).map(|k| labels::s_k(i, k)));
        let obs_ref: Vec<&str> = obs.iter().map(String::as_str).collect();
        total = total + sys.mutual_information(&[&labels::x(i)], &obs_ref)?;
    }
    Ok(total)
}

/// Sum-capacity outer bound of the vector genie for ordering `pi`.
pub fn vector_genie_sum_bound<T: Real>(net: &InterferenceNetwork<T>, pi: &OrderingFunction) -> Result<T> {
    genie_sum_bound_m(net, &GenieSpec::Vector(VectorGenie::new(net, pi)?))
}

/// Treating interference as noise at every receiver.
pub fn m_user_tin_sum_rate<T: Real>(net: &InterferenceNetwork<T>) -> T {
    (0..net.users()).fold(T::zero(), |acc, r| {
        acc + half_log2(T::one() + net.power(r) / net.interference_plus_noise(r))
    })
}

fn single_user_sum<T: Real>(net: &InterferenceNetwork<T>, skip: usize) -> T {
    (0..net.users())
        .filter(|&r| r != skip)
        .fold(T::zero(), |acc, r| acc + half_log2(T::one() + net.power(r)))
}

/// Sum capacity of an M-user network when a certificate applies; otherwise
/// TIN as inner value and an outer value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkSumCapacity<T> {
    pub established: bool,
    pub inner: T,
    pub outer: T,
}

/// Best outer value available without a certificate: the vector genie over
/// every ordering and the sum of single-user capacities.
pub fn network_outer_bound<T: Real>(net: &InterferenceNetwork<T>) -> Result<T> {
    let mut best = single_user_sum(net, usize::MAX);
    for pi in OrderingFunction::all(net.users()) {
        best = best.min(vector_genie_sum_bound(net, &pi)?);
    }
    Ok(best)
}

fn not_established<T: Real>(net: &InterferenceNetwork<T>) -> Result<NetworkSumCapacity<T>> {
    Ok(NetworkSumCapacity {
        established: false,
        inner: m_user_tin_sum_rate(net),
        outer: network_outer_bound(net)?,
    })
}

/// `Σ_{i≥2} h_{1i}²`
pub fn many_to_one_value<T: Real>(net: &InterferenceNetwork<T>) -> Result<T> {
    if !net.is_many_to_one() {
        return Err(Error::Domain("network is not many-to-one".into()));
    }
    Ok((1..net.users()).fold(T::zero(), |a, i| a + net.gain(0, i) * net.gain(0, i)))
}

pub fn many_to_one_test<T: Real>(net: &InterferenceNetwork<T>) -> Result<bool> {
    Ok(many_to_one_value(net)? <= T::one())
}

/// Only receiver 1 sees interference. The interference term in the first
/// rate includes the unit noise, which makes the value equal to TIN.
pub fn many_to_one_sum_capacity<T: Real>(net: &InterferenceNetwork<T>) -> Result<NetworkSumCapacity<T>> {
    if !many_to_one_test(net)? {
        return not_established(net);
    }
    let interference = (1..net.users()).fold(T::zero(), |a, i| a + net.inr(0, i));
    let v = half_log2(T::one() + net.power(0) / (T::one() + interference)) + single_user_sum(net, 0);
    Ok(NetworkSumCapacity {
        established: true,
        inner: v,
        outer: v,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneToManyTest<T> {
    pub holds: bool,
    /// `Σ_{i≥2} (h_{i1}²P1 + h_{i1}²)/(h_{i1}²P1 + 1)`
    pub value: T,
    /// Weights `λ_i` (users 2..M) on the simplex, each above its threshold.
    pub lambdas: Option<Vec<T>>,
}

pub fn one_to_many_test<T: Real>(net: &InterferenceNetwork<T>) -> Result<OneToManyTest<T>> {
    if !net.is_one_to_many() {
        return Err(Error::Domain("network is not one-to-many".into()));
    }
    let p1 = net.power(0);
    let thresholds: Vec<T> = (1..net.users())
        .map(|i| {
            let g = net.gain(i, 0) * net.gain(i, 0);
            (g * p1 + g) / (g * p1 + T::one())
        })
        .collect();
    let value = thresholds.iter().fold(T::zero(), |a, &t| a + t);
    let holds = value <= T::one();
    let lambdas = holds.then(|| {
        let share = (T::one() - value) / T::of_usize(thresholds.len());
        thresholds.iter().map(|&t| t + share).collect()
    });
    Ok(OneToManyTest { holds, value, lambdas })
}

pub fn one_to_many_sum_capacity<T: Real>(net: &InterferenceNetwork<T>) -> Result<NetworkSumCapacity<T>> {
    if !one_to_many_test(net)?.holds {
        return not_established(net);
    }
    let p1 = net.power(0);
    let v = (1..net.users()).fold(half_log2(T::one() + p1), |a, i| {
        a + half_log2(T::one() + net.power(i) / (net.inr(i, 0) + T::one()))
    });
    Ok(NetworkSumCapacity {
        established: true,
        inner: v,
        outer: v,
    })
}

// ---------------------------------------------------------------------------
// three-user symmetric genie

/// `(η1ρ1, η2ρ2)` required for the three-user genie to be smart.
pub fn three_user_smart_conditions<T: Real>(p: T, h: T) -> (T, T) {
    let base = T::one() + T::two() * h * h * p;
    (base - h * p, base)
}

/// Entries `(D11, D12, D22)` of
/// `Cov([Z1, hη1W11] | W12) − Cov([hη1W11, hη2W12])`.
pub fn three_user_useful_matrix<T: Real>(h: T, rho1: T, rho2: T, rho12: T, eta1: T, eta2: T) -> (T, T, T) {
    let a = h * eta1;
    let b = h * eta2;
    let o = T::one();
    (
        o - rho2 * rho2 - a * a,
        a * rho1 - a * rho2 * rho12 - a * b * rho12,
        a * a * (o - rho12 * rho12) - b * b,
    )
}

const PSD_TOL: f64 = 1e-10;

/// Usefulness of a three-user symmetric genie.
pub fn three_user_useful_test<T: Real>(h: T, genie: &GenieSpec3Sym<T>) -> Result<bool> {
    if !genie.sigma().is_psd_within(T::lit(PSD_TOL)) {
        return Err(Error::InvalidGenie("Σ is not positive semidefinite".into()));
    }
    let (d11, d12, d22) =
        three_user_useful_matrix(h, genie.rho1(), genie.rho2(), genie.rho12(), genie.eta1, genie.eta2);
    Ok(eig2(d11, d12, d22).0 >= -T::lit(PSD_TOL))
}

/// Conditional leaks `I(X1; S_{1,k} | Y1)` for `k = 1, 2`.
pub fn three_user_smart_leak<T: Real>(net: &InterferenceNetwork<T>, genie: &GenieSpec3Sym<T>) -> Result<(T, T)> {
    let sys = build_gaussian_system(net, Some(&GenieSpec::ThreeUserSym(genie.clone())))?;
    Ok((
        sys.conditional_mutual_information(&["X1"], &[&labels::s_k(0, 1)], &["Y1"])?,
        sys.conditional_mutual_information(&["X1"], &[&labels::s_k(0, 2)], &["Y1"])?,
    ))
}

/// Grid of the feasibility search over `(ρ1, ρ2, ρ12)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilitySearch {
    pub rho_max: f64,
    pub step: f64,
    /// Step of the single refinement pass around the best candidate.
    pub fine_step: f64,
}

impl Default for FeasibilitySearch {
    fn default() -> Self {
        Self {
            rho_max: 0.999,
            step: 0.01,
            fine_step: 0.0005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityWitness<T> {
    pub rho1: T,
    pub rho2: T,
    pub rho12: T,
    pub eta1: T,
    pub eta2: T,
}

impl<T: Real> FeasibilityWitness<T> {
    pub fn genie(&self) -> Result<GenieSpec3Sym<T>> {
        GenieSpec3Sym::new(self.rho1, self.rho2, self.rho12, self.eta1, self.eta2)
    }
}

/// Worst violation of `Σ ⪰ 0` and `D ⪰ 0` at a point (nonnegative means
/// feasible), with `η` pinned by the smart conditions.
fn feasibility_score<T: Real>(h: T, targets: (T, T), rho: [T; 3]) -> Option<(T, FeasibilityWitness<T>)> {
    let [r1, r2, r12] = rho;
    if r1 == T::zero() || r2 == T::zero() {
        return None;
    }
    let (eta1, eta2) = (targets.0 / r1, targets.1 / r2);
    if eta1 < T::zero() || eta2 < T::zero() {
        return None;
    }
    let o = T::one();
    let det = o + T::two() * r1 * r2 * r12 - r1 * r1 - r2 * r2 - r12 * r12;
    let sigma_ok = det >= -T::lit(PSD_TOL) && r1.abs() <= o && r2.abs() <= o && r12.abs() <= o;
    let (d11, d12, d22) = three_user_useful_matrix(h, r1, r2, r12, eta1, eta2);
    let score = eig2(d11, d12, d22).0.min(if sigma_ok { T::zero() } else { det });
    Some((
        score,
        FeasibilityWitness {
            rho1: r1,
            rho2: r2,
            rho12: r12,
            eta1,
            eta2,
        },
    ))
}

fn axis<T: Real>(lo: f64, hi: f64, step: f64) -> Vec<T> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| T::lit(lo + step * i as f64)).collect()
}

/// First feasible witness and best-scoring witness of a scan.
type CubeScan<T> = (Option<FeasibilityWitness<T>>, Option<(T, FeasibilityWitness<T>)>);

/// Scans the cube in lexicographic `(ρ1, ρ2, ρ12)` order; returns the first
/// feasible point and the best-scoring one.
fn scan_cube<T: Real>(
    h: T,
    targets: (T, T),
    a1: &[T],
    a2: &[T],
    a12: &[T],
) -> CubeScan<T> {
    let tol = -T::lit(PSD_TOL);
    let slices: Vec<CubeScan<T>> = a1
        .par_iter()
        .map(|&r1| {
            let mut best: Option<(T, FeasibilityWitness<T>)> = None;
            for &r2 in a2 {
                for &r12 in a12 {
                    let Some((s, w)) = feasibility_score(h, targets, [r1, r2, r12]) else {
                        continue;
                    };
                    if s >= tol {
                        return (Some(w), None);
                    }
                    if best.as_ref().is_none_or(|b| s > b.0) {
                        best = Some((s, w));
                    }
                }
            }
            (None, best)
        })
        .collect();
    let mut best: Option<(T, FeasibilityWitness<T>)> = None;
    for (hit, b) in slices {
        if hit.is_some() {
            return (hit, None);
        }
        if let Some(b) = b {
            if best.as_ref().is_none_or(|x| b.0 > x.0) {
                best = Some(b);
            }
        }
    }
    (None, best)
}

/// Searches for a useful and smart three-user genie. The reported witness
/// is the lexicographically smallest feasible grid point; when the coarse
/// grid has none, one finer pass around the best candidate follows.
pub fn three_user_feasible<T: Real>(p: T, h: T, search: &FeasibilitySearch) -> Option<FeasibilityWitness<T>> {
    let targets = three_user_smart_conditions(p, h);
    let full: Vec<T> = axis(-search.rho_max, search.rho_max, search.step);
    // η ≥ 0 forces sign(ρᵢ) = sign(targetᵢ)
    let signed = |t: T| -> Vec<T> {
        full.iter()
            .copied()
            .filter(|&r| if t >= T::zero() { r > T::zero() } else { r < T::zero() })
            .collect()
    };
    let (a1, a2) = (signed(targets.0), signed(targets.1));
    let (hit, best) = scan_cube(h, targets, &a1, &a2, &full);
    if hit.is_some() {
        return hit;
    }
    let (_, b) = best?;
    let around = |c: T| -> Vec<T> {
        let c = c.as_f64();
        let lo = (c - search.step).max(-search.rho_max);
        let hi = (c + search.step).min(search.rho_max);
        axis(lo, hi, search.fine_step)
    };
    let (hit, _) = scan_cube(h, targets, &around(b.rho1), &around(b.rho2), &around(b.rho12));
    hit
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeUserThreshold<T> {
    pub snr: T,
    pub h: T,
    /// `2h²P`
    pub inr_total: T,
    pub witness: Option<FeasibilityWitness<T>>,
}

impl<T: Real> ThreeUserThreshold<T> {
    pub fn inr_total_db(&self) -> T {
        to_db(self.inr_total)
    }
}

/// Absolute tolerance on `h` for [`three_user_inr_threshold`].
pub const THREE_USER_H_TOL: f64 = 1e-4;

/// Largest `h` (to 1e-4) at which the search finds a useful smart genie.
/// Feasibility needs `h(1 + 2h²P) ≤ 1/2`, so `h ≤ 1/2` brackets the root.
pub fn three_user_inr_threshold<T: Real>(snr: T, search: &FeasibilitySearch) -> Result<ThreeUserThreshold<T>> {
    if !(snr > T::zero() && snr.is_finite()) {
        return Err(Error::Precondition(format!("SNR must be positive, got {snr}")));
    }
    let h = bisect_last_true(T::zero(), T::half(), T::lit(THREE_USER_H_TOL), |h| {
        three_user_feasible(snr, h, search).is_some()
    });
    Ok(ThreeUserThreshold {
        snr,
        h,
        inr_total: T::two() * h * h * snr,
        witness: three_user_feasible(snr, h, search),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_user::{etw_halfplanes, tin_sum_rate};

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn ordering_validation_names_property() {
        assert!(OrderingFunction::from_one_based(&[2, 3, 1]).is_ok());
        let e = OrderingFunction::new(vec![1, 5, 0]).unwrap_err();
        assert!(e.to_string().contains("range"));
        // 1 → 2 → 1 never reaches 3
        let e = OrderingFunction::from_one_based(&[2, 1, 3]).unwrap_err();
        assert!(e.to_string().contains("orbit"), "{e}");
        let e = OrderingFunction::new(vec![1, 1, 0]).unwrap_err();
        assert!(e.to_string().contains("orbit"), "{e}");
    }

    #[test]
    fn all_orderings_are_cycles() {
        for m in 2..=5 {
            let all = OrderingFunction::all(m);
            let fact: usize = (1..m).product();
            assert_eq!(all.len(), fact);
            for o in &all {
                assert!(OrderingFunction::new(o.as_slice().to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn two_user_vector_genie_is_etw() {
        let net = InterferenceNetwork::two_user(10.0, 20.0, 0.2, 0.3).unwrap();
        let v = VectorGenie::cyclic(&net).unwrap();
        let s = &v.signals(0)[0];
        assert_eq!(s.x, vec![0.3, 0.0]);
        assert_eq!(s.noise, 1);
        let hps = etw_halfplanes(&net).unwrap();
        let b = vector_genie_sum_bound(&net, &OrderingFunction::cyclic(2).unwrap()).unwrap();
        assert!(approx(b, hps[4].c, 1e-9));
    }

    #[test]
    fn three_user_table() {
        // distinct gains so every coefficient is identifiable
        let h = vec![vec![1.0, 0.12, 0.13], vec![0.21, 1.0, 0.23], vec![0.31, 0.32, 1.0]];
        let net = InterferenceNetwork::new(h, vec![1.0; 3]).unwrap();
        let v = build_vector_genie(&net, &OrderingFunction::from_one_based(&[2, 3, 1]).unwrap()).unwrap();
        let want: [[(Vec<f64>, usize); 2]; 3] = [
            [(vec![0.21, 0.0, 0.23], 1), (vec![0.31, 0.0, 0.0], 2)],
            [(vec![0.31, 0.32, 0.0], 2), (vec![0.0, 0.12, 0.0], 0)],
            [(vec![0.0, 0.12, 0.13], 0), (vec![0.0, 0.0, 0.23], 1)],
        ];
        for (r, row) in want.iter().enumerate() {
            for (k, (x, noise)) in row.iter().enumerate() {
                assert_eq!(&v.signals(r)[k].x, x, "S{},{}", r + 1, k + 1);
                assert_eq!(v.signals(r)[k].noise, *noise);
            }
        }
        assert!(v.last_signal_interference_free());
        assert!(v.stacking_identity(&net));
    }

    #[test]
    fn vector_bound_examples() {
        let free = InterferenceNetwork::symmetric(3, 7.0, 0.0).unwrap();
        let b = vector_genie_sum_bound(&free, &OrderingFunction::cyclic(3).unwrap()).unwrap();
        assert!(approx(b, 3.0 * 0.5 * 8.0_f64.log2(), 1e-9));
        let net = InterferenceNetwork::symmetric(3, 7.0, 0.05_f64.sqrt()).unwrap();
        let b = vector_genie_sum_bound(&net, &OrderingFunction::cyclic(3).unwrap()).unwrap();
        assert!(b.is_finite() && b >= m_user_tin_sum_rate(&net) - 1e-9);
    }

    #[test]
    fn tin_forms() {
        let net = InterferenceNetwork::symmetric(3, 7.0, 0.3).unwrap();
        let want = 1.5 * (1.0 + 7.0 / (1.0 + 2.0 * 0.09 * 7.0_f64)).log2();
        assert!(approx(m_user_tin_sum_rate(&net), want, 1e-12));
        let two = InterferenceNetwork::two_user(10.0, 20.0, 0.2, 0.3).unwrap();
        assert!(approx(m_user_tin_sum_rate(&two), tin_sum_rate(&two).unwrap(), 1e-12));
    }

    fn mto(g: f64) -> InterferenceNetwork<f64> {
        InterferenceNetwork::new(
            vec![vec![1.0, g, g], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            vec![1.0; 3],
        )
        .unwrap()
    }

    #[test]
    fn many_to_one_examples() {
        assert!(approx(many_to_one_value(&mto(0.6)).unwrap(), 0.72, 1e-12));
        assert!(many_to_one_test(&mto(0.6)).unwrap());
        assert!(!many_to_one_test(&mto(0.8)).unwrap());
        assert!(many_to_one_test(&mto(0.0)).unwrap());
        let c = many_to_one_sum_capacity(&mto(0.6)).unwrap();
        assert!(c.established && approx(c.inner, 1.3306, 1e-4));
        assert!(approx(c.inner, m_user_tin_sum_rate(&mto(0.6)), 1e-12));
        let out = many_to_one_sum_capacity(&mto(0.8)).unwrap();
        assert!(!out.established && out.inner <= out.outer);
        let otm = InterferenceNetwork::new(
            vec![vec![1.0, 0.0, 0.0], vec![0.4, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            vec![1.0; 3],
        )
        .unwrap();
        assert!(matches!(many_to_one_test(&otm), Err(Error::Domain(_))));
        let one_sided = InterferenceNetwork::two_user(3.0, 2.0, 0.5, 0.0).unwrap();
        let c = many_to_one_sum_capacity(&one_sided).unwrap();
        assert!(approx(c.inner, tin_sum_rate(&one_sided).unwrap(), 1e-12));
    }

    #[test]
    fn one_to_many_examples() {
        let two = InterferenceNetwork::two_user(1.0, 1.0, 0.0, 0.5).unwrap();
        let t = one_to_many_test(&two).unwrap();
        assert!(t.holds && approx(t.value, 0.4, 1e-12));
        assert_eq!(t.lambdas.unwrap(), vec![1.0]);
        let c = one_to_many_sum_capacity(&two).unwrap();
        assert!(approx(c.inner, 0.5 + 0.5 * 1.8_f64.log2(), 1e-12));
        assert!(approx(c.inner, 0.9240, 1e-4));
        let mut h = vec![vec![0.0; 4]; 4];
        for (r, row) in h.iter_mut().enumerate() {
            row[r] = 1.0;
            if r > 0 {
                row[0] = 0.7;
            }
        }
        let four = InterferenceNetwork::new(h, vec![10.0, 1.0, 1.0, 1.0]).unwrap();
        let t = one_to_many_test(&four).unwrap();
        assert!(!t.holds && approx(t.value, 3.0 * 5.39 / 5.9, 1e-12));
        assert!(!one_to_many_sum_capacity(&four).unwrap().established);
    }

    #[test]
    fn smart_targets_and_leak() {
        assert_eq!(three_user_smart_conditions(5.0, 0.0), (1.0, 1.0));
        let (t1, t2) = three_user_smart_conditions(1.0, 0.1_f64);
        assert!(approx(t1, 0.92, 1e-12) && approx(t2, 1.02, 1e-12));
        let (p, h) = (1.0, 0.1);
        let g = GenieSpec3Sym::new(0.8, 0.9, 0.5, t1 / 0.8, t2 / 0.9).unwrap();
        let net = InterferenceNetwork::symmetric(3, p, h).unwrap();
        let (l1, l2) = three_user_smart_leak(&net, &g).unwrap();
        assert!(l1.abs() < 1e-9 && l2.abs() < 1e-9, "{l1} {l2}");
        let off = GenieSpec3Sym::new(0.8, 0.9, 0.5, 1.0, 1.0).unwrap();
        assert!(three_user_smart_leak(&net, &off).unwrap().0 > 1e-6);
    }

    #[test]
    fn useful_test_edges() {
        let g = GenieSpec3Sym::new(0.3, -0.4, 0.2, 2.0, 3.0).unwrap();
        assert!(three_user_useful_test(0.0, &g).unwrap());
        let z = GenieSpec3Sym::new(0.3, -0.4, 0.2, 0.0, 0.0).unwrap();
        assert!(three_user_useful_test(0.7, &z).unwrap());
    }

    #[test]
    fn feasibility_small_and_large_gain() {
        let s = FeasibilitySearch::default();
        let w = three_user_feasible(10.0, 0.0, &s).unwrap();
        assert!(three_user_useful_test(0.0, &w.genie().unwrap()).unwrap());
        let w = three_user_feasible(10.0, 0.01, &s).unwrap();
        let g = w.genie().unwrap();
        assert!(three_user_useful_test(0.01, &g).unwrap());
        let net = InterferenceNetwork::symmetric(3, 10.0, 0.01).unwrap();
        let b = genie_sum_bound_m(&net, &GenieSpec::ThreeUserSym(g)).unwrap();
        assert!(approx(b, m_user_tin_sum_rate(&net), 1e-6));
        assert!(three_user_feasible(10.0, 0.3, &s).is_none());
    }
}
