//! Gaussian interference networks in standard form.
//!
//! Receiver `r` observes `Y_r = Σ_t h[r][t] X_t + Z_r` with unit direct gains
//! and unit-variance noise. Users are indexed from zero in the API; variable
//! labels in generated [`GaussianSystem`]s are one-based (`X1`, `Y1`, ...).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{CovMatrix, GaussianSystem, SystemBuilder};
use crate::network::VectorGenie;
use crate::scalar::Real;

/// Relative tolerance for "equal gains" and unit-diagonal checks.
const EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceNetwork<T> {
    h: Vec<Vec<T>>,
    p: Vec<T>,
}

impl<T: Real> InterferenceNetwork<T> {
    /// Validates a standard-form network.
    pub fn new(h: Vec<Vec<T>>, p: Vec<T>) -> Result<Self> {
        let m = p.len();
        if m < 2 {
            return Err(Error::InvalidChannel(format!("need at least two users, got {m}")));
        }
        if h.len() != m || h.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidChannel("H must be M×M with M = len(P)".into()));
        }
        for (r, row) in h.iter().enumerate() {
            if row.iter().any(|g| !g.is_finite()) {
                return Err(Error::InvalidChannel(format!("non-finite gain in row {}", r + 1)));
            }
            if (row[r] - T::one()).abs() > T::tol(EQ_TOL) {
                return Err(Error::InvalidChannel(format!(
                    "direct gain h[{0}][{0}] = {1} is not 1 (use standardize)",
                    r + 1,
                    row[r]
                )));
            }
        }
        for (t, &pt) in p.iter().enumerate() {
            if !(pt > T::zero() && pt.is_finite()) {
                return Err(Error::InvalidChannel(format!("power P[{}] = {pt} must be positive", t + 1)));
            }
        }
        Ok(Self { h, p })
    }

    /// Two-user network with `Y1 = X1 + h12 X2 + Z1`, `Y2 = h21 X1 + X2 + Z2`.
    pub fn two_user(p1: T, p2: T, h12: T, h21: T) -> Result<Self> {
        Self::new(vec![vec![T::one(), h12], vec![h21, T::one()]], vec![p1, p2])
    }

    /// `M` users, every cross gain `h`, every power `p`.
    pub fn symmetric(m: usize, p: T, h: T) -> Result<Self> {
        let gains = (0..m)
            .map(|r| (0..m).map(|t| if r == t { T::one() } else { h }).collect())
            .collect();
        Self::new(gains, vec![p; m])
    }

    pub fn users(&self) -> usize {
        self.p.len()
    }

    /// Gain from transmitter `t` to receiver `r`.
    pub fn gain(&self, r: usize, t: usize) -> T {
        self.h[r][t]
    }

    pub fn gains(&self) -> &[Vec<T>] {
        &self.h
    }

    pub fn power(&self, t: usize) -> T {
        self.p[t]
    }

    pub fn powers(&self) -> &[T] {
        &self.p
    }

    pub fn snr(&self, r: usize) -> T {
        self.p[r]
    }

    pub fn inr(&self, r: usize, t: usize) -> T {
        self.h[r][t] * self.h[r][t] * self.p[t]
    }

    /// Interference-plus-noise power at receiver `r`.
    pub fn interference_plus_noise(&self, r: usize) -> T {
        (0..self.users())
            .filter(|&t| t != r)
            .fold(T::one(), |acc, t| acc + self.inr(r, t))
    }

    /// Fails with a domain error unless every squared cross gain is at most 1.
    pub fn require_weak(&self) -> Result<()> {
        for r in 0..self.users() {
            for t in 0..self.users() {
                if r != t && self.h[r][t] * self.h[r][t] > T::one() {
                    return Err(Error::Domain(format!(
                        "strong interference: h[{}][{}]² = {} > 1",
                        r + 1,
                        t + 1,
                        self.h[r][t] * self.h[r][t]
                    )));
                }
            }
        }
        Ok(())
    }

    fn require_users(&self, m: usize) -> Result<()> {
        if self.users() != m {
            return Err(Error::InvalidChannel(format!(
                "expected a {m}-user network, got {} users",
                self.users()
            )));
        }
        Ok(())
    }

    pub fn is_many_to_one(&self) -> bool {
        let m = self.users();
        (1..m).all(|r| (0..m).all(|t| t == r || self.h[r][t] == T::zero()))
    }

    pub fn is_one_to_many(&self) -> bool {
        let m = self.users();
        (0..m).all(|r| (1..m).all(|t| t == r || self.h[r][t] == T::zero()))
    }

    /// Equal powers and equal cross gains (in magnitude for two users).
    pub fn is_symmetric(&self) -> bool {
        let m = self.users();
        let close = |a: T, b: T| (a - b).abs() <= T::tol(EQ_TOL) * a.abs().max(b.abs()).max(T::one());
        let p0 = self.p[0];
        if !self.p.iter().all(|&p| close(p, p0)) {
            return false;
        }
        if m == 2 {
            return close(self.h[0][1].abs(), self.h[1][0].abs());
        }
        let h0 = self.h[0][1];
        (0..m).all(|r| (0..m).all(|t| r == t || close(self.h[r][t], h0)))
    }

    /// Common cross gain of a symmetric network.
    pub fn symmetric_gain(&self) -> Option<T> {
        self.is_symmetric().then(|| self.h[0][1])
    }

    pub fn classify(&self) -> ChannelClass {
        classify(self)
    }
}

/// Normalizes a raw network to unit direct gains and unit noise while
/// keeping every SNR and INR unchanged.
pub fn standardize<T: Real>(h_raw: &[Vec<T>], p_raw: &[T], noise: &[T]) -> Result<InterferenceNetwork<T>> {
    let m = p_raw.len();
    if h_raw.len() != m || noise.len() != m || h_raw.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidChannel("H, P and noise dimensions disagree".into()));
    }
    for (r, &n) in noise.iter().enumerate() {
        if !(n > T::zero() && n.is_finite()) {
            return Err(Error::InvalidChannel(format!("noise variance N[{}] = {n} must be positive", r + 1)));
        }
        if h_raw[r][r] == T::zero() || !h_raw[r][r].is_finite() {
            return Err(Error::InvalidChannel(format!("direct gain h[{0}][{0}] is zero", r + 1)));
        }
    }
    let p: Vec<T> = (0..m)
        .map(|t| h_raw[t][t] * h_raw[t][t] * p_raw[t] / noise[t])
        .collect();
    let h = (0..m)
        .map(|r| {
            (0..m)
                .map(|t| {
                    if r == t {
                        T::one()
                    } else {
                        h_raw[r][t] * noise[t].sqrt() / (h_raw[t][t] * noise[r].sqrt())
                    }
                })
                .collect()
        })
        .collect();
    InterferenceNetwork::new(h, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelClass {
    TwoUser,
    SymmetricTwoUser,
    ManyToOne,
    OneToMany,
    SymmetricMUser,
    General,
}

impl ChannelClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::TwoUser => "two-user",
            Self::SymmetricTwoUser => "symmetric-two-user",
            Self::ManyToOne => "many-to-one",
            Self::OneToMany => "one-to-many",
            Self::SymmetricMUser => "symmetric-M-user",
            Self::General => "general",
        }
    }
}

/// Most specific tag. For three or more users the order of preference is
/// many-to-one, one-to-many, symmetric, general.
pub fn classify<T: Real>(net: &InterferenceNetwork<T>) -> ChannelClass {
    if net.users() == 2 {
        return if net.is_symmetric() {
            ChannelClass::SymmetricTwoUser
        } else {
            ChannelClass::TwoUser
        };
    }
    if net.is_many_to_one() {
        ChannelClass::ManyToOne
    } else if net.is_one_to_many() {
        ChannelClass::OneToMany
    } else if net.is_symmetric() {
        ChannelClass::SymmetricMUser
    } else {
        ChannelClass::General
    }
}

/// Two-user genie `S1 = h21 (X1 + η1 W1)`, `S2 = h12 (X2 + η2 W2)` with
/// `corr(Z1, W1) = ρ1` and `corr(Z2, W2) = ρ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenieSpec2<T> {
    pub eta1: T,
    pub eta2: T,
    pub rho1: T,
    pub rho2: T,
}

impl<T: Real> GenieSpec2<T> {
    pub fn new(eta1: T, eta2: T, rho1: T, rho2: T) -> Result<Self> {
        let g = Self { eta1, eta2, rho1, rho2 };
        g.validate()?;
        Ok(g)
    }

    pub fn symmetric(eta: T, rho: T) -> Result<Self> {
        Self::new(eta, eta, rho, rho)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("rho1", self.rho1), ("rho2", self.rho2)] {
            if !(r.abs() <= T::one()) {
                return Err(Error::InvalidGenie(format!("|{name}| = {} exceeds 1", r.abs())));
            }
        }
        for (name, e) in [("eta1", self.eta1), ("eta2", self.eta2)] {
            if !(e >= T::zero() && e.is_finite()) {
                return Err(Error::InvalidGenie(format!("{name} = {e} must be finite and nonnegative")));
            }
        }
        Ok(())
    }

    /// Indices swapped: user 1 becomes user 2.
    pub fn swapped(&self) -> Self {
        Self {
            eta1: self.eta2,
            eta2: self.eta1,
            rho1: self.rho2,
            rho2: self.rho1,
        }
    }
}

/// Symmetric three-user genie: per receiver the noises `[Z_r, W_r1, W_r2]`
/// have unit variances and correlations `ρ1, ρ2, ρ12`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenieSpec3Sym<T> {
    sigma: CovMatrix<T>,
    pub eta1: T,
    pub eta2: T,
}

impl<T: Real> GenieSpec3Sym<T> {
    pub fn new(rho1: T, rho2: T, rho12: T, eta1: T, eta2: T) -> Result<Self> {
        let o = T::one();
        let sigma = CovMatrix::from_rows(&[
            vec![o, rho1, rho2],
            vec![rho1, o, rho12],
            vec![rho2, rho12, o],
        ])
        .map_err(|e| Error::InvalidGenie(format!("Σ rejected: {e}")))?;
        for e in [eta1, eta2] {
            if !e.is_finite() {
                return Err(Error::InvalidGenie("η must be finite".into()));
            }
        }
        Ok(Self { sigma, eta1, eta2 })
    }

    pub fn sigma(&self) -> &CovMatrix<T> {
        &self.sigma
    }

    pub fn rho1(&self) -> T {
        self.sigma.get(0, 1)
    }

    pub fn rho2(&self) -> T {
        self.sigma.get(0, 2)
    }

    pub fn rho12(&self) -> T {
        self.sigma.get(1, 2)
    }
}

/// Linear genie signal `Σ_t x[t] X_t + Z_noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSignal<T> {
    pub x: Vec<T>,
    /// Receiver whose noise term the signal reuses.
    pub noise: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenieSpec<T> {
    TwoUser(GenieSpec2<T>),
    /// `S1 = h21 X1 + Z2`, `S2 = h12 X2 + Z1`.
    Etw,
    ThreeUserSym(GenieSpec3Sym<T>),
    Vector(VectorGenie<T>),
}

pub mod labels {
    //! Variable names used by [`super::build_gaussian_system`]; indices are zero-based.

    pub fn x(t: usize) -> String {
        format!("X{}", t + 1)
    }
    pub fn z(r: usize) -> String {
        format!("Z{}", r + 1)
    }
    pub fn y(r: usize) -> String {
        format!("Y{}", r + 1)
    }
    /// Scalar genie signal of a two-user genie.
    pub fn s(r: usize) -> String {
        format!("S{}", r + 1)
    }
    pub fn w(r: usize) -> String {
        format!("W{}", r + 1)
    }
    /// `k`-th component (one-based, as in `S_{r,k}`) of a vector genie.
    pub fn s_k(r: usize, k: usize) -> String {
        format!("S{}_{}", r + 1, k)
    }
    pub fn w_k(r: usize, k: usize) -> String {
        format!("W{}_{}", r + 1, k)
    }
}

fn two_block<T: Real>(rho: T) -> CovMatrix<T> {
    CovMatrix::from_rows(&[vec![T::one(), rho], vec![rho, T::one()]]).expect("|ρ| ≤ 1 checked by caller")
}

fn add_outputs<T: Real>(b: &mut SystemBuilder<T>, net: &InterferenceNetwork<T>) {
    let m = net.users();
    for r in 0..m {
        let xs: Vec<String> = (0..m).map(labels::x).collect();
        let z = labels::z(r);
        let mut terms: Vec<(&str, T)> = xs.iter().enumerate().map(|(t, x)| (x.as_str(), net.gain(r, t))).collect();
        terms.push((z.as_str(), T::one()));
        b.combine(&labels::y(r), &terms);
    }
}

fn add_linear_signal<T: Real>(b: &mut SystemBuilder<T>, name: &str, sig: &LinearSignal<T>, noise: (&str, T)) {
    let xs: Vec<String> = (0..sig.x.len()).map(labels::x).collect();
    let mut terms: Vec<(&str, T)> = xs
        .iter()
        .zip(&sig.x)
        .filter(|(_, &c)| c != T::zero())
        .map(|(x, &c)| (x.as_str(), c))
        .collect();
    terms.push(noise);
    b.combine(name, &terms);
}

/// Joint Gaussian model of the network with independent inputs
/// `X_t ~ N(0, P_t)`, unit noises, and the optional genie signals.
pub fn build_gaussian_system<T: Real>(
    net: &InterferenceNetwork<T>,
    genie: Option<&GenieSpec<T>>,
) -> Result<GaussianSystem<T>> {
    let m = net.users();
    let mut b = SystemBuilder::new();
    for t in 0..m {
        b.source(&labels::x(t), net.power(t));
    }
    match genie {
        None | Some(GenieSpec::Etw) | Some(GenieSpec::Vector(_)) => {
            for r in 0..m {
                b.source(&labels::z(r), T::one());
            }
        }
        Some(GenieSpec::TwoUser(g)) => {
            net.require_users(2)?;
            g.validate()?;
            for (r, rho) in [(0, g.rho1), (1, g.rho2)] {
                b.correlated_sources(&[&labels::z(r), &labels::w(r)], two_block(rho));
            }
        }
        Some(GenieSpec::ThreeUserSym(g)) => {
            net.require_users(3)?;
            for r in 0..3 {
                b.correlated_sources(&[&labels::z(r), &labels::w_k(r, 1), &labels::w_k(r, 2)], g.sigma.clone());
            }
        }
    }
    add_outputs(&mut b, net);
    match genie {
        None => {}
        Some(GenieSpec::TwoUser(g)) => {
            let (h12, h21) = (net.gain(0, 1), net.gain(1, 0));
            b.combine("S1", &[("X1", h21), ("W1", h21 * g.eta1)]);
            b.combine("S2", &[("X2", h12), ("W2", h12 * g.eta2)]);
        }
        Some(GenieSpec::Etw) => {
            net.require_users(2)?;
            b.combine("S1", &[("X1", net.gain(1, 0)), ("Z2", T::one())]);
            b.combine("S2", &[("X2", net.gain(0, 1)), ("Z1", T::one())]);
        }
        Some(GenieSpec::Vector(v)) => {
            if v.users() != m {
                return Err(Error::InvalidGenie(format!(
                    "vector genie built for {} users, network has {m}",
                    v.users()
                )));
            }
            for r in 0..m {
                for (k, sig) in v.signals(r).iter().enumerate() {
                    let z = labels::z(sig.noise);
                    add_linear_signal(&mut b, &labels::s_k(r, k + 1), sig, (&z, T::one()));
                }
            }
        }
        Some(GenieSpec::ThreeUserSym(g)) => {
            let h = net
                .symmetric_gain()
                .ok_or_else(|| Error::InvalidChannel("three-user genie needs a symmetric network".into()))?;
            // same interference pattern as the cyclic vector genie, fresh noises
            let v = VectorGenie::cyclic(net)?;
            for r in 0..3 {
                for (k, sig) in v.signals(r).iter().enumerate() {
                    let eta = if k == 0 { g.eta1 } else { g.eta2 };
                    let w = labels::w_k(r, k + 1);
                    add_linear_signal(&mut b, &labels::s_k(r, k + 1), sig, (&w, h * eta));
                }
            }
        }
    }
    b.build()
}

/// Network description file: `{ "M": 2, "H": [[..]], "P": [..], "noise": [..] }`.
/// Gains and powers may be raw; they are standardized on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    #[serde(rename = "P")]
    pub p: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<Vec<f64>>,
}

impl NetworkFile {
    pub fn to_network(&self) -> Result<InterferenceNetwork<f64>> {
        if self.p.len() != self.m || self.h.len() != self.m {
            return Err(Error::InvalidChannel(format!(
                "M = {} but H has {} rows and P has {} entries",
                self.m,
                self.h.len(),
                self.p.len()
            )));
        }
        let noise = self.noise.clone().unwrap_or_else(|| vec![1.0; self.m]);
        standardize(&self.h, &self.p, &noise)
    }

    pub fn from_network(net: &InterferenceNetwork<f64>) -> Self {
        Self {
            m: net.users(),
            h: net.gains().to_vec(),
            p: net.powers().to_vec(),
            noise: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn asym_weak() -> InterferenceNetwork<f64> {
        InterferenceNetwork::two_user(10.0, 20.0, 0.2, 0.3).unwrap()
    }

    #[test]
    fn standard_input_is_unchanged() {
        let n = asym_weak();
        let s = standardize(n.gains(), n.powers(), &[1.0, 1.0]).unwrap();
        assert_eq!(s, n);
    }

    #[test]
    fn standardize_preserves_snr_and_inr() {
        let h = vec![vec![2.0_f64, 0.5], vec![-0.7, 2.0]];
        let p = vec![3.0, 5.0];
        let n = vec![4.0, 4.0];
        let s = standardize(&h, &p, &n).unwrap();
        for r in 0..2 {
            assert!((s.snr(r) - h[r][r] * h[r][r] * p[r] / n[r]).abs() < 1e-12);
            for t in 0..2 {
                let raw = h[r][t] * h[r][t] * p[t] / n[r];
                assert!((s.inr(r, t) - raw).abs() <= 1e-12 * raw);
            }
        }
        assert!(s.gain(1, 0) < 0.0);
    }

    #[test]
    fn standardize_rejects_zero_diagonal() {
        let h = vec![vec![0.0, 0.5], vec![0.5, 1.0]];
        assert!(matches!(
            standardize(&h, &[1.0, 1.0], &[1.0, 1.0]),
            Err(Error::InvalidChannel(_))
        ));
    }

    #[test]
    fn classes() {
        let s = InterferenceNetwork::two_user(2.0, 2.0, 0.3, -0.3).unwrap();
        assert_eq!(s.classify(), ChannelClass::SymmetricTwoUser);
        assert_eq!(asym_weak().classify(), ChannelClass::TwoUser);
        let mto = InterferenceNetwork::new(
            vec![vec![1.0, 0.6, 0.6], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            vec![1.0; 3],
        )
        .unwrap();
        assert_eq!(mto.classify(), ChannelClass::ManyToOne);
        let otm = InterferenceNetwork::new(
            vec![vec![1.0, 0.0, 0.0], vec![0.4, 1.0, 0.0], vec![0.3, 0.0, 1.0]],
            vec![1.0; 3],
        )
        .unwrap();
        assert_eq!(otm.classify(), ChannelClass::OneToMany);
        assert_eq!(
            InterferenceNetwork::symmetric(3, 7.0, 0.2).unwrap().classify(),
            ChannelClass::SymmetricMUser
        );
        let dense = InterferenceNetwork::new(
            vec![vec![1.0, 0.1, 0.2], vec![0.3, 1.0, 0.4], vec![0.5, 0.6, 1.0]],
            vec![1.0; 3],
        )
        .unwrap();
        assert_eq!(dense.classify(), ChannelClass::General);
    }

    #[test]
    fn plain_system_covariances() {
        let sys = build_gaussian_system(&asym_weak(), None).unwrap();
        assert_eq!(sys.names().len(), 6);
        assert!((sys.variance("Y1").unwrap() - (1.0 + 10.0 + 0.04 * 20.0)).abs() < 1e-12);
        assert!((sys.covariance("Y2", "X1").unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_genie_cross_covariance() {
        let (p, h, eta, rho) = (7.0, 0.2_f64.sqrt(), 1.3, 0.4);
        let net = InterferenceNetwork::symmetric(2, p, h).unwrap();
        let g = GenieSpec::TwoUser(GenieSpec2::symmetric(eta, rho).unwrap());
        let sys = build_gaussian_system(&net, Some(&g)).unwrap();
        let c = sys.covariance("Y1", "S1").unwrap();
        assert!((c - h * (p + eta * rho)).abs() < 1e-12);
    }

    #[test]
    fn etw_genie_matches_limit_two_user_genie() {
        let net = asym_weak();
        let etw = build_gaussian_system(&net, Some(&GenieSpec::Etw)).unwrap();
        let g = GenieSpec2::new(1.0 / 0.3, 1.0 / 0.2, 0.0, 0.0).unwrap();
        let lim = build_gaussian_system(&net, Some(&GenieSpec::TwoUser(g))).unwrap();
        for (a, b) in [("X1", "Y1"), ("X1", "S1"), ("Y1", "S1"), ("S1", "S1"), ("Y2", "S2"), ("S2", "S2")] {
            let d = etw.covariance(a, b).unwrap() - lim.covariance(a, b).unwrap();
            assert!(d.abs() < 1e-12, "{a},{b}");
        }
    }

    #[test]
    fn invalid_genie_rejected() {
        assert!(matches!(GenieSpec2::new(1.0, 1.0, 1.2, 0.0), Err(Error::InvalidGenie(_))));
        assert!(matches!(
            GenieSpec3Sym::new(0.9, 0.9, -0.9, 1.0, 1.0),
            Err(Error::InvalidGenie(_))
        ));
    }

    #[test]
    fn network_file_round_trip() {
        let f: NetworkFile = serde_json::from_str(r#"{"M":2,"H":[[2,1],[1,2]],"P":[1,1],"noise":[4,4]}"#).unwrap();
        let n = f.to_network().unwrap();
        assert!((n.power(0) - 1.0).abs() < 1e-15);
        assert!((n.gain(0, 1) - 0.5).abs() < 1e-15);
        let back = NetworkFile::from_network(&n);
        assert_eq!(back.to_network().unwrap(), n);
    }

    #[test]
    fn weak_guard() {
        assert!(asym_weak().require_weak().is_ok());
        let strong = InterferenceNetwork::two_user(1.0, 1.0, 1.5, 0.1).unwrap();
        assert!(matches!(strong.require_weak(), Err(Error::Domain(_))));
    }
}
