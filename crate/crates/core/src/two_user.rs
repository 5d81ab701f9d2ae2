//! Two-user bounds: treating interference as noise, the genie-aided outer
//! regions (ETW, broadcast, EPI-tightened), a Gaussian Han–Kobayashi inner
//! region, and the low-interference sum-capacity certificates.
//!
//! All rates are in bits per channel use. Networks are in standard form:
//! `Y1 = X1 + h12 X2 + Z1`, `Y2 = h21 X1 + X2 + Z2`.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{build_gaussian_system, GenieSpec, GenieSpec2, InterferenceNetwork};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianSystem, SystemBuilder};
use crate::region::{halfplane_max_weighted, r1_grid, Halfplane, RateRegion, BOUNDARY_POINTS};
use crate::scalar::{half_log2, to_db, Real};
use crate::search::{bisect_last_true, bisect_root, NelderMead};

/// Smallest slack accepted for an EPI genie.
pub const MIN_SLACK: f64 = 1e-9;
/// Absolute tolerance on `h` for the INR threshold bisection.
pub const INR_H_TOL: f64 = 1e-9;
/// Tolerance of the smart-genie identity `ηρ = 1 + h²P`.
pub const SMART_TOL: f64 = 1e-9;

/// Scalar parameters of a two-user network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoUser<T> {
    pub p1: T,
    pub p2: T,
    pub h12: T,
    pub h21: T,
}

impl<T: Real> TwoUser<T> {
    pub fn of(net: &InterferenceNetwork<T>) -> Result<Self> {
        if net.users() != 2 {
            return Err(Error::InvalidChannel(format!(
                "two-user bound applied to a {}-user network",
                net.users()
            )));
        }
        Ok(Self {
            p1: net.power(0),
            p2: net.power(1),
            h12: net.gain(0, 1),
            h21: net.gain(1, 0),
        })
    }

    pub fn swapped(&self) -> Self {
        Self {
            p1: self.p2,
            p2: self.p1,
            h12: self.h21,
            h21: self.h12,
        }
    }

    pub fn network(&self) -> Result<InterferenceNetwork<T>> {
        InterferenceNetwork::two_user(self.p1, self.p2, self.h12, self.h21)
    }

    fn g12(&self) -> T {
        self.h12 * self.h12
    }

    fn g21(&self) -> T {
        self.h21 * self.h21
    }

    fn var_y1(&self) -> T {
        T::one() + self.p1 + self.g12() * self.p2
    }

    fn var_y2(&self) -> T {
        T::one() + self.p2 + self.g21() * self.p1
    }

    pub fn c1(&self) -> T {
        half_log2(T::one() + self.p1)
    }

    pub fn c2(&self) -> T {
        half_log2(T::one() + self.p2)
    }
}

// ---------------------------------------------------------------------------
// treating interference as noise

/// Per-user TIN rates.
pub fn tin_rates<T: Real>(net: &InterferenceNetwork<T>) -> Result<(T, T)> {
    let c = TwoUser::of(net)?;
    let o = T::one();
    Ok((
        half_log2(o + c.p1 / (o + c.g12() * c.p2)),
        half_log2(o + c.p2 / (o + c.g21() * c.p1)),
    ))
}

pub fn tin_sum_rate<T: Real>(net: &InterferenceNetwork<T>) -> Result<T> {
    let (a, b) = tin_rates(net)?;
    Ok(a + b)
}

// ---------------------------------------------------------------------------
// ETW region

/// Mutual-information terms appearing in the seven ETW constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtwTerms<T> {
    /// `I(X1;Y1|X2)`, `I(X2;Y2|X1)`
    pub free1: T,
    pub free2: T,
    /// `I(X1;Y1)`, `I(X2;Y2)`
    pub plain1: T,
    pub plain2: T,
    /// `I(X1;Y1,S1)`, `I(X2;Y2,S2)` with the ETW genie
    pub genie1: T,
    pub genie2: T,
}

/// ETW terms from the Gaussian engine.
pub fn etw_terms<T: Real>(net: &InterferenceNetwork<T>) -> Result<EtwTerms<T>> {
    TwoUser::of(net)?;
    let sys = build_gaussian_system(net, Some(&GenieSpec::Etw))?;
    Ok(EtwTerms {
        free1: sys.conditional_mutual_information(&["X1"], &["Y1"], &["X2"])?,
        free2: sys.conditional_mutual_information(&["X2"], &["Y2"], &["X1"])?,
        plain1: sys.mutual_information(&["X1"], &["Y1"])?,
        plain2: sys.mutual_information(&["X2"], &["Y2"])?,
        genie1: sys.mutual_information(&["X1"], &["Y1", "S1"])?,
        genie2: sys.mutual_information(&["X2"], &["Y2", "S2"])?,
    })
}

/// The same terms in closed form.
pub fn etw_terms_closed_form<T: Real>(net: &InterferenceNetwork<T>) -> Result<EtwTerms<T>> {
    let c = TwoUser::of(net)?;
    let o = T::one();
    let (n1, n2) = (o + c.g12() * c.p2, o + c.g21() * c.p1);
    Ok(EtwTerms {
        free1: half_log2(o + c.p1),
        free2: half_log2(o + c.p2),
        plain1: half_log2(o + c.p1 / n1),
        plain2: half_log2(o + c.p2 / n2),
        genie1: half_log2(o + c.g21() * c.p1 + c.p1 / n1),
        genie2: half_log2(o + c.g12() * c.p2 + c.p2 / n2),
    })
}

pub fn etw_halfplanes<T: Real>(net: &InterferenceNetwork<T>) -> Result<Vec<Halfplane<T>>> {
    net.require_weak()?;
    let t = etw_terms(net)?;
    let (o, z, two) = (T::one(), T::zero(), T::two());
    Ok(vec![
        Halfplane::new("R1", o, z, t.free1),
        Halfplane::new("R2", z, o, t.free2),
        Halfplane::new("R1+R2 (Z, receiver 1 free)", o, o, t.free1 + t.plain2),
        Halfplane::new("R1+R2 (Z, receiver 2 free)", o, o, t.plain1 + t.free2),
        Halfplane::new("R1+R2 (genie)", o, o, t.genie1 + t.genie2),
        Halfplane::new("2R1+R2", two, o, t.free1 + t.plain1 + t.genie2),
        Halfplane::new("R1+2R2", o, two, t.genie1 + t.free2 + t.plain2),
    ])
}

/// Shared `R1` grid for every region of a channel.
pub fn region_grid<T: Real>(net: &InterferenceNetwork<T>, points: usize) -> Result<Vec<T>> {
    Ok(r1_grid(TwoUser::of(net)?.c1(), points))
}

pub fn etw_outer_region<T: Real>(net: &InterferenceNetwork<T>) -> Result<RateRegion<T>> {
    let hps = etw_halfplanes(net)?;
    Ok(RateRegion::from_halfplanes(hps, region_grid(net, BOUNDARY_POINTS)?))
}

// ---------------------------------------------------------------------------
// broadcast-channel bound

fn bc_max_r1<T: Real>(c: &TwoUser<T>, r2: T) -> T {
    let o = T::one();
    half_log2(c.var_y1() / (o + c.g12() * ((T::two() * r2).exp2() - o)))
}

/// Inverse of [`bc_max_r1`]: largest `R2` compatible with `r1`.
fn bc_max_r2_given_r1<T: Real>(c: &TwoUser<T>, r1: T) -> T {
    let o = T::one();
    let k = c.var_y1() * (-T::two() * r1).exp2();
    if c.g12() == T::zero() {
        return if k >= o { T::infinity() } else { T::neg_infinity() };
    }
    let arg = o + (k - o) / c.g12();
    if arg < o {
        T::neg_infinity()
    } else {
        half_log2(arg)
    }
}

fn check_rate<T: Real>(r: T, cap: T, who: &str) -> Result<()> {
    if !(r >= T::zero() && r <= cap + T::tol(1e-12)) {
        return Err(Error::Domain(format!(
            "{who} = {r} is outside [0, {cap}] (single-user capacity)"
        )));
    }
    Ok(())
}

/// Largest `R1` allowed by the broadcast bound at a given `R2`.
pub fn broadcast_outer_constraint<T: Real>(net: &InterferenceNetwork<T>, r2: T) -> Result<T> {
    let c = TwoUser::of(net)?;
    net.require_weak()?;
    check_rate(r2, c.c2(), "R2")?;
    Ok(bc_max_r1(&c, r2))
}

/// Largest `R2` allowed by the index-swapped broadcast bound at `R1`.
pub fn broadcast_outer_constraint_swapped<T: Real>(net: &InterferenceNetwork<T>, r1: T) -> Result<T> {
    let c = TwoUser::of(net)?;
    net.require_weak()?;
    check_rate(r1, c.c1(), "R1")?;
    Ok(bc_max_r1(&c.swapped(), r1))
}

/// Both broadcast bounds expressed as `R2_max(R1)` on the channel grid.
pub fn broadcast_region<T: Real>(net: &InterferenceNetwork<T>) -> Result<RateRegion<T>> {
    let c = TwoUser::of(net)?;
    net.require_weak()?;
    let grid = region_grid(net, BOUNDARY_POINTS)?;
    let r2 = grid
        .iter()
        .map(|&r1| {
            bc_max_r1(&c.swapped(), r1)
                .min(bc_max_r2_given_r1(&c, r1))
                .min(c.c2())
        })
        .collect();
    let mut reg = RateRegion::from_curve(grid, r2);
    let (o, z) = (T::one(), T::zero());
    reg.halfplanes = vec![Halfplane::new("R1", o, z, c.c1()), Halfplane::new("R2", z, o, c.c2())];
    Ok(reg)
}

// ---------------------------------------------------------------------------
// EPI-tightened bounds

/// `R2 ≤ a + ½log₂((b·2^{−2R1} − sub) / (c·2^{2R1} + d))`, `-∞` once the
/// numerator is nonpositive.
///
/// With `σ1² = 1 − ρ2² − (h21η1)²` and `σ2² = 1 − ρ1² − (h12η2)²`, the
/// sum-rate form has `sub = σ2²`, `c = 0`, `d = Var(S1) + σ1²`. The `2R1+R2`
/// form has `b = Var(Y1)`, `sub = 1 − (h12η2)²`, `c = h21²`, `d = 1 − ρ2² − h21²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpiCurve<T> {
    pub a: T,
    pub b: T,
    /// Slack subtracted in the numerator.
    pub sub: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> EpiCurve<T> {
    pub fn eval(&self, r1: T) -> T {
        let x = (-T::two() * r1).exp2();
        let num = self.b * x - self.sub;
        if !(num > T::zero()) {
            return T::neg_infinity();
        }
        let den = if self.c == T::zero() {
            self.d
        } else {
            self.c / x + self.d
        };
        self.a + half_log2(num / den)
    }
}

fn onebit_slacks<T: Real>(c: &TwoUser<T>, g: &GenieSpec2<T>) -> (T, T) {
    let o = T::one();
    let a = c.h21 * g.eta1;
    let b = c.h12 * g.eta2;
    (o - g.rho2 * g.rho2 - a * a, o - g.rho1 * g.rho1 - b * b)
}

fn two_r1r2_slacks<T: Real>(c: &TwoUser<T>, g: &GenieSpec2<T>) -> (T, T) {
    let o = T::one();
    let b = c.h12 * g.eta2;
    (o - b * b, o - g.rho2 * g.rho2 - c.g21())
}

/// `Var(Y1|S1)` for `S1 = h21 (X1 + η1 W1)`; independent of `h21 ≠ 0`.
fn var_y1_given_s1<T: Real>(c: &TwoUser<T>, eta1: T, rho1: T) -> T {
    let cross = c.p1 + eta1 * rho1;
    c.var_y1() - cross * cross / (c.p1 + eta1 * eta1)
}

/// `½log₂(Var(Y2|S2) / Var(S2|X2))`, `None` when `S2` carries no noise.
fn user2_term<T: Real>(c: &TwoUser<T>, eta2: T, rho2: T) -> Option<T> {
    let noise = c.g12() * eta2 * eta2;
    if !(noise > T::zero()) {
        return None;
    }
    let cross = c.p2 + eta2 * rho2;
    let v = c.var_y2() - cross * cross / (c.p2 + eta2 * eta2);
    Some(half_log2(v / noise))
}

/// Closed-form sum-rate curve; `None` if a slack is below `min_slack` or the
/// genie degenerates (then the bound is vacuous).
fn onebit_curve_cf<T: Real>(c: &TwoUser<T>, g: &GenieSpec2<T>, min_slack: T) -> Option<EpiCurve<T>> {
    let (s1, s2) = onebit_slacks(c, g);
    if !(s1 >= min_slack && s2 >= min_slack) || c.h21 == T::zero() || !(g.eta1 > T::zero()) {
        return None;
    }
    let a = user2_term(c, g.eta2, g.rho2)?;
    let var_s1 = c.g21() * (c.p1 + g.eta1 * g.eta1);
    let b = (c.p1 + g.eta1 * g.eta1) / (g.eta1 * g.eta1) * var_y1_given_s1(c, g.eta1, g.rho1);
    // Y1 given (S1, X1) is S2 plus noise of variance s2, and Y2 given
    // (S2, X2) is S1 plus noise of variance s1.
    Some(EpiCurve {
        a,
        b,
        sub: s2,
        c: T::zero(),
        d: var_s1 + s1,
    })
}

/// Closed-form `2R1+R2` curve; depends on `(η2, ρ2)` only.
fn two_r1r2_curve_cf<T: Real>(c: &TwoUser<T>, eta2: T, rho2: T, min_slack: T) -> Option<EpiCurve<T>> {
    let g = GenieSpec2 {
        eta1: T::zero(),
        eta2,
        rho1: T::zero(),
        rho2,
    };
    let (s1, s2) = two_r1r2_slacks(c, &g);
    if !(s1 >= min_slack && s2 >= min_slack) {
        return None;
    }
    let a = user2_term(c, eta2, rho2)?;
    Some(EpiCurve {
        a,
        b: c.var_y1(),
        sub: s1,
        c: c.g21(),
        d: s2,
    })
}

fn require_slacks<T: Real>((s1, s2): (T, T)) -> Result<()> {
    let m = T::lit(MIN_SLACK);
    if !(s1 >= m && s2 >= m) {
        return Err(Error::InvalidGenie(format!(
            "slack variables σ1² = {s1}, σ2² = {s2} must both be at least {m}"
        )));
    }
    Ok(())
}

fn genie_system<T: Real>(net: &InterferenceNetwork<T>, g: &GenieSpec2<T>) -> Result<GaussianSystem<T>> {
    build_gaussian_system(net, Some(&GenieSpec::TwoUser(*g)))
}

fn cond_var<T: Real>(sys: &GaussianSystem<T>, a: &str, given: &[&str]) -> Result<T> {
    Ok(sys.conditional_cov(&[a], given)?.get(0, 0))
}

fn nonvanishing<T: Real>(v: T, what: &str) -> Result<T> {
    if v > T::zero() {
        Ok(v)
    } else {
        Err(Error::InvalidGenie(format!("{what} vanishes; the genie carries no noise")))
    }
}

/// Sum-rate tightened curve with every variance taken from the engine.
pub fn epi_onebit_curve<T: Real>(net: &InterferenceNetwork<T>, g: &GenieSpec2<T>) -> Result<EpiCurve<T>> {
    let c = TwoUser::of(net)?;
    net.require_weak()?;
    g.validate()?;
    let (s1, s2) = onebit_slacks(&c, g);
    require_slacks((s1, s2))?;
    let sys = genie_system(net, g)?;
    let v_s2x2 = nonvanishing(cond_var(&sys, "S2", &["X2"])?, "Var(S2|X2)")?;
    let v_s1x1 = nonvanishing(cond_var(&sys, "S1", &["X1"])?, "Var(S1|X1)")?;
    let v_y2s2 = cond_var(&sys, "Y2", &["S2"])?;
    let v_y1s1 = cond_var(&sys, "Y1", &["S1"])?;
    let v_s1 = sys.variance("S1")?;
    Ok(EpiCurve {
        a: half_log2(v_y2s2 / v_s2x2),
        b: v_s1 * v_y1s1 / v_s1x1,
        sub: s2,
        c: T::zero(),
        d: v_s1 + s1,
    })
}

/// `2R1+R2` tightened curve with engine variances.
pub fn epi_2r1r2_curve<T: Real>(net: &InterferenceNetwork<T>, g: &GenieSpec2<T>) -> Result<EpiCurve<T>> {
    let c = TwoUser::of(net)?;
    net.require_weak()?;
    g.validate()?;
    let (s1, s2) = two_r1r2_slacks(&c, g);
    require_slacks((s1, s2))?;
    let sys = genie_system(net, g)?;
    let v_s2x2 = nonvanishing(cond_var(&sys, "S2", &["X2"])?, "Var(S2|X2)")?;
    let v_y2s2 = cond_var(&sys, "Y2", &["S2"])?;
    Ok(EpiCurve {
        a: half_log2(v_y2s2 / v_s2x2),
        b: sys.variance("Y1")?,
        sub: s1,
        c: c.g21(),
        d: s2,
    })
}

fn swapped_net<T: Real>(net: &InterferenceNetwork<T>) -> Result<InterferenceNetwork<T>> {
    TwoUser::of(net)?.swapped().network()
}

/// Largest `R2` at `r1` allowed by the tightened sum-rate bound.
pub fn epi_onebit_constraint<T: Real>(net: &InterferenceNetwork<T>, g: &GenieSpec2<T>, r1: T) -> Result<T> {
    Ok(epi_onebit_curve(net, g)?.eval(r1))
}

/// Index-swapped variant: largest `R1` at `r2`.
pub fn epi_onebit_constraint_swapped<T: Real>(
    net: &InterferenceNetwork<T>,
    g: &GenieSpec2<T>,
    r2: T,
) -> Result<T> {
    Ok(epi_onebit_curve(&swapped_net(net)?, &g.swapped())?.eval(r2))
}

pub fn epi_2r1r2_constraint<T: Real>(net: &InterferenceNetwork<T>, g: &GenieSpec2<T>, r1: T) -> Result<T> {
    Ok(epi_2r1r2_curve(net, g)?.eval(r1))
}

/// The `R1+2R2` counterpart: largest `R1` at `r2`.
pub fn epi_2r1r2_constraint_swapped<T: Real>(
    net: &InterferenceNetwork<T>,
    g: &GenieSpec2<T>,
    r2: T,
) -> Result<T> {
    Ok(epi_2r1r2_curve(&swapped_net(net)?, &g.swapped())?.eval(r2))
}

/// Genie grid and local refinement used by [`epi_outer_region`].
#[derive(Debug, Clone, PartialEq)]
pub struct GenieSearch {
    pub rho_step: f64,
    pub rho_max: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    /// Log-spaced η values per axis.
    pub eta_points: usize,
    /// Rate values at which the coarse grid keeps its best genie.
    pub anchors: usize,
    /// Boundary samples; each one gets a refined genie.
    pub points: usize,
    /// `None` skips the local refinement.
    pub refine: Option<NelderMead>,
}

impl Default for GenieSearch {
    fn default() -> Self {
        Self {
            rho_step: 0.02,
            rho_max: 0.999,
            eta_min: 1e-3,
            eta_max: 1e3,
            eta_points: 25,
            anchors: 16,
            points: BOUNDARY_POINTS,
            refine: Some(NelderMead {
                max_iter: 300,
                ..NelderMead::default()
            }),
        }
    }
}

impl GenieSearch {
    fn rhos<T: Real>(&self) -> Vec<T> {
        let n = (2.0 * self.rho_max / self.rho_step + 1e-9).floor() as usize;
        (0..=n).map(|i| T::lit(-self.rho_max + self.rho_step * i as f64)).collect()
    }

    fn etas<T: Real>(&self) -> Vec<T> {
        let n = self.eta_points.max(2);
        let (lo, hi) = (self.eta_min.ln(), self.eta_max.ln());
        (0..n)
            .map(|i| T::lit((lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let ok = self.rho_step > 0.0
            && self.rho_max > 0.0
            && self.rho_max < 1.0
            && self.eta_min > 0.0
            && self.eta_max > self.eta_min
            && self.anchors >= 1
            && self.points >= 2;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid genie search {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Onebit,
    TwoR1R2,
}

impl Family {
    fn curve<T: Real>(self, c: &TwoUser<T>, g: &GenieSpec2<T>, min_slack: T) -> Option<EpiCurve<T>> {
        match self {
            Family::Onebit => onebit_curve_cf(c, g, min_slack),
            Family::TwoR1R2 => two_r1r2_curve_cf(c, g.eta2, g.rho2, min_slack),
        }
    }

    /// Optimization coordinates: log η and ρ of the parameters that matter.
    fn encode<T: Real>(self, g: &GenieSpec2<T>) -> Vec<T> {
        let ln = |e: T| e.max(T::lit(1e-300)).ln();
        match self {
            Family::Onebit => vec![ln(g.eta1), g.rho1, ln(g.eta2), g.rho2],
            Family::TwoR1R2 => vec![ln(g.eta2), g.rho2],
        }
    }

    fn decode<T: Real>(self, x: &[T]) -> GenieSpec2<T> {
        match self {
            Family::Onebit => GenieSpec2 {
                eta1: x[0].exp(),
                rho1: x[1],
                eta2: x[2].exp(),
                rho2: x[3],
            },
            Family::TwoR1R2 => GenieSpec2 {
                eta1: T::zero(),
                rho1: T::zero(),
                eta2: x[0].exp(),
                rho2: x[1],
            },
        }
    }

    fn steps<T: Real>(self) -> Vec<T> {
        let (e, r) = (T::lit(0.3), T::lit(0.05));
        match self {
            Family::Onebit => vec![e, r, e, r],
            Family::TwoR1R2 => vec![e, r],
        }
    }
}

/// Best genie per anchor rate from the coarse grid.
fn coarse_anchor_genies<T: Real>(
    fam: Family,
    c: &TwoUser<T>,
    cfg: &GenieSearch,
    anchors: &[T],
) -> Vec<Option<GenieSpec2<T>>> {
    let rhos: Vec<T> = cfg.rhos();
    let etas: Vec<T> = cfg.etas();
    let min_slack = T::lit(MIN_SLACK);
    let na = anchors.len();
    let scan = |rho1: T| -> Vec<(T, Option<GenieSpec2<T>>)> {
        let mut best: Vec<(T, Option<GenieSpec2<T>>)> = vec![(T::infinity(), None); na];
        let mut visit = |g: GenieSpec2<T>| {
            if let Some(curve) = fam.curve(c, &g, min_slack) {
                for (k, &u) in anchors.iter().enumerate() {
                    let v = curve.eval(u);
                    if v < best[k].0 {
                        best[k] = (v, Some(g));
                    }
                }
            }
        };
        match fam {
            Family::Onebit => {
                for &eta1 in &etas {
                    for &rho2 in &rhos {
                        for &eta2 in &etas {
                            visit(GenieSpec2 { eta1, eta2, rho1, rho2 });
                        }
                    }
                }
            }
            Family::TwoR1R2 => {
                for &eta2 in &etas {
                    visit(GenieSpec2 {
                        eta1: T::zero(),
                        eta2,
                        rho1: T::zero(),
                        rho2: rho1,
                    });
                }
            }
        }
        best
    };
    // slices are reduced in grid order, so ties resolve identically every run
    let slices: Vec<Vec<(T, Option<GenieSpec2<T>>)>> = rhos.par_iter().map(|&r| scan(r)).collect();
    let mut best: Vec<(T, Option<GenieSpec2<T>>)> = vec![(T::infinity(), None); na];
    for s in slices {
        for (b, v) in best.iter_mut().zip(s) {
            if v.0 < b.0 {
                *b = v;
            }
        }
    }
    best.into_iter().map(|(_, g)| g).collect()
}

/// Genie-curve candidates for one family and orientation.
fn family_candidates<T: Real>(
    fam: Family,
    c: &TwoUser<T>,
    cfg: &GenieSearch,
    extra: &[GenieSpec2<T>],
) -> Vec<EpiCurve<T>> {
    let cap = c.c1();
    let grid = r1_grid(cap, cfg.points);
    let anchors = r1_grid(cap, cfg.anchors.max(2));
    let seeds: Vec<GenieSpec2<T>> = coarse_anchor_genies(fam, c, cfg, &anchors)
        .into_iter()
        .flatten()
        .collect();
    let min_slack = T::lit(MIN_SLACK);
    let mut curves: Vec<EpiCurve<T>> = seeds
        .iter()
        .filter_map(|g| fam.curve(c, g, min_slack))
        .collect();
    if let (Some(nm), false) = (cfg.refine, seeds.is_empty()) {
        let refined: Vec<Option<EpiCurve<T>>> = grid
            .par_iter()
            .map(|&u| {
                let start = seeds
                    .iter()
                    .filter_map(|g| fam.curve(c, g, min_slack).map(|cv| (cv.eval(u), g)))
                    .fold(None::<(T, &GenieSpec2<T>)>, |m, (v, g)| match m {
                        Some((bv, _)) if bv <= v => m,
                        _ => Some((v, g)),
                    })?;
                let objective = |x: &[T]| -> T {
                    let g = fam.decode(x);
                    if g.rho1.abs() > T::one() || g.rho2.abs() > T::one() {
                        return T::infinity();
                    }
                    match fam.curve(c, &g, min_slack) {
                        Some(cv) => cv.eval(u),
                        None => T::infinity(),
                    }
                };
                let (x, _) = nm.minimize(objective, &fam.encode(start.1), &fam.steps());
                fam.curve(c, &fam.decode(&x), min_slack)
            })
            .collect();
        curves.extend(refined.into_iter().flatten());
    }
    curves.extend(extra.iter().filter_map(|g| fam.curve(c, g, T::zero())));
    curves
}

/// Limits of the genie family at zero slack. These reproduce the ETW
/// genie, so the tightened region can never be looser than ETW.
fn closure_genies<T: Real>(c: &TwoUser<T>) -> Vec<GenieSpec2<T>> {
    if c.h12 == T::zero() || c.h21 == T::zero() {
        return Vec::new();
    }
    vec![GenieSpec2 {
        eta1: (T::one() / c.h21).abs(),
        eta2: (T::one() / c.h12).abs(),
        rho1: T::zero(),
        rho2: T::zero(),
    }]
}

/// Tightened outer bound: candidate curves from the genie search plus the
/// broadcast and single-user bounds.
#[derive(Debug, Clone, Serialize)]
pub struct EpiOuterBound<T> {
    pub channel: TwoUser<T>,
    /// `R2_max(R1)` curves.
    pub onebit: Vec<EpiCurve<T>>,
    pub two_r1r2: Vec<EpiCurve<T>>,
    /// Swapped curves give `R1_max(R2)`.
    pub onebit_swapped: Vec<EpiCurve<T>>,
    pub two_r1r2_swapped: Vec<EpiCurve<T>>,
    pub region: RateRegion<T>,
}

fn min_curve<T: Real>(curves: &[EpiCurve<T>], x: T) -> T {
    curves.iter().fold(T::infinity(), |m, c| m.min(c.eval(x)))
}

impl<T: Real> EpiOuterBound<T> {
    /// Largest `R1` allowed at `r2` by the swapped curves and the broadcast bound.
    fn r1_cap(&self, r2: T) -> T {
        let c = &self.channel;
        min_curve(&self.onebit_swapped, r2)
            .min(min_curve(&self.two_r1r2_swapped, r2))
            .min(bc_max_r1(c, r2))
            .min(c.c1())
    }

    /// Exact boundary `R2_max(r1)` of the candidate set; `-∞` if `r1` is
    /// outside the region.
    pub fn r2_at(&self, r1: T) -> T {
        let c = &self.channel;
        if r1 < T::zero() || r1 > c.c1() {
            return T::neg_infinity();
        }
        let direct = min_curve(&self.onebit, r1)
            .min(min_curve(&self.two_r1r2, r1))
            .min(bc_max_r1(&c.swapped(), r1))
            .min(bc_max_r2_given_r1(c, r1))
            .min(c.c2());
        if !(direct >= T::zero()) || self.r1_cap(T::zero()) < r1 {
            return T::neg_infinity();
        }
        // invert the swapped constraints: R1 ≤ g(R2) with g nonincreasing
        let inv = bisect_last_true(T::zero(), direct, T::tol(1e-13), |r2| {
            self.onebit_swapped.iter().all(|cv| cv.eval(r2) >= r1)
                && self.two_r1r2_swapped.iter().all(|cv| cv.eval(r2) >= r1)
        });
        direct.min(inv)
    }

    /// `max (R1 + R2)` by golden-section search on the concave boundary.
    pub fn max_sum(&self) -> T {
        let hi = self.r1_cap(T::zero()).min(self.channel.c1());
        if !(hi >= T::zero()) {
            return T::neg_infinity();
        }
        let f = |x: T| x + self.r2_at(x);
        let ratio = T::lit(0.5 * (5f64.sqrt() - 1.0));
        let (mut a, mut b) = (T::zero(), hi);
        let mut x1 = b - ratio * (b - a);
        let mut x2 = a + ratio * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..200 {
            if b - a <= T::tol(1e-13) {
                break;
            }
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = f(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = f(x1);
            }
        }
        [T::zero(), hi, x1, x2]
            .into_iter()
            .map(f)
            .fold(T::neg_infinity(), |m, v| m.max(v))
    }
}

/// Tightened outer region. Genies come from a coarse grid, per-sample
/// local refinement, the zero-slack closure genies and, when available, the
/// low-interference witness.
pub fn epi_outer_region<T: Real>(net: &InterferenceNetwork<T>, cfg: &GenieSearch) -> Result<EpiOuterBound<T>> {
    let c = TwoUser::of(net)?;
    net.require_weak()?;
    cfg.validate()?;
    let mut extra = closure_genies(&c);
    if let Some(w) = low_interference_witness(&c) {
        extra.push(w);
    }
    let extra_sw: Vec<GenieSpec2<T>> = extra.iter().map(|g| g.swapped()).collect();
    let sw = c.swapped();
    let mut bound = EpiOuterBound {
        channel: c,
        onebit: family_candidates(Family::Onebit, &c, cfg, &extra),
        two_r1r2: family_candidates(Family::TwoR1R2, &c, cfg, &extra),
        onebit_swapped: family_candidates(Family::Onebit, &sw, cfg, &extra_sw),
        two_r1r2_swapped: family_candidates(Family::TwoR1R2, &sw, cfg, &extra_sw),
        region: RateRegion::from_curve(Vec::new(), Vec::new()),
    };
    let grid = region_grid(net, cfg.points)?;
    let r2: Vec<T> = grid.par_iter().map(|&x| bound.r2_at(x)).collect();
    let mut region = RateRegion::from_curve(grid, r2);
    let (o, z) = (T::one(), T::zero());
    region.halfplanes = vec![Halfplane::new("R1", o, z, c.c1()), Halfplane::new("R2", z, o, c.c2())];
    bound.region = region;
    Ok(bound)
}

// ---------------------------------------------------------------------------
// low-interference certificates

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowInterference<T> {
    pub holds: bool,
    /// `|h12(1+h21²P1)| + |h21(1+h12²P2)|`
    pub value: T,
    /// Useful and smart genie from the constructive proof, when `holds`.
    pub witness: Option<GenieSpec2<T>>,
}

fn low_interference_value<T: Real>(c: &TwoUser<T>) -> (T, T) {
    let o = T::one();
    (
        (c.h12 * (o + c.g21() * c.p1)).abs(),
        (c.h21 * (o + c.g12() * c.p2)).abs(),
    )
}

/// `ρ1 = sin φ`, `ρ2 = cos φ` with `cos²φ = (a + 1 − b)/2`, and `η` pinned by
/// the smart conditions.
fn low_interference_witness<T: Real>(c: &TwoUser<T>) -> Option<GenieSpec2<T>> {
    let (a, b) = low_interference_value(c);
    if a + b > T::one() {
        return None;
    }
    let o = T::one();
    let cos2 = ((a + o - b) * T::half()).max(T::zero()).min(o);
    let rho2 = cos2.sqrt();
    let rho1 = (o - cos2).sqrt();
    let pin = |target: T, rho: T| if rho > T::zero() { target / rho } else { T::zero() };
    Some(GenieSpec2 {
        eta1: pin(o + c.g12() * c.p2, rho1),
        eta2: pin(o + c.g21() * c.p1, rho2),
        rho1,
        rho2,
    })
}

pub fn low_interference_test<T: Real>(net: &InterferenceNetwork<T>) -> Result<LowInterference<T>> {
    let c = TwoUser::of(net)?;
    let (a, b) = low_interference_value(&c);
    let witness = low_interference_witness(&c);
    Ok(LowInterference {
        holds: witness.is_some(),
        value: a + b,
        witness,
    })
}

/// `|h + h³P|`
pub fn symmetric_low_interference_value<T: Real>(p: T, h: T) -> T {
    (h + h * h * h * p).abs()
}

pub fn symmetric_low_interference_test<T: Real>(p: T, h: T) -> bool {
    symmetric_low_interference_value(p, h) <= T::half()
}

/// `|ηρ − (1+h²P)| ≤ 1e-9` for both users of a symmetric genie.
pub fn smart_genie_check<T: Real>(p: T, h: T, g: &GenieSpec2<T>) -> bool {
    let target = T::one() + h * h * p;
    let tol = T::tol(SMART_TOL);
    (g.eta1 * g.rho1 - target).abs() <= tol && (g.eta2 * g.rho2 - target).abs() <= tol
}

/// `|hη| ≤ √(1−ρ²)` for both users.
pub fn useful_genie_check<T: Real>(h: T, g: &GenieSpec2<T>) -> bool {
    let tol = T::tol(1e-12);
    let ok = |eta: T, rho: T| (h * eta).abs() <= (T::one() - rho * rho).max(T::zero()).sqrt() + tol;
    ok(g.eta1, g.rho2) && ok(g.eta2, g.rho1)
}

/// Usefulness for an asymmetric channel: `|h21η1| ≤ √(1−ρ2²)` and
/// `|h12η2| ≤ √(1−ρ1²)`.
pub fn useful_genie_check_asym<T: Real>(net: &InterferenceNetwork<T>, g: &GenieSpec2<T>) -> Result<bool> {
    let c = TwoUser::of(net)?;
    let tol = T::tol(1e-12);
    let root = |r: T| (T::one() - r * r).max(T::zero()).sqrt();
    Ok((c.h21 * g.eta1).abs() <= root(g.rho2) + tol && (c.h12 * g.eta2).abs() <= root(g.rho1) + tol)
}

/// Engine side of the smart condition: `I(X1;S1|Y1)` in bits.
pub fn smart_genie_leak<T: Real>(net: &InterferenceNetwork<T>, g: &GenieSpec2<T>) -> Result<(T, T)> {
    let sys = genie_system(net, g)?;
    Ok((
        sys.conditional_mutual_information(&["X1"], &["S1"], &["Y1"])?,
        sys.conditional_mutual_information(&["X2"], &["S2"], &["Y2"])?,
    ))
}

/// `I(X1;Y1,S1) + I(X2;Y2,S2)` with Gaussian inputs.
pub fn genie_sum_bound<T: Real>(net: &InterferenceNetwork<T>, g: &GenieSpec2<T>) -> Result<T> {
    let sys = genie_system(net, g)?;
    Ok(sys.mutual_information(&["X1"], &["Y1", "S1"])? + sys.mutual_information(&["X2"], &["Y2", "S2"])?)
}

/// Looks for `(η, ρ)` that is both useful and smart on a symmetric channel:
/// a `ρ` grid of step 0.001 with `η = (1+h²P)/ρ`, then a golden-section
/// polish of the best usefulness margin.
pub fn symmetric_genie_search<T: Real>(p: T, h: T) -> Option<GenieSpec2<T>> {
    let o = T::one();
    let target = o + h * h * p;
    let genie = |rho: T| GenieSpec2 {
        eta1: target / rho,
        eta2: target / rho,
        rho1: rho,
        rho2: rho,
    };
    let margin = |rho: T| (o - rho * rho).max(T::zero()).sqrt() - (h * target / rho).abs();
    let n = 1000;
    let mut best = (T::neg_infinity(), 1);
    for i in 1..n {
        let rho = T::of_usize(i) / T::of_usize(n);
        let g = genie(rho);
        if useful_genie_check(h, &g) && smart_genie_check(p, h, &g) {
            return Some(g);
        }
        let m = margin(rho);
        if m > best.0 {
            best = (m, i);
        }
    }
    let step = o / T::of_usize(n);
    let (mut a, mut b) = (T::of_usize(best.1 - 1) * step, T::of_usize(best.1 + 1) * step);
    a = a.max(T::tol(1e-12));
    b = b.min(o);
    let ratio = T::lit(0.5 * (5f64.sqrt() - 1.0));
    for _ in 0..200 {
        let x1 = b - ratio * (b - a);
        let x2 = a + ratio * (b - a);
        if margin(x1) < margin(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    let g = genie((a + b) * T::half());
    (useful_genie_check(h, &g) && smart_genie_check(p, h, &g)).then_some(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InrThreshold<T> {
    pub snr: T,
    /// Cross gain at the boundary `h + h³P = 1/2`.
    pub h: T,
    /// `h²P`
    pub inr: T,
}

impl<T: Real> InrThreshold<T> {
    pub fn snr_db(&self) -> T {
        to_db(self.snr)
    }

    pub fn inr_db(&self) -> T {
        to_db(self.inr)
    }
}

/// Largest INR of a symmetric two-user channel with SNR `snr` for which TIN
/// is sum-capacity optimal.
pub fn inr_threshold<T: Real>(snr: T) -> Result<InrThreshold<T>> {
    if !(snr > T::zero() && snr.is_finite()) {
        return Err(Error::Precondition(format!("SNR must be positive, got {snr}")));
    }
    let h = bisect_root(T::zero(), T::half(), T::lit(INR_H_TOL), |h| h + h * h * h * snr - T::half())
        .ok_or_else(|| Error::Domain("no root of h + h³P = 1/2 in [0, 1/2]".into()))?;
    Ok(InrThreshold { snr, h, inr: h * h * snr })
}

// ---------------------------------------------------------------------------
// Han–Kobayashi with Gaussian inputs

/// Common-power fractions `λ1, λ2` on a uniform grid over `[0,1]²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HkSplits {
    pub n1: usize,
    pub n2: usize,
}

impl Default for HkSplits {
    fn default() -> Self {
        Self { n1: 64, n2: 64 }
    }
}

fn hk_system<T: Real>(c: &TwoUser<T>, lam1: T, lam2: T) -> Result<GaussianSystem<T>> {
    let o = T::one();
    let mut b = SystemBuilder::new();
    b.source("U1", lam1 * c.p1)
        .source("V1", (o - lam1) * c.p1)
        .source("U2", lam2 * c.p2)
        .source("V2", (o - lam2) * c.p2)
        .source("Z1", o)
        .source("Z2", o);
    b.combine("X1", &[("U1", o), ("V1", o)]);
    b.combine("X2", &[("U2", o), ("V2", o)]);
    b.combine("Y1", &[("X1", o), ("X2", c.h12), ("Z1", o)]);
    b.combine("Y2", &[("X1", c.h21), ("X2", o), ("Z2", o)]);
    b.build()
}

/// The seven constraints for one power split; `U_i` carries the common
/// message with power `λ_i P_i`.
pub fn hk_split_halfplanes<T: Real>(net: &InterferenceNetwork<T>, lam1: T, lam2: T) -> Result<Vec<Halfplane<T>>> {
    let c = TwoUser::of(net)?;
    for l in [lam1, lam2] {
        if !(l >= T::zero() && l <= T::one()) {
            return Err(Error::Config(format!("power split {l} outside [0, 1]")));
        }
    }
    let s = hk_system(&c, lam1, lam2)?;
    let d1 = s.conditional_mutual_information(&["X1"], &["Y1"], &["U2"])?;
    let d2 = s.conditional_mutual_information(&["X2"], &["Y2"], &["U1"])?;
    let a1 = s.conditional_mutual_information(&["X1"], &["Y1"], &["U1", "U2"])?;
    let a2 = s.conditional_mutual_information(&["X2"], &["Y2"], &["U1", "U2"])?;
    let g1 = s.mutual_information(&["X1", "U2"], &["Y1"])?;
    let g2 = s.mutual_information(&["X2", "U1"], &["Y2"])?;
    let e1 = s.conditional_mutual_information(&["X1", "U2"], &["Y1"], &["U1"])?;
    let e2 = s.conditional_mutual_information(&["X2", "U1"], &["Y2"], &["U2"])?;
    let (o, z, two) = (T::one(), T::zero(), T::two());
    Ok(vec![
        Halfplane::new("R1", o, z, d1),
        Halfplane::new("R2", z, o, d2),
        Halfplane::new("R1+R2 (a1+g2)", o, o, a1 + g2),
        Halfplane::new("R1+R2 (a2+g1)", o, o, a2 + g1),
        Halfplane::new("R1+R2 (e1+e2)", o, o, e1 + e2),
        Halfplane::new("2R1+R2", two, o, a1 + g1 + e2),
        Halfplane::new("R1+2R2", o, two, a2 + g2 + e1),
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct HkRegion<T> {
    /// Upper concave envelope of the union over splits.
    pub region: RateRegion<T>,
    /// Exact largest sum rate over all splits.
    pub max_sum: T,
    pub best_split: (T, T),
}

/// Union over power splits of the Gaussian-input Han–Kobayashi regions,
/// convexified. No time sharing beyond the convex hull.
pub fn hk_gaussian_inner_region<T: Real>(net: &InterferenceNetwork<T>, splits: HkSplits) -> Result<HkRegion<T>> {
    TwoUser::of(net)?;
    net.require_weak()?;
    if splits.n1 < 1 || splits.n2 < 1 {
        return Err(Error::Config("power split grid needs at least one point per axis".into()));
    }
    let grid = region_grid(net, BOUNDARY_POINTS)?;
    let frac = |i: usize, n: usize| {
        if n == 1 {
            T::zero()
        } else {
            T::of_usize(i) / T::of_usize(n - 1)
        }
    };
    #[allow(clippy::type_complexity)]
    let per_split: Vec<Result<(Vec<T>, T, (T, T))>> = (0..splits.n1 * splits.n2)
        .into_par_iter()
        .map(|k| {
            let (l1, l2) = (frac(k / splits.n2, splits.n1), frac(k % splits.n2, splits.n2));
            let hps = hk_split_halfplanes(net, l1, l2)?;
            let reg = RateRegion::from_halfplanes(hps, grid.clone());
            let sum = halfplane_max_weighted(&reg.halfplanes, T::one(), T::one());
            Ok((reg.r2, sum, (l1, l2)))
        })
        .collect();
    let mut union = vec![T::neg_infinity(); grid.len()];
    let mut max_sum = T::neg_infinity();
    let mut best_split = (T::zero(), T::zero());
    for item in per_split {
        let (r2, sum, split) = item?;
        for (u, v) in union.iter_mut().zip(r2) {
            *u = u.max(v);
        }
        if sum > max_sum {
            max_sum = sum;
            best_split = split;
        }
    }
    let region = RateRegion::from_curve(grid, union).upper_concave_envelope();
    Ok(HkRegion {
        region,
        max_sum,
        best_split,
    })
}

// ---------------------------------------------------------------------------
// sum capacity

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Inner,
    Outer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness<T> {
    Genie(GenieSpec2<T>),
    Constraint(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate<T> {
    pub value: T,
    pub kind: BoundKind,
    pub witness: Witness<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumCapacity<T> {
    /// Inner and outer values coincide (TIN is optimal).
    pub established: bool,
    pub inner: BoundCertificate<T>,
    pub outer: BoundCertificate<T>,
}

impl<T: Real> SumCapacity<T> {
    pub fn value(&self) -> Option<T> {
        self.established.then_some(self.inner.value)
    }

    pub fn gap(&self) -> T {
        self.outer.value - self.inner.value
    }
}

/// Sum capacity when the low-interference condition holds; otherwise TIN as
/// inner bound and the best available outer bound.
pub fn sum_capacity<T: Real>(net: &InterferenceNetwork<T>) -> Result<SumCapacity<T>> {
    sum_capacity_with(net, &GenieSearch::default())
}

pub fn sum_capacity_with<T: Real>(net: &InterferenceNetwork<T>, search: &GenieSearch) -> Result<SumCapacity<T>> {
    let tin = tin_sum_rate(net)?;
    let inner = BoundCertificate {
        value: tin,
        kind: BoundKind::Inner,
        witness: Witness::Constraint("treating interference as noise".into()),
    };
    let li = low_interference_test(net)?;
    if let Some(w) = li.witness {
        return Ok(SumCapacity {
            established: true,
            inner,
            outer: BoundCertificate {
                value: tin,
                kind: BoundKind::Outer,
                witness: Witness::Genie(w),
            },
        });
    }
    let outer = if net.require_weak().is_ok() {
        let hps = etw_halfplanes(net)?;
        let etw = halfplane_max_weighted(&hps, T::one(), T::one());
        let epi = epi_outer_region(net, search)?.max_sum();
        if epi < etw {
            (epi, "EPI-tightened outer region")
        } else {
            (etw, "ETW outer region")
        }
    } else {
        // outside the weak regime only the cut-set style bound is used
        let c = TwoUser::of(net)?;
        (c.c1() + c.c2(), "single-user capacities")
    };
    Ok(SumCapacity {
        established: false,
        inner,
        outer: BoundCertificate {
            value: outer.0,
            kind: BoundKind::Outer,
            witness: Witness::Constraint(outer.1.into()),
        },
    })
}
