use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use gicb_core::channel::{classify, ChannelClass, InterferenceNetwork, NetworkFile};
use gicb_core::network::{
    m_user_tin_sum_rate, many_to_one_sum_capacity, many_to_one_value, one_to_many_sum_capacity, one_to_many_test,
    three_user_feasible, three_user_inr_threshold, three_user_smart_conditions, vector_genie_sum_bound,
    FeasibilitySearch, NetworkSumCapacity, OrderingFunction,
};
use gicb_core::region::BOUNDARY_POINTS;
use gicb_core::two_user::{
    broadcast_region, epi_outer_region, etw_halfplanes, etw_outer_region, hk_gaussian_inner_region, inr_threshold,
    low_interference_test, region_grid, sum_capacity_with, tin_rates, GenieSearch, HkSplits, TwoUser, INR_H_TOL,
    MIN_SLACK, SMART_TOL,
};
use gicb_core::verify::{run_verifier_suite, Fault, VerifyConfig};

use crate::output::{json_number, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default slack for the pointwise region-ordering check.
pub const ORDERING_TOL: f64 = 1e-9;

/// Orderings are enumerated exhaustively up to this many users.
const MAX_USERS_ALL_ORDERINGS: usize = 7;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input (exit 2).
    Input(String),
    /// The request is outside a bound's domain (exit 3).
    Domain(String),
    /// A checked property failed (exit 1); the artifact is still written.
    Property(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Property(_) => 1,
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::Property(m) => write!(f, "property failure: {m}"),
        }
    }
}

impl From<gicb_core::Error> for CliError {
    fn from(e: gicb_core::Error) -> Self {
        match e {
            gicb_core::Error::Domain(_) | gicb_core::Error::Precondition(_) => CliError::Domain(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepMode {
    TwoUser,
    ThreeUserSym,
}

/// Where a channel comes from: a file or inline two-user parameters.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ChannelArgs {
    /// JSON network file `{ "M": .., "H": [[..]], "P": [..], "noise": [..] }`
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub h12: Option<f64>,
    #[arg(long)]
    pub h21: Option<f64>,
}

impl ChannelArgs {
    pub fn load(&self) -> CliResult<InterferenceNetwork<f64>> {
        let inline = [self.p1, self.p2, self.h12, self.h21];
        match (&self.channel, inline.iter().all(Option::is_some)) {
            (Some(_), _) if inline.iter().any(Option::is_some) => Err(CliError::Input(
                "give either --channel or the inline parameters, not both".into(),
            )),
            (Some(path), _) => load_file(path),
            (None, true) => Ok(InterferenceNetwork::two_user(
                inline[0].unwrap_or_default(),
                inline[1].unwrap_or_default(),
                inline[2].unwrap_or_default(),
                inline[3].unwrap_or_default(),
            )?),
            (None, false) => Err(CliError::Input(
                "a channel is required: --channel <file> or all of --p1 --p2 --h12 --h21".into(),
            )),
        }
    }
}

fn load_file(path: &Path) -> CliResult<InterferenceNetwork<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file: NetworkFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed network file {}: {e}", path.display())))?;
    Ok(file.to_network()?)
}

fn two_user(net: &InterferenceNetwork<f64>) -> CliResult<TwoUser<f64>> {
    let c = TwoUser::of(net)?;
    net.require_weak()?;
    Ok(c)
}

fn header(command: &str, tolerances: Value) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("tool".into(), json!("gicb"));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert("tolerances".into(), tolerances);
    m
}

fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Input(format!("serialization failed: {e}")))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

fn two_user_tolerances(ordering: f64) -> Value {
    json!({
        "min_slack": MIN_SLACK,
        "smart_genie": SMART_TOL,
        "inr_threshold_h": INR_H_TOL,
        "region_ordering": ordering,
    })
}

// ---------------------------------------------------------------------------
// bounds

pub fn cmd_bounds(net: &InterferenceNetwork<f64>, tol: f64) -> CliResult<String> {
    let c = two_user(net)?;
    let search = GenieSearch::default();
    let (r1, r2) = tin_rates(net)?;
    let etw = etw_halfplanes(net)?;
    let epi = epi_outer_region(net, &search)?;
    let bc = broadcast_region(net)?;
    let li = low_interference_test(net)?;
    let sc = sum_capacity_with(net, &search)?;

    let step = (bc.len() / 64).max(1);
    let bc_samples: Vec<Value> = bc
        .r1
        .iter()
        .zip(&bc.r2)
        .step_by(step)
        .map(|(&x, &y)| json!({ "r1": json_number(x), "r2_max": json_number(y) }))
        .collect();
    let epi_step = (epi.region.len() / 64).max(1);
    let epi_samples: Vec<Value> = epi
        .region
        .r1
        .iter()
        .zip(&epi.region.r2)
        .step_by(epi_step)
        .map(|(&x, &y)| json!({ "r1": json_number(x), "r2_max": json_number(y) }))
        .collect();

    let mut m = header("bounds", two_user_tolerances(tol));
    m.insert("channel".into(), to_value(&NetworkFile::from_network(net))?);
    m.insert(
        "single_user_capacity".into(),
        json!({ "c1": json_number(c.c1()), "c2": json_number(c.c2()) }),
    );
    m.insert(
        "tin".into(),
        json!({ "r1": json_number(r1), "r2": json_number(r2), "sum": json_number(r1 + r2) }),
    );
    m.insert("etw_constraints".into(), to_value(&etw)?);
    m.insert("broadcast_boundary".into(), Value::Array(bc_samples));
    m.insert(
        "epi".into(),
        json!({ "max_sum": json_number(epi.max_sum()), "boundary": epi_samples }),
    );
    m.insert("low_interference".into(), to_value(&li)?);
    m.insert("regime".into(), json!(li.holds));
    m.insert("sum_capacity".into(), to_value(&sc)?);
    Ok(pretty(&Value::Object(m)))
}

// ---------------------------------------------------------------------------
// region

pub fn region_table(net: &InterferenceNetwork<f64>) -> CliResult<Table> {
    two_user(net)?;
    let grid = region_grid(net, BOUNDARY_POINTS)?;
    let (t1, t2) = tin_rates(net)?;
    let hk = hk_gaussian_inner_region(net, HkSplits::default())?;
    let etw = etw_outer_region(net)?;
    let bc = broadcast_region(net)?;
    let epi = epi_outer_region(net, &GenieSearch::default())?;
    let epi_r2: Vec<f64> = grid.par_iter().map(|&x| epi.r2_at(x)).collect();
    let mut t = Table::new(vec!["R1", "R2_tin_corner", "R2_hk", "R2_etw", "R2_bc", "R2_epi"]);
    for (i, &r1) in grid.iter().enumerate() {
        let tin = if r1 <= t1 { t2 } else { f64::NEG_INFINITY };
        t.push(vec![r1, tin, hk.region.r2[i], etw.r2[i], bc.r2[i], epi_r2[i]]);
    }
    Ok(t)
}

/// Pointwise `R2_hk ≤ R2_epi ≤ min(R2_etw, R2_bc)` over feasible samples.
pub fn region_ordering_violation(t: &Table) -> f64 {
    t.rows.iter().fold(f64::NEG_INFINITY, |worst, r| {
        let (hk, etw, bc, epi) = (r[2], r[3], r[4], r[5]);
        let mut w = worst;
        if hk.is_finite() {
            w = w.max(hk - epi);
        }
        if epi.is_finite() {
            w = w.max(epi - etw.min(bc));
        }
        w
    })
}

pub fn cmd_region(net: &InterferenceNetwork<f64>, format: Format, tol: f64) -> CliResult<(String, Option<CliError>)> {
    let t = region_table(net)?;
    let worst = region_ordering_violation(&t);
    let text = match format {
        Format::Csv => t.to_csv(),
        Format::Json => {
            let mut m = header("region", two_user_tolerances(tol));
            m.insert("channel".into(), to_value(&NetworkFile::from_network(net))?);
            m.insert("columns".into(), t.to_json());
            pretty(&Value::Object(m))
        }
    };
    let failure = (worst > tol).then(|| {
        CliError::Property(format!(
            "region-ordering: HK ≤ EPI ≤ min(ETW, BC) violated by {worst:e} (tolerance {tol:e})"
        ))
    });
    Ok((text, failure))
}

// ---------------------------------------------------------------------------
// threshold sweep

/// Parses `a:b:step` in dB.
pub fn parse_range(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Input(format!("range `{s}` must look like start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let (a, b, step) = (v[0], v[1], v[2]);
    if !(a.is_finite() && b.is_finite() && step.is_finite()) || step <= 0.0 || b < a {
        return Err(CliError::Input(format!(
            "range `{s}` must be nonempty and increasing with a positive step"
        )));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + step * i as f64).collect())
}

pub fn sweep_table(snr_db: &[f64], mode: SweepMode) -> CliResult<Table> {
    let rows: Vec<CliResult<Vec<f64>>> = snr_db
        .par_iter()
        .map(|&db| {
            let snr = 10f64.powf(db / 10.0);
            let two = inr_threshold(snr)?.inr_db();
            Ok(match mode {
                SweepMode::TwoUser => vec![db, two],
                SweepMode::ThreeUserSym => {
                    let three = three_user_inr_threshold(snr, &FeasibilitySearch::default())?;
                    vec![db, three.inr_total_db(), two]
                }
            })
        })
        .collect();
    let columns = match mode {
        SweepMode::TwoUser => vec!["snr_db", "inr_db_two_user"],
        SweepMode::ThreeUserSym => vec!["snr_db", "inr_total_db_vector_genie", "inr_db_two_user"],
    };
    let mut t = Table::new(columns);
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

pub fn cmd_threshold_sweep(range: &str, mode: SweepMode, format: Format) -> CliResult<String> {
    let snr = parse_range(range)?;
    let t = sweep_table(&snr, mode)?;
    Ok(match format {
        Format::Csv => t.to_csv(),
        Format::Json => {
            let search = FeasibilitySearch::default();
            let mut m = header(
                "threshold-sweep",
                json!({
                    "inr_threshold_h": INR_H_TOL,
                    "three_user_h": gicb_core::network::THREE_USER_H_TOL,
                    "feasibility_step": search.step,
                    "feasibility_fine_step": search.fine_step,
                }),
            );
            m.insert("columns".into(), t.to_json());
            pretty(&Value::Object(m))
        }
    })
}

// ---------------------------------------------------------------------------
// network bounds

fn one_based(pi: &OrderingFunction) -> Vec<usize> {
    pi.as_slice().iter().map(|&q| q + 1).collect()
}

pub fn cmd_network_bounds(net: &InterferenceNetwork<f64>) -> CliResult<String> {
    let m = net.users();
    let class = classify(net);
    let tin = m_user_tin_sum_rate(net);
    let orderings = if m <= MAX_USERS_ALL_ORDERINGS {
        OrderingFunction::all(m)
    } else {
        vec![OrderingFunction::cyclic(m)?]
    };
    let bounds: Vec<f64> = orderings
        .iter()
        .map(|pi| vector_genie_sum_bound(net, pi))
        .collect::<Result<_, _>>()?;
    let single: f64 = (0..m).map(|r| 0.5 * (1.0 + net.power(r)).log2()).sum();
    let outer = bounds.iter().fold(single, |a, &b| a.min(b));

    let mut out = header(
        "network-bounds",
        json!({ "three_user_h": gicb_core::network::THREE_USER_H_TOL, "psd": 1e-10 }),
    );
    out.insert("channel".into(), to_value(&NetworkFile::from_network(net))?);
    out.insert("class".into(), json!(class.as_str()));
    out.insert("tin_sum_rate".into(), json_number(tin));
    out.insert(
        "vector_genie".into(),
        Value::Array(
            orderings
                .iter()
                .zip(&bounds)
                .map(|(pi, &b)| json!({ "ordering": one_based(pi), "sum_bound": json_number(b) }))
                .collect(),
        ),
    );

    let mut sum = NetworkSumCapacity {
        established: false,
        inner: tin,
        outer,
    };
    match class {
        ChannelClass::ManyToOne => {
            out.insert("many_to_one_value".into(), json_number(many_to_one_value(net)?));
            let c = many_to_one_sum_capacity(net)?;
            if c.established {
                sum = c;
            }
        }
        ChannelClass::OneToMany => {
            out.insert("one_to_many".into(), to_value(&one_to_many_test(net)?)?);
            let c = one_to_many_sum_capacity(net)?;
            if c.established {
                sum = c;
            }
        }
        _ => {}
    }
    if let (3, Some(h)) = (m, net.symmetric_gain()) {
        let p = net.power(0);
        let (t1, t2) = three_user_smart_conditions(p, h);
        let witness = three_user_feasible(p, h, &FeasibilitySearch::default());
        if witness.is_some() {
            sum = NetworkSumCapacity {
                established: true,
                inner: tin,
                outer: tin,
            };
        }
        out.insert(
            "three_user_genie".into(),
            json!({
                "smart_targets": [json_number(t1), json_number(t2)],
                "witness": to_value(&witness)?,
            }),
        );
    }
    out.insert("sum_capacity".into(), to_value(&sum)?);
    Ok(pretty(&Value::Object(out)))
}

// ---------------------------------------------------------------------------
// verify

pub fn cmd_verify(seed: u64, tol: Option<f64>, fault: Option<&str>) -> CliResult<(String, Option<CliError>)> {
    let fault = match fault {
        None => None,
        Some(name) => Some(Fault::parse(name).ok_or_else(|| {
            let known: Vec<&str> = Fault::ALL.iter().map(|f| f.name()).collect();
            CliError::Input(format!("unknown fault `{name}`; known: {}", known.join(", ")))
        })?),
    };
    let cfg = VerifyConfig {
        seed,
        tol,
        fault,
        ..VerifyConfig::default()
    };
    let report = run_verifier_suite(&cfg);
    let mut m = header(
        "verify",
        json!({
            "override": tol.map(json_number),
            "per_property": report
                .results
                .iter()
                .map(|r| (r.name.clone(), json_number(r.tolerance)))
                .collect::<serde_json::Map<_, _>>(),
        }),
    );
    m.insert("seed".into(), json!(seed));
    m.insert("fault".into(), json!(fault.map(Fault::name)));
    m.insert("passed".into(), json!(report.all_passed()));
    m.insert("failures".into(), json!(report.failures()));
    m.insert("results".into(), to_value(&report.results)?);
    let failure = (!report.all_passed()).then(|| CliError::Property(report.failures().join(", ")));
    Ok((pretty(&Value::Object(m)), failure))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0:60:5").unwrap().len(), 13);
        assert_eq!(parse_range("1:1:1").unwrap(), vec![1.0]);
        assert!(parse_range("5:0:1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("a:1:1").is_err());
    }

    #[test]
    fn error_codes() {
        let d: CliError = gicb_core::Error::Domain("x".into()).into();
        assert_eq!(d.exit_code(), 3);
        let i: CliError = gicb_core::Error::InvalidChannel("x".into()).into();
        assert_eq!(i.exit_code(), 2);
        assert_eq!(CliError::Property("p".into()).exit_code(), 1);
    }

    #[test]
    fn zero_interference_region_is_a_rectangle() {
        let net = InterferenceNetwork::two_user(3.0, 5.0, 0.0, 0.0).unwrap();
        let t = region_table(&net).unwrap();
        let c2 = 0.5 * 6f64.log2();
        for r in &t.rows {
            for &v in &r[2..] {
                assert!((v - c2).abs() < 1e-9, "{r:?}");
            }
        }
    }

    #[test]
    fn inline_and_file_are_exclusive() {
        let args = ChannelArgs {
            channel: Some("x.json".into()),
            p1: Some(1.0),
            ..ChannelArgs::default()
        };
        assert_eq!(args.load().unwrap_err().exit_code(), 2);
        assert_eq!(ChannelArgs::default().load().unwrap_err().exit_code(), 2);
    }
}
