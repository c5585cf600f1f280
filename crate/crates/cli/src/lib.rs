//! Batch front-end: counting runs, comparison reports, verification suites
//! and the leading constant, written as CSV or JSON.
//!
//! The binary is a thin wrapper around [`RunConfig`] and [`run`]; every
//! command returns its full output as a string together with an exit status,
//! so the behaviour is testable without spawning processes.
//!
//! Exit codes: `0` success, `1` verification failure or method mismatch,
//! `2` configuration error, `3` precision or budget exhaustion.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use manin_dp4::constant::{
    self, assemble_c, density, mobius_local_check, volume_sf_check, DensityConfig, DensityMethod,
    DEFAULT_TRUNCATION,
};
use manin_dp4::direct::{count, direct_limit, CountResult, Method};
use manin_dp4::geometry::{count_fp, height_with_precision};
use manin_dp4::numberfield::{make_field, AlgInt, FieldTag, PlaceKind, MAX_PRECISION_BITS, MIN_PRECISION_BITS};
use manin_dp4::rational::{format_rational, parse_rational, to_f64};
use manin_dp4::torsor::{enumerate_m_with, height_condition, psi, EnumOptions};
use manin_dp4::{Error, Rational};
use serde_json::{json, Value};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Failure = 1,
    Config = 2,
    Budget = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Maps a library error to an exit status.
    pub fn of_error(e: &Error) -> Status {
        match e {
            Error::UnsupportedField(_) | Error::Domain(_) | Error::LimitExceeded { .. } => Status::Config,
            Error::PrecisionExhausted { .. } | Error::BudgetExceeded { .. } => Status::Budget,
            Error::Internal(_) => Status::Failure,
        }
    }
}

/// A command's rendered output and exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub status: Status,
}

/// An error that aborts a command, with its exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub message: String,
    pub status: Status,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { status: Status::of_error(&e), message: e.to_string() }
    }
}

fn config_error(message: impl Into<String>) -> CliError {
    CliError { message: message.into(), status: Status::Config }
}

/// The top-level command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Count points of bounded height: one row per bound.
    Count,
    /// Both methods side by side, with the normalized ratio and the band
    /// around the predicted constant.
    Compare,
    /// Run a verification suite.
    Verify,
    /// Assemble the predicted leading constant.
    Constant,
}

/// Verification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Fp,
    Volume,
    Densities,
    All,
}

/// Output format.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

fn parse_bound(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_ladder(s: &str) -> Result<Ladder, String> {
    let items = s.split(',').map(str::trim).filter(|t| !t.is_empty());
    items.map(parse_bound).collect::<Result<Vec<_>, _>>().map(Ladder)
}

fn parse_count(s: &str) -> Result<u64, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if !r.is_integer() || *r.numer() < 0 || *r.numer() > u64::MAX as i128 {
        return Err(format!("{s:?} is not a non-negative integer"));
    }
    Ok(*r.numer() as u64)
}

fn parse_field(s: &str) -> Result<FieldTag, String> {
    s.parse::<FieldTag>().map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

/// A comma-separated list of height bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ladder(pub Vec<Rational>);

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Ladder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_ladder(s)
    }
}

/// Everything a run depends on. Round-trips through its command-line form
/// ([`RunConfig::to_args`] and [`RunConfig::parse_args`]).
#[derive(Clone, Debug, PartialEq, Eq, Parser)]
#[command(name = "manin-dp4", version, about = "Point counts and leading constant for the A3+A1 quartic del Pezzo surface")]
pub struct RunConfig {
    /// What to do.
    #[arg(value_enum)]
    pub command: Command,
    /// Base field: q, qi, q-2, q-3, q-7, q-11, q2, q5 (or Q(sqrt(-2)), …).
    #[arg(long, default_value = "q", value_parser = parse_field)]
    pub field: FieldTag,
    /// Counting method for `count`.
    #[arg(long, default_value = "torsor", value_parser = parse_method)]
    pub method: Method,
    /// A single height bound (integer, fraction, decimal or 1e6 notation);
    /// repeatable.
    #[arg(long = "B", value_parser = parse_bound)]
    pub bounds: Vec<Rational>,
    /// Comma-separated height bounds; an empty string is an empty ladder.
    #[arg(long = "B-ladder", value_parser = parse_ladder)]
    pub ladder: Option<Ladder>,
    /// Verification suite for `verify`.
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Truncation bound `P` of the Euler product.
    #[arg(long = "primes-up-to", default_value_t = DEFAULT_TRUNCATION, value_parser = parse_count)]
    pub primes_up_to: u64,
    /// Monte Carlo sample count (accepts 1e7).
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub samples: u64,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Precision ceiling (bits) of the interval height comparisons.
    #[arg(long = "precision-bits", default_value_t = MAX_PRECISION_BITS)]
    pub precision_bits: u32,
    /// Worker threads (default: all cores).
    #[arg(long, env = "MANIN_DP4_THREADS")]
    pub threads: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write 0 for every elapsed time, making output byte-reproducible.
    #[arg(long = "omit-timing")]
    pub omit_timing: bool,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

impl RunConfig {
    /// Parses an argument list (without the program name).
    pub fn parse_args<I, S>(args: I) -> Result<RunConfig, clap::Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        let full = std::iter::once(std::ffi::OsString::from("manin-dp4")).chain(args.into_iter().map(Into::into));
        RunConfig::try_parse_from(full)
    }

    /// The command-line form of the configuration.
    pub fn to_args(&self) -> Vec<String> {
        let mut a = vec![value_name(&self.command)];
        let mut push = |k: &str, v: String| {
            a.push(format!("--{k}"));
            a.push(v);
        };
        push("field", self.field.short_name().to_string());
        push("method", self.method.to_string());
        for b in &self.bounds {
            push("B", format_rational(b));
        }
        if let Some(l) = &self.ladder {
            push("B-ladder", l.to_string());
        }
        push("suite", value_name(&self.suite));
        push("primes-up-to", self.primes_up_to.to_string());
        push("samples", self.samples.to_string());
        push("seed", self.seed.to_string());
        push("precision-bits", self.precision_bits.to_string());
        if let Some(t) = self.threads {
            push("threads", t.to_string());
        }
        if let Some(o) = &self.out {
            push("out", o.display().to_string());
        }
        push("format", value_name(&self.format));
        if self.omit_timing {
            a.push("--omit-timing".into());
        }
        a
    }

    /// All height bounds: `--B` values followed by the ladder.
    pub fn all_bounds(&self) -> Vec<Rational> {
        let mut v = self.bounds.clone();
        if let Some(l) = &self.ladder {
            v.extend(l.0.iter().copied());
        }
        v
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.threads == Some(0) {
            return Err(config_error("--threads must be at least 1"));
        }
        if !(MIN_PRECISION_BITS..=8 * MAX_PRECISION_BITS).contains(&self.precision_bits) {
            return Err(config_error(format!(
                "--precision-bits must lie in [{MIN_PRECISION_BITS}, {}]",
                8 * MAX_PRECISION_BITS
            )));
        }
        if self.primes_up_to < 11 {
            return Err(config_error("--primes-up-to must be at least 11"));
        }
        if self.samples < 2 {
            return Err(config_error("--samples must be at least 2"));
        }
        if self.all_bounds().iter().any(|b| *b.numer() < 0) {
            return Err(config_error("height bounds must be non-negative"));
        }
        Ok(())
    }

    fn elapsed(&self, t: f64) -> f64 {
        if self.omit_timing {
            0.0
        } else {
            t
        }
    }
}

/// Runs a command with the configured thread pool.
pub fn run(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError { message: e.to_string(), status: Status::Failure })?;
    pool.install(|| match cfg.command {
        Command::Count => cmd_count(cfg),
        Command::Compare => cmd_compare(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Constant => cmd_constant(cfg),
    })
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// `count`: one row `field,B,method,count,elapsed_s` per bound.
pub fn cmd_count(cfg: &RunConfig) -> Result<Output, CliError> {
    let bounds = cfg.all_bounds();
    if bounds.is_empty() && cfg.ladder.is_none() {
        return Err(config_error("count needs --B or --B-ladder"));
    }
    let field = make_field(cfg.field);
    let mut results: Vec<CountResult> = Vec::new();
    for b in &bounds {
        let mut r = count(&field, b, cfg.method, None)?;
        r.elapsed_s = cfg.elapsed(r.elapsed_s);
        results.push(r);
    }
    let text = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|r| {
                    vec![
                        r.field.short_name().to_string(),
                        r.bound.clone(),
                        r.method.to_string(),
                        r.count.to_string(),
                        r.elapsed_s.to_string(),
                    ]
                })
                .collect();
            csv_text(&["field", "B", "method", "count", "elapsed_s"], &rows)
        }
        Format::Json => json_text(&serde_json::to_value(&results).expect("serializable")),
    };
    Ok(Output { text, status: Status::Ok })
}

/// `N(B)/(B (log B)⁵)`.
pub fn normalized_ratio(count: u64, b: f64) -> f64 {
    count as f64 / (b * b.ln().powi(5))
}

/// `compare`: both methods per bound, the normalized ratio and the soft band
/// `[c/10, 10c]` around the predicted constant.
pub fn cmd_compare(cfg: &RunConfig) -> Result<Output, CliError> {
    let bounds = cfg.all_bounds();
    if bounds.is_empty() && cfg.ladder.is_none() {
        return Err(config_error("compare needs --B or --B-ladder"));
    }
    if let Some(b) = bounds.iter().find(|b| **b < Rational::from_integer(3)) {
        return Err(config_error(format!("compare needs B ≥ 3 (log⁵ B must be positive), got {}", format_rational(b))));
    }
    let field = make_field(cfg.field);
    let header =
        ["field", "B", "direct", "torsor", "agree", "ratio", "c", "band_lo", "band_hi", "in_band", "elapsed_s"];
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut mismatch = false;
    if !bounds.is_empty() {
        let bundle = assemble_c(&field, cfg.primes_up_to, &DensityConfig::default())?;
        let c = bundle.c.mid();
        let limit = direct_limit(&field);
        for b in &bounds {
            let start = Instant::now();
            let direct = if *b <= limit { Some(count(&field, b, Method::Direct, None)?.count) } else { None };
            let torsor = count(&field, b, Method::Torsor, None)?.count;
            let elapsed = cfg.elapsed(start.elapsed().as_secs_f64());
            let agree = direct.map(|d| d == torsor);
            mismatch |= agree == Some(false);
            let ratio = normalized_ratio(torsor, to_f64(b));
            let in_band = ratio >= c / 10.0 && ratio <= 10.0 * c;
            if !in_band {
                eprintln!(
                    "warning: N(B)/(B log^5 B) = {ratio:.3e} at B = {} is outside [c/10, 10c] = [{:.3e}, {:.3e}]",
                    format_rational(b),
                    c / 10.0,
                    10.0 * c
                );
            }
            rows.push(vec![
                field.tag.short_name().to_string(),
                format_rational(b),
                direct.map(|d| d.to_string()).unwrap_or_default(),
                torsor.to_string(),
                agree.map(|a| a.to_string()).unwrap_or_default(),
                ratio.to_string(),
                c.to_string(),
                (c / 10.0).to_string(),
                (10.0 * c).to_string(),
                in_band.to_string(),
                elapsed.to_string(),
            ]);
            records.push(json!({
                "field": field.tag.short_name(),
                "B": format_rational(b),
                "direct": direct,
                "torsor": torsor,
                "agree": agree,
                "ratio": ratio,
                "c": c,
                "band_lo": c / 10.0,
                "band_hi": 10.0 * c,
                "in_band": in_band,
                "elapsed_s": elapsed,
            }));
        }
    }
    let text = match cfg.format {
        Format::Csv => csv_text(&header, &rows),
        Format::Json => json_text(&json!({ "rows": records, "mismatch": mismatch })),
    };
    Ok(Output { text, status: if mismatch { Status::Failure } else { Status::Ok } })
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check { suite, name: name.into(), passed, detail: detail.into() }
    }
}

/// The θ Möbius identity for all 32 subsets and `p ∈ {2, 3, 5}`, the exact
/// polytope volume, and the lifted height against the certified height.
pub fn suite_identities(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        for j in 0..32u8 {
            let (lhs, rhs) = mobius_local_check(p, j);
            let name = format!("mobius p={p} J={:?}", constant::theta::indices(j));
            out.push(Check::new("identities", name, lhs == rhs, format!("lhs={lhs} rhs={rhs}")));
        }
    }
    let alpha = constant::alpha()?;
    out.push(Check::new("identities", "alpha", alpha.to_string() == "1/8640", format!("alpha={alpha}")));
    let simplex = constant::polytope::standard_simplex(5).volume()?;
    out.push(Check::new("identities", "simplex volume", simplex.to_string() == "1/120", format!("volume={simplex}")));
    for (tag, b) in [(FieldTag::Q, 100), (FieldTag::QI, 10), (FieldTag::QSqrt2, 10)] {
        out.push(height_lift_check(tag, b, cfg.precision_bits)?);
    }
    Ok(out)
}

/// `H(Ψ(T)) ≤ B'` computed on the surface (certified intervals capped at
/// `bits`, exact fallback) agrees with the lifted condition on the torsor for
/// every enumerated `T` at bound `B` and `B' ∈ {B, B/2}`.
fn height_lift_check(tag: FieldTag, b: i128, bits: u32) -> Result<Check, CliError> {
    let field = make_field(tag);
    let bound = Rational::from_integer(b);
    let opts = EnumOptions { collect_points: true, full_m: false, ..Default::default() };
    let points = enumerate_m_with(&field, &bound, &opts)?.points.unwrap_or_default();
    let mut disagreements = 0usize;
    let mut fallbacks = 0usize;
    for t in &points {
        let p = psi(&field, t)?;
        for bb in [bound, bound / 2] {
            let h = height_with_precision(&field, &p, &bb, bits)?;
            fallbacks += usize::from(h.exact_fallback);
            if h.within() != height_condition(&field, t, &bb) {
                disagreements += 1;
            }
        }
    }
    Ok(Check::new(
        "identities",
        format!("height lift {} B={b}", tag.short_name()),
        disagreements == 0,
        format!("points={} disagreements={disagreements} exact_fallbacks={fallbacks}", points.len()),
    ))
}

/// `|S(F_p)| + 4p = p² + 6p + 1` for the first six primes.
pub fn suite_fp() -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        let n = count_fp(p)?;
        let expected = p * p + 6 * p + 1;
        out.push(Check::new(
            "fp",
            format!("p={p}"),
            n + 4 * p == expected,
            format!("count={n} count+4p={} p^2+6p+1={expected}", n + 4 * p),
        ));
    }
    Ok(out)
}

/// Relative tolerance and z-score ceiling of the volume suite.
pub const VOLUME_REL_TOL: f64 = 0.02;
pub const VOLUME_Z_MAX: f64 = 3.0;

/// The height-region volume over ℚ for `𝐚′ ∈ {(1,1,1,1,1), (1,2,1,1,1)}` and
/// `B ∈ {1, 8}`.
pub fn suite_volume(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let field = make_field(FieldTag::Q);
    let mut out = Vec::new();
    for a in [[1, 1, 1, 1, 1], [1, 2, 1, 1, 1]] {
        for b in [1.0, 8.0] {
            let r = volume_sf_check(&field, &a.map(AlgInt::int), b, cfg.samples, cfg.seed)?;
            out.push(Check::new(
                "volume",
                format!("a'={a:?} B={b}"),
                r.passes(VOLUME_REL_TOL, VOLUME_Z_MAX),
                format!("estimate={} stderr={} predicted={} rel_dev={:.3e} z={:.3}", r.estimate, r.stderr, r.predicted, r.rel_dev, r.z),
            ));
        }
    }
    Ok(out)
}

/// Relative tolerance and combined-σ ceiling of the density suite.
pub const DENSITY_REL_TOL: f64 = 1e-2;
pub const DENSITY_SIGMAS: f64 = 4.0;

/// Quadrature versus Monte Carlo for every archimedean place of every
/// supported field.
pub fn suite_densities(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let mc_cfg = DensityConfig { samples: cfg.samples, seed: cfg.seed, rel_err: 1.0, ..Default::default() };
    let quad_cfg = DensityConfig::default();
    let mut cache: Vec<(PlaceKind, density::Density, density::Density)> = Vec::new();
    let mut out = Vec::new();
    for tag in FieldTag::ALL {
        let field = make_field(tag);
        for place in field.places() {
            if !cache.iter().any(|c| c.0 == place.kind) {
                let q = constant::omega_arch(&field, place.index, DensityMethod::Adelic2dQuad, &quad_cfg)?;
                let m = constant::omega_arch(&field, place.index, DensityMethod::Region3dMc, &mc_cfg)?;
                cache.push((place.kind, q, m));
            }
            let (_, q, m) = cache.iter().find(|c| c.0 == place.kind).expect("cached");
            let diff = (q.value - m.value).abs();
            let sigma = q.err.hypot(m.err);
            let passed = diff <= DENSITY_SIGMAS * sigma && diff <= DENSITY_REL_TOL * q.value;
            out.push(Check::new(
                "densities",
                format!("{} place {} ({:?})", tag.short_name(), place.index, place.kind),
                passed,
                format!("adelic2d={}±{:.2e} region3d={}±{:.2e} diff/sigma={:.3}", q.value, q.err, m.value, m.err, diff / sigma),
            ));
        }
    }
    Ok(out)
}

/// `verify`: machine-readable pass/fail per check; failure exits with 1.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut checks = Vec::new();
    let all = cfg.suite == Suite::All;
    if all || cfg.suite == Suite::Identities {
        checks.extend(suite_identities(cfg)?);
    }
    if all || cfg.suite == Suite::Fp {
        checks.extend(suite_fp()?);
    }
    if all || cfg.suite == Suite::Volume {
        checks.extend(suite_volume(cfg)?);
    }
    if all || cfg.suite == Suite::Densities {
        checks.extend(suite_densities(cfg)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    let text = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| vec![c.suite.to_string(), c.name.clone(), c.passed.to_string(), c.detail.clone()])
                .collect();
            csv_text(&["suite", "check", "passed", "detail"], &rows)
        }
        Format::Json => {
            let items: Vec<Value> = checks
                .iter()
                .map(|c| json!({"suite": c.suite, "check": c.name, "passed": c.passed, "detail": c.detail}))
                .collect();
            json_text(&json!({ "passed": passed, "checks": items }))
        }
    };
    Ok(Output { text, status: if passed { Status::Ok } else { Status::Failure } })
}

/// `constant`: the assembled leading constant.
pub fn cmd_constant(cfg: &RunConfig) -> Result<Output, CliError> {
    let field = make_field(cfg.field);
    let bundle = assemble_c(&field, cfg.primes_up_to, &DensityConfig::default())?;
    let text = match cfg.format {
        Format::Json => json_text(&serde_json::to_value(&bundle).expect("serializable")),
        Format::Csv => {
            let mut rows = vec![
                vec!["field".to_string(), bundle.field.clone()],
                vec!["alpha".into(), bundle.alpha.clone()],
                vec!["beta".into(), bundle.beta.to_string()],
                vec!["prefactor".into(), bundle.prefactor.to_string()],
                vec!["euler.P".into(), bundle.euler.truncation.to_string()],
                vec!["euler.value".into(), bundle.euler.value.to_string()],
                vec!["euler.tail_lo".into(), bundle.euler.tail_lo.to_string()],
                vec!["euler.tail_hi".into(), bundle.euler.tail_hi.to_string()],
            ];
            for o in &bundle.omega {
                rows.push(vec![format!("omega.{}.value", o.place), o.value.to_string()]);
                rows.push(vec![format!("omega.{}.err", o.place), o.err.to_string()]);
            }
            rows.push(vec!["c.lo".into(), bundle.c.lo.to_string()]);
            rows.push(vec!["c.hi".into(), bundle.c.hi.to_string()]);
            csv_text(&["key", "value"], &rows)
        }
    };
    Ok(Output { text, status: Status::Ok })
}
