//! Command-line front end: argument parsing, dispatch to the verification
//! suites, and report output.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cover::{cover_algebra_audit, re_log_phi_lower_bound, sample_lifted_batch, sheet_period_check, BaseDomain};
use crate::error::{Error, Result};
use crate::group::{Iwasawa, Triple};
use crate::heisenberg::{bounding_audit, constant_audit, derive_c, embedding_audit, invariance_audit, membership_audit};
use crate::report::{ReportBundle, VerificationReport};
use crate::sampling::{with_workers, IwasawaRange};
use crate::verify::{
    check_lemma, check_lemma_claim, freeness_audit, levi_form_check, levi_radius_scaling, phi_square_zero_report,
    properness_probe, totally_real_audit, verify_winding, ClaimConfig, LemmaConfig, LeviConfig, TubeSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// |psi(gh)| > eps for real g and h near the identity
    VerifyLemma,
    /// the inequality between |Re g| and |Im g| on small |psi|
    VerifyClaim,
    /// winding numbers of the candidate characters
    VerifyWinding,
    /// rank of orbit tangent frames
    VerifyTotallyReal,
    /// fixed-point system at random triples
    VerifyFree,
    /// sampled escape along one-parameter rays (heuristic)
    ProbeProper,
    /// Levi form on the boundary of an orbit tube
    VerifyLevi,
    /// deck shifts, sheet periods and the Re log phi bound
    CoverDemo,
    /// a zero of (a + ic)^2 near the identity, against phi
    FindPhi2Zero,
    /// membership, constant, bounding and embedding audits
    Heisenberg,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyLemma => "verify-lemma",
            Command::VerifyClaim => "verify-claim",
            Command::VerifyWinding => "verify-winding",
            Command::VerifyTotallyReal => "verify-totally-real",
            Command::VerifyFree => "verify-free",
            Command::ProbeProper => "probe-proper",
            Command::VerifyLevi => "verify-levi",
            Command::CoverDemo => "cover-demo",
            Command::FindPhi2Zero => "find-phi2-zero",
            Command::Heisenberg => "heisenberg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "holoaut", version, about = "Numerical certification toolkit for group actions on complex domains")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// sample count; each command has its own default
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long = "iwasawa-T", global = true)]
    pub iwasawa_t: Option<f64>,
    #[arg(long = "iwasawa-N", global = true)]
    pub iwasawa_n: Option<f64>,
    #[arg(long, global = true)]
    pub tube_radius: Option<f64>,
    /// sheet count for cover-demo; both 2 and 3 when omitted
    #[arg(long, global = true)]
    pub k: Option<u32>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// worker threads; results do not depend on it
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            seed: 0,
            trials: None,
            eps: None,
            delta: None,
            iwasawa_t: None,
            iwasawa_n: None,
            tube_radius: None,
            k: None,
            out: None,
            format: Format::Json,
            workers: None,
        }
    }

    /// Parses arguments without the program name.
    pub fn from_args<I, S>(args: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        let argv = std::iter::once(std::ffi::OsString::from("holoaut")).chain(args.into_iter().map(Into::into));
        RunConfig::try_parse_from(argv).map_err(|e| Error::Config(e.to_string()))
    }

    fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    fn range_or(&self, default: IwasawaRange) -> IwasawaRange {
        IwasawaRange::new(self.iwasawa_t.unwrap_or(default.t), self.iwasawa_n.unwrap_or(default.n))
    }

    fn validate(&self) -> Result<()> {
        if self.trials == Some(0) {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        for (name, v) in [("iwasawa-T", self.iwasawa_t), ("iwasawa-N", self.iwasawa_n)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("{name} must be a finite non-negative number")));
                }
            }
        }
        if let Some(r) = self.tube_radius {
            TubeSpec::new(Triple::default_base(), r).map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(k) = self.k {
            if k < 2 {
                return Err(Error::Config("k must be at least 2".into()));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Configuration echo; the worker count and output target are left out
    /// since they do not affect results.
    fn echo(&self) -> serde_json::Value {
        json!({
            "command": self.command.name(),
            "seed": self.seed,
            "trials": self.trials,
            "eps": self.eps,
            "delta": self.delta,
            "iwasawa_t": self.iwasawa_t,
            "iwasawa_n": self.iwasawa_n,
            "tube_radius": self.tube_radius,
            "k": self.k,
        })
    }
}

fn lemma_config(cfg: &RunConfig, default_delta: f64, default_trials: usize) -> LemmaConfig {
    let base = LemmaConfig::default();
    LemmaConfig {
        eps: cfg.eps.unwrap_or(base.eps),
        delta: cfg.delta.unwrap_or(default_delta),
        trials: cfg.trials_or(default_trials),
        range: cfg.range_or(base.range),
        seed: cfg.seed,
        record_series: cfg.format == Format::Csv,
    }
}

/// Radii for the Levi scaling series.
const SCALING_RADII: [f64; 3] = [0.1, 0.05, 0.025];

fn levi_scaling_report(seed: u64) -> Result<VerificationReport> {
    let zeta = Triple::default_base();
    let rows = levi_radius_scaling(&zeta, &Iwasawa::ORIGIN, [1.0, 0.0, 0.0], &SCALING_RADII)?;
    let mut report = VerificationReport::new("levi-radius-scaling", seed);
    report.heuristic = true;
    report.samples = rows.len() as u64;
    let mut worst = f64::INFINITY;
    for (k, w) in rows.windows(2).enumerate() {
        let ratio = w[1].2 / w[0].2;
        report.set_detail(&format!("ratio_{k}"), ratio);
        worst = worst.min(0.5 - (ratio - 2.0).abs());
        if (ratio - 2.0).abs() > 0.5 {
            report.fail(vec![w[0].0, w[1].0, ratio]);
        }
    }
    for (r, raw, normalized) in &rows {
        report.series.push(*r);
        report.series.push(*raw);
        report.series.push(*normalized);
    }
    report.worst_margin = worst;
    Ok(report)
}

fn dispatch(cfg: &RunConfig) -> Result<Vec<VerificationReport>> {
    let seed = cfg.seed;
    let reports = match cfg.command {
        Command::VerifyLemma => vec![check_lemma(&lemma_config(cfg, LemmaConfig::default().delta, 100_000))?],
        Command::VerifyClaim => {
            let base = ClaimConfig::default();
            vec![check_lemma_claim(&ClaimConfig {
                eps: cfg.eps.unwrap_or(base.eps),
                trials: cfg.trials_or(base.trials),
                seed,
                record_series: cfg.format == Format::Csv,
            })?]
        }
        Command::VerifyWinding => vec![verify_winding(cfg.trials_or(3) as i64, seed)?],
        Command::VerifyTotallyReal => vec![totally_real_audit(cfg.trials_or(1000), seed)],
        Command::VerifyFree => vec![freeness_audit(cfg.trials_or(100), seed)?],
        Command::ProbeProper => vec![properness_probe(&Triple::default_base(), cfg.trials_or(50), seed)?],
        Command::VerifyLevi => {
            let spec = TubeSpec::new(Triple::default_base(), cfg.tube_radius.unwrap_or(0.05))?;
            let levi = levi_form_check(
                &spec,
                &LeviConfig {
                    samples: cfg.trials_or(200),
                    seed,
                    range: cfg.range_or(LeviConfig::default().range),
                    record_series: cfg.format == Format::Csv,
                    ..Default::default()
                },
            )?;
            vec![levi, levi_scaling_report(seed)?]
        }
        Command::CoverDemo => {
            let domain = match cfg.tube_radius {
                Some(r) => BaseDomain::new(Triple::default_base(), r)?,
                None => BaseDomain::default(),
            };
            let mut out = vec![cover_algebra_audit(cfg.trials_or(1000), seed, &domain)?];
            let ks: Vec<u32> = cfg.k.map(|k| vec![k]).unwrap_or_else(|| vec![2, 3]);
            for k in ks {
                out.push(sheet_period_check(k, seed, &domain)?);
            }
            let eps = cfg.eps.unwrap_or(1.0 / 36.0);
            let lifted = sample_lifted_batch(cfg.trials_or(10_000), seed, &domain, &cfg.range_or(IwasawaRange::default()))?;
            out.push(re_log_phi_lower_bound(&lifted, eps, seed));
            out
        }
        Command::FindPhi2Zero => {
            let delta = cfg.delta.unwrap_or(0.1);
            if !(delta > 0.0) {
                return Err(Error::Config("delta must be positive".into()));
            }
            let zero = phi_square_zero_report(delta, seed);
            let mut contrast = check_lemma(&lemma_config(cfg, delta, 100_000))?;
            contrast.name = "phi-near-identity".into();
            let bound = contrast.details["phi_bound"];
            let min_phi = contrast.details["min_abs_phi"];
            if !(min_phi > bound) && contrast.pass {
                contrast.fail_plain();
            }
            vec![zero, contrast]
        }
        Command::Heisenberg => {
            let c = derive_c();
            vec![
                membership_audit(cfg.trials_or(10_000), seed),
                invariance_audit(cfg.trials_or(10_000), seed),
                constant_audit(cfg.trials_or(1_000_000), seed, &c),
                bounding_audit(cfg.trials_or(100_000), seed, &c),
                embedding_audit(cfg.trials_or(100_000), seed, &c),
            ]
        }
    };
    Ok(reports)
}

/// Validates and runs the configured command.
pub fn run(cfg: &RunConfig) -> Result<ReportBundle> {
    cfg.validate()?;
    let reports = match cfg.workers {
        Some(n) => with_workers(n, || dispatch(cfg))?,
        None => dispatch(cfg)?,
    };
    Ok(ReportBundle::new(cfg.echo(), reports))
}

/// Writes the bundle in the configured format to the configured target.
pub fn write_bundle(cfg: &RunConfig, bundle: &ReportBundle) -> std::io::Result<()> {
    let mut buf = Vec::new();
    match cfg.format {
        Format::Json => buf.extend(bundle.to_json().into_bytes()),
        Format::Csv => bundle.write_csv(&mut buf).map_err(std::io::Error::other)?,
    }
    match &cfg.out {
        Some(path) => std::fs::write(path, buf),
        None => std::io::stdout().lock().write_all(&buf),
    }
}

/// Exit status for a run: 0 on overall pass, 1 on a failed or aborted
/// verification, 2 on configuration errors.
pub fn exit_code(result: &Result<ReportBundle>) -> i32 {
    match result {
        Ok(b) if b.overall_pass => 0,
        Ok(_) => 1,
        Err(Error::Config(_)) => 2,
        Err(_) => 1,
    }
}

/// Entry point shared by the binary: parse, run, write, and return the
/// process exit status.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cfg = match RunConfig::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = run(&cfg);
    match &result {
        Ok(bundle) => {
            if let Err(e) = write_bundle(&cfg, bundle) {
                eprintln!("error: cannot write report: {e}");
                return 1;
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    exit_code(&result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        let cfg = RunConfig::from_args(["verify-lemma", "--trials", "1000", "--seed", "7", "--iwasawa-T", "3"]).unwrap();
        assert_eq!(cfg.command, Command::VerifyLemma);
        assert_eq!((cfg.trials, cfg.seed, cfg.iwasawa_t), (Some(1000), 7, Some(3.0)));
        assert!(RunConfig::from_args(["verify-lemma", "--format", "xml"]).is_err());
    }

    #[test]
    fn lemma_run_passes_with_margin() {
        let cfg = RunConfig::from_args(["verify-lemma", "--trials", "1000", "--seed", "7"]).unwrap();
        let b = run(&cfg).unwrap();
        assert!(b.overall_pass);
        assert!(b.reports[0].details.contains_key("min_abs_psi"));
        assert!(b.reports[0].worst_margin > 0.0);
        assert_eq!(exit_code(&Ok(b)), 0);
    }

    #[test]
    fn wide_delta_is_a_config_error() {
        let cfg = RunConfig::from_args(["verify-lemma", "--delta", "0.4"]).unwrap();
        let r = run(&cfg);
        assert!(matches!(r, Err(Error::Config(_))));
        assert_eq!(exit_code(&r), 2);
        assert_eq!(main_with_args(["holoaut", "verify-lemma", "--delta", "0.4"]), 2);
        assert_eq!(main_with_args(["holoaut", "no-such-command"]), 2);
    }

    #[test]
    fn winding_default_passes() {
        let b = run(&RunConfig::new(Command::VerifyWinding)).unwrap();
        assert!(b.overall_pass);
        let d = &b.reports[0].details;
        assert_eq!((d["psi_sl"], d["phi_psl"], d["square_sl"]), (1.0, 1.0, 2.0));
    }

    #[test]
    fn bundle_is_reproducible_across_workers() {
        let mut cfg = RunConfig::from_args(["verify-claim", "--trials", "5000", "--seed", "3"]).unwrap();
        cfg.workers = Some(1);
        let a = run(&cfg).unwrap().without_timing();
        cfg.workers = Some(4);
        let b = run(&cfg).unwrap().without_timing();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn bad_radius_and_trials_rejected() {
        for args in [["verify-levi", "--tube-radius", "0.9"], ["verify-free", "--trials", "0"]] {
            assert!(matches!(run(&RunConfig::from_args(args).unwrap()), Err(Error::Config(_))));
        }
    }

    #[test]
    fn csv_output_has_series() {
        let mut cfg = RunConfig::from_args(["verify-lemma", "--trials", "10", "--format", "csv"]).unwrap();
        let dir = std::env::temp_dir().join(format!("holoaut-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        cfg.out = Some(path.clone());
        let b = run(&cfg).unwrap();
        write_bundle(&cfg, &b).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("report,kind,index,value"));
        assert_eq!(text.lines().filter(|l| l.contains(",sample,")).count(), 10);
    }
}
