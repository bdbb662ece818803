//! Command implementations behind the `birkhoff` binary.
//!
//! Every command returns an exit code: `0` success, `1` usage or input error,
//! `2` a verification check failed, `3` the Perron iteration hit its cap.

use std::fs;
use std::path::{Path, PathBuf};

use birkhoff_core::rng::derive_seed;
use birkhoff_core::{
    contraction, hilbert, metric_equivalence_ratios, perron_power_iteration,
    random_positive_matrix, random_simplex_vector, sample_complex_contraction_ratio,
    sample_contraction_ratio, spectral_report, verify_theorem1, BoundReport, ContractionReport,
    PositiveMatrix, SimplexVector,
};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const TOOL: &str = "birkhoff";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_MAX_ITER: i32 = 3;

/// Centers used by `complex-probe` for the Euclidean/Hilbert bracket.
const PROBE_CENTERS: usize = 20;
const HISTOGRAM_BINS: usize = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] birkhoff_core::Error),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Verify,
    Certify,
    ComplexProbe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Verify => "verify",
            Command::Certify => "certify",
            Command::ComplexProbe => "complex-probe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Full configuration of one run; embedded verbatim in every output document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub lo: f64,
    pub hi: f64,
    pub eps_list: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input_path: None,
            output_path: None,
            n: 4,
            count: 1000,
            seed: 0,
            lo: 0.1,
            hi: 10.0,
            eps_list: vec![1e-2, 1e-3, 1e-4],
            tol: 1e-12,
            max_iter: 10_000,
            format: Format::Json,
        }
    }

    fn input(&self) -> Result<&Path> {
        self.input_path
            .as_deref()
            .ok_or_else(|| CliError::Usage(format!("{} requires --input", self.command.name())))
    }
}

/// Runs the configured command, mapping errors to exit code 1 after printing
/// them to standard error.
pub fn run(config: &RunConfig) -> i32 {
    let result = match config.command {
        Command::Analyze => cmd_analyze(config),
        Command::Verify => cmd_verify(config),
        Command::Certify => cmd_certify(config),
        Command::ComplexProbe => cmd_complex_probe(config),
    };
    result.unwrap_or_else(|e| {
        eprintln!("{TOOL}: {e}");
        EXIT_ERROR
    })
}

/// Reads a headerless CSV matrix. Blank lines are ignored.
pub fn parse_matrix_file(path: &Path) -> Result<PositiveMatrix> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    parse_matrix_str(&text, path)
}

fn parse_matrix_str(text: &str, path: &Path) -> Result<PositiveMatrix> {
    let parse_err = |line: usize, column: usize, message: String| CliError::Parse {
        path: path.into(),
        line,
        column,
        message,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(col, field)| {
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(ln + 1, col + 1, format!("{:?}: {e}", field.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_err(
                    ln + 1,
                    row.len().min(first.len()) + 1,
                    format!("row has {} fields, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(1, 1, "empty matrix file".into()));
    }
    Ok(PositiveMatrix::from_rows(&rows)?)
}

/// SHA-256 of the canonical CSV serialization.
pub fn matrix_sha256(a: &PositiveMatrix) -> String {
    hex::encode(Sha256::digest(a.to_csv().as_bytes()))
}

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    seed: u64,
    input_sha256: Option<String>,
}

impl<'a> Header<'a> {
    fn new(config: &'a RunConfig, input_sha256: Option<String>) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command: config.command.name(),
            config,
            seed: config.seed,
            input_sha256,
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    #[serde(flatten)]
    header: Header<'a>,
    #[serde(flatten)]
    body: T,
}

fn emit(config: &RunConfig, text: &str) -> Result<()> {
    match &config.output_path {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(config: &RunConfig, header: Header<'_>, body: T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&Document { header, body })?;
    text.push('\n');
    emit(config, &text)
}

#[derive(Serialize)]
struct AnalyzeBody {
    matrix_sha256: String,
    n: usize,
    m: f64,
    #[serde(rename = "M")]
    big_m: f64,
    phi: f64,
    tau: f64,
    hopf: f64,
    ostrowski: f64,
    eigenvalues: Vec<[f64; 2]>,
    rho: f64,
    kappa: f64,
    theorem1_holds: bool,
    chain_holds: bool,
    slack_kappa_tau: f64,
}

pub fn cmd_analyze(config: &RunConfig) -> Result<i32> {
    let a = parse_matrix_file(config.input()?)?;
    let spectral = spectral_report(&a)?;
    let bounds = BoundReport::new(&a, spectral.kappa);
    let hash = matrix_sha256(&a);
    let body = AnalyzeBody {
        matrix_sha256: hash.clone(),
        n: a.n(),
        m: a.min_entry(),
        big_m: a.max_entry(),
        phi: bounds.phi,
        tau: bounds.tau,
        hopf: bounds.hopf,
        ostrowski: bounds.ostrowski,
        eigenvalues: spectral.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
        rho: spectral.rho,
        kappa: spectral.kappa,
        theorem1_holds: bounds.theorem1_holds,
        chain_holds: bounds.chain_holds,
        slack_kappa_tau: bounds.slack_kappa_tau,
    };
    emit_json(config, Header::new(config, Some(hash)), body)?;
    Ok(if bounds.theorem1_holds {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

#[derive(Serialize)]
struct Histogram {
    /// Bin edges over `[0, 1]`; slacks below zero land in the first bin.
    edges: Vec<f64>,
    counts: Vec<usize>,
}

#[derive(Serialize)]
struct VerifyBody {
    n: usize,
    lo: f64,
    hi: f64,
    count: usize,
    failures: usize,
    chain_failures: usize,
    min_slack: f64,
    max_slack: f64,
    mean_slack: f64,
    histogram: Histogram,
}

pub fn cmd_verify(config: &RunConfig) -> Result<i32> {
    if !(2..=birkhoff_core::spectral::MAX_DIM).contains(&config.n) {
        return Err(CliError::Usage(format!(
            "--n must be in [2, 64], got {}",
            config.n
        )));
    }
    if config.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    let reports = (0..config.count as u64)
        .map(|k| {
            let a = random_positive_matrix(
                config.n,
                config.lo,
                config.hi,
                derive_seed(config.seed, k),
            )?;
            Ok(verify_theorem1(&a)?)
        })
        .collect::<Result<Vec<BoundReport>>>()?;

    let slacks: Vec<f64> = reports.iter().map(|r| r.slack_kappa_tau).collect();
    let mut counts = vec![0usize; HISTOGRAM_BINS];
    for s in &slacks {
        let bin = ((s.max(0.0) * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
        counts[bin] += 1;
    }
    let failures = reports.iter().filter(|r| !r.theorem1_holds).count();
    let body = VerifyBody {
        n: config.n,
        lo: config.lo,
        hi: config.hi,
        count: config.count,
        failures,
        chain_failures: reports.iter().filter(|r| !r.chain_holds).count(),
        min_slack: slacks.iter().copied().fold(f64::INFINITY, f64::min),
        max_slack: slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean_slack: slacks.iter().sum::<f64>() / slacks.len() as f64,
        histogram: Histogram {
            edges: (0..=HISTOGRAM_BINS)
                .map(|i| i as f64 / HISTOGRAM_BINS as f64)
                .collect(),
            counts,
        },
    };
    emit_json(config, Header::new(config, None), body)?;
    Ok(if failures == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

#[derive(Serialize)]
struct CertifyBody {
    vector: Vec<f64>,
    rho_bracket: (f64, f64),
    rho_estimate: f64,
    iterations: usize,
    step_distance: f64,
    certified_radius: f64,
    tau_used: f64,
    converged: bool,
    oracle_rho: f64,
    oracle_distance: f64,
    certificate_holds: bool,
}

pub fn cmd_certify(config: &RunConfig) -> Result<i32> {
    if !(config.tol > 0.0 && config.tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            config.tol
        )));
    }
    if config.max_iter == 0 {
        return Err(CliError::Usage("--max-iter must be at least 1".into()));
    }
    let a = parse_matrix_file(config.input()?)?;
    let cert = perron_power_iteration(&a, config.tol, config.max_iter, None)?;
    let oracle = spectral_report(&a)?;
    let oracle_distance = hilbert::hilbert_distance(&cert.vector, &oracle.perron_vector)?;
    let certificate_holds =
        cert.certified_radius <= config.tol && oracle_distance <= cert.certified_radius + 1e-9;
    let body = CertifyBody {
        vector: cert.vector.coords().to_vec(),
        rho_bracket: cert.rho_bracket,
        rho_estimate: cert.rho_estimate,
        iterations: cert.iterations,
        step_distance: cert.step_distance,
        certified_radius: cert.certified_radius,
        tau_used: cert.tau_used,
        converged: cert.converged,
        oracle_rho: oracle.rho,
        oracle_distance,
        certificate_holds,
    };
    emit_json(config, Header::new(config, Some(matrix_sha256(&a))), body)?;
    Ok(match (cert.converged, certificate_holds) {
        (false, _) => EXIT_MAX_ITER,
        (true, true) => EXIT_OK,
        (true, false) => EXIT_VERIFY_FAILED,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub eps: f64,
    pub max_ratio: f64,
    pub excess_over_tau: f64,
    pub de_dh_min: f64,
    pub de_dh_max: f64,
}

#[derive(Serialize)]
struct ProbeBody<'a> {
    tau: f64,
    contraction: ContractionReport,
    /// Least-squares slope of `excess_over_tau` against `eps`.
    excess_slope: Option<f64>,
    trend_holds: bool,
    rows: &'a [ProbeRow],
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn cmd_complex_probe(config: &RunConfig) -> Result<i32> {
    if config.eps_list.is_empty() {
        return Err(CliError::Usage("--eps needs at least one value".into()));
    }
    if let Some(bad) = config
        .eps_list
        .iter()
        .find(|e| !(**e > 0.0 && **e <= contraction::MAX_COMPLEX_EPS))
    {
        return Err(CliError::Usage(format!(
            "--eps values must lie in (0, 0.01], got {bad}"
        )));
    }
    if config.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    let a = parse_matrix_file(config.input()?)?;
    let tau = contraction::tau(&a);
    let centers = (0..PROBE_CENTERS as u64)
        .map(|k| random_simplex_vector(a.n(), derive_seed(config.seed, k)))
        .collect::<std::result::Result<Vec<SimplexVector>, _>>()?;
    let rows = config
        .eps_list
        .iter()
        .map(|&eps| {
            let max_ratio = sample_complex_contraction_ratio(&a, eps, config.count, config.seed)?;
            let (de_dh_min, de_dh_max) =
                metric_equivalence_ratios(&centers, eps, config.count, config.seed)?;
            Ok(ProbeRow {
                eps,
                max_ratio,
                excess_over_tau: max_ratio - tau,
                de_dh_min,
                de_dh_max,
            })
        })
        .collect::<Result<Vec<ProbeRow>>>()?;

    let smallest = rows
        .iter()
        .min_by(|x, y| x.eps.total_cmp(&y.eps))
        .expect("nonempty");
    let largest = rows
        .iter()
        .max_by(|x, y| x.eps.total_cmp(&y.eps))
        .expect("nonempty");
    let trend_holds = smallest.excess_over_tau <= largest.excess_over_tau + 1e-3;
    let pass = trend_holds && rows.iter().all(|r| r.max_ratio <= 1.0);
    let hash = matrix_sha256(&a);

    match config.format {
        Format::Json => {
            let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.excess_over_tau)).collect();
            let phi = contraction::phi(&a);
            let report = ContractionReport {
                tau,
                phi,
                hopf: contraction::hopf_bound(&a),
                ostrowski: contraction::ostrowski_bound(&a),
                sampled_real_max_ratio: sample_contraction_ratio(&a, config.count, config.seed)?
                    .max_ratio,
                sampled_complex_max_ratio_by_eps: rows
                    .iter()
                    .map(|r| (r.eps, r.max_ratio))
                    .collect(),
                sample_count: config.count,
                seed: config.seed,
            };
            let body = ProbeBody {
                tau,
                contraction: report,
                excess_slope: least_squares_slope(&points),
                trend_holds,
                rows: &rows,
            };
            emit_json(config, Header::new(config, Some(hash)), body)?;
        }
        Format::Csv => {
            let mut text = format!(
                "# {TOOL} {VERSION} {} seed={} input_sha256={hash}\n# config={}\n",
                config.command.name(),
                config.seed,
                serde_json::to_string(config)?
            );
            text.push_str("eps,max_ratio,excess_over_tau,de_dh_min,de_dh_max\n");
            for r in &rows {
                text.push_str(&format!(
                    "{:?},{:?},{:?},{:?},{:?}\n",
                    r.eps, r.max_ratio, r.excess_over_tau, r.de_dh_min, r.de_dh_max
                ));
            }
            emit(config, &text)?;
        }
    }
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let p = Path::new("m.csv");
        let a = parse_matrix_str("2,1\n1,2\n", p).unwrap();
        assert_eq!(a.to_rows(), vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(matches!(
            parse_matrix_str("2,1\n1\n", p),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_matrix_str("2,-1\n1,2\n", p),
            Err(CliError::Core(birkhoff_core::Error::NonPositiveEntry {
                row: 0,
                col: 1,
                ..
            }))
        ));
        assert!(matches!(
            parse_matrix_str("2,x\n1,2\n", p),
            Err(CliError::Parse {
                line: 1,
                column: 2,
                ..
            })
        ));
        assert!(matches!(
            parse_matrix_str("\n", p),
            Err(CliError::Parse { .. })
        ));
    }

    #[test]
    fn hash_is_canonical() {
        let p = Path::new("m.csv");
        let a = parse_matrix_str("2, 1\n1,2.0\n\n", p).unwrap();
        let b = parse_matrix_str("2.0,1.0\n1.0,2.0\n", p).unwrap();
        assert_eq!(matrix_sha256(&a), matrix_sha256(&b));
        assert_eq!(matrix_sha256(&a).len(), 64);
    }

    #[test]
    fn slope_fit() {
        assert_eq!(least_squares_slope(&[(0.0, 1.0), (1.0, 3.0)]), Some(2.0));
        assert_eq!(least_squares_slope(&[(1.0, 1.0)]), None);
    }
}
