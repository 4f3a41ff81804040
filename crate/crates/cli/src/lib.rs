//! Job specs, dispatch and report writing for the `modent` binary.

use clap::ValueEnum;
use modular_entropy::acceptance::{run_acceptance, Criterion, DEFAULT_SEED};
use modular_entropy::fock::araki_relative_entropy_oracle;
use modular_entropy::geometry::{
    achronality_check, causal_convexity_check, half_invariance_check,
    kruskal_half_invariance_check, strip_equivalence_check, wedge_hull_check, CheckReport,
    KillingFlowChart, KruskalRegion, MinkowskiPoint, Profile, Region, SamplingBox,
};
use modular_entropy::linalg::C64;
use modular_entropy::one_particle::{build_one_particle, SymplecticDataSpec};
use modular_entropy::schrodinger_ray::{convexity_check, entropy_profile, PacketSpec};
use modular_entropy::standard_subspace::{
    entropy_parts, factorial_decomposition, is_standard, modular_data, RealSubspace,
    SubspaceDescriptor,
};
use nalgebra::{Complex, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("schema error in {path}: {message}")]
    Schema { path: String, message: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid option: {0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Module {
        context: String,
        #[source]
        source: modular_entropy::error::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn module<T>(context: &str, r: modular_entropy::error::Result<T>) -> Result<T> {
    r.map_err(|source| CliError::Module {
        context: context.to_string(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    EntropyProfile,
    Modular,
    OneParticle,
    FockVerify,
    GeometrySweep,
    Acceptance,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EntropyProfile => "entropy-profile",
            Command::Modular => "modular",
            Command::OneParticle => "one-particle",
            Command::FockVerify => "fock-verify",
            Command::GeometrySweep => "geometry-sweep",
            Command::Acceptance => "acceptance",
        }
    }

    fn needs_input(self) -> bool {
        matches!(
            self,
            Command::EntropyProfile | Command::Modular | Command::OneParticle | Command::GeometrySweep
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub tol: Option<f64>,
    /// `start:stop:count` or a comma-separated list.
    pub grid: Option<String>,
    pub cutoff: Option<usize>,
    pub samples: Option<usize>,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            input: None,
            output: None,
            seed: DEFAULT_SEED,
            tol: None,
            grid: None,
            cutoff: None,
            samples: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        if self.command.needs_input() && self.input.is_none() {
            return Err(CliError::Usage(format!("{} needs --input", self.command.name())));
        }
        if self.samples == Some(0) {
            return Err(CliError::Usage("--samples must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    /// Distance to the threshold, positive when passing.
    pub margin: f64,
}

impl Verdict {
    fn at_most(name: &str, value: f64, tol: f64) -> Self {
        let margin = if value.is_finite() { tol - value } else { -1.0 };
        Verdict {
            name: name.to_string(),
            passed: value <= tol,
            margin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: JobSpec,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    /// Set for `entropy-profile`; written instead of JSON when the output ends in `.csv`.
    #[serde(skip)]
    pub csv: Option<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Usage(format!("cannot parse grid `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n < 2 {
            return Err(bad());
        }
        return Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn complex_vector(v: &[[f64; 2]]) -> DVector<C64> {
    DVector::from_iterator(v.len(), v.iter().map(|p| Complex::new(p[0], p[1])))
}

fn entropy_profile_job(spec: &JobSpec) -> Result<Report> {
    let path = spec.input.as_deref().expect("validated");
    let packet: PacketSpec = read_json(path)?;
    let phi = module("packet", packet.build())?;
    let grid = match &spec.grid {
        Some(g) => parse_grid(g)?,
        None => {
            let (a, b) = phi.support().unwrap_or((0.0, 1.0));
            parse_grid(&format!("{}:{}:201", a - 0.5, b + 0.5))?
        }
    };
    let tol = spec.tol.unwrap_or(1e-8);
    let profile = module("entropy profile", entropy_profile(&phi, &grid))?;
    let violations = convexity_check(&profile, tol);
    let worst = profile
        .convexity_margin
        .iter()
        .flatten()
        .fold(f64::INFINITY, |m, x| m.min(*x));
    let monotone = profile.s.windows(2).map(|w| w[1] - w[0]).fold(0.0_f64, f64::max);
    let min_s = profile.s.iter().fold(f64::INFINITY, |m, x| m.min(*x));
    Ok(Report {
        command: spec.command.name().into(),
        config: spec.clone(),
        results: json!({ "profile": profile, "convexity_violations": violations }),
        verdicts: vec![
            Verdict::at_most("convexity", if worst.is_finite() { -worst } else { 0.0 }, tol),
            Verdict::at_most("non-increasing", monotone, 1e-12),
            Verdict::at_most("non-negative", (-min_s).max(0.0), 1e-10),
        ],
        csv: Some(profile.to_csv()),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModularInput {
    subspace: SubspaceDescriptor,
    #[serde(default)]
    phi: Option<Vec<[f64; 2]>>,
}

fn modular_job(spec: &JobSpec) -> Result<Report> {
    let input: ModularInput = read_json(spec.input.as_deref().expect("validated"))?;
    let h: RealSubspace = module("subspace", input.subspace.to_subspace())?;
    let tol = spec.tol.unwrap_or(1e-10);
    let standard = is_standard(&h);
    let mut results = json!({ "real_dim": h.real_dim(), "standardness": standard });
    let mut verdicts = Vec::new();
    if standard.is_standard() {
        let md = module("modular data", modular_data(&h))?;
        let dec = module("factorial decomposition", factorial_decomposition(&h))?;
        results["delta_eigenvalues"] = json!(md.delta_eigenvalues.as_slice());
        results["abelian_dim"] = json!(dec.abelian.real_dim());
        results["factorial_dim"] = json!(dec.factorial.real_dim());
        let fixed = h
            .complex_basis()
            .iter()
            .map(|v| (md.s.apply(v) - v).norm())
            .fold(0.0_f64, f64::max);
        verdicts.push(Verdict::at_most("J^2 = 1", md.involution_residual(), tol));
        verdicts.push(Verdict::at_most("J D J = D^-1", md.inversion_residual(), tol));
        verdicts.push(Verdict::at_most("S = J D^1/2", md.polar_residual(), tol));
        verdicts.push(Verdict::at_most("S h = h", fixed, tol));
    }
    if let Some(phi) = &input.phi {
        let parts = module("entropy", entropy_parts(&h, &complex_vector(phi)))?;
        results["entropy"] = json!({ "abelian": parts.abelian, "factorial": parts.factorial, "total": parts.total() });
        verdicts.push(Verdict::at_most("entropy >= 0", (-parts.total()).max(0.0), tol));
    }
    Ok(Report {
        command: spec.command.name().into(),
        config: spec.clone(),
        results,
        verdicts,
        csv: None,
    })
}

fn one_particle_job(spec: &JobSpec) -> Result<Report> {
    let input: SymplecticDataSpec = read_json(spec.input.as_deref().expect("validated"))?;
    let data = module("symplectic data", input.to_data())?;
    let s = module("one-particle structure", build_one_particle(&data))?;
    let (re, im) = s.gram_residuals(&data);
    let tol = spec.tol.unwrap_or(1e-10);
    let scale = data.mu.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
    Ok(Report {
        command: spec.command.name().into(),
        config: spec.clone(),
        results: json!({
            "rank": s.rank(),
            "dropped": s.dropped,
            "kernel_eigenvalues": s.kernel_eigenvalues.as_slice(),
            "domination_margin": data.domination_margin(),
            "warnings": s.warnings,
        }),
        verdicts: vec![
            Verdict::at_most("Re Gram = mu", re / scale, tol),
            Verdict::at_most("Im Gram = sigma", im / scale, tol),
        ],
        csv: None,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FockInput {
    theta: f64,
    phi: Vec<[f64; 2]>,
}

fn fock_job(spec: &JobSpec) -> Result<Report> {
    let input = match spec.input.as_deref() {
        Some(p) => read_json(p)?,
        None => FockInput {
            theta: 1.0,
            phi: vec![[0.3, 0.1], [-0.2, 0.4]],
        },
    };
    let cutoff = spec.cutoff.unwrap_or(60);
    let tol = spec.tol.unwrap_or(1e-3);
    let h = RealSubspace::thermal(input.theta);
    let phi = complex_vector(&input.phi);
    let oracle = module("oracle", araki_relative_entropy_oracle(&h, &phi, cutoff))?;
    let direct = module("entropy", modular_entropy::standard_subspace::entropy(&h, &phi))?;
    let dev = (oracle.entropy - direct).abs() / direct.max(1e-6);
    Ok(Report {
        command: spec.command.name().into(),
        config: spec.clone(),
        results: json!({ "oracle": oracle, "first_quantized": direct, "relative_deviation": dev }),
        verdicts: vec![Verdict::at_most("oracle vs first-quantized", dev, tol)],
        csv: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SweepCheck {
    HalfInvariance,
    StripEquivalence,
    CausalConvexity,
    WedgeHull,
    Achronality,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", tag = "chart")]
enum SweepRegion {
    MinkowskiBoost { region: Region },
    KruskalTime { region: KruskalRegion, #[serde(default = "one")] mass: f64 },
}

fn one() -> f64 {
    1.0
}

fn default_half_width() -> f64 {
    2.0
}

#[derive(Debug, Deserialize)]
struct SweepInput {
    #[serde(flatten)]
    target: SweepRegion,
    #[serde(default = "default_check")]
    check: SweepCheck,
    #[serde(default)]
    s_grid: Option<Vec<f64>>,
    #[serde(default = "default_half_width")]
    half_width: f64,
    /// For negative controls: the check passes when violations are found.
    #[serde(default)]
    expect_violations: bool,
    #[serde(default)]
    same_y: bool,
    #[serde(default)]
    orbit_point: Option<[f64; 4]>,
}

fn default_check() -> SweepCheck {
    SweepCheck::HalfInvariance
}

fn profile_and_lambda(region: &Region) -> Option<(Profile, f64)> {
    match *region {
        Region::TranslatedDeformedWedge { f, lambda } | Region::Strip { f, lambda } => Some((f, lambda)),
        Region::DeformedWedge { f } => Some((f, 0.0)),
        Region::Wedge => Some((Profile::Zero, 0.0)),
        Region::LightlikeTranslatedWedge { shift } => Some((Profile::Zero, shift)),
    }
}

fn sweep_job(spec: &JobSpec) -> Result<Report> {
    let path = spec.input.as_deref().expect("validated");
    let input: SweepInput = read_json(path)?;
    let n = spec.samples.unwrap_or(10_000);
    let grid = match (&spec.grid, &input.s_grid) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(g)) => g.clone(),
        (None, None) => vec![0.1, 1.0, 5.0],
    };
    let seed = spec.seed;
    let hw = input.half_width;
    let schema = |m: &str| CliError::Schema {
        path: path.display().to_string(),
        message: m.to_string(),
    };
    let report: CheckReport = match (&input.target, input.check) {
        (SweepRegion::KruskalTime { region, mass }, SweepCheck::HalfInvariance) => {
            module("sweep", kruskal_half_invariance_check(region, *mass, n, &grid, seed, hw))?
        }
        (SweepRegion::KruskalTime { .. }, _) => {
            return Err(schema("only half_invariance is available on the Kruskal chart"))
        }
        (SweepRegion::MinkowskiBoost { region }, check) => {
            let bx = SamplingBox::for_region(region, hw);
            let (f, lambda) = profile_and_lambda(region).expect("all regions covered");
            match check {
                SweepCheck::HalfInvariance => module(
                    "sweep",
                    half_invariance_check(region, &KillingFlowChart::MinkowskiBoost, n, &grid, seed, &bx),
                )?,
                SweepCheck::StripEquivalence => module("sweep", strip_equivalence_check(f, lambda, n, seed, &bx))?,
                SweepCheck::CausalConvexity => module("sweep", causal_convexity_check(region, n, seed, &bx))?,
                SweepCheck::WedgeHull => {
                    let p = MinkowskiPoint(input.orbit_point.unwrap_or([0.0, 1.0, 0.0, 0.0]));
                    let cube = SamplingBox::cube([0.0, hw, 0.0, 0.0], hw);
                    module("sweep", wedge_hull_check(&p, n, seed, &cube))?
                }
                SweepCheck::Achronality => {
                    module("sweep", achronality_check(f, lambda, n, seed, hw, input.same_y))?
                }
            }
        }
    };
    let verdict = if input.expect_violations {
        Verdict {
            name: "violations found".into(),
            passed: report.violations > 0,
            margin: report.violations as f64,
        }
    } else {
        Verdict {
            name: "zero violations".into(),
            passed: report.violations == 0,
            margin: 0.0 - report.violations as f64,
        }
    };
    Ok(Report {
        command: spec.command.name().into(),
        config: spec.clone(),
        results: json!(report),
        verdicts: vec![verdict],
        csv: None,
    })
}

fn criterion_verdicts(c: &Criterion) -> Vec<Verdict> {
    if let Some(e) = &c.error {
        return vec![Verdict {
            name: format!("{} {}: {e}", c.id, c.name),
            passed: false,
            margin: -1.0,
        }];
    }
    c.measurements
        .iter()
        .filter(|m| !m.tolerance.is_nan())
        .map(|m| Verdict {
            name: format!("{} {}: {}", c.id, c.name, m.name),
            passed: m.passed,
            margin: if m.lower_bound { m.value - m.tolerance } else { m.tolerance - m.value },
        })
        .collect()
}

fn acceptance_job(spec: &JobSpec) -> Result<Report> {
    let threads = std::thread::available_parallelism().map_or(2, |n| n.get());
    let report = run_acceptance(spec.seed, threads);
    let verdicts = report.criteria.iter().flat_map(criterion_verdicts).collect();
    Ok(Report {
        command: spec.command.name().into(),
        config: spec.clone(),
        results: json!(report),
        verdicts,
        csv: None,
    })
}

pub fn run(spec: &JobSpec) -> Result<Report> {
    spec.validate()?;
    match spec.command {
        Command::EntropyProfile => entropy_profile_job(spec),
        Command::Modular => modular_job(spec),
        Command::OneParticle => one_particle_job(spec),
        Command::FockVerify => fock_job(spec),
        Command::GeometrySweep => sweep_job(spec),
        Command::Acceptance => acceptance_job(spec),
    }
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Runs the job, writes its output and returns the exit status: 0 pass, 1 fail, 2 error.
pub fn execute(spec: &JobSpec) -> i32 {
    let report = match run(spec) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let csv_out = spec
        .output
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e == "csv"));
    let body = match (&report.csv, csv_out) {
        (Some(csv), true) => csv.clone(),
        _ => report.to_json(),
    };
    match &spec.output {
        Some(p) => {
            if let Err(e) = write_atomic(p, &body) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        }
        None => print!("{body}"),
    }
    for v in &report.verdicts {
        eprintln!("[{}] {} (margin {:e})", if v.passed { "PASS" } else { "FAIL" }, v.name, v.margin);
    }
    if report.passed() {
        0
    } else {
        1
    }
}
