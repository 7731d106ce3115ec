use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use surfsym_core::abelian::{self, HyperellipticCurve};
use surfsym_core::cohomology;
use surfsym_core::goldman;
use surfsym_core::lie::{GroupKind, InvariantForm, LieGroupSpec};
use surfsym_core::rep::{self, Irreducibility, RefineOptions, Representation};
use surfsym_core::simplicial;
use surfsym_core::surface_group::SurfaceGroupPresentation;
use surfsym_core::tol::{self, RankPolicy};

use crate::criteria::{self, AcceptanceConfig};
use crate::report::{Check, Report};
use crate::schema::{
    self, BasisProvenance, CohomologyDoc, ComplexDoc, CurveDoc, GoldmanDoc, PeriodDoc, RepresentationDoc,
};
use crate::{CliError, EXIT_CHECK_FAILED, EXIT_PASS, EXIT_USAGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[value(rename_all = "UPPER")]
pub enum GroupArg {
    GL,
    SL,
    Torus,
}

impl From<GroupArg> for GroupKind {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::GL => GroupKind::GL,
            GroupArg::SL => GroupKind::SL,
            GroupArg::Torus => GroupKind::Torus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Random flat representation.
    Gen,
    /// Twisted cohomology dimensions and representatives.
    Cohom,
    /// Goldman matrix with antisymmetry, descent and nondegeneracy checks.
    Goldman,
    /// Bar-complex pairing against the simplicial cup product.
    OracleCheck,
    /// Finite-difference closedness of the Goldman form.
    Closedness,
    /// Periods, bilinear relations and the Serre pairing on a hyperelliptic curve.
    Abelian,
    /// Cell list of the triangulated 4g-gon.
    Complex,
    /// Acceptance-criteria table.
    Report,
}

#[derive(Debug, Parser)]
#[command(
    name = "surfsym",
    version,
    about = "Goldman pairings on surface-group representation varieties",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value = "SL")]
    pub group: GroupArg,
    /// Matrix size (defaults to 2, or 1 for TORUS).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true, default_value_t = 2)]
    pub genus: usize,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Spread of the random starting point before refinement.
    #[arg(long, global = true, default_value_t = criteria::SAMPLE_SCALE)]
    pub scale: f64,
    #[arg(long, global = true, default_value_t = tol::FLAT_TOL)]
    pub flat_tol: f64,
    #[arg(long, global = true, default_value_t = tol::RANK_TOL)]
    pub rank_tol: f64,
    #[arg(long, global = true, default_value_t = tol::PAIRING_TOL)]
    pub pairing_tol: f64,
    #[arg(long, global = true, default_value_t = abelian::DEFAULT_QUADRATURE_ORDER)]
    pub quadrature_order: usize,
    /// Comma-separated real branch points.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub branch_points: Option<Vec<f64>>,
    /// Curve JSON file (`{"branch_points": [...]}`).
    #[arg(long, global = true, conflicts_with = "branch_points")]
    pub curve: Option<PathBuf>,
    /// Representation JSON file, used instead of generating one.
    #[arg(long, global = true)]
    pub rep: Option<PathBuf>,
    /// Random pairs for `oracle-check` and `abelian`.
    #[arg(long, global = true, default_value_t = 100)]
    pub pairs: usize,
    /// Barycentric refinements for `complex`.
    #[arg(long, global = true, default_value_t = 0)]
    pub refinement: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON object of flag values (`{"genus": 3, "rank-tol": 1e-9}`); explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// The resolved configuration, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub group: String,
    pub n: usize,
    pub genus: usize,
    pub seed: u64,
    pub scale: f64,
    pub flat_tol: f64,
    pub rank_tol: f64,
    pub pairing_tol: f64,
    pub quadrature_order: usize,
    pub pairs: usize,
    pub refinement: usize,
    pub rep: Option<String>,
    pub branch_points: Option<Vec<f64>>,
    pub curve: Option<String>,
    pub config: Option<String>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let kind: GroupKind = cli.group.into();
        let n = cli.n.unwrap_or(if kind == GroupKind::Torus { 1 } else { 2 });
        LieGroupSpec::new(kind, n).map_err(|e| CliError::Usage(e.to_string()))?;
        for (name, value) in [
            ("--flat-tol", cli.flat_tol),
            ("--rank-tol", cli.rank_tol),
            ("--pairing-tol", cli.pairing_tol),
            ("--scale", cli.scale),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive, got {value}")));
            }
        }
        if cli.genus < 2 {
            return Err(CliError::Usage(format!("--genus must be at least 2, got {}", cli.genus)));
        }
        if cli.quadrature_order < abelian::MIN_QUADRATURE_ORDER {
            return Err(CliError::Usage(format!(
                "--quadrature-order must be at least {}, got {}",
                abelian::MIN_QUADRATURE_ORDER,
                cli.quadrature_order
            )));
        }
        let display = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        Ok(Self {
            command: cli.command,
            group: kind.name().to_string(),
            n,
            genus: cli.genus,
            seed: cli.seed,
            scale: cli.scale,
            flat_tol: cli.flat_tol,
            rank_tol: cli.rank_tol,
            pairing_tol: cli.pairing_tol,
            quadrature_order: cli.quadrature_order,
            pairs: cli.pairs,
            refinement: cli.refinement,
            rep: display(&cli.rep),
            branch_points: cli.branch_points.clone(),
            curve: display(&cli.curve),
            config: display(&cli.config),
        })
    }

    fn spec(&self) -> LieGroupSpec {
        LieGroupSpec::new(self.group.parse().expect("validated group"), self.n).expect("validated spec")
    }

    fn policy(&self) -> RankPolicy {
        RankPolicy::new(self.rank_tol)
    }

    fn acceptance(&self) -> AcceptanceConfig {
        AcceptanceConfig {
            seed: self.seed,
            flat_tol: self.flat_tol,
            rank_tol: self.rank_tol,
            pairing_tol: self.pairing_tol,
            quadrature_order: self.quadrature_order,
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Turns a config file into flag tokens. They are placed ahead of the real
/// arguments so that anything given on the command line overrides them.
pub fn config_args(path: &Path) -> Result<Vec<OsString>, CliError> {
    let Value::Object(map) = read_json(path)? else {
        return Err(CliError::Usage(format!("{}: config must be a JSON object", path.display())));
    };
    let mut out = Vec::new();
    for (key, value) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" {
            return Err(CliError::Usage(format!("{}: config files cannot nest", path.display())));
        }
        let scalar = |v: &Value| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(x) => Ok(x.to_string()),
            _ => Err(CliError::Usage(format!("{}: unsupported value for {key}", path.display()))),
        };
        let text = match &value {
            Value::Array(items) => items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?.join(","),
            v => scalar(v)?,
        };
        out.push(OsString::from(flag));
        out.push(OsString::from(text));
    }
    Ok(out)
}

/// Reads a representation document, either bare or embedded in a `gen` report.
pub fn load_representation(path: &Path) -> Result<RepresentationDoc, CliError> {
    let value = read_json(path)?;
    let doc = value.pointer("/results/representation").cloned().unwrap_or(value);
    serde_json::from_value(doc).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

struct Source {
    rep: Representation,
    doc: RepresentationDoc,
    seed: Option<u64>,
    generation: Value,
}

fn representation(cfg: &RunConfig) -> Result<Source, CliError> {
    if let Some(path) = &cfg.rep {
        let doc = load_representation(Path::new(path))?;
        let rep = doc.to_rep()?;
        let doc = RepresentationDoc::from_rep(&rep);
        return Ok(Source { rep, doc, seed: None, generation: Value::Null });
    }
    let options = RefineOptions { flat_tol: cfg.flat_tol, ..RefineOptions::default() };
    let refined = rep::random_flat_representation_with(cfg.spec(), cfg.genus, cfg.seed, cfg.scale, &options)?;
    let doc = RepresentationDoc::from_rep(&refined.rep);
    let generation = json!({"iterations": refined.iterations, "attempts": refined.attempts});
    Ok(Source { rep: refined.rep, doc, seed: Some(cfg.seed), generation })
}

fn irreducibility_label(i: Irreducibility) -> &'static str {
    match i {
        Irreducibility::Irreducible => "irreducible",
        Irreducibility::Reducible => "reducible",
        Irreducibility::Indeterminate => "indeterminate",
    }
}

fn cycle(genus: usize) -> Result<goldman::BarTwoChain, CliError> {
    Ok(goldman::fundamental_cycle(&SurfaceGroupPresentation::new(genus)?)?)
}

fn curve(cfg: &RunConfig) -> Result<HyperellipticCurve, CliError> {
    if let Some(path) = &cfg.curve {
        let doc: CurveDoc =
            serde_json::from_value(read_json(Path::new(path))?).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        return doc.to_curve();
    }
    match &cfg.branch_points {
        Some(points) => Ok(HyperellipticCurve::new(points)?),
        None => Ok(abelian::sample_curve()),
    }
}

type Output = (Value, Vec<Check>);

fn gen(cfg: &RunConfig) -> Result<Output, CliError> {
    let src = representation(cfg)?;
    let checks = vec![Check::at_most("relation residual", src.rep.residual(), cfg.flat_tol)];
    let results = json!({
        "representation": src.doc,
        "rep_hash": src.doc.hash(),
        "seed": src.seed,
        "generation": src.generation,
    });
    Ok((results, checks))
}

fn cohom(cfg: &RunConfig) -> Result<Output, CliError> {
    let src = representation(cfg)?;
    let spaces = cohomology::cohomology(&src.rep, cfg.flat_tol, &cfg.policy())?;
    let irreducible = rep::irreducibility(&src.rep, &cfg.policy());
    let dim = src.rep.spec().dim() as i64;
    let mut checks = vec![
        Check::at_most("relation residual", src.rep.residual(), cfg.flat_tol),
        Check::at_most("δ¹∘δ⁰ residual", spaces.composition_residual(), cfg.flat_tol.max(1e-10)),
        Check::equals(
            "Euler characteristic",
            spaces.euler_characteristic() as f64,
            (dim * (2 - 2 * cfg.genus as i64)) as f64,
        ),
    ];
    let expected = cohomology::expected_irreducible_h1(&src.rep);
    if irreducible == Irreducibility::Irreducible {
        checks.push(Check::equals("h1 at irreducible point", spaces.h1 as f64, expected as f64));
    }
    let results = json!({
        "rep_hash": src.doc.hash(),
        "seed": src.seed,
        "irreducibility": irreducibility_label(irreducible),
        "expected_irreducible_h1": expected,
        "cohomology": CohomologyDoc::new(&spaces),
    });
    Ok((results, checks))
}

fn goldman_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let src = representation(cfg)?;
    let spaces = cohomology::cohomology(&src.rep, cfg.flat_tol, &cfg.policy())?;
    let form = InvariantForm::trace_form(*src.rep.spec());
    let cyc = cycle(cfg.genus)?;
    let m = goldman::goldman_matrix(&src.rep, &spaces, &cyc, &form)?;
    let descent = goldman::descent_residual(&src.rep, &cyc, &form, cfg.seed, 20)?;
    let checks = vec![
        Check::at_most("antisymmetry", m.antisymmetry_residual(), cfg.pairing_tol),
        Check::at_most("descent", descent, criteria::DESCENT_TOL),
        Check::at_least("nondegeneracy (singular value ratio)", m.singular_ratio(), criteria::NONDEGENERACY_TOL),
    ];
    let provenance = BasisProvenance { rep_hash: src.doc.hash(), seed: src.seed, rank_tol: cfg.rank_tol };
    let results = json!({
        "goldman_matrix": GoldmanDoc::new(&m, provenance),
        "antisymmetry_residual": m.antisymmetry_residual(),
        "descent_residual": descent,
        "singular_ratio": m.singular_ratio(),
        "representatives": schema::columns(&spaces.representatives),
    });
    Ok((results, checks))
}

fn oracle_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let src = representation(cfg)?;
    let stats = criteria::oracle_statistics(&src.rep, cfg.pairs, cfg.seed, &cfg.acceptance())?;
    let get = |k: &str| stats[k].as_f64().unwrap_or(f64::NAN);
    let checks = vec![
        Check::at_most("bar vs simplicial", get("max_relative_bar_vs_simplicial"), cfg.pairing_tol),
        Check::at_most("refinement 0 vs 1", get("max_relative_refinement_0_vs_1"), cfg.pairing_tol),
    ];
    Ok((json!({"rep_hash": src.doc.hash(), "seed": src.seed, "oracle": stats}), checks))
}

fn closedness(cfg: &RunConfig) -> Result<Output, CliError> {
    let src = representation(cfg)?;
    let residuals = criteria::closedness_residuals(&src.rep, &cfg.acceptance())?;
    let (checks, order) = criteria::closedness_checks(residuals);
    let results = json!({
        "rep_hash": src.doc.hash(),
        "seed": src.seed,
        "steps": criteria::CLOSEDNESS_STEPS,
        "residuals": residuals,
        "observed_order": order,
        "tolerance": criteria::CLOSEDNESS_TOL,
        "min_order": criteria::CLOSEDNESS_MIN_ORDER,
    });
    Ok((results, checks))
}

fn abelian_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let c = curve(cfg)?;
    let p = abelian::periods(&c, cfg.quadrature_order)?;
    let gram = abelian::serre_gram(&p, 1.0)?;
    let gram_norm = surfsym_core::linalg::frobenius(&gram);
    let antisymmetry = surfsym_core::linalg::frobenius(&(&gram + gram.transpose())) / gram_norm.max(f64::MIN_POSITIVE);
    let sv = surfsym_core::linalg::full_svd(&gram).values;
    let ratio = sv.last().copied().unwrap_or(0.0) / sv.first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let stats = criteria::pullback_stats(&p, cfg.pairs, cfg.seed)?;
    let mut checks = vec![
        Check::at_most("relation I relative residual", p.relation_i_residual(), tol::RIEMANN_RELATION_TOL),
        Check::holds("relation II definite", p.relation_ii_definite()),
        Check::at_most("quadrature doubling drift", p.drift(), tol::QUADRATURE_DRIFT_TOL),
        Check::at_most("Θ-Gram antisymmetry", antisymmetry, cfg.pairing_tol),
        Check::at_least("Θ-Gram singular value ratio", ratio, criteria::NONDEGENERACY_TOL),
    ];
    checks.extend(criteria::pullback_checks(&stats).into_iter().filter(|c| c.name != "random tangent pairs"));
    let results = json!({
        "periods": PeriodDoc::new(&c, &p),
        "serre_gram": schema::matrix_rows(&gram),
        "serre_gram_singular_values": sv,
        "pullback": criteria::pullback_json(&stats),
    });
    Ok((results, checks))
}

fn complex_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let k = simplicial::build_complex(cfg.genus, cfg.refinement)?;
    let expected_triangles = 4 * cfg.genus * 6usize.pow(cfg.refinement as u32);
    let checks = vec![
        Check::equals("Euler characteristic", k.euler_characteristic() as f64, 2.0 - 2.0 * cfg.genus as f64),
        Check::equals("triangle count", k.triangles().len() as f64, expected_triangles as f64),
        Check::holds("fundamental cycle closed", k.cycle_boundary().iter().all(|&b| b == 0)),
    ];
    Ok((json!({"complex": ComplexDoc::new(&k)}), checks))
}

fn report_cmd(cfg: &RunConfig) -> (Value, Vec<Check>, Value) {
    let runs = criteria::run_all(&cfg.acceptance());
    let checks = runs
        .iter()
        .map(|r| Check::holds(format!("criterion {}: {}", r.report.id, r.report.title), r.report.passed))
        .collect();
    let table: Vec<_> = runs.iter().map(|r| &r.report).collect();
    let timing: Vec<_> = runs
        .iter()
        .map(|r| {
            json!({
                "criterion": r.report.id,
                "elapsed_s": r.elapsed.as_secs_f64(),
                "limit_s": r.limit.as_secs_f64(),
                "within_limit": r.within_limit(),
            })
        })
        .collect();
    (json!({"criteria": table}), checks, Value::Array(timing))
}

/// Runs one command. Numeric failures are returned as errors; check
/// failures are recorded in the report.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let config = serde_json::to_value(cfg).expect("config is serializable");
    let name = serde_json::to_value(cfg.command).expect("command is serializable");
    let name = name.as_str().unwrap_or("unknown");
    let (results, checks) = match cfg.command {
        Command::Gen => gen(cfg)?,
        Command::Cohom => cohom(cfg)?,
        Command::Goldman => goldman_cmd(cfg)?,
        Command::OracleCheck => oracle_check(cfg)?,
        Command::Closedness => closedness(cfg)?,
        Command::Abelian => abelian_cmd(cfg)?,
        Command::Complex => complex_cmd(cfg)?,
        Command::Report => {
            let (results, checks, timing) = report_cmd(cfg);
            let mut report = Report::new(name, config, results, checks);
            let slow = timing.as_array().into_iter().flatten().find(|t| t["within_limit"] == json!(false));
            if let (true, Some(t)) = (report.passed(), slow) {
                report.status = "fail";
                report.first_failure = Some(format!("criterion {} runtime limit", t["criterion"]));
            }
            report.timing = Some(timing);
            return Ok(report);
        }
    };
    Ok(Report::new(name, config, results, checks))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses arguments, runs the command, writes the report and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if let Some(path) = config_path(&args) {
        match config_args(&path) {
            Ok(extra) => {
                let at = 1.min(args.len());
                args.splice(at..at, extra);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        }
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match RunConfig::from_cli(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(&cfg) {
        Ok(report) => {
            if let Err(e) = emit(&report.to_json(), cli.out.as_deref()) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
            match &report.first_failure {
                None => EXIT_PASS,
                Some(name) => {
                    eprintln!("check failed: {name}");
                    EXIT_CHECK_FAILED
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Numeric(_) = e {
                let config = serde_json::to_value(&cfg).expect("config is serializable");
                let command = serde_json::to_value(cfg.command).expect("serializable");
                let mut report = Report::new(
                    command.as_str().unwrap_or("unknown"),
                    config,
                    json!({"error": e.to_string()}),
                    Vec::new(),
                );
                report.status = "error";
                report.first_failure = Some(e.to_string());
                let _ = emit(&report.to_json(), cli.out.as_deref());
            }
            e.exit_code()
        }
    }
}
