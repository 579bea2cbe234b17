//! Command-line front door: every subcommand loads a sample (or graph),
//! runs the requested operations, and emits one JSON report plus plot-ready
//! CSV siblings. Flags mirror scenario-file fields, so any invocation can be
//! saved as a scenario and replayed with `run`.

use clap::{Args, Parser, Subcommand};
use infinorm::expr::Expr;
use infinorm::io::{
    load_graph, load_scenario, realize_scenario, CenterSpec, DomainSpec, OpSpec, Realized,
    Scenario, Spacing,
};
use infinorm::multiend::{
    aniso_asymptotic, aniso_sharp_norm, end_limits, gluing_check, project_vanishing,
    EndDecomposition,
};
use infinorm::norms::sharp::{certificate, fixed_norm, sharp_norm, Centering, NormReport};
use infinorm::norms::tails::{
    asymptotic_constant, patch_check, tail_ladder, AsymptoticEstimate, ShellPolicy,
};
use infinorm::norms::{lq_embedding_check, pullback_check, schur_test, Kernel};
use infinorm::rates::{classify_rate, p_profile, Scale};
use infinorm::report::{report, sibling_csv_path, write_json, write_table, Json};
use infinorm::space::{detect_graph_ends, fit_coarse_affine, fit_volume_growth, ExhaustedSpace};
use infinorm::weights::{check_admissibility, Weight};
use infinorm::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "infinorm", version, about = "Weighted asymptotic norms on sampled spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fixed-center or sharp norm of a sample, with optional certificate.
    Norm(NormArgs),
    /// Critical order along a weight scale, plus the order profile.
    Rate(RateArgs),
    /// Tail/local ladder, limsup estimate, and the patch identity.
    Tails(TailsArgs),
    /// Count ends of a level graph.
    Ends(EndsArgs),
    /// Multi-end norms, limits, projection and gluing.
    Aniso(AnisoArgs),
    /// Structural checks: admissibility, affine, schur, pullback, volume.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Execute a scenario file.
    Run(RunArgs),
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Synthesized grid, from:to:count[:log].
    #[arg(long)]
    grid: Option<String>,
    /// Sample CSV with columns id,h,f[,x1..xd][,mu][,m][,end].
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Expression for f over x (grid sources).
    #[arg(long)]
    f: Option<String>,
    /// Expression for h over x (grid sources).
    #[arg(long)]
    h: Option<String>,
}

impl SourceArgs {
    /// For checks that only look at the space, a missing f is simply zero.
    fn or_zero_f(&self) -> Self {
        let mut s = self.clone();
        if s.f.is_none() {
            s.f = Some("0".into());
        }
        s
    }

    fn to_scenario(&self, weight: &str, dec: Option<&Path>, ops: Vec<OpSpec>) -> Result<Scenario> {
        let domain = match (&self.grid, &self.csv) {
            (Some(g), None) => parse_grid_flag(g)?,
            (None, Some(p)) => DomainSpec::Csv(p.display().to_string()),
            _ => return Err(Error::input("give exactly one source: --grid or --csv")),
        };
        Ok(Scenario {
            domain,
            f_expr: self.f.clone(),
            h_expr: self.h.clone(),
            weight: Some(weight.to_string()),
            l: None,
            dec: dec.map(|p| p.display().to_string()),
            ends: None,
            ops,
            out: String::new(),
        })
    }

    fn load(&self, weight: &str, dec: Option<&Path>) -> Result<(ExhaustedSpace, Vec<f64>, Option<EndDecomposition>)> {
        let sc = self.to_scenario(weight, dec, Vec::new())?;
        match realize_scenario(&sc, Path::new("."))? {
            Realized::Sample { space, f, dec, .. } => Ok((space, f, dec)),
            Realized::Graph(_) => Err(Error::input("this subcommand needs a sample, not a graph")),
        }
    }
}

fn parse_grid_flag(spec: &str) -> Result<DomainSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(Error::input(format!(
            "grid flag must be from:to:count[:log], got {spec:?}"
        )));
    }
    let from: f64 = parts[0]
        .parse()
        .map_err(|_| Error::input(format!("grid start is not a number: {:?}", parts[0])))?;
    let to: f64 = parts[1]
        .parse()
        .map_err(|_| Error::input(format!("grid end is not a number: {:?}", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::input(format!("grid count is not an integer: {:?}", parts[2])))?;
    let spacing = match parts.get(3) {
        None => Spacing::Linear,
        Some(&"log") => Spacing::Log,
        Some(&"linear") => Spacing::Linear,
        Some(other) => return Err(Error::input(format!("unknown grid spacing {other:?}"))),
    };
    Ok(DomainSpec::Grid { from, to, count, spacing })
}

fn parse_center(l: &str) -> Result<Centering> {
    if l == "sharp" {
        return Ok(Centering::Sharp);
    }
    let v: f64 = l
        .parse()
        .map_err(|_| Error::input(format!("--L must be a number or \"sharp\", got {l:?}")))?;
    Ok(Centering::Fixed(v))
}

fn parse_scale(s: &str) -> Result<Scale> {
    match s {
        "alg" | "algebraic" => Ok(Scale::Algebraic),
        "exp" | "exponential" => Ok(Scale::Exponential),
        "logpoly" | "log_polynomial" => Ok(Scale::LogPolynomial),
        other => Err(Error::input(format!(
            "unknown scale {other:?}; expected alg, exp or logpoly"
        ))),
    }
}

fn parse_ladder(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::input(format!("ladder entry is not a number: {tok:?}")))
        })
        .collect()
}

#[derive(Args)]
struct NormArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "poly:p=1")]
    weight: String,
    /// Centering constant, or "sharp" for the minimax center.
    #[arg(long = "L", default_value = "sharp")]
    l: String,
    /// Also emit the dual certificate of the sharp norm.
    #[arg(long)]
    certify: bool,
    /// Also estimate the asymptotic constant.
    #[arg(long)]
    tails: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Weight scale: alg, exp or logpoly.
    #[arg(long)]
    scale: String,
    /// Known limit to classify against; "sharp" estimates it from the tail.
    #[arg(long = "L", default_value = "0")]
    l: String,
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TailsArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "poly:p=1")]
    weight: String,
    #[arg(long = "L", default_value = "sharp")]
    l: String,
    /// Radii, comma separated; must start at 0.
    #[arg(long)]
    ladder: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EndsArgs {
    /// Graph file: edge lines, then "# levels", then "id m" lines.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 3)]
    window: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnisoArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Decomposition JSON; CSV sources may carry an `end` column instead.
    #[arg(long)]
    dec: Option<PathBuf>,
    /// Weight for ends built from an `end` column.
    #[arg(long, default_value = "poly:p=1")]
    weight: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Audit a weight spec on a height grid.
    Admissibility(AdmissibilityArgs),
    /// Fit the affine envelope between two exhaustions and bound the norm ratio.
    Affine(AffineArgs),
    /// Schur constants of a moving-average kernel, stress-tested on probes.
    Schur(SchurArgs),
    /// Transported-norm bound along a height map.
    Pullback(PullbackArgs),
    /// Volume growth exponent on a radius ladder.
    Volume(VolumeArgs),
}

#[derive(Args)]
struct AdmissibilityArgs {
    #[arg(long)]
    weight: String,
    /// Height grid to audit on, from:to:count[:log].
    #[arg(long, default_value = "0:64:2049")]
    grid: String,
    /// Record r,s pairs whose submultiplicativity ratio exceeds this.
    #[arg(long, default_value_t = 16.0)]
    cap: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AffineArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Expression for the second exhaustion h' over x.
    #[arg(long)]
    hprime: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SchurArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "poly:p=1")]
    weight: String,
    /// Moving-average window radius in sample indices.
    #[arg(long, default_value_t = 3)]
    radius: usize,
    #[arg(long, default_value_t = 20)]
    probes: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PullbackArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Expression for the target space's height over x.
    #[arg(long)]
    hb: String,
    #[arg(long, default_value = "poly:p=1")]
    weight: String,
    /// Claimed A0,B0 pair to verify instead of fitting.
    #[arg(long)]
    star: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VolumeArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    ladder: String,
    /// Also compare the unweighted L^q norm against the layered bound.
    #[arg(long)]
    lq: Option<f64>,
    #[arg(long, default_value = "poly:p=1")]
    weight: String,
    #[arg(long = "L", default_value = "0")]
    l: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    scenario: PathBuf,
    /// Override the scenario's output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Everything a subcommand produces: report entries plus numbered tables.
#[derive(Default)]
struct Output {
    runs: Vec<Json>,
    tables: Vec<(Vec<String>, Vec<Vec<f64>>)>,
}

impl Output {
    fn push(&mut self, run: Json) {
        self.runs.push(run);
    }

    fn table(&mut self, header: &[&str], rows: Vec<Vec<f64>>) {
        self.tables.push((header.iter().map(|s| s.to_string()).collect(), rows));
    }
}

fn centering_fields(c: Centering) -> Vec<(String, Json)> {
    match c {
        Centering::Sharp => vec![
            ("centering".into(), Json::str("sharp")),
            ("L".into(), Json::Null),
        ],
        Centering::Fixed(l) => vec![
            ("centering".into(), Json::str("fixed")),
            ("L".into(), Json::num(l)),
        ],
    }
}

fn norm_json(rep: &NormReport) -> Json {
    let contacts = rep
        .contacts
        .iter()
        .map(|c| {
            Json::Obj(vec![
                ("id".into(), Json::str(c.id.clone())),
                ("sign".into(), Json::Int(c.sign as i64)),
                ("weighted_error".into(), Json::num(c.weighted_error)),
            ])
        })
        .collect();
    let mut fields = vec![
        ("op".into(), Json::str("norm")),
        ("weight".into(), Json::str(rep.weight.clone())),
    ];
    fields.extend(centering_fields(rep.centering));
    fields.push(("value".into(), Json::num(rep.value)));
    fields.push(("c_star".into(), Json::num(rep.c_star)));
    fields.push(("contacts".into(), Json::Arr(contacts)));
    Json::Obj(fields)
}

fn estimate_json(op: &str, weight: Option<&str>, est: &AsymptoticEstimate) -> Json {
    let mut fields = vec![("op".into(), Json::str(op))];
    if let Some(w) = weight {
        fields.push(("weight".into(), Json::str(w)));
    }
    fields.push(("status".into(), Json::str(est.status.as_str())));
    fields.push(("value".into(), Json::opt_num(est.value)));
    fields.push(("center".into(), Json::num(est.center)));
    fields.push((
        "diagnostics".into(),
        Json::Obj(vec![
            ("shells_used".into(), Json::Int(est.shells_used as i64)),
            ("relative_drift".into(), Json::num(est.relative_drift)),
            (
                "slopes".into(),
                match est.slopes {
                    Some((a, b)) => Json::Arr(vec![Json::num(a), Json::num(b)]),
                    None => Json::Null,
                },
            ),
        ]),
    ));
    Json::Obj(fields)
}

fn cmd_norm(args: &NormArgs) -> Result<Output> {
    let (space, f, _) = args.source.load(&args.weight, None)?;
    let w = Weight::parse_spec(&args.weight)?;
    let centering = parse_center(&args.l)?;
    let rep = match centering {
        Centering::Sharp => sharp_norm(&space, &f, &w)?,
        Centering::Fixed(l) => fixed_norm(&space, &f, &w, l)?,
    };
    let mut out = Output::default();
    out.push(norm_json(&rep));
    if args.certify {
        let cert = certificate(&space, &f, &w)?;
        let atoms = cert
            .atoms
            .iter()
            .map(|(id, mass)| {
                Json::Obj(vec![
                    ("id".into(), Json::str(id.clone())),
                    ("mass".into(), Json::num(*mass)),
                ])
            })
            .collect();
        out.push(Json::Obj(vec![
            ("op".into(), Json::str("certificate")),
            ("atoms".into(), Json::Arr(atoms)),
            ("weighted_total_variation".into(), Json::num(cert.weighted_total_variation)),
            ("pairing".into(), Json::num(cert.pairing_value)),
            ("sharp".into(), Json::num(cert.sharp)),
        ]));
    }
    if args.tails {
        let est = asymptotic_constant(&space, &f, &w, centering, ShellPolicy::default())?;
        out.push(estimate_json("asymptotic", Some(&args.weight), &est));
    }
    Ok(out)
}

fn cmd_rate(args: &RateArgs) -> Result<Output> {
    let (space, f, _) = args.source.load("poly:p=1", None)?;
    let scale = parse_scale(&args.scale)?;
    let centering = parse_center(&args.l)?;
    let cls = classify_rate(&space, &f, scale, centering, args.tol, ShellPolicy::default())?;
    let mut out = Output::default();
    out.push(Json::Obj(vec![
        ("op".into(), Json::str("rate")),
        ("scale".into(), Json::str(cls.scale.as_str())),
        ("param".into(), Json::str(cls.scale.param_name())),
        ("critical".into(), Json::num(cls.critical)),
        (
            "bracket".into(),
            Json::Arr(vec![Json::num(cls.bracket.0), Json::num(cls.bracket.1)]),
        ),
        ("iterations".into(), Json::Int(cls.iterations as i64)),
        (
            "one_sided".into(),
            cls.one_sided.map_or(Json::Null, Json::str),
        ),
        ("constant_at_critical".into(), Json::opt_num(cls.constant_at_critical)),
        ("constant_evaluated_at".into(), Json::opt_num(cls.constant_evaluated_at)),
    ]));
    if scale == Scale::Algebraic {
        let grid: Vec<f64> = (0..9).map(|k| k as f64 * 0.5).collect();
        let prof = p_profile(&space, &f, &grid, centering)?;
        let mut fields = vec![("op".into(), Json::str("p_profile"))];
        fields.extend(centering_fields(prof.centering));
        fields.push((
            "p_grid".into(),
            Json::Arr(prof.p_grid.iter().map(|p| Json::num(*p)).collect()),
        ));
        fields.push((
            "values".into(),
            Json::Arr(prof.values.iter().map(|v| Json::num(*v)).collect()),
        ));
        fields.push((
            "log_convex_ok".into(),
            prof.log_convex_ok.map_or(Json::Null, Json::Bool),
        ));
        fields.push(("max_convexity_gap".into(), Json::num(prof.max_convexity_gap)));
        out.push(Json::Obj(fields));
        let rows: Vec<Vec<f64>> =
            prof.p_grid.iter().zip(&prof.values).map(|(p, v)| vec![*p, *v]).collect();
        out.table(&["p", "value"], rows);
    }
    Ok(out)
}

fn cmd_tails(args: &TailsArgs) -> Result<Output> {
    let (space, f, _) = args.source.load(&args.weight, None)?;
    let w = Weight::parse_spec(&args.weight)?;
    let ladder = parse_ladder(&args.ladder)?;
    let tl = tail_ladder(&space, &f, &w, &ladder)?;
    let mut out = Output::default();
    let entries = tl
        .entries
        .iter()
        .map(|e| {
            Json::Obj(vec![
                ("r".into(), Json::num(e.r)),
                ("tail".into(), Json::num(e.tail)),
                ("local".into(), Json::num(e.local)),
            ])
        })
        .collect();
    out.push(Json::Obj(vec![
        ("op".into(), Json::str("tail_ladder")),
        ("weight".into(), Json::str(&args.weight)),
        ("c_star".into(), Json::num(tl.c_star)),
        ("sharp".into(), Json::num(tl.sharp)),
        ("ladder".into(), Json::Arr(entries)),
        ("monotone_tail".into(), Json::Bool(tl.monotone_tail)),
        (
            "limit_status".into(),
            tl.limit_estimate
                .as_ref()
                .map_or(Json::Null, |e| Json::str(e.status.as_str())),
        ),
    ]));
    out.table(
        &["R", "T", "loc"],
        tl.entries.iter().map(|e| vec![e.r, e.tail, e.local]).collect(),
    );
    let centering = parse_center(&args.l)?;
    let est = asymptotic_constant(&space, &f, &w, centering, ShellPolicy::default())?;
    out.push(estimate_json("asymptotic", Some(&args.weight), &est));
    let pc = patch_check(&space, &f, &w, &ladder)?;
    out.push(Json::Obj(vec![
        ("op".into(), Json::str("patch")),
        ("sharp".into(), Json::num(pc.sharp)),
        ("patched".into(), Json::num(pc.patched)),
        ("gap".into(), Json::num(pc.gap)),
    ]));
    Ok(out)
}

fn ends_json(rep: &infinorm::space::EndsReport) -> Json {
    Json::Obj(vec![
        ("op".into(), Json::str("ends")),
        ("ends".into(), Json::Int(rep.ends as i64)),
        ("stable".into(), Json::Bool(rep.stable)),
        ("stability_depth".into(), Json::Int(rep.stability_depth as i64)),
        (
            "components_per_level".into(),
            Json::Arr(rep.components_per_level.iter().map(|c| Json::Int(*c as i64)).collect()),
        ),
    ])
}

fn cmd_ends(args: &EndsArgs) -> Result<Output> {
    let graph = load_graph(&args.graph)?;
    let rep = detect_graph_ends(&graph, args.window)?;
    let mut out = Output::default();
    out.push(ends_json(&rep));
    Ok(out)
}

fn aniso_output(space: &ExhaustedSpace, f: &[f64], dec: &EndDecomposition) -> Result<Output> {
    let mut out = Output::default();
    let rep = aniso_sharp_norm(space, f, dec)?;
    let per_end = rep
        .per_end
        .iter()
        .map(|e| {
            Json::Obj(vec![
                ("label".into(), Json::str(e.label.clone())),
                ("norm".into(), Json::num(e.norm)),
            ])
        })
        .collect();
    out.push(Json::Obj(vec![
        ("op".into(), Json::str("aniso_norm")),
        ("value".into(), Json::num(rep.value)),
        ("c_star".into(), Json::num(rep.c_star)),
        ("core_osc".into(), Json::num(rep.core_osc)),
        ("per_end".into(), Json::Arr(per_end)),
    ]));
    let asym = aniso_asymptotic(space, f, dec, ShellPolicy::default())?;
    let per_end = asym
        .per_end
        .iter()
        .map(|e| {
            Json::Obj(vec![
                ("label".into(), Json::str(e.label.clone())),
                ("limit".into(), Json::opt_num(e.limit)),
                (
                    "residual_status".into(),
                    e.residual.as_ref().map_or(Json::Null, |r| Json::str(r.status.as_str())),
                ),
                (
                    "residual_value".into(),
                    e.residual.as_ref().map_or(Json::Null, |r| Json::opt_num(r.value)),
                ),
                ("constant".into(), Json::opt_num(e.constant)),
            ])
        })
        .collect();
    out.push(Json::Obj(vec![
        ("op".into(), Json::str("aniso_asymptotic")),
        ("status".into(), Json::str(asym.status.as_str())),
        ("value".into(), Json::opt_num(asym.value)),
        ("c_star".into(), Json::opt_num(asym.c_star)),
        ("witness".into(), asym.witness.map_or(Json::Null, Json::str)),
        ("per_end".into(), Json::Arr(per_end)),
        ("evaluations".into(), Json::Int(asym.evaluations as i64)),
    ]));
    let lims = end_limits(space, f, dec, ShellPolicy::default())?;
    let per_end = lims
        .iter()
        .map(|l| {
            Json::Obj(vec![
                ("label".into(), Json::str(l.label.clone())),
                ("limit".into(), Json::num(l.limit)),
                ("deep_points".into(), Json::Int(l.deep_points as i64)),
                ("residual_status".into(), Json::str(l.residual.status.as_str())),
                ("residual_value".into(), Json::opt_num(l.residual.value)),
            ])
        })
        .collect();
    out.push(Json::Obj(vec![
        ("op".into(), Json::str("end_limits")),
        ("per_end".into(), Json::Arr(per_end)),
    ]));
    let proj = project_vanishing(space, f, dec, ShellPolicy::default())?;
    let after = end_limits(space, &proj.g, dec, ShellPolicy::default())?;
    let max_after = after.iter().map(|l| l.limit.abs()).fold(0.0, f64::max);
    let limits = proj
        .limits
        .iter()
        .map(|(label, limit)| {
            Json::Obj(vec![
                ("label".into(), Json::str(label.clone())),
                ("limit".into(), Json::num(*limit)),
            ])
        })
        .collect();
    out.push(Json::Obj(vec![
        ("op".into(), Json::str("projection")),
        ("limits".into(), Json::Arr(limits)),
        ("max_end_limit_after".into(), Json::num(max_after)),
    ]));
    let glue = gluing_check(space, f, dec)?;
    let per_end = glue
        .per_end_own
        .iter()
        .map(|(label, norm)| {
            Json::Obj(vec![
                ("label".into(), Json::str(label.clone())),
                ("norm".into(), Json::num(*norm)),
            ])
        })
        .collect();
    out.push(Json::Obj(vec![
        ("op".into(), Json::str("gluing")),
        ("global".into(), Json::num(glue.global)),
        ("core_osc".into(), Json::num(glue.core_osc)),
        ("per_end_own".into(), Json::Arr(per_end)),
        ("rhs".into(), Json::num(glue.rhs)),
        ("ratio".into(), Json::num(glue.ratio)),
    ]));
    Ok(out)
}

fn cmd_aniso(args: &AnisoArgs) -> Result<Output> {
    let (space, f, dec) = args.source.load(&args.weight, args.dec.as_deref())?;
    let dec = dec.ok_or_else(|| {
        Error::input("aniso needs a decomposition: pass --dec or a CSV with an `end` column")
    })?;
    aniso_output(&space, &f, &dec)
}

fn cmd_check(cmd: &CheckCmd) -> Result<Output> {
    let mut out = Output::default();
    match cmd {
        CheckCmd::Admissibility(args) => {
            let w = Weight::parse_spec(&args.weight)?;
            let grid = match parse_grid_flag(&args.grid)? {
                DomainSpec::Grid { from, to, count, spacing } => {
                    let sc = Scenario {
                        domain: DomainSpec::Grid { from, to, count, spacing },
                        f_expr: Some("0".into()),
                        h_expr: Some("x".into()),
                        weight: None,
                        l: None,
                        dec: None,
                        ends: None,
                        ops: vec![],
                        out: String::new(),
                    };
                    match realize_scenario(&sc, Path::new("."))? {
                        Realized::Sample { space, .. } => space.h,
                        _ => unreachable!(),
                    }
                }
                _ => unreachable!(),
            };
            let rep = check_admissibility(&w, &grid, args.cap)?;
            out.push(Json::Obj(vec![
                ("op".into(), Json::str("admissibility")),
                ("weight".into(), Json::str(&args.weight)),
                ("monotone_ok".into(), Json::Bool(rep.monotone_ok)),
                ("normalized_ok".into(), Json::Bool(rep.normalized_ok)),
                ("submult_constant_k".into(), Json::num(rep.submult_constant_k)),
                ("violations".into(), Json::Int(rep.violations.len() as i64)),
                ("grid_max".into(), Json::num(rep.grid_max)),
            ]));
        }
        CheckCmd::Affine(args) => {
            let (space, _, _) = args.source.or_zero_f().load("poly:p=1", None)?;
            let coords = space
                .coords
                .as_ref()
                .ok_or_else(|| Error::input("affine check needs a grid source"))?;
            let xs: Vec<f64> = coords.iter().map(|c| c[0]).collect();
            let hprime_expr = Expr::parse(&args.hprime, &["x"])?;
            let hprime: Vec<f64> =
                xs.iter().map(|x| hprime_expr.eval(&[*x])).collect::<Result<_>>()?;
            let fit = fit_coarse_affine(&space.h, &hprime)?;
            out.push(Json::Obj(vec![
                ("op".into(), Json::str("affine")),
                ("upper_slope".into(), Json::num(fit.upper_slope)),
                ("upper_intercept".into(), Json::num(fit.upper_intercept)),
                ("lower_slope".into(), Json::num(fit.lower_slope)),
                ("lower_intercept".into(), Json::num(fit.lower_intercept)),
                ("bound_p1".into(), Json::num(fit.norm_ratio_bound(1.0)?)),
                ("bound_p2".into(), Json::num(fit.norm_ratio_bound(2.0)?)),
            ]));
        }
        CheckCmd::Schur(args) => {
            let (space, _, _) = args.source.or_zero_f().load(&args.weight, None)?;
            let w = Weight::parse_spec(&args.weight)?;
            let kernel = Kernel::moving_average(&space, args.radius)?;
            let probes: Vec<Vec<f64>> = (0..args.probes)
                .map(|k| {
                    space
                        .h
                        .iter()
                        .enumerate()
                        .map(|(i, hh)| {
                            ((i as f64 + 1.0) * (0.3 + 0.7 * k as f64)).sin() / (1.0 + hh)
                        })
                        .collect()
                })
                .collect();
            let rep = schur_test(&space, &kernel, &w, &probes)?;
            out.push(Json::Obj(vec![
                ("op".into(), Json::str("schur")),
                ("weight".into(), Json::str(&args.weight)),
                ("c1".into(), Json::num(rep.c1)),
                ("c2".into(), Json::num(rep.c2)),
                ("bounded".into(), Json::Bool(rep.bounded)),
                ("empirical_ratio".into(), Json::num(rep.empirical_ratio)),
                ("probes_used".into(), Json::Int(rep.probes_used as i64)),
            ]));
        }
        CheckCmd::Pullback(args) => {
            let (space_a, f, _) = args.source.load(&args.weight, None)?;
            let coords = space_a
                .coords
                .as_ref()
                .ok_or_else(|| Error::input("pullback check needs a grid source"))?;
            let xs: Vec<f64> = coords.iter().map(|c| c[0]).collect();
            let hb_expr = Expr::parse(&args.hb, &["x"])?;
            let hb: Vec<f64> = xs.iter().map(|x| hb_expr.eval(&[*x])).collect::<Result<_>>()?;
            let space_b = ExhaustedSpace::new(
                space_a.ids.clone(),
                hb,
                space_a.mu.clone(),
                space_a.coords.clone(),
                None,
            )?;
            let map: Vec<usize> = (0..space_a.len()).collect();
            let w = Weight::parse_spec(&args.weight)?;
            let star = match &args.star {
                None => None,
                Some(s) => {
                    let parts: Vec<&str> = s.split(',').collect();
                    if parts.len() != 2 {
                        return Err(Error::input(format!("--star must be A0,B0, got {s:?}")));
                    }
                    let a: f64 = parts[0]
                        .trim()
                        .parse()
                        .map_err(|_| Error::input(format!("bad A0: {:?}", parts[0])))?;
                    let b: f64 = parts[1]
                        .trim()
                        .parse()
                        .map_err(|_| Error::input(format!("bad B0: {:?}", parts[1])))?;
                    Some((a, b))
                }
            };
            let chk = pullback_check(&space_a, &space_b, &map, &f, &w, star)?;
            out.push(Json::Obj(vec![
                ("op".into(), Json::str("pullback")),
                ("weight".into(), Json::str(&args.weight)),
                ("a0".into(), Json::num(chk.a0)),
                ("b0".into(), Json::num(chk.b0)),
                ("constant".into(), Json::num(chk.constant)),
                ("lhs".into(), Json::num(chk.lhs)),
                ("rhs_sharp".into(), Json::num(chk.rhs_sharp)),
                ("rhs_bound".into(), Json::num(chk.rhs_bound)),
            ]));
        }
        CheckCmd::Volume(args) => {
            let (space, f, _) = args.source.or_zero_f().load(&args.weight, None)?;
            let ladder = parse_ladder(&args.ladder)?;
            let growth = fit_volume_growth(&space, &ladder)?;
            let ladder_json = growth
                .ladder
                .iter()
                .map(|(r, v)| {
                    Json::Obj(vec![
                        ("r".into(), Json::num(*r)),
                        ("v".into(), Json::num(*v)),
                    ])
                })
                .collect();
            out.push(Json::Obj(vec![
                ("op".into(), Json::str("volume")),
                ("gamma".into(), Json::num(growth.gamma)),
                ("c_fit".into(), Json::num(growth.c_fit)),
                ("ladder".into(), Json::Arr(ladder_json)),
            ]));
            out.table(
                &["R", "V"],
                growth.ladder.iter().map(|(r, v)| vec![*r, *v]).collect(),
            );
            if let Some(q) = args.lq {
                let w = Weight::parse_spec(&args.weight)?;
                let l = match parse_center(&args.l)? {
                    Centering::Fixed(l) => l,
                    Centering::Sharp => sharp_norm(&space, &f, &w)?.c_star,
                };
                let emb = lq_embedding_check(&space, &f, &w, l, q, &growth)?;
                out.push(Json::Obj(vec![
                    ("op".into(), Json::str("lq_embedding")),
                    ("p_times_q".into(), Json::num(emb.p_times_q)),
                    ("gamma".into(), Json::num(emb.gamma)),
                    ("exponent_ok".into(), Json::Bool(emb.exponent_ok)),
                    ("layered_sum".into(), Json::num(emb.layered_sum)),
                    ("layered_constant".into(), Json::num(emb.layered_constant)),
                    ("unweighted_lq".into(), Json::num(emb.unweighted_lq)),
                    ("sup_norm".into(), Json::num(emb.sup_norm)),
                    ("bound_ok".into(), Json::Bool(emb.bound_ok)),
                ]));
            }
        }
    }
    Ok(out)
}

fn scenario_centering(sc: &Scenario) -> Result<Centering> {
    match &sc.l {
        None => Ok(Centering::Sharp),
        Some(CenterSpec::Value(v)) => Ok(Centering::Fixed(*v)),
        Some(CenterSpec::Named(name)) if name == "sharp" => Ok(Centering::Sharp),
        Some(CenterSpec::Named(name)) => {
            Err(Error::input(format!("unknown centering {name:?}; use a number or \"sharp\"")))
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<(Output, PathBuf)> {
    let sc = load_scenario(&args.scenario)?;
    let base = args
        .scenario
        .parent()
        .map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    let realized = realize_scenario(&sc, &base)?;
    let weight_spec = sc.weight.clone().unwrap_or_else(|| "poly:p=1".to_string());
    let centering = scenario_centering(&sc)?;
    let mut out = Output::default();
    for op in &sc.ops {
        match (op, &realized) {
            (OpSpec::Norm { certify, tails }, Realized::Sample { space, f, .. }) => {
                let w = Weight::parse_spec(&weight_spec)?;
                let rep = match centering {
                    Centering::Sharp => sharp_norm(space, f, &w)?,
                    Centering::Fixed(l) => fixed_norm(space, f, &w, l)?,
                };
                out.push(norm_json(&rep));
                if *certify {
                    let cert = certificate(space, f, &w)?;
                    let atoms = cert
                        .atoms
                        .iter()
                        .map(|(id, mass)| {
                            Json::Obj(vec![
                                ("id".into(), Json::str(id.clone())),
                                ("mass".into(), Json::num(*mass)),
                            ])
                        })
                        .collect();
                    out.push(Json::Obj(vec![
                        ("op".into(), Json::str("certificate")),
                        ("atoms".into(), Json::Arr(atoms)),
                        (
                            "weighted_total_variation".into(),
                            Json::num(cert.weighted_total_variation),
                        ),
                        ("pairing".into(), Json::num(cert.pairing_value)),
                        ("sharp".into(), Json::num(cert.sharp)),
                    ]));
                }
                if *tails {
                    let est =
                        asymptotic_constant(space, f, &w, centering, ShellPolicy::default())?;
                    out.push(estimate_json("asymptotic", Some(&weight_spec), &est));
                }
            }
            (OpSpec::Rate { scale, tol }, Realized::Sample { space, f, .. }) => {
                let scale = parse_scale(scale)?;
                let cls = classify_rate(
                    space,
                    f,
                    scale,
                    centering,
                    tol.unwrap_or(0.01),
                    ShellPolicy::default(),
                )?;
                out.push(Json::Obj(vec![
                    ("op".into(), Json::str("rate")),
                    ("scale".into(), Json::str(cls.scale.as_str())),
                    ("param".into(), Json::str(cls.scale.param_name())),
                    ("critical".into(), Json::num(cls.critical)),
                    (
                        "bracket".into(),
                        Json::Arr(vec![Json::num(cls.bracket.0), Json::num(cls.bracket.1)]),
                    ),
                    ("iterations".into(), Json::Int(cls.iterations as i64)),
                    ("one_sided".into(), cls.one_sided.map_or(Json::Null, Json::str)),
                    ("constant_at_critical".into(), Json::opt_num(cls.constant_at_critical)),
                    ("constant_evaluated_at".into(), Json::opt_num(cls.constant_evaluated_at)),
                ]));
            }
            (OpSpec::Tails { ladder }, Realized::Sample { space, f, .. }) => {
                let w = Weight::parse_spec(&weight_spec)?;
                let tl = tail_ladder(space, f, &w, ladder)?;
                let entries = tl
                    .entries
                    .iter()
                    .map(|e| {
                        Json::Obj(vec![
                            ("r".into(), Json::num(e.r)),
                            ("tail".into(), Json::num(e.tail)),
                            ("local".into(), Json::num(e.local)),
                        ])
                    })
                    .collect();
                out.push(Json::Obj(vec![
                    ("op".into(), Json::str("tail_ladder")),
                    ("weight".into(), Json::str(&weight_spec)),
                    ("c_star".into(), Json::num(tl.c_star)),
                    ("sharp".into(), Json::num(tl.sharp)),
                    ("ladder".into(), Json::Arr(entries)),
                    ("monotone_tail".into(), Json::Bool(tl.monotone_tail)),
                    (
                        "limit_status".into(),
                        tl.limit_estimate
                            .as_ref()
                            .map_or(Json::Null, |e| Json::str(e.status.as_str())),
                    ),
                ]));
                out.table(
                    &["R", "T", "loc"],
                    tl.entries.iter().map(|e| vec![e.r, e.tail, e.local]).collect(),
                );
            }
            (OpSpec::Ends { window }, Realized::Graph(graph)) => {
                let rep = detect_graph_ends(graph, *window)?;
                out.push(ends_json(&rep));
            }
            (OpSpec::Ends { .. }, _) => {
                return Err(Error::input("the ends op needs a graph domain"));
            }
            (OpSpec::Aniso {}, Realized::Sample { space, f, dec, .. }) => {
                let dec = dec.as_ref().ok_or_else(|| {
                    Error::input("the aniso op needs a decomposition (dec path or inline ends)")
                })?;
                let sub = aniso_output(space, f, dec)?;
                out.runs.extend(sub.runs);
                out.tables.extend(sub.tables);
            }
            (_, Realized::Graph(_)) => {
                return Err(Error::input("graph domains only support the ends op"));
            }
        }
    }
    let out_path = match &args.out {
        Some(p) => p.clone(),
        None => {
            let p = Path::new(&sc.out);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        }
    };
    Ok((out, out_path))
}

fn emit(out: Output, path: Option<&Path>) -> Result<()> {
    let doc = report(out.runs);
    match path {
        Some(p) => {
            write_json(p, &doc)?;
            for (k, (header, rows)) in out.tables.iter().enumerate() {
                let headers: Vec<&str> = header.iter().map(String::as_str).collect();
                write_table(&sibling_csv_path(p, k + 1), &headers, rows)?;
            }
        }
        None => {
            print!("{}", doc.render());
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Norm(args) => emit(cmd_norm(args)?, args.out.as_deref()),
        Cmd::Rate(args) => emit(cmd_rate(args)?, args.out.as_deref()),
        Cmd::Tails(args) => emit(cmd_tails(args)?, args.out.as_deref()),
        Cmd::Ends(args) => emit(cmd_ends(args)?, args.out.as_deref()),
        Cmd::Aniso(args) => emit(cmd_aniso(args)?, args.out.as_deref()),
        Cmd::Check(cmd) => {
            let out_path = match cmd {
                CheckCmd::Admissibility(a) => a.out.clone(),
                CheckCmd::Affine(a) => a.out.clone(),
                CheckCmd::Schur(a) => a.out.clone(),
                CheckCmd::Pullback(a) => a.out.clone(),
                CheckCmd::Volume(a) => a.out.clone(),
            };
            emit(cmd_check(cmd)?, out_path.as_deref())
        }
        Cmd::Run(args) => {
            let (out, path) = cmd_run(args)?;
            emit(out, Some(&path))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string().replace('\n', "; ");
            eprintln!("error: kind=input msg={msg}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', "; ");
            eprintln!("error: kind={} msg={msg}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
