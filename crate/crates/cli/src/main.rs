use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use kazhdan_core::diffsets::{
    difference_set_for_order, search_exhaustive, singer_difference_set, verify_difference_set,
};
use kazhdan_core::graphs::{self, BipartiteGraph};
use kazhdan_core::pipeline::{self, CheckStatus, RunOptions, RunReport};
use kazhdan_core::polygons::{heisenberg_quadrangle_subgroups, kantor_check, recognize_polygon};
use kazhdan_core::presentations::{
    abelianization_invariants, assemble_complex_e, dihedral_reflection_subgroups, eliminate_z, emit_e_presentation,
    export_presentation, parse_plain, reflection_connection, relator_stats, swiatkowski_complex, verify_links_capped,
    ComplexOptions, RimGroups, DEFAULT_MAX_LINK_VERTICES, PAPER_PAIRING_P7,
};
use kazhdan_core::spectra::{normalized_laplacian_gap, property_t_report, DEFAULT_TOLERANCE};
use kazhdan_core::{DifferenceSet, Error, GroupElement, GroupSpec, Presentation, Subgroup};

#[derive(Parser)]
#[command(name = "kazhdan", version, about = "Certificates for an explicit hyperbolic Kazhdan group")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Links with more vertices than this are reported as skipped.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_LINK_VERTICES)]
    max_link_vertices: usize,
    /// Run independent checks concurrently.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every finite certificate for the p = 7 group (or another prime).
    VerifyPaper {
        #[arg(long, default_value_t = 7)]
        p: u64,
        /// Include wall time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Family member for a prime p, with searched or Singer difference set.
    Family {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        timing: bool,
    },
    #[command(subcommand)]
    Diffset(DiffsetCmd),
    #[command(subcommand)]
    Graph(GraphCmd),
    #[command(subcommand)]
    Polygon(PolygonCmd),
    #[command(subcommand)]
    Spectra(SpectraCmd),
    #[command(subcommand)]
    Present(PresentCmd),
    #[command(subcommand)]
    Links(LinksCmd),
    /// Complex of groups over the cone on a generalized polygon.
    Swiatkowski {
        /// heisenberg:P, plane:Q, or a graph JSON file.
        #[arg(long)]
        source: String,
        #[arg(long)]
        t: u64,
    },
}

#[derive(Subcommand)]
enum DiffsetCmd {
    Verify {
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',')]
        set: Vec<u64>,
    },
    Search {
        #[arg(long)]
        q: u64,
    },
    Singer {
        #[arg(long)]
        q: u64,
    },
}

#[derive(Args)]
struct GraphOutput {
    /// Print the certificate instead of the graph.
    #[arg(long)]
    cert: bool,
    /// Also write a DOT rendering to FILE.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Cayley graph; with --set the connection set is {t r^s : s in set} in dihedral(n).
    Cayley {
        #[arg(long)]
        group: Option<GroupSpec>,
        #[arg(long, value_delimiter = ',')]
        set: Vec<u64>,
        /// Elements as coordinate tuples, e.g. "1,0;1,17".
        #[arg(long)]
        connection: Option<String>,
        #[command(flatten)]
        output: GraphOutput,
    },
    /// Coset graph with respect to a family of subgroups.
    Coset {
        #[arg(long)]
        group: Option<GroupSpec>,
        /// `corollary` (Heisenberg quadrangle subgroups) or `reflections` (needs --set).
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',')]
        set: Vec<u64>,
        /// Subgroup generators: ';' between subgroups, '/' between generators.
        #[arg(long)]
        subgroups: Option<String>,
        #[command(flatten)]
        output: GraphOutput,
    },
    /// Link graph G/P ⊔ G/Q for P, Q generated by single elements.
    Link {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long = "p-gen")]
        p_gen: String,
        #[arg(long = "q-gen")]
        q_gen: String,
        #[command(flatten)]
        output: GraphOutput,
    },
    Cert {
        #[arg(long)]
        input: PathBuf,
    },
    Dot {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum PolygonCmd {
    Recognize {
        #[arg(long)]
        input: PathBuf,
    },
    Kantor {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long, default_value = "corollary")]
        family: String,
        #[arg(long)]
        subgroups: Option<String>,
    },
}

#[derive(Subcommand)]
enum SpectraCmd {
    Gap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    Verdict {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        numeric: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingChoice {
    Paper,
    Optimal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rim {
    Cyclic,
    Dihedral,
}

#[derive(Args)]
struct Source {
    #[arg(long, default_value_t = 7)]
    p: u64,
    /// Difference set file: residues separated by commas or whitespace, or JSON.
    #[arg(long)]
    delta: Option<PathBuf>,
    #[arg(long, value_enum)]
    pairing: Option<PairingChoice>,
    /// Read a plain-format presentation instead of emitting one.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PresentCmd {
    Emit {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "plain")]
        format: String,
    },
    EliminateZ {
        #[command(flatten)]
        source: Source,
    },
    Stats {
        #[command(flatten)]
        source: Source,
    },
    Abelianize {
        #[command(flatten)]
        source: Source,
    },
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "plain")]
        format: String,
    },
}

#[derive(Subcommand)]
enum LinksCmd {
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "cyclic")]
        rim: Rim,
    },
}

/// What a command produced: a JSON value, its text rendering, and whether every check passed.
struct Output {
    json: Value,
    text: String,
    passed: bool,
}

impl Output {
    fn data<T: Serialize>(value: &T, passed: bool) -> Result<Self> {
        let json = serde_json::to_value(value)?;
        let text = serde_json::to_string_pretty(&json)?;
        Ok(Output { json, text, passed })
    }

    fn text(text: String, json: Value) -> Self {
        Output { json, text, passed: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|out| emit(&cli, &out).map(|_| out.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Precondition(_)
            | Error::Parse(_)
            | Error::InvalidGroup(_)
            | Error::InvalidElement(_)
            | Error::InvalidSubgroup(_)
            | Error::InvalidConnectionSet(_)
            | Error::InvalidDifferenceSet(_)
            | Error::UnknownFormat(_),
        ) => 2,
        Some(_) => 1,
        None => 2,
    }
}

fn emit(cli: &Cli, out: &Output) -> Result<()> {
    let mut body = if cli.json { serde_json::to_string_pretty(&out.json)? } else { out.text.clone() };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<Output> {
    let options = RunOptions { max_link_vertices: cli.max_link_vertices, parallel: cli.parallel };
    match &cli.command {
        Command::VerifyPaper { p, timing } => {
            let start = Instant::now();
            let mut report = pipeline::verify_paper(*p, &options)?;
            if *timing {
                report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            report_output(&report)
        }
        Command::Family { p, timing } => {
            let start = Instant::now();
            let mut report = pipeline::family(*p, &options)?;
            if *timing {
                report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            report_output(&report)
        }
        Command::Diffset(cmd) => diffset(cmd),
        Command::Graph(cmd) => graph(cmd),
        Command::Polygon(cmd) => polygon(cmd),
        Command::Spectra(cmd) => spectra(cmd),
        Command::Present(cmd) => present(cmd),
        Command::Links(LinksCmd::Verify { source, rim }) => {
            let (p, ds, pairing) = resolve_source(source)?;
            let rim_groups = match rim {
                Rim::Cyclic => RimGroups::Cyclic,
                Rim::Dihedral => RimGroups::Dihedral,
            };
            let complex = assemble_complex_e(p, &ds, &pairing, &ComplexOptions { rim_groups, edge_permutation: None })?;
            let reports = verify_links_capped(&complex, cli.max_link_vertices)?;
            let passed = reports.iter().all(|r| r.satisfied || r.skipped);
            let text = reports
                .iter()
                .map(|r| {
                    let status = if r.skipped {
                        "SKIP"
                    } else if r.satisfied {
                        "PASS"
                    } else {
                        "FAIL"
                    };
                    let girth = r.certificate.as_ref().and_then(|c| c.girth);
                    format!(
                        "{status} {}: {} vertices, girth {} (needs {})",
                        r.vertex,
                        r.link_vertices,
                        girth.map_or("-".into(), |g| g.to_string()),
                        r.required_girth
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output { json: serde_json::to_value(&reports)?, text, passed })
        }
        Command::Swiatkowski { source, t } => {
            let l = swiatkowski_source(source)?;
            let complex = swiatkowski_complex(&l, *t)?;
            let passed = complex.all_links_satisfied();
            let mut out = Output::data(&complex, passed)?;
            out.text = format!(
                "generalized {}-gon of order {:?}; {} dihedral(t^2+t+1) vertices in class {}; {} of {} links have girth >= 12",
                complex.polygon.gonality,
                complex.polygon.order,
                complex.links.len(),
                complex.dihedral_class,
                complex.links.iter().filter(|l| l.satisfied).count(),
                complex.links.len()
            );
            Ok(out)
        }
    }
}

fn report_output(report: &RunReport) -> Result<Output> {
    let mut lines = vec![format!(
        "{} {}",
        report.command,
        report.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    )];
    for w in &report.warnings {
        lines.push(format!("warning: {w}"));
    }
    for c in &report.checks {
        let status = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        };
        match c.status {
            CheckStatus::Fail => {
                lines.push(format!("{status} {}: expected {}; observed {}", c.name, c.expected, c.observed))
            }
            _ => lines.push(format!("{status} {}: {}", c.name, c.observed)),
        }
    }
    if let Some(ms) = report.wall_time_ms {
        lines.push(format!("wall time: {ms} ms"));
    }
    let failed = report.failures().count();
    lines.push(if failed == 0 { "all checks passed".into() } else { format!("{failed} check(s) failed") });
    Ok(Output { json: serde_json::to_value(report)?, text: lines.join("\n"), passed: report.passed() })
}

fn diffset(cmd: &DiffsetCmd) -> Result<Output> {
    match cmd {
        DiffsetCmd::Verify { n, set } => {
            let cert = verify_difference_set(*n, set);
            let mut out = Output::data(&cert, cert.valid)?;
            out.text = cert.summary();
            Ok(out)
        }
        DiffsetCmd::Search { q } => {
            let outcome = search_exhaustive(*q)?;
            let found = outcome.found.is_some();
            Output::data(&outcome, found)
        }
        DiffsetCmd::Singer { q } => Output::data(&singer_difference_set(*q)?, true),
    }
}

fn parse_coords(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| Error::Parse(format!("coordinate {c:?}: {e}")).into()))
        .collect()
}

fn parse_element(spec: &GroupSpec, s: &str) -> Result<GroupElement> {
    Ok(spec.element_signed(&parse_coords(s)?)?)
}

fn parse_subgroups(spec: &GroupSpec, s: &str) -> Result<Vec<Subgroup>> {
    s.split(';')
        .map(|sub| {
            let gens = sub.split('/').map(|g| parse_element(spec, g)).collect::<Result<Vec<_>>>()?;
            Ok(spec.subgroup_closure(&gens)?)
        })
        .collect()
}

fn dihedral_from_set(group: Option<&GroupSpec>, set: &[u64]) -> Result<(GroupSpec, DifferenceSet)> {
    let n = match group {
        Some(GroupSpec::Dihedral(n)) => *n,
        Some(other) => return Err(Error::Precondition(format!("--set needs a dihedral group, got {other}")).into()),
        None => {
            let q = set.len() as u64 - 1;
            q * q + q + 1
        }
    };
    Ok((GroupSpec::dihedral(n)?, DifferenceSet::new(n, set)?))
}

fn graph(cmd: &GraphCmd) -> Result<Output> {
    match cmd {
        GraphCmd::Cayley { group, set, connection, output } => {
            let (spec, conn) = match (connection, set.is_empty()) {
                (Some(c), _) => {
                    let spec = (*group).ok_or_else(|| Error::Precondition("--connection needs --group".into()))?;
                    let conn = c.split(';').map(|e| parse_element(&spec, e)).collect::<Result<Vec<_>>>()?;
                    (spec, conn)
                }
                (None, false) => {
                    let (spec, ds) = dihedral_from_set(group.as_ref(), set)?;
                    let conn = reflection_connection(&spec, &ds)?;
                    (spec, conn)
                }
                (None, true) => bail!(Error::Precondition("give --set or --connection".into())),
            };
            graph_output(&graphs::cayley_graph(&spec, &conn)?, output)
        }
        GraphCmd::Coset { group, family, set, subgroups, output } => {
            let (spec, subs) = match (family.as_deref(), subgroups) {
                (_, Some(s)) => {
                    let spec = (*group).ok_or_else(|| Error::Precondition("--subgroups needs --group".into()))?;
                    let subs = parse_subgroups(&spec, s)?;
                    (spec, subs)
                }
                (Some("corollary"), None) => match group {
                    Some(GroupSpec::Heisenberg(p)) => {
                        (GroupSpec::heisenberg(*p)?, heisenberg_quadrangle_subgroups(*p)?)
                    }
                    _ => bail!(Error::Precondition("--family corollary needs --group heisenberg:P".into())),
                },
                (Some("reflections"), None) | (None, None) if !set.is_empty() => {
                    let (spec, ds) = dihedral_from_set(group.as_ref(), set)?;
                    let subs = dihedral_reflection_subgroups(&spec, &ds)?;
                    (spec, subs)
                }
                (Some(other), None) => bail!(Error::Precondition(format!("unknown subgroup family {other:?}"))),
                (None, None) => bail!(Error::Precondition("give --family, --set or --subgroups".into())),
            };
            graph_output(&graphs::coset_graph(&spec, &subs)?, output)
        }
        GraphCmd::Link { group, p_gen, q_gen, output } => {
            let p = group.subgroup_closure(&[parse_element(group, p_gen)?])?;
            let q = group.subgroup_closure(&[parse_element(group, q_gen)?])?;
            graph_output(&graphs::link_graph(group, &p, &q)?, output)
        }
        GraphCmd::Cert { input } => {
            let cert = graphs::certificate(&read_graph(input)?);
            Output::data(&cert, true)
        }
        GraphCmd::Dot { input } => {
            let dot = graphs::export_dot(&read_graph(input)?);
            Ok(Output::text(dot.clone(), Value::String(dot)))
        }
    }
}

fn graph_output(graph: &BipartiteGraph, output: &GraphOutput) -> Result<Output> {
    if let Some(path) = &output.dot {
        std::fs::write(path, graphs::export_dot(graph)).with_context(|| format!("writing {}", path.display()))?;
    }
    if output.cert {
        Output::data(&graphs::certificate(graph), true)
    } else {
        Output::data(graph, true)
    }
}

fn read_graph(path: &Path) -> Result<BipartiteGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let graph: BipartiteGraph =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    graph.validate()?;
    Ok(graph)
}

fn polygon(cmd: &PolygonCmd) -> Result<Output> {
    match cmd {
        PolygonCmd::Recognize { input } => match recognize_polygon(&read_graph(input)?) {
            Ok(cert) => Output::data(&cert, true),
            Err(rejection) => Output::data(&json!({ "rejected": rejection }), false),
        },
        PolygonCmd::Kantor { group, family, subgroups } => {
            let subs = match (subgroups, family.as_str(), group) {
                (Some(s), _, _) => parse_subgroups(group, s)?,
                (None, "corollary", GroupSpec::Heisenberg(p)) => heisenberg_quadrangle_subgroups(*p)?,
                _ => bail!(Error::Precondition("--family corollary needs a heisenberg group".into())),
            };
            let report = kantor_check(group, &subs)?;
            let passed = report.pairwise_trivial && report.triple_trivial && report.count_matches == Some(true);
            Output::data(&report, passed)
        }
    }
}

fn spectra(cmd: &SpectraCmd) -> Result<Output> {
    match cmd {
        SpectraCmd::Gap { input, tol } => {
            let name = input.display().to_string();
            Output::data(&normalized_laplacian_gap(&read_graph(input)?, &name, *tol)?, true)
        }
        SpectraCmd::Verdict { p, numeric } => {
            let verdict = property_t_report(*p, *numeric)?;
            Output::data(&verdict, true)
        }
    }
}

fn read_delta(path: &Path) -> Result<DifferenceSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(ds) = serde_json::from_str::<DifferenceSet>(&text) {
        return Ok(DifferenceSet::new(ds.modulus(), ds.residues())?);
    }
    let residues = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|e| anyhow!(Error::Parse(format!("residue {s:?}: {e}")))))
        .collect::<Result<Vec<_>>>()?;
    if residues.len() < 2 {
        bail!(Error::InvalidDifferenceSet("need at least two residues".into()));
    }
    let q = residues.len() as u64 - 1;
    Ok(DifferenceSet::new(q * q + q + 1, &residues)?)
}

fn resolve_source(source: &Source) -> Result<(u64, DifferenceSet, Vec<usize>)> {
    let p = source.p;
    let ds = match &source.delta {
        Some(path) => read_delta(path)?,
        None if p == 7 => DifferenceSet::mod_73(),
        None => difference_set_for_order(p + 1)?,
    };
    let default_paper = p == 7 && source.delta.is_none();
    let pairing = match source.pairing {
        Some(PairingChoice::Paper) => {
            if p != 7 {
                bail!(Error::Precondition("the published pairing exists only for p = 7".into()));
            }
            PAPER_PAIRING_P7.to_vec()
        }
        None if default_paper => PAPER_PAIRING_P7.to_vec(),
        _ => pipeline::optimal_pairing(p, &ds)?,
    };
    Ok((p, ds, pairing))
}

fn load_presentation(source: &Source) -> Result<Presentation> {
    match &source.input {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(parse_plain(&text)?)
        }
        None => {
            let (p, ds, pairing) = resolve_source(source)?;
            Ok(emit_e_presentation(p, &ds, &pairing)?)
        }
    }
}

fn presentation_output(pres: &Presentation, format: &str) -> Result<Output> {
    let json = serde_json::to_value(pres)?;
    if format == "json" {
        return Output::data(pres, true);
    }
    Ok(Output::text(export_presentation(pres, format)?, json))
}

fn present(cmd: &PresentCmd) -> Result<Output> {
    match cmd {
        PresentCmd::Emit { source, format } | PresentCmd::Export { source, format } => {
            presentation_output(&load_presentation(source)?, format)
        }
        PresentCmd::EliminateZ { source } => presentation_output(&eliminate_z(&load_presentation(source)?)?, "plain"),
        PresentCmd::Stats { source } => {
            let stats = relator_stats(&load_presentation(source)?);
            let mut out = Output::data(&stats, true)?;
            out.text =
                format!("{} relators, max length {}, total length {}", stats.lengths.len(), stats.max, stats.total);
            Ok(out)
        }
        PresentCmd::Abelianize { source } => {
            let inv = abelianization_invariants(&load_presentation(source)?);
            let order = inv.order();
            let json = json!({
                "invariant_factors": inv.invariant_factors,
                "finite": inv.is_finite(),
                "order": order.map(|o| o.to_string()),
            });
            let text = match order {
                Some(o) => format!("finite of order {o}; invariant factors {:?}", inv.invariant_factors),
                None => format!("infinite; invariant factors {:?}", inv.invariant_factors),
            };
            Ok(Output::text(text, json))
        }
    }
}

fn swiatkowski_source(source: &str) -> Result<BipartiteGraph> {
    if let Some((kind, param)) = source.split_once(':') {
        let param: u64 = match param.parse() {
            Ok(v) => v,
            Err(_) => return read_graph(Path::new(source)),
        };
        match kind {
            "heisenberg" => {
                let h = GroupSpec::heisenberg(param)?;
                return Ok(graphs::coset_graph(&h, &heisenberg_quadrangle_subgroups(param)?)?);
            }
            "plane" => {
                let ds = difference_set_for_order(param)?;
                let d = GroupSpec::dihedral(ds.modulus())?;
                return Ok(graphs::cayley_graph(&d, &reflection_connection(&d, &ds)?)?);
            }
            _ => {}
        }
    }
    read_graph(Path::new(source))
}
