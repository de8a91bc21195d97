use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use splicemult::lattice::DEFAULT_GROUP_CAP;
use splicemult::monomial::DEFAULT_SEARCH_CAP;
use splicemult::{
    base_point_set, discriminant_group, dual_cycles, monomial_condition, multiplicity_of_quotient,
    neumann_wahl_system, run_pipeline, subgroup, subgroup_table, universal_abelian_cover, Error,
    Mode, PipelineConfig, ResolutionGraph, SubgroupDocument, VertexId,
};

const MAX_BOX_VAR: &str = "SPLICEMULT_MAX_BOX";

#[derive(Parser)]
#[command(
    name = "splicemult",
    version,
    about = "Multiplicities of abelian covers of splice quotient singularities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a graph is a minimal good resolution graph satisfying the monomial condition
    Validate {
        graph: PathBuf,
        #[arg(long)]
        allow_non_minimal: bool,
    },
    /// Dual cycles, discriminant group and base points
    Invariants {
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Multiplicity of X^u/H1
    Mult(MultArgs),
    /// Multiplicity for every subgroup of H
    Table {
        graph: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Optimized)]
        mode: ModeArg,
        #[arg(long)]
        allow_non_minimal: bool,
    },
    /// Neumann-Wahl equation skeletons
    SpliceEqs { graph: PathBuf },
}

#[derive(Args)]
struct MultArgs {
    graph: PathBuf,
    #[command(flatten)]
    source: SubgroupSource,
    #[arg(long, value_enum, default_value_t = ModeArg::Optimized)]
    mode: ModeArg,
    /// Print every round
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    allow_non_minimal: bool,
    #[arg(long, default_value_t = 64)]
    max_blowups: usize,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SubgroupSource {
    /// JSON file with dual-coordinate generators of H1
    #[arg(long, value_name = "FILE")]
    subgroup: Option<PathBuf>,
    /// H1 = {0}
    #[arg(long)]
    uac: bool,
    /// H1 = H
    #[arg(long)]
    quotient: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Optimized,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Optimized => Mode::Optimized,
        }
    }
}

#[allow(non_snake_case)]
#[derive(Serialize, Deserialize)]
struct InvariantsReport {
    vertices: Vec<VertexId>,
    ends: Vec<VertexId>,
    nodes: Vec<VertexId>,
    det: u64,
    H_invariant_factors: Vec<u64>,
    H_generators: Vec<String>,
    base_point_set: Vec<VertexId>,
    /// `duals[v][w]` is the coefficient of `E_w` in `E_v*`
    duals: BTreeMap<VertexId, BTreeMap<VertexId, String>>,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<ResolutionGraph, Error> {
    ResolutionGraph::from_json(&read(path)?)
}

fn config(mode: Mode, allow_non_minimal: bool) -> Result<PipelineConfig, Error> {
    let mut cfg = PipelineConfig {
        mode,
        allow_non_minimal,
        ..PipelineConfig::default()
    };
    if let Ok(v) = std::env::var(MAX_BOX_VAR) {
        cfg.box_cap = v
            .trim()
            .parse()
            .ok()
            .filter(|&n: &u64| n > 0)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "{MAX_BOX_VAR} must be a positive integer, got {v:?}"
                ))
            })?;
    }
    Ok(cfg)
}

fn to_u64(x: &num_bigint::BigInt) -> Result<u64, Error> {
    x.to_u64()
        .ok_or_else(|| Error::Parse(format!("{x} does not fit in 64 bits")))
}

fn validate(path: &Path, allow_non_minimal: bool) -> Result<(), Error> {
    let g = load_graph(path)?;
    if let Err(e) = g.check_minimal() {
        if !allow_non_minimal {
            return Err(e);
        }
        println!("warning: {e}");
    }
    let basis = dual_cycles(&g)?;
    let report = monomial_condition(&g, &basis, DEFAULT_SEARCH_CAP)?;
    let failures: Vec<_> = report.failures().collect();
    if let Some(first) = failures.first() {
        for f in &failures {
            println!(
                "node {}, branch {:?}: no admissible monomial",
                f.node, f.branch
            );
        }
        return Err(Error::MonomialConditionFails {
            node: first.node,
            branch_root: first.branch[0],
        });
    }
    let h = discriminant_group(&g, &basis)?;
    println!(
        "ok: {} vertices, {} ends, {} nodes, |H| = {}",
        g.len(),
        g.ends().len(),
        g.nodes().len(),
        h.order()
    );
    Ok(())
}

fn invariants(path: &Path, json: bool) -> Result<(), Error> {
    let g = load_graph(path)?;
    let basis = dual_cycles(&g)?;
    let h = discriminant_group(&g, &basis)?;
    let generators = h
        .standard_generators()
        .iter()
        .map(|v| {
            match h
                .code_of(v)
                .and_then(|c| h.describe_code(c, DEFAULT_GROUP_CAP))
            {
                Ok(s) => s,
                Err(_) => format!("{v:?}"),
            }
        })
        .collect();
    let mut duals = BTreeMap::new();
    for &v in g.ids() {
        let d = basis.dual(v)?;
        duals.insert(
            v,
            g.ids()
                .iter()
                .zip(d.coefficients())
                .map(|(&w, c)| (w, c.to_string()))
                .collect(),
        );
    }
    let report = InvariantsReport {
        vertices: g.ids().to_vec(),
        ends: g.ends(),
        nodes: g.nodes(),
        det: to_u64(h.order())?,
        H_invariant_factors: h
            .invariant_factors()
            .iter()
            .map(to_u64)
            .collect::<Result<_, _>>()?,
        H_generators: generators,
        base_point_set: base_point_set(&g, &basis)?.into_iter().collect(),
        duals,
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        );
        return Ok(());
    }
    println!("vertices: {:?}", report.vertices);
    println!("ends: {:?}", report.ends);
    println!("nodes: {:?}", report.nodes);
    for (v, row) in &report.duals {
        let entries: Vec<&str> = row.values().map(String::as_str).collect();
        println!("E{v}* = ({})", entries.join(", "));
    }
    println!("|H| = {}", report.det);
    println!("invariant factors: {:?}", report.H_invariant_factors);
    println!("generators: {}", report.H_generators.join(", "));
    println!("base points at ends: {:?}", report.base_point_set);
    Ok(())
}

fn mult(args: &MultArgs) -> Result<(), Error> {
    let g = load_graph(&args.graph)?;
    let mut cfg = config(args.mode.into(), args.allow_non_minimal)?;
    cfg.max_blowups = args.max_blowups;
    let report = if args.source.uac {
        universal_abelian_cover(&g, &cfg)?
    } else if args.source.quotient {
        multiplicity_of_quotient(&g, &cfg)?
    } else {
        let path = args
            .source
            .subgroup
            .as_ref()
            .expect("clap enforces one source");
        let doc = SubgroupDocument::from_json(&read(path)?)?;
        let h = discriminant_group(&g, &dual_cycles(&g)?)?;
        let h1 = subgroup(&doc.vectors(&g)?, &h, cfg.group_cap)?;
        run_pipeline(&g, &h1, &cfg)?
    };
    if args.json {
        println!("{}", report.to_json());
        return Ok(());
    }
    if args.trace {
        for line in &report.trace {
            println!("{line}");
        }
    }
    if report.non_minimal {
        println!("note: input graph is not minimal");
    }
    println!("multiplicity: {}", report.multiplicity);
    Ok(())
}

fn table(path: &Path, json: bool, mode: Mode, allow_non_minimal: bool) -> Result<(), Error> {
    let g = load_graph(path)?;
    let rows = subgroup_table(&g, &config(mode, allow_non_minimal)?)?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&rows).expect("serializable")
        );
        return Ok(());
    }
    let group = |gens: &[String]| {
        if gens.is_empty() {
            "{0}".to_string()
        } else {
            format!("<{}>", gens.join(", "))
        }
    };
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            [
                group(&r.generators),
                group(&r.flat_generators),
                r.order.to_string(),
                r.z.clone(),
                r.multiplicity.to_string(),
            ]
        })
        .collect();
    let header = ["H1", "H1^flat", "|H1|", "Z", "mult"].map(String::from);
    let widths: Vec<usize> = (0..5)
        .map(|i| {
            cells
                .iter()
                .chain([&header])
                .map(|c| c[i].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    for row in std::iter::once(&header).chain(&cells) {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        println!("{}", line.join(" | ").trim_end());
    }
    Ok(())
}

fn splice_eqs(path: &Path) -> Result<(), Error> {
    let g = load_graph(path)?;
    for node in neumann_wahl_system(&g, &dual_cycles(&g)?, DEFAULT_SEARCH_CAP)? {
        println!("{node}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate {
            graph,
            allow_non_minimal,
        } => validate(graph, *allow_non_minimal),
        Command::Invariants { graph, json } => invariants(graph, *json),
        Command::Mult(args) => mult(args),
        Command::Table {
            graph,
            json,
            mode,
            allow_non_minimal,
        } => table(graph, *json, (*mode).into(), *allow_non_minimal),
        Command::SpliceEqs { graph } => splice_eqs(graph),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
