//! `epc`: project, mine, classify, generate synthetic sets, reproduce the
//! benchmark experiments, or serve the workbench.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use epc_core::data::{generate_synthetic, load_csv, to_csv, LabelColumn, LoadOptions, PaddingPolicy, SyntheticFamily};
use epc_core::geometry::{EllipseSpec, LayoutMode};
use epc_core::pipeline::{
    classify_raw, layout_config, load_and_prepare, mine_document, parse_ellipse, parse_weights, project, to_json,
    PrepareOptions, Projection,
};
use epc_core::recipes::{recipe, RECIPE_NAMES};
use epc_core::rules::{MatchMode, MiningParams, RulesDocument, Target};
use epc_core::scene::{build_scene, to_svg, SceneOptions};
use epc_core::{DataError, Error, RulesError, SceneError};

#[derive(Parser, Debug)]
#[command(name = "epc", version, about = "Elliptic paired coordinates and dominance rules")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a dataset as SVG or scene JSON.
    Project {
        csv: PathBuf,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        geometry: Geometry,
        /// .svg or .json
        #[arg(long)]
        out: PathBuf,
    },
    /// Mine dominance rectangles into rules.json.
    Mine {
        csv: PathBuf,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        geometry: Geometry,
        #[arg(long, value_parser = parse_mode)]
        mode: MatchMode,
        #[arg(long)]
        rect_w: f64,
        #[arg(long)]
        rect_h: f64,
        #[arg(long)]
        stride: f64,
        #[arg(long, default_value_t = 0.10)]
        min_coverage: f64,
        #[arg(long, default_value_t = 0.90)]
        min_precision: f64,
        #[arg(long, conflicts_with = "fixed_class")]
        one_vs_rest: Option<String>,
        /// Accept only rules predicting this class.
        #[arg(long)]
        fixed_class: Option<String>,
        #[arg(long)]
        max_rules: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply rules.json to a dataset and write report.json.
    Classify {
        csv: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        /// Overrides the label column stored with the rules.
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        no_header: bool,
        /// Printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic dataset: A, B, C or S4.
    Synth {
        #[arg(value_parser = parse_family)]
        family: SyntheticFamily,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rerun a benchmark experiment against local data files.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(RECIPE_NAMES))]
        name: String,
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API and, optionally, the UI.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        ui_assets: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Label column: name, 0-based index, or the last column by default.
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    no_header: bool,
    /// Take values as already on [0, 1].
    #[arg(long)]
    no_normalize: bool,
    /// dup | const:<v> | none
    #[arg(long, default_value = "dup")]
    pad: String,
}

#[derive(Args, Debug)]
struct Geometry {
    #[arg(long, default_value = "seq", value_parser = parse_layout)]
    layout: LayoutMode,
    #[arg(long)]
    weights: Option<String>,
    /// cx,cy,W,H
    #[arg(long, allow_hyphen_values = true)]
    ellipse: Option<String>,
}

fn parse_mode(s: &str) -> Result<MatchMode, String> {
    MatchMode::parse(s).ok_or_else(|| format!("'{s}' is not point or intersect"))
}

fn parse_layout(s: &str) -> Result<LayoutMode, String> {
    LayoutMode::parse(s).ok_or_else(|| format!("'{s}' is not seq, mirror or dynamic"))
}

fn parse_family(s: &str) -> Result<SyntheticFamily, String> {
    SyntheticFamily::parse(s).ok_or_else(|| format!("'{s}' is not A, B, C or S4"))
}

/// Failure with its exit code.
#[derive(Debug)]
enum Fail {
    Usage(String),
    Data(String),
    Geometry(String),
    Missed,
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Usage(_) => 1,
            Fail::Data(_) => 2,
            Fail::Geometry(_) => 3,
            Fail::Missed => 4,
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Geometry(_) | Error::Rules(RulesError::Geometry(_)) | Error::Scene(SceneError::Geometry(_)) => {
                Fail::Geometry(msg)
            }
            Error::Rules(RulesError::InvalidParams(_) | RulesError::InvalidRect(_)) => Fail::Usage(msg),
            Error::Scene(SceneError::SelectedCase { .. }) => Fail::Usage(msg),
            _ => Fail::Data(msg),
        }
    }
}

impl From<DataError> for Fail {
    fn from(e: DataError) -> Self {
        Error::from(e).into()
    }
}

impl From<RulesError> for Fail {
    fn from(e: RulesError) -> Self {
        Error::from(e).into()
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Fail> {
    std::fs::read(path).map_err(|e| Fail::Data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    std::fs::write(path, text).map_err(|e| Fail::Data(format!("{}: {e}", path.display())))
}

fn load_options(label: Option<&str>, no_header: bool) -> LoadOptions {
    LoadOptions { label: label.map(LabelColumn::parse).unwrap_or_default(), header: !no_header, skip_incomplete: false }
}

fn projection(csv: &Path, input: &Input, geometry: &Geometry) -> Result<(Projection, PaddingPolicy), Fail> {
    let padding = PaddingPolicy::parse(&input.pad).map_err(|e| Fail::Usage(e.to_string()))?;
    let weights = geometry.weights.as_deref().map(parse_weights).transpose().map_err(|e| Fail::Usage(e.to_string()))?;
    let ellipse = match &geometry.ellipse {
        Some(e) => parse_ellipse(e).map_err(|e| match e {
            Error::Geometry(_) => Fail::from(e),
            other => Fail::Usage(other.to_string()),
        })?,
        None => EllipseSpec::unit(),
    };
    let opts = PrepareOptions {
        load: load_options(input.label.as_deref(), input.no_header),
        padding,
        normalize: !input.no_normalize,
    };
    let (_, data) = load_and_prepare(&read(csv)?, &opts)?;
    let config = layout_config(geometry.layout, data.n(), weights);
    Ok((project(data, config, ellipse)?, padding))
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Command::Project { csv, input, geometry, out } => {
            let (proj, _) = projection(&csv, &input, &geometry)?;
            let ext = out.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
            if ext != "svg" && ext != "json" {
                return Err(Fail::Usage(format!("--out must end in .svg or .json: {}", out.display())));
            }
            let opts = SceneOptions { labels: proj.data.columns.clone(), ..Default::default() };
            let e = &proj.embedded;
            let scene = build_scene(&proj.layout, &e.graphs, &e.classes, &[], &opts).map_err(Error::from)?;
            let text = if ext == "svg" { to_svg(&scene) } else { to_json(&scene) };
            write(&out, &text)?;
            println!("{} cases, {} nodes each -> {}", e.graphs.len(), proj.layout.pairs(), out.display());
        }
        Command::Mine {
            csv,
            input,
            geometry,
            mode,
            rect_w,
            rect_h,
            stride,
            min_coverage,
            min_precision,
            one_vs_rest,
            fixed_class,
            max_rules,
            out,
        } => {
            let (proj, padding) = projection(&csv, &input, &geometry)?;
            let target = match (one_vs_rest, fixed_class) {
                (Some(c), _) => Target::OneVsRest(c),
                (_, Some(c)) => Target::FixedClass(c),
                _ => Target::Multiclass,
            };
            let params = MiningParams { min_coverage, min_precision, target, max_rules, ..MiningParams::new(mode, rect_w, rect_h, stride) };
            let doc = mine_document(&proj, &params, padding, input.label.clone())?;
            write(&out, &to_json(&doc))?;
            println!("{} rules -> {}", doc.rules.len(), out.display());
        }
        Command::Classify { csv, rules, label, no_header, out } => {
            let doc: RulesDocument =
                serde_json::from_slice(&read(&rules)?).map_err(|e| Fail::Data(format!("{}: {e}", rules.display())))?;
            let label = label.or_else(|| doc.label_column.clone());
            let raw = load_csv(&read(&csv)?, &load_options(label.as_deref(), no_header))?;
            let report = classify_raw(&raw, &doc)?.report;
            let text = to_json(&report);
            match out {
                Some(p) => {
                    write(&p, &text)?;
                    let t = &report.totals;
                    println!(
                        "{} cases, recall {:.2}%, precision {:.2}% -> {}",
                        t.cases,
                        t.recall_pct,
                        t.weighted_precision_pct,
                        p.display()
                    );
                }
                None => print!("{text}"),
            }
        }
        Command::Synth { family, out } => {
            let ds = generate_synthetic(family);
            write(&out, &to_csv(&ds, "class"))?;
            println!("{} points -> {}", ds.len(), out.display());
        }
        Command::Reproduce { name, data_dir, out } => {
            let r = recipe(&name).ok_or_else(|| Fail::Usage(format!("unknown recipe '{name}'")))?;
            let rep = r.run(&data_dir)?;
            println!("{}: {} cases, {} columns", rep.recipe, rep.cases, rep.n);
            for x in &rep.experiments {
                let (p, a) = (&x.paper, &x.achieved);
                println!(
                    "  {:<28} paper {:>2} rules {:>6.2}% / {:>6.2}%   achieved {:>2} rules {:>6.2}% / {:>6.2}%   {} ({}, {}, {}x{})",
                    p.experiment,
                    p.rules,
                    p.recall_pct,
                    p.precision_pct,
                    a.rules,
                    a.recall_pct,
                    a.precision_pct,
                    if x.passed { "PASS" } else { "MISS" },
                    x.layout.as_str(),
                    x.params.mode.as_str(),
                    x.params.rect_w,
                    x.params.rect_h
                );
            }
            if let Some(p) = out {
                write(&p, &to_json(&rep))?;
            }
            if !rep.passed {
                return Err(Fail::Missed);
            }
        }
        Command::Serve { port, host, ui_assets } => {
            let addr: SocketAddr =
                format!("{host}:{port}").parse().map_err(|_| Fail::Usage(format!("bad address {host}:{port}")))?;
            println!("serving on http://{addr}");
            epc_service::serve_blocking(addr, ui_assets).map_err(|e| Fail::Data(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Fail::Usage(m) | Fail::Data(m) | Fail::Geometry(m) => eprintln!("error: {m}"),
                Fail::Missed => eprintln!("reproduction targets missed"),
            }
            ExitCode::from(f.code())
        }
    }
}
