//! Command-line interface: `check`, `render` and `compile` subcommands.
//!
//! Diagnostics go to standard error; payload goes to standard output or the
//! `-o` path. Exit codes: 0 success, 1 usage or I/O error, 2 parse error,
//! 3 type error, 4 semantics error.

use crate::layout::{layout, layout_naive, LayoutOptions, LeafWidth};
use crate::render::{to_json, to_svg, to_tikz, RenderStyle};
use crate::semantics::{eval_matrix, matrix_to_json, parse_assignment};
use crate::term::{parse_file, typecheck, Document, ParseError, Term, TermDef, TypeError};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_TYPE: i32 = 3;
pub const EXIT_SEMANTICS: i32 = 4;

/// Environment variable naming a JSON style file with the same keys as
/// [`RenderStyle`] (kebab-case). Command-line flags override it.
pub const STYLE_ENV_VAR: &str = "TRAPDIAG_STYLE";

#[derive(Parser, Debug)]
#[command(
    name = "trapdiag",
    version,
    about = "Compile monoidal terms to string diagrams and matrix values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and typecheck every term, printing `name : l -> r` lines
    Check {
        /// Input `.sd` file
        input: PathBuf,
    },
    /// Lay out one term and write it as SVG, TikZ or JSON
    Render {
        /// Input `.sd` file
        input: PathBuf,
        /// Output format
        #[arg(short, long, value_enum)]
        format: Format,
        /// Output path; standard output when omitted
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Which term to render
        #[arg(long, default_value = "main")]
        term: String,
        /// Layout algorithm
        #[arg(long, value_enum, default_value_t = LayoutModeArg::Trapezoid)]
        layout: LayoutModeArg,
        /// Pixels per diagram unit (SVG)
        #[arg(long)]
        scale: Option<f64>,
        /// Stroke width for wires and boxes
        #[arg(long)]
        stroke_width: Option<f64>,
        /// Label font size
        #[arg(long)]
        font_size: Option<f64>,
        /// Draw the outline and BSP seams dashed
        #[arg(long)]
        show_outline: bool,
        /// Width of identity diagrams
        #[arg(long)]
        id_width: Option<f64>,
        /// Leaf width mode: `max` or `fixed:<width>`
        #[arg(long)]
        leaf_width: Option<String>,
    },
    /// Evaluate one term in the matrix backend and write the matrix as JSON
    Compile {
        /// Input `.sd` file
        input: PathBuf,
        /// JSON file assigning a matrix to every generator
        #[arg(long)]
        semantics: PathBuf,
        /// Output path; standard output when omitted
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Which term to compile
        #[arg(long, default_value = "main")]
        term: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Svg,
    Tikz,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LayoutModeArg {
    /// Right-trapezoid layout with aligned seams
    Trapezoid,
    /// Unit-square layout without pinching, for comparison
    Naive,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot {action} {path}: {source}")]
    Io {
        action: &'static str,
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("in term `{term}` (declared at {path}:{line}): {source}")]
    Type {
        path: PathBuf,
        term: String,
        line: usize,
        source: TypeError,
    },
    #[error("{count} term(s) failed to typecheck")]
    CheckFailed { count: usize },
    #[error("semantics file {path}: {detail}")]
    Semantics { path: PathBuf, detail: String },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Type { .. } | CliError::CheckFailed { .. } => EXIT_TYPE,
            CliError::Semantics { .. } => EXIT_SEMANTICS,
        }
    }
}

/// Runs the CLI on the given arguments and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{err}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Check { input } => cmd_check(&input),
        Command::Render {
            input,
            format,
            output,
            term,
            layout,
            scale,
            stroke_width,
            font_size,
            show_outline,
            id_width,
            leaf_width,
        } => cmd_render(RenderArgs {
            input,
            format,
            output,
            term,
            layout,
            scale,
            stroke_width,
            font_size,
            show_outline,
            id_width,
            leaf_width,
        }),
        Command::Compile {
            input,
            semantics,
            output,
            term,
        } => cmd_compile(&input, &semantics, output.as_deref(), &term),
    }
}

fn read_input(path: &Path) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        action: "read",
        path: path.to_path_buf(),
        source,
    })?;
    parse_file(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn typecheck_def(doc: &Document, def: &TermDef, path: &Path) -> Result<Term, CliError> {
    typecheck(&def.term, &doc.signature).map_err(|source| CliError::Type {
        path: path.to_path_buf(),
        term: def.name.clone(),
        line: def.line,
        source,
    })
}

fn lookup_term<'a>(doc: &'a Document, name: &str, path: &Path) -> Result<&'a TermDef, CliError> {
    doc.term_def(name).ok_or_else(|| {
        let known: Vec<&str> = doc.terms.iter().map(|d| d.name.as_str()).collect();
        CliError::Usage(format!(
            "no term named `{name}` in {}; available terms: {}",
            path.display(),
            if known.is_empty() {
                "none".to_string()
            } else {
                known.join(", ")
            }
        ))
    })
}

fn cmd_check(input: &Path) -> Result<(), CliError> {
    let doc = read_input(input)?;
    let stdout = std::io::stdout();
    let mut failures = 0;
    for def in &doc.terms {
        match typecheck_def(&doc, def, input) {
            Ok(term) => {
                let (l, r) = term.arity();
                let mut lock = stdout.lock();
                writeln!(lock, "{} : {} -> {}", def.name, l, r).map_err(|source| CliError::Io {
                    action: "write to",
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
            }
            Err(err) => {
                eprintln!("error: {err}");
                failures += 1;
            }
        }
    }
    if failures > 0 {
        Err(CliError::CheckFailed { count: failures })
    } else {
        Ok(())
    }
}

#[derive(Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct StyleFile {
    scale: Option<f64>,
    stroke_width: Option<f64>,
    show_outline: Option<bool>,
    font_size: Option<f64>,
}

fn resolve_style(
    scale: Option<f64>,
    stroke_width: Option<f64>,
    font_size: Option<f64>,
    show_outline: bool,
) -> Result<RenderStyle, CliError> {
    let mut style = RenderStyle::default();
    if let Some(path) = std::env::var_os(STYLE_ENV_VAR) {
        let path = PathBuf::from(path);
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
            action: "read style file",
            path: path.clone(),
            source,
        })?;
        let file: StyleFile = serde_json::from_str(&text).map_err(|err| {
            CliError::Usage(format!("invalid style file {}: {err}", path.display()))
        })?;
        style.scale = file.scale.unwrap_or(style.scale);
        style.stroke_width = file.stroke_width.unwrap_or(style.stroke_width);
        style.show_outline = file.show_outline.unwrap_or(style.show_outline);
        style.font_size = file.font_size.unwrap_or(style.font_size);
    }
    style.scale = scale.unwrap_or(style.scale);
    style.stroke_width = stroke_width.unwrap_or(style.stroke_width);
    style.font_size = font_size.unwrap_or(style.font_size);
    style.show_outline |= show_outline;
    for (name, value) in [
        ("scale", style.scale),
        ("stroke-width", style.stroke_width),
        ("font-size", style.font_size),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(CliError::Usage(format!("{name} must be finite and positive")));
        }
    }
    Ok(style)
}

fn parse_leaf_width(spec: &str) -> Result<LeafWidth, CliError> {
    if spec == "max" {
        return Ok(LeafWidth::MaxArity);
    }
    if let Some(value) = spec.strip_prefix("fixed:") {
        let width: f64 = value.parse().map_err(|_| {
            CliError::Usage(format!("invalid leaf width `{value}`; expected a number"))
        })?;
        return Ok(LeafWidth::Fixed(width));
    }
    Err(CliError::Usage(format!(
        "invalid --leaf-width `{spec}`; expected `max` or `fixed:<width>`"
    )))
}

struct RenderArgs {
    input: PathBuf,
    format: Format,
    output: Option<PathBuf>,
    term: String,
    layout: LayoutModeArg,
    scale: Option<f64>,
    stroke_width: Option<f64>,
    font_size: Option<f64>,
    show_outline: bool,
    id_width: Option<f64>,
    leaf_width: Option<String>,
}

fn cmd_render(args: RenderArgs) -> Result<(), CliError> {
    let doc = read_input(&args.input)?;
    let def = lookup_term(&doc, &args.term, &args.input)?;
    let term = typecheck_def(&doc, def, &args.input)?;

    let mut opts = LayoutOptions::default();
    if let Some(width) = args.id_width {
        opts.id_width = width;
    }
    if let Some(spec) = &args.leaf_width {
        opts.leaf_width = parse_leaf_width(spec)?;
    }
    opts.validate().map_err(|err| CliError::Usage(err.to_string()))?;

    let style = resolve_style(args.scale, args.stroke_width, args.font_size, args.show_outline)?;

    let diagram = match args.layout {
        LayoutModeArg::Trapezoid => layout(&term, &opts),
        LayoutModeArg::Naive => layout_naive(&term),
    };

    let payload = match args.format {
        Format::Svg => to_svg(&diagram, &style),
        Format::Tikz => to_tikz(&diagram, &style).into_bytes(),
        Format::Json => to_json(&diagram),
    };
    write_payload(args.output.as_deref(), &payload)
}

fn cmd_compile(
    input: &Path,
    semantics: &Path,
    output: Option<&Path>,
    term_name: &str,
) -> Result<(), CliError> {
    let doc = read_input(input)?;
    let def = lookup_term(&doc, term_name, input)?;
    let term = typecheck_def(&doc, def, input)?;

    let text = std::fs::read_to_string(semantics).map_err(|source| CliError::Io {
        action: "read",
        path: semantics.to_path_buf(),
        source,
    })?;
    let json: serde_json::Value = serde_json::from_str(&text).map_err(|err| CliError::Semantics {
        path: semantics.to_path_buf(),
        detail: format!("invalid JSON: {err}"),
    })?;
    let assignment = parse_assignment(&json).map_err(|err| CliError::Semantics {
        path: semantics.to_path_buf(),
        detail: err.to_string(),
    })?;
    let matrix = eval_matrix(&term, &assignment).map_err(|err| CliError::Semantics {
        path: semantics.to_path_buf(),
        detail: err.to_string(),
    })?;

    let mut payload = serde_json::to_string(&matrix_to_json(&matrix)).expect("serializable");
    payload.push('\n');
    write_payload(output, payload.as_bytes())
}

fn write_payload(output: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io {
            action: "write",
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes).map_err(|source| CliError::Io {
                action: "write to",
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}
