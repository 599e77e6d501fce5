//! `purlc` — compile a Purl source file to a rendered knitting pattern.
//!
//! Diagnostics go to stderr, one line each, in discovery order. Exit code 0
//! means no errors (warnings and verification messages alone do not fail
//! the build unless `--strict`), 1 means errors were reported, 2 means an
//! I/O failure before or after compilation.

use clap::{Parser, ValueEnum};
use purl::codegen;
use purl::diag::Severity;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Html,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "purlc", version, about = "Compile a Purl knitting pattern")]
struct Cli {
    /// Purl source file (UTF-8)
    input: PathBuf,

    /// Output path; defaults to the input with the format's extension
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Html)]
    format: Format,

    /// Dump the syntax tree after each pass as JSON on stdout
    #[arg(long)]
    emit_ast_json: bool,

    /// Exit nonzero on any diagnostic, not just errors
    #[arg(long)]
    strict: bool,
}

fn default_output(input: &Path, format: Format) -> PathBuf {
    let ext = match format {
        Format::Html => "html",
        Format::Text => "txt",
    };
    input.with_extension(ext)
}

/// Wrap an HTML fragment in a minimal standalone document.
fn wrap_html_document(fragment: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Purl pattern</title>\n</head>\n<body>\n{}\n</body>\n</html>\n",
        fragment
    )
}

fn run(cli: &Cli) -> ExitCode {
    let source = match std::fs::read_to_string(&cli.input) {
        Ok(s) => s,
        Err(err) => {
            eprintln!("purlc: cannot read {}: {}", cli.input.display(), err);
            return ExitCode::from(2);
        }
    };

    let trace = purl::compile_traced(&source);

    if cli.emit_ast_json {
        for (label, tree) in [
            ("PASS 1", &trace.pass1),
            ("PASS 2", &trace.pass2),
            ("PASS 3", &trace.pass3),
        ] {
            println!("{label}:-------------------------------");
            match serde_json::to_string_pretty(tree) {
                Ok(json) => println!("{json}"),
                Err(err) => eprintln!("purlc: cannot serialize tree: {err}"),
            }
        }
    }

    eprint!("{}", purl::diag::render_diagnostics(&trace.ctx.messages));

    let rendered = match cli.format {
        Format::Html => wrap_html_document(&codegen::write_html(&trace.pass3)),
        Format::Text => codegen::write_text(&trace.pass3),
    };
    let output_path = cli
        .output
        .clone()
        .unwrap_or_else(|| default_output(&cli.input, cli.format));
    if let Err(err) = std::fs::write(&output_path, rendered) {
        eprintln!("purlc: cannot write {}: {}", output_path.display(), err);
        return ExitCode::from(2);
    }

    let has_errors = trace.ctx.messages.iter().any(|m| m.severity == Severity::Error);
    if has_errors || (cli.strict && !trace.ctx.messages.is_empty()) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run(&cli)
}
