//! `aff`: check files, infer and evaluate expressions, or start a REPL.
//!
//! Exit codes: 0 on success, 1 on parse/type/eval errors, 2 on usage
//! errors (including unreadable input files).

use aff_core::corpus;
use aff_core::eval::DEFAULT_FUEL;
use aff_core::{
    check_source, infer, normalize_type_vars, parse_term, print_type_with, render_value,
    CheckedProgram, Context, Evaluator, FreshSupply, GlobalEnv, InferenceResult, ProgramError,
    Span, Term, Type,
};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "aff", version, about = "An affine-typed lazy functional language")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Typecheck a source file and print each definition's type.
    Check {
        file: PathBuf,
        /// Print the derivation tree of every definition.
        #[arg(long)]
        trace: bool,
        /// Emit machine-readable JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Report hypotheses that were discarded unused.
        #[arg(long)]
        warn_unused: bool,
        /// Start from an empty environment instead of the prelude.
        #[arg(long)]
        no_prelude: bool,
    },
    /// Infer the principal type of an expression.
    Infer {
        /// The expression to infer.
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        no_prelude: bool,
    },
    /// Typecheck and evaluate an expression.
    Eval {
        /// The expression to evaluate.
        #[arg(short = 'e', long = "expr")]
        expr: String,
        /// Decode the result as a Peano numeral.
        #[arg(long)]
        nat: bool,
        /// Force this many stream elements instead of one value.
        #[arg(long, value_name = "N")]
        take: Option<usize>,
        /// Evaluation step budget.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        no_prelude: bool,
    },
    /// Interactive session.
    Repl,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            file,
            trace,
            json,
            warn_unused,
            no_prelude,
        } => cmd_check(&file, trace, json, warn_unused, no_prelude),
        Command::Infer {
            expr,
            trace,
            json,
            no_prelude,
        } => cmd_infer(&expr, trace, json, no_prelude),
        Command::Eval {
            expr,
            nat,
            take,
            fuel,
            json,
            no_prelude,
        } => cmd_eval(&expr, nat, take, fuel, json, no_prelude),
        Command::Repl => repl(),
    }
}

/// 1-based line and column of a byte offset.
fn position(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let mut line = 1;
    let mut col = 1;
    for (i, c) in src.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

fn span_label(src: &str, span: Span) -> String {
    let (line, col) = position(src, span.start);
    format!("{line}:{col}")
}

/// Internal binder renamings carry a `%` suffix; strip it for people.
fn user_name(name: &str) -> &str {
    match name.find('%') {
        Some(idx) if idx > 0 => &name[..idx],
        _ => name,
    }
}

struct Session {
    env: GlobalEnv,
    synonyms: Vec<(String, Type)>,
    supply: FreshSupply,
}

impl Session {
    fn new(no_prelude: bool) -> Session {
        let mut supply = FreshSupply::new();
        if no_prelude {
            return Session {
                env: GlobalEnv::new(),
                synonyms: Vec::new(),
                supply,
            };
        }
        let checked = corpus::load_prelude(&mut supply).expect("the built-in prelude must check");
        Session {
            env: checked.env,
            synonyms: checked.synonyms,
            supply,
        }
    }

    fn absorb(&mut self, checked: CheckedProgram) {
        self.env = checked.env;
        self.synonyms = checked.synonyms;
    }

    fn infer_expr(&mut self, src: &str) -> Result<(Term, InferenceResult), String> {
        let term = parse_term(src, &self.synonyms)
            .map_err(|e| format!("parse error: {e} at {}", span_label(src, e.span)))?;
        let result = infer(&self.env, Context::empty(), &term, &mut self.supply)
            .map_err(|e| format!("type error: {e} at {}", span_label(src, e.span)))?;
        Ok((term, result))
    }

    fn render_type(&self, ty: &Type) -> String {
        print_type_with(&normalize_type_vars(ty), &self.synonyms)
    }
}

fn program_error_json(src: &str, err: &ProgramError) -> serde_json::Value {
    let span = err.span();
    let (line, col) = position(src, span.start);
    json!({
        "class": err.class(),
        "message": err.to_string(),
        "span": { "start": span.start, "end": span.end, "line": line, "column": col },
    })
}

fn cmd_check(
    path: &PathBuf,
    trace: bool,
    json: bool,
    warn_unused: bool,
    no_prelude: bool,
) -> ExitCode {
    let src = match std::fs::read_to_string(path) {
        Ok(src) => src,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let mut session = Session::new(no_prelude);
    match check_source(&src, &session.env, &session.synonyms, &mut session.supply) {
        Ok(checked) => {
            if warn_unused {
                for report in &checked.reports {
                    for unused in &report.inference.unused {
                        eprintln!(
                            "{}:{}: warning: unused variable `{}` in `{}`",
                            path.display(),
                            span_label(&src, unused.span),
                            user_name(&unused.name),
                            report.name,
                        );
                    }
                }
            }
            if json {
                let defs: Vec<_> = checked
                    .reports
                    .iter()
                    .map(|r| {
                        let mut value = json!({
                            "name": r.name,
                            "type": print_type_with(&r.declared, &checked.synonyms),
                        });
                        if trace {
                            value["trace"] = r.inference.trace.to_json();
                        }
                        value
                    })
                    .collect();
                println!(
                    "{}",
                    json!({ "schema": 1, "command": "check", "ok": true, "defs": defs })
                );
            } else {
                for report in &checked.reports {
                    println!(
                        "{} : {}",
                        report.name,
                        print_type_with(&report.declared, &checked.synonyms)
                    );
                    if trace {
                        print!("{}", report.inference.trace.to_text());
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            if json {
                println!(
                    "{}",
                    json!({
                        "schema": 1,
                        "command": "check",
                        "ok": false,
                        "error": program_error_json(&src, &err),
                    })
                );
            } else {
                eprintln!(
                    "{}:{}: error: {err}",
                    path.display(),
                    span_label(&src, err.span())
                );
            }
            ExitCode::from(1)
        }
    }
}

fn cmd_infer(expr: &str, trace: bool, json: bool, no_prelude: bool) -> ExitCode {
    let mut session = Session::new(no_prelude);
    match session.infer_expr(expr) {
        Ok((_, result)) => {
            let rendered = session.render_type(&result.ty);
            if json {
                let mut value = json!({
                    "schema": 1,
                    "command": "infer",
                    "ok": true,
                    "type": rendered,
                });
                if trace {
                    value["trace"] = result.trace.to_json();
                }
                println!("{value}");
            } else {
                println!("{rendered}");
                if trace {
                    print!("{}", result.trace.to_text());
                }
            }
            ExitCode::SUCCESS
        }
        Err(message) => {
            if json {
                println!(
                    "{}",
                    json!({ "schema": 1, "command": "infer", "ok": false, "error": message })
                );
            } else {
                eprintln!("error: {message}");
            }
            ExitCode::from(1)
        }
    }
}

fn cmd_eval(
    expr: &str,
    nat: bool,
    take: Option<usize>,
    fuel: u64,
    json: bool,
    no_prelude: bool,
) -> ExitCode {
    let mut session = Session::new(no_prelude);
    let term = match session.infer_expr(expr) {
        Ok((term, _)) => term,
        Err(message) => {
            if json {
                println!(
                    "{}",
                    json!({ "schema": 1, "command": "eval", "ok": false, "error": message })
                );
            } else {
                eprintln!("error: {message}");
            }
            return ExitCode::from(1);
        }
    };
    let mut evaluator = Evaluator::with_fuel(&session.env, fuel);
    let outcome: Result<serde_json::Value, String> = (|| {
        if let Some(n) = take {
            let heads = evaluator.take_bang(&term, n).map_err(|e| e.to_string())?;
            if nat {
                let mut decoded = Vec::new();
                for head in heads {
                    decoded.push(evaluator.nat_of_value(head).map_err(|e| e.to_string())?);
                }
                Ok(json!(decoded))
            } else {
                let rendered: Vec<String> = heads.iter().map(render_value).collect();
                Ok(json!(rendered))
            }
        } else if nat {
            let n = evaluator.eval_nat(&term).map_err(|e| e.to_string())?;
            Ok(json!(n))
        } else {
            let v = evaluator.eval(&term).map_err(|e| e.to_string())?;
            Ok(json!(render_value(&v)))
        }
    })();
    match outcome {
        Ok(value) => {
            if json {
                println!(
                    "{}",
                    json!({ "schema": 1, "command": "eval", "ok": true, "value": value })
                );
            } else {
                match &value {
                    serde_json::Value::Array(items) => {
                        let rendered: Vec<String> = items
                            .iter()
                            .map(|v| match v {
                                serde_json::Value::String(s) => s.clone(),
                                other => other.to_string(),
                            })
                            .collect();
                        println!("[{}]", rendered.join(", "));
                    }
                    serde_json::Value::String(s) => println!("{s}"),
                    other => println!("{other}"),
                }
            }
            ExitCode::SUCCESS
        }
        Err(message) => {
            if json {
                println!(
                    "{}",
                    json!({ "schema": 1, "command": "eval", "ok": false, "error": message })
                );
            } else {
                eprintln!("error: {message}");
            }
            ExitCode::from(1)
        }
    }
}

const REPL_HELP: &str = "\
commands:
  :t <expr>        infer the type of an expression
  :def <decl>      add a definition (`x : T = e` or `type X = T`)
  :trace on|off    toggle derivation printing
  :h               this help
  :q               quit
anything else evaluates as an expression";

fn repl() -> ExitCode {
    let mut session = Session::new(false);
    let mut show_trace = false;
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        print!("aff> ");
        let _ = io::stdout().flush();
        let line = match lines.next() {
            Some(Ok(line)) => line,
            _ => break,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == ":q" {
            break;
        }
        if line == ":h" || line == ":help" {
            println!("{REPL_HELP}");
            continue;
        }
        if let Some(setting) = line.strip_prefix(":trace") {
            match setting.trim() {
                "on" => show_trace = true,
                "off" => show_trace = false,
                other => eprintln!("error: expected `on` or `off`, got `{other}`"),
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix(":t ") {
            match session.infer_expr(rest) {
                Ok((_, result)) => {
                    println!("{}", session.render_type(&result.ty));
                    if show_trace {
                        print!("{}", result.trace.to_text());
                    }
                }
                Err(message) => eprintln!("error: {message}"),
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix(":def ") {
            let source = if rest.trim_start().starts_with("type ") {
                rest.to_string()
            } else {
                format!("def {rest}")
            };
            match check_source(&source, &session.env, &session.synonyms, &mut session.supply) {
                Ok(checked) => {
                    for report in &checked.reports {
                        println!(
                            "{} : {}",
                            report.name,
                            print_type_with(&report.declared, &checked.synonyms)
                        );
                    }
                    session.absorb(checked);
                }
                Err(err) => eprintln!("error: {err}"),
            }
            continue;
        }
        if line.starts_with(':') {
            eprintln!("error: unknown command `{line}`; :h for help");
            continue;
        }
        match session.infer_expr(line) {
            Ok((term, result)) => {
                if show_trace {
                    print!("{}", result.trace.to_text());
                }
                let mut evaluator = Evaluator::new(&session.env);
                match evaluator.eval(&term) {
                    Ok(value) => println!("{}", render_value(&value)),
                    Err(e) => eprintln!("error: {e}"),
                }
            }
            Err(message) => eprintln!("error: {message}"),
        }
    }
    ExitCode::SUCCESS
}
