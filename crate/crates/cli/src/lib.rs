//! The `ipg` command: grammar checking, termination analysis and parsing.
//!
//! Each command writes its normal output and its diagnostics to the given
//! sinks and returns the process exit code, so the binary and the tests
//! drive exactly the same code.

pub mod corpus;
pub mod json;

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use ipg_core::ast::Grammar;
use ipg_core::diag::Diagnostic;
use ipg_core::engine::blackbox::BlackboxRegistry;
use ipg_core::engine::{self, EngineError, EngineOptions};
use ipg_core::pretty::pretty_print;
use ipg_core::terminate::{check_termination, Verdict};
use ipg_core::prepare;

pub mod exit {
    pub const OK: i32 = 0;
    pub const DIAGNOSTICS: i32 = 1;
    pub const IO: i32 = 2;
    pub const MAY_NOT_TERMINATE: i32 = 3;
    pub const UNKNOWN: i32 = 4;
    pub const REJECT: i32 = 5;
    pub const DEPTH: i32 = 6;
}

/// Stack size for threads running the interpreter; recursion depth grows
/// with input length.
pub const STACK_SIZE: usize = 1 << 30;

/// Runs `f` on a thread with a [`STACK_SIZE`] stack.
pub fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_SIZE)
            .spawn_scoped(s, f)
            .expect("spawn parser thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

fn read_source(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Reads and checks a grammar, rendering any diagnostics to `err`.
pub fn load_grammar(path: &Path, err: &mut dyn Write) -> Result<Grammar, i32> {
    let src = match read_source(path) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return Err(exit::IO);
        }
    };
    prepare(&src).map_err(|diags| {
        report(path, &src, &diags, err);
        exit::DIAGNOSTICS
    })
}

fn report(path: &Path, src: &str, diags: &[Diagnostic], err: &mut dyn Write) {
    let file = path.display().to_string();
    for d in diags {
        let _ = writeln!(err, "{}", d.render(&file, src));
    }
}

pub fn cmd_check(path: &Path, emit_completed: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match load_grammar(path, err) {
        Ok(g) => {
            if emit_completed {
                let _ = write!(out, "{}", pretty_print(&g));
            }
            exit::OK
        }
        Err(code) => code,
    }
}

pub fn cmd_terminate(path: &Path, timing: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let g = match load_grammar(path, err) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let r = check_termination(&g);
    let _ = writeln!(out, "{}", json::report_json(&r, timing));
    match r.verdict {
        Verdict::Terminates => exit::OK,
        Verdict::MayNotTerminate => exit::MAY_NOT_TERMINATE,
        Verdict::Unknown => exit::UNKNOWN,
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParseArgs {
    pub start: Option<String>,
    pub opts: EngineOptions,
    pub stats: bool,
}

pub fn cmd_parse(
    grammar: &Path,
    input: &Path,
    args: &ParseArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let g = match load_grammar(grammar, err) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let bytes = match fs::read(input) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", input.display());
            return exit::IO;
        }
    };
    parse_bytes(&g, &bytes, args, out, err)
}

/// Parses already loaded input; the tail of [`cmd_parse`].
pub fn parse_bytes(g: &Grammar, bytes: &[u8], args: &ParseArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(start) = args.start.as_deref().or(g.start_name()) else {
        let _ = writeln!(err, "error: grammar has no rules");
        return exit::DIAGNOSTICS;
    };
    let outcome = engine::parse(bytes, g, start, &args.opts, &BlackboxRegistry::new());
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                EngineError::DepthExceeded { .. } => exit::DEPTH,
                _ => exit::DIAGNOSTICS,
            };
        }
    };
    for line in &outcome.trace {
        let _ = writeln!(err, "{line}");
    }
    let code = match &outcome.tree {
        Some(t) => {
            let _ = writeln!(out, "{}", json::tree_json(t));
            exit::OK
        }
        None => exit::REJECT,
    };
    if args.stats {
        let _ = writeln!(out, "{}", json::stats_json(&outcome.stats));
    }
    code
}

/// Command output captured in memory.
pub struct Captured {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

/// Runs a command on a big stack with in-memory sinks.
pub fn capture(f: impl FnOnce(&mut dyn Write, &mut dyn Write) -> i32 + Send) -> Captured {
    with_big_stack(|| {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = f(&mut o, &mut e);
        Captured {
            code,
            stdout: o,
            stderr: e,
        }
    })
}

/// Flushes captured output to the real streams.
pub fn emit(c: &Captured) -> io::Result<()> {
    io::stdout().write_all(&c.stdout)?;
    io::stderr().write_all(&c.stderr)?;
    io::stdout().flush()
}
