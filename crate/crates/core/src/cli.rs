//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation, transformation or equivalence
//! failure, 2 I/O, usage or enumeration-cap error. Diagnostics go to stderr
//! as `file:line:col: severity: message`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diagnostic::{has_errors, Diagnostic, Location};
use crate::ivml::{check_project, emit_ivml, parse_ivml_subset, parse_ivml_with_locations, IvmlError};
use crate::oracle::{self, check_equivalence, OracleError};
use crate::transform::{transform, Mode, Naming, TransformOptions};
use crate::uvl::{parse_uvl_named, validate_uvl, UvlModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "uvl2ivml", version, about = "Transform UVL feature models into IVML projects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transform a UVL model and write the IVML project.
    Transform {
        input: PathBuf,
        /// Output file, or `-` for standard output.
        #[arg(short, long)]
        output: String,
        #[command(flatten)]
        options: OptionArgs,
        /// Print a summary to standard error.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Transform a model and compare configuration spaces by enumeration.
    Check {
        input: PathBuf,
        #[command(flatten)]
        options: OptionArgs,
        /// Enumeration cap (variable features; 2^cap IVML candidates).
        #[arg(long)]
        cap: Option<u32>,
        #[arg(short, long)]
        verbose: bool,
    },
    /// Parse and validate a UVL or IVML file.
    Validate {
        input: PathBuf,
        /// Input language; inferred from the extension if omitted.
        #[arg(long, value_enum)]
        lang: Option<Lang>,
    },
}

#[derive(Debug, Args)]
struct OptionArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Faithful)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = NamingArg::Suffix)]
    naming: NamingArg,
    /// Project name (default: namespace, else root feature).
    #[arg(long)]
    project_name: Option<String>,
    /// Enum name for a parent's first group under pretty naming, as PARENT=NAME.
    #[arg(long = "enum-name", value_name = "PARENT=NAME", value_parser = parse_enum_name)]
    enum_names: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Faithful,
    Strict,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NamingArg {
    Suffix,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Lang {
    Uvl,
    Ivml,
}

fn parse_enum_name(raw: &str) -> Result<(String, String), String> {
    match raw.split_once('=') {
        Some((p, n)) if !p.is_empty() && !n.is_empty() => Ok((p.to_string(), n.to_string())),
        _ => Err(format!("expected PARENT=NAME, got `{raw}`")),
    }
}

impl OptionArgs {
    fn to_options(&self) -> TransformOptions {
        TransformOptions {
            mode: match self.mode {
                ModeArg::Faithful => Mode::Faithful,
                ModeArg::Strict => Mode::Strict,
            },
            naming: match self.naming {
                NamingArg::Suffix => Naming::Suffix,
                NamingArg::Pretty => Naming::Pretty,
            },
            project_name: self.project_name.clone(),
            enum_names: self.enum_names.iter().cloned().collect::<BTreeMap<_, _>>(),
        }
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut ctx = Context { stdout, stderr };
    match cli.command {
        Command::Transform {
            input,
            output,
            options,
            verbose,
        } => ctx.transform(&input, &output, &options.to_options(), verbose),
        Command::Check {
            input,
            options,
            cap,
            verbose,
        } => ctx.check(&input, &options.to_options(), cap, verbose),
        Command::Validate { input, lang } => ctx.validate(&input, lang),
    }
}

struct Context<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Context<'_> {
    fn report(&mut self, file: &str, diagnostics: &[Diagnostic]) {
        for d in diagnostics {
            let _ = writeln!(self.stderr, "{}", d.render(file));
        }
    }

    fn error(&mut self, message: impl std::fmt::Display) {
        let _ = writeln!(self.stderr, "uvl2ivml: error: {message}");
    }

    fn read(&mut self, path: &Path) -> Result<String, i32> {
        fs::read_to_string(path).map_err(|e| {
            self.error(format!("cannot read {}: {e}", path.display()));
            EXIT_USAGE
        })
    }

    /// Parses and validates a UVL file, printing diagnostics.
    fn load_uvl(&mut self, path: &Path) -> Result<UvlModel, i32> {
        let text = self.read(path)?;
        let file = path.display().to_string();
        let model = parse_uvl_named(&text, &file).map_err(|e| {
            self.report(&file, &[e.to_diagnostic()]);
            EXIT_FAILURE
        })?;
        let diagnostics = validate_uvl(&model);
        self.report(&file, &diagnostics);
        if has_errors(&diagnostics) {
            return Err(EXIT_FAILURE);
        }
        Ok(model)
    }

    fn transform(&mut self, input: &Path, output: &str, opts: &TransformOptions, verbose: bool) -> i32 {
        match self.try_transform(input, output, opts, verbose) {
            Ok(()) => EXIT_OK,
            Err(code) => code,
        }
    }

    fn try_transform(&mut self, input: &Path, output: &str, opts: &TransformOptions, verbose: bool) -> Result<(), i32> {
        let model = self.load_uvl(input)?;
        let file = input.display().to_string();
        let (project, bindings) = transform(&model, opts).map_err(|e| {
            self.report(&file, &e.diagnostics());
            EXIT_FAILURE
        })?;
        let text = emit_ivml(&project).map_err(|e| {
            self.error(e);
            EXIT_FAILURE
        })?;
        // syntax check of our own output, strengthened to structural equality
        match parse_ivml_subset(&text) {
            Ok(reparsed) if reparsed == project => {}
            Ok(_) => {
                self.error("emitted IVML does not parse back to the same project");
                return Err(EXIT_FAILURE);
            }
            Err(e) => {
                self.error(format!("emitted IVML does not parse: {e}"));
                return Err(EXIT_FAILURE);
            }
        }
        if verbose {
            let elided = bindings.values().filter(|b| b.is_elided()).count();
            let _ = writeln!(
                self.stderr,
                "{}: {} features ({} elided), {} enums, {} variables, {} constraints",
                file,
                bindings.len(),
                elided,
                project.enums().count(),
                project.variables().count(),
                project.constraints().count()
            );
        }
        if output == "-" {
            self.stdout.write_all(text.as_bytes()).map_err(|e| {
                self.error(format!("cannot write output: {e}"));
                EXIT_USAGE
            })
        } else {
            write_atomically(Path::new(output), &text).map_err(|e| {
                self.error(format!("cannot write {output}: {e}"));
                EXIT_USAGE
            })
        }
    }

    fn check(&mut self, input: &Path, opts: &TransformOptions, cap: Option<u32>, verbose: bool) -> i32 {
        let cap = match cap {
            Some(c) => oracle::parse_cap(&c.to_string()),
            None => oracle::cap_from_env(),
        };
        let cap = match cap {
            Ok(c) => c,
            Err(e) => {
                self.error(e);
                return EXIT_USAGE;
            }
        };
        let model = match self.load_uvl(input) {
            Ok(m) => m,
            Err(code) => return code,
        };
        let file = input.display().to_string();
        let (project, bindings) = match transform(&model, opts) {
            Ok(r) => r,
            Err(e) => {
                self.report(&file, &e.diagnostics());
                return EXIT_FAILURE;
            }
        };
        let report = match check_equivalence(&model, &project, &bindings, cap) {
            Ok(r) => r,
            Err(e @ (OracleError::CapExceeded { .. } | OracleError::NonBooleanModel(_))) => {
                self.error(e);
                return EXIT_USAGE;
            }
            Err(e) => {
                self.error(e);
                return EXIT_FAILURE;
            }
        };
        let passed = match opts.mode {
            Mode::Strict => report.bijective,
            Mode::Faithful => report.all_images_valid(),
        };
        let _ = if verbose || !passed {
            writeln!(self.stdout, "{report}")
        } else {
            writeln!(self.stdout, "{}", report.equiv_line())
        };
        if passed {
            EXIT_OK
        } else {
            EXIT_FAILURE
        }
    }

    fn validate(&mut self, input: &Path, lang: Option<Lang>) -> i32 {
        let lang = lang.or_else(|| match input.extension().and_then(|e| e.to_str()) {
            Some("uvl") => Some(Lang::Uvl),
            Some("ivml") => Some(Lang::Ivml),
            _ => None,
        });
        let Some(lang) = lang else {
            self.error(format!(
                "cannot infer the language of {}; pass --lang uvl or --lang ivml",
                input.display()
            ));
            return EXIT_USAGE;
        };
        match lang {
            Lang::Uvl => match self.load_uvl(input) {
                Ok(_) => EXIT_OK,
                Err(code) => code,
            },
            Lang::Ivml => self.validate_ivml(input),
        }
    }

    fn validate_ivml(&mut self, input: &Path) -> i32 {
        let text = match self.read(input) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let file = input.display().to_string();
        let (project, locations) = match parse_ivml_with_locations(&text) {
            Ok(r) => r,
            Err(e) => {
                let diagnostic = match &e {
                    IvmlError::Syntax { location, message } => Diagnostic::error(*location, message.clone()),
                    IvmlError::Unsupported { location, construct } => Diagnostic::error(
                        *location,
                        format!("unsupported IVML construct `{construct}`"),
                    ),
                    IvmlError::Invalid(_) => Diagnostic::error(Location::default(), e.to_string()),
                };
                self.report(&file, &[diagnostic]);
                return EXIT_FAILURE;
            }
        };
        let diagnostics: Vec<Diagnostic> = check_project(&project)
            .into_iter()
            .map(|v| {
                let location = v.decl.and_then(|i| locations.get(i).copied()).unwrap_or_default();
                Diagnostic::error(location, v.message)
            })
            .collect();
        self.report(&file, &diagnostics);
        if diagnostics.is_empty() {
            EXIT_OK
        } else {
            EXIT_FAILURE
        }
    }
}

/// Writes through a sibling temporary file so a failed run leaves no partial output.
fn write_atomically(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = fs::write(&tmp, contents).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
