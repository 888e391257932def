use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use herd_core::exactlin::FieldSpec;
use herd_core::flock::{group_order_warning, FlockDatum};
use herd_core::format::{
    emit_category, emit_flock, emit_module, flock_digest, parse_flock, parse_module, sha256_hex, ModuleFile, ModuleKind,
};
use herd_core::fourier::{convolve, fourier_coend};
use herd_core::herdoid::{build_h, promonoidal, HCategory};
use herd_core::instances;
use herd_core::lincat::Violations;
use herd_core::verify::{parse_checks, run_suite, Report, SuiteOptions};

#[derive(Parser)]
#[command(name = "herd", version, about = "Build and check finite linear herds, their Hopf categories and module convolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a named example instance (point, c2, c3, g2, g3, c2xg2).
    Example {
        name: String,
        /// gf<p> or q
        #[arg(long)]
        field: Option<FieldSpec>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Run the check suite on an instance file.
    Verify {
        path: PathBuf,
        /// `all` or a comma-separated list of suite entries
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Modules sampled per module-parameterized check
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportKind,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Emit H, or with --unit-module its unit module.
    BuildH {
        path: PathBuf,
        #[arg(long)]
        unit_module: bool,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Fourier transform of an H-module: a bimodule over the base category.
    Fourier {
        instance: PathBuf,
        module: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Convolution of two H-modules.
    Convolve {
        instance: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Render a structured report as text.
    Report {
        path: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
}

enum Failure {
    /// Bad input or usage; exit 2.
    Input(String),
    /// A check failed; exit 1.
    Check(String),
}

type CmdResult = Result<bool, Failure>;

fn input<E: std::fmt::Display>(what: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", what.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(input(path))
}

/// Write to `path` via a temporary file and rename, or to stdout.
fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Input(e.to_string()))
        }
        Some(p) => {
            let mut tmp = p.as_os_str().to_owned();
            tmp.push(".tmp");
            let tmp = PathBuf::from(tmp);
            fs::write(&tmp, text).and_then(|_| fs::rename(&tmp, p)).map_err(input(p))
        }
    }
}

fn load_instance(path: &Path) -> Result<(FlockDatum, String), Failure> {
    let f = parse_flock(&read(path)?).map_err(input(path))?;
    let digest = flock_digest(&f);
    Ok((f, digest))
}

fn load_h(f: &FlockDatum) -> Result<HCategory, Failure> {
    build_h(f).map_err(|e| Failure::Check(format!("instance fails its checks: {e}")))
}

fn load_module(path: &Path, h: &HCategory, digest: &str, kind: ModuleKind) -> Result<(ModuleFile, String), Failure> {
    let text = read(path)?;
    let m = parse_module(&text, h, digest).map_err(input(path))?;
    if m.kind != kind {
        return Err(Failure::Input(format!("{}: expected an H-module", path.display())));
    }
    Ok((m, sha256_hex(&text)))
}

fn checked(v: Violations, what: &str) -> Result<(), Failure> {
    if v.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{what}: {v}")))
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Example { name, field, output } => {
            let f = instances::build(&name, field).map_err(|e| Failure::Input(e.to_string()))?;
            if let Some(w) = instances::group(&name).and_then(|g| group_order_warning(&g, f.field())) {
                eprintln!("warning: {w}");
            }
            emit(output.as_deref(), &emit_flock(&f))?;
            Ok(true)
        }
        Command::Verify { path, suite, seed, samples, report, output } => {
            let text = read(&path)?;
            let f = parse_flock(&text).map_err(input(&path))?;
            let checks = parse_checks(&suite).map_err(|e| Failure::Input(e.to_string()))?;
            let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let name = name.strip_suffix(".flock.json").unwrap_or(&name).to_string();
            let mut r = run_suite(&name, &f, &SuiteOptions { seed, checks, samples });
            r.input_sha256 = Some(sha256_hex(&text));
            let body = match report {
                ReportKind::Text => format!("{r}\n"),
                ReportKind::Structured => r.to_json(),
            };
            emit(output.as_deref(), &body)?;
            Ok(r.passed())
        }
        Command::BuildH { path, unit_module, output } => {
            let (f, digest) = load_instance(&path)?;
            let h = load_h(&f)?;
            let text = if unit_module {
                let module = promonoidal(&h).j;
                checked(module.check(), "unit module")?;
                emit_module(&ModuleFile {
                    kind: ModuleKind::H,
                    instance_sha256: digest,
                    operation: Some("unit".into()),
                    inputs: vec![],
                    module,
                })
            } else {
                emit_category(h.underlying(), &digest)
            };
            emit(output.as_deref(), &text)?;
            Ok(true)
        }
        Command::Fourier { instance, module, output } => {
            let (f, digest) = load_instance(&instance)?;
            let h = load_h(&f)?;
            let (m, md) = load_module(&module, &h, &digest, ModuleKind::H)?;
            let fc = fourier_coend(&h, &m.module);
            checked(fc.violations, "fourier")?;
            let out = ModuleFile {
                kind: ModuleKind::Bimodule,
                instance_sha256: digest,
                operation: Some("fourier".into()),
                inputs: vec![md],
                module: fc.bimodule,
            };
            emit(output.as_deref(), &emit_module(&out))?;
            Ok(true)
        }
        Command::Convolve { instance, a, b, output } => {
            let (f, digest) = load_instance(&instance)?;
            let h = load_h(&f)?;
            let (ma, da) = load_module(&a, &h, &digest, ModuleKind::H)?;
            let (mb, db) = load_module(&b, &h, &digest, ModuleKind::H)?;
            let c = convolve(&h, &ma.module, &mb.module);
            checked(c.violations, "convolve")?;
            let out = ModuleFile {
                kind: ModuleKind::H,
                instance_sha256: digest,
                operation: Some("convolve".into()),
                inputs: vec![da, db],
                module: c.module,
            };
            emit(output.as_deref(), &emit_module(&out))?;
            Ok(true)
        }
        Command::Report { path, output } => {
            let r: Report = serde_json::from_str(&read(&path)?).map_err(input(&path))?;
            emit(output.as_deref(), &format!("{r}\n"))?;
            Ok(r.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("herd: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("herd: {msg}");
            ExitCode::from(2)
        }
    }
}
