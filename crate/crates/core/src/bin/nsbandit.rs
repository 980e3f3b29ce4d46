use std::collections::BTreeMap;
use std::io::{BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use adwin_bandits::adwin::Adwin;
use adwin_bandits::env::{EnvKind, SyntheticEnv};
use adwin_bandits::error::{Error, Result};
use adwin_bandits::harness::{
    parse_config_file, run_experiment, write_outputs, write_records, EnvSpec, ExperimentConfig,
    PolicySpec,
};

#[derive(Parser)]
#[command(name = "nsbandit", version, about = "Nonstationary bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded experiments and write per-run and summary CSVs.
    Simulate(SimulateArgs),
    /// Run the change detector over a stream of values in [0, 1].
    Adwin(AdwinArgs),
    /// Print global-change diagnostics of a synthetic environment.
    Diagnose(DiagnoseArgs),
}

#[derive(Parser)]
struct SimulateArgs {
    /// key = value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// stationary | gradual | abrupt | abrupt_local | replay:PATH
    #[arg(long)]
    env: Option<String>,
    /// Comma-separated policy names.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long = "T")]
    t: Option<usize>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    cadence: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Policy hyperparameter, repeatable: gamma, window, batch, stride, delta.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Parser)]
struct AdwinArgs {
    #[arg(long, default_value_t = 0.002)]
    delta: f64,
    /// File with one value per line, or `-` for stdin.
    #[arg(long)]
    input: String,
    /// Output CSV; stdout when omitted or `-`.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

#[derive(Parser)]
struct DiagnoseArgs {
    #[arg(long)]
    env: String,
    #[arg(long = "K", default_value_t = 100)]
    k: usize,
    #[arg(long = "T", default_value_t = 30_000)]
    t: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Adwin(args) => adwin(args),
        Command::Diagnose(args) => diagnose(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Parse { .. } | Error::Schema { .. } => 3,
        Error::Domain(_) | Error::Usage(_) | Error::Config(_) => 2,
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut settings: BTreeMap<String, String> = match &args.config {
        Some(path) => parse_config_file(&std::fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    let mut put = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            settings.insert(key.to_string(), v);
        }
    };
    put("env", args.env);
    put("policy", args.policy);
    put("K", args.k.map(|v| v.to_string()));
    put("T", args.t.map(|v| v.to_string()));
    put("L", args.l.map(|v| v.to_string()));
    put("runs", args.runs.map(|v| v.to_string()));
    put("seed", args.seed.map(|v| v.to_string()));
    put("delta", args.delta);
    put("cadence", args.cadence.map(|v| v.to_string()));
    put("out", args.out.map(|p| p.to_string_lossy().into_owned()));
    for p in &args.params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--param expects KEY=VALUE, got '{p}'")))?;
        settings.insert(format!("param.{}", k.trim()), v.trim().to_string());
    }

    let known = [
        "env", "policy", "K", "T", "L", "runs", "seed", "delta", "cadence", "out",
    ];
    if let Some(k) = settings
        .keys()
        .find(|k| !known.contains(&k.as_str()) && !k.starts_with("param."))
    {
        return Err(Error::Config(format!("unknown setting '{k}'")));
    }

    let get = |key: &str| settings.get(key).map(String::as_str);
    let num_arms: Option<usize> = get("K").map(|v| parse_value("K", v)).transpose()?;
    let env_text = get("env").ok_or_else(|| Error::Config("missing --env".into()))?;
    let env = if let Some(path) = env_text.strip_prefix("replay:") {
        EnvSpec::Replay {
            path: PathBuf::from(path),
            num_arms,
        }
    } else {
        let kind: EnvKind = env_text
            .parse()
            .map_err(|_| Error::Config(format!("unknown environment '{env_text}'")))?;
        let horizon = get("T")
            .map(|v| parse_value("T", v))
            .transpose()?
            .ok_or_else(|| Error::Config("missing --T".into()))?;
        EnvSpec::synthetic(kind, num_arms.unwrap_or(100), horizon)
    };

    let mut policies = Vec::new();
    for name in get("policy")
        .ok_or_else(|| Error::Config("missing --policy".into()))?
        .split(',')
        .filter(|s| !s.trim().is_empty())
    {
        let mut spec: PolicySpec = name.parse()?;
        if let Some(d) = get("delta") {
            spec.params.set("delta", d)?;
        }
        for (k, v) in &settings {
            if let Some(param) = k.strip_prefix("param.") {
                spec.params.set(param, v)?;
            }
        }
        policies.push(spec);
    }

    let mut config = ExperimentConfig::new(env, policies);
    if let Some(v) = get("L") {
        config.plays = parse_value("L", v)?;
    }
    if let Some(v) = get("runs") {
        config.runs = parse_value("runs", v)?;
    }
    if let Some(v) = get("seed") {
        config.base_seed = parse_value("seed", v)?;
    }
    if let Some(v) = get("cadence") {
        config.cadence = Some(parse_value("cadence", v)?);
    }
    let out = get("out").map(PathBuf::from);

    let records = run_experiment(&config)?;
    match out {
        Some(path) => {
            let summary = write_outputs(&records, &path)?;
            eprintln!("wrote {} and {}", path.display(), summary.display());
        }
        None => {
            let stdout = std::io::stdout();
            write_records(&records, BufWriter::new(stdout.lock()))?;
        }
    }
    Ok(())
}

fn adwin(args: AdwinArgs) -> Result<()> {
    let reader: Box<dyn BufRead> = if args.input == "-" {
        Box::new(std::io::stdin().lock())
    } else {
        Box::new(std::io::BufReader::new(std::fs::File::open(&args.input)?))
    };
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        match text.parse::<f64>() {
            Ok(v) => values.push(v),
            // tolerate a single header line
            Err(_) if values.is_empty() && i == 0 => {}
            Err(_) => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected a number, found '{text}'"),
                })
            }
        }
    }

    let mut detector = Adwin::new(args.delta)?
        .with_stride(args.stride)?
        .with_horizon(values.len());
    let mut out: Box<dyn Write> = match args.out.as_deref() {
        None | Some("-") => Box::new(BufWriter::new(std::io::stdout().lock())),
        Some(path) => Box::new(BufWriter::new(std::fs::File::create(path)?)),
    };
    writeln!(out, "t,estimate,detected,window_size")?;
    for (i, &x) in values.iter().enumerate() {
        let report = detector.observe(x)?;
        let estimate = detector
            .estimate()
            .expect("window is nonempty after a push");
        writeln!(
            out,
            "{},{},{},{}",
            i + 1,
            estimate,
            u8::from(report.detected),
            report.retained_size
        )?;
    }
    out.flush()?;
    Ok(())
}

fn diagnose(args: DiagnoseArgs) -> Result<()> {
    let kind: EnvKind = args
        .env
        .parse()
        .map_err(|_| Error::Config(format!("unknown environment '{}'", args.env)))?;
    let env = SyntheticEnv::new(kind, args.k, args.t)?;
    let report = env.diagnose();
    let (t1, t2) = env.changepoints();
    println!(
        "env={kind} K={} T={} changepoints={t1},{t2}",
        args.k, args.t
    );
    let show = |name: &str, pair: Option<adwin_bandits::env::RatioPair>| match pair {
        Some(p) => println!(
            "{name}: all_arms={} changing_arms={}",
            p.all_arms, p.changing_arms
        ),
        None => println!("{name}: undefined (no changing arm)"),
    };
    show("abrupt_ratio", report.abrupt);
    show("gradual_ratio", report.gradual);
    Ok(())
}
