//! `fmclass`: exact stable-class computations from the command line.
//!
//! Subcommands read and write deterministic JSON (rationals as `"p/q"`
//! strings). Exit codes: 0 on success, 1 on domain errors (degenerate
//! data, insufficient precision, values outside an operation's domain),
//! 2 on malformed input.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use fmclass::dual;
use fmclass::flop;
use fmclass::limits::{self, ArcFamilyJson, LimitError};
use fmclass::nodefam::{self, NodefamError, SectionsJson};
use fmclass::rat::Rat;
use fmclass::stable::StableClass;
use fmclass::strata;

#[derive(Parser)]
#[command(
    name = "fmclass",
    version,
    about = "Exact computation with n-pointed stable classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Limit stable class of an arc family (ArcFamily JSON on disk)
    Limit { input: PathBuf },
    /// Limit stable class of sections through a smoothed node xy = t^r
    NodeLimit { input: PathBuf },
    /// Stable class of a trace tuple; --fiber --versus compares two tuples
    Theta {
        #[arg(
            trailing_var_arg = true,
            allow_hyphen_values = true,
            required = true,
            help = "rational tuple, optionally followed by --fiber --versus <tuple>"
        )]
        args: Vec<String>,
    },
    /// Enumerate boundary-stratum nests for n markings
    Strata {
        #[arg(long)]
        n: usize,
        /// Ambient dimension used for stratum dimensions
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Print only the number of nests
        #[arg(long)]
        count_only: bool,
    },
    /// Dual tree of the stable degeneration of a 1-dimensional class
    Degenerate {
        input: PathBuf,
        /// Genus of the spine curve
        #[arg(long, default_value_t = 2)]
        genus: u32,
        /// Emit a DOT graph instead of DualTree JSON
        #[arg(long)]
        dot: bool,
    },
    /// Verify the resolutions of the ordinary double point ab = cd
    FlopCheck {
        /// Check a single rational lambda instead of the standard sweep
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Check with lambda as a symbolic indeterminate
        #[arg(long)]
        symbolic_lambda: bool,
    },
}

/// Errors mapped to exit codes: domain -> 1, malformed input -> 2.
enum CliError {
    Domain(String),
    Malformed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Malformed(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Domain(m) | CliError::Malformed(m) => m,
        }
    }
}

impl From<LimitError> for CliError {
    fn from(e: LimitError) -> Self {
        match e {
            LimitError::InsufficientPrecision { .. } => CliError::Domain(e.to_string()),
            LimitError::Malformed(_) => CliError::Malformed(e.to_string()),
        }
    }
}

impl From<NodefamError> for CliError {
    fn from(e: NodefamError) -> Self {
        match e {
            NodefamError::Limit(inner) => inner.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<strata::StrataError> for CliError {
    fn from(e: strata::StrataError) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Malformed(format!("cannot read {}: {}", path.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Malformed(format!(
            "{}:{}:{}: {}",
            path.display(),
            e.line(),
            e.column(),
            e
        ))
    })
}

fn print_json<T: Serialize>(value: &T) {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    print!("{}", text);
}

/// Output of `limit` and `node-limit`: the stable class plus the contact
/// levels of its coincidence nest (levels are diagnostics the class
/// itself does not retain).
#[derive(Serialize)]
struct LimitOutput {
    class: StableClass,
    nest: Vec<strata::NestMember>,
}

/// Output of `theta`: the stable class plus the canonical root screen.
#[derive(Serialize)]
struct ThetaOutput {
    class: StableClass,
    screen: Vec<Vec<Rat>>,
}

/// `degenerate` accepts either a bare StableClass or the `limit` output
/// wrapper with a `class` field.
#[derive(serde::Deserialize)]
#[serde(untagged)]
enum ClassInput {
    Wrapped { class: StableClass },
    Bare(StableClass),
}

impl ClassInput {
    fn into_class(self) -> StableClass {
        match self {
            ClassInput::Wrapped { class } | ClassInput::Bare(class) => class,
        }
    }
}

fn cmd_limit(input: &PathBuf) -> Result<(), CliError> {
    let wire: ArcFamilyJson = read_json(input)?;
    let family = wire.into_family()?;
    let nest = limits::coincidence_nest(&family)?;
    let class = limits::limit_stable_class(&family)?;
    print_json(&LimitOutput {
        class,
        nest: nest.members,
    });
    Ok(())
}

fn cmd_node_limit(input: &PathBuf) -> Result<(), CliError> {
    let wire: SectionsJson = read_json(input)?;
    let sections = wire.into_sections()?;
    let class = nodefam::node_limit(&sections)?;
    // contact levels come from the underlying arc computation
    let trunc = sections
        .iter()
        .flat_map(|s| [s.x.trunc(), s.y.trunc()])
        .min()
        .expect("node_limit rejects empty section lists");
    let family = limits::ArcFamily::new(
        sections
            .iter()
            .map(|s| vec![s.x.truncate_to(trunc), s.y.truncate_to(trunc)])
            .collect(),
    )?;
    let nest = limits::coincidence_nest(&family)?;
    print_json(&LimitOutput {
        class,
        nest: nest.members,
    });
    Ok(())
}

fn parse_tuple(tokens: &[String]) -> Result<Vec<Rat>, CliError> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<Rat>()
                .map_err(|e| CliError::Malformed(e.to_string()))
        })
        .collect()
}

fn cmd_theta(args: &[String]) -> Result<(), CliError> {
    // Manual flag handling so negative rationals pass through untouched.
    let mut tuple_tokens: Vec<String> = Vec::new();
    let mut versus_tokens: Vec<String> = Vec::new();
    let mut fiber = false;
    let mut in_versus = false;
    for tok in args {
        match tok.as_str() {
            "--fiber" => fiber = true,
            "--versus" => {
                if !fiber {
                    return Err(CliError::Malformed("--versus requires --fiber".to_owned()));
                }
                in_versus = true;
            }
            t if t.starts_with("--") => {
                return Err(CliError::Malformed(format!("unknown flag {}", t)));
            }
            t => {
                if in_versus {
                    versus_tokens.push(t.to_owned());
                } else {
                    tuple_tokens.push(t.to_owned());
                }
            }
        }
    }
    let tuple = parse_tuple(&tuple_tokens)?;
    if fiber {
        if versus_tokens.is_empty() {
            return Err(CliError::Malformed(
                "--fiber needs --versus <tuple>".to_owned(),
            ));
        }
        let versus = parse_tuple(&versus_tokens)?;
        let equivalent = nodefam::theta_fiber_equal(&tuple, &versus)?;
        if equivalent {
            let w = nodefam::theta_fiber_witness(&tuple, &versus)?
                .expect("equivalent tuples have a witness");
            let shift: Vec<String> = w.shift.iter().map(|r| r.to_string()).collect();
            println!(
                "equivalent: true, witness lambda={}, v=({})",
                w.lambda,
                shift.join(",")
            );
        } else {
            println!("equivalent: false");
        }
        return Ok(());
    }
    let class = nodefam::theta(&tuple)?;
    let screen = class.trees[0].screen.clone();
    print_json(&ThetaOutput { class, screen });
    Ok(())
}

fn cmd_strata(n: usize, dim: usize, count_only: bool) -> Result<(), CliError> {
    let nests = strata::enumerate_nests(n)?;
    if count_only {
        println!("{}", nests.count());
        return Ok(());
    }
    let mut out = String::new();
    for nest in nests {
        #[derive(Serialize)]
        struct Line {
            sets: Vec<Vec<usize>>,
            dim: usize,
        }
        let line = Line {
            sets: nest.sets(),
            dim: nest.stratum_dimension(dim),
        };
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string(&line).expect("serializable")
        );
        if out.len() > 1 << 20 {
            print!("{}", out);
            out.clear();
        }
    }
    print!("{}", out);
    Ok(())
}

fn cmd_degenerate(input: &PathBuf, genus: u32, dot: bool) -> Result<(), CliError> {
    let class = read_json::<ClassInput>(input)?.into_class();
    let class = class
        .normalize()
        .map_err(|e| CliError::Domain(format!("cannot normalize input class: {}", e)))?;
    let violations = class.validate();
    if !violations.is_empty() {
        let mut msg = String::from("input is not a valid stable class:");
        for v in violations {
            let _ = write!(msg, "\n  - {}", v);
        }
        return Err(CliError::Domain(msg));
    }
    let tree = dual::dual_tree(&class, genus)?;
    if dot {
        print!("{}", tree.to_dot());
    } else {
        print_json(&tree);
    }
    Ok(())
}

fn cmd_flop_check(lambda: Option<String>, symbolic: bool) -> Result<(), CliError> {
    let lambdas: Vec<flop::Lambda> = match (lambda, symbolic) {
        (Some(l), sym) => {
            let value: Rat = l
                .parse()
                .map_err(|e: fmclass::rat::ParseRatError| CliError::Malformed(e.to_string()))?;
            let mut set = vec![flop::Lambda::Value(value)];
            if sym {
                set.push(flop::Lambda::Symbolic);
            }
            set
        }
        (None, true) => vec![flop::Lambda::Symbolic],
        (None, false) => flop::lambda_test_set(),
    };

    let mut all_pass = true;
    let mut checks = 0usize;
    for chart in flop::big_resolution_charts() {
        let report = flop::verify_chart(&chart);
        all_pass &= report.pass();
        checks += 1;
        println!("{}", report);
    }
    for lambda in &lambdas {
        for family in [flop::ChartFamily::Small2, flop::ChartFamily::Small3] {
            for chart in flop::small_resolution_charts(family, lambda) {
                let report = flop::verify_chart(&chart);
                all_pass &= report.pass();
                checks += 1;
                println!("{}", report);
            }
        }
    }
    for lambda in &lambdas {
        let mut rulings: Vec<(String, String)> = Vec::new();
        for family in [flop::ChartFamily::Small2, flop::ChartFamily::Small3] {
            let report = flop::factor_big_through_small(family, lambda);
            let ok = report.pass();
            all_pass &= ok;
            checks += 1;
            println!(
                "factorization big -> {} (lambda={}): {} [{} charts]",
                family,
                lambda,
                if ok {
                    "all residuals zero"
                } else {
                    "NONZERO residual"
                },
                report.charts.len()
            );
            let survived: Vec<String> = report
                .charts
                .iter()
                .map(|c| {
                    c.surviving_exceptional_vars
                        .iter()
                        .cloned()
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            rulings.push((family.to_string(), survived.join(" ")));
        }
        let distinct = rulings.len() == 2 && rulings[0].1 != rulings[1].1;
        all_pass &= distinct;
        checks += 1;
        println!(
            "rulings (lambda={}): {} keeps [{}], {} keeps [{}] -> {}",
            lambda,
            rulings[0].0,
            rulings[0].1,
            rulings[1].0,
            rulings[1].1,
            if distinct { "distinct" } else { "NOT distinct" }
        );
    }
    println!(
        "{}: {} checks",
        if all_pass { "PASS" } else { "FAIL" },
        checks
    );
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Domain("flop verification failed".to_owned()))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Limit { input } => cmd_limit(&input),
        Command::NodeLimit { input } => cmd_node_limit(&input),
        Command::Theta { args } => cmd_theta(&args),
        Command::Strata { n, dim, count_only } => cmd_strata(n, dim, count_only),
        Command::Degenerate { input, genus, dot } => cmd_degenerate(&input, genus, dot),
        Command::FlopCheck {
            lambda,
            symbolic_lambda,
        } => cmd_flop_check(lambda, symbolic_lambda),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
