//! `endowed`: command-line driver for endowed-equilibrium experiments.
//!
//! Every verb loads one instance (file or generator), runs one library
//! operation and writes one report. Exit status: 0 on success or a Valid
//! verdict, 1 on an Invalid / Infeasible / Unsupportable verdict, 2 on bad
//! input, 3 if the library reports a broken internal guarantee.

mod input;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use endowed::equilibrium::{
    greedy_maximal, is_maximal, marginal_profile, support_construct, verify_endowed_equilibrium, welfare,
    EquilibriumCertificate, SupportOutcome, Witness,
};
use endowed::instances::GENERATORS;
use endowed::local_search::{is_local_optimum, local_search, support_local_optimum, LocalOptimality};
use endowed::lp::{
    endowment_gap_instance, min_supporting_alpha, perturbation_gap_check, round_two_player_subadditive,
    solve_config_lp, SupportingAlpha,
};
use endowed::valuations::MAX_CHECK_ITEMS;
use endowed::{Allocation, Error, Instance, Rational};
use serde_json::{json, Value};

use input::{parse_allocation, parse_certificate, parse_instance, parse_prices, parse_rational, Source};

#[derive(Parser, Debug)]
#[command(name = "endowed", version, about = "Endowed equilibria in combinatorial auctions")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalization, monotonicity, submodularity and subadditivity of every player.
    Check {
        #[command(flatten)]
        source: Source,
    },
    /// Single-item local search to a local optimum.
    LocalSearch {
        #[command(flatten)]
        source: Source,
        /// Starting owner array (default: everything unallocated).
        #[arg(long, allow_hyphen_values = true)]
        allocation: Option<String>,
        /// Include every improving move in the report.
        #[arg(long)]
        trace: bool,
    },
    /// Equilibrium verification and construction.
    #[command(subcommand)]
    Equilibrium(EquilibriumCommand),
    /// Configuration LP.
    #[command(subcommand)]
    Lp(LpCommand),
    /// Integrality gap and the minimal supporting intensity of every allocation.
    Gap {
        #[command(flatten)]
        source: Source,
    },
    /// Minimal endowment intensity supporting one allocation.
    AlphaMin {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        allocation: String,
    },
    /// Derandomized rounding of the LP optimum for two subadditive players.
    Round {
        #[command(flatten)]
        source: Source,
    },
    /// Perturb a two-player instance and compare its gaps with the predicted values.
    Perturb {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "1/10")]
        delta: String,
    },
    /// Print a generated instance as JSON.
    #[command(after_help = generators_help())]
    Generate {
        name: String,
        #[arg(long = "param", short = 'p', value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
enum EquilibriumCommand {
    /// Check an (allocation, prices, alpha) triple.
    Verify {
        #[command(flatten)]
        source: Source,
        /// JSON file with any of `allocation`, `prices`, `alpha`; flags override it.
        #[arg(long, value_name = "PATH")]
        certificate: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        allocation: Option<String>,
        #[arg(long)]
        prices: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Construct supporting prices for an allocation.
    Support {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        method: Method,
        /// Defaults to a greedy maximal allocation (maximal) or a local search result (local-opt).
        #[arg(long, allow_hyphen_values = true)]
        allocation: Option<String>,
        /// Intensity for local-opt (at least 2).
        #[arg(long, default_value = "2")]
        alpha: String,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Maximal,
    LocalOpt,
}

#[derive(Subcommand, Debug)]
enum LpCommand {
    /// Solve the configuration LP exactly.
    Solve {
        #[command(flatten)]
        source: Source,
    },
}

fn generators_help() -> String {
    format!("Generators: {}", GENERATORS.join(", "))
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// A finished command: the JSON report, its table rendering and the exit status.
struct Report {
    json: Value,
    /// Preformatted JSON that must keep its field order.
    raw: Option<String>,
    table: String,
    status: u8,
}

impl Report {
    fn ok(json: Value, table: String) -> Self {
        Report { json, table, raw: None, status: 0 }
    }

    fn verdict(json: Value, table: String, success: bool) -> Self {
        Report { json, table, raw: None, status: if success { 0 } else { 1 } }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            let out = match cli.format {
                Format::Json => match report.raw {
                    Some(raw) => raw,
                    None => serde_json::to_string_pretty(&report.json).expect("reports serialize") + "\n",
                },
                Format::Table => report.table,
            };
            print!("{out}");
            ExitCode::from(report.status)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Result<Report, CliError> {
    match command {
        Command::Check { source } => check(&source.load()?),
        Command::LocalSearch { source, allocation, trace } => {
            let inst = source.load()?;
            let start = match allocation {
                Some(raw) => parse_allocation(&raw)?,
                None => Allocation::empty(inst.item_count()),
            };
            run_local_search(&inst, &start, trace)
        }
        Command::Equilibrium(EquilibriumCommand::Verify { source, certificate, allocation, prices, alpha }) => {
            let inst = source.load()?;
            let file = certificate.as_deref().map(parse_certificate).transpose()?;
            let (mut a, mut p, mut al) = match file {
                Some(f) => (f.allocation, f.prices, f.alpha),
                None => (None, None, None),
            };
            if let Some(raw) = allocation {
                a = Some(parse_allocation(&raw)?);
            }
            if let Some(raw) = prices {
                p = Some(parse_prices(&raw)?);
            }
            if let Some(raw) = alpha {
                al = Some(parse_rational(&raw)?);
            }
            let missing = |what: &str| CliError::Input(format!("equilibrium verify needs {what}"));
            let a = a.ok_or_else(|| missing("an allocation"))?;
            let p = p.ok_or_else(|| missing("prices"))?;
            let al = al.ok_or_else(|| missing("alpha"))?;
            let cert = verify_endowed_equilibrium(&inst, &a, &p, &al)?;
            Ok(certificate_report(&inst, &cert))
        }
        Command::Equilibrium(EquilibriumCommand::Support { source, method, allocation, alpha }) => {
            let inst = source.load()?;
            let a = allocation.as_deref().map(parse_allocation).transpose()?;
            match method {
                Method::Maximal => support_maximal(&inst, a.unwrap_or_else(|| greedy_maximal(&inst))),
                Method::LocalOpt => {
                    let o = match a {
                        Some(a) => a,
                        None => local_search(&inst, &Allocation::empty(inst.item_count()))?.0,
                    };
                    support_local(&inst, &o, &parse_rational(&alpha)?)
                }
            }
        }
        Command::Lp(LpCommand::Solve { source }) => {
            let inst = source.load()?;
            let x = solve_config_lp(&inst)?;
            let mut table = format!("objective  {}\nintegral   {}\n\nplayer  bundle  weight\n", x.objective(), x.is_integral());
            for (i, s, w) in x.iter() {
                let _ = writeln!(table, "{i:<6}  {:<6}  {w}", s.to_string());
            }
            let mut json = to_json(&x);
            json["integral"] = json!(x.is_integral());
            Ok(Report::ok(json, table))
        }
        Command::Gap { source } => {
            let inst = source.load()?;
            let report = endowment_gap_instance(&inst)?;
            Ok(Report::ok(to_json(&report), report.to_table(inst.player_count())))
        }
        Command::AlphaMin { source, allocation } => {
            let inst = source.load()?;
            let a = parse_allocation(&allocation)?;
            let result = min_supporting_alpha(&inst, &a)?;
            let maximal = is_maximal(&inst, &a)?;
            let mut json = to_json(&result);
            json["allocation"] = to_json(&a);
            json["maximal"] = json!(maximal);
            let table = match &result {
                SupportingAlpha::Supported { alpha, attained, .. } => {
                    format!("allocation  {}\nmin alpha   {alpha}\nattained    {attained}\n", show(&inst, &a))
                }
                SupportingAlpha::Unsupportable => {
                    let why = if maximal { "" } else { " (not maximal)" };
                    format!("allocation  {}\nmin alpha   unsupportable{why}\n", show(&inst, &a))
                }
            };
            Ok(Report::verdict(json, table, result.is_supportable()))
        }
        Command::Round { source } => {
            let inst = source.load()?;
            let x = solve_config_lp(&inst)?;
            let r = round_two_player_subadditive(&inst, &x)?;
            let mut json = to_json(&r);
            json["lp_value"] = to_json(x.objective());
            let table = format!(
                "lp value          {}\nsampled player    {}\nexpected welfare  {}\nguarantee         {}\nbest outcome      {} worth {}\n",
                x.objective(),
                r.sampled_player,
                r.expected_welfare,
                r.guarantee,
                show(&inst, &r.best),
                r.best_welfare
            );
            Ok(Report::ok(json, table))
        }
        Command::Perturb { source, delta } => {
            let inst = source.load()?;
            let r = perturbation_gap_check(&inst, &parse_rational(&delta)?)?;
            let gap = match r.perturbed_endowment_gap.alpha() {
                Some(a) => a.to_string(),
                None => "unbounded".into(),
            };
            let table = format!(
                "integrality gap y             {}\ndelta                         {}\nper-item bonus                {}\npredicted gap x               {}\nperturbed integrality gap     {}\nperturbed endowment gap       {gap}\nlower bound 1/(2-x)           {}\nholds                         {}\n",
                r.y,
                r.delta,
                r.epsilon,
                r.x,
                r.perturbed_integrality_gap,
                r.lower_bound,
                r.holds()
            );
            let mut json = to_json(&r);
            json["holds"] = json!(r.holds());
            Ok(Report::verdict(json, table, r.holds()))
        }
        Command::Generate { name, params, seed } => {
            let inst = input::spec(&name, &params, seed)?.resolve()?;
            // Round-trip through the parser so the printed form is exactly what a reader accepts.
            let text = serde_json::to_string(&inst).expect("instances serialize");
            let inst = parse_instance(&text)?;
            let classes: Vec<&str> = inst.players().iter().map(|v| v.class().name()).collect();
            let table = format!(
                "label    {}\nitems    {}\nplayers  {} ({})\n",
                inst.label().unwrap_or("-"),
                inst.item_count(),
                inst.player_count(),
                classes.join(", ")
            );
            let raw = serde_json::to_string_pretty(&inst).expect("instances serialize") + "\n";
            Ok(Report { raw: Some(raw), ..Report::ok(to_json(&inst), table) })
        }
    }
}

fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports serialize")
}

fn show(inst: &Instance, a: &Allocation) -> String {
    let parts: Vec<String> = a.bundles(inst.player_count()).iter().map(|b| b.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn check(inst: &Instance) -> Result<Report, CliError> {
    let m = inst.item_count();
    let mut players = Vec::new();
    let mut table = format!("items  {m}\n\nplayer  class  normalized  monotone  submodular  subadditive\n");
    for (i, v) in inst.players().iter().enumerate() {
        let normalized = v.is_normalized()?.holds();
        let (monotone, submodular, subadditive) = if m <= MAX_CHECK_ITEMS {
            (
                Some(v.is_monotone()?.holds()),
                Some(v.is_submodular()?.holds()),
                Some(v.is_subadditive()?.holds()),
            )
        } else {
            (None, None, None)
        };
        let cell = |b: Option<bool>| b.map_or("skipped".to_string(), |b| b.to_string());
        let _ = writeln!(
            table,
            "{i:<6}  {}  {normalized}  {}  {}  {}",
            v.class().name(),
            cell(monotone),
            cell(submodular),
            cell(subadditive)
        );
        players.push(json!({
            "player": i,
            "class": v.class().name(),
            "normalized": normalized,
            "monotone": monotone,
            "submodular": submodular,
            "subadditive": subadditive,
        }));
    }
    Ok(Report::ok(json!({ "items": m, "players": players }), table))
}

fn run_local_search(inst: &Instance, start: &Allocation, trace: bool) -> Result<Report, CliError> {
    let (o, t) = local_search(inst, start)?;
    let w = welfare(inst, &o)?;
    let mut json = json!({
        "initial": to_json(&t.initial),
        "final": to_json(&o),
        "welfare": to_json(&w),
        "moves": t.move_count(),
    });
    let mut table = format!(
        "initial  {}\nfinal    {}\nwelfare  {w}\nmoves    {}\n",
        show(inst, &t.initial),
        show(inst, &o),
        t.move_count()
    );
    if trace {
        json["trace"] = to_json(&t.moves);
        table.push('\n');
        table.push_str(&t.to_json_lines());
    }
    Ok(Report::ok(json, table))
}

fn certificate_report(inst: &Instance, cert: &EquilibriumCertificate) -> Report {
    let prices: Vec<String> = cert.prices.as_slice().iter().map(Rational::to_string).collect();
    let mut table = format!(
        "allocation  {}\nprices      ({})\nalpha       {}\nverdict     {}\n",
        show(inst, &cert.allocation),
        prices.join(", "),
        cert.alpha,
        if cert.is_valid() { "valid" } else { "invalid" }
    );
    match &cert.witness {
        Some(Witness::Deviation { player, bundle, gain }) => {
            let _ = writeln!(table, "witness     player {player} gains {gain} with {bundle}");
        }
        Some(Witness::PricedUnallocatedItem { item, price }) => {
            let _ = writeln!(table, "witness     unallocated item {item} has price {price}");
        }
        None => {}
    }
    Report::verdict(to_json(cert), table, cert.is_valid())
}

fn support_maximal(inst: &Instance, a: Allocation) -> Result<Report, CliError> {
    match support_construct(inst, &a)? {
        SupportOutcome::Supported(cert) => Ok(certificate_report(inst, &cert)),
        SupportOutcome::NotMaximal => {
            let profile = marginal_profile(inst, &a)?;
            let json = json!({
                "allocation": to_json(&a),
                "status": "not_maximal",
                "zero_set": to_json(&profile.zero_set),
            });
            let table = format!(
                "allocation  {}\nverdict     not maximal (some player gains from the zero-contribution items {})\n",
                show(inst, &a),
                profile.zero_set
            );
            Ok(Report::verdict(json, table, false))
        }
    }
}

fn support_local(inst: &Instance, o: &Allocation, alpha: &Rational) -> Result<Report, CliError> {
    let why = match is_local_optimum(inst, o)? {
        LocalOptimality::LocalOptimum => return Ok(certificate_report(inst, &support_local_optimum(inst, o, alpha)?)),
        LocalOptimality::Unallocated { item } => json!({ "kind": "unallocated", "item": item }),
        LocalOptimality::Improvable(mv) => json!({ "kind": "improvable", "move": to_json(&mv) }),
    };
    let table = format!("allocation  {}\nverdict     not a local optimum: {why}\n", show(inst, o));
    let json = json!({ "allocation": to_json(o), "status": "not_local_optimum", "reason": why });
    Ok(Report::verdict(json, table, false))
}
