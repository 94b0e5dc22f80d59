use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::json;

use bidding_core::fixpoint::{sigma_vi, solve_energy};
use bidding_core::format::{budget_text, parse_game, parse_thresholds};
use bidding_core::horizon::mu_n_tables;
use bidding_core::oracle::{dp_solve, oracle_threshold};
use bidding_core::sim::{
    mean_payoff_of, mean_payoff_strategies, mean_payoff_winners, optimal_value, parse_target, prefix_average,
    run_play, trace_lines, MeanPayoffVerdict, Outcome, Play, PlayOptions,
};
use bidding_core::strategies::{sigma_agn, tau_agn_from, PositionalStrategy, RandomStrategy, Strategy, TauCycleSkip};
use bidding_core::thresholds::{check_average, complement, thresholds, ThresholdMap};
use bidding_core::turnbased::{certify, decide_threshold, positional_strategies, Rejection, Verdict};
use bidding_core::{Arena, Budget, Configuration, Player};

#[derive(Parser)]
#[command(name = "bidding", version, about = "Energy and mean-payoff discrete-bidding games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the energy threshold table Energy(v, B).
    Solve {
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Print Th, Th' and the average-property verdicts.
    Thresholds { game: PathBuf },
    /// Print a positional budget-agnostic strategy extracted from the certificate game.
    Strategy {
        game: PathBuf,
        #[arg(long, value_enum)]
        player: Side,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Play two strategies against each other and print the trace.
    Simulate {
        game: PathBuf,
        /// Initial configuration VERTEX:BUDGET, the budget being Pres's (Max's).
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 0)]
        energy: i64,
        #[arg(long, value_enum, default_value_t = PresName::Vi)]
        pres: PresName,
        #[arg(long, value_enum, default_value_t = ConsName::CycleSkip)]
        cons: ConsName,
        /// Step limit; defaults to 10·|V|·(2k+2)·(|V|·k·W+1).
        #[arg(long)]
        steps: Option<u64>,
        /// Mean-payoff target for `--cons vi`: `auto` or P/Q.
        #[arg(long, default_value = "auto")]
        target: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a threshold file; exit 0 on ACCEPT, 1 on REJECT.
    Certify { game: PathBuf, thresholds: PathBuf },
    /// Decide Th(v) ⪰ level; exit 0 when true, 1 when false.
    Decide {
        game: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        level: Budget,
    },
    /// Compare μ_n with the brute-force reachability DP for n up to the horizon.
    Oracle {
        game: PathBuf,
        #[arg(long, default_value_t = 6)]
        horizon: u64,
    },
    /// Winners of the mean-payoff game with threshold P/Q from every configuration.
    Meanpayoff {
        game: PathBuf,
        #[arg(long)]
        target: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Pres,
    Cons,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum PresName {
    Vi,
    Agn,
    Positional,
    Random,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum ConsName {
    CycleSkip,
    Agn,
    Positional,
    Random,
    Vi,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit_error("usage", &e.to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            emit_error("error", &format!("{e:#}"));
            ExitCode::from(2)
        }
    }
}

fn emit_error(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message.trim_end() }));
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_game(path: &Path) -> Result<Arena> {
    let text = read_text(path)?;
    parse_game(&text).with_context(|| format!("parsing {}", path.display()))
}

fn vertex(arena: &Arena, name: &str) -> Result<usize> {
    arena.vertex(name).ok_or_else(|| anyhow!("unknown vertex {name:?}"))
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Solve { game, format } => solve(&load_game(&game)?, format),
        Command::Thresholds { game } => show_thresholds(&load_game(&game)?),
        Command::Strategy { game, player, format } => strategy(&load_game(&game)?, player, format),
        Command::Simulate {
            game,
            init,
            energy,
            pres,
            cons,
            steps,
            target,
            seed,
        } => simulate(&load_game(&game)?, &init, energy, pres, cons, steps, &target, seed),
        Command::Certify { game, thresholds } => {
            let arena = load_game(&game)?;
            let t = parse_thresholds(&arena, &read_text(&thresholds)?)
                .with_context(|| format!("parsing {}", thresholds.display()))?;
            match certify(&arena, &t) {
                Verdict::Accept => {
                    println!("ACCEPT");
                    Ok(true)
                }
                Verdict::Reject(r) => {
                    println!("REJECT: {}", rejection_text(&arena, &r));
                    Ok(false)
                }
            }
        }
        Command::Decide { game, vertex: v, level } => {
            let arena = load_game(&game)?;
            let v = vertex(&arena, &v)?;
            if level > arena.top() {
                bail!("level {level} exceeds k+1");
            }
            let answer = decide_threshold(&arena, v, level);
            println!("{answer}");
            Ok(answer)
        }
        Command::Oracle { game, horizon } => oracle(&load_game(&game)?, horizon),
        Command::Meanpayoff { game, target } => {
            let arena = load_game(&game)?;
            let target = parse_target(&target)?;
            meanpayoff(&arena, target)
        }
    }
}

fn solve(arena: &Arena, format: Format) -> Result<bool> {
    let fp = solve_energy(arena);
    match format {
        Format::Table => {
            let header: Vec<String> = arena.budgets().map(|b| b.to_string()).collect();
            println!("vertex {}", header.join(" "));
            for v in 0..arena.num_vertices() {
                let row: Vec<String> = arena.budgets().map(|b| fp.get(v, b).to_string()).collect();
                println!("{} {}", arena.name(v), row.join(" "));
            }
        }
        Format::Json => {
            let rows: serde_json::Map<String, serde_json::Value> = (0..arena.num_vertices())
                .map(|v| {
                    let row: serde_json::Map<String, serde_json::Value> = arena
                        .budgets()
                        .map(|b| (b.to_string(), json!(fp.get(v, b).to_string())))
                        .collect();
                    (arena.name(v).to_string(), row.into())
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&json!({ "energy": rows }))?);
        }
    }
    Ok(true)
}

fn average_line(arena: &Arena, label: &str, t: &ThresholdMap) -> String {
    match check_average(arena, t) {
        Ok(()) => format!("{label}: OK"),
        Err(v) => format!(
            "{label}: FAIL at {} (expected {}, found {})",
            arena.name(v.vertex),
            budget_text(t, v.expected),
            budget_text(t, v.actual)
        ),
    }
}

fn show_thresholds(arena: &Arena) -> Result<bool> {
    let th = thresholds(arena, &solve_energy(arena));
    let tc = complement(&th);
    println!("vertex th th'");
    for v in 0..arena.num_vertices() {
        println!(
            "{} {} {}",
            arena.name(v),
            budget_text(&th, th.get(v)),
            budget_text(&tc, tc.get(v))
        );
    }
    println!("{}", average_line(arena, "average-property", &th));
    println!("{}", average_line(arena, "average-property (complement)", &tc));
    Ok(true)
}

fn strategy(arena: &Arena, player: Side, format: Format) -> Result<bool> {
    let th = thresholds(arena, &solve_energy(arena));
    if let Verdict::Reject(r) = certify(arena, &th) {
        bail!("computed thresholds failed certification: {}", rejection_text(arena, &r));
    }
    let (pres, cons) = positional_strategies(arena, &th)?;
    let (s, t, name) = match player {
        Side::Pres => (&pres, th.clone(), "pres"),
        Side::Cons => (&cons, complement(&th), "cons"),
    };
    let k = arena.total_budget();
    let mut entries = Vec::new();
    for v in 0..arena.num_vertices() {
        if t.is_top(v) {
            continue;
        }
        for own in [t.get(v), t.get(v).succ()] {
            if own > arena.total() {
                continue;
            }
            let pres_budget = match player {
                Side::Pres => own,
                Side::Cons => own.complement(k),
            };
            if let Some(a) = s.action_at(&Configuration::new(v, pres_budget)) {
                entries.push((v, own, a));
            }
        }
    }
    match format {
        Format::Table => {
            println!("vertex budget bid target");
            for (v, own, a) in &entries {
                println!("{} {} {} {}", arena.name(*v), own, a.bid, arena.name(a.target));
            }
        }
        Format::Json => {
            let list: Vec<_> = entries
                .iter()
                .map(|(v, own, a)| {
                    json!({
                        "vertex": arena.name(*v),
                        "budget": own.to_string(),
                        "bid": a.bid.to_string(),
                        "target": arena.name(a.target),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&json!({ "player": name, "entries": list }))?);
        }
    }
    Ok(true)
}

fn parse_init(arena: &Arena, s: &str) -> Result<Configuration> {
    let (v, b) = s
        .rsplit_once(':')
        .ok_or_else(|| anyhow!("--init expects VERTEX:BUDGET, got {s:?}"))?;
    let b: Budget = b.parse()?;
    if b > arena.total() {
        bail!("budget {b} exceeds the total {}", arena.total());
    }
    Ok(Configuration::new(vertex(arena, v)?, b))
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    arena: &Arena,
    init: &str,
    energy: i64,
    pres: PresName,
    cons: ConsName,
    steps: Option<u64>,
    target: &str,
    seed: u64,
) -> Result<bool> {
    let init = parse_init(arena, init)?;
    let mean_payoff = cons == ConsName::Vi;
    let mut opts = if mean_payoff {
        PlayOptions::mean_payoff(arena)
    } else {
        PlayOptions::energy(arena)
    };
    if let Some(n) = steps {
        opts = opts.with_steps(n);
    }
    let play: Play = if mean_payoff {
        if pres != PresName::Vi {
            bail!("--cons vi plays the mean-payoff game and needs --pres vi");
        }
        let target = if target == "auto" {
            optimal_value(arena, init)
        } else {
            parse_target(target)?
        };
        println!("# target {target}");
        let (mut max, mut min) = mean_payoff_strategies(arena, target);
        run_play(arena, init, energy, &mut max, &mut min, opts)?
    } else {
        let fp = solve_energy(arena);
        let th = thresholds(arena, &fp);
        let needs_positional = pres == PresName::Positional || cons == ConsName::Positional;
        let lifted = if needs_positional {
            Some(positional_strategies(arena, &th)?)
        } else {
            None
        };
        let mut p: Box<dyn Strategy> = match pres {
            PresName::Vi => Box::new(sigma_vi(arena, &fp)),
            PresName::Agn => Box::new(sigma_agn(arena, &fp, &th)),
            PresName::Positional => Box::new(lifted.as_ref().unwrap().0.clone()),
            PresName::Random => Box::new(RandomStrategy::new(Player::Pres, seed)),
        };
        let mut c: Box<dyn Strategy> = match cons {
            ConsName::CycleSkip => Box::new(TauCycleSkip::adversary(arena, &fp, init)?),
            ConsName::Agn => Box::new(tau_agn_from(arena, &fp)),
            ConsName::Positional => Box::new(total_cons(arena, &lifted.as_ref().unwrap().1)),
            ConsName::Random => Box::new(RandomStrategy::new(Player::Cons, seed.wrapping_add(1))),
            ConsName::Vi => unreachable!(),
        };
        run_play(arena, init, energy, p.as_mut(), c.as_mut(), opts)?
    };
    println!("# step vertex budget pres_bid cons_bid winner weight energy");
    for line in trace_lines(arena, &play.trace) {
        println!("{line}");
    }
    match play.outcome {
        Outcome::ConsWin { step } => println!("outcome: cons-win at step {step}"),
        Outcome::PresSurvived => {
            println!("outcome: pres-survived after {} steps", play.trace.len());
            if let Some(avg) = prefix_average(&play.trace) {
                println!("prefix-average: {avg} (approximate)");
            }
        }
        Outcome::CycleDetected { period, weight_sum, .. } => {
            let names: Vec<&str> = play.cycle().unwrap().iter().map(|&v| arena.name(v)).collect();
            println!("outcome: cycle ({}) period {period} weight {weight_sum}", names.join(" "));
            println!("mean-payoff: {}", mean_payoff_of(&play)?);
        }
    }
    Ok(true)
}

/// Cons positional strategy with a zero-bid default outside its domain.
fn total_cons(arena: &Arena, s: &PositionalStrategy) -> PositionalStrategy {
    PositionalStrategy::from_fn(arena, Player::Cons, |cfg| {
        Some(s.action_at(cfg).unwrap_or(bidding_core::Action::new(
            Budget::ZERO,
            arena.neighbors(cfg.vertex)[0].target,
        )))
    })
}

fn rejection_text(arena: &Arena, r: &Rejection) -> String {
    match r {
        Rejection::AverageProperty { vertex } => {
            format!("average property fails at {}", arena.name(*vertex))
        }
        Rejection::PresSideUnbounded { vertex, budget } => {
            format!("Pres cannot win from {}:{budget}", arena.name(*vertex))
        }
        Rejection::ConsSideBounded { vertex, cons_budget } => {
            format!("Cons cannot win from {} with Cons budget {cons_budget}", arena.name(*vertex))
        }
        Rejection::Structure(s) => s.clone(),
    }
}

fn oracle(arena: &Arena, horizon: u64) -> Result<bool> {
    let tables = mu_n_tables(arena, horizon);
    let dp = dp_solve(arena, horizon)?;
    let mut ok = true;
    for (n, table) in tables.iter().enumerate() {
        let dp_table = dp.energy_table(arena, n as u64);
        let mismatches: Vec<String> = (0..arena.num_vertices())
            .flat_map(|v| arena.budgets().map(move |b| (v, b)))
            .filter(|&(v, b)| table.get(v, b) != dp_table.get(v, b))
            .map(|(v, b)| {
                format!(
                    "{}:{} mu={} dp={}",
                    arena.name(v),
                    b,
                    table.get(v, b),
                    dp_table.get(v, b)
                )
            })
            .collect();
        if mismatches.is_empty() {
            println!("n={n}: agree");
        } else {
            ok = false;
            println!("n={n}: {} mismatches: {}", mismatches.len(), mismatches.join(", "));
        }
    }
    let th = thresholds(arena, &solve_energy(arena));
    match oracle_threshold(arena, 1 << 16) {
        Ok(o) if o == th => println!("thresholds: agree"),
        Ok(o) => {
            ok = false;
            let show = |t: &ThresholdMap| {
                (0..arena.num_vertices())
                    .map(|v| format!("{}={}", arena.name(v), budget_text(t, t.get(v))))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            println!("thresholds: differ, fixpoint {} oracle {}", show(&th), show(&o));
        }
        Err(e) => println!("thresholds: oracle skipped ({e})"),
    }
    Ok(ok)
}

fn meanpayoff(arena: &Arena, target: Ratio<i64>) -> Result<bool> {
    println!("# target {target}; weights q*w - p");
    println!("vertex budget winner");
    for (cfg, verdict) in mean_payoff_winners(arena, target) {
        let w = match verdict {
            MeanPayoffVerdict::Max => "max",
            MeanPayoffVerdict::MaxAtBoundary => "max (boundary)",
            MeanPayoffVerdict::Min => "min",
        };
        println!("{} {} {}", arena.name(cfg.vertex), cfg.pres_budget, w);
    }
    Ok(true)
}
