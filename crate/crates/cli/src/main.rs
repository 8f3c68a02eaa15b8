use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gl2kit::classify::{classify, verify_isogeny_facts};
use gl2kit::invariants::label_check;
use gl2kit::registry::{SHIPPED_CURVES, SHIPPED_FACTS, SHIPPED_GROUPS};
use gl2kit::{CurveInvariants, Registries, RegistryError, Subgroup, DEFAULT_CAP};

#[derive(Parser)]
#[command(name = "gl2", version, about = "Open subgroups of GL(2) and curious Galois groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Group registry file
    #[arg(long, global = true, value_name = "FILE")]
    groups: Option<PathBuf>,
    /// Curve registry file
    #[arg(long, global = true, value_name = "FILE")]
    curves: Option<PathBuf>,
    /// Facts file (names, X_H records, witnesses, attestations, isogenies)
    #[arg(long, global = true, value_name = "FILE")]
    witnesses: Option<PathBuf>,
    /// Maximum group order formed by closure
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct LabelArg {
    /// Registry label, named product, or product key `A*B`
    #[arg(long)]
    label: String,
}

#[derive(Subcommand)]
enum Command {
    /// Genus of X_H
    Genus(LabelArg),
    /// Index of H in GL(2)
    Index(LabelArg),
    /// Whether H is arithmetically admissible
    Admissible(LabelArg),
    /// Level of H
    Level(LabelArg),
    /// Direct product of two groups of coprime level
    Product {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Subgroups of index 2 or 3
    Subgroups {
        #[arg(long)]
        label: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        index: u8,
        /// Keep only admissible subgroups
        #[arg(long)]
        admissible: bool,
        /// Keep only subgroups of genus at most G
        #[arg(long, value_name = "G")]
        max_genus: Option<u64>,
    },
    /// Quadratic twists of H
    Twists(LabelArg),
    /// Conjugacy test
    Conjugate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Curiosity verdicts for products over one or two primes
    Classify {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
    /// Checks every registry label against computed invariants
    CheckLabels,
    /// Checks the recorded isogeny facts
    VerifyIsogenies,
}

enum Outcome {
    Ok,
    Failed,
}

fn read_or(path: &Option<PathBuf>, shipped: &'static str) -> Result<(String, String), RegistryError> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map(|t| (p.display().to_string(), t))
            .map_err(|e| RegistryError::Io(p.display().to_string(), e.to_string())),
        None => Ok(("<shipped>".to_string(), shipped.to_string())),
    }
}

fn load(g: &Global) -> Result<Registries> {
    let groups = read_or(&g.groups, SHIPPED_GROUPS)?;
    let curves = read_or(&g.curves, SHIPPED_CURVES)?;
    let facts = read_or(&g.witnesses, SHIPPED_FACTS)?;
    Ok(Registries::from_texts(
        (&groups.0, &groups.1),
        (&curves.0, &curves.1),
        (&facts.0, &facts.1),
    )?)
}

fn invariants(reg: &Registries, label: &str) -> Result<CurveInvariants> {
    let factors = reg.factors(label).map_err(|e| anyhow!(e))?;
    Ok(CurveInvariants::of_product(&factors)?)
}

fn resolve(reg: &Registries, label: &str, cap: usize) -> Result<Subgroup> {
    reg.resolve(label, cap).with_context(|| format!("cannot form {label}"))
}

/// Level and index of `h` with the genus of its modular curve, which ignores -Id.
fn describe(h: &Subgroup, cap: usize) -> Result<String> {
    let genus = CurveInvariants::compute(&h.with_minus_id(cap)?)?.genus;
    Ok(format!(
        "level={} index={} genus={} admissible={} modulus={} gens={}",
        h.level()?,
        h.index(),
        genus,
        gl2kit::invariants::is_admissible(h),
        h.modulus(),
        gens(h)
    ))
}

fn gens(h: &Subgroup) -> String {
    h.generators()
        .iter()
        .map(|g| g.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn display_name(reg: &Registries, label: &str) -> Result<String> {
    let key = reg.canonical(label).map_err(|e| anyhow!(e))?;
    Ok(reg.name_of(&key).map(str::to_string).unwrap_or(key))
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = &cli.global;
    if let Some(jobs) = g.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()?;
    }
    let reg = load(g)?;
    match &cli.command {
        Command::Genus(a) => {
            let inv = invariants(&reg, &a.label)?;
            println!("genus={} index={} level={}", inv.genus, inv.index, inv.level);
        }
        Command::Index(a) => println!("index={}", invariants(&reg, &a.label)?.index),
        Command::Level(a) => println!("level={}", invariants(&reg, &a.label)?.level),
        Command::Admissible(a) => {
            let factors = reg.factors(&a.label).map_err(|e| anyhow!(e))?;
            let ok = factors.iter().all(|h| gl2kit::invariants::is_admissible(h));
            println!("admissible={ok}");
        }
        Command::Product { left, right } => {
            let key = format!("{left}*{right}");
            let h = resolve(&reg, &key, g.cap)?;
            println!("{} {}", display_name(&reg, &key)?, describe(&h, g.cap)?);
        }
        Command::Subgroups {
            label,
            index,
            admissible,
            max_genus,
        } => {
            let h = resolve(&reg, label, g.cap)?;
            let subs = h.subgroups_of_index(*index as usize, g.cap)?;
            let mut lines = Vec::new();
            for k in subs {
                let adm = gl2kit::invariants::is_admissible(&k);
                if *admissible && !adm {
                    continue;
                }
                if !k.det_image_is_full() {
                    if max_genus.is_none() {
                        lines.push(format!(
                            "index={} genus=none admissible=false modulus={} gens={}",
                            h.index() * *index as u64,
                            k.modulus(),
                            gens(&k)
                        ));
                    }
                    continue;
                }
                let genus = CurveInvariants::compute(&k.with_minus_id(g.cap)?)?.genus;
                if max_genus.is_some_and(|m| genus > m) {
                    continue;
                }
                lines.push(describe(&k, g.cap)?);
            }
            lines.sort();
            println!("{} subgroups of index {index} in {label}", lines.len());
            for l in lines {
                println!("{l}");
            }
        }
        Command::Twists(a) => {
            let h = resolve(&reg, &a.label, g.cap)?;
            let twists = h.quadratic_twists(g.cap)?;
            println!("{} twists of {}", twists.len(), a.label);
            for t in twists {
                println!("minus_id={} {}", t.contains_minus_id(), describe(&t, g.cap)?);
            }
        }
        Command::Conjugate { a, b } => {
            let ha = resolve(&reg, a, g.cap)?;
            let hb = resolve(&reg, b, g.cap)?;
            if ha.modulus() != hb.modulus() {
                bail!("{a} has modulus {} but {b} has modulus {}", ha.modulus(), hb.modulus());
            }
            match Subgroup::are_conjugate(&ha, &hb)? {
                Some(x) => println!("conjugate by {x}"),
                None => println!("not conjugate"),
            }
        }
        Command::Classify { primes } => {
            let report = classify(&reg, primes, g.cap)?;
            for v in &report.verdicts {
                println!("{v}");
            }
            let curious = report.curious();
            println!("curious {}: {}", curious.len(), curious.join(", "));
            let unknown = report.count(gl2kit::Status::UnknownNeedsData);
            if unknown > 0 {
                println!("unknown {unknown}");
                return Ok(Outcome::Failed);
            }
        }
        Command::CheckLabels => {
            let mut failed = 0;
            for entry in &reg.groups {
                let report = label_check(&entry.label, &entry.group);
                if !report.pass {
                    failed += 1;
                }
                println!("{report}");
            }
            for (name, key) in &reg.names {
                let want = name.parse::<gl2kit::Label>().ok().map(|l| (l.level, l.index, l.genus));
                match invariants(&reg, key) {
                    Ok(inv) => {
                        let pass = want.is_none_or(|w| w == inv.triple());
                        if !pass {
                            failed += 1;
                        }
                        let status = if pass { "PASS" } else { "FAIL" };
                        println!(
                            "{name} computed={}.{}.{} status={status} product={key}",
                            inv.level, inv.index, inv.genus
                        );
                    }
                    Err(e) => {
                        failed += 1;
                        println!("{name} computed=? status=FAIL ({e}) product={key}");
                    }
                }
            }
            println!("{} labels, {failed} failed", reg.groups.len() + reg.names.len());
            if failed > 0 {
                return Ok(Outcome::Failed);
            }
        }
        Command::VerifyIsogenies => {
            let results = verify_isogeny_facts(&reg);
            let failed = results.iter().filter(|r| !r.passed).count();
            for r in &results {
                println!("{r}");
            }
            println!("{} facts, {failed} failed", results.len());
            if failed > 0 {
                return Ok(Outcome::Failed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
