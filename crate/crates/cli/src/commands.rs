use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde_json::{json, Value};

use cubehash::analysis::{self, AsymptoticParams};
use cubehash::distdist::distance_distribution;
use cubehash::harness::{self, ExperimentConfig};
use cubehash::optsets::{self, GeneratorSet};
use cubehash::tables::{self, OptimalRow};
use cubehash::DistDist;

use crate::output::{Cell, Format, Output};
use crate::{Cli, Command, GensCommand, Operand, SourceArgs};

/// Budget for expanding generator sets given on the command line.
const EXPAND_BUDGET: usize = 1 << 20;

/// Roman-numeral table names.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "I", alias = "i", alias = "1")]
    I,
    #[value(name = "II", alias = "ii", alias = "2")]
    II,
    #[value(name = "III", alias = "iii", alias = "3")]
    III,
    #[value(name = "IV", alias = "iv", alias = "4")]
    IV,
    #[value(name = "V", alias = "v", alias = "5")]
    V,
}

struct Source {
    label: String,
    ddf: DistDist,
    code: Option<cubehash::BlockCode>,
}

fn resolve(op: &Operand) -> Result<Source> {
    Ok(match op {
        Operand::Code(spec) => {
            let code = spec.build().with_context(|| format!("building {spec}"))?;
            Source {
                label: spec.to_string(),
                ddf: code.dist_dist()?,
                code: Some(code),
            }
        }
        Operand::Set(s) => Source {
            label: format!("set:{}", s.to_literal()),
            ddf: distance_distribution(s),
            code: None,
        },
        Operand::Gens(g) => Source {
            label: format!("gens:{g}"),
            ddf: distance_distribution(&optsets::expand_generators(g, EXPAND_BUDGET)?),
            code: None,
        },
    })
}

fn source(args: &SourceArgs) -> Result<Source> {
    let op = if let Some(c) = &args.code {
        Operand::Code(c.clone())
    } else if let Some(s) = &args.set {
        Operand::Set(s.0.clone())
    } else if let Some(g) = &args.gens {
        Operand::Gens(g.clone())
    } else {
        bail!("one of --code, --set, --gens is required");
    };
    resolve(&op)
}

fn generators_cell(gens: &[GeneratorSet]) -> Cell {
    Cell::Text(
        gens.iter()
            .map(|g| format!("<{}>", g.power_notation()))
            .collect::<Vec<_>>()
            .join("; "),
    )
}

fn literals_cell(gens: &[GeneratorSet]) -> Cell {
    Cell::Text(gens.iter().map(ToString::to_string).collect::<Vec<_>>().join(";"))
}

/// Runs a command and returns its output with the command's default format.
pub fn run(cli: &Cli) -> Result<(Output, Format)> {
    match &cli.command {
        Command::Ddf(args) => ddf(args),
        Command::Prob { source: s, gamma } => prob(s, gamma),
        Command::Crossover { lhs, rhs } => crossover(lhs, rhs),
        Command::Alpha { m } => alpha(m),
        Command::Asymptotic {
            gamma,
            delta,
            steps,
            lo,
            hi,
        } => asymptotic(*gamma, *delta, *steps, *lo, *hi),
        Command::Enumerate {
            size,
            dim,
            count_only,
        } => enumerate(*size, *dim, *count_only),
        Command::Optimal { t, dim } => optimal(*t, dim),
        Command::Gens(g) => gens(g),
        Command::Bench {
            code,
            gamma,
            m,
            trials,
            max_rounds,
            csv,
        } => {
            let cfg = ExperimentConfig {
                max_rounds: *max_rounds,
                ..ExperimentConfig::new(code.to_string(), *m, *gamma, *trials, cli.seed)
            };
            bench(code, &cfg, *csv)
        }
        Command::Tables { which, full } => table(*which, *full),
    }
}

fn ddf(args: &SourceArgs) -> Result<(Output, Format)> {
    let s = source(args)?;
    let poly = s.ddf.poly_string();
    let mut out = Output::new(
        vec!["distance", "count"],
        json!({ "source": s.label, "ddf": s.ddf, "poly": poly }),
    );
    for (i, c) in s.ddf.trimmed().iter().enumerate() {
        out.row(vec![i.into(), Cell::Text(c.to_string())]);
    }
    out.scalar = Some(Cell::Poly(poly));
    Ok((out, Format::Table))
}

fn prob(args: &SourceArgs, gammas: &[f64]) -> Result<(Output, Format)> {
    let s = source(args)?;
    let mut out = Output::new(vec!["gamma", "probability"], Value::Null);
    let mut rows = Vec::new();
    for &g in gammas {
        let p = match &s.code {
            Some(c) => c.collision_probability(g)?,
            None => s.ddf.collision_probability(g)?,
        };
        out.row(vec![g.into(), p.into()]);
        rows.push(json!({ "gamma": g, "probability": p }));
    }
    if gammas.len() == 1 {
        out.scalar = Some(out.rows[0][1].clone());
    }
    out.json = json!({ "source": s.label, "n": s.ddf.n(), "results": rows });
    Ok((out, Format::Table))
}

fn crossover(lhs: &Operand, rhs: &Operand) -> Result<(Output, Format)> {
    let a = resolve(lhs)?;
    let b = resolve(rhs)?;
    let reports = analysis::crossover(&a.label, &a.ddf, &b.label, &b.ddf)?;
    let mut out = Output::new(
        vec!["lhs", "rhs", "gamma_cross", "bracket_lo", "bracket_hi"],
        serde_json::to_value(&reports)?,
    );
    for r in &reports {
        out.row(vec![
            r.lhs.as_str().into(),
            r.rhs.as_str().into(),
            r.gamma_cross.into(),
            r.bracket_lo.into(),
            r.bracket_hi.into(),
        ]);
    }
    out.empty_text = Some("none");
    Ok((out, Format::Csv))
}

fn alpha(ms: &[usize]) -> Result<(Output, Format)> {
    let rows = ms
        .iter()
        .map(|&m| analysis::hamming_alpha(m))
        .collect::<cubehash::Result<Vec<_>>>()?;
    let mut out = Output::new(
        vec!["m", "alpha", "gamma", "claimed_lo", "claimed_hi", "within_claim"],
        serde_json::to_value(&rows)?,
    );
    for r in &rows {
        out.row(vec![
            r.m.into(),
            r.alpha.into(),
            r.gamma.into(),
            r.claimed_lo.into(),
            r.claimed_hi.into(),
            r.within_claim.into(),
        ]);
    }
    Ok((out, Format::Table))
}

fn asymptotic(
    gamma: Option<f64>,
    delta: Option<f64>,
    steps: usize,
    lo: f64,
    hi: f64,
) -> Result<(Output, Format)> {
    if let Some(delta) = delta {
        let h = analysis::binary_entropy(delta)?;
        let critical = analysis::critical_gamma(delta).ok();
        let mut headers = vec!["delta", "entropy", "rate", "critical_gamma"];
        let mut cells: Vec<Cell> = vec![
            delta.into(),
            h.into(),
            (1.0 - h).into(),
            critical.map_or(Cell::Empty, Cell::Num),
        ];
        let mut js = json!({ "delta": delta, "entropy": h, "rate": 1.0 - h, "critical_gamma": critical });
        if let Some(g) = gamma {
            let p = AsymptoticParams::at_gv_rate(g, delta)?;
            let gap = analysis::exponent_gap(g, delta, p.eps)?;
            headers.extend(["gamma", "eps_max", "gap"]);
            cells.extend([g.into(), p.eps.into(), gap.into()]);
            js["gamma"] = json!(g);
            js["eps_max"] = json!(p.eps);
            js["gap"] = json!(gap);
        }
        let mut out = Output::new(headers, js);
        out.row(cells);
        return Ok((out, Format::Table));
    }
    let grid = analysis::exponent_gap_grid(steps, lo, hi)?;
    let mut out = Output::new(
        vec!["gamma", "delta", "gap"],
        Value::Array(
            grid.iter()
                .map(|&(g, d, v)| json!({ "gamma": g, "delta": d, "gap": v }))
                .collect(),
        ),
    );
    for &(g, d, v) in &grid {
        out.row(vec![g.into(), d.into(), v.into()]);
    }
    Ok((out, Format::Csv))
}

fn enumerate(size: usize, dim: usize, count_only: bool) -> Result<(Output, Format)> {
    if count_only {
        let count = optsets::count_rsds(dim, size)?;
        let mut out = Output::new(
            vec!["size", "dim", "count"],
            json!({ "size": size, "dim": dim, "count": count }),
        );
        out.row(vec![size.into(), dim.into(), count.into()]);
        out.scalar = Some(count.into());
        return Ok((out, Format::Table));
    }
    let mut lits = Vec::new();
    optsets::enumerate_rsds(dim, size, |ideal| lits.push(ideal.generators().to_string()))?;
    let mut out = Output::new(vec!["generators"], json!(lits));
    for l in lits {
        out.row(vec![l.into()]);
    }
    out.bare = true;
    Ok((out, Format::Table))
}

fn optimal(t: usize, dims: &[usize]) -> Result<(Output, Format)> {
    let table = optsets::optimal_table(t, dims)?;
    let mut out = Output::new(
        vec!["t", "n", "gamma_cross", "gamma_end", "ddf", "generators", "literals"],
        serde_json::to_value(&table)?,
    );
    for r in &table {
        for g in &r.regimes {
            out.row(vec![
                t.into(),
                r.n.into(),
                g.gamma_lo.into(),
                g.gamma_hi.into(),
                Cell::Poly(g.ddf.poly_string()),
                generators_cell(&g.representatives),
                literals_cell(&g.representatives),
            ]);
        }
    }
    Ok((out, Format::Table))
}

fn gens(cmd: &GensCommand) -> Result<(Output, Format)> {
    match cmd {
        GensCommand::Expand { gens } => {
            let set = optsets::expand_generators(gens, EXPAND_BUDGET)?;
            let ddf = distance_distribution(&set);
            let mut out = Output::new(
                vec!["set", "size", "ddf"],
                json!({ "generators": gens, "set": set, "size": set.len(), "ddf": ddf }),
            );
            out.row(vec![set.to_literal().into(), set.len().into(), Cell::Poly(ddf.poly_string())]);
            Ok((out, Format::Table))
        }
        GensCommand::Minimize { set } => {
            let g = optsets::minimal_generators(&set.0)?;
            let mut out = Output::new(
                vec!["generators", "power_notation"],
                json!({ "generators": g, "power_notation": g.power_notation() }),
            );
            out.row(vec![g.to_string().into(), format!("<{}>", g.power_notation()).into()]);
            Ok((out, Format::Table))
        }
    }
}

fn bench(spec: &cubehash::CodeSpec, cfg: &ExperimentConfig, per_trial: bool) -> Result<(Output, Format)> {
    let code = spec.build().with_context(|| format!("building {spec}"))?;
    let (report, rows) = harness::run_experiment_with_rows(&code, cfg)?;
    if per_trial {
        let mut out = Output::new(vec!["trial", "round", "error_weight", "bucket_size"], serde_json::to_value(&rows)?);
        for r in &rows {
            out.row(vec![
                r.trial.into(),
                r.round.map_or(Cell::Empty, Cell::Int),
                (r.error_weight as u64).into(),
                r.bucket_size.into(),
            ]);
        }
        return Ok((out, Format::Csv));
    }
    let mut out = Output::new(vec!["field", "value"], serde_json::to_value(&report)?);
    let fields: Vec<(&str, Cell)> = vec![
        ("code", report.config.code.clone().into()),
        ("n", report.n.into()),
        ("k", report.k.into()),
        ("M", report.config.points.into()),
        ("gamma", report.config.gamma.into()),
        ("trials", report.config.trials.into()),
        ("seed", report.config.seed.into()),
        ("max_rounds", report.max_rounds.into()),
        ("empirical_p1", report.empirical_p1.into()),
        ("predicted_p1", report.predicted_p1.into()),
        ("z_score", report.z_score().into()),
        ("empirical_bucket_mean", report.empirical_bucket_mean.into()),
        ("predicted_bucket", report.predicted_bucket.into()),
        ("censored", report.censored.into()),
        ("mean_rounds", report.mean_rounds.map_or(Cell::Empty, Cell::Num)),
        ("rho_estimate", report.rho_estimate.map_or(Cell::Empty, Cell::Num)),
        ("rho_predicted", report.rho_predicted.into()),
        ("rng", report.rng.clone().into()),
    ];
    for (k, v) in fields {
        out.row(vec![k.into(), v]);
    }
    Ok((out, Format::Json))
}

fn optimal_rows(out: &mut Output, rows: &[OptimalRow], full: bool, with_t: bool) {
    for r in rows {
        let mut cells = Vec::new();
        if with_t {
            cells.push(r.t.into());
        }
        cells.extend([
            r.n.into(),
            Cell::Fixed(r.gamma_cross),
            Cell::Poly(r.ddf.poly_string()),
            generators_cell(&r.generators),
        ]);
        if full {
            cells.extend([Cell::Fixed(r.gamma_end), r.new.into()]);
        }
        out.row(cells);
    }
}

fn table(which: Which, full: bool) -> Result<(Output, Format)> {
    let out = match which {
        Which::I => {
            let rows = tables::table_i()?;
            let mut out = Output::new(vec!["m", "k", "gamma"], serde_json::to_value(&rows)?);
            for r in &rows {
                out.row(vec![r.m.into(), r.k.into(), Cell::Fixed(r.gamma)]);
            }
            out
        }
        Which::II => {
            let rows = tables::table_ii()?;
            let mut out = Output::new(vec!["k", "n", "gamma_cross", "generators"], serde_json::to_value(&rows)?);
            for r in &rows {
                out.row(vec![r.k.into(), r.n.into(), Cell::Fixed(r.gamma_cross), generators_cell(&r.generators)]);
            }
            out
        }
        Which::III => {
            let rows = tables::table_iii(full)?;
            let mut out = Output::new(vec!["size", "count"], serde_json::to_value(&rows)?);
            for r in &rows {
                out.row(vec![r.size.into(), r.count.into()]);
            }
            out
        }
        Which::IV | Which::V => {
            let with_t = which == Which::IV;
            let rows = if with_t {
                tables::table_iv(full)?
            } else {
                tables::table_v(full)?
            };
            let mut headers = Vec::new();
            if with_t {
                headers.push("t");
            }
            headers.extend(["n", "gamma_cross", "ddf", "generators"]);
            if full {
                headers.extend(["gamma_end", "new"]);
            }
            let mut out = Output::new(headers, serde_json::to_value(&rows)?);
            optimal_rows(&mut out, &rows, full, with_t);
            out
        }
    };
    Ok((out, Format::Csv))
}
