//! CSV output for regret curves and the final-regret summary.
//!
//! Curves: `agent,strategy,lookaheads,gamma,t,mean_regret,stderr,runs`, one
//! row per configuration and time step (`t` starts at 1). Baseline agents
//! report strategy `none` and lookaheads `0`.
//!
//! Summary: `agent,strategy,lookaheads,final_mean_regret,stderr`.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the curves exactly.

use std::io::{Read, Write};

use bamdp_core::ExpansionStrategy;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::harness::{AgentKind, FinalRegret, RegretCurve};

const NO_STRATEGY: &str = "none";

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    agent: String,
    strategy: String,
    lookaheads: usize,
    gamma: f64,
    t: usize,
    mean_regret: f64,
    stderr: f64,
    runs: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct FinalRow {
    agent: String,
    strategy: String,
    lookaheads: usize,
    final_mean_regret: f64,
    stderr: f64,
}

fn strategy_name(strategy: Option<ExpansionStrategy>) -> String {
    strategy.map_or(NO_STRATEGY, ExpansionStrategy::name).to_string()
}

fn parse_strategy(name: &str) -> Result<Option<ExpansionStrategy>> {
    if name == NO_STRATEGY {
        Ok(None)
    } else {
        Ok(Some(name.parse()?))
    }
}

pub fn write_curves<W: Write>(out: W, curves: &[RegretCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for curve in curves {
        for (i, (mean, se)) in curve.mean_regret.iter().zip(&curve.stderr).enumerate() {
            w.serialize(CurveRow {
                agent: curve.agent.name().to_string(),
                strategy: strategy_name(curve.strategy),
                lookaheads: curve.lookaheads,
                gamma: curve.gamma,
                t: i + 1,
                mean_regret: *mean,
                stderr: *se,
                runs: curve.runs,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses a curve file; consecutive rows with equal metadata form one curve.
pub fn read_curves<R: Read>(input: R) -> Result<Vec<RegretCurve>> {
    let mut r = csv::Reader::from_reader(input);
    let mut curves: Vec<RegretCurve> = Vec::new();
    for row in r.deserialize() {
        let row: CurveRow = row?;
        let agent: AgentKind = row.agent.parse()?;
        let strategy = parse_strategy(&row.strategy)?;
        let continues = curves.last().is_some_and(|c| {
            c.agent == agent
                && c.strategy == strategy
                && c.lookaheads == row.lookaheads
                && c.gamma == row.gamma
                && c.runs == row.runs
                && c.mean_regret.len() + 1 == row.t
        });
        if !continues {
            if row.t != 1 {
                return Err(HarnessError::Format(format!(
                    "curve for {agent}/{} starts at t = {}",
                    row.strategy, row.t
                )));
            }
            curves.push(RegretCurve {
                agent,
                strategy,
                lookaheads: row.lookaheads,
                gamma: row.gamma,
                runs: row.runs,
                mean_regret: Vec::new(),
                stderr: Vec::new(),
            });
        }
        let curve = curves.last_mut().expect("pushed above");
        curve.mean_regret.push(row.mean_regret);
        curve.stderr.push(row.stderr);
    }
    Ok(curves)
}

pub fn write_finals<W: Write>(out: W, finals: &[FinalRegret]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for f in finals {
        w.serialize(FinalRow {
            agent: f.agent.name().to_string(),
            strategy: strategy_name(f.strategy),
            lookaheads: f.lookaheads,
            final_mean_regret: f.final_mean_regret,
            stderr: f.stderr,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_finals<R: Read>(input: R) -> Result<Vec<FinalRegret>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|row| {
            let row: FinalRow = row?;
            Ok(FinalRegret {
                agent: row.agent.parse()?,
                strategy: parse_strategy(&row.strategy)?,
                lookaheads: row.lookaheads,
                final_mean_regret: row.final_mean_regret,
                stderr: row.stderr,
            })
        })
        .collect()
}
