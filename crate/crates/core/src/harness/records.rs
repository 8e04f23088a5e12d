use std::io::Write;
use std::time::Duration;

use crate::{Error, Result};

pub const RUN_CSV_HEADER: &str = "seed,step,eval_return,mean_penalty,critic_loss";
pub const SUMMARY_CSV_HEADER: &str = "env,algo,seed,max_snapshot";

/// One evaluation point of one seed.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRow {
    pub seed: u64,
    pub step: u64,
    pub eval_return: f64,
    /// Mean batch penalty over gradient iterations since the previous row.
    pub mean_penalty: f64,
    /// Mean critic loss over gradient iterations since the previous row.
    pub critic_loss: f64,
}

/// Everything recorded for one seed.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub evaluations: Vec<EvalRow>,
    /// Undiscounted returns of completed training episodes.
    pub episode_returns: Vec<f64>,
    pub wall_clock: Duration,
    /// Set when training stopped early; earlier rows are kept.
    pub error: Option<Error>,
}

impl RunRecord {
    /// Best evaluation return, or `None` before the first evaluation.
    pub fn max_snapshot(&self) -> Option<f64> {
        self.evaluations
            .iter()
            .map(|r| r.eval_return)
            .reduce(f64::max)
    }

    pub fn final_return(&self) -> Option<f64> {
        self.evaluations.last().map(|r| r.eval_return)
    }
}

/// One line of the per-seed summary used by `compare`.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub env: String,
    pub algo: String,
    pub seed: u64,
    pub max_snapshot: f64,
}

fn finite(line: usize, name: &str, field: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::format(line, format!("bad {name} '{field}'")))?;
    if !v.is_finite() {
        return Err(Error::format(line, format!("non-finite {name}")));
    }
    Ok(v)
}

fn integer(line: usize, name: &str, field: &str) -> Result<u64> {
    field
        .parse()
        .map_err(|_| Error::format(line, format!("bad {name} '{field}'")))
}

/// Data lines after checking the header, as `(line number, fields)`.
fn rows<'a>(text: &'a str, header: &str, width: usize) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == header => {}
        _ => return Err(Error::format(1, format!("expected header '{header}'"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(Error::format(
                i + 1,
                format!("expected {width} fields, got {}", fields.len()),
            ));
        }
        out.push((i + 1, fields));
    }
    Ok(out)
}

pub fn write_run_header<W: Write>(w: &mut W) -> Result<()> {
    writeln!(w, "{RUN_CSV_HEADER}")?;
    Ok(())
}

pub fn write_run_row<W: Write>(w: &mut W, r: &EvalRow) -> Result<()> {
    writeln!(
        w,
        "{},{},{},{},{}",
        r.seed, r.step, r.eval_return, r.mean_penalty, r.critic_loss
    )?;
    Ok(())
}

pub fn write_run_csv<W: Write>(mut w: W, rows: &[EvalRow]) -> Result<()> {
    write_run_header(&mut w)?;
    for r in rows {
        write_run_row(&mut w, r)?;
    }
    Ok(())
}

pub fn parse_run_csv(text: &str) -> Result<Vec<EvalRow>> {
    rows(text, RUN_CSV_HEADER, 5)?
        .into_iter()
        .map(|(n, f)| {
            Ok(EvalRow {
                seed: integer(n, "seed", f[0])?,
                step: integer(n, "step", f[1])?,
                eval_return: finite(n, "eval_return", f[2])?,
                mean_penalty: finite(n, "mean_penalty", f[3])?,
                critic_loss: finite(n, "critic_loss", f[4])?,
            })
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(mut w: W, rows: &[SummaryRow]) -> Result<()> {
    writeln!(w, "{SUMMARY_CSV_HEADER}")?;
    for r in rows {
        if r.env.contains([',', '\n', '\r']) || r.algo.contains([',', '\n', '\r']) {
            return Err(Error::config(
                "env and algo labels may not contain commas or newlines",
            ));
        }
        writeln!(w, "{},{},{},{}", r.env, r.algo, r.seed, r.max_snapshot)?;
    }
    Ok(())
}

pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryRow>> {
    rows(text, SUMMARY_CSV_HEADER, 4)?
        .into_iter()
        .map(|(n, f)| {
            if f[0].is_empty() {
                return Err(Error::format(n, "empty env"));
            }
            Ok(SummaryRow {
                env: f[0].to_string(),
                algo: f[1].to_string(),
                seed: integer(n, "seed", f[2])?,
                max_snapshot: finite(n, "max_snapshot", f[3])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn max_snapshot_is_column_max() {
        let row = |step, eval_return| EvalRow {
            seed: 0,
            step,
            eval_return,
            mean_penalty: 0.0,
            critic_loss: 0.0,
        };
        let rec = RunRecord {
            seed: 0,
            evaluations: vec![row(1000, -5.0), row(2000, -1.0), row(3000, -2.0)],
            episode_returns: vec![],
            wall_clock: Duration::ZERO,
            error: None,
        };
        assert_eq!(rec.max_snapshot(), Some(-1.0));
        assert_eq!(rec.final_return(), Some(-2.0));
        let empty = RunRecord {
            evaluations: vec![],
            ..rec
        };
        assert_eq!(empty.max_snapshot(), None);
    }

    #[test]
    fn rejects_malformed_rows() {
        assert!(parse_run_csv("seed,step\n").is_err());
        assert!(parse_run_csv(&format!("{RUN_CSV_HEADER}\n0,1,2,3\n")).is_err());
        assert!(parse_run_csv(&format!("{RUN_CSV_HEADER}\n0,1,inf,3,4\n")).is_err());
        assert!(parse_run_csv(&format!("{RUN_CSV_HEADER}\n-1,1,2,3,4\n")).is_err());
        assert!(parse_summary_csv(&format!("{SUMMARY_CSV_HEADER}\n,sqt,0,1\n")).is_err());
        let err = parse_run_csv(&format!("{RUN_CSV_HEADER}\n0,1,2,3,4\n0,x,2,3,4\n")).unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }));
    }

    #[test]
    fn crlf_tolerated() {
        let text = format!("{SUMMARY_CSV_HEADER}\r\nHumanoid-v2,TD7,0,6783.7\r\n");
        let rows = parse_summary_csv(&text).unwrap();
        assert_eq!(rows[0].max_snapshot, 6783.7);
    }

    fn eval_row() -> impl Strategy<Value = EvalRow> {
        (
            any::<u64>(),
            any::<u64>(),
            -1e9f64..1e9,
            0.0f64..1e3,
            0.0f64..1e6,
        )
            .prop_map(
                |(seed, step, eval_return, mean_penalty, critic_loss)| EvalRow {
                    seed,
                    step,
                    eval_return,
                    mean_penalty,
                    critic_loss,
                },
            )
    }

    proptest! {
        #[test]
        fn run_csv_round_trip(rows in proptest::collection::vec(eval_row(), 0..30)) {
            let mut buf = Vec::new();
            write_run_csv(&mut buf, &rows).unwrap();
            prop_assert_eq!(parse_run_csv(std::str::from_utf8(&buf).unwrap()).unwrap(), rows);
        }

        #[test]
        fn summary_csv_round_trip(rows in proptest::collection::vec(
            ("[A-Za-z0-9_-]{1,12}", "[a-z0-9]{0,6}", any::<u64>(), -1e9f64..1e9), 0..20)) {
            let rows: Vec<SummaryRow> = rows
                .into_iter()
                .map(|(env, algo, seed, max_snapshot)| SummaryRow { env, algo, seed, max_snapshot })
                .collect();
            let mut buf = Vec::new();
            write_summary_csv(&mut buf, &rows).unwrap();
            prop_assert_eq!(parse_summary_csv(std::str::from_utf8(&buf).unwrap()).unwrap(), rows);
        }
    }
}
