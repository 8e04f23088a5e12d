use std::fmt;
use std::path::Path;

use super::records::{parse_run_csv, parse_summary_csv, RUN_CSV_HEADER, SUMMARY_CSV_HEADER};
use crate::{Error, Result};

/// Label used for the single row produced from per-evaluation run files.
pub const RUN_LABEL: &str = "run";

/// `100 (a - b) / b`. With a negative baseline the sign no longer reads as
/// better or worse; the formula is kept as is.
pub fn percent_improvement(a: f64, b: f64) -> f64 {
    // adding 0.0 turns -0.0 into 0.0
    100.0 * (a - b) / b + 0.0
}

/// Per-env mean of per-seed maximum snapshots, in first-appearance order.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultSet {
    pub envs: Vec<(String, Vec<f64>)>,
}

impl ResultSet {
    /// Reads either a summary CSV (`env,algo,seed,max_snapshot`) or a run
    /// CSV. Run files give one row labelled [`RUN_LABEL`] whose entries are
    /// each seed's best evaluation return.
    pub fn parse(text: &str) -> Result<Self> {
        let header = text.lines().next().unwrap_or("").trim_end_matches('\r');
        let mut envs: Vec<(String, Vec<f64>)> = Vec::new();
        let mut push = |env: &str, v: f64| match envs.iter_mut().find(|(e, _)| e == env) {
            Some((_, vs)) => vs.push(v),
            None => envs.push((env.to_string(), vec![v])),
        };
        if header == SUMMARY_CSV_HEADER {
            for row in parse_summary_csv(text)? {
                push(&row.env, row.max_snapshot);
            }
        } else if header == RUN_CSV_HEADER {
            let mut per_seed: Vec<(u64, f64)> = Vec::new();
            for row in parse_run_csv(text)? {
                match per_seed.iter_mut().find(|(s, _)| *s == row.seed) {
                    Some((_, m)) => *m = m.max(row.eval_return),
                    None => per_seed.push((row.seed, row.eval_return)),
                }
            }
            for (_, m) in per_seed {
                push(RUN_LABEL, m);
            }
        } else {
            return Err(Error::format(
                1,
                format!("expected header '{SUMMARY_CSV_HEADER}' or '{RUN_CSV_HEADER}'"),
            ));
        }
        if envs.is_empty() {
            return Err(Error::format(2, "no result rows"));
        }
        Ok(Self { envs })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn mean(&self, env: &str) -> Option<f64> {
        self.envs
            .iter()
            .find(|(e, _)| e == env)
            .map(|(_, v)| v.iter().sum::<f64>() / v.len() as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub env: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub percent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    /// Sum of the per-env percentages.
    pub total_percent: f64,
}

/// Improvement of `a` over `b` per env. Both sets must cover the same envs.
pub fn compare_sets(a: &ResultSet, b: &ResultSet) -> Result<ComparisonTable> {
    fn names(s: &ResultSet) -> Vec<&str> {
        let mut v: Vec<&str> = s.envs.iter().map(|(e, _)| e.as_str()).collect();
        v.sort_unstable();
        v
    }
    if names(a) != names(b) {
        return Err(Error::format(
            1,
            format!("env mismatch: {:?} vs {:?}", names(a), names(b)),
        ));
    }
    let mut rows = Vec::with_capacity(a.envs.len());
    for (env, _) in &a.envs {
        let mean_a = a.mean(env).expect("env from a");
        let mean_b = b.mean(env).expect("checked above");
        if mean_b == 0.0 {
            return Err(Error::config(format!("baseline mean for '{env}' is zero")));
        }
        rows.push(ComparisonRow {
            env: env.clone(),
            mean_a,
            mean_b,
            percent: percent_improvement(mean_a, mean_b),
        });
    }
    let total_percent = rows.iter().map(|r| r.percent).sum();
    Ok(ComparisonTable {
        rows,
        total_percent,
    })
}

pub fn compare(path_a: &Path, path_b: &Path) -> Result<ComparisonTable> {
    compare_sets(&ResultSet::load(path_a)?, &ResultSet::load(path_b)?)
}

impl fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .rows
            .iter()
            .map(|r| r.env.len())
            .max()
            .unwrap_or(0)
            .max(5);
        writeln!(
            f,
            "{:<width$}  {:>12}  {:>12}  {:>11}",
            "env", "A", "B", "improvement"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<width$}  {:>12.1}  {:>12.1}  {:>+10.1}%",
                r.env, r.mean_a, r.mean_b, r.percent
            )?;
        }
        write!(
            f,
            "{:<width$}  {:>12}  {:>12}  {:>+10.1}%",
            "total", "", "", self.total_percent
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn summary(rows: &[(&str, f64)]) -> ResultSet {
        let mut text = format!("{SUMMARY_CSV_HEADER}\n");
        for (i, (env, v)) in rows.iter().enumerate() {
            text.push_str(&format!("{env},x,{i},{v}\n"));
        }
        ResultSet::parse(&text).unwrap()
    }

    #[test]
    fn ten_percent() {
        let t = compare_sets(&summary(&[("e", 110.0)]), &summary(&[("e", 100.0)])).unwrap();
        assert!((t.rows[0].percent - 10.0).abs() < 1e-12);
    }

    #[test]
    fn identical_is_zero() {
        let s = summary(&[("a", 3.0), ("b", -7.0), ("a", 5.0)]);
        let t = compare_sets(&s, &s).unwrap();
        assert!(t.rows.iter().all(|r| r.percent == 0.0));
        assert_eq!(t.total_percent, 0.0);
        assert!(!t.to_string().contains("-0.0"));
    }

    #[test]
    fn reference_table() {
        let sqt = summary(&[
            ("Humanoid-v2", 8144.7),
            ("Walker2d-v2", 7121.8),
            ("Ant-v2", 8906.2),
        ]);
        let td7 = summary(&[
            ("Humanoid-v2", 6783.7),
            ("Walker2d-v2", 6058.9),
            ("Ant-v2", 8300.6),
        ]);
        let t = compare_sets(&sqt, &td7).unwrap();
        let got: Vec<f64> = t.rows.iter().map(|r| r.percent).collect();
        for (g, want) in got.iter().zip([20.1, 17.5, 7.3]) {
            assert!((g - want).abs() < 0.1, "{g} vs {want}");
        }
        assert!((t.total_percent - 44.9).abs() < 0.1);
        assert!(t.to_string().contains("+44.9%"));
    }

    #[test]
    fn run_files_use_seed_maxima() {
        let text = format!("{RUN_CSV_HEADER}\n0,1000,-5,0,0\n0,2000,-3,0,0\n1,1000,-1,0,0\n");
        let s = ResultSet::parse(&text).unwrap();
        assert_eq!(s.envs, vec![(RUN_LABEL.to_string(), vec![-3.0, -1.0])]);
    }

    #[test]
    fn schema_mismatch() {
        assert!(matches!(
            ResultSet::parse("a,b\n1,2\n"),
            Err(Error::Format { .. })
        ));
        assert!(ResultSet::parse(&format!("{SUMMARY_CSV_HEADER}\n")).is_err());
        let a = summary(&[("x", 1.0)]);
        let b = summary(&[("y", 1.0)]);
        assert!(matches!(compare_sets(&a, &b), Err(Error::Format { .. })));
    }

    proptest! {
        #[test]
        fn antisymmetry(a in 1.0f64..1e4, b in 1.0f64..1e4) {
            let ab = percent_improvement(a, b);
            let ba = percent_improvement(b, a);
            let expected = -ba / (1.0 + ba / 100.0);
            prop_assert!((ab - expected).abs() <= 1e-9 * (1.0 + ab.abs()));
        }
    }
}
