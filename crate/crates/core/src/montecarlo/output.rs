use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use super::{
    run_and_aggregate, AggregateRow, ConfigEcho, ExperimentConfig, MeanSd, ReplicateRecord,
};
use crate::error::{Result, SdrError};

pub const REPLICATE_HEADER: [&str; 13] = [
    "model", "dist", "nu", "beta", "n", "p", "k", "method", "rep", "status", "R", "cos1", "cos2",
];

pub const AGGREGATE_HEADER: [&str; 16] = [
    "model",
    "dist",
    "nu",
    "beta",
    "n",
    "p",
    "k",
    "method",
    "n_ok",
    "n_failed",
    "mean_R",
    "sd_R",
    "mean_cos1",
    "sd_cos1",
    "mean_cos2",
    "sd_cos2",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn echo_fields(e: &ConfigEcho) -> [String; 7] {
    [
        e.model.to_string(),
        e.dist.to_string(),
        opt(e.nu),
        opt(e.beta),
        e.n.to_string(),
        e.p.to_string(),
        e.k.to_string(),
    ]
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|e| SdrError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(out, "# generated_at={stamp}").map_err(|e| SdrError::io(path, e))?;
    Ok(out)
}

/// Writes replicate-level rows after a `# generated_at=` comment line.
pub fn write_replicate_csv(
    path: &Path,
    blocks: &[(ConfigEcho, Vec<ReplicateRecord>)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(REPLICATE_HEADER)?;
    for (echo, records) in blocks {
        let prefix = echo_fields(echo);
        for r in records {
            let mut row: Vec<String> = prefix.to_vec();
            row.extend([
                r.method.to_string(),
                r.replicate.to_string(),
                r.status.as_str().to_string(),
                opt(r.trace_correlation),
                opt(r.cos1),
                opt(r.cos2),
            ]);
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| SdrError::io(path, e))?;
    Ok(())
}

/// Writes aggregate rows after a `# generated_at=` comment line.
pub fn write_aggregate_csv(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(AGGREGATE_HEADER)?;
    let split = |m: Option<MeanSd>| (opt(m.map(|v| v.mean)), opt(m.map(|v| v.sd)));
    for row in rows {
        let s = &row.stats;
        let mut out: Vec<String> = echo_fields(&row.echo).to_vec();
        let (mr, sr) = split(s.r);
        let (m1, s1) = split(s.cos1);
        let (m2, s2) = split(s.cos2);
        out.extend([
            s.method.to_string(),
            s.n_ok.to_string(),
            s.n_failed.to_string(),
            mr,
            sr,
            m1,
            s1,
            m2,
            s2,
        ]);
        w.write_record(&out)?;
    }
    w.flush().map_err(|e| SdrError::io(path, e))?;
    Ok(())
}

/// Runs every config and writes both CSVs; returns the aggregate rows.
pub fn grid(
    configs: &[ExperimentConfig],
    replicate_path: &Path,
    aggregate_path: &Path,
) -> Result<Vec<AggregateRow>> {
    for c in configs {
        c.validate()?;
    }
    let mut blocks = Vec::with_capacity(configs.len());
    let mut rows = Vec::new();
    for c in configs {
        let (records, agg) = run_and_aggregate(c)?;
        blocks.push((c.echo(), records));
        rows.extend(agg);
    }
    write_replicate_csv(replicate_path, &blocks)?;
    write_aggregate_csv(aggregate_path, &rows)?;
    Ok(rows)
}

/// Formats with six significant digits.
pub(crate) fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn cell(m: Option<MeanSd>, pick: fn(MeanSd) -> f64) -> String {
    m.map(|v| sig6(pick(v))).unwrap_or_else(|| "–".into())
}

fn dist_label(e: &ConfigEcho) -> String {
    match (e.nu, e.beta) {
        (Some(1.0), _) => "Cauchy".into(),
        (Some(nu), _) => format!("Student's t (ν = {nu})"),
        (_, Some(beta)) => format!("power exponential (β = {beta})"),
        _ if e.dist == "mixture" => "normal/uniform mixture".into(),
        _ => "normal".into(),
    }
}

/// Markdown tables with one block per (model, distribution, p), methods as
/// columns, and an Average/SD row pair per sample size. Blocks for two-direction models also carry the
/// cosine similarities.
pub fn markdown_table(rows: &[AggregateRow]) -> String {
    let mut out = String::new();
    let mut blocks: Vec<ConfigEcho> = Vec::new();
    for r in rows {
        let key = ConfigEcho { n: 0, ..r.echo };
        if !blocks.contains(&key) {
            blocks.push(key);
        }
    }
    for key in blocks {
        let mine: Vec<&AggregateRow> = rows
            .iter()
            .filter(|r| ConfigEcho { n: 0, ..r.echo } == key)
            .collect();
        let mut methods = Vec::new();
        for r in &mine {
            if !methods.contains(&r.stats.method) {
                methods.push(r.stats.method);
            }
        }
        let ns: BTreeSet<usize> = mine.iter().map(|r| r.echo.n).collect();
        let with_cos = mine.iter().any(|r| r.stats.cos1.is_some());
        let _ = writeln!(
            out,
            "### Model [{}], {}, p = {}, k = {}\n",
            key.model.as_str().to_uppercase(),
            dist_label(&key),
            key.p,
            key.k
        );
        let _ = write!(out, "| n | statistic |");
        for m in &methods {
            let _ = write!(out, " {} |", m.as_str().to_uppercase());
        }
        let _ = write!(out, "\n|---|---|");
        for _ in &methods {
            let _ = write!(out, "---|");
        }
        out.push('\n');
        type Pick = fn(&AggregateRow) -> Option<MeanSd>;
        let mut metrics: Vec<(&str, Pick)> = vec![("R", |r| r.stats.r)];
        if with_cos {
            metrics.push(("\\|cos₁\\|", |r| r.stats.cos1));
            metrics.push(("\\|cos₂\\|", |r| r.stats.cos2));
        }
        for &n in &ns {
            for (name, pick) in &metrics {
                for (label, stat) in [
                    ("Average", (|v: MeanSd| v.mean) as fn(MeanSd) -> f64),
                    ("SD", |v| v.sd),
                ] {
                    let _ = write!(out, "| {n} | {name} {label} |");
                    for m in &methods {
                        let v = mine
                            .iter()
                            .find(|r| r.echo.n == n && r.stats.method == *m)
                            .and_then(|r| pick(r));
                        let _ = write!(out, " {} |", cell(v, stat));
                    }
                    out.push('\n');
                }
            }
            let failed: usize = mine
                .iter()
                .filter(|r| r.echo.n == n)
                .map(|r| r.stats.n_failed)
                .sum();
            if failed > 0 {
                let _ = write!(out, "| {n} | failed fits |");
                for m in &methods {
                    let f = mine
                        .iter()
                        .find(|r| r.echo.n == n && r.stats.method == *m)
                        .map_or(0, |r| r.stats.n_failed);
                    let _ = write!(out, " {f} |");
                }
                out.push('\n');
            }
        }
        out.push('\n');
    }
    out
}
