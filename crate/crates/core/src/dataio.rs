//! Real-data pipeline: CSV ingestion, standardization, covariance
//! diagonalization, a full-spectrum PSRFR fit, the eigenvalue-proportion
//! dimension rule, and a variable-importance ranking.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Result, SdrError};
use crate::estimators::psrfr_fit;
use crate::numerics::{center_and_covariance, sym_eig_desc, DataMatrix};

/// Named predictors plus a response.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub column_names: Vec<String>,
    pub predictors: DataMatrix,
    pub response: Vec<f64>,
    pub response_name: String,
    /// Rows skipped because a cell was empty or `NA`.
    pub dropped_rows: usize,
}

impl Dataset {
    pub fn new(
        column_names: Vec<String>,
        predictors: DataMatrix,
        response: Vec<f64>,
        response_name: impl Into<String>,
    ) -> Result<Self> {
        let response_name = response_name.into();
        if column_names.len() != predictors.ncols() {
            return Err(SdrError::ShapeMismatch(format!(
                "{} names for {} predictor columns",
                column_names.len(),
                predictors.ncols()
            )));
        }
        if response.len() != predictors.nrows() {
            return Err(SdrError::LengthMismatch {
                expected: predictors.nrows(),
                got: response.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in column_names.iter().chain(std::iter::once(&response_name)) {
            if !seen.insert(name.as_str()) {
                return Err(SdrError::DuplicateColumn(name.clone()));
            }
        }
        Ok(Dataset {
            column_names,
            predictors,
            response,
            response_name,
            dropped_rows: 0,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CsvOptions {
    pub delimiter: u8,
    /// Keep only the first `row_limit` data rows.
    pub row_limit: Option<usize>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            row_limit: None,
        }
    }
}

impl CsvOptions {
    /// Semicolon-delimited, as distributed for the wine-quality data.
    pub fn wine() -> Self {
        CsvOptions {
            delimiter: b';',
            row_limit: None,
        }
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "na" | "NaN" | "nan" | "?")
}

/// Reads a headered CSV; every column other than `response_column`
/// becomes a predictor, in file order.
///
/// Rows with a missing cell are dropped and counted. `row_limit` counts
/// data rows in the file, before any are dropped.
pub fn load_csv(path: &Path, response_column: &str, options: &CsvOptions) -> Result<Dataset> {
    if options.row_limit == Some(0) {
        return Err(SdrError::EmptyDataset);
    }
    let text = fs::read(path).map_err(|e| SdrError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .trim(csv::Trim::All)
        .from_reader(text.as_slice());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let response_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| SdrError::MissingColumn(response_column.to_string()))?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut response = Vec::new();
    let mut dropped = 0;
    for (i, record) in reader.records().enumerate() {
        if options.row_limit.is_some_and(|limit| i >= limit) {
            break;
        }
        let record = record?;
        let line = i + 1;
        if record.iter().any(is_missing) {
            dropped += 1;
            continue;
        }
        let mut values = Vec::with_capacity(headers.len());
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| SdrError::ParseError {
                row: line,
                column: headers[c].clone(),
                message: format!("`{cell}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(SdrError::ParseError {
                    row: line,
                    column: headers[c].clone(),
                    message: format!("`{cell}` is not finite"),
                });
            }
            values.push(v);
        }
        response.push(values.remove(response_idx));
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(SdrError::EmptyDataset);
    }
    let mut names = headers;
    let response_name = names.remove(response_idx);
    let mut ds = Dataset::new(
        names,
        DataMatrix::from_rows(&rows)?,
        response,
        response_name,
    )?;
    ds.dropped_rows = dropped;
    Ok(ds)
}

/// Centers every predictor and scales it to unit sample SD ((n−1) divisor).
pub fn standardize(ds: &Dataset) -> Result<Dataset> {
    let stats = center_and_covariance(&ds.predictors)?;
    let mut x = ds.predictors.centered(&stats.mean);
    for (j, mut col) in x.column_iter_mut().enumerate() {
        let sd = stats.covariance[(j, j)].sqrt();
        if !(sd > 0.0) {
            return Err(SdrError::ZeroVariance(ds.column_names[j].clone()));
        }
        col.unscale_mut(sd);
    }
    Ok(Dataset {
        predictors: DataMatrix::new(x)?,
        ..ds.clone()
    })
}

/// Coordinates in which the leading direction's loadings are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportanceFrame {
    /// Loadings on the diagonalized (rotated) coordinates; component i is
    /// reported under the name of column i.
    Rotated,
    /// Loadings mapped back to the original variables, V·β̂₁.
    Original,
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    pub proportion_threshold: f64,
    /// Standardize predictors before diagonalizing.
    pub standardize: bool,
    pub frame: ImportanceFrame,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            proportion_threshold: 0.99,
            standardize: false,
            frame: ImportanceFrame::Rotated,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub response_name: String,
    pub n: usize,
    /// Full PSRFR spectrum on the rotated data, descending.
    pub eigenvalues: Vec<f64>,
    /// λᵢ/Σλ, nonnegative and descending.
    pub eigenvalue_proportions: Vec<f64>,
    pub chosen_k: usize,
    pub proportion_threshold: f64,
    pub standardized: bool,
    pub frame: ImportanceFrame,
    /// (variable, |loading|) sorted by descending loading.
    pub importance: Vec<(String, f64)>,
    /// β̂₁ in the ranking frame, signed.
    pub leading_direction: Vec<f64>,
    /// p×p covariance eigenvectors used for the diagonalization, by row.
    #[serde(serialize_with = "rows_of")]
    pub rotation: DMatrix<f64>,
}

fn rows_of<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Markdown table of the importance ranking.
    pub fn importance_markdown(&self) -> String {
        let mut out = String::from("| rank | variable | abs loading |\n|---|---|---|\n");
        for (i, (name, v)) in self.importance.iter().enumerate() {
            let _ = writeln!(out, "| {} | {} | {:.6} |", i + 1, name, v);
        }
        out
    }
}

/// Smallest k whose leading proportions reach `threshold`; a threshold of
/// 1 or more selects every direction.
pub fn choose_dimension(proportions: &[f64], threshold: f64) -> usize {
    let p = proportions.len();
    if threshold >= 1.0 {
        return p;
    }
    let mut cum = 0.0;
    for (i, v) in proportions.iter().enumerate() {
        cum += v;
        if cum >= threshold {
            return i + 1;
        }
    }
    p
}

/// Diagonalizes the (optionally standardized) predictors with their
/// covariance eigenvectors V, fits PSRFR on W = X̃·V with k = p, and ranks
/// the leading direction's loadings.
pub fn analyze(ds: &Dataset, options: &AnalysisOptions) -> Result<AnalysisReport> {
    let working = if options.standardize {
        standardize(ds)?
    } else {
        ds.clone()
    };
    let stats = center_and_covariance(&working.predictors)?;
    let rotation = sym_eig_desc(&stats.covariance)?.eigenvectors;
    let rotated = DataMatrix::new(working.predictors.centered(&stats.mean) * &rotation)?;
    let p = rotated.ncols();
    let fit = psrfr_fit(&rotated, &working.response, p)?;

    let clamped: Vec<f64> = fit.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let eigenvalue_proportions: Vec<f64> = clamped.iter().map(|v| v / total).collect();
    let chosen_k = choose_dimension(&eigenvalue_proportions, options.proportion_threshold);

    let leading = fit.basis.column(0).into_owned();
    let direction = match options.frame {
        ImportanceFrame::Rotated => leading,
        ImportanceFrame::Original => &rotation * leading,
    };
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| direction[b].abs().total_cmp(&direction[a].abs()));
    let importance = order
        .into_iter()
        .map(|i| (working.column_names[i].clone(), direction[i].abs()))
        .collect();

    Ok(AnalysisReport {
        response_name: working.response_name.clone(),
        n: rotated.nrows(),
        eigenvalues: fit.eigenvalues.iter().copied().collect(),
        eigenvalue_proportions,
        chosen_k,
        proportion_threshold: options.proportion_threshold,
        standardized: options.standardize,
        frame: options.frame,
        importance,
        leading_direction: direction.iter().copied().collect(),
        rotation,
    })
}

/// A variable name with its (theoretical, sample) quantile pairs.
pub type QqColumn = (String, Vec<(f64, f64)>);

/// Normal Q-Q pairs (theoretical quantile, sorted standardized value) for
/// every predictor. Plotting positions are (i − a)/(n + 1 − 2a) with
/// a = 3/8 for n ≤ 10 and 1/2 otherwise.
pub fn qq_pairs(ds: &Dataset) -> Result<Vec<QqColumn>> {
    let std = standardize(ds)?;
    let x = std.predictors.values();
    let n = x.nrows();
    let a = if n <= 10 { 0.375 } else { 0.5 };
    let normal = Normal::standard();
    let theoretical: Vec<f64> = (1..=n)
        .map(|i| normal.inverse_cdf((i as f64 - a) / (n as f64 + 1.0 - 2.0 * a)))
        .collect();
    Ok(std
        .column_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let mut sample: Vec<f64> = x.column(j).iter().copied().collect();
            sample.sort_by(f64::total_cmp);
            (
                name.clone(),
                theoretical.iter().copied().zip(sample).collect(),
            )
        })
        .collect())
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes `qq_<variable>.csv` per predictor into `dir`; returns the paths.
pub fn write_qq_csvs(ds: &Dataset, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| SdrError::io(dir, e))?;
    let mut paths = Vec::new();
    for (name, pairs) in qq_pairs(ds)? {
        let path = dir.join(format!("qq_{}.csv", file_stem(&name)));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["theoretical", "sample"])?;
        for (t, s) in pairs {
            w.write_record([t.to_string(), s.to_string()])?;
        }
        w.flush().map_err(|e| SdrError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_with_limit_and_delimiter() {
        let f = write_tmp("\"a\";\"b\";\"y\"\n1;2;3\n4;5;6\n7;8;9\n");
        let ds = load_csv(
            f.path(),
            "y",
            &CsvOptions {
                delimiter: b';',
                row_limit: Some(2),
            },
        )
        .unwrap();
        assert_eq!(ds.column_names, vec!["a", "b"]);
        assert_eq!(ds.response, vec![3.0, 6.0]);
        assert_eq!(ds.predictors.values()[(1, 1)], 5.0);
    }

    #[test]
    fn load_errors() {
        let f = write_tmp("a,b,y\n1,2,3\n4,x,6\n");
        match load_csv(f.path(), "y", &CsvOptions::default()) {
            Err(SdrError::ParseError { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "b");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_csv(f.path(), "quality", &CsvOptions::default()),
            Err(SdrError::MissingColumn(_))
        ));
        assert!(matches!(
            load_csv(
                f.path(),
                "y",
                &CsvOptions {
                    row_limit: Some(0),
                    ..Default::default()
                }
            ),
            Err(SdrError::EmptyDataset)
        ));
        assert!(matches!(
            load_csv(
                Path::new("/nonexistent/file.csv"),
                "y",
                &CsvOptions::default()
            ),
            Err(SdrError::Io { .. })
        ));
        let dup = write_tmp("a,a,y\n1,2,3\n4,5,6\n");
        assert!(matches!(
            load_csv(dup.path(), "y", &CsvOptions::default()),
            Err(SdrError::DuplicateColumn(_))
        ));
    }

    #[test]
    fn missing_cells_drop_rows() {
        let f = write_tmp("a,b,y\n1,2,3\n4,,6\n7,8,NA\n2,1,0\n");
        let ds = load_csv(f.path(), "y", &CsvOptions::default()).unwrap();
        assert_eq!(ds.dropped_rows, 2);
        assert_eq!(ds.response, vec![3.0, 0.0]);
    }

    fn two_point() -> Dataset {
        let x = DataMatrix::from_rows(&[vec![0.0, 5.0], vec![2.0, 5.0]]).unwrap();
        Dataset::new(vec!["a".into(), "c".into()], x, vec![1.0, 2.0], "y").unwrap()
    }

    #[test]
    fn standardize_two_points_and_constant() {
        assert!(matches!(standardize(&two_point()), Err(SdrError::ZeroVariance(c)) if c == "c"));
        let x = DataMatrix::from_rows(&[vec![0.0], vec![2.0]]).unwrap();
        let ds = Dataset::new(vec!["a".into()], x, vec![0.0, 1.0], "y").unwrap();
        let s = standardize(&ds).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.predictors.values()[(0, 0)] + h).abs() < 1e-15);
        assert!((s.predictors.values()[(1, 0)] - h).abs() < 1e-15);
    }

    #[test]
    fn dimension_rule() {
        assert_eq!(choose_dimension(&[0.9995, 0.0004, 0.0001], 0.99), 1);
        assert_eq!(choose_dimension(&[0.6, 0.3, 0.1], 0.85), 2);
        assert_eq!(choose_dimension(&[0.6, 0.3, 0.1], 1.0), 3);
    }

    #[test]
    fn qq_pairs_are_sorted_and_symmetric() {
        let rows: Vec<Vec<f64>> = (0..21)
            .map(|i| vec![(i as f64 * 0.7).sin(), i as f64])
            .collect();
        let ds = Dataset::new(
            vec!["s".into(), "lin".into()],
            DataMatrix::from_rows(&rows).unwrap(),
            vec![0.0; 21],
            "y",
        )
        .unwrap();
        let qq = qq_pairs(&ds).unwrap();
        assert_eq!(qq.len(), 2);
        let lin = &qq[1].1;
        assert_eq!(lin.len(), 21);
        assert!(lin[10].0.abs() < 1e-12);
        assert!((lin[0].0 + lin[20].0).abs() < 1e-12);
        assert!(lin.windows(2).all(|w| w[0].1 <= w[1].1));
    }
}
