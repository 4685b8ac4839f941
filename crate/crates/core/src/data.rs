//! Dataset representation, CSV ingestion and feature standardization.

use std::path::Path;

use crate::error::{Error, Result};

/// Where a row came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Original,
    /// Generated row. Parent ids index the dataset the resampler consumed.
    /// The row equals `parent_a + lambda * (parent_b - parent_a)` when
    /// `parent_b` is present and is a copy or summary of `parent_a` otherwise.
    Synthetic {
        parent_a: usize,
        parent_b: Option<usize>,
        lambda: f64,
    },
}

impl Provenance {
    pub fn is_original(&self) -> bool {
        matches!(self, Provenance::Original)
    }
}

/// Binary-labelled feature matrix. Labels are `true` for the positive class.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_features: usize,
    features: Vec<f64>,
    labels: Vec<bool>,
    provenance: Vec<Provenance>,
    feature_names: Vec<String>,
    positive_label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingPolicy {
    DropRow,
    MeanImpute,
}

impl Dataset {
    /// Builds an all-original dataset from row vectors.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<bool>) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let names = (0..d).map(|j| format!("x{j}")).collect();
        let mut out = Dataset::empty(names, "1".to_string());
        assert_eq!(rows.len(), labels.len(), "rows and labels differ in length");
        for (row, label) in rows.iter().zip(labels) {
            out.push(row, label, Provenance::Original);
        }
        out
    }

    pub fn empty(feature_names: Vec<String>, positive_label: String) -> Self {
        Dataset {
            n_features: feature_names.len(),
            features: Vec::new(),
            labels: Vec::new(),
            provenance: Vec::new(),
            feature_names,
            positive_label,
        }
    }

    /// Empty dataset sharing this one's column metadata.
    pub fn empty_like(&self) -> Self {
        Dataset::empty(self.feature_names.clone(), self.positive_label.clone())
    }

    pub fn push(&mut self, row: &[f64], label: bool, provenance: Provenance) {
        assert_eq!(row.len(), self.n_features, "row width mismatch");
        self.features.extend_from_slice(row);
        self.labels.push(label);
        self.provenance.push(provenance);
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn label(&self, i: usize) -> bool {
        self.labels[i]
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn provenance(&self, i: usize) -> Provenance {
        self.provenance[i]
    }

    pub fn provenances(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn positive_label(&self) -> &str {
        &self.positive_label
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn n_negative(&self) -> usize {
        self.n_rows() - self.n_positive()
    }

    pub fn has_both_classes(&self) -> bool {
        let pos = self.n_positive();
        pos > 0 && pos < self.n_rows()
    }

    /// Label of the smaller class; ties resolve to the positive class.
    pub fn minority_label(&self) -> bool {
        self.n_positive() <= self.n_negative()
    }

    pub fn indices_of(&self, label: bool) -> Vec<usize> {
        (0..self.n_rows()).filter(|&i| self.labels[i] == label).collect()
    }

    /// Rows in the given order, provenance preserved.
    pub fn subset(&self, ids: &[usize]) -> Dataset {
        let mut out = self.empty_like();
        out.features.reserve(ids.len() * self.n_features);
        for &i in ids {
            out.push(self.row(i), self.labels[i], self.provenance[i]);
        }
        out
    }

    pub(crate) fn set_feature(&mut self, i: usize, j: usize, value: f64) {
        self.features[i * self.n_features + j] = value;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImbalanceRate {
    pub value: f64,
    pub n_minority: usize,
    pub n_majority: usize,
}

/// Minority count divided by majority count.
pub fn imbalance_rate(d: &Dataset) -> Result<ImbalanceRate> {
    if !d.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let pos = d.n_positive();
    let neg = d.n_negative();
    let (n_minority, n_majority) = (pos.min(neg), pos.max(neg));
    Ok(ImbalanceRate {
        value: n_minority as f64 / n_majority as f64,
        n_minority,
        n_majority,
    })
}

/// Reads a headered CSV. Every non-label column must hold reals; an empty
/// cell is a missing value handled by `missing`.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    positive_value: &str,
    missing: MissingPolicy,
) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::MissingColumn(label_column.to_string()))?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&c| c != label_idx).collect();
    let names: Vec<String> = feature_cols.iter().map(|&c| headers[c].to_string()).collect();

    let mut cells: Vec<Vec<Option<f64>>> = Vec::new();
    let mut labels = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let label_cell = record.get(label_idx).unwrap_or("");
        if label_cell.is_empty() {
            return Err(Error::UnparseableCell {
                row: row_no,
                col: label_column.to_string(),
                value: String::new(),
            });
        }
        let mut values = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            let raw = record.get(c).unwrap_or("");
            if raw.is_empty() || raw == "?" {
                values.push(None);
                continue;
            }
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(Some(v)),
                _ => {
                    return Err(Error::UnparseableCell {
                        row: row_no,
                        col: headers[c].to_string(),
                        value: raw.to_string(),
                    })
                }
            }
        }
        cells.push(values);
        labels.push(label_cell == positive_value);
    }

    let mut out = Dataset::empty(names, positive_value.to_string());
    match missing {
        MissingPolicy::DropRow => {
            for (values, label) in cells.iter().zip(&labels) {
                if values.iter().all(Option::is_some) {
                    let row: Vec<f64> = values.iter().flatten().copied().collect();
                    out.push(&row, *label, Provenance::Original);
                }
            }
        }
        MissingPolicy::MeanImpute => {
            let d = feature_cols.len();
            let mut means = vec![0.0; d];
            for (j, mean) in means.iter_mut().enumerate() {
                let present: Vec<f64> = cells.iter().filter_map(|r| r[j]).collect();
                if !present.is_empty() {
                    *mean = present.iter().sum::<f64>() / present.len() as f64;
                }
            }
            for (values, label) in cells.iter().zip(&labels) {
                let row: Vec<f64> = values.iter().zip(&means).map(|(v, m)| v.unwrap_or(*m)).collect();
                out.push(&row, *label, Provenance::Original);
            }
        }
    }
    if out.n_rows() == 0 {
        return Err(Error::EmptyAfterPolicy);
    }
    if !out.has_both_classes() {
        return Err(Error::SingleClass);
    }
    Ok(out)
}

/// Standard deviations below this are treated as this value.
pub const STD_FLOOR: f64 = 1e-12;

/// Column-wise z-score transform fitted on a subset of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn fit_standardizer(d: &Dataset, rows: &[usize]) -> Result<Standardizer> {
    if rows.is_empty() {
        return Err(Error::EmptyRowSet);
    }
    let n = rows.len() as f64;
    let cols = d.n_features();
    let mut mean = vec![0.0; cols];
    let mut std = vec![0.0; cols];
    for j in 0..cols {
        let first = d.row(rows[0])[j];
        if rows.iter().all(|&i| d.row(i)[j] == first) {
            // Exact mean so constant columns map to exactly zero.
            mean[j] = first;
            std[j] = STD_FLOOR;
            continue;
        }
        let m = rows.iter().map(|&i| d.row(i)[j]).sum::<f64>() / n;
        let var = rows.iter().map(|&i| (d.row(i)[j] - m).powi(2)).sum::<f64>() / n;
        mean[j] = m;
        std[j] = var.sqrt().max(STD_FLOOR);
    }
    Ok(Standardizer { mean, std })
}

impl Standardizer {
    pub fn fit_all(d: &Dataset) -> Result<Self> {
        let rows: Vec<usize> = (0..d.n_rows()).collect();
        fit_standardizer(d, &rows)
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }

    pub fn apply(&self, d: &Dataset) -> Dataset {
        let mut out = d.clone();
        for i in 0..d.n_rows() {
            for (j, v) in self.transform_row(d.row(i)).into_iter().enumerate() {
                out.set_feature(i, j, v);
            }
        }
        out
    }

    pub fn invert(&self, d: &Dataset) -> Dataset {
        let mut out = d.clone();
        for i in 0..d.n_rows() {
            for j in 0..d.n_features() {
                out.set_feature(i, j, d.row(i)[j] * self.std[j] + self.mean[j]);
            }
        }
        out
    }
}

pub fn apply_standardizer(s: &Standardizer, d: &Dataset) -> Dataset {
    s.apply(d)
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
    fn drop_row_removes_incomplete() {
        let f = write_tmp("a,b,y\n1,2,1\n3,,0\n5,6,0\n");
        let d = load_csv(f.path(), "y", "1", MissingPolicy::DropRow).unwrap();
        assert_eq!(d.n_rows(), 2);
        assert_eq!(d.row(1), &[5.0, 6.0]);
    }

    #[test]
    fn mean_impute_fills_column_mean() {
        let f = write_tmp("a,b,y\n1,2,1\n3,,0\n5,6,0\n");
        let d = load_csv(f.path(), "y", "1", MissingPolicy::MeanImpute).unwrap();
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn wbc_shaped_file_drops_sixteen_rows() {
        let mut text = String::from("c1,c2,c3,class\n");
        for i in 0..699 {
            let malignant = i % 3 == 0;
            let c2 = if i % 43 == 5 && i < 43 * 16 {
                String::new()
            } else {
                format!("{}", i % 10)
            };
            text.push_str(&format!(
                "{},{},{},{}\n",
                i % 7,
                c2,
                i % 5,
                if malignant { 4 } else { 2 }
            ));
        }
        let f = write_tmp(&text);
        let d = load_csv(f.path(), "class", "4", MissingPolicy::DropRow).unwrap();
        assert_eq!(d.n_rows(), 699 - 16);
    }

    #[test]
    fn order_is_preserved() {
        let f = write_tmp("y,x\n0,3\n1,1\n0,2\n");
        let d = load_csv(f.path(), "y", "1", MissingPolicy::DropRow).unwrap();
        assert_eq!(d.rows().map(|r| r[0]).collect::<Vec<_>>(), vec![3.0, 1.0, 2.0]);
        assert_eq!(d.labels(), &[false, true, false]);
    }

    #[test]
    fn loader_errors() {
        let f = write_tmp("a,y\n1,1\n2,0\n");
        assert!(matches!(
            load_csv(f.path(), "label", "1", MissingPolicy::DropRow),
            Err(Error::MissingColumn(_))
        ));
        let f = write_tmp("a,y\n1,1\nabc,0\n");
        assert!(matches!(
            load_csv(f.path(), "y", "1", MissingPolicy::DropRow),
            Err(Error::UnparseableCell { row: 1, .. })
        ));
        let f = write_tmp("a,y\n,1\n,0\n");
        assert!(matches!(
            load_csv(f.path(), "y", "1", MissingPolicy::DropRow),
            Err(Error::EmptyAfterPolicy)
        ));
        let f = write_tmp("a,y\n1,1\n2,1\n");
        assert!(matches!(
            load_csv(f.path(), "y", "1", MissingPolicy::DropRow),
            Err(Error::SingleClass)
        ));
        let f = write_tmp("a,y\ninf,1\n2,0\n");
        assert!(matches!(
            load_csv(f.path(), "y", "1", MissingPolicy::DropRow),
            Err(Error::UnparseableCell { .. })
        ));
    }

    #[test]
    fn imbalance_examples() {
        let labels: Vec<bool> = (0..768).map(|i| i < 268).collect();
        let d = Dataset::from_rows(vec![vec![0.0]; 768], labels);
        let ir = imbalance_rate(&d).unwrap();
        assert_eq!((ir.n_minority, ir.n_majority), (268, 500));
        assert!((ir.value - 0.536).abs() < 1e-12);

        let labels: Vec<bool> = (0..4189).map(|i| i < 437).collect();
        let d = Dataset::from_rows(vec![vec![0.0]; 4189], labels);
        let ir = imbalance_rate(&d).unwrap();
        assert!((ir.value - 437.0 / 3752.0).abs() < 1e-15);
        assert!((ir.value - 0.1165).abs() < 1e-4);

        let labels: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        let d = Dataset::from_rows(vec![vec![0.0]; 10], labels);
        assert_eq!(imbalance_rate(&d).unwrap().value, 1.0);

        let d = Dataset::from_rows(vec![vec![0.0]; 3], vec![true; 3]);
        assert!(matches!(imbalance_rate(&d), Err(Error::SingleClass)));
    }

    #[test]
    fn standardizer_examples() {
        let d = Dataset::from_rows(vec![vec![0.0, 7.0], vec![2.0, 7.0]], vec![true, false]);
        let s = Standardizer::fit_all(&d).unwrap();
        assert_eq!(s.mean, vec![1.0, 7.0]);
        assert_eq!(s.std, vec![1.0, STD_FLOOR]);
        let z = s.apply(&d);
        assert_eq!(z.row(0), &[-1.0, 0.0]);
        assert_eq!(z.row(1), &[1.0, 0.0]);
        assert_eq!(z.labels(), d.labels());
    }

    #[test]
    fn constant_inexact_column_maps_to_zero() {
        let d = Dataset::from_rows(vec![vec![0.1]; 3], vec![true, false, false]);
        let z = Standardizer::fit_all(&d).unwrap().apply(&d);
        assert!(z.rows().all(|r| r[0] == 0.0));
    }

    #[test]
    fn held_out_rows_use_training_statistics() {
        let rows: Vec<Vec<f64>> = (0..101)
            .map(|i| vec![if i == 100 { 1000.0 } else { i as f64 }])
            .collect();
        let labels = (0..101).map(|i| i % 2 == 0).collect();
        let d = Dataset::from_rows(rows, labels);
        let train: Vec<usize> = (0..100).collect();
        let s = fit_standardizer(&d, &train).unwrap();
        assert!((s.mean[0] - 49.5).abs() < 1e-12);
        let z = s.apply(&d);
        let expected = (1000.0 - 49.5) / s.std[0];
        assert!((z.row(100)[0] - expected).abs() < 1e-9);
        assert!(matches!(fit_standardizer(&d, &[]), Err(Error::EmptyRowSet)));
    }

    #[test]
    fn fitted_columns_are_unit_scaled_and_invertible() {
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|i| vec![(i as f64 * 1.7).sin() * 40.0 + 3.0, i as f64 * i as f64])
            .collect();
        let labels = (0..50).map(|i| i % 3 == 0).collect();
        let d = Dataset::from_rows(rows, labels);
        let s = Standardizer::fit_all(&d).unwrap();
        let z = s.apply(&d);
        for j in 0..2 {
            let col: Vec<f64> = z.rows().map(|r| r[j]).collect();
            let m = col.iter().sum::<f64>() / 50.0;
            let sd = (col.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 50.0).sqrt();
            assert!(m.abs() < 1e-9);
            assert!((sd - 1.0).abs() < 1e-6);
        }
        let back = s.invert(&z);
        for (a, b) in back.rows().zip(d.rows()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
