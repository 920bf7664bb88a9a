use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::pearson::pearson;
use super::profile::{profile_class, ComplexityProfile, ProfileConfig};
use crate::error::{Error, Result};
use crate::pointcloud::{load_point_cloud, Format};
use crate::topology::HoleMetrics;

/// Per-class accuracies keyed by label.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AccuracyTable {
    pub accuracies: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl AccuracyTable {
    /// Parses `label,accuracy` rows. A non-numeric first row is a header.
    /// Values above 1 are read as percentages.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut table = AccuracyTable::default();
        let mut percent_rows = 0usize;
        for (idx, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Format {
                line: idx + 1,
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(idx + 1);
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            if record.len() != 2 {
                return Err(Error::Format {
                    line,
                    message: format!("expected `label,accuracy`, found {} fields", record.len()),
                });
            }
            let label = record[0].to_string();
            let Ok(mut acc) = record[1].parse::<f64>() else {
                if table.accuracies.is_empty() && percent_rows == 0 && idx == 0 {
                    continue;
                }
                return Err(Error::Format {
                    line,
                    message: format!("accuracy {:?} is not a number", &record[1]),
                });
            };
            if acc > 1.0 {
                acc /= 100.0;
                percent_rows += 1;
            }
            if !(0.0..=1.0).contains(&acc) {
                return Err(Error::Validation(format!(
                    "accuracy for {label:?} at line {line} is outside [0, 1]"
                )));
            }
            if table.accuracies.insert(label.clone(), acc).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate label {label:?} in accuracy table"
                )));
            }
        }
        if percent_rows > 0 {
            table.warnings.push(format!(
                "{percent_rows} accuracy values above 1 were read as percentages and divided by 100"
            ));
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// Complexity measures correlated against accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    GlobalId,
    MeanAbsCurvature,
    MeanCurvature,
    NHoles,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::GlobalId => "global_id",
            Measure::MeanAbsCurvature => "mean_abs_curvature",
            Measure::MeanCurvature => "mean_curvature",
            Measure::NHoles => "n_holes",
        }
    }

    pub fn value(self, profile: &ComplexityProfile) -> Option<f64> {
        match self {
            Measure::GlobalId => profile.global_id,
            Measure::MeanAbsCurvature => profile.mean_abs_curvature,
            Measure::MeanCurvature => profile.mean_curvature,
            Measure::NHoles => profile.holes.map(|h| h.n_holes as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportOptions {
    /// Correlate the signed mean curvature instead of the mean absolute one.
    pub signed_curvature: bool,
}

impl ReportOptions {
    pub fn measures(&self) -> [Measure; 3] {
        let curvature = if self.signed_curvature {
            Measure::MeanCurvature
        } else {
            Measure::MeanAbsCurvature
        };
        [Measure::GlobalId, curvature, Measure::NHoles]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEntry {
    pub label: String,
    pub accuracy: f64,
    pub n_points: usize,
    pub global_id: Option<f64>,
    pub mean_curvature: Option<f64>,
    pub mean_abs_curvature: Option<f64>,
    pub holes: Option<HoleMetrics>,
    pub essential_h1: Option<usize>,
    pub parameters: super::profile::ResolvedParameters,
    pub warnings: Vec<String>,
}

impl ClassEntry {
    fn new(accuracy: f64, p: ComplexityProfile) -> Self {
        Self {
            label: p.label,
            accuracy,
            n_points: p.n_points,
            global_id: p.global_id,
            mean_curvature: p.mean_curvature,
            mean_abs_curvature: p.mean_abs_curvature,
            holes: p.holes,
            essential_h1: p.essential_h1,
            parameters: p.parameters,
            warnings: p.warnings,
        }
    }

    fn profile(&self) -> ComplexityProfile {
        ComplexityProfile {
            label: self.label.clone(),
            n_points: self.n_points,
            global_id: self.global_id,
            mean_curvature: self.mean_curvature,
            mean_abs_curvature: self.mean_abs_curvature,
            holes: self.holes,
            essential_h1: self.essential_h1,
            parameters: self.parameters,
            warnings: Vec::new(),
        }
    }
}

/// Per-class accuracy joined with complexity, plus Pearson correlations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub config: serde_json::Value,
    pub classes: Vec<ClassEntry>,
    pub correlations: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl BiasReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per class for spreadsheet use.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "label",
            "accuracy",
            "n_points",
            "global_id",
            "mean_curvature",
            "mean_abs_curvature",
            "n_holes",
            "total_persistence",
            "avg_persistence",
            "persistence_density",
        ])
        .expect("in-memory csv");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        for c in &self.classes {
            w.write_record([
                c.label.clone(),
                format!("{:?}", c.accuracy),
                c.n_points.to_string(),
                opt(c.global_id),
                opt(c.mean_curvature),
                opt(c.mean_abs_curvature),
                c.holes.map(|h| h.n_holes.to_string()).unwrap_or_default(),
                opt(c.holes.map(|h| h.total_persistence)),
                opt(c.holes.map(|h| h.avg_persistence)),
                opt(c.holes.map(|h| h.persistence_density)),
            ])
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }
}

/// One embeddings file per class; the file stem is the label.
pub fn discover_classes(dir: impl AsRef<Path>) -> Result<Vec<(String, PathBuf)>> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut found = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        if stem.starts_with('.') {
            continue;
        }
        found.push((stem.to_string(), path));
    }
    found.sort();
    Ok(found)
}

/// Correlates accuracy against each measure over the classes where it is defined.
pub fn correlate(
    classes: &[(f64, ComplexityProfile)],
    measures: &[Measure],
    warnings: &mut Vec<String>,
) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for &measure in measures {
        let (acc, values): (Vec<f64>, Vec<f64>) = classes
            .iter()
            .filter_map(|(a, p)| measure.value(p).map(|v| (*a, v)))
            .unzip();
        match pearson(&acc, &values) {
            Ok(r) => {
                out.insert(measure.name().to_string(), r);
            }
            Err(Error::UndefinedCorrelation { measure: which, reason }) => {
                let subject = if which == "x" { "accuracy" } else { measure.name() };
                warnings.push(format!(
                    "correlation for {} undefined: {subject}: {reason}",
                    measure.name()
                ));
            }
            Err(e) => warnings.push(format!("correlation for {} undefined: {e}", measure.name())),
        }
    }
    out
}

/// Profiles pre-loaded classes and correlates them with accuracy.
pub fn bias_report_from_profiles(
    classes: Vec<ClassEntry>,
    config: serde_json::Value,
    options: &ReportOptions,
    mut warnings: Vec<String>,
) -> Result<BiasReport> {
    if classes.len() < 3 {
        return Err(Error::UndefinedCorrelation {
            measure: "all".into(),
            reason: format!("need at least 3 matched classes, found {}", classes.len()),
        });
    }
    let pairs: Vec<(f64, ComplexityProfile)> = classes.iter().map(|c| (c.accuracy, c.profile())).collect();
    let correlations = correlate(&pairs, &options.measures(), &mut warnings);
    if correlations.is_empty() {
        return Err(Error::UndefinedCorrelation {
            measure: "all".into(),
            reason: warnings.join("; "),
        });
    }
    Ok(BiasReport {
        config,
        classes,
        correlations,
        warnings,
    })
}

/// End-to-end pipeline: load every class file in `embeddings_dir`, join with
/// the accuracy table, profile each class and correlate.
pub fn build_bias_report(
    embeddings_dir: impl AsRef<Path>,
    accuracy_table: impl AsRef<Path>,
    config: &ProfileConfig,
    options: &ReportOptions,
    config_echo: serde_json::Value,
) -> Result<BiasReport> {
    let table = AccuracyTable::load(accuracy_table.as_ref())?;
    let mut warnings = table.warnings.clone();
    let accuracy_file = fs::canonicalize(accuracy_table.as_ref()).ok();
    let files: Vec<_> = discover_classes(embeddings_dir)?
        .into_iter()
        .filter(|(_, p)| fs::canonicalize(p).ok() != accuracy_file)
        .collect();

    let file_labels: BTreeSet<&str> = files.iter().map(|(l, _)| l.as_str()).collect();
    for label in table.accuracies.keys() {
        if !file_labels.contains(label.as_str()) {
            warnings.push(format!(
                "class {label:?} has an accuracy but no embeddings file; skipped"
            ));
        }
    }
    let matched: Vec<(String, PathBuf, f64)> = files
        .into_iter()
        .filter_map(|(label, path)| match table.accuracies.get(&label) {
            Some(&acc) => Some((label, path, acc)),
            None => {
                warnings.push(format!("class {label:?} has embeddings but no accuracy; skipped"));
                None
            }
        })
        .collect();

    let results: Vec<Result<ClassEntry>> = matched
        .par_iter()
        .map(|(label, path, acc)| {
            let format = Format::detect(path)?;
            let cloud = load_point_cloud(path, format)?.with_label(label.clone());
            let profile = profile_class(&cloud, config)?;
            Ok(ClassEntry::new(*acc, profile))
        })
        .collect();

    let mut classes = Vec::with_capacity(results.len());
    for ((label, _, _), result) in matched.iter().zip(results) {
        match result {
            Ok(entry) => classes.push(entry),
            Err(e @ Error::Parameter(_)) => return Err(e),
            Err(e) => warnings.push(format!("class {label:?} omitted: {e}")),
        }
    }
    bias_report_from_profiles(classes, config_echo, options, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_table_parsing() {
        let t = AccuracyTable::parse("label,accuracy\ncat,0.9\ndog,85\n").unwrap();
        assert_eq!(t.accuracies["cat"], 0.9);
        assert!((t.accuracies["dog"] - 0.85).abs() < 1e-15);
        assert_eq!(t.warnings.len(), 1);
    }

    #[test]
    fn accuracy_table_rejects_bad_rows() {
        assert!(AccuracyTable::parse("a,0.5\nb\n").is_err());
        assert!(AccuracyTable::parse("a,0.5\na,0.6\n").is_err());
        assert!(AccuracyTable::parse("a,-0.5\n").is_err());
        assert!(AccuracyTable::parse("a,0.5\nb,x\n").is_err());
    }

    #[test]
    fn too_few_classes() {
        let err = bias_report_from_profiles(
            Vec::new(),
            serde_json::Value::Null,
            &ReportOptions::default(),
            Vec::new(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
