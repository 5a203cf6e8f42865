//! Result serialization: a flat CSV with one row per (probe, observable)
//! and JSON lines mirroring the records losslessly.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::runner::ResultRecord;

/// 17 significant digits: exact reconstruction of any f64 on re-parse.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Flat CSV text with the fixed column set
/// `experiment, graph, params, probe_t, observable, mean, stderr, n, seed`.
pub fn emit_csv(records: &[ResultRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::invalid("records", "nothing to emit"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "experiment",
        "graph",
        "params",
        "probe_t",
        "observable",
        "mean",
        "stderr",
        "n",
        "seed",
    ])
    .map_err(csv_err)?;
    for r in records {
        let graph = r.graph.to_string();
        // Display for f64 is shortest-round-trip, so the echo is exact too.
        let params = format!("model={};p={};replicas={}", r.model, r.p, r.replicas);
        let seed = r.seed.to_string();
        for obs in &r.observables {
            for v in &obs.values {
                w.write_record([
                    r.experiment.name(),
                    graph.as_str(),
                    params.as_str(),
                    fmt_f64(v.probe_t).as_str(),
                    obs.observable.as_str(),
                    fmt_f64(v.mean).as_str(),
                    fmt_f64(v.stderr).as_str(),
                    v.n.to_string().as_str(),
                    seed.as_str(),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// JSON lines: one complete record per line; `parse(emit_json(r)) == r`.
pub fn emit_json(records: &[ResultRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::invalid("records", "nothing to emit"));
    }
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

fn io_with_path(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Writes `<base>.csv` and `<base>.jsonl`, creating parent directories.
/// A trailing `.csv` / `.json` / `.jsonl` on `base` is stripped first.
pub fn write_outputs(records: &[ResultRecord], base: &Path) -> Result<(PathBuf, PathBuf)> {
    let stem = match base.extension().and_then(|e| e.to_str()) {
        Some("csv" | "json" | "jsonl") => base.with_extension(""),
        _ => base.to_path_buf(),
    };
    if let Some(parent) = stem.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| io_with_path(parent, e))?;
        }
    }
    let csv_path = stem.with_extension("csv");
    let jsonl_path = stem.with_extension("jsonl");
    fs::write(&csv_path, emit_csv(records)?).map_err(|e| io_with_path(&csv_path, e))?;
    fs::write(&jsonl_path, emit_json(records)?).map_err(|e| io_with_path(&jsonl_path, e))?;
    Ok((csv_path, jsonl_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::{ExperimentKind, ModelSpec};
    use crate::experiment::runner::{ObservableSeries, ProbeValue};
    use crate::graph::GraphKind;

    fn record() -> ResultRecord {
        ResultRecord {
            experiment: ExperimentKind::MeanfieldTreeSweep,
            graph: GraphKind::TreeBall { branching: 2, radius: 6 },
            model: ModelSpec::BiasVoter { lambda: 2.0, theta: 1.0 },
            p: 0.3,
            probes: vec![1.0],
            replicas: 4,
            seed: 7,
            observables: vec![ObservableSeries {
                observable: "root_marginal".to_string(),
                values: vec![ProbeValue { probe_t: 1.0, mean: 0.1 + 0.2, stderr: 1.0 / 3.0, n: 4 }],
            }],
            wall_clock_seconds: 0.25,
        }
    }

    #[test]
    fn csv_has_header_plus_one_row_per_value() {
        let text = emit_csv(&[record()]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            "experiment,graph,params,probe_t,observable,mean,stderr,n,seed"
        );
        assert!(lines[1].starts_with("meanfield_tree_sweep,"));
    }

    #[test]
    fn csv_numeric_fields_reparse_exactly() {
        let text = emit_csv(&[record()]).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let row = reader.records().next().unwrap().unwrap();
        // The graph field contains a comma and must survive quoting.
        assert_eq!(&row[1], "tree_ball(branching=2,radius=6)");
        assert_eq!(&row[2], "model=bias_voter(lambda=2,theta=1);p=0.3;replicas=4");
        assert_eq!(row[3].parse::<f64>().unwrap(), 1.0);
        assert_eq!(row[5].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(row[6].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(&row[7], "4");
        assert_eq!(&row[8], "7");
    }

    #[test]
    fn json_lines_round_trip_losslessly() {
        let original = vec![record(), record()];
        let text = emit_json(&original).unwrap();
        assert_eq!(text.lines().count(), 2);
        let parsed: Vec<ResultRecord> = text
            .lines()
            .map(|line| serde_json::from_str(line).unwrap())
            .collect();
        assert_eq!(parsed, original);
    }

    #[test]
    fn empty_record_lists_are_rejected() {
        assert!(emit_csv(&[]).is_err());
        assert!(emit_json(&[]).is_err());
    }

    #[test]
    fn outputs_land_next_to_the_requested_base_path() {
        let dir = std::env::temp_dir().join(format!("spinlab-emit-{}", std::process::id()));
        let base = dir.join("nested/run.csv");
        let (csv_path, jsonl_path) = write_outputs(&[record()], &base).unwrap();
        assert_eq!(csv_path, dir.join("nested/run.csv"));
        assert_eq!(jsonl_path, dir.join("nested/run.jsonl"));
        assert!(fs::read_to_string(&csv_path).unwrap().starts_with("experiment,"));
        assert!(fs::read_to_string(&jsonl_path).unwrap().contains("root_marginal"));
        fs::remove_dir_all(&dir).unwrap();
    }
}
