//! CSV results and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{to_toml, ManifestSection, RunConfig};
use crate::experiments::SweepRow;

pub const CSV_HEADER: [&str; 12] = [
    "scenario", "B", "U", "B_prime", "n", "np", "snr_db", "s_star", "epsilon", "ci95", "n_samples",
    "master_seed",
];

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct OutputError {
    pub path: String,
    #[source]
    pub source: std::io::Error,
}

fn float(x: f64) -> String {
    format!("{x:.8e}")
}

/// Rows sorted by scenario name, then `B_prime`, then `np`; stable otherwise.
pub fn sorted(rows: &[SweepRow]) -> Vec<SweepRow> {
    let mut out = rows.to_vec();
    out.sort_by(|a, b| {
        (a.scenario.as_str(), a.b_prime, a.np).cmp(&(b.scenario.as_str(), b.b_prime, b.np))
    });
    out
}

/// Writes the CSV to any sink.
pub fn write_csv<W: Write>(rows: &[SweepRow], sink: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in sorted(rows) {
        w.write_record([
            r.scenario.as_str().to_string(),
            r.b.to_string(),
            r.u.to_string(),
            r.b_prime.to_string(),
            r.n.to_string(),
            r.np.to_string(),
            float(r.snr_db),
            float(r.s_star),
            float(r.epsilon),
            float(r.ci95),
            r.n_samples.to_string(),
            r.master_seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn io_error(path: &Path, e: impl Into<std::io::Error>) -> OutputError {
    OutputError { path: path.display().to_string(), source: e.into() }
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<(), OutputError> {
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    write_csv(rows, std::io::BufWriter::new(file)).map_err(|e| io_error(path, e))
}

/// `results.csv` -> `results.toml`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("toml")
}

/// Resolved config plus a `[manifest]` table. Feeding the file back through
/// `--config` reproduces the CSV.
pub fn manifest_text(cfg: &RunConfig, command: &str, wall_time_s: f64) -> String {
    let mut raw = cfg.to_raw();
    raw.manifest = Some(ManifestSection {
        command: Some(command.to_string()),
        code_version: Some(env!("CARGO_PKG_VERSION").to_string()),
        wall_time_s: Some(wall_time_s),
    });
    to_toml(&raw)
}

pub fn emit_manifest(cfg: &RunConfig, command: &str, wall_time_s: f64, csv: &Path) -> Result<PathBuf, OutputError> {
    let path = manifest_path(csv);
    std::fs::write(&path, manifest_text(cfg, command, wall_time_s)).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::RowKind;

    fn row(kind: RowKind, b_prime: usize, np: usize) -> SweepRow {
        SweepRow {
            scenario: kind,
            b: 100,
            u: 10,
            b_prime,
            n: 288,
            np,
            snr_db: 1.23456789012,
            s_star: f64::NAN,
            epsilon: 4.5e-6,
            ci95: 1e-7,
            n_samples: 1000,
            master_seed: 7,
            converged: true,
        }
    }

    fn render(rows: &[SweepRow]) -> String {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn header_only() {
        assert_eq!(render(&[]), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn twelve_fields_nine_digits() {
        let text = render(&[row(RowKind::UeInitUl, 0, 50)]);
        let line = text.lines().nth(1).unwrap();
        let fields: Vec<_> = line.split(',').collect();
        assert_eq!(fields.len(), 12);
        assert_eq!(fields[6], "1.23456789e0");
        assert_eq!(fields[7], "NaN");
    }

    #[test]
    fn rows_are_sorted() {
        let text = render(&[
            row(RowKind::UeTotalDbSum, 0, 10),
            row(RowKind::BsInitDl, 10, 96),
            row(RowKind::BsInitDl, 4, 200),
            row(RowKind::BsInitDl, 4, 20),
            row(RowKind::UeInitDl, 0, 10),
        ]);
        let keys: Vec<String> = text
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<_> = l.split(',').collect();
                format!("{}/{}/{}", f[0], f[3], f[5])
            })
            .collect();
        assert_eq!(
            keys,
            ["bs-init-dl/4/20", "bs-init-dl/4/200", "bs-init-dl/10/96", "ue-init-dl/0/10", "ue-total-dbsum/0/10"]
        );
    }
}
