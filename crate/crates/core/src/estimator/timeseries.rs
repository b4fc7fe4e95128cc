//! Trajectory CSV export and time-series ingestion.
//!
//! Column layout: `t,label,x0_re,x0_im,...,y0_re,y0_im,...` with one row per
//! micro sample. Timestamps are global (window offset plus grid midpoint);
//! floats are written in shortest round-trip form, so export followed by
//! ingestion reproduces the in-process samples bit for bit.

use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimator::{cross_covariance_of_paths, MicroWindowSample};
use crate::hilbert::{BipartiteShape, StateVector};
use crate::processes::{MicroGrid, TrajectoryPair};

/// One parsed row of an external time series.
#[derive(Debug, Clone)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

/// Streaming writer for trajectory exports.
pub struct TrajectoryCsvWriter<W: Write> {
    writer: W,
    shape: BipartiteShape,
}

impl<W: Write> TrajectoryCsvWriter<W> {
    pub fn new(mut writer: W, shape: BipartiteShape) -> Result<Self> {
        let mut header = String::from("t,label");
        for a in 0..shape.dim_a() {
            header.push_str(&format!(",x{a}_re,x{a}_im"));
        }
        for b in 0..shape.dim_b() {
            header.push_str(&format!(",y{b}_re,y{b}_im"));
        }
        writeln!(writer, "{header}")?;
        Ok(TrajectoryCsvWriter { writer, shape })
    }

    /// Append all rows of one window. `window_index` offsets the timestamps.
    pub fn write_window(
        &mut self,
        window_index: usize,
        grid: &MicroGrid,
        traj: &TrajectoryPair,
    ) -> Result<()> {
        if traj.n_points() != grid.n_points() {
            return Err(Error::shape(
                format!("{} grid points", grid.n_points()),
                format!("{}", traj.n_points()),
            ));
        }
        let offset = window_index as f64 * grid.window_length();
        for i in 0..traj.n_points() {
            let t = offset + grid.midpoint(i);
            let mut row = format!("{t},{}", traj.segment_labels()[i]);
            for a in 0..self.shape.dim_a() {
                let z = traj.x_path()[i].get(a);
                row.push_str(&format!(",{},{}", z.re, z.im));
            }
            for b in 0..self.shape.dim_b() {
                let z = traj.y_path()[i].get(b);
                row.push_str(&format!(",{},{}", z.re, z.im));
            }
            writeln!(self.writer, "{row}")?;
        }
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.writer
    }
}

fn parse_field(field: &str, line: usize, what: &str) -> Result<f64> {
    field.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {what} from `{field}`"),
    })
}

/// Parse a trajectory CSV. Rows must be complete and timestamps strictly
/// increasing; parse failures carry the 1-based line number.
pub fn read_time_series<R: BufRead>(
    reader: R,
    shape: &BipartiteShape,
) -> Result<Vec<TimeSeriesRecord>> {
    let expected_fields = 2 + 2 * (shape.dim_a() + shape.dim_b());
    let mut records = Vec::new();
    let mut prev_t = f64::NEG_INFINITY;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if idx == 0 {
            if !line.starts_with("t,") {
                return Err(Error::Parse {
                    line: line_no,
                    message: "missing header row (expected `t,label,...`)".into(),
                });
            }
            let n = line.split(',').count();
            if n != expected_fields {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("header has {n} columns, expected {expected_fields}"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_fields {
            return Err(Error::Parse {
                line: line_no,
                message: format!(
                    "row has {} columns, expected {expected_fields}",
                    fields.len()
                ),
            });
        }
        let t = parse_field(fields[0], line_no, "timestamp")?;
        if !t.is_finite() || t <= prev_t {
            return Err(Error::Parse {
                line: line_no,
                message: format!("timestamps must be strictly increasing (got {t} after {prev_t})"),
            });
        }
        prev_t = t;
        let mut cursor = 2; // skip label
        let mut component = |line_no: usize| -> Result<Complex64> {
            let re = parse_field(fields[cursor], line_no, "re component")?;
            let im = parse_field(fields[cursor + 1], line_no, "im component")?;
            cursor += 2;
            Ok(Complex64::new(re, im))
        };
        let x: Vec<Complex64> = (0..shape.dim_a())
            .map(|_| component(line_no))
            .collect::<Result<_>>()?;
        let y: Vec<Complex64> = (0..shape.dim_b())
            .map(|_| component(line_no))
            .collect::<Result<_>>()?;
        records.push(TimeSeriesRecord { t, x, y });
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("time series"));
    }
    Ok(records)
}

/// One reassembled window of an ingested series.
#[derive(Debug, Clone)]
pub struct IngestedWindow {
    pub index: usize,
    pub x_path: Vec<StateVector>,
    pub y_path: Vec<StateVector>,
}

/// Group records into non-overlapping windows `[k*W, (k+1)*W)` by timestamp.
/// Every window in `0..n_windows` (declared or inferred from the data) must
/// contain at least one sample.
pub fn partition_windows(
    records: &[TimeSeriesRecord],
    window_length: f64,
    n_windows: Option<usize>,
) -> Result<Vec<IngestedWindow>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("time series"));
    }
    if window_length <= 0.0 || !window_length.is_finite() {
        return Err(Error::InvalidScenario {
            field: "window_length".into(),
            message: format!("must be positive and finite, got {window_length}"),
        });
    }
    let index_of = |t: f64| -> Result<usize> {
        if t < 0.0 {
            return Err(Error::Parse {
                line: 0,
                message: format!("negative timestamp {t}"),
            });
        }
        Ok((t / window_length).floor() as usize)
    };
    let last_index = index_of(records.last().expect("nonempty").t)?;
    let total = match n_windows {
        Some(n) => {
            if last_index >= n {
                return Err(Error::InvalidScenario {
                    field: "n_windows".into(),
                    message: format!(
                        "timestamp {} falls in window {last_index}, beyond the declared {n}",
                        records.last().expect("nonempty").t
                    ),
                });
            }
            n
        }
        Option::None => last_index + 1,
    };
    let mut windows: Vec<IngestedWindow> = (0..total)
        .map(|index| IngestedWindow {
            index,
            x_path: Vec::new(),
            y_path: Vec::new(),
        })
        .collect();
    for r in records {
        let k = index_of(r.t)?;
        windows[k].x_path.push(StateVector::new(r.x.clone())?);
        windows[k].y_path.push(StateVector::new(r.y.clone())?);
    }
    if let Some(w) = windows.iter().find(|w| w.x_path.is_empty()) {
        return Err(Error::EmptyWindow { index: w.index });
    }
    Ok(windows)
}

/// Window samples from an external CSV, with per-window sample counts as
/// divisors.
pub fn ingest_time_series(
    path: &Path,
    shape: &BipartiteShape,
    window_length: f64,
    n_windows: Option<usize>,
) -> Result<Vec<MicroWindowSample>> {
    let file = std::fs::File::open(path)?;
    let records = read_time_series(std::io::BufReader::new(file), shape)?;
    let windows = partition_windows(&records, window_length, n_windows)?;
    samples_from_windows(&windows)
}

/// Per-window cross-covariance of already-partitioned windows.
pub(crate) fn samples_from_windows(windows: &[IngestedWindow]) -> Result<Vec<MicroWindowSample>> {
    windows
        .iter()
        .map(|w| {
            Ok(MicroWindowSample::new(
                w.index,
                cross_covariance_of_paths(&w.x_path, &w.y_path)?,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::streams::window_rng;
    use crate::processes::{build_bell_schedule, sample_trajectory, BellState};

    fn qubit_shape() -> BipartiteShape {
        BipartiteShape::new(2, 2).unwrap()
    }

    #[test]
    fn export_then_read_reproduces_window_samples() {
        let schedule = build_bell_schedule(BellState::PhiPlus);
        let grid = MicroGrid::new(1.0, 8).unwrap();
        let shape = qubit_shape();
        let mut buffer = Vec::new();
        let mut direct = Vec::new();
        {
            let mut writer = TrajectoryCsvWriter::new(&mut buffer, shape).unwrap();
            for j in 0..5usize {
                let traj =
                    sample_trajectory(&schedule, &grid, &mut window_rng(99, j as u64)).unwrap();
                writer.write_window(j, &grid, &traj).unwrap();
                direct.push(crate::estimator::micro_cross_covariance(&traj, &grid, j).unwrap());
            }
        }
        let records = read_time_series(std::io::BufReader::new(&buffer[..]), &shape).unwrap();
        let windows = partition_windows(&records, 1.0, Some(5)).unwrap();
        let samples = samples_from_windows(&windows).unwrap();
        assert_eq!(samples.len(), direct.len());
        for (a, b) in samples.iter().zip(&direct) {
            assert_eq!(a.c_vector().amplitudes(), b.c_vector().amplitudes());
        }
    }

    #[test]
    fn single_row_window_gives_basis_sample() {
        let shape = qubit_shape();
        let csv =
            "t,label,x0_re,x0_im,x1_re,x1_im,y0_re,y0_im,y1_re,y1_im\n0.5,0,1,0,0,0,1,0,0,0\n";
        let records = read_time_series(std::io::BufReader::new(csv.as_bytes()), &shape).unwrap();
        let windows = partition_windows(&records, 1.0, Option::None).unwrap();
        let samples = samples_from_windows(&windows).unwrap();
        assert_eq!(samples.len(), 1);
        assert_eq!(samples[0].c_vector().get(0), Complex64::ONE);
    }

    #[test]
    fn irregular_windows_use_their_own_sample_counts() {
        let shape = qubit_shape();
        let mut csv = String::from("t,label,x0_re,x0_im,x1_re,x1_im,y0_re,y0_im,y1_re,y1_im\n");
        // Windows of sizes 2 / 5 / 3 over [0,1), [1,2), [2,3).
        let times = [0.1, 0.9, 1.1, 1.3, 1.5, 1.7, 1.9, 2.2, 2.4, 2.6];
        for t in times {
            csv.push_str(&format!("{t},0,1,0,0,0,1,0,0,0\n"));
        }
        let records = read_time_series(std::io::BufReader::new(csv.as_bytes()), &shape).unwrap();
        let windows = partition_windows(&records, 1.0, Option::None).unwrap();
        assert_eq!(windows.len(), 3);
        assert_eq!(windows[0].x_path.len(), 2);
        assert_eq!(windows[1].x_path.len(), 5);
        assert_eq!(windows[2].x_path.len(), 3);
        // Constant rows: each window averages to the same unit sample whatever
        // its divisor; the divisors themselves are visible in the path counts.
        let samples = samples_from_windows(&windows).unwrap();
        for s in samples {
            assert_eq!(s.c_vector().get(0), Complex64::ONE);
        }
    }

    #[test]
    fn empty_window_is_reported_by_index() {
        let shape = qubit_shape();
        let mut csv = String::from("t,label,x0_re,x0_im,x1_re,x1_im,y0_re,y0_im,y1_re,y1_im\n");
        for t in [0.5, 2.5] {
            csv.push_str(&format!("{t},0,1,0,0,0,1,0,0,0\n"));
        }
        let records = read_time_series(std::io::BufReader::new(csv.as_bytes()), &shape).unwrap();
        let err = partition_windows(&records, 1.0, Option::None).unwrap_err();
        assert!(matches!(err, Error::EmptyWindow { index: 1 }));
    }

    #[test]
    fn malformed_rows_carry_line_numbers() {
        let shape = qubit_shape();
        let csv =
            "t,label,x0_re,x0_im,x1_re,x1_im,y0_re,y0_im,y1_re,y1_im\n0.5,0,oops,0,0,0,1,0,0,0\n";
        let err = read_time_series(std::io::BufReader::new(csv.as_bytes()), &shape).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let short = "t,label,x0_re,x0_im,x1_re,x1_im,y0_re,y0_im,y1_re,y1_im\n0.5,0,1,0\n";
        assert!(matches!(
            read_time_series(std::io::BufReader::new(short.as_bytes()), &shape),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn non_increasing_timestamps_are_rejected() {
        let shape = qubit_shape();
        let csv = "t,label,x0_re,x0_im,x1_re,x1_im,y0_re,y0_im,y1_re,y1_im\n\
                   0.5,0,1,0,0,0,1,0,0,0\n0.5,0,1,0,0,0,1,0,0,0\n";
        assert!(matches!(
            read_time_series(std::io::BufReader::new(csv.as_bytes()), &shape),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
