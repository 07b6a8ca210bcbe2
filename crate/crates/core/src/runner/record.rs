//! `results.csv` and `summary.csv`.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::Aggregate;
use crate::problems::ProblemKind;
use crate::sampler::Strategy;

pub const RESULTS_HEADER: [&str; 12] = [
    "problem",
    "strategy",
    "depth",
    "widths",
    "grid",
    "boundary_n",
    "seed",
    "epochs",
    "final_loss",
    "mae",
    "wall_time_s",
    "status",
];

pub const SUMMARY_HEADER: [&str; 7] = ["problem", "widths", "grid", "strategy", "runs", "mean_mae", "sd_mae"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
        })
    }
}

impl FromStr for Status {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ok" => Ok(Status::Ok),
            "failed" => Ok(Status::Failed),
            _ => Err(Error::invalid(format!("unknown status {s:?}"))),
        }
    }
}

/// One training run. Failed runs carry NaN loss and MAE.
#[derive(Clone, Debug)]
pub struct ResultRecord {
    pub problem: ProblemKind,
    pub strategy: Strategy,
    pub depth: usize,
    /// Hidden widths joined by `;`.
    pub widths: String,
    /// `n` for ODEs, `nx x ny` for PDEs.
    pub grid: String,
    pub boundary_n: usize,
    pub seed: u64,
    pub epochs: usize,
    pub final_loss: f64,
    pub mae: f64,
    pub wall_time_s: f64,
    pub status: Status,
}

impl ResultRecord {
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    /// Field-wise equality with floats compared by bit pattern.
    pub fn same_as(&self, other: &ResultRecord, with_wall_time: bool) -> bool {
        self.problem == other.problem
            && self.strategy == other.strategy
            && self.depth == other.depth
            && self.widths == other.widths
            && self.grid == other.grid
            && self.boundary_n == other.boundary_n
            && self.seed == other.seed
            && self.epochs == other.epochs
            && self.final_loss.to_bits() == other.final_loss.to_bits()
            && self.mae.to_bits() == other.mae.to_bits()
            && (!with_wall_time || self.wall_time_s.to_bits() == other.wall_time_s.to_bits())
            && self.status == other.status
    }

    fn fields(&self) -> [String; 12] {
        [
            self.problem.to_string(),
            self.strategy.to_string(),
            self.depth.to_string(),
            self.widths.clone(),
            self.grid.clone(),
            self.boundary_n.to_string(),
            self.seed.to_string(),
            self.epochs.to_string(),
            fmt_float(self.final_loss),
            fmt_float(self.mae),
            fmt_float(self.wall_time_s),
            self.status.to_string(),
        ]
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse<T: FromStr>(s: &str, column: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    s.parse().map_err(|e| Error::invalid(format!("bad {column} value {s:?}: {e}")))
}

pub fn write_results<W: Write>(w: W, records: &[ResultRecord]) -> std::result::Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(RESULTS_HEADER)?;
    for r in records {
        wtr.write_record(r.fields())?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_results<R: Read>(r: R) -> Result<Vec<ResultRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers().map_err(|e| Error::invalid(e.to_string()))?.clone();
    if headers.iter().ne(RESULTS_HEADER.iter().copied()) {
        return Err(Error::invalid(format!("unexpected results header: {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| Error::invalid(e.to_string()))?;
        let f = |i: usize| &row[i];
        out.push(ResultRecord {
            problem: f(0).parse()?,
            strategy: f(1).parse()?,
            depth: parse(f(2), "depth")?,
            widths: f(3).to_string(),
            grid: f(4).to_string(),
            boundary_n: parse(f(5), "boundary_n")?,
            seed: parse(f(6), "seed")?,
            epochs: parse(f(7), "epochs")?,
            final_loss: parse(f(8), "final_loss")?,
            mae: parse(f(9), "mae")?,
            wall_time_s: parse(f(10), "wall_time_s")?,
            status: f(11).parse()?,
        });
    }
    Ok(out)
}

pub fn read_results_file(path: &Path) -> Result<Vec<ResultRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_results(std::io::BufReader::new(file))
}

/// Aggregate MAE of one (problem, architecture, grid, strategy) group.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub problem: ProblemKind,
    pub widths: String,
    pub grid: String,
    pub strategy: Strategy,
    pub aggregate: Aggregate,
}

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> std::result::Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SUMMARY_HEADER)?;
    for r in rows {
        wtr.write_record([
            r.problem.to_string(),
            r.widths.clone(),
            r.grid.clone(),
            r.strategy.to_string(),
            r.aggregate.runs.to_string(),
            fmt_float(r.aggregate.mean_mae),
            fmt_float(r.aggregate.sd),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, proptest};

    fn record(final_loss: f64, mae: f64, status: Status) -> ResultRecord {
        ResultRecord {
            problem: ProblemKind::Poisson,
            strategy: Strategy::SineBased,
            depth: 2,
            widths: "50;50".into(),
            grid: "20x20".into(),
            boundary_n: 30,
            seed: u64::MAX,
            epochs: 50_000,
            final_loss,
            mae,
            wall_time_s: 1.25,
            status,
        }
    }

    #[test]
    fn header_and_line_count() {
        let recs: Vec<_> = (0..15).map(|i| record(i as f64, 0.5, Status::Ok)).collect();
        let mut buf = Vec::new();
        write_results(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 16);
        assert_eq!(
            text.lines().next().unwrap(),
            "problem,strategy,depth,widths,grid,boundary_n,seed,epochs,final_loss,mae,wall_time_s,status"
        );
        let mut empty = Vec::new();
        write_results(&mut empty, &[]).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().lines().count(), 1);
    }

    #[test]
    fn failed_rows_round_trip() {
        let recs = vec![record(f64::NAN, f64::NAN, Status::Failed)];
        let mut buf = Vec::new();
        write_results(&mut buf, &recs).unwrap();
        let back = read_results(&buf[..]).unwrap();
        assert!(back[0].same_as(&recs[0], true));
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(read_results("a,b\n1,2\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn floats_round_trip(loss in 0.0f64..1e6, mae in 0.0f64..1e3, e in -300i32..300) {
            let recs = vec![record(loss * 10f64.powi(e), mae, Status::Ok)];
            let mut buf = Vec::new();
            write_results(&mut buf, &recs).unwrap();
            let back = read_results(&buf[..]).unwrap();
            prop_assert!(back[0].same_as(&recs[0], true));
        }
    }
}
