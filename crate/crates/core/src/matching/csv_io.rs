use std::io::{Read, Write};

use super::{PairingPlan, Workforce};
use crate::error::{ModelError, Result};

fn csv_error(e: csv::Error) -> ModelError {
    let line = e.position().map_or(0, |p| p.line());
    ModelError::Csv {
        line,
        message: e.to_string(),
    }
}

/// Reads an empirical workforce: header `prior`, then one prior per line.
pub fn read_workforce_csv<R: Read>(reader: R) -> Result<Workforce> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.len() != 1 || &header[0] != "prior" {
        return Err(ModelError::Csv {
            line: 1,
            message: format!("expected the single header `prior`, found `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut priors = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = record.get(0).unwrap_or("");
        let value: f64 = field.parse().map_err(|_| ModelError::Csv {
            line,
            message: format!("`{field}` is not a number"),
        })?;
        if !(0.0..=1.0).contains(&value) {
            return Err(ModelError::Csv {
                line,
                message: format!("prior {value} outside [0,1]"),
            });
        }
        priors.push(value);
    }
    if priors.is_empty() {
        return Err(ModelError::Csv {
            line: 1,
            message: "no workers listed".into(),
        });
    }
    Workforce::empirical(priors)
}

/// Writes `worker_a,worker_b,pair_value` rows; workers are identified by
/// their priors. `fmt` renders every number.
pub fn write_pairs_csv<W: Write>(writer: W, plan: &PairingPlan, fmt: impl Fn(f64) -> String) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| ModelError::Io(e.to_string());
    wtr.write_record(["worker_a", "worker_b", "pair_value"]).map_err(io)?;
    for p in &plan.pairs {
        wtr.write_record([fmt(p.prior_a), fmt(p.prior_b), fmt(p.value)]).map_err(io)?;
    }
    wtr.flush()?;
    Ok(())
}
