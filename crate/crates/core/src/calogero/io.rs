use std::io::{Read, Write};

use num_complex::Complex64;

use super::state::ParticleState;
use crate::error::{Error, Result};

type C = Complex64;

/// `t, Re(Q_1), Im(Q_1), …, Re(P_1), Im(P_1), …, Re(U), Im(U)`
pub fn trajectory_csv_header(kappa: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for name in ["Q", "P"] {
        for k in 1..=kappa {
            h.push(format!("Re({name}_{k})"));
            h.push(format!("Im({name}_{k})"));
        }
    }
    h.push("Re(U)".into());
    h.push("Im(U)".into());
    h
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_trajectory_csv<W: Write>(out: W, states: &[ParticleState]) -> Result<()> {
    let kappa = states.first().map_or(0, |s| s.kappa);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trajectory_csv_header(kappa)).map_err(csv_err)?;
    for s in states {
        if s.kappa != kappa {
            return Err(Error::InvalidInput("mixed particle counts in one trajectory".into()));
        }
        let mut row = vec![s.t.to_string()];
        for z in s.q.iter().chain(&s.p).chain(std::iter::once(&s.u)) {
            row.push(z.re.to_string());
            row.push(z.im.to_string());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads states back; κ is inferred from the header width.
pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<ParticleState>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.len() < 5 || (header.len() - 3) % 4 != 0 {
        return Err(Error::InvalidInput(format!("bad trajectory header width {}", header.len())));
    }
    let kappa = (header.len() - 3) / 4;
    if header.iter().ne(trajectory_csv_header(kappa).iter().map(String::as_str)) {
        return Err(Error::InvalidInput("unexpected trajectory header".into()));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let vals = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad number {f:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        let z = |i: usize| C::new(vals[1 + 2 * i], vals[2 + 2 * i]);
        let q = (0..kappa).map(z).collect();
        let p = (kappa..2 * kappa).map(z).collect();
        out.push(ParticleState::new(vals[0], q, p, z(2 * kappa))?);
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("trajectory file has no rows".into()));
    }
    Ok(out)
}
