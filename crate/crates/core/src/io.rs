//! Text formats for wavefunctions and phase-space distributions.
//!
//! Both are CSV files whose first line is `# ` followed by a JSON header.
//! Values are written at full round-trip precision.

use std::io::{BufRead, BufReader, Read, Write};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Field, Grid1D};
use crate::phase_space::PhaseSpaceDistribution;
use crate::schrodinger_madelung::Wavefunction;
use crate::units::Units;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionHeader {
    pub grid: Grid1D,
    pub hbar: f64,
    pub mass: f64,
    pub time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionHeader {
    pub x_grid: Grid1D,
    pub p_grid: Grid1D,
    pub mass: f64,
    pub time: f64,
    pub potential: Vec<f64>,
}

fn write_header<W: Write, H: Serialize>(out: &mut W, header: &H) -> Result<()> {
    writeln!(out, "# {}", serde_json::to_string(header)?)?;
    Ok(())
}

fn read_header<R: Read, H: DeserializeOwned>(input: R) -> Result<(H, BufReader<R>)> {
    let mut reader = BufReader::new(input);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let json = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Io("missing `# {json}` header line".into()))?;
    Ok((serde_json::from_str(json.trim())?, reader))
}

fn parse(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Io(format!("not a number: {s:?}")))
}

/// Writes `x, re_psi, im_psi` rows under a JSON header.
pub fn write_wavefunction<W: Write>(mut out: W, psi: &Wavefunction, energy: Option<f64>) -> Result<()> {
    let header = WavefunctionHeader {
        grid: *psi.grid(),
        hbar: psi.hbar,
        mass: psi.mass,
        time: psi.time,
        energy,
    };
    write_header(&mut out, &header)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "re_psi", "im_psi"])?;
    for (x, z) in psi.grid().points().zip(psi.values()) {
        w.write_record([x.to_string(), z.re.to_string(), z.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_wavefunction`]. The amplitude is not
/// required to be normalised.
pub fn read_wavefunction<R: Read>(input: R) -> Result<(Wavefunction, WavefunctionHeader)> {
    let (header, reader): (WavefunctionHeader, _) = read_header(input)?;
    let mut values = Vec::with_capacity(header.grid.len());
    for rec in csv::Reader::from_reader(reader).records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Io(format!("expected 3 columns, got {}", rec.len())));
        }
        values.push(Complex64::new(parse(&rec[1])?, parse(&rec[2])?));
    }
    let units = Units {
        hbar: header.hbar,
        mass: header.mass,
        ..Units::default()
    };
    let psi = Wavefunction::unnormalized(header.grid, values, header.time, &units)?;
    Ok((psi, header))
}

/// Writes `x, p, F` rows (x outer, p inner) under a JSON header.
pub fn write_distribution<W: Write>(mut out: W, f: &PhaseSpaceDistribution) -> Result<()> {
    let header = DistributionHeader {
        x_grid: *f.x_grid(),
        p_grid: *f.p_grid(),
        mass: f.mass,
        time: f.time,
        potential: f.potential().values().to_vec(),
    };
    write_header(&mut out, &header)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "p", "F"])?;
    let ps = f.p_grid().to_vec();
    for (i, x) in f.x_grid().points().enumerate() {
        for (j, p) in ps.iter().enumerate() {
            w.write_record([x.to_string(), p.to_string(), f.values()[[i, j]].to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_distribution`]; the usual construction
/// checks apply.
pub fn read_distribution<R: Read>(input: R) -> Result<PhaseSpaceDistribution> {
    let (header, reader): (DistributionHeader, _) = read_header(input)?;
    let (nx, np) = (header.x_grid.len(), header.p_grid.len());
    let mut flat = Vec::with_capacity(nx * np);
    for rec in csv::Reader::from_reader(reader).records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Io(format!("expected 3 columns, got {}", rec.len())));
        }
        flat.push(parse(&rec[2])?);
    }
    let values = Array2::from_shape_vec((nx, np), flat)
        .map_err(|e| Error::Io(format!("sample count does not match the header grids: {e}")))?;
    let potential = Field::new(header.x_grid, header.potential)?;
    PhaseSpaceDistribution::new(header.x_grid, header.p_grid, values, header.time, header.mass, potential)
}
