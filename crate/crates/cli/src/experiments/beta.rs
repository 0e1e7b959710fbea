//! Curve data for the bound plots.

use anyhow::{bail, Result};
use heisdistort_core::bounds::{figure1, figure2, figure3, sample_curve, Admissibility, CurveSeries, Formula};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

impl std::str::FromStr for Figure {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" | "1" => Ok(Figure::Fig1),
            "fig2" | "2" => Ok(Figure::Fig2),
            "fig3" | "3" => Ok(Figure::Fig3),
            _ => bail!("unknown figure {s}; expected fig1, fig2 or fig3"),
        }
    }
}

/// What to plot: one of the standard figures, or a single formula.
#[derive(Debug, Clone, PartialEq)]
pub enum Plot {
    Figure { figure: Figure, n: usize, m: usize, p: f64 },
    Formula(Formula),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureData {
    pub experiment: &'static str,
    pub version: &'static str,
    pub plot: String,
    pub points: usize,
    pub series: Vec<CurveSeries>,
}

pub fn curves(plot: &Plot, points: usize) -> Result<FigureData> {
    let (name, series) = match *plot {
        Plot::Figure { figure: Figure::Fig1, n, m, p } => ("fig1", figure1(n, m, p, points)?),
        Plot::Figure { figure: Figure::Fig2, p, .. } => ("fig2", figure2(p, points)?),
        Plot::Figure { figure: Figure::Fig3, n, m, p } => ("fig3", figure3(n, m, p, points)?),
        Plot::Formula(f) => (f.id(), vec![sample_curve(f, points, Admissibility::Open)?]),
    };
    Ok(FigureData { experiment: "beta", version: env!("CARGO_PKG_VERSION"), plot: name.to_string(), points, series })
}

/// Columns `alpha,beta,series`; numbers use the shortest round-trip form.
pub fn to_csv(data: &FigureData) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "beta", "series"])?;
    for s in &data.series {
        for (a, b) in &s.points {
            w.write_record([a.to_string(), b.to_string(), s.formula.id().to_string()])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn to_json(data: &FigureData) -> String {
    serde_json::to_string_pretty(data).expect("curves serialize") + "\n"
}
