//! Potential models: validated Hermitian matrix potentials with support
//! metadata, decay certificates, and JSON/CSV interchange.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat};
use crate::quad;

pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineDomain {
    HalfLine,
    FullLine,
}

/// Interval outside which V vanishes exactly, or decay metadata when the
/// support is unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Compact { x_lo: f64, x_hi: f64 },
    Unbounded { decay_rate: f64 },
}

impl Support {
    pub fn is_compact(&self) -> bool {
        matches!(self, Support::Compact { .. })
    }
}

#[derive(Debug, Clone)]
pub enum Preset {
    Zero { n: usize },
    SquareWell { v0: CMat, a: f64, b: f64 },
    DiagonalDecay { values: Vec<f64>, rate: f64, cutoff: f64 },
    Sech2 { kappa: f64 },
}

#[derive(Debug, Clone)]
pub enum PotentialKind {
    Preset(Preset),
    /// Grid samples with piecewise-linear interpolation; zero outside.
    Grid { xs: Vec<f64>, values: Vec<CMat> },
}

#[derive(Debug, Clone)]
pub struct PotentialModel {
    n: usize,
    line: LineDomain,
    kind: PotentialKind,
    support: Support,
}

impl PotentialModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn line(&self) -> LineDomain {
        self.line
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn zero(n: usize, line: LineDomain) -> PotentialModel {
        PotentialModel {
            n,
            line,
            kind: PotentialKind::Preset(Preset::Zero { n }),
            support: Support::Compact { x_lo: 0.0, x_hi: 0.0 },
        }
    }

    /// Constant Hermitian block on [a, b], zero elsewhere.
    pub fn square_well(v0: CMat, a: f64, b: f64, line: LineDomain) -> Result<PotentialModel> {
        if !(a < b) {
            return Err(Error::InvalidPotential(format!(
                "degenerate interval [{a}, {b}]"
            )));
        }
        if line == LineDomain::HalfLine && a < 0.0 {
            return Err(Error::InvalidPotential(
                "half-line support must satisfy x_lo >= 0".into(),
            ));
        }
        let v0 = linalg::require_hermitian(&v0, HERMITICITY_TOL)?;
        let n = v0.nrows();
        Ok(PotentialModel {
            n,
            line,
            kind: PotentialKind::Preset(Preset::SquareWell { v0, a, b }),
            support: Support::Compact { x_lo: a, x_hi: b },
        })
    }

    /// Diagonal entries v_l e^{-2 rate |x|}, truncated to zero beyond |x| > cutoff.
    pub fn diagonal_decay(
        values: Vec<f64>,
        rate: f64,
        cutoff: f64,
        line: LineDomain,
    ) -> Result<PotentialModel> {
        if values.is_empty() {
            return Err(Error::InvalidPotential("empty diagonal".into()));
        }
        if rate < 0.0 || cutoff <= 0.0 {
            return Err(Error::InvalidPotential(
                "diagonal_decay needs rate >= 0 and cutoff > 0".into(),
            ));
        }
        let n = values.len();
        let x_lo = match line {
            LineDomain::HalfLine => 0.0,
            LineDomain::FullLine => -cutoff,
        };
        Ok(PotentialModel {
            n,
            line,
            kind: PotentialKind::Preset(Preset::DiagonalDecay { values, rate, cutoff }),
            support: Support::Compact { x_lo, x_hi: cutoff },
        })
    }

    /// Scalar reflectionless profile V(x) = -2 kappa^2 sech^2(kappa x), full line.
    pub fn sech2(kappa: f64) -> Result<PotentialModel> {
        if kappa <= 0.0 {
            return Err(Error::InvalidPotential("sech2 needs kappa > 0".into()));
        }
        Ok(PotentialModel {
            n: 1,
            line: LineDomain::FullLine,
            kind: PotentialKind::Preset(Preset::Sech2 { kappa }),
            support: Support::Unbounded { decay_rate: 2.0 * kappa },
        })
    }

    /// Piecewise-linear grid model; V vanishes outside [xs[0], xs[last]].
    pub fn from_grid(xs: Vec<f64>, values: Vec<CMat>, line: LineDomain) -> Result<PotentialModel> {
        if xs.len() < 2 || xs.len() != values.len() {
            return Err(Error::InvalidPotential(format!(
                "grid needs >= 2 samples and matching lengths (got {} xs, {} values)",
                xs.len(),
                values.len()
            )));
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidPotential(
                "grid x-samples must be strictly increasing".into(),
            ));
        }
        if line == LineDomain::HalfLine && xs[0] < 0.0 {
            return Err(Error::InvalidPotential(
                "half-line grid must start at x >= 0".into(),
            ));
        }
        let n = values[0].nrows();
        let mut herm = Vec::with_capacity(values.len());
        for v in &values {
            if v.nrows() != n || v.ncols() != n {
                return Err(Error::InvalidPotential("inconsistent sample dimensions".into()));
            }
            herm.push(linalg::require_hermitian(v, HERMITICITY_TOL)?);
        }
        let support = Support::Compact { x_lo: xs[0], x_hi: *xs.last().unwrap() };
        Ok(PotentialModel {
            n,
            line,
            kind: PotentialKind::Grid { xs, values: herm },
            support,
        })
    }

    /// V(x); Hermitian by construction.
    pub fn evaluate(&self, x: f64) -> CMat {
        match &self.kind {
            PotentialKind::Preset(Preset::Zero { n }) => CMat::zeros(*n, *n),
            PotentialKind::Preset(Preset::SquareWell { v0, a, b }) => {
                if x >= *a && x <= *b {
                    v0.clone()
                } else {
                    CMat::zeros(self.n, self.n)
                }
            }
            PotentialKind::Preset(Preset::DiagonalDecay { values, rate, cutoff }) => {
                let mut m = CMat::zeros(self.n, self.n);
                let inside = match self.line {
                    LineDomain::HalfLine => (0.0..=*cutoff).contains(&x),
                    LineDomain::FullLine => x.abs() <= *cutoff,
                };
                if inside {
                    let damp = (-2.0 * rate * x.abs()).exp();
                    for (l, &v) in values.iter().enumerate() {
                        m[(l, l)] = C64::new(v * damp, 0.0);
                    }
                }
                m
            }
            PotentialKind::Preset(Preset::Sech2 { kappa }) => {
                let s = 1.0 / (kappa * x).cosh();
                CMat::from_element(1, 1, C64::new(-2.0 * kappa * kappa * s * s, 0.0))
            }
            PotentialKind::Grid { xs, values } => {
                if x < xs[0] || x > *xs.last().unwrap() {
                    return CMat::zeros(self.n, self.n);
                }
                let idx = match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
                    Ok(i) => return values[i].clone(),
                    Err(i) => i,
                };
                let (x0, x1) = (xs[idx - 1], xs[idx]);
                let t = (x - x0) / (x1 - x0);
                values[idx - 1].map(|e| e * (1.0 - t)) + values[idx].map(|e| e * t)
            }
        }
    }

    /// Σ_{l,s} |V_ls(x)|, the scalar envelope used by the moment integrals.
    pub fn entry_abs_sum(&self, x: f64) -> f64 {
        self.evaluate(x).iter().map(|e| e.norm()).sum()
    }

    /// Constant-matrix pieces when the model is exactly piecewise constant,
    /// enabling the segment-exact propagator.
    pub fn piecewise_constant_segments(&self) -> Option<Vec<(f64, f64, CMat)>> {
        match &self.kind {
            PotentialKind::Preset(Preset::Zero { .. }) => Some(vec![]),
            PotentialKind::Preset(Preset::SquareWell { v0, a, b }) => {
                Some(vec![(*a, *b, v0.clone())])
            }
            _ => None,
        }
    }

    /// Coarse upper bound for bound-state momenta: k_N^2 <= max_x ||V(x)||.
    pub fn bound_state_kmax_estimate(&self) -> f64 {
        let (lo, hi) = match self.support {
            Support::Compact { x_lo, x_hi } => (x_lo, x_hi),
            Support::Unbounded { .. } => (-10.0, 10.0),
        };
        let mut max_norm: f64 = 0.0;
        let samples = 512;
        for i in 0..=samples {
            let x = lo + (hi - lo) * i as f64 / samples as f64;
            max_norm = max_norm.max(linalg::op_norm(&self.evaluate(x)));
        }
        1.05 * max_norm.sqrt() + 0.25
    }

    pub fn is_scalar(&self) -> bool {
        self.n == 1
    }
}

// ---------------------------------------------------------------------------
// Decay certificates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpMoment {
    Finite(f64),
    Infinite,
}

impl ExpMoment {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExpMoment::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ExpMoment::Finite(v) => Some(*v),
            ExpMoment::Infinite => None,
        }
    }
}

/// Numerically certified decay data for a model: the first moment
/// Σ∫(1+|x|)|V_ls|dx, the exponential moment Σ∫|V_ls|e^{2γ|x|}dx, and a
/// truncation point beyond which the neglected tails are below `tol`.
#[derive(Debug, Clone, Copy)]
pub struct DecayCertificate {
    pub gamma: f64,
    pub moment1: f64,
    pub expmoment: ExpMoment,
    pub x_max: f64,
    pub tol: f64,
}

impl DecayCertificate {
    pub fn strip_available(&self, im_k: f64) -> bool {
        im_k >= 0.0 || (self.expmoment.is_finite() && -im_k < self.gamma)
    }
}

/// Evaluate the certificate integrals by adaptive quadrature. Rejects
/// models whose first moment diverges; flags the exponential moment as
/// infinite when the weighted integrand fails a tail decay test.
pub fn certify_decay(model: &PotentialModel, gamma: f64, tol: f64) -> Result<DecayCertificate> {
    if gamma < 0.0 {
        return Err(Error::Config("gamma must be >= 0".into()));
    }
    if tol <= 0.0 {
        return Err(Error::Config("tol must be > 0".into()));
    }
    let m1 = |x: f64| (1.0 + x.abs()) * model.entry_abs_sum(x);
    let me = |x: f64| (2.0 * gamma * x.abs()).exp() * model.entry_abs_sum(x);

    match model.support {
        Support::Compact { x_lo, x_hi } => {
            if x_lo == x_hi {
                return Ok(DecayCertificate {
                    gamma,
                    moment1: 0.0,
                    expmoment: ExpMoment::Finite(0.0),
                    x_max: x_hi.abs().max(x_lo.abs()),
                    tol,
                });
            }
            let (moment1, _) = quad::adaptive_simpson(&m1, x_lo, x_hi, tol);
            let (expm, _) = quad::adaptive_simpson(&me, x_lo, x_hi, tol);
            Ok(DecayCertificate {
                gamma,
                moment1,
                expmoment: ExpMoment::Finite(expm),
                x_max: x_hi.abs().max(x_lo.abs()),
                tol,
            })
        }
        Support::Unbounded { .. } => {
            let one_sided = |f: &dyn Fn(f64) -> f64| -> Option<(f64, f64)> {
                quad::semi_infinite(&|x| f(x), 0.0, tol).map(|(v, _, xm)| (v, xm))
            };
            let right1 = one_sided(&m1).ok_or(Error::DivergentMoment)?;
            let (m1_total, x_max1) = match model.line {
                LineDomain::HalfLine => right1,
                LineDomain::FullLine => {
                    let left = quad::semi_infinite(&|x| m1(-x), 0.0, tol)
                        .ok_or(Error::DivergentMoment)?;
                    (right1.0 + left.0, right1.1.max(left.2))
                }
            };
            let exp_right = one_sided(&me);
            let expmoment = match (model.line, exp_right) {
                (_, None) => ExpMoment::Infinite,
                (LineDomain::HalfLine, Some((v, _))) => ExpMoment::Finite(v),
                (LineDomain::FullLine, Some((v, _))) => {
                    match quad::semi_infinite(&|x| me(-x), 0.0, tol) {
                        Some((v2, _, _)) => ExpMoment::Finite(v + v2),
                        None => ExpMoment::Infinite,
                    }
                }
            };
            // Truncation point serves the gamma-weighted integrand when finite,
            // else the first moment.
            let x_max = match (expmoment, exp_right) {
                (ExpMoment::Finite(_), Some((_, xm))) => xm.max(x_max1),
                _ => x_max1,
            };
            Ok(DecayCertificate { gamma, moment1: m1_total, expmoment, x_max, tol })
        }
    }
}

// ---------------------------------------------------------------------------
// JSON / CSV interchange
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct PotentialJson {
    n: usize,
    #[serde(default = "default_line")]
    line: LineDomain,
    kind: String,
    params: serde_json::Value,
}

fn default_line() -> LineDomain {
    LineDomain::HalfLine
}

impl PotentialModel {
    pub fn to_json(&self) -> serde_json::Value {
        let (kind, params) = match &self.kind {
            PotentialKind::Preset(Preset::Zero { .. }) => {
                ("preset".to_string(), serde_json::json!({ "name": "zero" }))
            }
            PotentialKind::Preset(Preset::SquareWell { v0, a, b }) => (
                "preset".to_string(),
                serde_json::json!({
                    "name": "square_well",
                    "v0": linalg::to_pairs(v0),
                    "interval": [a, b],
                }),
            ),
            PotentialKind::Preset(Preset::DiagonalDecay { values, rate, cutoff }) => (
                "preset".to_string(),
                serde_json::json!({
                    "name": "diagonal_decay",
                    "values": values,
                    "rate": rate,
                    "cutoff": cutoff,
                }),
            ),
            PotentialKind::Preset(Preset::Sech2 { kappa }) => (
                "preset".to_string(),
                serde_json::json!({ "name": "sech2", "kappa": kappa }),
            ),
            PotentialKind::Grid { xs, values } => (
                "grid".to_string(),
                serde_json::json!({
                    "x": xs,
                    "v": values.iter().map(linalg::to_pairs).collect::<Vec<_>>(),
                }),
            ),
        };
        serde_json::json!({
            "n": self.n,
            "line": self.line,
            "kind": kind,
            "params": params,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<PotentialModel> {
        let parsed: PotentialJson = serde_json::from_value(value.clone())?;
        let p = &parsed.params;
        match parsed.kind.as_str() {
            "preset" => {
                let name = p
                    .get("name")
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| Error::Config("preset needs a name".into()))?;
                match name {
                    "zero" => Ok(PotentialModel::zero(parsed.n, parsed.line)),
                    "square_well" => {
                        let pairs: Vec<[f64; 2]> =
                            serde_json::from_value(p["v0"].clone())?;
                        let v0 = linalg::from_pairs(parsed.n, parsed.n, &pairs)?;
                        let iv: [f64; 2] = serde_json::from_value(p["interval"].clone())?;
                        PotentialModel::square_well(v0, iv[0], iv[1], parsed.line)
                    }
                    "diagonal_decay" => {
                        let values: Vec<f64> = serde_json::from_value(p["values"].clone())?;
                        let rate = p["rate"].as_f64().unwrap_or(0.0);
                        let cutoff = p["cutoff"].as_f64().unwrap_or(0.0);
                        PotentialModel::diagonal_decay(values, rate, cutoff, parsed.line)
                    }
                    "sech2" => {
                        let kappa = p["kappa"].as_f64().unwrap_or(0.0);
                        PotentialModel::sech2(kappa)
                    }
                    other => Err(Error::Config(format!("unknown preset '{other}'"))),
                }
            }
            "grid" => {
                let xs: Vec<f64> = serde_json::from_value(p["x"].clone())?;
                let raw: Vec<Vec<[f64; 2]>> = serde_json::from_value(p["v"].clone())?;
                let values = raw
                    .iter()
                    .map(|pairs| linalg::from_pairs(parsed.n, parsed.n, pairs))
                    .collect::<Result<Vec<_>>>()?;
                PotentialModel::from_grid(xs, values, parsed.line)
            }
            other => Err(Error::Config(format!("unknown potential kind '{other}'"))),
        }
    }

    /// CSV columns: x, then n^2 re,im pairs row-major.
    pub fn write_csv<W: Write>(&self, w: &mut W, xs: &[f64]) -> Result<()> {
        let n = self.n;
        let mut header = vec!["x".to_string()];
        for i in 0..n {
            for j in 0..n {
                header.push(format!("V{}{}_re", i + 1, j + 1));
                header.push(format!("V{}{}_im", i + 1, j + 1));
            }
        }
        writeln!(w, "{}", header.join(","))?;
        for &x in xs {
            let v = self.evaluate(x);
            let mut row = vec![format_float(x)];
            for i in 0..n {
                for j in 0..n {
                    row.push(format_float(v[(i, j)].re));
                    row.push(format_float(v[(i, j)].im));
                }
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn grid_from_csv<R: BufRead>(reader: R, n: usize, line: LineDomain) -> Result<PotentialModel> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (lineno, row) in reader.lines().enumerate() {
            let row = row?;
            let trimmed = row.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if lineno == 0 && fields[0].parse::<f64>().is_err() {
                continue; // header
            }
            if fields.len() != 1 + 2 * n * n {
                return Err(Error::Config(format!(
                    "CSV row {} has {} fields, expected {}",
                    lineno + 1,
                    fields.len(),
                    1 + 2 * n * n
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad float '{s}': {e}")))
            };
            xs.push(parse(fields[0])?);
            let mut pairs = Vec::with_capacity(n * n);
            for c in 0..(n * n) {
                pairs.push([parse(fields[1 + 2 * c])?, parse(fields[2 + 2 * c])?]);
            }
            values.push(linalg::from_pairs(n, n, &pairs)?);
        }
        PotentialModel::from_grid(xs, values, line)
    }

    pub fn grid_from_csv_path(path: &Path, n: usize, line: LineDomain) -> Result<PotentialModel> {
        let file = std::fs::File::open(path)?;
        PotentialModel::grid_from_csv(std::io::BufReader::new(file), n, line)
    }
}

pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.17e}")
    }
}
