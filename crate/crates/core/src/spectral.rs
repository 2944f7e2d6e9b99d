//! General polarizabilities as spectral densities over squared energies.
//!
//! A polarizability on the Matsubara axis is written as
//! `h(K²) = ∫ α(m²) m² / (K² + m²) d(m²)` with a non-negative density
//! `α(m²)`. Supported densities:
//!
//! - sharp lines `α δ(m² − E²)` (the simple harmonic oscillator),
//! - damped-oscillator lines of width γ,
//!   `α(m²) = α E² γ / (π m ((E² − m²)² + γ² m²))`, which integrates to α
//!   exactly over `m² > 0`,
//! - finite sums of the above,
//! - tabulated densities, linearly interpolated in m² and zero off-grid.
//!
//! The overlap strength that replaces `H (πβ/2) δ(ω₁ − ω₂)` for broadened
//! spectra is
//! `H₀ = (πβ/2) ∫₀^∞ m⁴ α₁(m²) α₂(m²) / sinh²(βm/2) dm`.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{invalid, require_nonnegative, require_positive, Error, Result};
use crate::quadrature::{gauss_legendre, Adaptive, Tolerance};
use crate::response::{OscillatorModel, ThermalState};
use crate::special::x_over_sinh_sq;

/// Tables with more nodes than this are not split at every node.
const MAX_TABLE_BREAKS: usize = 4096;

/// Multiples of γ at which broadened lines seed the quadrature.
const LINE_OFFSETS: [f64; 9] = [-300.0, -30.0, -3.0, -0.5, 0.0, 0.5, 3.0, 30.0, 300.0];

/// One spectral line. `width == 0` is a sharp line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub weight: f64,
    pub center: f64,
    pub width: f64,
}

impl SpectralLine {
    pub fn new(weight: f64, center: f64, width: f64) -> Result<Self> {
        Ok(Self {
            weight: require_nonnegative("weight", weight)?,
            center: require_positive("center", center)?,
            width: require_nonnegative("width", width)?,
        })
    }

    pub fn is_sharp(&self) -> bool {
        self.width == 0.0
    }

    /// Damped-oscillator density over m² (zero for sharp lines).
    fn density(&self, m2: f64) -> f64 {
        if m2 <= 0.0 {
            return 0.0;
        }
        self.density_at(m2.sqrt())
    }

    /// The same density as a function of the energy m; the factor
    /// `(E − m)(E + m)` avoids cancellation next to the line centre.
    fn density_at(&self, m: f64) -> f64 {
        if self.is_sharp() || m <= 0.0 {
            return 0.0;
        }
        let e = self.center;
        let d = (e - m) * (e + m);
        let g = self.width;
        self.weight * e * e * g / (PI * m * (d * d + g * g * m * m))
    }
}

/// Density given on a grid of squared energies.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpectrum {
    m2: Vec<f64>,
    density: Vec<f64>,
}

impl TabulatedSpectrum {
    pub fn new(m2: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if m2.len() != density.len() {
            return Err(invalid("table", "column lengths differ"));
        }
        if m2.len() < 2 {
            return Err(invalid("table", "need at least two rows"));
        }
        for (i, (&u, &d)) in m2.iter().zip(&density).enumerate() {
            if !(u.is_finite() && u >= 0.0) {
                return Err(invalid("table", format!("row {}: m² = {u} must be >= 0", i + 1)));
            }
            if !(d.is_finite() && d >= 0.0) {
                return Err(invalid(
                    "table",
                    format!("row {}: density = {d} must be >= 0 (passive medium)", i + 1),
                ));
            }
        }
        if let Some(i) = m2.windows(2).position(|w| w[1] <= w[0]) {
            return Err(invalid(
                "table",
                format!("row {}: m² column must be strictly increasing", i + 2),
            ));
        }
        Ok(Self { m2, density })
    }

    /// Parses two numeric columns (comma or whitespace separated); `#` starts
    /// a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m2 = Vec::new();
        let mut density = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(invalid(
                    "table",
                    format!("line {}: expected 2 columns, found {}", lineno + 1, cols.len()),
                ));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| invalid("table", format!("line {}: `{s}` is not a number", lineno + 1)))
            };
            m2.push(parse(cols[0])?);
            density.push(parse(cols[1])?);
        }
        Self::new(m2, density)
    }

    pub fn load(path: &Path) -> std::io::Result<Result<Self>> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn grid(&self) -> &[f64] {
        &self.m2
    }

    pub fn values(&self) -> &[f64] {
        &self.density
    }

    /// Linear interpolation; zero outside the grid.
    pub fn interpolate(&self, u: f64) -> f64 {
        let (first, last) = (self.m2[0], *self.m2.last().unwrap());
        if u < first || u > last {
            return 0.0;
        }
        let i = self.m2.partition_point(|&x| x <= u);
        if i == 0 {
            return self.density[0];
        }
        if i >= self.m2.len() {
            return *self.density.last().unwrap();
        }
        let (u0, u1) = (self.m2[i - 1], self.m2[i]);
        let t = (u - u0) / (u1 - u0);
        self.density[i - 1] + t * (self.density[i] - self.density[i - 1])
    }

    /// Trapezoid integral of the density over m².
    pub fn integral(&self) -> f64 {
        self.m2
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(u, d)| 0.5 * (u[1] - u[0]) * (d[0] + d[1]))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    SharpLine,
    LorentzianLine,
    LineSum,
    Tabulated,
}

/// A passive spectral polarizability.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralPolarizability {
    Lines(Vec<SpectralLine>),
    Tabulated(TabulatedSpectrum),
}

impl From<OscillatorModel> for SpectralPolarizability {
    fn from(o: OscillatorModel) -> Self {
        SpectralPolarizability::Lines(vec![SpectralLine {
            weight: o.alpha0(),
            center: o.energy(),
            width: 0.0,
        }])
    }
}

impl SpectralPolarizability {
    pub fn sharp(weight: f64, center: f64) -> Result<Self> {
        Ok(Self::Lines(vec![SpectralLine::new(weight, center, 0.0)?]))
    }

    pub fn lorentzian(weight: f64, center: f64, width: f64) -> Result<Self> {
        require_positive("width", width)?;
        Ok(Self::Lines(vec![SpectralLine::new(weight, center, width)?]))
    }

    pub fn lines(lines: Vec<SpectralLine>) -> Result<Self> {
        if lines.is_empty() {
            return Err(invalid("lines", "need at least one line"));
        }
        for l in &lines {
            SpectralLine::new(l.weight, l.center, l.width)?;
        }
        Ok(Self::Lines(lines))
    }

    pub fn kind(&self) -> SpectrumKind {
        match self {
            Self::Tabulated(_) => SpectrumKind::Tabulated,
            Self::Lines(l) if l.len() > 1 => SpectrumKind::LineSum,
            Self::Lines(l) if l[0].is_sharp() => SpectrumKind::SharpLine,
            Self::Lines(_) => SpectrumKind::LorentzianLine,
        }
    }

    /// Every line sharp: the spectrum is a pure distribution.
    pub fn is_sharp(&self) -> bool {
        matches!(self, Self::Lines(l) if l.iter().all(SpectralLine::is_sharp))
    }

    pub fn has_sharp_part(&self) -> bool {
        matches!(self, Self::Lines(l) if l.iter().any(SpectralLine::is_sharp))
    }

    fn sharp_lines(&self) -> impl Iterator<Item = &SpectralLine> {
        let lines: &[SpectralLine] = match self {
            Self::Lines(l) => l,
            Self::Tabulated(_) => &[],
        };
        lines.iter().filter(|l| l.is_sharp() && l.weight > 0.0)
    }

    /// `∫ α(m²) d(m²)`: the sum of line weights or the table integral.
    pub fn static_polarizability(&self) -> f64 {
        match self {
            Self::Lines(l) => l.iter().map(|l| l.weight).sum(),
            Self::Tabulated(t) => t.integral(),
        }
    }

    /// Density of the non-sharp part at m².
    fn continuous_density(&self, m2: f64) -> f64 {
        match self {
            Self::Lines(l) => l.iter().map(|l| l.density(m2)).sum(),
            Self::Tabulated(t) => t.interpolate(m2),
        }
    }

    /// Density of the non-sharp part at energy m.
    fn continuous_density_at(&self, m: f64) -> f64 {
        match self {
            Self::Lines(l) => l.iter().map(|l| l.density_at(m)).sum(),
            Self::Tabulated(t) => t.interpolate(m * m),
        }
    }

    /// Breakpoints in m (energy) for integrals over this spectrum.
    fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Self::Lines(lines) => {
                for l in lines {
                    out.push(l.center);
                    if !l.is_sharp() {
                        out.extend(LINE_OFFSETS.iter().map(|s| l.center + s * l.width));
                    }
                }
            }
            Self::Tabulated(t) => {
                let g = t.grid();
                if g.len() <= MAX_TABLE_BREAKS {
                    out.extend(g.iter().map(|u| u.sqrt()));
                } else {
                    out.push(g[0].sqrt());
                    out.push(g[g.len() - 1].sqrt());
                }
            }
        }
    }

    /// All line widths set to `width` (sweeps over broadening).
    pub fn with_width(&self, width: f64) -> Result<Self> {
        require_nonnegative("width", width)?;
        match self {
            Self::Lines(l) => Ok(Self::Lines(
                l.iter().map(|l| SpectralLine { width, ..*l }).collect(),
            )),
            Self::Tabulated(_) => Err(invalid("width", "tabulated spectra have no line width")),
        }
    }

    /// All line centres shifted by `delta` (sweeps over detuning).
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        match self {
            Self::Lines(l) => {
                let lines = l
                    .iter()
                    .map(|l| SpectralLine::new(l.weight, l.center + delta, l.width))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::Lines(lines))
            }
            Self::Tabulated(_) => Err(invalid("detuning", "tabulated spectra cannot be shifted")),
        }
    }

    /// Approximates the spectrum by weighted sharp lines `(α_k, E_k)`.
    /// Broadened lines are sampled on `nodes` Gauss points in the variable
    /// `θ = atan(2(m − E)/γ)` over `|m − E| <= 20γ`, renormalized to the line
    /// weight; tables contribute one line per grid node with trapezoid
    /// weights.
    pub fn discretize(&self, nodes: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        match self {
            Self::Lines(lines) => {
                let (x, w) = gauss_legendre(nodes.max(1));
                for l in lines {
                    if l.weight == 0.0 {
                        continue;
                    }
                    if l.is_sharp() {
                        out.push((l.weight, l.center));
                        continue;
                    }
                    let half = 0.5 * l.width;
                    let lo = (l.center - 20.0 * l.width).max(0.5 * l.center);
                    let hi = l.center + 20.0 * l.width;
                    let (t0, t1) = (((lo - l.center) / half).atan(), ((hi - l.center) / half).atan());
                    let mut pts: Vec<(f64, f64)> = x
                        .iter()
                        .zip(&w)
                        .map(|(&xi, &wi)| {
                            let th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * xi;
                            let m = l.center + half * th.tan();
                            let dm = half / th.cos().powi(2);
                            let wt = l.density_at(m) * 2.0 * m * dm * wi * 0.5 * (t1 - t0);
                            (wt, m)
                        })
                        .collect();
                    let total: f64 = pts.iter().map(|p| p.0).sum();
                    for p in &mut pts {
                        p.0 *= l.weight / total;
                    }
                    out.extend(pts);
                }
            }
            Self::Tabulated(t) => {
                let (g, d) = (t.grid(), t.values());
                for i in 0..g.len() {
                    let left = if i > 0 { g[i] - g[i - 1] } else { 0.0 };
                    let right = if i + 1 < g.len() { g[i + 1] - g[i] } else { 0.0 };
                    let wt = 0.5 * (left + right) * d[i];
                    if wt > 0.0 && g[i] > 0.0 {
                        out.push((wt, g[i].sqrt()));
                    }
                }
            }
        }
        out
    }
}

/// α(m²) at a point. Sharp lines have no pointwise value.
pub fn spectral_density(model: &SpectralPolarizability, m2: f64) -> Result<f64> {
    if !(m2.is_finite() && m2 > 0.0) {
        return Err(Error::Domain(format!("m² must be > 0, got {m2}")));
    }
    if model.has_sharp_part() {
        return Err(Error::Distributional(
            "a sharp line has no pointwise density; use polarizability_from_spectrum or \
             friction_strength_sharp"
                .into(),
        ));
    }
    Ok(model.continuous_density(m2))
}

fn sorted_breaks(mut pts: Vec<f64>, lo: f64) -> Vec<f64> {
    pts.retain(|p| p.is_finite() && *p > lo);
    pts.push(lo);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(b.abs()));
    pts
}

/// h(K²) on the Matsubara axis. Sharp lines use α E²/(K² + E²) exactly;
/// broadened and tabulated parts are integrated adaptively.
pub fn polarizability_from_spectrum(
    model: &SpectralPolarizability,
    k: f64,
    tol: Tolerance,
) -> Result<f64> {
    if !k.is_finite() {
        return Err(invalid("K", "must be finite"));
    }
    let k2 = k * k;
    let q = Adaptive::new(tol);
    match model {
        SpectralPolarizability::Lines(lines) => {
            let mut total = 0.0;
            for l in lines {
                if l.is_sharp() {
                    let e2 = l.center * l.center;
                    total += l.weight * e2 / (k2 + e2);
                    continue;
                }
                let mut pts = Vec::new();
                pts.extend(LINE_OFFSETS.iter().map(|s| l.center + s * l.width));
                let breaks = sorted_breaks(pts, 0.0);
                // d(m²) = 2m dm
                let r = q.integrate_with_breaks_to_infinity(
                    |m| {
                        let m2 = m * m;
                        l.density_at(m) * 2.0 * m * m2 / (k2 + m2)
                    },
                    &breaks,
                )?;
                total += r.value;
            }
            Ok(total)
        }
        SpectralPolarizability::Tabulated(t) => {
            let g = t.grid();
            let breaks: Vec<f64> = if g.len() <= MAX_TABLE_BREAKS {
                g.to_vec()
            } else {
                vec![g[0], g[g.len() - 1]]
            };
            if k2 == 0.0 {
                // Integrand is the interpolant itself.
                return Ok(t.integral());
            }
            let r = q.integrate_with_breaks(|u| t.interpolate(u) * u / (k2 + u), &breaks)?;
            Ok(r.value)
        }
    }
}

/// H₀ with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapStrength {
    pub h0: f64,
    pub quadrature_error: f64,
}

/// Finite-temperature overlap strength H₀ of two spectra.
///
/// Two purely sharp spectra are rejected: their overlap is a δ-distribution
/// and belongs to `friction_strength_sharp`. Sharp lines against a
/// broadened partner are evaluated exactly at the line energy.
pub fn overlap_strength(
    s1: &SpectralPolarizability,
    s2: &SpectralPolarizability,
    th: &ThermalState,
    tol: Tolerance,
) -> Result<OverlapStrength> {
    if s1.is_sharp() && s2.is_sharp() {
        return Err(Error::Distributional(
            "overlap of two sharp spectra is a δ-function; use friction_strength_sharp".into(),
        ));
    }
    for a in s1.sharp_lines() {
        if s2.sharp_lines().any(|b| b.center == a.center) {
            return Err(Error::Distributional(format!(
                "coincident sharp lines at E = {} in both spectra",
                a.center
            )));
        }
    }
    let beta = th.beta();
    let prefactor = PI * beta / 2.0;

    // sharp line (α, E) against a continuous density c: ∫ m⁴ α δ(m² − E²) c(m²)/sinh² dm
    //   = α E³ c(E²) / (2 sinh²(βE/2))
    let mut sharp = 0.0;
    let cross = |lines: &SpectralPolarizability, other: &SpectralPolarizability| -> f64 {
        lines
            .sharp_lines()
            .map(|l| {
                let e = l.center;
                let x = 0.5 * beta * e;
                // E⁴/sinh²(x) = E² (2/β)² x²/sinh²(x)
                let e4_over = e * e * (2.0 / beta).powi(2) * x_over_sinh_sq(x);
                l.weight * e4_over * other.continuous_density_at(e) / (2.0 * e)
            })
            .sum()
    };
    sharp += cross(s1, s2);
    sharp += cross(s2, s1);

    let mut pts = Vec::new();
    s1.breakpoints(&mut pts);
    s2.breakpoints(&mut pts);
    pts.push(2.0 / beta);
    let breaks = sorted_breaks(pts, 0.0);

    let scaled = Tolerance::new(tol.abs / prefactor, tol.rel);
    let integral = Adaptive::new(scaled)
        .with_max_segments(20_000)
        .integrate_with_breaks_to_infinity(
            |m| {
                if m <= 0.0 {
                    return 0.0;
                }
                let m2 = m * m;
                let c = s1.continuous_density_at(m) * s2.continuous_density_at(m);
                if c == 0.0 {
                    return 0.0;
                }
                // m⁴/sinh²(βm/2) = m² (2/β)² x²/sinh²(x)
                c * m2 * (2.0 / beta).powi(2) * x_over_sinh_sq(0.5 * beta * m)
            },
            &breaks,
        )?;
    Ok(OverlapStrength {
        h0: prefactor * (integral.value + sharp),
        quadrature_error: prefactor * integral.error,
    })
}

/// Checks `∫∫ δ(ω₁ − ω₂) d(m₁²) d(m₂²) = 4 m² dω` numerically.
///
/// A normalized Gaussian bump `B(m²)` of width `0.1 E²` (in m²) is integrated
/// against a Gaussian `δ_γ(ω₁ − ω₂)` of width γ over `d(m₁²) d(m₂²)`, and
/// the result is divided by `∫ 4ω² B(ω²)² dω`. The ratio tends to 1 as
/// `γ → 0`.
pub fn verify_measure_identity(e: f64, gamma: f64) -> Result<f64> {
    require_positive("E", e)?;
    require_positive("gamma", gamma)?;
    if gamma > 1e-3 * e {
        return Err(invalid("gamma", format!("must be <= 1e-3 E = {}", 1e-3 * e)));
    }
    let u0 = e * e;
    let width = 0.1 * u0;
    let bump = |u: f64| {
        let z = (u - u0) / width;
        (-0.5 * z * z).exp() / (width * (2.0 * PI).sqrt())
    };
    let delta = |x: f64| {
        let z = x / gamma;
        (-0.5 * z * z).exp() / (gamma * (2.0 * PI).sqrt())
    };
    let (lo, hi) = (u0 - 8.0 * width, u0 + 8.0 * width);
    let tol = Tolerance::relative(1e-10);
    let inner_q = Adaptive::new(tol);

    let outer = Adaptive::new(tol).with_parallel_nodes(true).integrate_with_breaks(
        |u1: f64| {
            let w1 = u1.sqrt();
            // δ_γ support in u₂ around u₁
            let a = ((w1 - 12.0 * gamma).max(0.0)).powi(2).max(lo);
            let b = ((w1 + 12.0 * gamma).powi(2)).min(hi);
            if b <= a {
                return 0.0;
            }
            let mid = u1.clamp(a, b);
            let breaks: Vec<f64> = if mid > a && mid < b { vec![a, mid, b] } else { vec![a, b] };
            let inner = inner_q
                .integrate_with_breaks(|u2| delta(w1 - u2.sqrt()) * bump(u2), &breaks)
                .map(|r| r.value)
                .unwrap_or(f64::NAN);
            bump(u1) * inner
        },
        &[lo, u0, hi],
    )?;

    let rhs = Adaptive::new(tol).integrate_with_breaks(
        |w: f64| {
            let b = bump(w * w);
            4.0 * w * w * b * b
        },
        &[lo.sqrt(), e, hi.sqrt()],
    )?;
    Ok(outer.value / rhs.value)
}
