use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::potential::PotentialSpec;
use super::tortoise::radius_and_lapse;
use super::WaveError;

/// Uniform grid `x_i = lo + i h`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self, WaveError> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo && n >= 3) {
            return Err(WaveError::InvalidGrid(format!("[{lo}, {hi}] with {n} nodes")));
        }
        Ok(Grid { lo, hi, n })
    }

    /// Node count chosen so the spacing is `h` up to rounding of `(hi - lo)/h`.
    pub fn with_spacing(lo: f64, hi: f64, h: f64) -> Result<Self, WaveError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(WaveError::InvalidGrid(format!("spacing {h}")));
        }
        Self::new(lo, hi, ((hi - lo) / h).round() as usize + 1)
    }

    /// `[-half_width, half_width]` at spacing `h`.
    pub fn symmetric(half_width: f64, h: f64) -> Result<Self, WaveError> {
        Self::with_spacing(-half_width, half_width, h)
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.x(i))
    }
}

/// Treatment of the two grid ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryRule {
    /// First-order upwind Sommerfeld condition at both ends.
    Outgoing,
    /// `ψ = 0` at the left end (a wall at small `r` on flat grids),
    /// outgoing at the right.
    ReflectingInner,
}

/// Direction of travel of a packet at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Motion {
    /// `π = 0`: splits into two halves.
    Static,
    /// `π = ψ'`, moving toward smaller `r*`.
    Ingoing,
    /// `π = -ψ'`, moving toward larger `r*`.
    Outgoing,
}

/// `ψ(0) = A exp(-(x - x₀)² / 2σ²) e^{ikx}` with `π(0)` set by `motion`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavePacket {
    #[serde(default = "one")]
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    #[serde(default)]
    pub wavenumber: f64,
    pub motion: Motion,
}

fn one() -> f64 {
    1.0
}

impl WavePacket {
    pub fn new(center: f64, width: f64, wavenumber: f64, motion: Motion) -> Self {
        WavePacket { amplitude: 1.0, center, width, wavenumber, motion }
    }

    /// `(ψ, π)` at `x`.
    pub fn sample(&self, x: f64) -> (Complex64, Complex64) {
        let d = x - self.center;
        let s2 = self.width * self.width;
        let psi = Complex64::from_polar(self.amplitude * (-0.5 * d * d / s2).exp(), self.wavenumber * x);
        let dpsi = psi * Complex64::new(-d / s2, self.wavenumber);
        let pi = match self.motion {
            Motion::Static => Complex64::new(0.0, 0.0),
            Motion::Ingoing => dpsi,
            Motion::Outgoing => -dpsi,
        };
        (psi, pi)
    }

    fn validate(&self) -> Result<(), WaveError> {
        let ok = [self.amplitude, self.center, self.wavenumber].iter().all(|v| v.is_finite())
            && self.width > 0.0
            && self.width.is_finite();
        if ok {
            Ok(())
        } else {
            Err(WaveError::InvalidSpec(format!("bad wave packet {self:?}")))
        }
    }
}

/// Complex field pair `(ψ, π = ∂_t ψ)` on a tortoise grid, with the
/// background arrays it needs cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    pub(crate) spec: PotentialSpec,
    pub(crate) grid: Grid,
    pub(crate) boundary: BoundaryRule,
    pub(crate) courant: f64,
    pub(crate) time: f64,
    pub(crate) steps: u64,
    pub(crate) psi: Vec<Complex64>,
    pub(crate) pi: Vec<Complex64>,
    pub(crate) r: Vec<f64>,
    pub(crate) lapse: Vec<f64>,
    pub(crate) v_re: Vec<f64>,
    /// `∂_{r*} V_R`.
    pub(crate) v_re_prime: Vec<f64>,
    pub(crate) v_im: Vec<f64>,
    pub(crate) acc: Vec<Complex64>,
}

pub const DEFAULT_COURANT: f64 = 0.9;

impl ModeState {
    /// Builds a state from a sum of packets.
    pub fn new(
        spec: PotentialSpec,
        grid: Grid,
        boundary: BoundaryRule,
        courant: f64,
        packets: &[WavePacket],
    ) -> Result<Self, WaveError> {
        let mut psi = vec![Complex64::new(0.0, 0.0); grid.n];
        let mut pi = psi.clone();
        for p in packets {
            p.validate()?;
            for (i, x) in grid.nodes().enumerate() {
                let (a, b) = p.sample(x);
                psi[i] += a;
                pi[i] += b;
            }
        }
        Self::from_fields(spec, grid, boundary, courant, psi, pi)
    }

    pub fn from_fields(
        spec: PotentialSpec,
        grid: Grid,
        boundary: BoundaryRule,
        courant: f64,
        mut psi: Vec<Complex64>,
        mut pi: Vec<Complex64>,
    ) -> Result<Self, WaveError> {
        spec.validate()?;
        if !(courant > 0.0 && courant <= 1.0) {
            return Err(WaveError::CflViolation { courant });
        }
        if psi.len() != grid.n || pi.len() != grid.n {
            return Err(WaveError::GridMismatch(format!(
                "fields have {} and {} values for {} nodes",
                psi.len(),
                pi.len(),
                grid.n
            )));
        }
        if spec.mass == 0.0 && grid.lo <= 0.0 {
            return Err(WaveError::InvalidGrid(format!(
                "flat background uses r* = r, so the grid must start above 0 (got {})",
                grid.lo
            )));
        }
        if let Some(i) = psi.iter().chain(pi.iter()).position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(WaveError::InvalidSpec(format!("non-finite initial value at index {}", i % grid.n)));
        }
        let n = grid.n;
        let (mut r, mut lapse) = (Vec::with_capacity(n), Vec::with_capacity(n));
        let (mut v_re, mut v_re_prime, mut v_im) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for x in grid.nodes() {
            let (ri, hi) = radius_and_lapse(x, spec.mass);
            let (v, dv) = spec.real_part(ri);
            r.push(ri);
            lapse.push(hi);
            v_re.push(v);
            v_re_prime.push(dv * hi);
            v_im.push(spec.imag_part(x));
        }
        if boundary == BoundaryRule::ReflectingInner {
            psi[0] = Complex64::new(0.0, 0.0);
            pi[0] = Complex64::new(0.0, 0.0);
        }
        let mut s = ModeState {
            spec,
            grid,
            boundary,
            courant,
            time: 0.0,
            steps: 0,
            psi,
            pi,
            r,
            lapse,
            v_re,
            v_re_prime,
            v_im,
            acc: Vec::new(),
        };
        s.acc = vec![Complex64::new(0.0, 0.0); n];
        s.compute_acceleration_into_self();
        Ok(s)
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn boundary(&self) -> BoundaryRule {
        self.boundary
    }
    pub fn time(&self) -> f64 {
        self.time
    }
    pub fn steps(&self) -> u64 {
        self.steps
    }
    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }
    pub fn pi(&self) -> &[Complex64] {
        &self.pi
    }
    pub fn radii(&self) -> &[f64] {
        &self.r
    }
    pub fn lapse(&self) -> &[f64] {
        &self.lapse
    }
    pub fn potential_real(&self) -> &[f64] {
        &self.v_re
    }
    pub fn potential_imag(&self) -> &[f64] {
        &self.v_im
    }

    pub fn time_step(&self) -> f64 {
        self.courant * self.grid.spacing()
    }

    /// Number of steps that reaches `t_final` from `t = 0`.
    pub fn steps_to(&self, t_final: f64) -> usize {
        (t_final / self.time_step()).round() as usize
    }

    /// `a·self + b·other` on the same grid and background.
    pub fn combine(&self, a: Complex64, other: &ModeState, b: Complex64) -> Result<ModeState, WaveError> {
        if !self.same_background(other) {
            return Err(WaveError::GridMismatch("states live on different grids or backgrounds".into()));
        }
        let mut out = self.clone();
        for i in 0..self.grid.n {
            out.psi[i] = a * self.psi[i] + b * other.psi[i];
            out.pi[i] = a * self.pi[i] + b * other.pi[i];
            out.acc[i] = a * self.acc[i] + b * other.acc[i];
        }
        Ok(out)
    }

    pub(crate) fn same_background(&self, other: &ModeState) -> bool {
        self.grid == other.grid
            && self.spec == other.spec
            && self.boundary == other.boundary
            && self.courant == other.courant
    }

    fn compute_acceleration_into_self(&mut self) {
        let psi = std::mem::take(&mut self.psi);
        let mut acc = std::mem::take(&mut self.acc);
        self.acceleration(&psi, &mut acc);
        self.psi = psi;
        self.acc = acc;
    }

    /// `ψ'' - Vψ` at interior nodes; the end values are set by the boundary rule.
    pub(crate) fn acceleration(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.grid.n;
        let inv_h2 = 1.0 / (self.grid.spacing() * self.grid.spacing());
        for i in 1..n - 1 {
            let lap = (psi[i + 1] - psi[i] * 2.0 + psi[i - 1]) * inv_h2;
            out[i] = lap - Complex64::new(self.v_re[i], self.v_im[i]) * psi[i];
        }
        out[0] = Complex64::new(0.0, 0.0);
        out[n - 1] = Complex64::new(0.0, 0.0);
    }
}
