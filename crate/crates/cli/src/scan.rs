//! `--scan var:log|lin:lo:hi:points` grids.

use std::fmt;
use std::str::FromStr;

use microcavity::optimize::{linear_grid, log_grid};
use microcavity::params::{AtomParams, CavityParams, DriveParams};
use microcavity::units::{mhz, per_us};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanVar {
    /// Pump rate, photons per µs.
    JIn,
    /// MHz.
    KappaT,
    /// MHz.
    KappaLoss,
    /// Units of Γ.
    DeltaA,
    /// Detector counts.
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Lin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub var: ScanVar,
    pub spacing: Spacing,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl ScanVar {
    pub fn column(self) -> &'static str {
        match self {
            ScanVar::JIn => "j_in [1/us]",
            ScanVar::KappaT => "kappa_t [MHz/2pi]",
            ScanVar::KappaLoss => "kappa_loss [MHz/2pi]",
            ScanVar::DeltaA => "delta_a [gamma]",
            ScanVar::Threshold => "threshold [counts]",
        }
    }

    fn name(self) -> &'static str {
        match self {
            ScanVar::JIn => "j_in",
            ScanVar::KappaT => "kappa_t",
            ScanVar::KappaLoss => "kappa_loss",
            ScanVar::DeltaA => "delta_a",
            ScanVar::Threshold => "threshold",
        }
    }
}

impl FromStr for ScanSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [var, spacing, lo, hi, points] = parts[..] else {
            return Err(format!("expected var:log|lin:lo:hi:points, got `{s}`"));
        };
        let var = match var {
            "j_in" => ScanVar::JIn,
            "kappa_t" => ScanVar::KappaT,
            "kappa_loss" => ScanVar::KappaLoss,
            "delta_a" => ScanVar::DeltaA,
            "threshold" => ScanVar::Threshold,
            other => return Err(format!("unknown scan variable `{other}`")),
        };
        let spacing = match spacing {
            "log" => Spacing::Log,
            "lin" => Spacing::Lin,
            other => return Err(format!("unknown grid `{other}`, use log or lin")),
        };
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad bound `{t}`: {e}"));
        let spec = ScanSpec {
            var,
            spacing,
            lo: num(lo)?,
            hi: num(hi)?,
            points: points.parse().map_err(|e| format!("bad point count `{points}`: {e}"))?,
        };
        spec.check()?;
        Ok(spec)
    }
}

impl fmt::Display for ScanSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spacing = match self.spacing {
            Spacing::Log => "log",
            Spacing::Lin => "lin",
        };
        write!(f, "{}:{spacing}:{}:{}:{}", self.var.name(), self.lo, self.hi, self.points)
    }
}

impl ScanSpec {
    pub fn log_j_in(lo: f64, hi: f64, points: usize) -> Self {
        ScanSpec { var: ScanVar::JIn, spacing: Spacing::Log, lo, hi, points }
    }

    fn check(&self) -> Result<(), String> {
        if self.points < 2 {
            return Err("need at least 2 points".into());
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(format!("need finite lo < hi, got {} and {}", self.lo, self.hi));
        }
        if self.spacing == Spacing::Log && self.lo <= 0.0 {
            return Err("log grid needs positive bounds".into());
        }
        let min = match self.var {
            ScanVar::JIn | ScanVar::KappaLoss | ScanVar::Threshold => 0.0,
            ScanVar::KappaT => f64::MIN_POSITIVE,
            ScanVar::DeltaA => f64::NEG_INFINITY,
        };
        if self.lo < min {
            return Err(format!("{} must not go below {min}", self.var.name()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let v = match self.spacing {
            Spacing::Log => log_grid(self.lo, self.hi, self.points),
            Spacing::Lin => linear_grid(self.lo, self.hi, self.points),
        };
        if self.var == ScanVar::Threshold {
            let mut t: Vec<f64> = v.into_iter().map(f64::round).collect();
            t.dedup();
            t
        } else {
            v
        }
    }

    /// Copies of the parameters with the scanned quantity set to `value`.
    pub fn apply(
        &self,
        value: f64,
        atom: &AtomParams,
        cavity: &CavityParams,
        drive: &DriveParams,
    ) -> (AtomParams, CavityParams, DriveParams) {
        let (mut a, mut c, mut d) = (*atom, *cavity, *drive);
        match self.var {
            ScanVar::JIn => d.j_in = per_us(value),
            ScanVar::KappaT => c.kappa_t = mhz(value),
            ScanVar::KappaLoss => c.kappa_loss = mhz(value),
            ScanVar::DeltaA => a.delta_a = value * a.gamma,
            ScanVar::Threshold => {}
        }
        (a, c, d)
    }
}
