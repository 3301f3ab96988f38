//! Parameter sweeps.

use std::collections::BTreeMap;
use std::fmt;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Ns,
    Nn,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variable::Ns => "n_s",
            Variable::Nn => "n_n",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Log,
    Linear,
}

/// A one-dimensional sweep over `variable` with the remaining parameters
/// held at the values in `fixed`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: Variable,
    pub scale: Scale,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub fixed: BTreeMap<String, f64>,
}

impl SweepSpec {
    pub fn new(variable: Variable, scale: Scale, start: f64, stop: f64, points: usize) -> Result<Self, CliError> {
        let spec = Self {
            variable,
            scale,
            start,
            stop,
            points,
            fixed: BTreeMap::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_fixed(mut self, name: &str, value: f64) -> Self {
        self.fixed.insert(name.to_owned(), value);
        self
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let v = self.variable;
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::usage(format!("{v} sweep bounds must be finite")));
        }
        if !(self.start < self.stop) {
            return Err(CliError::usage(format!(
                "{v} sweep needs start < stop, got {} and {}",
                self.start, self.stop
            )));
        }
        if self.points < 2 {
            return Err(CliError::usage(format!(
                "{v} sweep needs at least 2 points, got {}",
                self.points
            )));
        }
        if self.scale == Scale::Log && self.start <= 0.0 {
            return Err(CliError::usage(format!(
                "log-scale {v} sweep needs start > 0, got {}",
                self.start
            )));
        }
        if self.start < 0.0 {
            return Err(CliError::usage(format!("{v} must be >= 0, got {}", self.start)));
        }
        Ok(())
    }

    /// Sweep values in increasing order; the endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == self.points - 1 {
                    return self.stop;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}
