use serde::{Deserialize, Serialize};
use std::fmt;

/// A value with its first-order (Poisson-propagated) standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn new(value: f64, std_err: f64) -> Self {
        Estimate { value, std_err }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, std_err: 0.0 }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*} ± {:.*}", p, self.value, p, self.std_err),
            None => write!(f, "{} ± {}", self.value, self.std_err),
        }
    }
}
