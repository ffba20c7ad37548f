use serde::{Deserialize, Serialize};

use crate::error::UnitsError;

/// Light speed and action scale. Both default to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub c: f64,
    pub hbar: f64,
}

impl Units {
    pub fn new(c: f64, hbar: f64) -> Result<Self, UnitsError> {
        let u = Units { c, hbar };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<(), UnitsError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(UnitsError::NonPositive { name: "c", value: self.c });
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(UnitsError::NonPositive { name: "hbar", value: self.hbar });
        }
        Ok(())
    }
}

impl Default for Units {
    fn default() -> Self {
        Units { c: 1.0, hbar: 1.0 }
    }
}
