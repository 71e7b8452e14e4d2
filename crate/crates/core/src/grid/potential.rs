use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Short-range perturbations added to the Stark field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    /// `-depth · exp(-((x - center)/width)²)`
    GaussianWell {
        depth: f64,
        width: f64,
        center: f64,
    },
    /// `charge · (reg² + (x - center)²)^(-1/2)`, principal branch off the real line.
    SoftCoulomb {
        charge: f64,
        reg: f64,
        center: f64,
    },
    /// `-depth` on `|x| < half_width`, zero elsewhere. Not analytic: only real
    /// arguments, or complex ones outside the support, are accepted.
    SquareWell {
        depth: f64,
        half_width: f64,
    },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite, got {v}")))
            }
        };
        match *self {
            PotentialSpec::Zero => Ok(()),
            PotentialSpec::GaussianWell { depth, width, center } => {
                finite("depth", depth)?;
                finite("center", center)?;
                if !(width > 0.0 && width.is_finite()) {
                    return Err(invalid("width", format!("must be positive, got {width}")));
                }
                Ok(())
            }
            PotentialSpec::SoftCoulomb { charge, reg, center } => {
                finite("charge", charge)?;
                finite("center", center)?;
                if !(reg > 0.0 && reg.is_finite()) {
                    return Err(invalid("reg", format!("must be positive, got {reg}")));
                }
                Ok(())
            }
            PotentialSpec::SquareWell { depth, half_width } => {
                finite("depth", depth)?;
                if !(half_width > 0.0 && half_width.is_finite()) {
                    return Err(invalid("half_width", format!("must be positive, got {half_width}")));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::GaussianWell { depth, width, center } => {
                let s = (x - center) / width;
                -depth * (-s * s).exp()
            }
            PotentialSpec::SoftCoulomb { charge, reg, center } => charge / (reg * reg + (x - center).powi(2)).sqrt(),
            PotentialSpec::SquareWell { depth, half_width } => {
                if x.abs() < half_width {
                    -depth
                } else {
                    0.0
                }
            }
        }
    }

    /// Analytic continuation to a complex argument.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            return Ok(Complex64::new(self.eval(z.re), 0.0));
        }
        match *self {
            PotentialSpec::Zero => Ok(Complex64::new(0.0, 0.0)),
            PotentialSpec::GaussianWell { depth, width, center } => {
                let s = (z - center) / width;
                Ok(-depth * (-s * s).exp())
            }
            PotentialSpec::SoftCoulomb { charge, reg, center } => {
                let w = reg * reg + (z - center) * (z - center);
                if w.re <= 0.0 {
                    return Err(Error::PotentialDomain { z });
                }
                Ok(charge / w.sqrt())
            }
            PotentialSpec::SquareWell { half_width, .. } => {
                if z.re.abs() > half_width {
                    Ok(Complex64::new(0.0, 0.0))
                } else {
                    Err(Error::PotentialDomain { z })
                }
            }
        }
    }
}
