//! Small shared helpers.

use crate::error::{Error, Result};

/// Probe times must be sorted ascending and lie in `[0, t_end]`.
pub(crate) fn validate_probes(probes: &[f64], t_end: f64) -> Result<()> {
    let mut prev = 0.0f64;
    for &t in probes {
        if !t.is_finite() || t < 0.0 || t > t_end {
            return Err(Error::invalid(
                "probes",
                format!("probe {t} outside [0, {t_end}]"),
            ));
        }
        if t < prev {
            return Err(Error::invalid("probes", "probe times must be sorted"));
        }
        prev = t;
    }
    Ok(())
}

pub(crate) fn validate_time(what: &str, t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(what, "must be finite and nonnegative"));
    }
    Ok(())
}
