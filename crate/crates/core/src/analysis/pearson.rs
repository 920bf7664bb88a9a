use crate::error::{Error, Result};

/// Sample Pearson correlation coefficient of two equally long sequences.
///
/// Requires at least three values and non-zero variance in both inputs; a
/// constant input yields [`Error::UndefinedCorrelation`] naming `"x"` or `"y"`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Parameter(format!(
            "pearson needs equal lengths (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::UndefinedCorrelation {
            measure: "x".into(),
            reason: format!("need at least 3 paired values, got {}", x.len()),
        });
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    for (name, s) in [("x", sxx), ("y", syy)] {
        if !(s > 0.0) {
            return Err(Error::UndefinedCorrelation {
                measure: name.into(),
                reason: "sequence has zero variance".into(),
            });
        }
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
