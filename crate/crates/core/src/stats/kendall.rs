use crate::math::sqrt;
use crate::{Error, Result};

/// Kendall's tau-b between two score vectors over the same items.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::input("Kendall's tau needs equally long rankings"));
    }
    if a.len() < 2 {
        return Err(Error::input("Kendall's tau needs at least two items"));
    }
    let n = a.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut ties_a, mut ties_b) = (0i64, 0i64);
    for i in 0..n {
        for j in (i + 1)..n {
            let da = a[i].total_cmp(&a[j]) as i64;
            let db = b[i].total_cmp(&b[j]) as i64;
            if da == 0 {
                ties_a += 1;
            }
            if db == 0 {
                ties_b += 1;
            }
            match da * db {
                1 => concordant += 1,
                -1 => discordant += 1,
                _ => {}
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let den = ((pairs - ties_a) as f64) * ((pairs - ties_b) as f64);
    if den == 0.0 {
        return Err(Error::UndefinedMetric(
            "Kendall's tau is undefined when one ranking is all ties".into(),
        ));
    }
    Ok((concordant - discordant) as f64 / sqrt(den))
}
