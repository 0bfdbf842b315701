use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const MAX_LN_FACTORIAL: i64 = 200;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(MAX_LN_FACTORIAL as usize + 1);
        t.push(0.0);
        // exact products up to 20! fit in u64
        let mut exact: u64 = 1;
        for k in 1..=20u64 {
            exact *= k;
            t.push((exact as f64).ln());
        }
        let mut acc = t[20];
        for k in 21..=MAX_LN_FACTORIAL {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// ln(k!) for 0 <= k <= 200.
pub fn ln_factorial(k: i64) -> Result<f64> {
    if k < 0 {
        return Err(Error::Domain(format!("ln_factorial of negative k = {k}")));
    }
    if k > MAX_LN_FACTORIAL {
        return Err(Error::Domain(format!(
            "ln_factorial supports k <= {MAX_LN_FACTORIAL} (got {k})"
        )));
    }
    Ok(table()[k as usize])
}
