use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated (n, l, m) triple labelling a bound hydrogen eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct QuantumNumbers {
    n: u32,
    l: u32,
    m: i32,
}

#[derive(Serialize, Deserialize)]
struct RawTriple {
    n: i64,
    l: i64,
    m: i64,
}

impl TryFrom<RawTriple> for QuantumNumbers {
    type Error = Error;
    fn try_from(raw: RawTriple) -> Result<Self> {
        Self::new(raw.n, raw.l, raw.m)
    }
}

impl From<QuantumNumbers> for RawTriple {
    fn from(q: QuantumNumbers) -> Self {
        RawTriple {
            n: q.n.into(),
            l: q.l.into(),
            m: q.m.into(),
        }
    }
}

/// Checks the bound-state index ranges, reporting the first violated bound.
pub fn validate(n: i64, l: i64, m: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::QuantumNumbers(format!(
            "n must satisfy n >= 1 (got n = {n})"
        )));
    }
    if l < 0 {
        return Err(Error::QuantumNumbers(format!(
            "l must satisfy l >= 0 (got l = {l})"
        )));
    }
    if l > n - 1 {
        return Err(Error::QuantumNumbers(format!(
            "l must satisfy l <= n-1 (got n = {n}, l = {l})"
        )));
    }
    if m.abs() > l {
        return Err(Error::QuantumNumbers(format!(
            "|m| must satisfy |m| <= l (got l = {l}, m = {m})"
        )));
    }
    // Keeps ln_factorial(n + l) inside its table.
    if n > 100 {
        return Err(Error::QuantumNumbers(format!(
            "n must satisfy n <= 100 (got n = {n})"
        )));
    }
    Ok(())
}

impl QuantumNumbers {
    pub fn new(n: i64, l: i64, m: i64) -> Result<Self> {
        validate(n, l, m)?;
        Ok(Self {
            n: n as u32,
            l: l as u32,
            m: m as i32,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    /// Degree of the Laguerre factor, n - l - 1.
    pub fn laguerre_degree(&self) -> u32 {
        self.n - self.l - 1
    }

    /// Upper index of the Laguerre factor, 2l + 1.
    pub fn laguerre_alpha(&self) -> u32 {
        2 * self.l + 1
    }

    /// Every valid triple with `1 <= n <= n_max`, ordered by (n, l, m).
    pub fn all_up_to(n_max: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for n in 1..=n_max {
            for l in 0..n {
                for m in -(l as i32)..=(l as i32) {
                    out.push(Self { n, l, m });
                }
            }
        }
        out
    }

    /// The circular-orbit states l = n - 1, all m.
    pub fn circular_up_to(n_max: u32) -> Vec<Self> {
        Self::all_up_to(n_max)
            .into_iter()
            .filter(|q| q.l + 1 == q.n)
            .collect()
    }
}

impl fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.l, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_is_valid() {
        assert!(validate(1, 0, 0).is_ok());
    }

    #[test]
    fn reports_first_violated_bound() {
        let e = validate(2, 2, 0).unwrap_err().to_string();
        assert!(e.contains("l must satisfy l <= n-1"), "{e}");
        let e = validate(3, 1, -2).unwrap_err().to_string();
        assert!(e.contains("|m| must satisfy |m| <= l"), "{e}");
        let e = validate(0, 0, 0).unwrap_err().to_string();
        assert!(e.contains("n must satisfy n >= 1"), "{e}");
        let e = validate(0, 5, 9).unwrap_err().to_string();
        assert!(e.contains("n >= 1"), "{e}");
    }

    #[test]
    fn brute_force_acceptance_set() {
        for n in -2..=6i64 {
            for l in -2..=7i64 {
                for m in -8..=8i64 {
                    let expected = n >= 1 && 0 <= l && l < n && m.abs() <= l;
                    assert_eq!(validate(n, l, m).is_ok(), expected, "({n},{l},{m})");
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        // sum_{n<=N} n^2
        assert_eq!(QuantumNumbers::all_up_to(10).len(), 385);
        assert_eq!(QuantumNumbers::all_up_to(5).len(), 55);
        assert_eq!(QuantumNumbers::circular_up_to(3).len(), 1 + 3 + 5);
    }

    #[test]
    fn serde_rejects_invalid() {
        let ok: QuantumNumbers = serde_json::from_str(r#"{"n":2,"l":1,"m":-1}"#).unwrap();
        assert_eq!(ok, QuantumNumbers::new(2, 1, -1).unwrap());
        assert!(serde_json::from_str::<QuantumNumbers>(r#"{"n":2,"l":2,"m":0}"#).is_err());
    }
}
