//! Exact rationals and their `"p/q"` wire form.

use num_rational::Rational64;

use crate::error::{Error, Result};

pub type Q = Rational64;

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(numer, denom)
}

pub fn int(v: i64) -> Q {
    Q::from_integer(v)
}

/// Always `p/q` with `q > 0` and `gcd(p, q) = 1`, integers included (`3/1`).
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `p/q` or a bare integer `p`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, d)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(p, d))
        }
        None => s.parse::<i64>().map(Q::from_integer).map_err(|_| bad()),
    }
}

/// `serialize_with` helper writing a rational as `"p/q"`.
pub(crate) fn serialize_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_q(x))
}
