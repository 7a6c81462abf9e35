//! Epsilon grids: `a:b:n` (n points, both ends included) or a comma list.
//!
//! Endpoints may use the keyword `I` for the mutual information of the
//! source, optionally scaled: `I`, `0.5I`, `0.5*I`, `I/2`.

use crate::io::InputError;

fn bad(spec: &str, why: &str) -> InputError {
    InputError(format!("invalid grid {spec:?}: {why}"))
}

fn value(tok: &str, mi: f64, spec: &str) -> Result<f64, InputError> {
    let t = tok.trim();
    let num = |s: &str| -> Result<f64, InputError> {
        let v: f64 = s.trim().parse().map_err(|_| bad(spec, &format!("{s:?} is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad(spec, "values must be finite"))
        }
    };
    if let Some(d) = t.strip_prefix("I/") {
        return Ok(mi / num(d)?);
    }
    if let Some(k) = t.strip_suffix('I') {
        let k = k.trim().trim_end_matches('*');
        return Ok(if k.is_empty() { mi } else { num(k)? * mi });
    }
    num(t)
}

pub fn parse_grid(spec: &str, mi: f64) -> Result<Vec<f64>, InputError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (value(a, mi, spec)?, value(b, mi, spec)?);
            let n: usize = n.trim().parse().map_err(|_| bad(spec, "point count must be a positive integer"))?;
            if n == 0 {
                return Err(bad(spec, "point count must be a positive integer"));
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            if b < a {
                return Err(bad(spec, "upper end below lower end"));
            }
            Ok((0..n)
                .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
                .collect())
        }
        [list] => {
            let v = list.split(',').map(|t| value(t, mi, spec)).collect::<Result<Vec<_>, _>>()?;
            if v.windows(2).any(|w| w[1] < w[0]) {
                return Err(bad(spec, "values must be sorted"));
            }
            Ok(v)
        }
        _ => Err(bad(spec, "expected a:b:n or a comma-separated list")),
    }
}
