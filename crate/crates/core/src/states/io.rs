//! JSON state files.
//!
//! ```text
//! {"dims":[n1,...,nk], "kind":"pure"|"mixed", "data": ...}
//! ```
//!
//! Pure data is nested `n1 × … × nk` arrays of `[re, im]`; mixed data is an
//! `N × N` array of rows, `N = ∏n_j`. Numbers are written with 17
//! significant digits so values round-trip exactly.

use serde_json::Value;

use super::{CMatrix, DensityMatrix, Dims, PureState, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &Dims {
        match self {
            State::Pure(p) => p.dims(),
            State::Mixed(m) => m.dims(),
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn pair(z: C64) -> String {
    format!("[{},{}]", num(z.re), num(z.im))
}

pub fn to_json(state: &State) -> String {
    let (kind, dims, data) = match state {
        State::Pure(p) => ("pure", p.dims(), nest(p.amplitudes(), p.dims().as_slice())),
        State::Mixed(m) => {
            let n = m.dims().total();
            let rows: Vec<String> = (0..n)
                .map(|i| {
                    let cells: Vec<String> = (0..n).map(|j| pair(m.matrix()[(i, j)])).collect();
                    format!("[{}]", cells.join(","))
                })
                .collect();
            ("mixed", m.dims(), format!("[{}]", rows.join(",\n")))
        }
    };
    let dims: Vec<String> = dims.as_slice().iter().map(|n| n.to_string()).collect();
    format!(
        "{{\"dims\":[{}],\"kind\":\"{kind}\",\"data\":{data}}}\n",
        dims.join(",")
    )
}

fn nest(amps: &[C64], dims: &[usize]) -> String {
    match dims {
        [] => pair(amps[0]),
        [_] => format!(
            "[{}]",
            amps.iter().map(|&z| pair(z)).collect::<Vec<_>>().join(",")
        ),
        [n, rest @ ..] => {
            let chunk = amps.len() / n;
            let parts: Vec<String> = amps.chunks(chunk).map(|c| nest(c, rest)).collect();
            format!("[{}]", parts.join(","))
        }
    }
}

pub fn from_json(text: &str) -> Result<State> {
    from_json_with_limit(text, super::DEFAULT_MAX_TOTAL_DIM)
}

pub fn from_json_with_limit(text: &str, limit: usize) -> Result<State> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state file: {e}")))?;
    let dims = v
        .get("dims")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("state file: missing \"dims\" array".into()))?
        .iter()
        .map(|d| {
            d.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("state file: bad dimension {d}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if dims.is_empty() {
        return Err(Error::Parse(
            "state file: \"dims\" must be non-empty".into(),
        ));
    }
    let dims = Dims::with_limit(dims, limit)?;
    let data = v
        .get("data")
        .ok_or_else(|| Error::Parse("state file: missing \"data\"".into()))?;
    match v.get("kind").and_then(Value::as_str) {
        Some("pure") => {
            let mut amps = Vec::with_capacity(dims.total());
            flatten(data, dims.as_slice(), &mut amps)?;
            Ok(State::Pure(PureState::new(dims, amps)?))
        }
        Some("mixed") => {
            let n = dims.total();
            let mut entries = Vec::with_capacity(n * n);
            flatten(data, &[n, n], &mut entries)?;
            let mat = CMatrix::from_row_slice(n, n, &entries);
            let rho = DensityMatrix::new(dims, mat)?;
            let dev = rho.hermitian_deviation();
            if dev > 1e-12 * rho.max_abs().max(f64::MIN_POSITIVE) {
                return Err(Error::NotHermitian(dev));
            }
            Ok(State::Mixed(rho))
        }
        other => Err(Error::Parse(format!(
            "state file: \"kind\" must be \"pure\" or \"mixed\", got {other:?}"
        ))),
    }
}

fn flatten(v: &Value, shape: &[usize], out: &mut Vec<C64>) -> Result<()> {
    match shape {
        [] => {
            let arr = v.as_array().filter(|a| a.len() == 2);
            let parts = arr
                .and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)))
                .ok_or_else(|| Error::Parse(format!("state file: expected [re, im], got {v}")))?;
            out.push(C64::new(parts.0, parts.1));
            Ok(())
        }
        [n, rest @ ..] => {
            let arr = v.as_array().filter(|a| a.len() == *n).ok_or_else(|| {
                Error::Parse(format!("state file: expected an array of length {n}"))
            })?;
            arr.iter().try_for_each(|x| flatten(x, rest, out))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_density, random_pure};

    #[test]
    fn round_trip_is_exact() {
        let dims = Dims::new(vec![2, 3]).unwrap();
        let pure = State::Pure(random_pure(&dims, 3));
        assert_eq!(from_json(&to_json(&pure)).unwrap(), pure);
        let mixed = State::Mixed(random_density(&dims, 4, 2).unwrap());
        assert_eq!(from_json(&to_json(&mixed)).unwrap(), mixed);
    }

    #[test]
    fn writes_seventeen_digits() {
        let psi = PureState::from_real(Dims::new(vec![1]).unwrap(), &[0.1]).unwrap();
        let text = to_json(&State::Pure(psi));
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(from_json("{").is_err());
        assert!(from_json(r#"{"dims":[2],"kind":"pure","data":[[1,0]]}"#).is_err());
        assert!(from_json(r#"{"dims":[2],"kind":"weird","data":[[1,0],[0,0]]}"#).is_err());
        let skew = r#"{"dims":[2],"kind":"mixed","data":[[[1,0],[1,0]],[[0,0],[1,0]]]}"#;
        assert!(matches!(from_json(skew), Err(Error::NotHermitian(_))));
        let ok = r#"{"dims":[2],"kind":"mixed","data":[[[1,0],[0,1]],[[0,-1],[1,0]]]}"#;
        assert!(from_json(ok).is_ok());
        let huge = r#"{"dims":[100,100],"kind":"pure","data":[]}"#;
        assert!(matches!(from_json(huge), Err(Error::ResourceLimit { .. })));
    }
}
