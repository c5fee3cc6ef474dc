//! Value lists accepted on the command line: `1,10,25`, `1..300`, `0..300:5`,
//! or any comma-separated mix of those.

use std::str::FromStr;

use collective_emission::config::Spacing;

/// A list of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

/// A list of emitter counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CountList(pub Vec<usize>);

/// A list of spacings, absolute or as λ fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingList(pub Vec<Spacing>);

fn range(item: &str) -> Result<Option<(f64, f64, f64)>, String> {
    let Some((lo, rest)) = item.split_once("..") else {
        return Ok(None);
    };
    let (hi, step) = match rest.split_once(':') {
        Some((hi, step)) => (hi, step),
        None => (rest, "1"),
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad number `{s}` in `{item}`"));
    let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
    if !(step > 0.0) || !step.is_finite() {
        return Err(format!("step must be > 0 in `{item}`"));
    }
    if !(hi >= lo) {
        return Err(format!("empty range `{item}`"));
    }
    Ok(Some((lo, hi, step)))
}

/// Range points are `lo + k·step`, never accumulated.
fn expand(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(move |k| lo + k as f64 * step)
}

impl FromStr for RealList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match range(item)? {
                Some((lo, hi, step)) => out.extend(expand(lo, hi, step)),
                None => out.push(item.parse().map_err(|_| format!("bad number `{item}`"))?),
            }
        }
        if out.is_empty() {
            return Err("empty list".into());
        }
        Ok(RealList(out))
    }
}

impl FromStr for CountList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let reals = RealList::from_str(s)?;
        reals
            .0
            .iter()
            .map(|&x| {
                if x >= 0.0 && x.fract() == 0.0 {
                    Ok(x as usize)
                } else {
                    Err(format!("`{x}` is not a whole number"))
                }
            })
            .collect::<Result<_, _>>()
            .map(CountList)
    }
}

impl FromStr for SpacingList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let out: Vec<Spacing> = s
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<Spacing>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        if out.is_empty() {
            return Err("empty list".into());
        }
        Ok(SpacingList(out))
    }
}

/// Compact number for file names: `4`, `0.5`, `37.6`.
pub fn label(x: f64) -> String {
    format!("{x}")
}

/// File-name-safe form of a spacing.
pub fn spacing_label(s: &Spacing) -> String {
    match s {
        Spacing::Nanometers(d) => format!("{}nm", label(*d)),
        Spacing::WavelengthFraction(k) => format!("lambda{}", label(*k)),
    }
}
