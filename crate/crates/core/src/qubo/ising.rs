use std::collections::BTreeMap;
use std::fmt;

use super::polynomial::{parse_term_line, Monomial};
use super::PseudoBooleanPolynomial;
use crate::{Error, Result};

/// `constant + sum_k h_k z_k + sum_{k<l} J_kl z_k z_l` over spins `z = 1 - 2x`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IsingCoefficients {
    pub num_spins: usize,
    pub constant: f64,
    pub linear: BTreeMap<usize, f64>,
    pub quadratic: BTreeMap<(usize, usize), f64>,
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, f64>, key: K, c: f64) {
    let e = map.entry(key).or_insert(0.0);
    *e += c;
}

/// Substitutes `x_k = (1 - z_k) / 2` and collects like terms.
pub fn to_ising(poly: &PseudoBooleanPolynomial) -> Result<IsingCoefficients> {
    if poly.degree() > 2 {
        return Err(Error::domain("only quadratic polynomials have an Ising form"));
    }
    let mut out = IsingCoefficients {
        num_spins: poly.num_vars(),
        ..Default::default()
    };
    for (m, c) in poly.terms() {
        match m {
            Monomial::Constant => out.constant += c,
            Monomial::Linear(i) => {
                out.constant += c / 2.0;
                accumulate(&mut out.linear, i, -c / 2.0);
            }
            Monomial::Quadratic(i, j) => {
                // (1 - z_i)(1 - z_j) / 4
                out.constant += c / 4.0;
                accumulate(&mut out.linear, i, -c / 4.0);
                accumulate(&mut out.linear, j, -c / 4.0);
                accumulate(&mut out.quadratic, (i, j), c / 4.0);
            }
        }
    }
    out.linear.retain(|_, c| *c != 0.0);
    out.quadratic.retain(|_, c| *c != 0.0);
    Ok(out)
}

impl IsingCoefficients {
    /// Energy at spins `z` (each `+1` or `-1`).
    pub fn evaluate_spins(&self, z: &[i8]) -> Result<f64> {
        if z.len() != self.num_spins {
            return Err(Error::domain("spin vector length mismatch"));
        }
        if z.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::domain("spins must be +1 or -1"));
        }
        let mut e = self.constant;
        for (&k, &h) in &self.linear {
            e += h * z[k] as f64;
        }
        for (&(k, l), &j) in &self.quadratic {
            e += j * (z[k] * z[l]) as f64;
        }
        Ok(e)
    }

    /// Energy at the basis state `x` (bit `k` = 1 means `z_k = -1`).
    pub fn energy(&self, x: u64) -> f64 {
        let spin = |k: usize| if x >> k & 1 == 1 { -1.0 } else { 1.0 };
        let mut e = self.constant;
        for (&k, &h) in &self.linear {
            e += h * spin(k);
        }
        for (&(k, l), &j) in &self.quadratic {
            e += j * spin(k) * spin(l);
        }
        e
    }

    /// Coefficients multiplied by `factor` (the constant included).
    pub fn scaled(&self, factor: f64) -> Self {
        IsingCoefficients {
            num_spins: self.num_spins,
            constant: self.constant * factor,
            linear: self.linear.iter().map(|(&k, &h)| (k, h * factor)).collect(),
            quadratic: self.quadratic.iter().map(|(&k, &j)| (k, j * factor)).collect(),
        }
    }

    /// Largest `|h_k|` or `|J_kl|`.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.linear
            .values()
            .chain(self.quadratic.values())
            .map(|c| c.abs())
            .fold(0.0, f64::max)
    }

    /// Same line format as polynomials, with a `spins N` header.
    pub fn to_text(&self) -> String {
        let mut s = format!("spins {}\n{{}} {}\n", self.num_spins, self.constant);
        for (k, h) in &self.linear {
            s.push_str(&format!("{{{k}}} {h}\n"));
        }
        for ((k, l), j) in &self.quadratic {
            s.push_str(&format!("{{{k},{l}}} {j}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::parse("empty Ising text"))?;
        let num_spins = header
            .strip_prefix("spins ")
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| Error::parse(format!("bad header `{header}`")))?;
        let mut out = IsingCoefficients {
            num_spins,
            ..Default::default()
        };
        for line in lines {
            let (vars, c) = parse_term_line(line)?;
            if vars.iter().any(|&k| k >= num_spins) {
                return Err(Error::parse(format!("spin index out of range in `{line}`")));
            }
            match *vars.as_slice() {
                [] => out.constant += c,
                [k] => accumulate(&mut out.linear, k, c),
                [k, l] if k < l => accumulate(&mut out.quadratic, (k, l), c),
                [k, l] if l < k => accumulate(&mut out.quadratic, (l, k), c),
                _ => return Err(Error::parse(format!("bad Ising term `{line}`"))),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for IsingCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
