use std::collections::BTreeMap;
use std::fmt;

use crate::{exec, Bitstring, Error, Result};

/// Largest variable count [`PseudoBooleanPolynomial::brute_force_minimum`] accepts.
pub const MAX_BRUTE_FORCE_VARS: usize = 24;

/// A multilinear monomial of degree at most two. Indices satisfy `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Monomial {
    Constant,
    Linear(usize),
    Quadratic(usize, usize),
}

impl Monomial {
    pub fn degree(self) -> usize {
        match self {
            Monomial::Constant => 0,
            Monomial::Linear(_) => 1,
            Monomial::Quadratic(..) => 2,
        }
    }

    fn from_vars(vars: &[usize]) -> Result<Self> {
        let mut v = vars.to_vec();
        v.sort_unstable();
        // x^2 = x on binary variables
        v.dedup();
        match *v.as_slice() {
            [] => Ok(Monomial::Constant),
            [i] => Ok(Monomial::Linear(i)),
            [i, j] => Ok(Monomial::Quadratic(i, j)),
            _ => Err(Error::domain(format!(
                "degree {} term unsupported, at most 2",
                v.len()
            ))),
        }
    }

    fn max_var(self) -> Option<usize> {
        match self {
            Monomial::Constant => None,
            Monomial::Linear(i) => Some(i),
            Monomial::Quadratic(_, j) => Some(j),
        }
    }
}

/// Multilinear polynomial of degree at most two over `num_vars` binary
/// variables (a QUBO objective).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PseudoBooleanPolynomial {
    num_vars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl PseudoBooleanPolynomial {
    pub fn new(num_vars: usize) -> Self {
        PseudoBooleanPolynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Adds `coef * prod(x_k for k in vars)`, merging like terms.
    pub fn add_term(&mut self, vars: &[usize], coef: f64) -> Result<()> {
        if !coef.is_finite() {
            return Err(Error::domain("coefficients must be finite"));
        }
        let mono = Monomial::from_vars(vars)?;
        if mono.max_var().is_some_and(|k| k >= self.num_vars) {
            return Err(Error::domain(format!(
                "variable index out of range for {} variables",
                self.num_vars
            )));
        }
        self.add_monomial(mono, coef);
        Ok(())
    }

    fn add_monomial(&mut self, mono: Monomial, coef: f64) {
        let entry = self.terms.entry(mono).or_insert(0.0);
        *entry += coef;
        if *entry == 0.0 {
            self.terms.remove(&mono);
        }
    }

    pub fn add_constant(&mut self, c: f64) {
        self.add_monomial(Monomial::Constant, c);
    }

    pub fn add_linear(&mut self, i: usize, c: f64) {
        self.add_term(&[i], c).expect("index in range");
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        self.add_term(&[i, j], c).expect("index in range");
    }

    /// Adds every term of `other`, scaled by `scale`.
    pub fn add_scaled(&mut self, other: &PseudoBooleanPolynomial, scale: f64) -> Result<()> {
        if other.num_vars > self.num_vars {
            return Err(Error::domain("added polynomial has more variables"));
        }
        for (&m, &c) in &other.terms {
            self.add_monomial(m, c * scale);
        }
        Ok(())
    }

    pub fn coefficient(&self, mono: Monomial) -> f64 {
        self.terms.get(&mono).copied().unwrap_or(0.0)
    }

    pub fn constant(&self) -> f64 {
        self.coefficient(Monomial::Constant)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, f64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(m, _)| **m != Monomial::Constant)
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }

    /// Exact value at `bits`.
    pub fn evaluate(&self, bits: Bitstring) -> Result<f64> {
        if bits.len() != self.num_vars {
            return Err(Error::domain(format!(
                "bit string has {} bits, polynomial has {} variables",
                bits.len(),
                self.num_vars
            )));
        }
        Ok(self.value(bits.index()))
    }

    /// Value at the assignment whose bit `k` is `x_k`; no length check.
    pub fn value(&self, x: u64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| match *m {
                Monomial::Constant => *c,
                Monomial::Linear(i) => *c * (x >> i & 1) as f64,
                Monomial::Quadratic(i, j) => *c * (x >> i & x >> j & 1) as f64,
            })
            .sum()
    }

    pub fn compile(&self) -> CompiledPolynomial {
        let mut out = CompiledPolynomial {
            num_vars: self.num_vars,
            constant: 0.0,
            linear: Vec::new(),
            quadratic: Vec::new(),
        };
        for (m, c) in self.terms() {
            match m {
                Monomial::Constant => out.constant = c,
                Monomial::Linear(i) => out.linear.push((i, c)),
                Monomial::Quadratic(i, j) => out.quadratic.push((i, j, c)),
            }
        }
        out
    }

    /// Global minimum over all `2^v` assignments; ties go to the
    /// lexicographically smallest bit string.
    pub fn brute_force_minimum(&self) -> Result<(Bitstring, f64)> {
        let v = self.num_vars;
        if v > MAX_BRUTE_FORCE_VARS {
            return Err(Error::ResourceGuard(format!(
                "brute force limited to {MAX_BRUTE_FORCE_VARS} variables, got {v}"
            )));
        }
        let compiled = self.compile();
        let total = 1u64 << v;
        let block = total.min(1 << 12);
        let blocks = (total / block) as usize;
        let better = |a: (u64, f64), b: (u64, f64)| {
            let ka = Bitstring::new(v, a.0).unwrap().lex_key();
            let kb = Bitstring::new(v, b.0).unwrap().lex_key();
            if a.1 < b.1 || (a.1 == b.1 && ka < kb) {
                a
            } else {
                b
            }
        };
        let best = exec::map_indexed(blocks, |b| {
            let start = b as u64 * block;
            (start..start + block)
                .map(|x| (x, compiled.value(x)))
                .reduce(better)
                .expect("non-empty block")
        })
        .into_iter()
        .reduce(better)
        .expect("at least one block");
        Ok((Bitstring::new(v, best.0)?, best.1))
    }

    /// Writes one `{vars} coefficient` line per term under a `vars N` header.
    pub fn to_text(&self) -> String {
        let mut s = format!("vars {}\n", self.num_vars);
        for (m, c) in self.terms() {
            s.push_str(&format!("{} {c}\n", monomial_text(m)));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::parse("empty polynomial text"))?;
        let num_vars = header
            .strip_prefix("vars ")
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| Error::parse(format!("bad header `{header}`")))?;
        let mut poly = PseudoBooleanPolynomial::new(num_vars);
        for line in lines {
            let (vars, coef) = parse_term_line(line)?;
            poly.add_term(&vars, coef)?;
        }
        Ok(poly)
    }
}

impl fmt::Display for PseudoBooleanPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(super) fn monomial_text(m: Monomial) -> String {
    match m {
        Monomial::Constant => "{}".to_string(),
        Monomial::Linear(i) => format!("{{{i}}}"),
        Monomial::Quadratic(i, j) => format!("{{{i},{j}}}"),
    }
}

pub(super) fn parse_term_line(line: &str) -> Result<(Vec<usize>, f64)> {
    let close = line
        .find('}')
        .filter(|_| line.starts_with('{'))
        .ok_or_else(|| Error::parse(format!("bad term line `{line}`")))?;
    let inner = &line[1..close];
    let vars = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| Error::parse(format!("bad index `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    let coef = line[close + 1..]
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(format!("bad coefficient in `{line}`")))?;
    Ok((vars, coef))
}

/// Flat term arrays for hot evaluation loops.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledPolynomial {
    pub num_vars: usize,
    pub constant: f64,
    pub linear: Vec<(usize, f64)>,
    pub quadratic: Vec<(usize, usize, f64)>,
}

impl CompiledPolynomial {
    pub fn value(&self, x: u64) -> f64 {
        let mut acc = self.constant;
        for &(i, c) in &self.linear {
            if x >> i & 1 == 1 {
                acc += c;
            }
        }
        for &(i, j, c) in &self.quadratic {
            if x >> i & x >> j & 1 == 1 {
                acc += c;
            }
        }
        acc
    }

    /// Per-variable incidence lists: for each `k`, its linear coefficient and
    /// the quadratic partners `(other, coef)`.
    pub fn neighbourhoods(&self) -> Vec<(f64, Vec<(usize, f64)>)> {
        let mut out = vec![(0.0, Vec::new()); self.num_vars];
        for &(i, c) in &self.linear {
            out[i].0 += c;
        }
        for &(i, j, c) in &self.quadratic {
            out[i].1.push((j, c));
            out[j].1.push((i, c));
        }
        out
    }
}
