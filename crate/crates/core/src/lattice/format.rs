//! Plain-text lattice files.
//!
//! ```text
//! # comment
//! n m ell
//! p/q p/q ...        (n basis rows)
//! target a_1 ... a_n (optional; a_i = j/2^ell)
//! ```
//!
//! Entries are exact rationals (`p/q` or an integer); target coefficients
//! may also be written `j/2^e`.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{DyadicVector, GridSpec, Lattice};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LatticeFile {
    pub lattice: Lattice,
    pub grid: GridSpec,
    pub target: Option<DyadicVector>,
}

fn parse_rational(tok: &str, line: usize) -> Result<BigRational> {
    let bad = || Error::parse(line, format!("not a rational: `{tok}`"));
    match tok.split_once('/') {
        None => tok
            .parse::<BigInt>()
            .map(BigRational::from_integer)
            .map_err(|_| bad()),
        Some((p, q)) => {
            let p: BigInt = p.parse().map_err(|_| bad())?;
            let q: BigInt = match q.strip_prefix("2^") {
                Some(e) => {
                    let e: u32 = e.parse().map_err(|_| bad())?;
                    BigInt::one() << e
                }
                None => q.parse().map_err(|_| bad())?,
            };
            if q.is_zero() {
                return Err(Error::parse(line, format!("zero denominator in `{tok}`")));
            }
            Ok(BigRational::new(p, q))
        }
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn to_dyadic(values: &[BigRational], ell: u32, line: usize) -> Result<DyadicVector> {
    let scale = BigRational::from_integer(BigInt::one() << ell);
    let mut num = Vec::with_capacity(values.len());
    for v in values {
        let s = v * &scale;
        if !s.is_integer() {
            return Err(Error::parse(
                line,
                format!(
                    "target coefficient {} is not a multiple of 2^-{ell}",
                    format_rational(v)
                ),
            ));
        }
        if v.is_negative() || v >= &BigRational::one() {
            return Err(Error::parse(line, "target coefficients must lie in [0, 1)"));
        }
        num.push(
            s.to_integer()
                .to_i64()
                .ok_or_else(|| Error::parse(line, "overflow"))?,
        );
    }
    Ok(DyadicVector::new(num, ell))
}

impl LatticeFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header `n m ell`"))?;
        let head: Vec<u32> = header
            .split_whitespace()
            .map(|t| t.parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(hl, "header must be `n m ell`"))?;
        let [n, m, ell] = head[..] else {
            return Err(Error::parse(hl, "header must be `n m ell`"));
        };
        let n = n as usize;
        if n == 0 {
            return Err(Error::parse(hl, "dimension must be positive"));
        }

        let mut basis = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, row) = lines
                .next()
                .ok_or_else(|| Error::parse(hl, format!("expected {n} basis rows")))?;
            let vals: Vec<BigRational> = row
                .split_whitespace()
                .map(|t| parse_rational(t, ln))
                .collect::<Result<_>>()?;
            if vals.len() != n {
                return Err(Error::parse(
                    ln,
                    format!("expected {n} entries, got {}", vals.len()),
                ));
            }
            basis.push(vals);
        }

        let mut target = None;
        if let Some((ln, row)) = lines.next() {
            let mut toks = row.split_whitespace();
            if toks.next() != Some("target") {
                return Err(Error::parse(ln, "expected `target a_1 ... a_n`"));
            }
            let vals: Vec<BigRational> =
                toks.map(|t| parse_rational(t, ln)).collect::<Result<_>>()?;
            if vals.len() != n {
                return Err(Error::parse(ln, format!("target needs {n} coefficients")));
            }
            target = Some(to_dyadic(&vals, ell, ln)?);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "trailing content"));
        }

        let lattice = Lattice::new(basis).map_err(|e| Error::parse(hl, e.to_string()))?;
        Ok(Self {
            lattice,
            grid: GridSpec::new(m, ell),
            target,
        })
    }

    pub fn to_text(&self) -> String {
        let n = self.lattice.n();
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", n, self.grid.m, self.grid.ell);
        for row in self.lattice.basis() {
            let line: Vec<String> = row.iter().map(format_rational).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        if let Some(t) = &self.target {
            // coefficients stay over the full 2^ell denominator
            let den = 1u64 << t.log_den;
            let shift = self.grid.ell.saturating_sub(t.log_den);
            let line: Vec<String> = t
                .num
                .iter()
                .map(|&j| format!("{}/{}", j << shift, den << shift))
                .collect();
            let _ = writeln!(s, "target {}", line.join(" "));
        }
        s
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}
