//! Classical modular polynomials Phi_ell(X, Y) for ell in {2, 3, 5, 7}.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const SUPPORTED_ELLS: [u64; 4] = [2, 3, 5, 7];

/// Environment variable naming a directory with `{ell}.txt` files that replace the built-in data.
pub const DATA_DIR_VAR: &str = "VOLCANO_DATA_DIR";

fn embedded(ell: u64) -> Option<&'static str> {
    match ell {
        2 => Some(include_str!("../../data/phi/2.txt")),
        3 => Some(include_str!("../../data/phi/3.txt")),
        5 => Some(include_str!("../../data/phi/5.txt")),
        7 => Some(include_str!("../../data/phi/7.txt")),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularPolynomial {
    pub ell: u64,
    /// `coeffs[a][b]` is the coefficient of X^a Y^b; both indices run to ell + 1.
    pub coeffs: Vec<Vec<BigInt>>,
}

pub fn modular_polynomial(ell: u64) -> Result<ModularPolynomial> {
    let builtin = embedded(ell).ok_or_else(|| {
        Error::Unsupported(format!("no modular polynomial for ell = {ell}; supported: 2, 3, 5, 7"))
    })?;
    match std::env::var_os(DATA_DIR_VAR) {
        Some(dir) => {
            let path = std::path::Path::new(&dir).join(format!("{ell}.txt"));
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            parse(ell, &text)
        }
        None => parse(ell, builtin),
    }
}

/// Parses lines `i j coefficient` with i <= j; the coefficient of X^j Y^i is filled in by symmetry.
pub fn parse(ell: u64, text: &str) -> Result<ModularPolynomial> {
    let n = ell as usize + 2;
    let mut coeffs = vec![vec![BigInt::zero(); n]; n];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::Data(format!("line {}: expected `i j coefficient`", lineno + 1));
        let mut it = line.split_whitespace();
        let i: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let j: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let c: BigInt = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        if it.next().is_some() || i > j || j >= n {
            return Err(bad());
        }
        coeffs[i][j] = c.clone();
        coeffs[j][i] = c;
    }
    let phi = ModularPolynomial { ell, coeffs };
    phi.check_shape()?;
    Ok(phi)
}

impl ModularPolynomial {
    fn check_shape(&self) -> Result<()> {
        let top = self.ell as usize + 1;
        // monic of degree ell + 1 in Y, and the only top-degree term is Y^(ell+1)
        if self.coeffs[0][top] != BigInt::from(1) {
            return Err(Error::Data("Phi must be monic in Y of degree ell + 1".into()));
        }
        if (1..=top).any(|a| !self.coeffs[a][top].is_zero()) {
            return Err(Error::Data("X^a Y^(ell+1) must vanish for a > 0".into()));
        }
        Ok(())
    }

    pub fn coeff(&self, a: usize, b: usize) -> &BigInt {
        &self.coeffs[a][b]
    }

    pub fn degree(&self) -> usize {
        self.ell as usize + 1
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.coeffs.len();
        (0..n).all(|a| (0..n).all(|b| self.coeffs[a][b] == self.coeffs[b][a]))
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for row in self.coeffs.iter().rev() {
            let mut inner = BigInt::zero();
            for c in row.iter().rev() {
                inner = inner * y + c;
            }
            acc = acc * x + inner;
        }
        acc
    }

    /// Coefficients reduced into [0, p).
    pub fn reduce(&self, p: u64) -> Vec<Vec<u64>> {
        let m = BigInt::from(p);
        self.coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.mod_floor(&m).to_u64().expect("residue fits"))
                    .collect()
            })
            .collect()
    }

    /// Phi(x, y) mod p for residues x, y.
    pub fn eval_mod(&self, x: u64, y: u64, p: u64) -> u64 {
        let red = self.reduce(p);
        let mut acc = 0u128;
        for row in red.iter().rev() {
            let mut inner = 0u128;
            for &c in row.iter().rev() {
                inner = (inner * y as u128 + c as u128) % p as u128;
            }
            acc = (acc * x as u128 + inner) % p as u128;
        }
        acc as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi2_known_coefficients() {
        let phi = modular_polynomial(2).unwrap();
        assert_eq!(phi.coeff(1, 1), &BigInt::from(40773375));
        assert_eq!(phi.coeff(2, 2), &BigInt::from(-1));
        assert!(phi.eval(&BigInt::zero(), &BigInt::from(54000)).is_zero());
    }

    #[test]
    fn all_supported_are_symmetric() {
        for ell in SUPPORTED_ELLS {
            let phi = modular_polynomial(ell).unwrap();
            assert!(phi.is_symmetric());
            assert_eq!(phi.degree(), ell as usize + 1);
        }
        assert!(matches!(modular_polynomial(11), Err(Error::Unsupported(_))));
    }
}
