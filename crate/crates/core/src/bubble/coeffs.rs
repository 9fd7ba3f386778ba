//! Integer coefficients of the iterated polyharmonic Laplacian of the bubble.

use serde::{Deserialize, Serialize};

/// `K_j = Π_{h<j} (N - 2r + 2h)`.
pub fn coeff_k(j: usize, dim: usize, r: usize) -> i128 {
    (0..j).map(|h| dim as i128 - 2 * r as i128 + 2 * h as i128).product()
}

/// `D(i, j) = 1` for `i = 0`, else `Π_{h<j} (r - h)`.
pub fn coeff_d(i: usize, j: usize, r: usize) -> i128 {
    if i == 0 {
        1
    } else {
        (0..j).map(|h| r as i128 - h as i128).product()
    }
}

/// `E(i, j) = Π_{h<j} (N + 2h)` for `i < j`, `1` for `i = j`, `0` for `i > j`.
pub fn coeff_e(i: usize, j: usize, dim: usize) -> i128 {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => (0..j).map(|h| dim as i128 + 2 * h as i128).product(),
        std::cmp::Ordering::Equal => 1,
        std::cmp::Ordering::Greater => 0,
    }
}

pub fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, m| acc * (n - m) as i128 / (m + 1) as i128)
}

/// The product formula `2^i C(j,i) K_j D(i,j) E(i,j)`.
pub fn coeff_g_printed(i: usize, j: usize, dim: usize, r: usize) -> i128 {
    (1i128 << i) * binomial(j, i) * coeff_k(j, dim, r) * coeff_d(i, j, r) * coeff_e(i, j, dim)
}

/// Numerator coefficients of `(-Δ)^j` of the unit bubble written as
/// `P_j(x) / (1 + x)^{a + 2j}`, `x = t^2`, `a = (N - 2r)/2`.
///
/// With `f = P (1+x)^{-b}` the radial Laplacian is `4x f_xx + 2N f_x`; the
/// recursion multiplies out `(1+x)^{b+2}` and keeps integers via `tb = 2b`.
pub fn derived_numerators(dim: usize, r: usize, jmax: usize) -> Vec<Vec<i128>> {
    let nn = dim as i128;
    let mut tb = dim as i128 - 2 * r as i128;
    let mut p: Vec<i128> = vec![1];
    let mut out = vec![p.clone()];
    for _ in 0..jmax {
        let deg = p.len() - 1;
        let d1: Vec<i128> = (1..=deg).map(|k| k as i128 * p[k]).collect();
        let d2: Vec<i128> = (2..=deg).map(|k| (k * (k - 1)) as i128 * p[k]).collect();
        let mut q = vec![0i128; deg + 2];
        let add = |q: &mut Vec<i128>, poly: &[i128], shift: usize, scale: i128| {
            for (k, c) in poly.iter().enumerate() {
                q[k + shift] += scale * c;
            }
        };
        // (1 + x)^2 = 1 + 2x + x^2
        for (s, m) in [(0usize, 1i128), (1, 2), (2, 1)] {
            add(&mut q, &d2, 1 + s, 4 * m);
            add(&mut q, &d1, s, 2 * nn * m);
        }
        for (s, m) in [(0usize, 1i128), (1, 1)] {
            add(&mut q, &d1, 1 + s, -4 * tb * m);
            add(&mut q, &p, s, -nn * tb * m);
        }
        add(&mut q, &p, 1, tb * (tb + 2));
        p = q.into_iter().map(|c| -c).collect();
        out.push(p.clone());
        tb += 4;
    }
    out
}

/// Printed and derived coefficient tables, indexed `[j][i]`, `0 <= i <= j <= r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub dim: usize,
    pub r: usize,
    pub printed: Vec<Vec<i128>>,
    pub derived: Vec<Vec<i128>>,
}

/// One entry where the printed product disagrees with the derived value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffDefect {
    pub i: usize,
    pub j: usize,
    pub printed: i128,
    pub derived: i128,
}

impl CoeffTable {
    pub fn new(dim: usize, r: usize) -> Self {
        let printed = (0..=r).map(|j| (0..=j).map(|i| coeff_g_printed(i, j, dim, r)).collect()).collect();
        let derived = derived_numerators(dim, r, r);
        CoeffTable { dim, r, printed, derived }
    }

    pub fn printed(&self, i: usize, j: usize) -> i128 {
        self.printed[j][i]
    }

    pub fn derived(&self, i: usize, j: usize) -> i128 {
        self.derived[j][i]
    }

    pub fn defects(&self) -> Vec<CoeffDefect> {
        let mut out = Vec::new();
        for j in 0..=self.r {
            for i in 0..=j {
                let (p, d) = (self.printed[j][i], self.derived[j][i]);
                if p != d {
                    out.push(CoeffDefect { i, j, printed: p, derived: d });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_examples() {
        assert_eq!(coeff_k(0, 9, 3), 1);
        assert_eq!(coeff_k(1, 5, 2), 1);
        assert_eq!(coeff_k(2, 6, 1), 24);
        assert_eq!(coeff_d(0, 3, 2), 1);
        assert_eq!(coeff_d(1, 1, 2), 2);
        assert_eq!(coeff_d(2, 2, 3), 6);
        assert_eq!(coeff_e(2, 2, 7), 1);
        assert_eq!(coeff_e(3, 1, 5), 0);
        assert_eq!(coeff_e(0, 2, 4), 24);
    }

    #[test]
    fn derived_degree_and_leading() {
        let t = CoeffTable::new(7, 3);
        for j in 0..=3 {
            assert_eq!(t.derived[j].len(), j + 1);
            assert_eq!(t.derived(0, j), t.printed(0, j));
        }
    }
}
