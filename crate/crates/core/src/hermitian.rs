//! The Hermitian curve `y^q + y = x^(q+1)` over GF(q²).
//!
//! Only the `q³` affine rational points are materialized. The single point at
//! infinity enters through pole orders alone: `x^i y^j` has a pole of order
//! `q·i + (q+1)·j` there, and the monomials with `i < q²`, `j < q` and pole
//! order at most `s` form a basis of the Riemann–Roch space `L(s·P∞)`.

use std::io::Write;

use crate::gf::Tower;

/// An affine rational point; `index` is its position in the point order of
/// the curve it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffinePoint {
    pub x: u16,
    pub y: u16,
    pub index: usize,
}

/// The monomial `x^i y^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub pole_order: u64,
}

impl Monomial {
    pub fn new(q: u32, i: u32, j: u32) -> Self {
        Monomial {
            i,
            j,
            pole_order: pole_order(q, i, j),
        }
    }
}

/// Pole order of `x^i y^j` at the point at infinity.
pub fn pole_order(q: u32, i: u32, j: u32) -> u64 {
    q as u64 * i as u64 + (q as u64 + 1) * j as u64
}

#[derive(Debug, Clone)]
pub struct HermitianCurve<'t> {
    tower: &'t Tower,
    q: u32,
    points: Vec<AffinePoint>,
    /// All `q³` monomials with `i < q²`, `j < q`, by increasing pole order.
    monomials: Vec<Monomial>,
}

impl<'t> HermitianCurve<'t> {
    /// The curve over the top field of `tower`, with its points sorted by
    /// `(x, y)` encoding.
    pub fn new(tower: &'t Tower) -> Self {
        let q = tower.q();
        let q2 = tower.q2() as u16;
        let mut points = Vec::with_capacity((q as usize).pow(3));
        for x in 0..q2 {
            let norm = tower.pow(x, q as u128 + 1);
            for y in 0..q2 {
                if tower.add(tower.pow(y, q as u128), y) == norm {
                    points.push(AffinePoint {
                        x,
                        y,
                        index: points.len(),
                    });
                }
            }
        }
        let mut monomials: Vec<Monomial> = (0..q * q)
            .flat_map(|i| (0..q).map(move |j| Monomial::new(q, i, j)))
            .collect();
        monomials.sort_by_key(|m| m.pole_order);
        HermitianCurve {
            tower,
            q,
            points,
            monomials,
        }
    }

    /// Same curve with the points listed in the order `perm` (indices into the
    /// current point list). Codes built from it are permutation-equivalent.
    pub fn with_point_order(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.points.len());
        let points = perm
            .iter()
            .enumerate()
            .map(|(index, &old)| AffinePoint {
                index,
                ..self.points[old]
            })
            .collect();
        HermitianCurve {
            points,
            ..self.clone()
        }
    }

    pub fn tower(&self) -> &'t Tower {
        self.tower
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn genus(&self) -> u64 {
        self.q as u64 * (self.q as u64 - 1) / 2
    }

    /// Code length, the number of affine rational points.
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[AffinePoint] {
        &self.points
    }

    pub fn is_on_curve(&self, x: u16, y: u16) -> bool {
        let t = self.tower;
        t.add(t.pow(y, self.q as u128), y) == t.pow(x, self.q as u128 + 1)
    }

    /// Basis monomials of `L(s·P∞)` with `i < q²`, by increasing pole order.
    pub fn monomial_basis(&self, s: u64) -> &[Monomial] {
        let count = self.monomials.partition_point(|m| m.pole_order <= s);
        &self.monomials[..count]
    }

    /// All capped basis monomials, by increasing pole order.
    pub fn all_monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// `ℓ(s·P∞)`: the number of pole orders `q·i + (q+1)·j ≤ s` with `j < q`
    /// and no cap on `i`. Agrees with `monomial_basis(s).len()` for `s < q³`.
    pub fn riemann_roch_dim(&self, s: u64) -> u64 {
        let q = self.q as u64;
        (0..q)
            .map(|j| {
                let yj = (q + 1) * j;
                if yj > s {
                    0
                } else {
                    (s - yj) / q + 1
                }
            })
            .sum()
    }

    pub fn evaluate(&self, mon: &Monomial, point: &AffinePoint) -> u16 {
        let t = self.tower;
        t.mul(t.pow(point.x, mon.i as u128), t.pow(point.y, mon.j as u128))
    }

    /// `(x^i y^j (P_1), …, x^i y^j (P_n))`.
    pub fn evaluation_row(&self, mon: &Monomial) -> Vec<u16> {
        self.points.iter().map(|p| self.evaluate(mon, p)).collect()
    }

    /// CSV export of the point list: a comment line naming the field and its
    /// modulus, a header, then `index,x,y` rows of element encodings.
    pub fn write_points_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let modulus: Vec<String> = self.tower.modulus().iter().map(|c| c.to_string()).collect();
        writeln!(
            w,
            "# GF({}) p={} modulus={}",
            self.tower.q2(),
            self.tower.p(),
            modulus.join(" ")
        )?;
        writeln!(w, "index,x,y")?;
        for p in &self.points {
            writeln!(w, "{},{},{}", p.index, p.x, p.y)?;
        }
        Ok(())
    }
}
