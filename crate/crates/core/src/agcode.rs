//! Linear codes and the one-point Hermitian codes `H(q², s)`.
//!
//! `H(q², s)` is the image of `L(s·P∞)` under evaluation at the `q³` affine
//! rational points. For `2g-2 < s < q³` its dimension is `s + 1 - g`, and
//! `H(q², s)` and `H(q², q³ + q² - q - 2 - s)` are mutually dual. For `s ≥ q³`
//! the dimension is simply the rank of the evaluation matrix.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gf::Tower;
use crate::hermitian::HermitianCurve;
use crate::linalg::{self, Echelon, EchelonBuilder, LinalgError, Matrix};

/// Default cap on the number of messages enumerated by
/// [`brute_force_min_distance`].
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgError {
    #[error("minimum distance is undefined for the zero code")]
    EmptyCode,
    #[error("exhaustive search needs {needed} messages, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("designed distance q³ - s is only asserted for {low} < s < {high}, got s = {s}")]
    OutOfRange { s: u64, low: u64, high: u64 },
    #[error("vector has length {got}, code length is {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("vector entry {value} at position {pos} is not in GF({order})")]
    NotInField { pos: usize, value: u16, order: u32 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Where a code came from; carried through to reports and exports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Hermitian { q: u32, s: u64 },
    Subfield { r: u32, parent: Box<Provenance> },
    Trace { r: u32, parent: Box<Provenance> },
    Dual { parent: Box<Provenance> },
    Unspecified,
}

impl Provenance {
    fn dual(&self) -> Provenance {
        match self {
            Provenance::Dual { parent } => (**parent).clone(),
            other => Provenance::Dual {
                parent: Box::new(other.clone()),
            },
        }
    }
}

/// A linear code: the row space of `generators`, together with a basis in
/// systematic form (`basis` restricted to the columns `info_set` is the
/// identity).
#[derive(Debug, Clone)]
pub struct LinearCode {
    generators: Matrix,
    basis: Matrix,
    info_set: Vec<usize>,
    provenance: Provenance,
}

impl LinearCode {
    /// Code spanned by arbitrary generator rows.
    pub fn new(tower: &Tower, generators: Matrix, provenance: Provenance) -> Self {
        let ech = linalg::rref(tower, &generators);
        LinearCode {
            generators,
            basis: ech.matrix,
            info_set: ech.pivots,
            provenance,
        }
    }

    /// Code whose generators are the rows of a reduced echelon form (with
    /// respect to any column order).
    pub fn from_echelon(ech: Echelon, provenance: Provenance) -> Self {
        Self::systematic(ech.matrix, ech.pivots, provenance)
    }

    /// Code given by a basis that is the identity on the columns `info_set`.
    pub fn systematic(basis: Matrix, info_set: Vec<usize>, provenance: Provenance) -> Self {
        debug_assert_eq!(basis.rows(), info_set.len());
        debug_assert!(info_set
            .iter()
            .enumerate()
            .all(|(i, &c)| (0..basis.rows()).all(|r| basis.get(r, c) == (r == i) as u16)));
        LinearCode {
            generators: basis.clone(),
            basis,
            info_set,
            provenance,
        }
    }

    /// Order of the field the code is defined over.
    pub fn order(&self) -> u32 {
        self.generators.order()
    }

    pub fn n(&self) -> usize {
        self.generators.cols()
    }

    pub fn dimension(&self) -> usize {
        self.basis.rows()
    }

    pub fn generators(&self) -> &Matrix {
        &self.generators
    }

    pub fn systematic_basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The canonical form used for code identity: RREF in natural column order.
    pub fn canonical(&self, tower: &Tower) -> Echelon {
        linalg::rref(tower, &self.basis)
    }

    /// Column order starting with the information set, rest ascending.
    pub fn info_first_order(&self) -> Vec<usize> {
        let mut in_info = vec![false; self.n()];
        for &c in &self.info_set {
            in_info[c] = true;
        }
        let mut order = self.info_set.clone();
        order.extend((0..self.n()).filter(|&c| !in_info[c]));
        order
    }

    pub fn same_code(&self, tower: &Tower, other: &LinearCode) -> Result<bool, LinalgError> {
        linalg::row_space_equal(tower, &self.basis, &other.basis)
    }
}

/// `H(q², s)`: generator rows are the evaluations of the basis monomials of
/// `L(s·P∞)` (capped at `i < q²`) in increasing pole order.
pub fn build_hermitian_code(curve: &HermitianCurve<'_>, s: u64) -> LinearCode {
    let tower = curve.tower();
    let mut g = Matrix::zeros(tower.q2(), 0, curve.n());
    for mon in curve.monomial_basis(s) {
        g.push_row(&curve.evaluation_row(mon));
    }
    LinearCode::new(tower, g, Provenance::Hermitian { q: curve.q(), s })
}

/// The nested family `H(q², 0) ⊆ H(q², 1) ⊆ …`, built incrementally so a
/// sweep over `s` costs one elimination in total. Codes come out with their
/// reduced echelon basis as generators.
pub struct HermitianFamily<'c, 't> {
    curve: &'c HermitianCurve<'t>,
    builder: EchelonBuilder<'t>,
    next: usize,
    s: u64,
}

impl<'c, 't> HermitianFamily<'c, 't> {
    pub fn new(curve: &'c HermitianCurve<'t>) -> Self {
        let tower = curve.tower();
        HermitianFamily {
            curve,
            builder: EchelonBuilder::new(tower, tower.q2(), curve.n()),
            next: 0,
            s: 0,
        }
    }

    /// Advances to `s` (which must not decrease) and returns `H(q², s)`.
    pub fn code_at(&mut self, s: u64) -> LinearCode {
        assert!(self.next == 0 || s >= self.s, "family only grows");
        self.s = s;
        let monomials = self.curve.all_monomials();
        while self.next < monomials.len() && monomials[self.next].pole_order <= s {
            let row = self.curve.evaluation_row(&monomials[self.next]);
            self.builder.insert(row);
            self.next += 1;
        }
        LinearCode::from_echelon(
            self.builder.echelon(),
            Provenance::Hermitian {
                q: self.curve.q(),
                s,
            },
        )
    }

    /// Number of monomials inserted so far and the rank they reached.
    pub fn counts(&self) -> (usize, usize) {
        (self.next, self.builder.rank())
    }
}

/// `q³ - s`, for `2g - 2 < s < q³`.
pub fn designed_min_distance(q: u32, s: u64) -> Result<u64, AgError> {
    let q = q as u64;
    let g = q * (q - 1) / 2;
    let n = q.pow(3);
    if s + 2 <= 2 * g || s >= n {
        return Err(AgError::OutOfRange {
            s,
            low: (2 * g).saturating_sub(2),
            high: n,
        });
    }
    Ok(n - s)
}

/// `s̃ = q³ + q² - q - 2 - s`; negative when no dual one-point code exists.
pub fn dual_hermitian_s(q: u32, s: u64) -> i64 {
    let q = q as i64;
    q * q * q + q * q - q - 2 - s as i64
}

/// The dual code, with basis `{v : G·vᵀ = 0}` built directly from the
/// systematic form: one row per column outside the information set.
pub fn dual_code(tower: &Tower, code: &LinearCode) -> LinearCode {
    let n = code.n();
    let basis = code.systematic_basis();
    let mut in_info = vec![false; n];
    for &c in code.info_set() {
        in_info[c] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !in_info[c]).collect();
    let mut h = Matrix::zeros(code.order(), free.len(), n);
    for (row, &f) in free.iter().enumerate() {
        h.set(row, f, 1);
        for (i, &c) in code.info_set().iter().enumerate() {
            h.set(row, c, tower.neg(basis.get(i, f)));
        }
    }
    LinearCode {
        generators: h.clone(),
        basis: h,
        info_set: free,
        provenance: code.provenance().dual(),
    }
}

/// Membership test through a parity-check matrix of a fixed code.
pub struct ParityCheck<'t> {
    tower: &'t Tower,
    order: u32,
    parity: Matrix,
}

impl<'t> ParityCheck<'t> {
    pub fn new(tower: &'t Tower, code: &LinearCode) -> Self {
        ParityCheck {
            tower,
            order: code.order(),
            parity: dual_code(tower, code).basis,
        }
    }

    /// Whether `v` (entries in the code's field) satisfies every parity check.
    pub fn contains(&self, v: &[u16]) -> Result<bool, AgError> {
        if v.len() != self.parity.cols() {
            return Err(AgError::LengthMismatch {
                got: v.len(),
                expected: self.parity.cols(),
            });
        }
        if let Some((pos, &value)) = v
            .iter()
            .enumerate()
            .find(|(_, &x)| x as u32 >= self.tower.q2() || !self.tower.in_subfield(x, self.order))
        {
            return Err(AgError::NotInField {
                pos,
                value,
                order: self.order,
            });
        }
        Ok(self
            .parity
            .iter_rows()
            .all(|h| linalg::dot(self.tower, h, v) == 0))
    }
}

pub fn is_codeword(tower: &Tower, code: &LinearCode, v: &[u16]) -> Result<bool, AgError> {
    ParityCheck::new(tower, code).contains(v)
}

/// Minimum Hamming weight of a nonzero codeword, by enumerating every message.
/// Refuses when `|F|^k` exceeds `budget`.
pub fn brute_force_min_distance(
    tower: &Tower,
    code: &LinearCode,
    budget: u64,
) -> Result<usize, AgError> {
    let k = code.dimension();
    if k == 0 {
        return Err(AgError::EmptyCode);
    }
    let order = code.order();
    let needed = (order as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(AgError::BudgetExceeded { needed, budget });
    }
    let elems = tower
        .subfield_elements(order)
        .expect("code field is a subfield");
    let basis = code.systematic_basis();
    let n = code.n();

    // Shard on the first message symbol; each shard walks the remaining
    // symbols as an odometer, updating the codeword by one row per step.
    let best = (0..elems.len())
        .into_par_iter()
        .map(|first| {
            let mut word: Vec<u16> = basis
                .row(0)
                .iter()
                .map(|&x| tower.mul(x, elems[first]))
                .collect();
            let mut digits = vec![0usize; k];
            let mut best = usize::MAX;
            if first != 0 {
                best = weight(&word);
            }
            loop {
                let mut pos = 1;
                while pos < k {
                    let old = elems[digits[pos]];
                    digits[pos] = (digits[pos] + 1) % elems.len();
                    let delta = tower.sub(elems[digits[pos]], old);
                    for (w, &g) in word.iter_mut().zip(basis.row(pos)) {
                        *w = tower.add(*w, tower.mul(delta, g));
                    }
                    if digits[pos] != 0 {
                        break;
                    }
                    pos += 1;
                }
                if pos == k {
                    break;
                }
                best = best.min(weight(&word));
            }
            debug_assert_eq!(word.len(), n);
            best
        })
        .min()
        .unwrap_or(usize::MAX);
    Ok(best)
}

fn weight(v: &[u16]) -> usize {
    v.iter().filter(|&&x| x != 0).count()
}

/// JSON-facing summary of a code's parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    /// Designed minimum distance, omitted outside `2g - 2 < s < n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    pub provenance: Provenance,
}

pub fn hermitian_params(curve: &HermitianCurve<'_>, s: u64) -> CodeParams {
    let code = build_hermitian_code(curve, s);
    CodeParams {
        n: code.n(),
        k: code.dimension(),
        d: designed_min_distance(curve.q(), s).ok(),
        provenance: code.provenance().clone(),
    }
}
