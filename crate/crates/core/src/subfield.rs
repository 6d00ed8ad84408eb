//! Subfield subcodes `C|GF(r) = C ∩ GF(r)^n` and trace codes `tr(C)`.
//!
//! The subcode is computed as the kernel of the parity-check matrix of `C`
//! expanded over a GF(r)-basis of GF(q²): every check `h·vᵀ = 0` splits into
//! `h` checks over GF(r), giving an `h(n-k) × n` matrix. The trace code is
//! spanned by `tr(b_t·g_i)` for the basis `b_t` and a basis `g_i` of `C`.
//!
//! The two constructions meet in Delsarte's identity `(C|GF(r))⊥ = tr(C⊥)`,
//! which also yields an independent route to the subcode dimension:
//! `k0 = n - h(n-k) + dim ker(tr|C⊥) = n - dim tr(C⊥)`. [`analyze`] runs both
//! routes on one instance and checks that they agree.
//!
//! Expanded matrices are eliminated in a column order that starts with the
//! information set of the parity-check matrix, where each expanded check
//! carries a single pivot; only a `k`-column block is dense.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::agcode::{dual_code, HermitianFamily, LinearCode, ParityCheck, Provenance};
use crate::gf::{RBasis, Tower};
use crate::hermitian::HermitianCurve;
use crate::linalg::{self, Echelon, LinalgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubfieldError {
    #[error("code is over GF({got}), expected the top field GF({expected})")]
    FieldMismatch { got: u32, expected: u32 },
    #[error("{0} is not an element of GF(r)")]
    NotInSubfield(u16),
    #[error("subcode generator {0} is not a codeword of the parent code")]
    NotAParentCodeword(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone)]
pub struct SubfieldSubcode {
    pub code: LinearCode,
    pub k0: usize,
    /// `n - h(n-k)`; may be negative.
    pub bound_low: i64,
    pub parent_k: usize,
}

#[derive(Debug, Clone)]
pub struct TraceCode {
    pub code: LinearCode,
    pub k1: usize,
}

fn check_top_field(tower: &Tower, code: &LinearCode) -> Result<(), SubfieldError> {
    if code.order() != tower.q2() {
        return Err(SubfieldError::FieldMismatch {
            got: code.order(),
            expected: tower.q2(),
        });
    }
    Ok(())
}

/// Expands each entry of each row into its `h` coordinates: row `(j, t)` of
/// the result holds the `t`-th coordinates of row `j`.
pub fn expand_rows(tower: &Tower, basis: &RBasis, m: &Matrix) -> Matrix {
    let h = tower.h();
    let mut out = Matrix::zeros(tower.r(), m.rows() * h, m.cols());
    for j in 0..m.rows() {
        for (c, &x) in m.row(j).iter().enumerate() {
            for (t, &coord) in basis.coords(x).iter().enumerate() {
                out.set(j * h + t, c, coord);
            }
        }
    }
    out
}

/// Rows `tr(b_t · g)` for every basis element `b_t` and every row `g`.
pub fn trace_rows(tower: &Tower, basis: &RBasis, m: &Matrix) -> Matrix {
    let h = tower.h();
    let mut out = Matrix::zeros(tower.r(), m.rows() * h, m.cols());
    for j in 0..m.rows() {
        for (t, &b) in basis.elements().iter().enumerate() {
            let dst = out.row_mut(j * h + t);
            for (d, &x) in dst.iter_mut().zip(m.row(j)) {
                *d = tower.trace_to_r(tower.mul(b, x));
            }
        }
    }
    out
}

/// Kernel of the expanded parity checks of `dual` (a parity-check code of the
/// parent), as a systematic code over GF(r).
fn subcode_from_parity(
    tower: &Tower,
    basis: &RBasis,
    dual: &LinearCode,
    provenance: Provenance,
) -> Result<(LinearCode, Echelon), SubfieldError> {
    let expanded = expand_rows(tower, basis, dual.systematic_basis());
    let ech = linalg::rref_in_order(tower, &expanded, &dual.info_first_order())?;
    let kernel = linalg::kernel_from_echelon(tower, &ech);
    let info = ech.free_columns();
    Ok((LinearCode::systematic(kernel, info, provenance), ech))
}

/// `C|GF(r)` via the expanded parity-check matrix. Every generator of the
/// result is checked to be a codeword of the parent.
pub fn subfield_subcode(
    tower: &Tower,
    basis: &RBasis,
    parent: &LinearCode,
) -> Result<SubfieldSubcode, SubfieldError> {
    check_top_field(tower, parent)?;
    let dual = dual_code(tower, parent);
    let provenance = Provenance::Subfield {
        r: tower.r(),
        parent: Box::new(parent.provenance().clone()),
    };
    let (code, _) = subcode_from_parity(tower, basis, &dual, provenance)?;
    verify_members(tower, parent, &code)?;
    Ok(SubfieldSubcode {
        k0: code.dimension(),
        bound_low: bound_low(tower, parent),
        parent_k: parent.dimension(),
        code,
    })
}

fn bound_low(tower: &Tower, parent: &LinearCode) -> i64 {
    let n = parent.n() as i64;
    n - tower.h() as i64 * (n - parent.dimension() as i64)
}

fn verify_members(
    tower: &Tower,
    parent: &LinearCode,
    sub: &LinearCode,
) -> Result<(), SubfieldError> {
    let checker = ParityCheck::new(tower, parent);
    for (i, row) in sub.generators().iter_rows().enumerate() {
        if !checker.contains(row).unwrap_or(false) {
            return Err(SubfieldError::NotAParentCodeword(i));
        }
    }
    Ok(())
}

/// `tr(C)` from the `h·k` generators `tr(b_t · g_i)`.
pub fn trace_code(
    tower: &Tower,
    basis: &RBasis,
    code: &LinearCode,
) -> Result<TraceCode, SubfieldError> {
    check_top_field(tower, code)?;
    let rows = trace_rows(tower, basis, code.systematic_basis());
    let ech = linalg::rref_in_order(tower, &rows, &code.info_first_order())?;
    let k1 = ech.rank();
    let code = LinearCode::from_echelon(
        ech,
        Provenance::Trace {
            r: tower.r(),
            parent: Box::new(code.provenance().clone()),
        },
    );
    Ok(TraceCode { code, k1 })
}

/// Outcome of comparing `(C|GF(r))⊥` with `tr(C⊥)`. Both reduced forms are
/// kept (relative to the same column order) for diagnostics.
#[derive(Debug, Clone)]
pub struct DelsarteCheck {
    pub holds: bool,
    pub subcode_dual: Echelon,
    pub trace_of_dual: Echelon,
}

pub fn delsarte_check(
    tower: &Tower,
    basis: &RBasis,
    parent: &LinearCode,
) -> Result<DelsarteCheck, SubfieldError> {
    check_top_field(tower, parent)?;
    let dual = dual_code(tower, parent);
    let (sub, _) = subcode_from_parity(tower, basis, &dual, Provenance::Unspecified)?;
    let left = dual_code(tower, &sub);
    let right = trace_code(tower, basis, &dual)?.code;
    let order = dual.info_first_order();
    let subcode_dual = linalg::rref_in_order(tower, left.systematic_basis(), &order)?;
    let trace_of_dual = linalg::rref_in_order(tower, right.systematic_basis(), &order)?;
    Ok(DelsarteCheck {
        holds: subcode_dual == trace_of_dual,
        subcode_dual,
        trace_of_dual,
    })
}

/// The subcode dimension from the trace side:
/// `n - h(n-k) + dim ker(tr|C⊥)`, with `dim ker = h(n-k) - dim tr(C⊥)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VeronDimension {
    pub k0: i64,
    pub trace_kernel_dim: usize,
    pub k1_dual: usize,
}

pub fn veron_dimension(
    tower: &Tower,
    basis: &RBasis,
    parent: &LinearCode,
) -> Result<VeronDimension, SubfieldError> {
    check_top_field(tower, parent)?;
    let dual = dual_code(tower, parent);
    let k1_dual = trace_code(tower, basis, &dual)?.k1;
    Ok(veron_from(tower, parent, k1_dual))
}

fn veron_from(tower: &Tower, parent: &LinearCode, k1_dual: usize) -> VeronDimension {
    let checks = tower.h() * (parent.n() - parent.dimension());
    let trace_kernel_dim = checks - k1_dual;
    VeronDimension {
        k0: bound_low(tower, parent) + trace_kernel_dim as i64,
        trace_kernel_dim,
        k1_dual,
    }
}

/// Dimension of the subcode predicted for `0 ≤ s ≤ q³/r`: one below `q³/r`,
/// `2m + 1` at `q³/r`, no prediction beyond.
pub fn theorem_expected(tower: &Tower, s: u64) -> Option<usize> {
    let threshold = (tower.q() as u64).pow(3) / tower.r() as u64;
    match s.cmp(&threshold) {
        std::cmp::Ordering::Less => Some(1),
        std::cmp::Ordering::Equal => Some(2 * tower.m() as usize + 1),
        std::cmp::Ordering::Greater => None,
    }
}

/// Everything computed for one parent code `H(q², s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub q: u32,
    pub r: u32,
    pub s: u64,
    pub n: usize,
    pub k: usize,
    /// Subcode dimension from the expanded parity-check kernel.
    pub k0: usize,
    /// Dimension of the trace code of the dual.
    pub k1_dual: usize,
    pub veron_k0: i64,
    pub bound_low: i64,
    pub theorem_expected: Option<usize>,
    pub delsarte: bool,
    /// Subcode generators are codewords of the parent.
    pub members: bool,
    /// Sandwich bounds on `k0` and on `k1` of the dual hold.
    pub bounds: bool,
    pub pass: bool,
}

/// Subcode, trace code of the dual, Delsarte identity and both dimension
/// routes for one parent, sharing the dual between them.
pub fn analyze(
    tower: &Tower,
    basis: &RBasis,
    parent: &LinearCode,
    s: u64,
) -> Result<InstanceReport, SubfieldError> {
    check_top_field(tower, parent)?;
    let n = parent.n();
    let k = parent.dimension();
    let dual = dual_code(tower, parent);
    let (sub, _) = subcode_from_parity(tower, basis, &dual, Provenance::Unspecified)?;
    let members = verify_members(tower, parent, &sub).is_ok();
    let k0 = sub.dimension();

    let trace = trace_code(tower, basis, &dual)?;
    let order = dual.info_first_order();
    let left = linalg::rref_in_order(tower, dual_code(tower, &sub).systematic_basis(), &order)?;
    let right = linalg::rref_in_order(tower, trace.code.systematic_basis(), &order)?;
    let delsarte = left == right;

    let veron = veron_from(tower, parent, trace.k1);
    let low = bound_low(tower, parent);
    let h = tower.h();
    let bounds = low <= k0 as i64 && k0 <= k && (n - k) <= trace.k1 && trace.k1 <= h * (n - k);
    let expected = theorem_expected(tower, s);
    let pass =
        delsarte && members && bounds && veron.k0 == k0 as i64 && expected.is_none_or(|e| e == k0);
    Ok(InstanceReport {
        q: tower.q(),
        r: tower.r(),
        s,
        n,
        k,
        k0,
        k1_dual: trace.k1,
        veron_k0: veron.k0,
        bound_low: low,
        theorem_expected: expected,
        delsarte,
        members,
        bounds,
        pass,
    })
}

/// Runs [`analyze`] on `H(q², s)` for every `s` in `s_values` (sorted and
/// deduplicated). Parent codes are grown incrementally on the calling thread
/// and analysed on up to `jobs` workers (`0` = all cores); rows come back
/// ordered by `s`.
pub fn sweep(
    tower: &Tower,
    curve: &HermitianCurve<'_>,
    basis: &RBasis,
    s_values: &[u64],
    jobs: usize,
) -> Result<Vec<InstanceReport>, SubfieldError> {
    let mut s_values = s_values.to_vec();
    s_values.sort_unstable();
    s_values.dedup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    let mut family = HermitianFamily::new(curve);
    let parents = s_values.iter().map(move |&s| (s, family.code_at(s)));
    let mut rows: Vec<InstanceReport> = pool.install(|| {
        parents
            .par_bridge()
            .map(|(s, parent)| analyze(tower, basis, &parent, s))
            .collect::<Result<_, _>>()
    })?;
    rows.sort_by_key(|r| r.s);
    Ok(rows)
}

/// Instances of the dimension theorem that failed, with the reports.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub q: u32,
    pub r: u32,
    pub rows: Vec<InstanceReport>,
    pub violations: Vec<u64>,
}

impl TheoremReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `dim C|GF(r) = 1` for `0 ≤ s < q³/r` and `2m + 1` at `s = q³/r`.
pub fn main_theorem_sweep(
    tower: &Tower,
    curve: &HermitianCurve<'_>,
    basis: &RBasis,
    jobs: usize,
) -> Result<TheoremReport, SubfieldError> {
    let threshold = (tower.q() as u64).pow(3) / tower.r() as u64;
    let s_values: Vec<u64> = (0..=threshold).collect();
    let rows = sweep(tower, curve, basis, &s_values, jobs)?;
    let violations = rows.iter().filter(|r| !r.pass).map(|r| r.s).collect();
    Ok(TheoremReport {
        q: tower.q(),
        r: tower.r(),
        rows,
        violations,
    })
}

/// Evaluation vector of `d + tr(α·x)` at the points of `curve`.
pub fn f_d_alpha_codeword(
    tower: &Tower,
    curve: &HermitianCurve<'_>,
    d: u16,
    alpha: u16,
) -> Result<Vec<u16>, SubfieldError> {
    if d as u32 >= tower.q2() || !tower.in_subfield(d, tower.r()) {
        return Err(SubfieldError::NotInSubfield(d));
    }
    Ok(curve
        .points()
        .iter()
        .map(|p| tower.add(d, tower.trace_to_r(tower.mul(alpha, p.x))))
        .collect())
}

/// Evaluation vector of `tr(α·y)` at the points of `curve`.
pub fn y_trace_codeword(tower: &Tower, curve: &HermitianCurve<'_>, alpha: u16) -> Vec<u16> {
    curve
        .points()
        .iter()
        .map(|p| tower.trace_to_r(tower.mul(alpha, p.y)))
        .collect()
}

pub const REPORT_CSV_HEADER: &str = "q,r,s,n,k,k0,k1_dual,boundLow,theorem_expected,pass";

pub fn write_report_csv<W: std::io::Write>(
    rows: &[InstanceReport],
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "{REPORT_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.q,
            r.r,
            r.s,
            r.n,
            r.k,
            r.k0,
            r.k1_dual,
            r.bound_low,
            r.theorem_expected
                .map(|e| e.to_string())
                .unwrap_or_default(),
            r.pass
        )?;
    }
    Ok(())
}
