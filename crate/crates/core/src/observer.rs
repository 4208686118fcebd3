//! Synthesis of the greatest observer matrix `Lx` for
//! `x̂ = Ax̂ ⊕ Bu ⊕ L(ŷ ⊕ y)` and the checks that come with it.

use serde::Serialize;

use crate::error::{MatrixError, ObserverError};
use crate::matrix::{BlockStructure, SeriesMatrix};
use crate::teg::{SystemMatrices, Transfer};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ObserverChecks {
    /// `(A ⊕ LC)*B ⪯ A*B`.
    pub constraint_25: bool,
    /// `(A ⊕ LC)*LCA*R ⪯ A*R`.
    pub constraint_26: bool,
    /// `C(A ⊕ LC)*B = CA*B`.
    pub output_eq_29: bool,
    /// `C(A ⊕ LC)*LCA*R = CA*R`.
    pub output_eq_30: bool,
    /// One output per strongly connected component.
    pub prop3_precondition: bool,
    /// Entrywise equal slopes of the state and observer transfers.
    pub prop3_slopes_equal: bool,
    /// `A*B̄` lies in the image of `X ↦ X ⊗ CA*B̄`, so the estimate is exact.
    pub prop4_exact: bool,
}

impl ObserverChecks {
    /// Checks whose failure makes `observe` exit with status 1. The exactness
    /// test is informational.
    pub fn required_pass(&self) -> bool {
        self.constraint_25
            && self.constraint_26
            && self.output_eq_29
            && self.output_eq_30
            && self.prop3_precondition
            && self.prop3_slopes_equal
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObserverResult {
    pub l1: SeriesMatrix,
    pub l2: SeriesMatrix,
    pub lx: SeriesMatrix,
    pub blocks: BlockStructure,
    pub checks: ObserverChecks,
}

/// Transfers of the observer `x̂ = (A ⊕ LC)*Bu ⊕ (A ⊕ LC)*LCA*Rw`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObserverTransfer {
    pub from_u: SeriesMatrix,
    pub from_w: SeriesMatrix,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    l1: Vec<Vec<String>>,
    l2: Vec<Vec<String>>,
    lx: Vec<Vec<String>>,
    components: usize,
    checks: &'a ObserverChecks,
}

fn grid(m: &SeriesMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
        .collect()
}

impl ObserverResult {
    pub fn to_text(&self) -> String {
        let c = &self.checks;
        let mut out = format!(
            "L1 = {}\nL2 = {}\nLx = {}\ncomponents = {}\n",
            self.l1, self.l2, self.lx, self.blocks.k
        );
        for (name, v) in [
            ("constraint_25", c.constraint_25),
            ("constraint_26", c.constraint_26),
            ("output_eq_29", c.output_eq_29),
            ("output_eq_30", c.output_eq_30),
            ("prop3_precondition", c.prop3_precondition),
            ("prop3_slopes_equal", c.prop3_slopes_equal),
            ("prop4_exact", c.prop4_exact),
        ] {
            out.push_str(&format!("{name} = {v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = ReportDoc {
            l1: grid(&self.l1),
            l2: grid(&self.l2),
            lx: grid(&self.lx),
            components: self.blocks.k,
            checks: &self.checks,
        };
        serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
    }
}

/// `L1 = (A*B) ∘/ (CA*B)`.
pub fn synth_l1(sys: &SystemMatrices) -> Result<SeriesMatrix, MatrixError> {
    let t = sys.transfer()?;
    t.a_b.rres(&t.ca_b)
}

/// `L2 = (A*R) ∘/ (CA*R)`.
pub fn synth_l2(sys: &SystemMatrices) -> Result<SeriesMatrix, MatrixError> {
    let t = sys.transfer()?;
    t.a_r.rres(&t.ca_r)
}

/// Computes `Lx` both as `L1 ∧ L2` and as `(A*B̄) ∘/ (CA*B̄)` with
/// `B̄ = [B R]`, and fills in every check.
pub fn synth_lx(sys: &SystemMatrices) -> Result<ObserverResult, ObserverError> {
    let t = sys.transfer()?;
    let l1 = t.a_b.rres(&t.ca_b)?;
    let l2 = t.a_r.rres(&t.ca_r)?;
    let lx = l1.meet(&l2)?;
    let fused = fused_lx(&t)?;
    if fused != lx {
        return Err(ObserverError::FusionMismatch {
            meet: lx.to_string(),
            fused: fused.to_string(),
        });
    }
    let blocks = sys.a.scc_block_form();
    let ot = transfer_with(sys, &t, &lx)?;
    let (constraint_25, constraint_26) = (ot.from_u.leq(&t.a_b), ot.from_w.leq(&t.a_r));
    let (output_eq_29, output_eq_30) = outputs_equal(sys, &t, &ot)?;
    let (prop3_precondition, prop3_slopes_equal) = prop3(sys, &t, &ot, &blocks)?;
    let prop4_exact = prop4(&t)?;
    let checks = ObserverChecks {
        constraint_25,
        constraint_26,
        output_eq_29,
        output_eq_30,
        prop3_precondition,
        prop3_slopes_equal,
        prop4_exact,
    };
    Ok(ObserverResult {
        l1,
        l2,
        lx,
        blocks,
        checks,
    })
}

fn fused_lx(t: &Transfer) -> Result<SeriesMatrix, MatrixError> {
    let a_bar = t.a_b.hconcat(&t.a_r)?;
    let ca_bar = t.ca_b.hconcat(&t.ca_r)?;
    a_bar.rres(&ca_bar)
}

fn transfer_with(
    sys: &SystemMatrices,
    t: &Transfer,
    l: &SeriesMatrix,
) -> Result<ObserverTransfer, MatrixError> {
    let lc = l.mul(&sys.c)?;
    let closed = sys.a.add(&lc)?.star()?;
    let from_u = closed.mul(&sys.b)?;
    let from_w = closed.mul(&l.mul(&t.ca_r)?)?;
    Ok(ObserverTransfer { from_u, from_w })
}

fn outputs_equal(
    sys: &SystemMatrices,
    t: &Transfer,
    ot: &ObserverTransfer,
) -> Result<(bool, bool), MatrixError> {
    Ok((
        sys.c.mul(&ot.from_u)? == t.ca_b,
        sys.c.mul(&ot.from_w)? == t.ca_r,
    ))
}

fn prop3(
    sys: &SystemMatrices,
    t: &Transfer,
    ot: &ObserverTransfer,
    blocks: &BlockStructure,
) -> Result<(bool, bool), MatrixError> {
    let mut hits = vec![0usize; blocks.k];
    for i in 0..sys.c.rows() {
        for j in (0..sys.c.cols()).filter(|&j| !sys.c.get(i, j).is_eps()) {
            hits[blocks.block_of(j)] += 1;
        }
    }
    let precondition = sys.c.rows() == blocks.k && hits.iter().all(|&h| h == 1);
    let state = t.a_b.hconcat(&t.a_r)?.slopes();
    let estimate = ot.from_u.hconcat(&ot.from_w)?.slopes();
    Ok((precondition, state == estimate))
}

fn prop4(t: &Transfer) -> Result<bool, MatrixError> {
    let a_bar = t.a_b.hconcat(&t.a_r)?;
    let ca_bar = t.ca_b.hconcat(&t.ca_r)?;
    Ok(a_bar.rres(&ca_bar)?.mul(&ca_bar)? == a_bar)
}

/// Observer transfers for an arbitrary gain `l`.
pub fn observer_transfer(
    sys: &SystemMatrices,
    l: &SeriesMatrix,
) -> Result<ObserverTransfer, MatrixError> {
    transfer_with(sys, &sys.transfer()?, l)
}

/// Whether `l` satisfies `(A ⊕ LC)*B ⪯ A*B` and `(A ⊕ LC)*LCA*R ⪯ A*R`.
pub fn check_constraints(
    sys: &SystemMatrices,
    l: &SeriesMatrix,
) -> Result<(bool, bool), MatrixError> {
    let t = sys.transfer()?;
    let ot = transfer_with(sys, &t, l)?;
    Ok((ot.from_u.leq(&t.a_b), ot.from_w.leq(&t.a_r)))
}

/// `(C(A ⊕ LC)*B = CA*B, C(A ⊕ LC)*LCA*R = CA*R)`.
pub fn verify_output_equality(
    sys: &SystemMatrices,
    l: &SeriesMatrix,
) -> Result<(bool, bool), MatrixError> {
    let t = sys.transfer()?;
    let ot = transfer_with(sys, &t, l)?;
    outputs_equal(sys, &t, &ot)
}

/// `(precondition, slopes_equal)` for the gain `l`.
pub fn check_prop3(
    sys: &SystemMatrices,
    l: &SeriesMatrix,
    blocks: &BlockStructure,
) -> Result<(bool, bool), MatrixError> {
    let t = sys.transfer()?;
    let ot = transfer_with(sys, &t, l)?;
    prop3(sys, &t, &ot, blocks)
}

/// `((A*B̄) ∘/ (CA*B̄)) ⊗ CA*B̄ = A*B̄`.
pub fn check_prop4(sys: &SystemMatrices) -> Result<bool, MatrixError> {
    prop4(&sys.transfer()?)
}
