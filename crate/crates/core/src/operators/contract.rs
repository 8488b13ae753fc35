use rand::Rng;
use serde::Serialize;

use super::{reg, OperatorError, OracleOperator, PRECHECK_CAP};
use crate::qsim::TABLE_CAP;
use crate::rng::stream;
use crate::schemes::SchemeRef;

/// Width up to which involution checks are exhaustive; beyond it they sample.
const INVOLUTION_EXHAUSTIVE_CAP: u32 = 20;
const SAMPLES: u32 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractViolation {
    pub check: String,
    pub r: Option<u64>,
    pub m: Option<u64>,
    pub index: u64,
    pub expected: u64,
    pub got: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum CheckOutcome {
    /// Every index was checked.
    Exhaustive { checked: u64 },
    /// A seeded sample of indices was checked.
    Sampled { checked: u64 },
}

/// `op ∘ op = id`.
pub fn check_involution(op: &OracleOperator) -> Result<CheckOutcome, ContractViolation> {
    let p = op.perm();
    let width = p.width();
    let check = |i: u64| {
        let back = p.map(p.map(i));
        if back == i {
            Ok(())
        } else {
            Err(ContractViolation {
                check: "involution".into(),
                r: None,
                m: None,
                index: i,
                expected: i,
                got: back,
            })
        }
    };
    if width <= INVOLUTION_EXHAUSTIVE_CAP {
        (0..1u64 << width).try_for_each(check)?;
        Ok(CheckOutcome::Exhaustive {
            checked: 1 << width,
        })
    } else {
        let mut rng = stream(width as u64, 0x696e76);
        (0..SAMPLES).try_for_each(|_| check(rng.gen::<u64>() >> (64 - width)))?;
        Ok(CheckOutcome::Sampled {
            checked: SAMPLES as u64,
        })
    }
}

/// Bijectivity on basis indices: exhaustive up to the table cap, otherwise
/// block by block over the randomness register, which every operator preserves.
pub fn check_bijective(op: &OracleOperator) -> Result<CheckOutcome, ContractViolation> {
    let violation = |e: crate::qsim::QsimError, r: Option<u64>| match e {
        crate::qsim::QsimError::NotABijection {
            first,
            second,
            image,
        } => ContractViolation {
            check: "bijective".into(),
            r,
            m: None,
            index: second,
            expected: first,
            got: image,
        },
        other => ContractViolation {
            check: format!("bijective: {other}"),
            r,
            m: None,
            index: 0,
            expected: 0,
            got: 0,
        },
    };
    let p = op.perm();
    if p.width() <= TABLE_CAP {
        p.verify_bijective().map_err(|e| violation(e, None))?;
        return Ok(CheckOutcome::Exhaustive {
            checked: 1 << p.width(),
        });
    }
    let r_bits = op.widths().r_bits;
    if r_bits == 0 || !p.input().contains(reg::R) || p.width() - r_bits > TABLE_CAP + 4 {
        return Err(ContractViolation {
            check: format!("bijective: width {} beyond exhaustive reach", p.width()),
            r: None,
            m: None,
            index: 0,
            expected: 0,
            got: 0,
        });
    }
    for r in 0..1u64 << r_bits {
        let block = p.restrict(reg::R, r).map_err(|e| violation(e, Some(r)))?;
        block
            .verify_bijective()
            .map_err(|e| violation(e, Some(r)))?;
    }
    Ok(CheckOutcome::Exhaustive {
        checked: 1 << p.width(),
    })
}

/// `op |r, m, 0…0⟩ = |r, Enc_pk(m; r), 0…0⟩` for every `(r, m)`.
pub fn check_type2_contract(
    op: &OracleOperator,
    scheme: &SchemeRef,
    pk: u64,
) -> Result<CheckOutcome, ContractViolation> {
    let w = op.widths();
    if w.r_bits + w.m_bits > PRECHECK_CAP {
        return Err(ContractViolation {
            check: format!(
                "type-2 contract: {}",
                OperatorError::WidthOverflow {
                    width: w.r_bits + w.m_bits,
                    cap: PRECHECK_CAP
                }
            ),
            r: None,
            m: None,
            index: 0,
            expected: 0,
            got: 0,
        });
    }
    for r in 0..1u64 << w.r_bits {
        for m in 0..1u64 << w.m_bits {
            let index = op.type2_input_index(r, m);
            let expected = op.type2_output_index(r, scheme.enc(pk, m, r));
            let got = op.perm().map(index);
            if got != expected {
                return Err(ContractViolation {
                    check: "type-2 contract".into(),
                    r: Some(r),
                    m: Some(m),
                    index,
                    expected,
                    got,
                });
            }
        }
    }
    Ok(CheckOutcome::Exhaustive {
        checked: 1 << (w.r_bits + w.m_bits),
    })
}
