//! Reversible building blocks: XOR oracles and register reorderings.

use std::sync::Arc;

use crate::bits::mask;
use crate::qsim::{BasisPermutation, QsimError, RegisterLayout};

/// `target ^= f(inputs)` on `layout`; every other register passes through.
pub fn xor_oracle(
    layout: &RegisterLayout,
    inputs: &[&str],
    target: &str,
    f: impl Fn(&[u64]) -> u64 + Send + Sync + 'static,
) -> Result<BasisPermutation, QsimError> {
    let fields = inputs
        .iter()
        .map(|n| layout.field(n))
        .collect::<Result<Vec<_>, _>>()?;
    if inputs.contains(&target) {
        return Err(QsimError::LayoutMismatch(format!(
            "register `{target}` cannot be both input and target"
        )));
    }
    let (shift, width) = layout.field(target)?;
    BasisPermutation::from_fn(layout.clone(), layout.clone(), move |i| {
        let mut args = [0u64; 4];
        for (slot, (s, w)) in args.iter_mut().zip(&fields) {
            *slot = (i >> s) & mask(*w);
        }
        i ^ ((f(&args[..fields.len()]) & mask(width)) << shift)
    })
}

/// Moves registers into `order` without touching their contents.
///
/// The output layout lists the same registers in the new order; this is a
/// pure index relabeling, which is how wire swaps are realized.
pub fn reorder(layout: &RegisterLayout, order: &[&str]) -> Result<BasisPermutation, QsimError> {
    if order.len() != layout.registers().len() {
        return Err(QsimError::LayoutMismatch(format!(
            "reorder {layout:?} into {order:?}"
        )));
    }
    let out = RegisterLayout::new(
        order
            .iter()
            .map(|n| layout.width_of(n).map(|w| (n.to_string(), w)))
            .collect::<Result<Vec<_>, _>>()?,
    )?;
    let moves: Arc<[(u32, u32, u32)]> = order
        .iter()
        .map(|n| {
            let (from, w) = layout.field(n).expect("checked above");
            let (to, _) = out.field(n).expect("same names");
            (from, to, w)
        })
        .collect();
    BasisPermutation::from_fn(layout.clone(), out, move |i| {
        moves.iter().fold(0, |acc, &(from, to, w)| {
            acc | (((i >> from) & mask(w)) << to)
        })
    })
}

/// Same bits, new register names and boundaries.
pub fn relabel(from: &RegisterLayout, to: &RegisterLayout) -> Result<BasisPermutation, QsimError> {
    BasisPermutation::identity(from.clone()).with_output_layout(to.clone())
}

/// Composes a chain left to right.
pub fn chain(steps: Vec<BasisPermutation>) -> Result<BasisPermutation, QsimError> {
    let mut it = steps.into_iter();
    let first = it
        .next()
        .ok_or_else(|| QsimError::LayoutMismatch("empty circuit".into()))?;
    it.try_fold(first, |acc, p| acc.then(&p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reorder_swaps_fields() {
        let l = RegisterLayout::new([("a", 1), ("b", 3)]).unwrap();
        let p = reorder(&l, &["b", "a"]).unwrap();
        // a=1, b=011 → b=011, a=1
        assert_eq!(p.map(0b1011), 0b0111);
        p.verify_bijective().unwrap();
    }

    #[test]
    fn xor_oracle_is_an_involution() {
        let l = RegisterLayout::new([("x", 3), ("y", 2)]).unwrap();
        let p = xor_oracle(&l, &["x"], "y", |a| a[0] * 3 + 1).unwrap();
        let pp = p.then(&p).unwrap();
        for i in 0..32 {
            assert_eq!(pp.map(i), i);
        }
    }
}
