//! Data-parallel isotropic subspace search over independent echelon
//! branches.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nonjordan_core::heisenberg::SymplecticForm;
use nonjordan_core::isotropic::{self, CommonIsotropic, SearchStats, Subspace};
use nonjordan_core::{Error, Result};
use num_traits::ToPrimitive;
use rayon::prelude::*;

type Branch = (SearchStats, Option<Subspace>);

/// Parallel version of [`isotropic::find_common_isotropic`].
///
/// The witness is the one from the first branch (in branch order) that has
/// any, and the statistics cover exactly the branches up to that one, so
/// the result does not depend on scheduling.
pub fn find_common_isotropic(forms: &[SymplecticForm], k: usize, budget: u64) -> Result<CommonIsotropic> {
    let first = forms.first().ok_or_else(|| Error::InvalidParameter("no forms given".into()))?;
    let (p, d) = (first.p(), first.dim());
    if k == 0 || k > d {
        return isotropic::find_common_isotropic(forms, k, budget);
    }
    let count = isotropic::gaussian_binomial(d, k, p);
    let candidates = match count.to_u64() {
        Some(c) if c <= budget => c,
        _ => return Err(Error::BudgetExceeded { what: "subspace count", needed: count.to_string(), budget }),
    };

    let branches = isotropic::branches(p, d, k);
    let best = AtomicUsize::new(usize::MAX);
    let results: Mutex<Vec<Option<Branch>>> = Mutex::new(vec![None; branches.len()]);
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    branches.par_iter().enumerate().for_each(|(i, b)| {
        if i > best.load(Ordering::Relaxed) {
            return;
        }
        let mut witness = None;
        match isotropic::search_branch(forms, k, b, &mut |s| {
            witness = Some(s.clone());
            ControlFlow::Break(())
        }) {
            Ok((stats, _)) => {
                if witness.is_some() {
                    best.fetch_min(i, Ordering::Relaxed);
                }
                results.lock().unwrap()[i] = Some((stats, witness));
            }
            Err(e) => *failure.lock().unwrap() = Some(e),
        }
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }

    let mut stats = SearchStats::default();
    let mut witness = None;
    for slot in results.into_inner().unwrap() {
        // Every branch up to the first witness ran to completion.
        let (s, w) = slot.expect("branch before the first witness was skipped");
        stats = stats.merge(s);
        if w.is_some() {
            witness = w;
            break;
        }
    }
    Ok(CommonIsotropic { witness, stats, candidates })
}
