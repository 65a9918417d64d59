use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::judge::{Conditions, Firings, KillVerdict};

/// Killed over viable. `None` when there is nothing to score.
pub fn mutation_score<F: Float>(killed: usize, viable: usize) -> Option<F> {
    if viable == 0 {
        return None;
    }
    Some(F::from(killed)? / F::from(viable)?)
}

pub fn score_of<F: Float>(verdicts: &[KillVerdict]) -> Option<F> {
    mutation_score(verdicts.iter().filter(|v| v.killed).count(), verdicts.len())
}

/// 95% normal-approximation half-width for a proportion `s` over `n` trials.
pub fn ci_half_width<F: Float>(s: F, n: usize) -> F {
    if n == 0 {
        return F::zero();
    }
    let z = F::from(1.96).expect("representable");
    z * (s * (F::one() - s) / F::from(n).expect("representable")).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint<F> {
    pub prefix: usize,
    pub score: F,
    pub ci: F,
}

/// Score at each prefix, judging only the first `p` steps.
pub fn score_curve<F: Float>(firings: &[Firings], prefixes: &[usize], conditions: Conditions) -> Vec<CurvePoint<F>> {
    prefixes
        .iter()
        .map(|&prefix| {
            let killed = firings.iter().filter(|f| f.within(prefix).verdict(conditions).killed).count();
            let score = mutation_score(killed, firings.len()).unwrap_or_else(F::zero);
            CurvePoint { prefix, score, ci: ci_half_width(score, firings.len()) }
        })
        .collect()
}
