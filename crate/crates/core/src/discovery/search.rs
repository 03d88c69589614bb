use rayon::prelude::*;

use super::{CandidateScore, DiscoveryConfig};
use crate::error::{Error, Result};
use crate::independence::{fast_distance_correlation, KbiConfig, KernelBasis, Measure};
use crate::scm::{CausalOrdering, DataMatrix};
use crate::slopes::residual;
use crate::stats::{median, spread};

/// A residual whose spread falls below this fraction of its target's spread
/// counts as constant.
const DEGENERATE_RATIO: f64 = 1e-12;

/// `T(x_j) = sum_i measure(x_j, r_i)`, where `r_i` is the residual of
/// `others[i]` regressed on `candidate` with the configured slope.
pub fn independence_statistic<T: AsRef<[f64]>>(
    candidate: &[f64],
    others: &[T],
    cfg: &DiscoveryConfig,
) -> Result<f64> {
    if others.is_empty() {
        return Err(Error::InvalidInput("need at least one other column".into()));
    }
    let kbi = cfg.kbi_for(candidate.len());
    let scorer = Scorer::new(candidate, cfg.measure, &kbi)?;
    let mut total = 0.0;
    for other in others {
        let r = peel(candidate, other.as_ref(), cfg)?;
        total += scorer.score(&r)?;
    }
    Ok(total)
}

fn peel(candidate: &[f64], target: &[f64], cfg: &DiscoveryConfig) -> Result<Vec<f64>> {
    let r = residual(candidate, target, cfg.slope)?;
    if spread(&r) <= DEGENERATE_RATIO * spread(target) {
        return Err(Error::ConstantInput);
    }
    Ok(r)
}

enum Scorer<'a> {
    Kernel { basis: KernelBasis, cfg: &'a KbiConfig },
    Distance { candidate: &'a [f64] },
}

impl<'a> Scorer<'a> {
    fn new(candidate: &'a [f64], measure: Measure, cfg: &'a KbiConfig) -> Result<Self> {
        Ok(match measure {
            Measure::Kbi => Self::Kernel {
                basis: KernelBasis::new(candidate, cfg)?,
                cfg,
            },
            Measure::DCorr => Self::Distance { candidate },
        })
    }

    fn score(&self, r: &[f64]) -> Result<f64> {
        match self {
            Self::Kernel { basis, cfg } => Ok(basis.mutual_information(&KernelBasis::new(r, cfg)?)),
            Self::Distance { candidate } => Ok(fast_distance_correlation(candidate, r)?.value),
        }
    }
}

struct Evaluation {
    t: f64,
    residuals: Vec<Vec<f64>>,
}

/// Statistic of working column `c` plus the residuals of all other working
/// columns on it. Errors name the offending original variable.
fn evaluate(
    working: &[Vec<f64>],
    vars: &[usize],
    c: usize,
    round: usize,
    cfg: &DiscoveryConfig,
    kbi: &KbiConfig,
) -> Result<Evaluation> {
    let degenerate = |variable: usize| move |e: Error| match e {
        Error::ConstantInput | Error::ConstantPredictor => Error::DegenerateData { round, variable },
        other => other,
    };
    let candidate = &working[c];
    let scorer = Scorer::new(candidate, cfg.measure, kbi).map_err(degenerate(vars[c]))?;
    let mut t = 0.0;
    let mut residuals = Vec::with_capacity(working.len() - 1);
    for (i, target) in working.iter().enumerate() {
        if i == c {
            continue;
        }
        let r = peel(candidate, target, cfg).map_err(degenerate(vars[i]))?;
        t += scorer.score(&r).map_err(degenerate(vars[i]))?;
        residuals.push(r);
    }
    Ok(Evaluation { t, residuals })
}

/// Finds the causal ordering by repeated exogenous-variable selection.
///
/// Returns the ordering and, per round, the statistic of every remaining
/// candidate. Candidates are scored in parallel on the current rayon pool;
/// the selection is a deterministic fold, so the output does not depend on
/// the number of workers.
pub fn estimate_causal_order(
    data: &DataMatrix,
    cfg: &DiscoveryConfig,
) -> Result<(CausalOrdering, Vec<Vec<CandidateScore>>)> {
    cfg.validate()?;
    let (n, p) = (data.n(), data.p());
    if n < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 observations, got {n}")));
    }
    if let Some(j) = (0..p).find(|&j| spread(data.column(j)) == 0.0) {
        return Err(Error::InvalidInput(format!("column {} is constant", data.name(j))));
    }
    let kbi = cfg.kbi_for(n);
    let mut vars: Vec<usize> = (0..p).collect();
    let mut working: Vec<Vec<f64>> = data.columns().to_vec();
    let mut order = Vec::with_capacity(p);
    let mut statistics = Vec::with_capacity(p.saturating_sub(1));

    while order.len() + 1 < p {
        let round = order.len() + 1;
        let evals: Vec<Evaluation> = (0..vars.len())
            .into_par_iter()
            .map(|c| evaluate(&working, &vars, c, round, cfg, &kbi))
            .collect::<Result<_>>()?;
        // vars stays sorted, so the first minimum has the lowest index
        let mut best = 0;
        for (c, e) in evals.iter().enumerate() {
            if e.t < evals[best].t {
                best = c;
            }
        }
        statistics.push(
            vars.iter()
                .zip(&evals)
                .map(|(&var, e)| CandidateScore { var, t: e.t })
                .collect(),
        );
        order.push(vars.remove(best));
        working = evals
            .into_iter()
            .nth(best)
            .expect("best is a valid index")
            .residuals
            .into_iter()
            .map(|mut r| {
                let m = median(&r);
                r.iter_mut().for_each(|v| *v -= m);
                r
            })
            .collect();
    }
    order.extend(vars);
    Ok((CausalOrdering::new(order)?, statistics))
}
