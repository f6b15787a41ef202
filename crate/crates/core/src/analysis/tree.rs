use crate::qcore::Chance;

use super::AnalysisError;

/// Default cap on enumeration nodes.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// Environment variable overriding [`DEFAULT_NODE_BUDGET`].
pub const NODE_BUDGET_ENV: &str = "QSDC_NODE_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeBudget(pub usize);

impl Default for NodeBudget {
    fn default() -> Self {
        NodeBudget(DEFAULT_NODE_BUDGET)
    }
}

impl NodeBudget {
    /// Reads `QSDC_NODE_BUDGET`, falling back to the default when unset
    /// or unparseable.
    pub fn from_env() -> Self {
        std::env::var(NODE_BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(NodeBudget)
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone)]
pub struct Leaf<T> {
    pub prob: f64,
    /// Branch index taken at each chance node, root first.
    pub path: Vec<usize>,
    pub value: T,
}

/// Every execution path of a chance-driven process, with exact probabilities.
#[derive(Debug, Clone)]
pub struct EnumerationTree<T> {
    pub leaves: Vec<Leaf<T>>,
    /// Chance nodes plus leaves.
    pub nodes: usize,
}

impl<T> EnumerationTree<T> {
    pub fn total_prob(&self) -> f64 {
        self.leaves.iter().map(|l| l.prob).sum()
    }

    /// An empty sum is reported as `+0.0`.
    pub fn prob_where(&self, mut pred: impl FnMut(&T) -> bool) -> f64 {
        self.leaves.iter().filter(|l| pred(&l.value)).map(|l| l.prob).sum::<f64>() + 0.0
    }

    pub fn expectation(&self, mut f: impl FnMut(&T) -> f64) -> f64 {
        self.leaves.iter().map(|l| l.prob * f(&l.value)).sum::<f64>() + 0.0
    }

    pub fn max_depth(&self) -> usize {
        self.leaves.iter().map(|l| l.path.len()).max().unwrap_or(0)
    }
}

struct Step {
    choice: usize,
    weights: Vec<f64>,
}

/// Chance source that follows a fixed prefix, then takes the first
/// available branch, recording every node it passes.
struct Replay<'a> {
    prefix: &'a [usize],
    trail: Vec<Step>,
}

impl Chance for Replay<'_> {
    fn pick(&mut self, weights: &[f64]) -> usize {
        let pos = self.trail.len();
        let choice = match self.prefix.get(pos) {
            Some(&c) => c,
            None => weights
                .iter()
                .position(|&w| w > 0.0)
                .expect("pick called with no positive weight"),
        };
        assert!(weights[choice] > 0.0, "replayed process is not deterministic");
        self.trail.push(Step {
            choice,
            weights: weights.to_vec(),
        });
        choice
    }
}

/// Runs `process` once per execution path, depth first.
///
/// `process` must draw all randomness from the supplied [`Chance`] and be
/// otherwise deterministic; it is re-run from the root for every leaf.
pub fn enumerate<T, E>(
    budget: NodeBudget,
    mut process: impl FnMut(&mut dyn Chance) -> Result<T, E>,
) -> Result<EnumerationTree<T>, AnalysisError>
where
    AnalysisError: From<E>,
{
    let mut leaves = Vec::new();
    let mut nodes = 0usize;
    let mut prefix: Vec<usize> = Vec::new();
    let mut shared = 0usize;
    loop {
        let mut replay = Replay {
            prefix: &prefix,
            trail: Vec::new(),
        };
        let value = process(&mut replay)?;
        let trail = replay.trail;

        nodes += trail.len().saturating_sub(shared) + 1;
        if nodes > budget.0 {
            return Err(AnalysisError::BudgetExceeded { budget: budget.0 });
        }

        let prob = trail
            .iter()
            .map(|s| s.weights[s.choice] / s.weights.iter().sum::<f64>())
            .product();
        leaves.push(Leaf {
            prob,
            path: trail.iter().map(|s| s.choice).collect(),
            value,
        });

        let next = trail.iter().enumerate().rev().find_map(|(i, s)| {
            s.weights
                .iter()
                .enumerate()
                .skip(s.choice + 1)
                .find(|(_, &w)| w > 0.0)
                .map(|(j, _)| (i, j))
        });
        match next {
            Some((i, j)) => {
                prefix = trail[..i].iter().map(|s| s.choice).collect();
                prefix.push(j);
                shared = i;
            }
            None => break,
        }
    }
    Ok(EnumerationTree { leaves, nodes })
}
