use super::{BellKind, Chance, QcoreError, QubitId, SingleQubitOp, StateVector, DEFAULT_MAX_QUBITS};

/// Global quantum state kept as a product of independent factors.
///
/// Factors are merged only when a two-qubit operation or measurement spans
/// them, so many independent photon groups never blow up into one large
/// vector. Semantically this is the tensor product of all factors.
#[derive(Debug, Clone)]
pub struct Register {
    factors: Vec<StateVector>,
    max_qubits: usize,
}

impl Default for Register {
    fn default() -> Self {
        Self::new()
    }
}

impl Register {
    pub fn new() -> Self {
        Self::with_max_qubits(DEFAULT_MAX_QUBITS)
    }

    /// `max_qubits` bounds each factor, not the register as a whole.
    pub fn with_max_qubits(max_qubits: usize) -> Self {
        Register {
            factors: Vec::new(),
            max_qubits,
        }
    }

    pub fn insert(&mut self, state: StateVector) -> Result<(), QcoreError> {
        if let Some(q) = state.qubits().iter().find(|&&q| self.contains(q)) {
            return Err(QcoreError::DuplicateQubit(*q));
        }
        if state.len() > self.max_qubits {
            return Err(QcoreError::TooManyQubits {
                n: state.len(),
                max: self.max_qubits,
            });
        }
        if !state.is_empty() {
            self.factors.push(state);
        }
        Ok(())
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.factors.iter().any(|f| f.contains(q))
    }

    /// All live qubits, factor by factor.
    pub fn qubits(&self) -> Vec<QubitId> {
        self.factors.iter().flat_map(|f| f.qubits().iter().copied()).collect()
    }

    pub fn factors(&self) -> &[StateVector] {
        &self.factors
    }

    fn factor_of(&self, q: QubitId) -> Result<usize, QcoreError> {
        self.factors
            .iter()
            .position(|f| f.contains(q))
            .ok_or(QcoreError::UnknownQubit(q))
    }

    /// Ensures `a` and `b` live in the same factor and returns its index.
    fn join(&mut self, a: QubitId, b: QubitId) -> Result<usize, QcoreError> {
        if a == b {
            return Err(QcoreError::DuplicateQubit(a));
        }
        let fa = self.factor_of(a)?;
        let fb = self.factor_of(b)?;
        if fa == fb {
            return Ok(fa);
        }
        let merged = self.factors[fa].compose_with_limit(&self.factors[fb], self.max_qubits)?;
        let (lo, hi) = if fa < fb { (fa, fb) } else { (fb, fa) };
        self.factors.remove(hi);
        self.factors[lo] = merged;
        Ok(lo)
    }

    pub fn apply_single(&mut self, q: QubitId, op: &SingleQubitOp) -> Result<(), QcoreError> {
        let f = self.factor_of(q)?;
        self.factors[f] = self.factors[f].apply_single(q, op)?;
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: QubitId, target: QubitId) -> Result<(), QcoreError> {
        let f = self.join(control, target)?;
        self.factors[f] = self.factors[f].apply_cnot(control, target)?;
        Ok(())
    }

    /// Bell-measures `(a, b)`, letting `chance` pick the branch, and
    /// removes both qubits from the register.
    pub fn measure_bell(&mut self, a: QubitId, b: QubitId, chance: &mut dyn Chance) -> Result<BellKind, QcoreError> {
        let f = self.join(a, b)?;
        let branches = self.factors[f].bell_branches(a, b)?;
        let weights: Vec<f64> = branches.iter().map(|br| br.prob).collect();
        let chosen = branches
            .into_iter()
            .nth(chance.pick(&weights))
            .expect("pick returns an index into the branch list");
        if chosen.state.is_empty() {
            self.factors.remove(f);
        } else {
            self.factors[f] = chosen.state;
        }
        Ok(chosen.kind)
    }

    /// The full tensor product of every factor, in factor order.
    pub fn to_state(&self) -> Result<StateVector, QcoreError> {
        self.factors.iter().try_fold(StateVector::scalar(), |acc, f| acc.compose(f))
    }

    /// The factor holding `q`, as a standalone state.
    pub fn factor_containing(&self, q: QubitId) -> Option<&StateVector> {
        self.factors.iter().find(|f| f.contains(q))
    }
}
