//! Solver-agnostic integer linear models.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::structure::LineStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => lhs <= self.rhs + tol,
            Sense::Ge => lhs >= self.rhs - tol,
            Sense::Eq => (lhs - self.rhs).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub sense: ObjectiveSense,
    pub terms: Vec<(VarId, f64)>,
}

impl Objective {
    pub fn value(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }
}

/// Modelling symbol a variable stands for. Indices are 0-based; names use
/// 1-based indices (`x_3_1_2` is task 3, worker type 1, station 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// `v_s`: station opened.
    Open { station: usize },
    /// `x_ihs`: task executed by a worker type at a station.
    Assign { task: usize, worker: usize, station: usize },
    /// `y_hs`: worker type staffs a station.
    Staff { worker: usize, station: usize },
    /// `z_h`: number of workers of a type.
    Workforce { worker: usize },
    /// `beta_s`: station left without tasks.
    Emptied { station: usize },
    /// `alpha_s`: savings from dropping the station's worker.
    Savings { station: usize },
}

impl Symbol {
    pub fn name(&self) -> String {
        match *self {
            Symbol::Open { station } => format!("v_{}", station + 1),
            Symbol::Assign { task, worker, station } => format!("x_{}_{}_{}", task + 1, worker + 1, station + 1),
            Symbol::Staff { worker, station } => format!("y_{}_{}", worker + 1, station + 1),
            Symbol::Workforce { worker } => format!("z_{}", worker + 1),
            Symbol::Emptied { station } => format!("beta_{}", station + 1),
            Symbol::Savings { station } => format!("alpha_{}", station + 1),
        }
    }

    /// Inverse of [`Symbol::name`].
    pub fn parse(name: &str) -> Option<Self> {
        let (head, rest) = name.split_once('_')?;
        let idx: Vec<usize> = rest
            .split('_')
            .map(|p| p.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
            .collect::<Option<_>>()?;
        Some(match (head, idx.as_slice()) {
            ("v", &[s]) => Symbol::Open { station: s },
            ("x", &[i, h, s]) => Symbol::Assign { task: i, worker: h, station: s },
            ("y", &[h, s]) => Symbol::Staff { worker: h, station: s },
            ("z", &[h]) => Symbol::Workforce { worker: h },
            ("beta", &[s]) => Symbol::Emptied { station: s },
            ("alpha", &[s]) => Symbol::Savings { station: s },
            _ => return None,
        })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate constraint name `{0}`")]
    DuplicateConstraint(String),
    #[error("constraint `{0}` references an undeclared variable")]
    UnknownVariable(String),
    #[error("variable `{0}` has bounds outside its kind")]
    Bounds(String),
}

/// Variables, linear constraints and a linear objective, plus the symbol
/// map back to the line-balancing quantities.
#[derive(Debug, Clone)]
pub struct MilpModel {
    pub name: String,
    vars: Vec<Variable>,
    cons: Vec<Constraint>,
    objective: Objective,
    by_name: HashMap<String, VarId>,
    con_names: HashMap<String, usize>,
    symbols: HashMap<Symbol, VarId>,
    structure: Option<LineStructure>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>, sense: ObjectiveSense) -> Self {
        Self {
            name: name.into(),
            vars: Vec::new(),
            cons: Vec::new(),
            objective: Objective { sense, terms: Vec::new() },
            by_name: HashMap::new(),
            con_names: HashMap::new(),
            symbols: HashMap::new(),
            structure: None,
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, kind: VarKind) -> Result<VarId, ModelError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(ModelError::DuplicateVariable(name));
        }
        let bad = lower > upper
            || lower.is_nan()
            || upper.is_nan()
            || (kind == VarKind::Binary && (lower < 0.0 || upper > 1.0));
        if bad {
            return Err(ModelError::Bounds(name));
        }
        let id = VarId(self.vars.len());
        if let Some(sym) = Symbol::parse(&name) {
            self.symbols.insert(sym, id);
        }
        self.by_name.insert(name.clone(), id);
        self.vars.push(Variable { name, lower, upper, kind });
        Ok(id)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, ModelError> {
        self.add_var(name, 0.0, 1.0, VarKind::Binary)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<usize, ModelError> {
        let name = name.into();
        if self.con_names.contains_key(&name) {
            return Err(ModelError::DuplicateConstraint(name));
        }
        if terms.iter().any(|(v, _)| v.0 >= self.vars.len()) {
            return Err(ModelError::UnknownVariable(name));
        }
        self.con_names.insert(name.clone(), self.cons.len());
        self.cons.push(Constraint { name, terms, sense, rhs });
        Ok(self.cons.len() - 1)
    }

    pub fn set_objective(&mut self, sense: ObjectiveSense, terms: Vec<(VarId, f64)>) {
        self.objective = Objective { sense, terms };
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.cons
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn var_by_symbol(&self, symbol: Symbol) -> Option<VarId> {
        self.symbols.get(&symbol).copied()
    }

    pub fn symbol(&self, id: VarId) -> Option<Symbol> {
        Symbol::parse(&self.vars[id.0].name)
    }

    pub fn structure(&self) -> Option<&LineStructure> {
        self.structure.as_ref()
    }

    pub(crate) fn set_structure(&mut self, structure: LineStructure) {
        self.structure = Some(structure);
    }

    /// Drops the line structure hint, leaving a plain model.
    pub fn without_structure(mut self) -> Self {
        self.structure = None;
        self
    }

    /// `true` when variables, constraints and objective coincide (names,
    /// bounds, kinds, terms, senses, right-hand sides).
    pub fn same_program(&self, other: &MilpModel) -> bool {
        self.vars == other.vars && self.cons == other.cons && self.objective == other.objective
    }

    /// Checks bounds, integrality and every constraint.
    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.vars.len()
            && self.vars.iter().zip(values).all(|(v, &x)| {
                x >= v.lower - tol && x <= v.upper + tol && (!v.kind.is_integral() || (x - x.round()).abs() <= tol)
            })
            && self.cons.iter().all(|c| c.is_satisfied(values, tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_names_round_trip() {
        for sym in [
            Symbol::Open { station: 0 },
            Symbol::Assign { task: 12, worker: 2, station: 3 },
            Symbol::Staff { worker: 1, station: 9 },
            Symbol::Workforce { worker: 0 },
            Symbol::Emptied { station: 4 },
            Symbol::Savings { station: 4 },
        ] {
            assert_eq!(Symbol::parse(&sym.name()), Some(sym));
        }
        assert_eq!(Symbol::parse("x_0_1_1"), None);
        assert_eq!(Symbol::parse("obj"), None);
    }

    #[test]
    fn rejects_duplicates_and_bad_bounds() {
        let mut m = MilpModel::new("t", ObjectiveSense::Minimize);
        let x = m.add_binary("x").unwrap();
        assert_eq!(m.add_binary("x"), Err(ModelError::DuplicateVariable("x".into())));
        assert!(m.add_var("b", 0.0, 2.0, VarKind::Binary).is_err());
        m.add_constraint("c", vec![(x, 1.0)], Sense::Le, 1.0).unwrap();
        assert!(m.add_constraint("c", vec![(x, 1.0)], Sense::Le, 1.0).is_err());
        assert!(m.add_constraint("d", vec![(VarId(7), 1.0)], Sense::Le, 1.0).is_err());
    }
}
