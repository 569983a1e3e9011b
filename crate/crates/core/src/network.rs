//! Discrete Bayesian networks for the crisis-definition step.
//!
//! A [`CrisisNetwork`] is validated once at construction and is immutable
//! afterwards. [`CrisisNetwork::posterior_query`] runs exact variable
//! elimination; [`Dag::d_separated`] answers structural independence queries
//! with the Bayes-ball reachability procedure.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

const ROW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("variable `{0}` is defined twice")]
    DuplicateVariable(String),
    #[error("variable `{0}` has no outcomes")]
    EmptyOutcomes(String),
    #[error("variable `{variable}` repeats outcome `{outcome}`")]
    DuplicateOutcome { variable: String, outcome: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{variable}` has no outcome `{outcome}`")]
    UnknownOutcome { variable: String, outcome: String },
    #[error("edge set contains a cycle through {0:?}")]
    CycleDetected(Vec<String>),
    #[error("`{child}` lists parent `{parent}` that is not one of its in-edges or not a variable")]
    DanglingParent { child: String, parent: String },
    #[error("table for `{child}` omits in-edge parent `{parent}`")]
    MissingParent { child: String, parent: String },
    #[error("variable `{0}` has no conditional table")]
    MissingTable(String),
    #[error("variable `{0}` has more than one conditional table")]
    DuplicateTable(String),
    #[error("table for `{variable}` has no row for parent assignment {row:?}")]
    MissingRow { variable: String, row: Vec<String> },
    #[error("table for `{variable}` repeats row {row:?}")]
    DuplicateRow { variable: String, row: Vec<String> },
    #[error("row {row:?} of `{variable}` sums to {sum}, not 1")]
    UnnormalizedRow { variable: String, row: Vec<String>, sum: f64 },
    #[error("row {row:?} of `{variable}` has {found} entries, expected {expected}")]
    RowLength { variable: String, row: Vec<String>, found: usize, expected: usize },
    #[error("row {row:?} of `{variable}` has an entry outside [0, 1]")]
    InvalidProbability { variable: String, row: Vec<String> },
    #[error("deterministic variable `{variable}` has a non-degenerate row {row:?}")]
    NotDeterministic { variable: String, row: Vec<String> },
    #[error("evidence has probability zero under the network")]
    ZeroProbabilityEvidence,
    #[error("query must name at least one variable")]
    EmptyQuery,
}

impl NetworkError {
    pub fn code(&self) -> &'static str {
        match self {
            NetworkError::DuplicateVariable(_) => "DuplicateVariable",
            NetworkError::EmptyOutcomes(_) => "EmptyOutcomes",
            NetworkError::DuplicateOutcome { .. } => "DuplicateOutcome",
            NetworkError::UnknownVariable(_) => "UnknownVariable",
            NetworkError::UnknownOutcome { .. } => "UnknownOutcome",
            NetworkError::CycleDetected(_) => "CycleDetected",
            NetworkError::DanglingParent { .. } => "DanglingParent",
            NetworkError::MissingParent { .. } => "MissingParent",
            NetworkError::MissingTable(_) => "MissingTable",
            NetworkError::DuplicateTable(_) => "DuplicateTable",
            NetworkError::MissingRow { .. } => "MissingRow",
            NetworkError::DuplicateRow { .. } => "DuplicateRow",
            NetworkError::UnnormalizedRow { .. } => "UnnormalizedRow",
            NetworkError::RowLength { .. } => "RowLength",
            NetworkError::InvalidProbability { .. } => "InvalidProbability",
            NetworkError::NotDeterministic { .. } => "NotDeterministic",
            NetworkError::ZeroProbabilityEvidence => "ZeroProbabilityEvidence",
            NetworkError::EmptyQuery => "EmptyQuery",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    #[default]
    Chance,
    Deterministic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteVariable {
    pub name: String,
    pub outcomes: Vec<String>,
    #[serde(default)]
    pub kind: VariableKind,
}

impl DiscreteVariable {
    pub fn chance(name: &str, outcomes: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            outcomes: outcomes.iter().map(|s| s.to_string()).collect(),
            kind: VariableKind::Chance,
        }
    }

    pub fn deterministic(name: &str, outcomes: &[&str]) -> Self {
        Self { kind: VariableKind::Deterministic, ..Self::chance(name, outcomes) }
    }
}

/// One row of a conditional table: parent outcomes in table-parent order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub given: Vec<String>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalTable {
    pub child: String,
    pub parents: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl ConditionalTable {
    pub fn prior(child: &str, probs: &[f64]) -> Self {
        Self {
            child: child.to_string(),
            parents: Vec::new(),
            rows: vec![TableRow { given: Vec::new(), probs: probs.to_vec() }],
        }
    }

    pub fn new(child: &str, parents: &[&str], rows: Vec<(Vec<&str>, Vec<f64>)>) -> Self {
        Self {
            child: child.to_string(),
            parents: parents.iter().map(|s| s.to_string()).collect(),
            rows: rows
                .into_iter()
                .map(|(g, p)| TableRow { given: g.into_iter().map(String::from).collect(), probs: p })
                .collect(),
        }
    }
}

/// Observed outcomes keyed by variable name.
pub type Evidence = BTreeMap<String, String>;

/// Structure-only directed acyclic graph.
#[derive(Debug, Clone)]
pub struct Dag {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a DAG; fails on unknown endpoints or cycles.
    pub fn new(names: &[String], edges: &[(String, String)]) -> Result<Self, NetworkError> {
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(NetworkError::DuplicateVariable(n.clone()));
            }
        }
        let mut parents = vec![Vec::new(); names.len()];
        let mut children = vec![Vec::new(); names.len()];
        for (p, c) in edges {
            let ci = *index.get(c).ok_or_else(|| NetworkError::UnknownVariable(c.clone()))?;
            let pi = *index
                .get(p)
                .ok_or_else(|| NetworkError::DanglingParent { child: c.clone(), parent: p.clone() })?;
            if !parents[ci].contains(&pi) {
                parents[ci].push(pi);
                children[pi].push(ci);
            }
        }
        let dag = Self { names: names.to_vec(), index, parents, children };
        dag.topological_order()?;
        Ok(dag)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn topological_order(&self) -> Result<Vec<usize>, NetworkError> {
        let n = self.names.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &c in &self.children[u] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if order.len() < n {
            let mut stuck: Vec<String> =
                (0..n).filter(|&i| indeg[i] > 0).map(|i| self.names[i].clone()).collect();
            stuck.sort();
            return Err(NetworkError::CycleDetected(stuck));
        }
        Ok(order)
    }

    fn lookup(&self, name: &str) -> Result<usize, NetworkError> {
        self.index_of(name).ok_or_else(|| NetworkError::UnknownVariable(name.to_string()))
    }

    /// True iff every trail between `x` and `y` is blocked by `given`.
    pub fn d_separated(&self, x: &str, y: &str, given: &[&str]) -> Result<bool, NetworkError> {
        let xi = self.lookup(x)?;
        let yi = self.lookup(y)?;
        let mut z = vec![false; self.len()];
        for g in given {
            z[self.lookup(g)?] = true;
        }
        if z[xi] || z[yi] {
            return Ok(true);
        }
        if xi == yi {
            return Ok(false);
        }
        Ok(!self.reachable(xi, &z)[yi])
    }

    // Nodes reachable from `x` along active trails given the observed mask.
    fn reachable(&self, x: usize, z: &[bool]) -> Vec<bool> {
        let n = self.len();
        // ancestors of the conditioning set, including the set itself
        let mut anc = z.to_vec();
        let mut stack: Vec<usize> = (0..n).filter(|&i| z[i]).collect();
        while let Some(u) = stack.pop() {
            for &p in &self.parents[u] {
                if !anc[p] {
                    anc[p] = true;
                    stack.push(p);
                }
            }
        }
        // direction flag: true = arrived from a child (moving up)
        let mut visited = vec![[false; 2]; n];
        let mut reach = vec![false; n];
        let mut queue = VecDeque::from([(x, true)]);
        while let Some((v, up)) = queue.pop_front() {
            if visited[v][up as usize] {
                continue;
            }
            visited[v][up as usize] = true;
            if !z[v] {
                reach[v] = true;
            }
            if up && !z[v] {
                for &p in &self.parents[v] {
                    queue.push_back((p, true));
                }
                for &c in &self.children[v] {
                    queue.push_back((c, false));
                }
            } else if !up {
                if !z[v] {
                    for &c in &self.children[v] {
                        queue.push_back((c, false));
                    }
                }
                if anc[v] {
                    for &p in &self.parents[v] {
                        queue.push_back((p, true));
                    }
                }
            }
        }
        reach
    }
}

/// A validated discrete Bayesian network.
#[derive(Debug, Clone)]
pub struct CrisisNetwork {
    variables: Vec<DiscreteVariable>,
    dag: Dag,
    tables: Vec<ConditionalTable>,
    // per variable: parent indices in table order and dense CPT (parent-major, child fastest)
    table_parents: Vec<Vec<usize>>,
    cpts: Vec<Vec<f64>>,
}

/// Builds and validates a network.
pub fn build_network(
    variables: Vec<DiscreteVariable>,
    edges: Vec<(String, String)>,
    tables: Vec<ConditionalTable>,
) -> Result<CrisisNetwork, NetworkError> {
    for v in &variables {
        if v.outcomes.is_empty() {
            return Err(NetworkError::EmptyOutcomes(v.name.clone()));
        }
        let mut seen = BTreeSet::new();
        for o in &v.outcomes {
            if !seen.insert(o) {
                return Err(NetworkError::DuplicateOutcome { variable: v.name.clone(), outcome: o.clone() });
            }
        }
    }
    let names: Vec<String> = variables.iter().map(|v| v.name.clone()).collect();
    let dag = Dag::new(&names, &edges)?;

    let mut by_child: Vec<Option<usize>> = vec![None; variables.len()];
    for (ti, t) in tables.iter().enumerate() {
        let c = dag.lookup(&t.child)?;
        if by_child[c].replace(ti).is_some() {
            return Err(NetworkError::DuplicateTable(t.child.clone()));
        }
    }

    let mut table_parents = Vec::with_capacity(variables.len());
    let mut cpts = Vec::with_capacity(variables.len());
    let mut ordered_tables = Vec::with_capacity(variables.len());
    for (vi, var) in variables.iter().enumerate() {
        let ti = by_child[vi].ok_or_else(|| NetworkError::MissingTable(var.name.clone()))?;
        let table = &tables[ti];
        let mut tp = Vec::with_capacity(table.parents.len());
        for p in &table.parents {
            let pi = dag.index_of(p).filter(|pi| dag.parents[vi].contains(pi)).ok_or_else(|| {
                NetworkError::DanglingParent { child: var.name.clone(), parent: p.clone() }
            })?;
            if tp.contains(&pi) {
                return Err(NetworkError::DanglingParent { child: var.name.clone(), parent: p.clone() });
            }
            tp.push(pi);
        }
        for &pi in &dag.parents[vi] {
            if !tp.contains(&pi) {
                return Err(NetworkError::MissingParent { child: var.name.clone(), parent: names[pi].clone() });
            }
        }
        cpts.push(compile_table(&variables, vi, &tp, table)?);
        table_parents.push(tp);
        ordered_tables.push(table.clone());
    }
    Ok(CrisisNetwork { variables, dag, tables: ordered_tables, table_parents, cpts })
}

fn compile_table(
    variables: &[DiscreteVariable],
    vi: usize,
    parents: &[usize],
    table: &ConditionalTable,
) -> Result<Vec<f64>, NetworkError> {
    let var = &variables[vi];
    let k = var.outcomes.len();
    let n_rows: usize = parents.iter().map(|&p| variables[p].outcomes.len()).product();
    let mut cpt = vec![f64::NAN; n_rows * k];
    let mut filled = vec![false; n_rows];
    for row in &table.rows {
        if row.given.len() != parents.len() {
            return Err(NetworkError::RowLength {
                variable: var.name.clone(),
                row: row.given.clone(),
                found: row.given.len(),
                expected: parents.len(),
            });
        }
        let mut a = 0;
        for (&p, label) in parents.iter().zip(&row.given) {
            let pv = &variables[p];
            let o = pv.outcomes.iter().position(|x| x == label).ok_or_else(|| NetworkError::UnknownOutcome {
                variable: pv.name.clone(),
                outcome: label.clone(),
            })?;
            a = a * pv.outcomes.len() + o;
        }
        if filled[a] {
            return Err(NetworkError::DuplicateRow { variable: var.name.clone(), row: row.given.clone() });
        }
        if row.probs.len() != k {
            return Err(NetworkError::RowLength {
                variable: var.name.clone(),
                row: row.given.clone(),
                found: row.probs.len(),
                expected: k,
            });
        }
        if row.probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(NetworkError::InvalidProbability { variable: var.name.clone(), row: row.given.clone() });
        }
        let sum: f64 = row.probs.iter().sum();
        if (sum - 1.0).abs() > ROW_TOLERANCE {
            return Err(NetworkError::UnnormalizedRow { variable: var.name.clone(), row: row.given.clone(), sum });
        }
        if var.kind == VariableKind::Deterministic && row.probs.iter().filter(|&&p| p == 1.0).count() != 1 {
            return Err(NetworkError::NotDeterministic { variable: var.name.clone(), row: row.given.clone() });
        }
        cpt[a * k..(a + 1) * k].copy_from_slice(&row.probs);
        filled[a] = true;
    }
    if let Some(a) = filled.iter().position(|f| !f) {
        let mut labels = Vec::with_capacity(parents.len());
        let mut rem = a;
        for &p in parents.iter().rev() {
            let c = variables[p].outcomes.len();
            labels.push(variables[p].outcomes[rem % c].clone());
            rem /= c;
        }
        labels.reverse();
        return Err(NetworkError::MissingRow { variable: var.name.clone(), row: labels });
    }
    Ok(cpt)
}

/// A normalized joint distribution over a list of variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub variables: Vec<String>,
    pub outcomes: Vec<Vec<String>>,
    /// Row-major, last variable fastest.
    pub probs: Vec<f64>,
}

impl JointDistribution {
    /// Probability of one assignment, given as outcome labels in variable order.
    pub fn prob(&self, labels: &[&str]) -> Option<f64> {
        if labels.len() != self.variables.len() {
            return None;
        }
        let mut a = 0;
        for (outs, l) in self.outcomes.iter().zip(labels) {
            a = a * outs.len() + outs.iter().position(|o| o == l)?;
        }
        Some(self.probs[a])
    }
}

#[derive(Debug, Clone)]
struct Factor {
    vars: Vec<usize>, // ascending
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.vars.len()];
        for i in (0..self.vars.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.cards[i + 1];
        }
        s
    }

    fn product(&self, other: &Factor) -> Factor {
        let mut vars: Vec<usize> = self.vars.iter().chain(&other.vars).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        let cards: Vec<usize> = vars
            .iter()
            .map(|v| {
                self.vars
                    .iter()
                    .position(|x| x == v)
                    .map(|i| self.cards[i])
                    .unwrap_or_else(|| other.cards[other.vars.iter().position(|x| x == v).unwrap()])
            })
            .collect();
        let (sa, sb) = (self.strides(), other.strides());
        let map_a: Vec<usize> =
            vars.iter().map(|v| self.vars.iter().position(|x| x == v).map_or(0, |i| sa[i])).collect();
        let map_b: Vec<usize> =
            vars.iter().map(|v| other.vars.iter().position(|x| x == v).map_or(0, |i| sb[i])).collect();
        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut assign = vec![0usize; vars.len()];
        for _ in 0..size {
            let ia: usize = assign.iter().zip(&map_a).map(|(a, s)| a * s).sum();
            let ib: usize = assign.iter().zip(&map_b).map(|(a, s)| a * s).sum();
            values.push(self.values[ia] * other.values[ib]);
            for d in (0..vars.len()).rev() {
                assign[d] += 1;
                if assign[d] < cards[d] {
                    break;
                }
                assign[d] = 0;
            }
        }
        Factor { vars, cards, values }
    }

    fn sum_out(&self, var: usize) -> Factor {
        let pos = self.vars.iter().position(|&v| v == var).expect("variable in scope");
        let strides = self.strides();
        let (stride, card) = (strides[pos], self.cards[pos]);
        let outer = self.values.len() / (stride * card);
        let mut values = Vec::with_capacity(outer * stride);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * stride * card + i;
                values.push((0..card).map(|c| self.values[base + c * stride]).sum());
            }
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        Factor { vars, cards, values }
    }
}

impl CrisisNetwork {
    pub fn variables(&self) -> &[DiscreteVariable] {
        &self.variables
    }

    pub fn tables(&self) -> &[ConditionalTable] {
        &self.tables
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn variable(&self, name: &str) -> Option<&DiscreteVariable> {
        self.dag.index_of(name).map(|i| &self.variables[i])
    }

    /// Structural independence of `x` and `y` given `given`.
    pub fn d_separated(&self, x: &str, y: &str, given: &[&str]) -> Result<bool, NetworkError> {
        self.dag.d_separated(x, y, given)
    }

    fn check_evidence(&self, evidence: &Evidence) -> Result<Vec<(usize, usize)>, NetworkError> {
        evidence
            .iter()
            .map(|(name, label)| {
                let vi = self.dag.lookup(name)?;
                let o = self.variables[vi].outcomes.iter().position(|x| x == label).ok_or_else(|| {
                    NetworkError::UnknownOutcome { variable: name.clone(), outcome: label.clone() }
                })?;
                Ok((vi, o))
            })
            .collect()
    }

    fn factor_of(&self, vi: usize) -> Factor {
        let tp = &self.table_parents[vi];
        let mut scope: Vec<usize> = tp.clone();
        scope.push(vi);
        let cards_in: Vec<usize> = scope.iter().map(|&v| self.variables[v].outcomes.len()).collect();
        let mut order: Vec<usize> = (0..scope.len()).collect();
        order.sort_by_key(|&i| scope[i]);
        let vars: Vec<usize> = order.iter().map(|&i| scope[i]).collect();
        let cards: Vec<usize> = order.iter().map(|&i| cards_in[i]).collect();
        let out = Factor { vars, cards, values: Vec::new() };
        let strides = out.strides();
        // stride in the sorted layout for each position of the table layout
        let table_stride: Vec<usize> =
            (0..scope.len()).map(|i| strides[order.iter().position(|&o| o == i).unwrap()]).collect();
        let mut values = vec![0.0; self.cpts[vi].len()];
        let mut assign = vec![0usize; scope.len()];
        for &p in &self.cpts[vi] {
            let idx: usize = assign.iter().zip(&table_stride).map(|(a, s)| a * s).sum();
            values[idx] = p;
            for d in (0..scope.len()).rev() {
                assign[d] += 1;
                if assign[d] < cards_in[d] {
                    break;
                }
                assign[d] = 0;
            }
        }
        Factor { values, ..out }
    }

    /// Exact posterior over `query` given `evidence`, by variable elimination
    /// (min-degree order, ties broken by variable name).
    pub fn posterior_query(&self, query: &[&str], evidence: &Evidence) -> Result<JointDistribution, NetworkError> {
        if query.is_empty() {
            return Err(NetworkError::EmptyQuery);
        }
        let q: Vec<usize> = query.iter().map(|n| self.dag.lookup(n)).collect::<Result<_, _>>()?;
        let ev = self.check_evidence(evidence)?;

        let mut factors: Vec<Factor> = (0..self.variables.len()).map(|v| self.factor_of(v)).collect();
        for &(v, o) in &ev {
            let card = self.variables[v].outcomes.len();
            let mut ind = vec![0.0; card];
            ind[o] = 1.0;
            factors.push(Factor { vars: vec![v], cards: vec![card], values: ind });
        }

        let mut hidden: BTreeSet<usize> = (0..self.variables.len()).filter(|v| !q.contains(v)).collect();
        while !hidden.is_empty() {
            let pick = *hidden
                .iter()
                .min_by(|&&a, &&b| {
                    self.degree(a, &factors)
                        .cmp(&self.degree(b, &factors))
                        .then_with(|| self.variables[a].name.cmp(&self.variables[b].name))
                })
                .unwrap();
            hidden.remove(&pick);
            let (with, without): (Vec<Factor>, Vec<Factor>) =
                factors.into_iter().partition(|f| f.vars.contains(&pick));
            factors = without;
            if let Some(first) = with.first() {
                let prod = with[1..].iter().fold(first.clone(), |acc, f| acc.product(f));
                factors.push(prod.sum_out(pick));
            }
        }
        let unit = Factor { vars: Vec::new(), cards: Vec::new(), values: vec![1.0] };
        let joint = factors.iter().fold(unit, |acc, f| acc.product(f));

        let total: f64 = joint.values.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(NetworkError::ZeroProbabilityEvidence);
        }
        // reorder from ascending-index layout to query order
        let mut uniq: Vec<usize> = Vec::new();
        for &v in &q {
            if !uniq.contains(&v) {
                uniq.push(v);
            }
        }
        let strides = joint.strides();
        let qcards: Vec<usize> = uniq.iter().map(|&v| self.variables[v].outcomes.len()).collect();
        let qstride: Vec<usize> =
            uniq.iter().map(|v| strides[joint.vars.iter().position(|x| x == v).unwrap()]).collect();
        let size: usize = qcards.iter().product();
        let mut probs = Vec::with_capacity(size);
        let mut assign = vec![0usize; uniq.len()];
        for _ in 0..size {
            let idx: usize = assign.iter().zip(&qstride).map(|(a, s)| a * s).sum();
            probs.push(joint.values[idx] / total);
            for d in (0..uniq.len()).rev() {
                assign[d] += 1;
                if assign[d] < qcards[d] {
                    break;
                }
                assign[d] = 0;
            }
        }
        Ok(JointDistribution {
            variables: uniq.iter().map(|&v| self.variables[v].name.clone()).collect(),
            outcomes: uniq.iter().map(|&v| self.variables[v].outcomes.clone()).collect(),
            probs,
        })
    }

    fn degree(&self, v: usize, factors: &[Factor]) -> usize {
        let mut nb = BTreeSet::new();
        for f in factors.iter().filter(|f| f.vars.contains(&v)) {
            nb.extend(f.vars.iter().copied().filter(|&x| x != v));
        }
        nb.len()
    }

    /// Dense CPT of variable `i` (parent-major, child fastest) with its parent indices.
    pub fn cpt(&self, i: usize) -> (&[usize], &[f64]) {
        (&self.table_parents[i], &self.cpts[i])
    }
}
