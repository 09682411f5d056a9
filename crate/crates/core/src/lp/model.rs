use std::fmt::{self, Write as _};

use crate::transform::DirectedInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub is_integer: bool,
    /// Branch-and-bound considers fractional variables of the highest priority first.
    pub priority: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub row: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear (mixed-integer) program, always minimized.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpModel {
    pub variables: Vec<Variable>,
    pub objective: Vec<(usize, f64)>,
    pub constraints: Vec<Constraint>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
            is_integer: false,
            priority: 0,
        });
        self.variables.len() - 1
    }

    pub fn add_integer(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        let j = self.add_variable(name, lower, upper);
        self.variables[j].is_integer = true;
        j
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        row: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> usize {
        self.constraints.push(Constraint { name: name.into(), row, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn num_integer(&self) -> usize {
        self.variables.iter().filter(|v| v.is_integer).count()
    }

    /// Copy with every integrality flag cleared; bounds are kept.
    pub fn relax(&self) -> LpModel {
        let mut m = self.clone();
        for v in &mut m.variables {
            v.is_integer = false;
        }
        m
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, c)| c * values[j]).sum()
    }

    pub fn activity(&self, row: usize, values: &[f64]) -> f64 {
        self.constraints[row].row.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Largest bound or row violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &x) in self.variables.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let a = self.activity(i, values);
            let viol = match c.relation {
                Relation::Le => a - c.rhs,
                Relation::Ge => c.rhs - a,
                Relation::Eq => (a - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    /// Structural problems: inverted bounds or rows naming unknown variables.
    pub fn check(&self) -> Result<(), String> {
        for v in &self.variables {
            if v.lower > v.upper {
                return Err(format!("variable {} has lower > upper", v.name));
            }
        }
        for c in &self.constraints {
            if let Some(&(j, _)) = c.row.iter().find(|&&(j, _)| j >= self.variables.len()) {
                return Err(format!("constraint {} references unknown variable {j}", c.name));
            }
        }
        if let Some(&(j, _)) = self.objective.iter().find(|&&(j, _)| j >= self.variables.len()) {
            return Err(format!("objective references unknown variable {j}"));
        }
        Ok(())
    }

    /// Fixed-column MPS text, for cross-checking with external solvers.
    pub fn to_mps(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME          {name}");
        out.push_str("ROWS\n N  COST\n");
        for c in &self.constraints {
            let t = match c.relation {
                Relation::Le => 'L',
                Relation::Eq => 'E',
                Relation::Ge => 'G',
            };
            let _ = writeln!(out, " {t}  {}", c.name);
        }
        let mut columns: Vec<Vec<(String, f64)>> = vec![Vec::new(); self.variables.len()];
        for &(j, c) in &self.objective {
            columns[j].push(("COST".into(), c));
        }
        for c in &self.constraints {
            for &(j, a) in &c.row {
                columns[j].push((c.name.clone(), a));
            }
        }
        out.push_str("COLUMNS\n");
        let mut in_int = false;
        for (j, v) in self.variables.iter().enumerate() {
            if v.is_integer != in_int {
                let marker = if v.is_integer { "'INTORG'" } else { "'INTEND'" };
                let _ = writeln!(out, "    MARKER                 'MARKER'                 {marker}");
                in_int = v.is_integer;
            }
            for (row, a) in &columns[j] {
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", v.name, row, a);
            }
        }
        if in_int {
            let _ = writeln!(out, "    MARKER                 'MARKER'                 'INTEND'");
        }
        out.push_str("RHS\n");
        for c in &self.constraints {
            if c.rhs != 0.0 {
                let _ = writeln!(out, "    RHS       {:<8}  {:>12}", c.name, c.rhs);
            }
        }
        out.push_str("BOUNDS\n");
        for v in &self.variables {
            match (v.lower.is_finite(), v.upper.is_finite()) {
                (true, true) if v.lower == v.upper => {
                    let _ = writeln!(out, " FX BND       {:<8}  {:>12}", v.name, v.lower);
                }
                (lo, hi) => {
                    if !lo {
                        let _ = writeln!(out, " MI BND       {}", v.name);
                    } else if v.lower != 0.0 {
                        let _ = writeln!(out, " LO BND       {:<8}  {:>12}", v.name, v.lower);
                    }
                    if hi {
                        let _ = writeln!(out, " UP BND       {:<8}  {:>12}", v.name, v.upper);
                    }
                }
            }
        }
        out.push_str("ENDATA\n");
        out
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// Variable indices of the all-colors integer program over a [`DirectedInstance`].
///
/// Layout: one `x` per arc, then one `y` per vertex `1..=n+1`, then one `f` per arc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IlpLayout {
    pub arcs: usize,
    pub n: usize,
}

impl IlpLayout {
    pub fn new(d: &DirectedInstance) -> Self {
        IlpLayout { arcs: d.arcs.len(), n: d.n }
    }

    pub fn x(&self, arc: usize) -> usize {
        arc
    }

    /// `v` in directed numbering, `1..=n+1`.
    pub fn y(&self, v: usize) -> usize {
        debug_assert!((1..=self.n + 1).contains(&v));
        self.arcs + v - 1
    }

    pub fn f(&self, arc: usize) -> usize {
        self.arcs + self.n + 1 + arc
    }

    pub fn num_variables(&self) -> usize {
        2 * self.arcs + self.n + 1
    }
}

/// Per-family constraint counts of [`build_ilp`], in row order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowCounts {
    pub source_arc: usize,
    pub colors: usize,
    pub balance: usize,
    pub visit_if_entered: usize,
    pub entered_if_visited: usize,
    pub flow: usize,
    pub flow_bounds: usize,
}

impl RowCounts {
    pub fn for_instance(d: &DirectedInstance) -> Self {
        RowCounts {
            source_arc: 1,
            colors: d.k + 1,
            balance: d.n,
            visit_if_entered: d.arcs.len(),
            entered_if_visited: d.n + 1,
            flow: d.n,
            flow_bounds: 2 * d.arcs.len(),
        }
    }

    pub fn total(&self) -> usize {
        self.source_arc
            + self.colors
            + self.balance
            + self.visit_if_entered
            + self.entered_if_visited
            + self.flow
            + self.flow_bounds
    }
}

/// The integer program whose optima are the optimal covering walks.
///
/// `x` marks traversed arcs, `y` visited vertices, and `f` carries one unit
/// of flow from the source to each visited vertex, which rules out pieces
/// disconnected from the base.
pub fn build_ilp(d: &DirectedInstance) -> LpModel {
    let lay = IlpLayout::new(d);
    let n = d.n;
    let flow_cap = (n + 1) as f64;
    let mut m = LpModel::new();

    for a in &d.arcs {
        let j = m.add_integer(format!("x{}_{}", a.from, a.to), 0.0, 1.0);
        m.variables[j].priority = 1;
    }
    for v in 1..=n + 1 {
        m.add_integer(format!("y{v}"), 0.0, 1.0);
    }
    for a in &d.arcs {
        m.add_integer(format!("f{}_{}", a.from, a.to), 0.0, flow_cap);
    }
    m.objective =
        d.arcs.iter().enumerate().filter(|(_, a)| a.w != 0.0).map(|(i, a)| (lay.x(i), a.w)).collect();

    let source_arc = d.arc_index(d.source(), d.base).expect("source arc exists");
    m.add_constraint("src", vec![(lay.x(source_arc), 1.0)], Relation::Eq, 1.0);

    for c in 0..=d.k {
        let row = d
            .arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| d.colors[a.to] == c)
            .map(|(i, _)| (lay.x(i), 1.0))
            .collect();
        m.add_constraint(format!("col{c}"), row, Relation::Ge, 1.0);
    }

    let mut incoming = vec![Vec::new(); d.vertex_count()];
    let mut outgoing = vec![Vec::new(); d.vertex_count()];
    for (i, a) in d.arcs.iter().enumerate() {
        incoming[a.to].push(i);
        outgoing[a.from].push(i);
    }

    for v in 1..=n {
        let mut row: Vec<(usize, f64)> = incoming[v].iter().map(|&i| (lay.x(i), 1.0)).collect();
        row.extend(outgoing[v].iter().map(|&i| (lay.x(i), -1.0)));
        m.add_constraint(format!("bal{v}"), row, Relation::Eq, 0.0);
    }

    for (i, a) in d.arcs.iter().enumerate() {
        m.add_constraint(
            format!("vis{}_{}", a.from, a.to),
            vec![(lay.y(a.to), 1.0), (lay.x(i), -1.0)],
            Relation::Ge,
            0.0,
        );
    }

    for v in 1..=n + 1 {
        let mut row: Vec<(usize, f64)> = incoming[v].iter().map(|&i| (lay.x(i), 1.0)).collect();
        row.push((lay.y(v), -1.0));
        m.add_constraint(format!("ent{v}"), row, Relation::Ge, 0.0);
    }

    for v in 1..=n {
        let mut row: Vec<(usize, f64)> = incoming[v].iter().map(|&i| (lay.f(i), 1.0)).collect();
        row.extend(outgoing[v].iter().map(|&i| (lay.f(i), -1.0)));
        row.push((lay.y(v), -1.0));
        m.add_constraint(format!("flow{v}"), row, Relation::Eq, 0.0);
    }

    for (i, a) in d.arcs.iter().enumerate() {
        m.add_constraint(
            format!("flo{}_{}", a.from, a.to),
            vec![(lay.x(i), 1.0), (lay.f(i), -1.0)],
            Relation::Le,
            0.0,
        );
        m.add_constraint(
            format!("fhi{}_{}", a.from, a.to),
            vec![(lay.f(i), 1.0), (lay.x(i), -flow_cap)],
            Relation::Le,
            0.0,
        );
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{single, star, triangle};
    use crate::transform::to_directed;

    fn counts(m: &LpModel, prefix: char) -> usize {
        m.variables.iter().filter(|v| v.name.starts_with(prefix)).count()
    }

    #[test]
    fn variable_counts() {
        let m = build_ilp(&to_directed(&single()));
        assert_eq!((counts(&m, 'x'), counts(&m, 'y'), counts(&m, 'f')), (2, 2, 2));
        let m = build_ilp(&to_directed(&triangle()));
        assert_eq!((counts(&m, 'x'), counts(&m, 'y'), counts(&m, 'f')), (10, 4, 10));
        assert!(m.variables.iter().filter(|v| v.name.starts_with('f')).all(|v| v.upper == 4.0));
        assert!(m.variables.iter().all(|v| v.is_integer && v.lower == 0.0));
    }

    #[test]
    fn constraint_counts() {
        let d = to_directed(&triangle());
        let m = build_ilp(&d);
        let rc = RowCounts::for_instance(&d);
        assert_eq!(rc, RowCounts {
            source_arc: 1,
            colors: 4,
            balance: 3,
            visit_if_entered: 10,
            entered_if_visited: 4,
            flow: 3,
            flow_bounds: 20,
        });
        assert_eq!(m.constraints.len(), rc.total());
        assert!(m.check().is_ok());
    }

    #[test]
    fn relax_clears_integrality_only() {
        let m = build_ilp(&to_directed(&star()));
        let r = m.relax();
        assert_eq!(r.variables.len(), m.variables.len());
        assert_eq!(r.constraints, m.constraints);
        assert_eq!(r.num_integer(), 0);
        assert_eq!(r.relax(), r);
        for (a, b) in m.variables.iter().zip(&r.variables) {
            assert_eq!((a.lower, a.upper), (b.lower, b.upper));
        }
    }

    #[test]
    fn mps_dump_lists_every_row_and_column() {
        let m = build_ilp(&to_directed(&single()));
        let mps = m.to_mps("single");
        assert!(mps.starts_with("NAME          single\nROWS\n N  COST\n"));
        assert!(mps.contains(" E  src"));
        assert!(mps.contains("'INTORG'"));
        assert!(mps.trim_end().ends_with("ENDATA"));
        for v in &m.variables {
            assert!(mps.contains(&v.name));
        }
    }
}
