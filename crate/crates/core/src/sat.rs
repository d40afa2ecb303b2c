//! CNF formulas: DIMACS I/O, a brute-force oracle, pure-literal elimination
//! and the conversion to (3,3)-SAT.

use std::fmt;

use thiserror::Error;

/// A literal over 1-based variable ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: usize,
    positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        assert!(var >= 1, "variables are 1-based");
        Literal { var, positive }
    }

    pub fn pos(var: usize) -> Self {
        Literal::new(var, true)
    }

    pub fn neg(var: usize) -> Self {
        Literal::new(var, false)
    }

    /// From a non-zero DIMACS integer.
    pub fn from_dimacs(x: i64) -> Self {
        Literal::new(x.unsigned_abs() as usize, x > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn var(self) -> usize {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negated(self) -> Self {
        Literal::new(self.var, !self.positive)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("literal {literal} exceeds declared variable count {declared}")]
    VariableOutOfRange { literal: i64, declared: usize },
    #[error("{0} variables exceed the brute-force cap of {1}")]
    TooManyVariables(usize, usize),
    #[error("clause {clause} has {width} literals; at most 3 allowed")]
    ClauseTooWide { clause: usize, width: usize },
}

/// A CNF formula. An empty clause makes the formula unsatisfiable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(variable_count: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, SatError> {
        for l in clauses.iter().flatten() {
            if l.var() > variable_count {
                return Err(SatError::VariableOutOfRange {
                    literal: l.to_dimacs(),
                    declared: variable_count,
                });
            }
        }
        Ok(CnfFormula {
            variable_count,
            clauses,
        })
    }

    /// From DIMACS-style integer clauses.
    pub fn from_ints(variable_count: usize, clauses: &[&[i64]]) -> Result<Self, SatError> {
        let clauses = clauses
            .iter()
            .map(|c| c.iter().map(|&x| Literal::from_dimacs(x)).collect())
            .collect();
        CnfFormula::new(variable_count, clauses)
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Vec::is_empty)
    }

    /// Number of occurrences of each variable, split by polarity:
    /// `(positive, negative)`, indexed by variable id.
    pub fn occurrence_counts(&self) -> Vec<(usize, usize)> {
        let mut counts = vec![(0, 0); self.variable_count + 1];
        for l in self.clauses.iter().flatten() {
            if l.is_positive() {
                counts[l.var()].0 += 1;
            } else {
                counts[l.var()].1 += 1;
            }
        }
        counts
    }
}

/// Total assignment over variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn all(n: usize, value: bool) -> Self {
        Assignment {
            values: vec![value; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, var: usize) -> bool {
        self.values[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.values[var - 1] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn satisfies_literal(&self, l: Literal) -> bool {
        self.get(l.var()) == l.is_positive()
    }

    pub fn satisfies(&self, cnf: &CnfFormula) -> bool {
        self.values.len() >= cnf.variable_count()
            && cnf
                .clauses()
                .iter()
                .all(|c| c.iter().any(|&l| self.satisfies_literal(l)))
    }

    /// Restriction to the first `n` variables.
    pub fn truncated(&self, n: usize) -> Assignment {
        Assignment::new(self.values[..n.min(self.values.len())].to_vec())
    }
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, SatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let syntax = |msg: &str| SatError::Syntax {
                line: line_no,
                msg: msg.to_string(),
            };
            if header.is_some() {
                return Err(syntax("duplicate header"));
            }
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(syntax("expected `p cnf <vars> <clauses>`"));
            }
            let vars = parts[2].parse().map_err(|_| syntax("bad variable count"))?;
            let count = parts[3].parse().map_err(|_| syntax("bad clause count"))?;
            header = Some((vars, count));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(SatError::Syntax {
                line: line_no,
                msg: "clause before `p cnf` header".into(),
            });
        };
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| SatError::Syntax {
                line: line_no,
                msg: format!("bad literal `{tok}`"),
            })?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if x.unsigned_abs() as usize > vars {
                    return Err(SatError::VariableOutOfRange {
                        literal: x,
                        declared: vars,
                    });
                }
                current.push(Literal::from_dimacs(x));
            }
        }
    }
    let Some((vars, count)) = header else {
        return Err(SatError::Syntax {
            line: 0,
            msg: "missing `p cnf` header".into(),
        });
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != count {
        return Err(SatError::Syntax {
            line: 0,
            msg: format!("header declares {count} clauses, found {}", clauses.len()),
        });
    }
    CnfFormula::new(vars, clauses)
}

pub fn render_dimacs(cnf: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.variable_count(), cnf.clauses().len());
    for c in cnf.clauses() {
        for l in c {
            out.push_str(&l.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

pub const BRUTE_FORCE_CAP: usize = 24;

/// First satisfying assignment in binary counting order (variable 1 is the
/// least significant bit, `false` before `true`).
pub fn brute_force_sat(cnf: &CnfFormula) -> Result<Option<Assignment>, SatError> {
    let n = cnf.variable_count();
    if n > BRUTE_FORCE_CAP {
        return Err(SatError::TooManyVariables(n, BRUTE_FORCE_CAP));
    }
    // Clauses as (positive mask, negative mask) over bit var-1.
    let masks: Vec<(u32, u32)> = cnf
        .clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(p, q), l| {
                let b = 1u32 << (l.var() - 1);
                if l.is_positive() {
                    (p | b, q)
                } else {
                    (p, q | b)
                }
            })
        })
        .collect();
    for bits in 0u32..(1u32 << n) {
        if masks.iter().all(|&(p, q)| bits & p != 0 || !bits & q != 0) {
            return Ok(Some(Assignment::new(
                (0..n).map(|v| bits >> v & 1 == 1).collect(),
            )));
        }
    }
    Ok(None)
}

/// Partially assigned variables, indexed by variable id.
pub type PartialAssignment = Vec<Option<bool>>;

/// Repeatedly assigns variables occurring with a single polarity and drops
/// the clauses they satisfy. The variable count is unchanged; eliminated
/// variables simply no longer occur.
pub fn eliminate_pure_literals(cnf: &CnfFormula) -> (CnfFormula, PartialAssignment) {
    let mut clauses = cnf.clauses().to_vec();
    let mut forced: PartialAssignment = vec![None; cnf.variable_count() + 1];
    loop {
        let current = CnfFormula {
            variable_count: cnf.variable_count(),
            clauses,
        };
        let counts = current.occurrence_counts();
        let mut pure: Vec<Option<bool>> = vec![None; counts.len()];
        let mut any = false;
        for (v, &(p, q)) in counts.iter().enumerate().skip(1) {
            if p > 0 && q == 0 {
                pure[v] = Some(true);
            } else if q > 0 && p == 0 {
                pure[v] = Some(false);
            }
            if let Some(value) = pure[v] {
                forced[v] = Some(value);
                any = true;
            }
        }
        clauses = current.clauses;
        if !any {
            break;
        }
        clauses.retain(|c| !c.iter().any(|l| pure[l.var()] == Some(l.is_positive())));
    }
    (
        CnfFormula {
            variable_count: cnf.variable_count(),
            clauses,
        },
        forced,
    )
}

/// Maps each variable of a converted formula to the input variable it
/// stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Renaming {
    origin: Vec<usize>,
}

impl Renaming {
    /// Input variable behind the converted variable `var`.
    pub fn origin(&self, var: usize) -> usize {
        self.origin[var - 1]
    }

    pub fn len(&self) -> usize {
        self.origin.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origin.is_empty()
    }

    /// Converted variables standing for input variable `original`, in
    /// occurrence order.
    pub fn copies(&self, original: usize) -> impl Iterator<Item = usize> + '_ {
        self.origin
            .iter()
            .enumerate()
            .filter(move |(_, &o)| o == original)
            .map(|(i, _)| i + 1)
    }

    /// Lifts an assignment of the input formula to the converted one.
    pub fn lift(&self, a: &Assignment) -> Assignment {
        Assignment::new(self.origin.iter().map(|&o| a.get(o)).collect())
    }

    /// Projects an assignment of the converted formula to the input one,
    /// taking each input variable from its first copy.
    pub fn project(&self, a: &Assignment, input_vars: usize) -> Assignment {
        let mut out = Assignment::all(input_vars, false);
        for v in 1..=input_vars {
            if let Some(first) = self.copies(v).next() {
                out.set(v, a.get(first));
            }
        }
        out
    }
}

/// Splits every variable with more than three occurrences into one copy per
/// occurrence (clause order, then literal order) linked by the implication
/// cycle `v1 -> v2 -> ... -> vk -> v1`. Variables with at most three
/// occurrences keep a single copy.
pub fn to_33sat(cnf: &CnfFormula) -> Result<(CnfFormula, Renaming), SatError> {
    if let Some((clause, c)) = cnf.clauses().iter().enumerate().find(|(_, c)| c.len() > 3) {
        return Err(SatError::ClauseTooWide {
            clause: clause + 1,
            width: c.len(),
        });
    }
    let counts = cnf.occurrence_counts();
    let mut origin = Vec::new();
    // first new id for each input variable
    let mut base = vec![0usize; cnf.variable_count() + 1];
    for v in 1..=cnf.variable_count() {
        let k = counts[v].0 + counts[v].1;
        base[v] = origin.len() + 1;
        let copies = if k > 3 { k } else { 1 };
        origin.extend(std::iter::repeat_n(v, copies));
    }
    let mut seen = vec![0usize; cnf.variable_count() + 1];
    let mut clauses: Vec<Vec<Literal>> = cnf
        .clauses()
        .iter()
        .map(|c| {
            c.iter()
                .map(|&l| {
                    let v = l.var();
                    let k = counts[v].0 + counts[v].1;
                    let id = if k > 3 { base[v] + seen[v] } else { base[v] };
                    seen[v] += 1;
                    Literal::new(id, l.is_positive())
                })
                .collect()
        })
        .collect();
    for v in 1..=cnf.variable_count() {
        let k = counts[v].0 + counts[v].1;
        if k > 3 {
            for j in 0..k {
                let from = base[v] + j;
                let to = base[v] + (j + 1) % k;
                clauses.push(vec![Literal::neg(from), Literal::pos(to)]);
            }
        }
    }
    Ok((
        CnfFormula {
            variable_count: origin.len(),
            clauses,
        },
        Renaming { origin },
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation33 {
    ClauseTooWide { clause: usize, width: usize },
    TooManyOccurrences { var: usize, count: usize },
    PolarityOverflow { var: usize, positive: bool, count: usize },
}

impl fmt::Display for Violation33 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation33::ClauseTooWide { clause, width } => {
                write!(f, "clause {clause} has {width} literals")
            }
            Violation33::TooManyOccurrences { var, count } => {
                write!(f, "variable {var} occurs {count} times")
            }
            Violation33::PolarityOverflow {
                var,
                positive,
                count,
            } => write!(
                f,
                "variable {var} occurs {} {count} times",
                if *positive { "positively" } else { "negatively" }
            ),
        }
    }
}

/// Checks the shape consumed by the SAT gadget: clauses of width at most 3,
/// at most 3 occurrences per variable, at most 2 per polarity.
pub fn validate_33(cnf: &CnfFormula) -> Vec<Violation33> {
    let mut out = Vec::new();
    for (i, c) in cnf.clauses().iter().enumerate() {
        if c.len() > 3 {
            out.push(Violation33::ClauseTooWide {
                clause: i + 1,
                width: c.len(),
            });
        }
    }
    for (v, &(p, q)) in cnf.occurrence_counts().iter().enumerate().skip(1) {
        if p + q > 3 {
            out.push(Violation33::TooManyOccurrences {
                var: v,
                count: p + q,
            });
        }
        for (positive, count) in [(true, p), (false, q)] {
            if count > 2 {
                out.push(Violation33::PolarityOverflow {
                    var: v,
                    positive,
                    count,
                });
            }
        }
    }
    out
}

/// Output of [`normalize`]: a gadget-ready formula plus what is needed to
/// map its models back to the input formula.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub formula: CnfFormula,
    pub renaming: Renaming,
    /// Values fixed by pure-literal elimination, over the converted variables.
    pub forced: PartialAssignment,
    pub input_vars: usize,
}

impl Normalized {
    /// Completes a model of `formula` with the forced values and projects it
    /// onto the input variables.
    pub fn project(&self, a: &Assignment) -> Assignment {
        let mut full = a.clone();
        for (v, value) in self.forced.iter().enumerate().skip(1) {
            if let Some(value) = value {
                full.set(v, *value);
            }
        }
        self.renaming.project(&full, self.input_vars)
    }

    /// Maps a model of the input formula to a model of `formula`.
    pub fn lift(&self, a: &Assignment) -> Assignment {
        self.renaming.lift(a)
    }
}

/// `to_33sat` followed by pure-literal elimination.
pub fn normalize(cnf: &CnfFormula) -> Result<Normalized, SatError> {
    let (converted, renaming) = to_33sat(cnf)?;
    let (formula, forced) = eliminate_pure_literals(&converted);
    Ok(Normalized {
        formula,
        renaming,
        forced,
        input_vars: cnf.variable_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: usize, clauses: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_ints(n, clauses).unwrap()
    }

    #[test]
    fn parse_examples() {
        let f = parse_dimacs("p cnf 1 1\n1 0\n").unwrap();
        assert_eq!(f, cnf(1, &[&[1]]));
        let f = parse_dimacs("c comment\np cnf 2 2\n1 -2 0\n2 0\n").unwrap();
        assert_eq!(f.clauses().len(), 2);
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(SatError::VariableOutOfRange {
                literal: 3,
                declared: 2
            })
        );
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 x 0\n"),
            Err(SatError::Syntax { line: 2, .. })
        ));
        assert!(parse_dimacs("1 0\n").is_err());
        // clauses may span lines
        let f = parse_dimacs("p cnf 3 1\n1 2\n3 0\n").unwrap();
        assert_eq!(f.clauses()[0].len(), 3);
    }

    #[test]
    fn render_round_trip() {
        let f = cnf(3, &[&[1, -2], &[3], &[-1, -3, 2]]);
        assert_eq!(parse_dimacs(&render_dimacs(&f)).unwrap(), f);
    }

    #[test]
    fn brute_force_examples() {
        let a = brute_force_sat(&cnf(1, &[&[1]])).unwrap().unwrap();
        assert!(a.get(1));
        assert_eq!(brute_force_sat(&cnf(1, &[&[1], &[-1]])).unwrap(), None);

        // (v1 or v2) and (not v1 or v2): the four assignments are
        // FF no, TF no, FT yes, TT yes; every model has v2 = true.
        let f = cnf(2, &[&[1, 2], &[-1, 2]]);
        let a = brute_force_sat(&f).unwrap().unwrap();
        assert!(a.get(2));
        assert_eq!(a, Assignment::new(vec![false, true]));

        assert_eq!(brute_force_sat(&cnf(1, &[&[]])).unwrap(), None);
        assert!(matches!(
            brute_force_sat(&cnf(25, &[])),
            Err(SatError::TooManyVariables(25, 24))
        ));
    }

    #[test]
    fn pure_literal_examples() {
        let (f, forced) = eliminate_pure_literals(&cnf(2, &[&[1, 2], &[1, -2]]));
        assert!(f.clauses().is_empty());
        assert_eq!(forced[1], Some(true));

        let g = cnf(2, &[&[1, 2], &[-1, -2]]);
        let (f, forced) = eliminate_pure_literals(&g);
        assert_eq!(f, g);
        assert!(forced.iter().all(Option::is_none));

        let (f, forced) = eliminate_pure_literals(&cnf(1, &[&[-1]]));
        assert!(f.clauses().is_empty());
        assert_eq!(forced[1], Some(false));
    }

    #[test]
    fn pure_literal_cascade() {
        // Removing (1 v 2) via pure 1 leaves 2 pure negative.
        let (f, forced) = eliminate_pure_literals(&cnf(3, &[&[1, 2], &[-2, 3], &[-2, -3]]));
        assert!(f.clauses().is_empty());
        assert_eq!(forced[1], Some(true));
        assert_eq!(forced[2], Some(false));
    }

    #[test]
    fn implication_cycle_for_four_occurrences() {
        let f = cnf(1, &[&[1], &[1], &[-1], &[1]]);
        let (g, ren) = to_33sat(&f).unwrap();
        assert_eq!(g.variable_count(), 4);
        assert_eq!(
            g.clauses(),
            &[
                vec![Literal::pos(1)],
                vec![Literal::pos(2)],
                vec![Literal::neg(3)],
                vec![Literal::pos(4)],
                vec![Literal::neg(1), Literal::pos(2)],
                vec![Literal::neg(2), Literal::pos(3)],
                vec![Literal::neg(3), Literal::pos(4)],
                vec![Literal::neg(4), Literal::pos(1)],
            ]
        );
        assert!((1..=4).all(|v| ren.origin(v) == 1));
    }

    #[test]
    fn already_33_is_unchanged() {
        let f = cnf(3, &[&[1, 2, 3], &[-1, -2], &[2, -3]]);
        let (g, ren) = to_33sat(&f).unwrap();
        assert_eq!(g, f);
        assert_eq!(ren.len(), 3);
    }

    #[test]
    fn wide_clause_rejected() {
        assert_eq!(
            to_33sat(&cnf(4, &[&[1, 2, 3, 4]])),
            Err(SatError::ClauseTooWide {
                clause: 1,
                width: 4
            })
        );
    }

    #[test]
    fn validate_33_examples() {
        assert!(validate_33(&cnf(3, &[&[1, 2, 3]])).is_empty());
        let v = validate_33(&cnf(1, &[&[1], &[1], &[-1], &[-1]]));
        assert_eq!(v, vec![Violation33::TooManyOccurrences { var: 1, count: 4 }]);
        let v = validate_33(&cnf(2, &[&[1], &[1, 2], &[1, -2]]));
        assert_eq!(
            v,
            vec![Violation33::PolarityOverflow {
                var: 1,
                positive: true,
                count: 3
            }]
        );
    }

    #[test]
    fn normalization_output_is_gadget_ready() {
        let f = cnf(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2], &[1, 2, 2]]);
        let norm = normalize(&f).unwrap();
        assert!(validate_33(&norm.formula).is_empty());
        assert_eq!(
            brute_force_sat(&f).unwrap().is_some(),
            brute_force_sat(&norm.formula).unwrap().is_some()
        );
    }

    #[test]
    fn size_bounds_on_full_occurrence() {
        // every variable occurs; 3m vars and 4m clauses bounds
        let f = cnf(2, &[&[1, 2, -1], &[1, -2, 2], &[-1, 2]]);
        let (g, _) = to_33sat(&f).unwrap();
        let m = f.clauses().len();
        assert!(g.variable_count() <= 3 * m);
        assert!(g.clauses().len() <= 4 * m);
    }
}
