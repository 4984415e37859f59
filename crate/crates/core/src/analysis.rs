//! Exact analyses over machines: shortest paths for weight-minimality
//! certificates, stationary distributions, expected output density and the
//! asymptotic moments of output sums.
//!
//! Moments come from the dominant eigenvalue `λ(y, z)` of the transition
//! matrix marked by `y^(output sum) z^(input sum)`. Its derivatives at
//! `y = z = 1` follow by implicit differentiation of
//! `p(λ, y, z) = det(λI - A(y, z))`; the needed partial derivatives of `p`
//! are read off a second-order Taylor expansion of the determinant,
//! computed by elimination over truncated multivariate power series.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{FsmError, Result};
use crate::graph::{digraph, WeightedDigraph};
use crate::machine::{Machine, StateId, Transition};
use crate::symbol::{Symbol, Word};
use crate::Rational;

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

// ---------------------------------------------------------------------------
// Shortest paths

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestPaths {
    pub source: StateId,
    pub labels: Vec<String>,
    /// `None` for vertices unreachable from the source.
    pub distance: Vec<Option<Rational>>,
    /// Previous vertex on a shortest path.
    pub predecessor: Vec<Option<StateId>>,
}

impl ShortestPaths {
    pub fn distance_to(&self, v: StateId) -> Option<&Rational> {
        self.distance.get(v.0).and_then(Option::as_ref)
    }

    pub fn distance_by_label(&self, label: &str) -> Option<&Rational> {
        let v = self.labels.iter().position(|l| l == label)?;
        self.distance_to(StateId(v))
    }

    /// Vertices from the source to `v` along predecessors.
    pub fn path_to(&self, v: StateId) -> Option<Vec<StateId>> {
        self.distance_to(v)?;
        let mut path = vec![v];
        let mut cur = v;
        while cur != self.source {
            cur = self.predecessor[cur.0]?;
            path.push(cur);
            if path.len() > self.labels.len() {
                return None;
            }
        }
        path.reverse();
        Some(path)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.distance.iter().flatten().all(|d| !d.is_negative())
    }
}

impl fmt::Display for ShortestPaths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "source: {}", self.labels[self.source.0])?;
        for (k, d) in self.distance.iter().enumerate() {
            match d {
                Some(d) => writeln!(f, "{}: {}", self.labels[k], d)?,
                None => writeln!(f, "{}: unreachable", self.labels[k])?,
            }
        }
        Ok(())
    }
}

/// Bellman–Ford over exact rationals.
pub fn bellman_ford(g: &WeightedDigraph, source: StateId) -> Result<ShortestPaths> {
    let n = g.vertex_count();
    if source.0 >= n {
        return Err(FsmError::UnknownVertex(source.0.to_string()));
    }
    let mut distance: Vec<Option<Rational>> = vec![None; n];
    let mut predecessor: Vec<Option<StateId>> = vec![None; n];
    distance[source.0] = Some(Rational::zero());

    let relax = |distance: &mut Vec<Option<Rational>>, predecessor: &mut Vec<Option<StateId>>| {
        let mut changed = None;
        for e in &g.edges {
            let Some(du) = &distance[e.from.0] else { continue };
            let candidate = du + &e.weight;
            if distance[e.to.0].as_ref().is_none_or(|dv| candidate < *dv) {
                distance[e.to.0] = Some(candidate);
                predecessor[e.to.0] = Some(e.from);
                changed = Some(e.to);
            }
        }
        changed
    };

    for _ in 1..n.max(2) {
        if relax(&mut distance, &mut predecessor).is_none() {
            break;
        }
    }
    if let Some(v) = relax(&mut distance, &mut predecessor) {
        // Walking back n steps lands on the cycle.
        let mut cur = v;
        for _ in 0..n {
            cur = predecessor[cur.0].expect("relaxed vertices have predecessors");
        }
        let start = cur;
        let mut cycle = vec![g.labels[start.0].clone()];
        let mut p = predecessor[start.0].expect("on cycle");
        while p != start {
            cycle.push(g.labels[p.0].clone());
            p = predecessor[p.0].expect("on cycle");
        }
        cycle.push(g.labels[start.0].clone());
        cycle.reverse();
        return Err(FsmError::NegativeCycle(cycle));
    }
    Ok(ShortestPaths {
        source,
        labels: g.labels.clone(),
        distance,
        predecessor,
    })
}

/// Number of nonzero symbols; non-digit symbols count as nonzero.
pub fn word_weight(w: &Word) -> i64 {
    w.iter().filter(|s| **s != Symbol::Digit(0)).count() as i64
}

/// Weight of the input minus weight of the output of a transition.
pub fn in_minus_out(t: &Transition) -> Rational {
    int(word_weight(&t.input) - word_weight(&t.output))
}

pub fn zero_weight(_: &Transition) -> Rational {
    Rational::zero()
}

fn single_initial(t: &Machine) -> Result<StateId> {
    match t.initial_states().as_slice() {
        [i] => Ok(*i),
        other => Err(FsmError::InitialStateCount(other.len())),
    }
}

/// Shortest paths from the initial state; the flag holds iff every
/// distance is nonnegative, i.e. no input can be rewritten into an output
/// of larger weight along any path.
pub fn check_minimality<F>(t: &Machine, weight: F) -> Result<(bool, ShortestPaths)>
where
    F: FnMut(&Transition) -> Rational,
{
    let source = single_initial(t)?;
    let paths = bellman_ford(&digraph(t, weight), source)?;
    Ok((paths.all_nonnegative(), paths))
}

// ---------------------------------------------------------------------------
// Transition matrices

/// `n × n` matrix whose entries are Laurent polynomials in `y`, stored as
/// exponent → coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentMatrix {
    pub entries: Vec<Vec<BTreeMap<i64, Rational>>>,
}

impl ExponentMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, k: usize, l: usize) -> &BTreeMap<i64, Rational> {
        &self.entries[k][l]
    }

    /// Entries evaluated at `y = 1`.
    pub fn at_one(&self) -> Vec<Vec<Rational>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.values().fold(Rational::zero(), |acc, c| acc + c)).collect())
            .collect()
    }

    /// Entries of the derivative at `y = 1`.
    pub fn derivative_at_one(&self) -> Vec<Vec<Rational>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| e.iter().fold(Rational::zero(), |acc, (h, c)| acc + c * int(*h)))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row
                .iter()
                .map(|e| {
                    if e.is_empty() {
                        "0".to_string()
                    } else {
                        e.iter().map(|(h, c)| format!("{c}*y^{h}")).collect::<Vec<_>>().join(" + ")
                    }
                })
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

struct Step {
    from: usize,
    to: usize,
    output_sum: i64,
    input_sum: i64,
}

/// Transitions of a complete deterministic machine with their digit sums,
/// plus the probability `1/q` of each.
fn steps(t: &Machine) -> Result<(Vec<Step>, Rational)> {
    t.require_deterministic()?;
    if let Some((state, symbol)) = t.first_missing_transition() {
        return Err(FsmError::NotComplete {
            state: t.label(state).to_string(),
            symbol,
        });
    }
    let mut out = Vec::with_capacity(t.transitions().len());
    for tr in t.transitions() {
        out.push(Step {
            from: tr.from.0,
            to: tr.to.0,
            output_sum: tr.output.digit_sum().ok_or_else(|| FsmError::NonDigitOutput(tr.output.clone()))?,
            input_sum: tr.input.digit_sum().ok_or_else(|| FsmError::NonDigitOutput(tr.input.clone()))?,
        });
    }
    let q = Rational::new(1.into(), (t.input_alphabet().len() as i64).into());
    Ok((out, q))
}

/// Entry `(k, l)` accumulates `(1/q) y^h` for every transition `k → l`
/// writing digits with sum `h`.
pub fn exponent_adjacency_matrix(t: &Machine) -> Result<ExponentMatrix> {
    let (steps, p) = steps(t)?;
    let n = t.len();
    let mut entries = vec![vec![BTreeMap::new(); n]; n];
    for s in steps {
        let c: &mut Rational = entries[s.from][s.to].entry(s.output_sum).or_insert_with(Rational::zero);
        *c += &p;
    }
    for row in &mut entries {
        for e in row.iter_mut() {
            e.retain(|_, c: &mut Rational| !c.is_zero());
        }
    }
    Ok(ExponentMatrix { entries })
}

// ---------------------------------------------------------------------------
// Components

fn successors(m: &Machine) -> Vec<Vec<usize>> {
    let mut succ = vec![Vec::new(); m.len()];
    for t in m.transitions() {
        succ[t.from.0].push(t.to.0);
    }
    for s in &mut succ {
        s.sort_unstable();
        s.dedup();
    }
    succ
}

fn reachable(m: &Machine, succ: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; m.len()];
    let mut stack: Vec<usize> = m.initial_states().into_iter().map(|s| s.0).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(u) = stack.pop() {
        for &v in &succ[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Tarjan's algorithm restricted to the vertices in `keep`, iteratively.
fn tarjan(succ: &[Vec<usize>], keep: &[bool]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if !keep[root] || index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut next)) = work.last_mut() {
            if let Some(&v) = succ[u].get(*next) {
                *next += 1;
                if !keep[v] {
                    continue;
                }
                if index[v] == usize::MAX {
                    index[v] = counter;
                    low[v] = counter;
                    counter += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    work.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[u]);
                }
                if low[u] == index[u] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("component on stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == u {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    components
}

/// Strongly connected components of the part reachable from the initial
/// states that have no edge leaving them.
pub fn terminal_sccs(m: &Machine) -> Vec<Vec<StateId>> {
    let succ = successors(m);
    let keep = reachable(m, &succ);
    let comps = tarjan(&succ, &keep);
    let mut component_of = vec![usize::MAX; m.len()];
    for (c, comp) in comps.iter().enumerate() {
        for &v in comp {
            component_of[v] = c;
        }
    }
    let mut terminal: Vec<Vec<StateId>> = comps
        .iter()
        .enumerate()
        .filter(|(c, comp)| comp.iter().all(|&u| succ[u].iter().all(|&v| component_of[v] == *c)))
        .map(|(_, comp)| comp.iter().map(|&v| StateId(v)).collect())
        .collect();
    terminal.sort();
    terminal
}

/// The unique terminal component.
pub fn terminal_scc(m: &Machine) -> Result<Vec<StateId>> {
    let mut all = terminal_sccs(m);
    if all.len() == 1 {
        return Ok(all.pop().expect("one component"));
    }
    Err(FsmError::TerminalComponents(
        all.iter()
            .map(|c| c.iter().map(|&s| m.label(s).to_string()).collect())
            .collect(),
    ))
}

/// Gcd of the cycle lengths through the component; 0 if it has no cycle.
pub fn period(m: &Machine, scc: &[StateId]) -> u64 {
    let Some(&root) = scc.first() else { return 0 };
    let mut inside = vec![false; m.len()];
    for s in scc {
        inside[s.0] = true;
    }
    let succ = successors(m);
    let mut level = vec![i64::MIN; m.len()];
    level[root.0] = 0;
    let mut queue = std::collections::VecDeque::from([root.0]);
    let mut g: i64 = 0;
    while let Some(u) = queue.pop_front() {
        for &v in &succ[u] {
            if !inside[v] {
                continue;
            }
            if level[v] == i64::MIN {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    for s in scc {
        for &v in &succ[s.0] {
            if inside[v] {
                g = g.gcd(&(level[s.0] + 1 - level[v]));
            }
        }
    }
    g.unsigned_abs()
}

pub fn is_aperiodic(m: &Machine, scc: &[StateId]) -> bool {
    period(m, scc) == 1
}

// ---------------------------------------------------------------------------
// Linear algebra

/// Solves `a x = b` by exact elimination; `None` if singular.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            let pivot_row = a[col].clone();
            for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *x -= &factor * p;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Stationary probability vector supported on the terminal component.
pub fn stationary_distribution(t: &Machine) -> Result<Vec<Rational>> {
    let matrix = exponent_adjacency_matrix(t)?.at_one();
    let scc = terminal_scc(t)?;
    let m = scc.len();
    // Unknowns v_k for k in the component; equations v (P - I) = 0 with the
    // last one replaced by Σ v = 1.
    let mut a = vec![vec![Rational::zero(); m]; m];
    let mut b = vec![Rational::zero(); m];
    for (row, l) in scc.iter().enumerate().take(m - 1) {
        for (col, k) in scc.iter().enumerate() {
            a[row][col] = matrix[k.0][l.0].clone();
            if k == l {
                a[row][col] -= Rational::one();
            }
        }
    }
    a[m - 1] = vec![Rational::one(); m];
    b[m - 1] = Rational::one();
    let v = solve(a, b).ok_or(FsmError::DegenerateEigenvalue)?;
    let mut full = vec![Rational::zero(); t.len()];
    for (k, s) in scc.iter().enumerate() {
        full[s.0] = v[k].clone();
    }
    Ok(full)
}

/// Expected output digit sum per input letter in the long run.
pub fn expected_density(t: &Machine) -> Result<Rational> {
    let v = stationary_distribution(t)?;
    let (steps, p) = steps(t)?;
    Ok(steps
        .iter()
        .filter(|s| !v[s.from].is_zero())
        .fold(Rational::zero(), |acc, s| acc + &v[s.from] * &p * int(s.output_sum)))
}

// ---------------------------------------------------------------------------
// Moments

/// Monomials `a^i b^j c^k` of total degree at most 2.
const MONOMIALS: [(u8, u8, u8); 10] = [
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (2, 0, 0),
    (1, 1, 0),
    (1, 0, 1),
    (0, 2, 0),
    (0, 1, 1),
    (0, 0, 2),
];

fn monomial_index(e: (u8, u8, u8)) -> Option<usize> {
    MONOMIALS.iter().position(|&m| m == e)
}

/// Power series in three variables truncated after degree 2.
#[derive(Debug, Clone, PartialEq)]
struct Jet([Rational; 10]);

impl Jet {
    fn zero() -> Self {
        Jet(std::array::from_fn(|_| Rational::zero()))
    }

    fn constant(c: Rational) -> Self {
        let mut j = Jet::zero();
        j.0[0] = c;
        j
    }

    fn coef(&self, e: (u8, u8, u8)) -> &Rational {
        &self.0[monomial_index(e).expect("degree at most 2")]
    }

    fn is_unit(&self) -> bool {
        !self.0[0].is_zero()
    }

    fn add(&self, other: &Jet) -> Jet {
        Jet(std::array::from_fn(|i| &self.0[i] + &other.0[i]))
    }

    fn sub(&self, other: &Jet) -> Jet {
        Jet(std::array::from_fn(|i| &self.0[i] - &other.0[i]))
    }

    fn scale(&self, c: &Rational) -> Jet {
        Jet(std::array::from_fn(|i| &self.0[i] * c))
    }

    fn mul(&self, other: &Jet) -> Jet {
        let mut out = Jet::zero();
        for (i, x) in self.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.0.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let (a, b) = (MONOMIALS[i], MONOMIALS[j]);
                if let Some(k) = monomial_index((a.0 + b.0, a.1 + b.1, a.2 + b.2)) {
                    out.0[k] += x * y;
                }
            }
        }
        out
    }

    /// `1/u = (1/u₀)(1 - x + x²)` with `u = u₀(1 + x)`.
    fn recip(&self) -> Jet {
        let u0 = self.0[0].recip();
        let mut x = self.scale(&u0);
        x.0[0] = Rational::zero();
        let series = Jet::constant(Rational::one()).sub(&x).add(&x.mul(&x));
        series.scale(&u0)
    }

    /// `(1 + t)^h` for the variable with exponent vector `unit`.
    fn binomial(unit: (u8, u8, u8), h: i64) -> Jet {
        let mut j = Jet::constant(Rational::one());
        j.0[monomial_index(unit).expect("linear")] = int(h);
        let square = (unit.0 * 2, unit.1 * 2, unit.2 * 2);
        j.0[monomial_index(square).expect("quadratic")] = Rational::new((h * (h - 1)).into(), 2.into());
        j
    }
}

/// Determinant by elimination with full pivoting on units; the remaining
/// block with entries in the maximal ideal is expanded by cofactors.
fn jet_determinant(mut m: Vec<Vec<Jet>>) -> Jet {
    let n = m.len();
    let mut det = Jet::constant(Rational::one());
    let mut k = 0;
    while k < n {
        let pivot = (k..n).flat_map(|r| (k..n).map(move |c| (r, c))).find(|&(r, c)| m[r][c].is_unit());
        let Some((r, c)) = pivot else { break };
        if r != k {
            m.swap(r, k);
            det = det.scale(&int(-1));
        }
        if c != k {
            for row in m.iter_mut() {
                row.swap(c, k);
            }
            det = det.scale(&int(-1));
        }
        let inv = m[k][k].recip();
        det = det.mul(&m[k][k]);
        for r in k + 1..n {
            let factor = m[r][k].mul(&inv);
            if factor.0.iter().all(Zero::is_zero) {
                continue;
            }
            let pivot_row = m[k].clone();
            for (x, p) in m[r].iter_mut().zip(&pivot_row).skip(k) {
                *x = x.sub(&factor.mul(p));
            }
        }
        k += 1;
    }
    let rest: Vec<Vec<Jet>> = m[k..].iter().map(|row| row[k..].to_vec()).collect();
    det.mul(&cofactor_determinant(&rest))
}

fn cofactor_determinant(m: &[Vec<Jet>]) -> Jet {
    match m.len() {
        0 => Jet::constant(Rational::one()),
        1 => m[0][0].clone(),
        // Entries have no constant term, so products of three vanish.
        n if n > 2 => Jet::zero(),
        _ => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
    }
}

/// Growth constants of the output digit sum `S_k` over uniformly random
/// inputs of length `k`: `E S_k = e k + O(1)`, `Var S_k = v k + O(1)` and
/// `Cov(S_k, input sum) = c k + O(1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentsResult {
    pub expectation: Rational,
    pub variance: Rational,
    pub covariance: Rational,
}

impl fmt::Display for MomentsResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "expectation: {}", self.expectation)?;
        writeln!(f, "variance: {}", self.variance)?;
        writeln!(f, "covariance: {}", self.covariance)
    }
}

/// Requires a unique, aperiodic terminal component; transient states only
/// change the `O(1)` terms and are ignored.
pub fn asymptotic_moments(t: &Machine) -> Result<MomentsResult> {
    let (steps, p) = steps(t)?;
    let scc = terminal_scc(t)?;
    let per = period(t, &scc);
    if per != 1 {
        return Err(FsmError::Periodic(per));
    }
    let mut position = vec![usize::MAX; t.len()];
    for (k, s) in scc.iter().enumerate() {
        position[s.0] = k;
    }
    let m = scc.len();
    // λI - A(y, z) at λ = 1 + a, y = 1 + b, z = 1 + c.
    let mut matrix = vec![vec![Jet::zero(); m]; m];
    for (k, row) in matrix.iter_mut().enumerate() {
        row[k] = Jet::constant(Rational::one()).add(&{
            let mut a = Jet::zero();
            a.0[1] = Rational::one();
            a
        });
    }
    for s in &steps {
        let (k, l) = (position[s.from], position[s.to]);
        if k == usize::MAX {
            continue;
        }
        let term = Jet::binomial((0, 1, 0), s.output_sum)
            .mul(&Jet::binomial((0, 0, 1), s.input_sum))
            .scale(&p);
        matrix[k][l] = matrix[k][l].sub(&term);
    }
    let det = jet_determinant(matrix);
    debug_assert!(det.0[0].is_zero(), "1 is an eigenvalue of a stochastic matrix");
    let two = int(2);
    let p_l = det.coef((1, 0, 0)).clone();
    let p_y = det.coef((0, 1, 0)).clone();
    let p_z = det.coef((0, 0, 1)).clone();
    let p_ll = det.coef((2, 0, 0)) * &two;
    let p_ly = det.coef((1, 1, 0)).clone();
    let p_lz = det.coef((1, 0, 1)).clone();
    let p_yy = det.coef((0, 2, 0)) * &two;
    let p_yz = det.coef((0, 1, 1)).clone();
    if p_l.is_zero() {
        return Err(FsmError::DegenerateEigenvalue);
    }
    let e = -(&p_y / &p_l);
    let lambda_yy = -(&p_yy + &two * &p_ly * &e + &p_ll * &e * &e) / &p_l;
    let variance = &lambda_yy + &e - &e * &e;
    let lambda_z = -(&p_z / &p_l);
    let lambda_yz = -(&p_yz + &p_ly * &lambda_z + &p_lz * &e + &p_ll * &e * &lambda_z) / &p_l;
    let covariance = &lambda_yz - &e * &lambda_z;
    Ok(MomentsResult {
        expectation: e,
        variance,
        covariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{build_machine, MachineBuilder};
    use crate::transducer::{identity_transducer, weight_transducer};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn bits() -> Vec<Symbol> {
        vec![Symbol::Digit(0), Symbol::Digit(1)]
    }

    #[test]
    fn identity_moments() {
        let id = identity_transducer(&bits()).unwrap();
        assert_eq!(expected_density(&id).unwrap(), r(1, 2));
        let m = asymptotic_moments(&id).unwrap();
        assert_eq!((m.expectation, m.variance, m.covariance), (r(1, 2), r(1, 4), r(1, 4)));
        let a = exponent_adjacency_matrix(&id).unwrap();
        assert_eq!(a.entry(0, 0), &BTreeMap::from([(0, r(1, 2)), (1, r(1, 2))]));
    }

    #[test]
    fn weight_matrix_over_signed_digits() {
        let w = weight_transducer(&[-1, 0, 1].map(Symbol::Digit)).unwrap();
        let a = exponent_adjacency_matrix(&w).unwrap();
        assert_eq!(a.entry(0, 0), &BTreeMap::from([(0, r(1, 3)), (1, r(2, 3))]));
        // Output weight is independent of the input sum.
        assert_eq!(asymptotic_moments(&w).unwrap().covariance, r(0, 1));
        assert_eq!(asymptotic_moments(&w).unwrap().variance, r(2, 9));
    }

    #[test]
    fn constant_output_has_no_variance() {
        let m = MachineBuilder::transducer(bits())
            .transition("a", "a", Word::digits(&[0]), Word::digits(&[1]))
            .transition("a", "a", Word::digits(&[1]), Word::digits(&[1]))
            .initial("a")
            .final_state("a")
            .build()
            .unwrap();
        let mo = asymptotic_moments(&m).unwrap();
        assert_eq!((mo.expectation, mo.variance), (r(1, 1), r(0, 1)));
    }

    #[test]
    fn symmetric_chain() {
        let w = Word::digits;
        let m = build_machine(
            &[
                ("a", "a", w(&[0]), w(&[0])),
                ("a", "b", w(&[1]), w(&[1])),
                ("b", "a", w(&[0]), w(&[1])),
                ("b", "b", w(&[1]), w(&[0])),
            ],
            &["a"],
            &["a", "b"],
            bits(),
        )
        .unwrap();
        assert_eq!(stationary_distribution(&m).unwrap(), vec![r(1, 2), r(1, 2)]);
        assert_eq!(expected_density(&m).unwrap(), r(1, 2));
    }

    #[test]
    fn periodic_and_multiple_components() {
        let w = Word::digits;
        let cycle = build_machine(&[("a", "b", w(&[0]), w(&[0])), ("b", "a", w(&[0]), w(&[1]))], &["a"], &["a"], [Symbol::Digit(0)]).unwrap();
        let scc = terminal_scc(&cycle).unwrap();
        assert_eq!(scc.len(), 2);
        assert!(!is_aperiodic(&cycle, &scc));
        assert_eq!(asymptotic_moments(&cycle).unwrap_err(), FsmError::Periodic(2));

        let split = build_machine(
            &[
                ("i", "x", w(&[0]), w(&[0])),
                ("i", "y", w(&[1]), w(&[0])),
                ("x", "x", w(&[0]), w(&[0])),
                ("x", "x", w(&[1]), w(&[0])),
                ("y", "y", w(&[0]), w(&[1])),
                ("y", "y", w(&[1]), w(&[1])),
            ],
            &["i"],
            &["x"],
            bits(),
        )
        .unwrap();
        assert!(matches!(stationary_distribution(&split), Err(FsmError::TerminalComponents(c)) if c.len() == 2));
    }

    #[test]
    fn naf1_terminal_component() {
        let m = crate::machine::tests::naf1();
        let scc: Vec<&str> = terminal_scc(&m).unwrap().into_iter().map(|s| m.label(s)).collect();
        let mut scc = scc;
        scc.sort();
        assert_eq!(scc, ["0", "1", "2"]);
    }

    #[test]
    fn shortest_paths() {
        let w = Word::digits;
        let m = build_machine(
            &[("s", "a", w(&[1]), w(&[])), ("a", "b", w(&[0]), w(&[1, 1])), ("s", "b", w(&[0]), w(&[]))],
            &["s"],
            &["b"],
            bits(),
        )
        .unwrap();
        let (ok, paths) = check_minimality(&m, in_minus_out).unwrap();
        assert!(!ok);
        let b = m.find("b").unwrap();
        assert_eq!(paths.distance_to(b), Some(&int(-1)));
        assert_eq!(paths.path_to(b).unwrap().len(), 3);
        assert_eq!(paths.distance_by_label("s"), Some(&int(0)));

        let id = identity_transducer(&bits()).unwrap();
        let (ok, paths) = check_minimality(&id, zero_weight).unwrap();
        assert!(ok && paths.distance.iter().all(|d| d == &Some(int(0))));
    }

    #[test]
    fn negative_cycle_is_reported() {
        let g = WeightedDigraph {
            labels: vec!["u".into(), "v".into()],
            edges: vec![
                crate::graph::Edge { from: StateId(0), to: StateId(1), weight: int(-1) },
                crate::graph::Edge { from: StateId(1), to: StateId(0), weight: int(-1) },
            ],
        };
        match bellman_ford(&g, StateId(0)) {
            Err(FsmError::NegativeCycle(c)) => {
                assert_eq!(c.first(), c.last());
                assert_eq!(c.len(), 3);
            }
            other => panic!("expected a negative cycle, got {other:?}"),
        }
        assert!(matches!(bellman_ford(&g, StateId(5)), Err(FsmError::UnknownVertex(_))));
    }

    #[test]
    fn jet_inverse() {
        let mut u = Jet::constant(int(2));
        u.0[1] = int(3);
        u.0[5] = int(1);
        let one = u.mul(&u.recip());
        assert_eq!(one, Jet::constant(Rational::one()));
    }
}
