//! Caller-to-agent assignment: cost model, random-key decoding of
//! continuous positions, an exhaustive oracle and the optimizer wrapper.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::benchmarks::ObjectiveSpec;
use crate::error::{Error, Result};
use crate::optimizers::{run_objective, RunConfig, RunResult};
use crate::swarm::Bounds;

/// Largest problem `brute_force` will enumerate (10! permutations).
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Square matrix of average handle times in seconds, `cost[caller][agent]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    corner: String,
    callers: Vec<String>,
    agents: Vec<String>,
    cost: Vec<Vec<f64>>,
}

impl CostMatrix {
    pub fn new(cost: Vec<Vec<f64>>) -> Result<Self> {
        let n = cost.len();
        let callers = (1..=n).map(|i| format!("Caller {i}")).collect();
        let agents = (1..=n).map(|j| format!("Agent {j}")).collect();
        Self::with_labels(String::new(), callers, agents, cost)
    }

    pub fn with_labels(
        corner: String,
        callers: Vec<String>,
        agents: Vec<String>,
        cost: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = cost.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("matrix is empty".into()));
        }
        if callers.len() != n || agents.len() != n {
            return Err(Error::InvalidMatrix(format!(
                "{} caller and {} agent labels for {n} rows",
                callers.len(),
                agents.len()
            )));
        }
        for (i, row) in cost.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has {} cells, expected {n} (matrix must be square)",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &c) in row.iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "cell ({}, {}) = {c}: costs must be finite and non-negative",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self {
            corner,
            callers,
            agents,
            cost,
        })
    }

    /// The four-caller, four-agent handle-time table of the call-center
    /// case study.
    pub fn call_center() -> Self {
        let callers = (1..=4).map(|i| format!("Caller Profile {i}")).collect();
        let agents = (1..=4).map(|j| format!("Agent {j}")).collect();
        Self::with_labels(
            String::new(),
            callers,
            agents,
            vec![
                vec![540.0, 215.0, 221.0, 246.0],
                vec![848.0, 436.0, 542.0, 936.0],
                vec![324.0, 81.0, 288.0, 328.0],
                vec![775.0, 579.0, 157.0, 263.0],
            ],
        )
        .expect("static matrix is valid")
    }

    pub fn n(&self) -> usize {
        self.cost.len()
    }

    pub fn get(&self, caller: usize, agent: usize) -> f64 {
        self.cost[caller][agent]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.cost
    }

    pub fn callers(&self) -> &[String] {
        &self.callers
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    /// Parses the labelled layout: first row holds agent labels after a
    /// corner cell, each following row a caller label then `n` seconds.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut records = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::InvalidMatrix(format!("line {}: {e}", line + 1)))?;
            records.push(rec);
        }
        let (header, body) = records
            .split_first()
            .ok_or_else(|| Error::InvalidMatrix("empty file".into()))?;
        let corner = header.get(0).unwrap_or_default().to_string();
        let agents: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut callers = Vec::with_capacity(body.len());
        let mut cost = Vec::with_capacity(body.len());
        for (i, rec) in body.iter().enumerate() {
            let line = i + 2;
            callers.push(rec.get(0).unwrap_or_default().to_string());
            let row = rec
                .iter()
                .skip(1)
                .enumerate()
                .map(|(j, cell)| {
                    cell.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidMatrix(format!("line {line}, column {}: `{cell}` is not a number", j + 2))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            cost.push(row);
        }
        if agents.len() != cost.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} agent columns but {} caller rows (matrix must be square)",
                agents.len(),
                cost.len()
            )));
        }
        Self::with_labels(corner, callers, agents, cost)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidMatrix(e.to_string());
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![self.corner.clone()];
        header.extend(self.agents.iter().cloned());
        w.write_record(&header).map_err(io)?;
        for (label, row) in self.callers.iter().zip(&self.cost) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(|c| c.to_string()));
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidMatrix(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// `perm[caller] = agent`.
    pub perm: Vec<usize>,
    pub total_seconds: f64,
}

impl Assignment {
    /// `caller,agent,seconds` rows followed by a `total` row.
    pub fn write_csv<W: Write>(&self, matrix: &CostMatrix, mut out: W) -> std::io::Result<()> {
        writeln!(out, "caller,agent,seconds")?;
        for (i, &j) in self.perm.iter().enumerate() {
            writeln!(out, "{},{},{}", matrix.callers[i], matrix.agents[j], matrix.get(i, j))?;
        }
        writeln!(out, "total,,{}", self.total_seconds)
    }
}

/// Ranks of `keys` in ascending order; equal keys rank by index.
pub fn decode_keys(keys: &[f64]) -> Result<Vec<usize>> {
    if keys.is_empty() {
        return Err(Error::InvalidPermutation("no keys".into()));
    }
    if let Some(i) = keys.iter().position(|k| !k.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    let mut perm = vec![0; keys.len()];
    for (rank, &idx) in order.iter().enumerate() {
        perm[idx] = rank;
    }
    Ok(perm)
}

fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} for a {n}x{n} matrix",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection on 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// `sum_i cost[i][perm[i]]`, summed in caller order.
pub fn assignment_cost(matrix: &CostMatrix, perm: &[usize]) -> Result<f64> {
    check_perm(perm, matrix.n())?;
    Ok(cost_unchecked(matrix, perm))
}

fn cost_unchecked(matrix: &CostMatrix, perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| matrix.cost[i][j]).sum()
}

/// Advances `p` to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Exhaustive search over all `n!` assignments in lexicographic order;
/// the first minimum found wins ties.
pub fn brute_force(matrix: &CostMatrix) -> Result<Assignment> {
    let n = matrix.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLargeForBruteForce {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = Assignment {
        total_seconds: cost_unchecked(matrix, &perm),
        perm: perm.clone(),
    };
    while next_permutation(&mut perm) {
        let total = cost_unchecked(matrix, &perm);
        if total < best.total_seconds {
            best.total_seconds = total;
            best.perm.copy_from_slice(&perm);
        }
    }
    Ok(best)
}

/// Wraps the matrix as an objective over random keys in `[0, 1]^n`.
pub fn assignment_objective(matrix: &CostMatrix) -> ObjectiveSpec {
    let n = matrix.n();
    let m = matrix.clone();
    let bounds = Bounds::uniform(n, 0.0, 1.0).expect("unit box");
    ObjectiveSpec::deterministic("assignment", bounds, move |keys| {
        let perm = decode_keys(keys).expect("keys inside the unit box are finite");
        cost_unchecked(&m, &perm)
    })
}

/// Optimizes the assignment with the configured algorithm. The objective
/// name and dimension in `config` are ignored.
pub fn optimize_assignment(matrix: &CostMatrix, config: &RunConfig) -> Result<(Assignment, RunResult)> {
    let result = run_objective(config, assignment_objective(matrix))?;
    let perm = decode_keys(&result.best_position)?;
    let total_seconds = assignment_cost(matrix, &perm)?;
    Ok((Assignment { perm, total_seconds }, result))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CallTimeBreakdown {
    pub hold_seconds: f64,
    pub call_seconds: f64,
    pub post_call_seconds: f64,
    pub total_calls: u64,
}

/// Average handle time per call: (hold + call + post-call) / calls.
pub fn call_handle_time(b: &CallTimeBreakdown) -> Result<f64> {
    if b.total_calls == 0 {
        return Err(Error::InvalidBreakdown("total_calls must be at least 1".into()));
    }
    for (name, v) in [
        ("hold_seconds", b.hold_seconds),
        ("call_seconds", b.call_seconds),
        ("post_call_seconds", b.post_call_seconds),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidBreakdown(format!("{name} = {v} must be finite and >= 0")));
        }
    }
    Ok((b.hold_seconds + b.call_seconds + b.post_call_seconds) / b.total_calls as f64)
}
