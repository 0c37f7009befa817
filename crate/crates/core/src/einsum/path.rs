use std::fmt;
use std::str::FromStr;

use super::cost::{cost_of_path, naive_flops, size_of, step_flops, CostReport, Simulator};
use super::EinsumSpec;
use crate::error::{Error, Result};

/// Ordered operand-position tuples. After each step the listed operands are
/// removed from the operand list and the step result is appended at its end.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContractionPath {
    steps: Vec<Vec<usize>>,
}

impl ContractionPath {
    pub fn new(steps: Vec<Vec<usize>>) -> Self {
        ContractionPath { steps }
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        ContractionPath {
            steps: pairs.iter().map(|&(a, b)| vec![a, b]).collect(),
        }
    }

    /// The single step over all `n` operands.
    pub fn naive(n: usize) -> Self {
        ContractionPath {
            steps: vec![(0..n).collect()],
        }
    }

    pub fn steps(&self) -> &[Vec<usize>] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_single_step(&self, n_operands: usize) -> bool {
        self.steps.len() == 1 && self.steps[0].len() == n_operands
    }
}

impl fmt::Display for ContractionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, step) in self.steps.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            let items: Vec<String> = step.iter().map(|p| p.to_string()).collect();
            if step.len() == 1 {
                write!(f, "({},)", items[0])?;
            } else {
                write!(f, "({})", items.join(", "))?;
            }
        }
        write!(f, "]")
    }
}

impl FromStr for ContractionPath {
    type Err = Error;

    /// Parses `[(0, 1), (0, 1)]`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim();
        let body = body
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::parse(s, "expected `[...]`"))?;
        let mut steps = Vec::new();
        let mut rest = body.trim();
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(|| Error::parse(s, "expected `(`"))?;
            let close = rest.find(')').ok_or_else(|| Error::parse(s, "expected `)`"))?;
            if close < open {
                return Err(Error::parse(s, "unbalanced parentheses"));
            }
            let step: std::result::Result<Vec<usize>, _> = rest[open + 1..close]
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(str::parse::<usize>)
                .collect();
            steps.push(step.map_err(|e| Error::parse(s, e.to_string()))?);
            rest = rest[close + 1..].trim_start().trim_start_matches(',').trim();
        }
        Ok(ContractionPath { steps })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathStrategy {
    /// One step over all operands.
    Naive,
    /// Pairwise, locally choosing the contraction that shrinks memory most.
    Greedy,
    /// Exhaustive search over pairwise orders minimizing total flops.
    Optimal,
}

impl PathStrategy {
    pub fn name(self) -> &'static str {
        match self {
            PathStrategy::Naive => "naive",
            PathStrategy::Greedy => "greedy",
            PathStrategy::Optimal => "optimal",
        }
    }
}

impl fmt::Display for PathStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PathStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(PathStrategy::Naive),
            "greedy" => Ok(PathStrategy::Greedy),
            "optimal" => Ok(PathStrategy::Optimal),
            _ => Err(Error::parse(s, "expected naive, greedy or optimal")),
        }
    }
}

/// Above this operand count the exhaustive search falls back to greedy.
const MAX_OPTIMAL_OPERANDS: usize = 14;

pub fn optimize_path(spec: &EinsumSpec, strategy: PathStrategy) -> (ContractionPath, CostReport) {
    let n = spec.n_operands();
    let path = match n {
        0 => ContractionPath::new(Vec::new()),
        1 => ContractionPath::new(vec![vec![0]]),
        2 => ContractionPath::new(vec![vec![0, 1]]),
        _ => match strategy {
            PathStrategy::Naive => ContractionPath::naive(n),
            PathStrategy::Greedy => greedy(spec),
            PathStrategy::Optimal if n <= MAX_OPTIMAL_OPERANDS => optimal(spec),
            PathStrategy::Optimal => greedy(spec),
        },
    };
    let report = cost_of_path(spec, &path).expect("optimizer paths are valid");
    (path, report)
}

fn greedy(spec: &EinsumSpec) -> ContractionPath {
    let dims = spec.dims();
    let mut sim = Simulator::new(spec);
    let mut steps = Vec::new();
    let mut total = 0u128;
    while sim.operands.len() > 1 {
        let n = sim.operands.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let sharing: Vec<(usize, usize)> = pairs
            .iter()
            .copied()
            .filter(|&(i, j)| sim.operands[i].iter().any(|c| sim.operands[j].contains(c)))
            .collect();
        let candidates = if sharing.is_empty() { pairs } else { sharing };
        let mut best: Option<((i128, u128, u128, (usize, usize)), Vec<char>, u128)> = None;
        for (i, j) in candidates {
            let plan = sim.plan(&[i, j]).expect("valid positions");
            let out = size_of(&plan.result, dims) as i128;
            let removed = size_of(&sim.operands[i], dims) as i128 + size_of(&sim.operands[j], dims) as i128;
            let flops = step_flops(&plan.union, plan.has_summed, 2, dims);
            let key = (out - removed, flops, out as u128, (i, j));
            if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                best = Some((key, plan.result, flops));
            }
        }
        let ((_, _, _, (i, j)), result, flops) = best.expect("at least one pair");
        total += flops;
        sim.apply(&[i, j], result);
        steps.push(vec![i, j]);
    }
    if total > naive_flops(spec) {
        return ContractionPath::naive(spec.n_operands());
    }
    ContractionPath::new(steps)
}

#[derive(Clone, Copy)]
struct Best {
    flops: u128,
    largest: u128,
    split: u32,
}

fn optimal(spec: &EinsumSpec) -> ContractionPath {
    let n = spec.n_operands();
    let dims = spec.dims();
    let letters = spec.letters();
    let full: u32 = (1u32 << n) - 1;
    // operands containing each letter
    let occ: Vec<u32> = letters
        .iter()
        .map(|ch| {
            spec.inputs()
                .iter()
                .enumerate()
                .filter(|(_, ins)| ins.contains(ch))
                .fold(0u32, |m, (k, _)| m | (1 << k))
        })
        .collect();
    let in_output: Vec<bool> = letters.iter().map(|ch| spec.output().contains(ch)).collect();
    // letter bitmask of the tensor representing each subset
    let mut tensor_letters = vec![0u64; 1 << n];
    for s in 1..=full {
        tensor_letters[s as usize] = if s.count_ones() == 1 {
            let k = s.trailing_zeros() as usize;
            letters
                .iter()
                .enumerate()
                .filter(|(_, ch)| spec.inputs()[k].contains(ch))
                .fold(0u64, |m, (l, _)| m | (1 << l))
        } else if s == full {
            (0..letters.len())
                .filter(|&l| in_output[l])
                .fold(0u64, |m, l| m | (1 << l))
        } else {
            (0..letters.len())
                .filter(|&l| occ[l] & s != 0 && (in_output[l] || occ[l] & !s & full != 0))
                .fold(0u64, |m, l| m | (1 << l))
        };
    }
    let mask_size = |mask: u64| -> u128 {
        (0..letters.len())
            .filter(|l| mask & (1 << l) != 0)
            .map(|l| dims[&letters[l]] as u128)
            .product()
    };
    let mut best: Vec<Option<Best>> = vec![None; 1 << n];
    for k in 0..n {
        best[1 << k] = Some(Best {
            flops: 0,
            largest: 0,
            split: 0,
        });
    }
    let mut subsets: Vec<u32> = (1..=full).filter(|s| s.count_ones() >= 2).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for s in subsets {
        let low = s & s.wrapping_neg();
        let result_mask = tensor_letters[s as usize];
        let result_size = mask_size(result_mask);
        let mut found: Option<Best> = None;
        // enumerate proper submasks `a` containing the lowest operand
        let mut a = (s - 1) & s;
        while a > 0 {
            if a & low != 0 {
                let b = s & !a;
                if let (Some(ba), Some(bb)) = (best[a as usize], best[b as usize]) {
                    let union = tensor_letters[a as usize] | tensor_letters[b as usize];
                    let has_summed = union & !result_mask != 0;
                    let factor = 1 + u128::from(has_summed);
                    let flops = ba.flops + bb.flops + mask_size(union) * factor;
                    let largest = ba.largest.max(bb.largest).max(result_size);
                    let better = match found {
                        None => true,
                        Some(f) => (flops, largest) < (f.flops, f.largest),
                    };
                    if better {
                        found = Some(Best {
                            flops,
                            largest,
                            split: a,
                        });
                    }
                }
            }
            a = (a - 1) & s;
        }
        best[s as usize] = found;
    }

    let mut order = Vec::new();
    post_order(full, &best, &mut order);
    let mut live: Vec<u32> = (0..n).map(|k| 1u32 << k).collect();
    let mut steps = Vec::with_capacity(order.len());
    for (a, b) in order {
        let pa = live.iter().position(|&m| m == a).expect("live subset");
        let pb = live.iter().position(|&m| m == b).expect("live subset");
        let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
        live.remove(hi);
        live.remove(lo);
        live.push(a | b);
        steps.push(vec![lo, hi]);
    }
    ContractionPath::new(steps)
}

fn post_order(s: u32, best: &[Option<Best>], out: &mut Vec<(u32, u32)>) {
    if s.count_ones() < 2 {
        return;
    }
    let a = best[s as usize].expect("subset solved").split;
    let b = s & !a;
    post_order(a, best, out);
    post_order(b, best, out);
    out.push((a, b));
}
