use std::collections::{BTreeMap, BTreeSet};

use einform::einsum::{execute_path, naive_contract, optimize_path};
use einform::{ContractionPath, DenseTensor, EinsumSpec, PathStrategy};
use proptest::prelude::*;

const POOL: &[char] = &['a', 'b', 'c', 'd', 'e', 'f', 'g'];

#[derive(Debug, Clone)]
struct Case {
    inputs: Vec<String>,
    output: String,
    dims: BTreeMap<char, usize>,
    seed: u64,
}

impl Case {
    fn shapes(&self) -> Vec<Vec<usize>> {
        self.inputs
            .iter()
            .map(|s| s.chars().map(|c| self.dims[&c]).collect())
            .collect()
    }

    fn spec(&self) -> EinsumSpec {
        let shapes = self.shapes();
        let refs: Vec<&[usize]> = shapes.iter().map(Vec::as_slice).collect();
        let ins: Vec<&str> = self.inputs.iter().map(String::as_str).collect();
        EinsumSpec::from_subscripts(&ins, &self.output, &refs).unwrap()
    }

    fn operands(&self) -> Vec<DenseTensor> {
        let mut state = self.seed | 1;
        self.shapes()
            .iter()
            .map(|shape| {
                DenseTensor::from_fn(shape, |_| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state % 2001) as f64 / 1000.0 - 1.0
                })
            })
            .collect()
    }
}

fn operand_letters() -> impl Strategy<Value = String> {
    proptest::sample::subsequence(POOL.to_vec(), 1..=4)
        .prop_shuffle()
        .prop_map(|v| v.into_iter().collect())
}

fn case(max_operands: usize) -> impl Strategy<Value = Case> {
    (
        proptest::collection::vec(operand_letters(), 2..=max_operands),
        proptest::collection::vec(1usize..=6, POOL.len()),
        proptest::collection::vec(any::<bool>(), POOL.len()),
        any::<u64>(),
    )
        .prop_map(|(inputs, extents, keep, seed)| {
            let used: BTreeSet<char> = inputs.iter().flat_map(|s| s.chars()).collect();
            let output: String = used
                .iter()
                .filter(|c| keep[POOL.iter().position(|p| p == *c).unwrap()])
                .collect();
            let dims = POOL.iter().copied().zip(extents).collect();
            Case {
                inputs,
                output,
                dims,
                seed,
            }
        })
}

/// `S * (max(1, n - 1) + [summed])` for one step, computed from letter sets.
fn oracle_step(letters: &BTreeSet<char>, result: &BTreeSet<char>, n: usize, dims: &BTreeMap<char, usize>) -> u128 {
    let size: u128 = letters.iter().map(|c| dims[c] as u128).product();
    let summed = letters.iter().any(|c| !result.contains(c));
    size * ((n.max(2) - 1) as u128 + u128::from(summed))
}

/// Minimum total flops over every pairwise contraction order.
fn brute_force(ops: Vec<BTreeSet<char>>, output: &BTreeSet<char>, dims: &BTreeMap<char, usize>) -> u128 {
    if ops.len() == 1 {
        return 0;
    }
    let mut best = u128::MAX;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let joined: BTreeSet<char> = ops[i].union(&ops[j]).copied().collect();
            let rest: Vec<BTreeSet<char>> = ops
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i && *k != j)
                .map(|(_, s)| s.clone())
                .collect();
            let keep: BTreeSet<char> = rest.iter().flatten().chain(output).copied().collect();
            let result: BTreeSet<char> = joined.intersection(&keep).copied().collect();
            let step = oracle_step(&joined, &result, 2, dims);
            let mut next = rest;
            next.push(result);
            best = best.min(step + brute_force(next, output, dims));
        }
    }
    best
}

fn rel_close(a: &DenseTensor, b: &DenseTensor, tol: f64) -> bool {
    a.rel_diff(b).is_some_and(|d| d <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn paths_match_naive_oracle(c in case(5)) {
        let spec = c.spec();
        let ops = c.operands();
        let expected = naive_contract(&spec, &ops).unwrap();
        for strategy in [PathStrategy::Greedy, PathStrategy::Optimal] {
            let (path, _) = optimize_path(&spec, strategy);
            let got = execute_path(&spec, &ops, &path).unwrap();
            prop_assert!(rel_close(&got, &expected, 1e-12), "{spec} {strategy} {path}");
        }
    }

    #[test]
    fn cost_monotonicity(c in case(5)) {
        let spec = c.spec();
        prop_assume!(spec.n_operands() >= 3);
        let (_, greedy) = optimize_path(&spec, PathStrategy::Greedy);
        let (_, optimal) = optimize_path(&spec, PathStrategy::Optimal);
        prop_assert!(optimal.path_flops <= greedy.path_flops);
        prop_assert!(greedy.path_flops <= greedy.naive_flops);
    }

    #[test]
    fn optimal_matches_brute_force(c in case(5)) {
        let spec = c.spec();
        let sets: Vec<BTreeSet<char>> = c.inputs.iter().map(|s| s.chars().collect()).collect();
        let output: BTreeSet<char> = c.output.chars().collect();
        let best = brute_force(sets, &output, &c.dims);
        let (_, optimal) = optimize_path(&spec, PathStrategy::Optimal);
        prop_assert_eq!(optimal.path_flops, best, "{}", spec);
    }

    #[test]
    fn naive_path_is_bitwise_naive(c in case(4)) {
        let spec = c.spec();
        let ops = c.operands();
        let expected = naive_contract(&spec, &ops).unwrap();
        let got = execute_path(&spec, &ops, &ContractionPath::naive(spec.n_operands())).unwrap();
        prop_assert_eq!(got.to_vec(), expected.to_vec());
    }

    #[test]
    fn identity_table(n in 1usize..=6, m in 1usize..=6, seed in any::<u64>()) {
        let mut state = seed | 1;
        let mut rnd = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 1000) as f64 / 500.0 - 1.0
        };
        let sq = DenseTensor::from_fn(&[n, n], |_| rnd());
        let rect = DenseTensor::from_fn(&[n, m], |_| rnd());
        let x = DenseTensor::from_fn(&[n], |_| rnd());
        let y = DenseTensor::from_fn(&[m], |_| rnd());
        let eval = |expr: &str, ops: &[DenseTensor]| {
            let shapes: Vec<&[usize]> = ops.iter().map(|t| t.shape()).collect();
            let spec = EinsumSpec::parse(expr, &shapes).unwrap();
            let (path, _) = optimize_path(&spec, PathStrategy::Greedy);
            execute_path(&spec, ops, &path).unwrap()
        };

        let trace: f64 = (0..n).map(|i| sq.at(&[i, i])).sum();
        prop_assert!((eval("ii", &[sq.clone()]).at(&[]) - trace).abs() <= 1e-12);

        let diag = eval("ii->i", &[sq.clone()]);
        for i in 0..n {
            prop_assert_eq!(diag.at(&[i]), sq.at(&[i, i]));
        }

        let t = eval("ij->ji", &[rect.clone()]);
        prop_assert_eq!(t.shape(), &[m, n]);
        for i in 0..n {
            for j in 0..m {
                prop_assert_eq!(t.at(&[j, i]), rect.at(&[i, j]));
            }
        }

        let o = eval("i,j->ij", &[x.clone(), y.clone()]);
        for i in 0..n {
            for j in 0..m {
                prop_assert_eq!(o.at(&[i, j]), x.at(&[i]) * y.at(&[j]));
            }
        }

        let mut bil = 0.0;
        for i in 0..n {
            for j in 0..m {
                bil += x.at(&[i]) * rect.at(&[i, j]) * y.at(&[j]);
            }
        }
        let got = eval("i,ij,j->", &[x, rect, y]).at(&[]);
        prop_assert!((got - bil).abs() <= 1e-12 * bil.abs().max(1.0));
    }
}

#[test]
fn bilinear_picks_corner() {
    let u = DenseTensor::from_vec(&[2], vec![1.0, 0.0]).unwrap();
    let a = DenseTensor::from_vec(&[2, 2], vec![2.0, 3.0, 4.0, 5.0]).unwrap();
    let spec = EinsumSpec::parse("i,ij,j->", &[&[2], &[2, 2], &[2]]).unwrap();
    let (path, _) = optimize_path(&spec, PathStrategy::Optimal);
    let r = execute_path(&spec, &[u.clone(), a, u], &path).unwrap();
    assert_eq!(r.at(&[]), 2.0);
}

#[test]
fn identity_matmul() {
    let i2 = DenseTensor::from_vec(&[2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let b = DenseTensor::from_vec(&[2, 2], vec![0.5, -1.0, 7.0, 3.0]).unwrap();
    let spec = EinsumSpec::parse("ik,kj->ij", &[&[2, 2], &[2, 2]]).unwrap();
    let (path, _) = optimize_path(&spec, PathStrategy::Greedy);
    assert_eq!(path, ContractionPath::from_pairs(&[(0, 1)]));
    assert_eq!(
        execute_path(&spec, &[i2, b.clone()], &path).unwrap().to_vec(),
        b.to_vec()
    );
}

#[test]
fn two_operand_specs_take_one_step() {
    let spec = EinsumSpec::parse("abc,cd->ad", &[&[2, 3, 4], &[4, 5]]).unwrap();
    for s in [PathStrategy::Naive, PathStrategy::Greedy, PathStrategy::Optimal] {
        let (path, report) = optimize_path(&spec, s);
        assert_eq!(path.steps(), &[vec![0, 1]]);
        assert_eq!(report.speedup(), 1.0);
    }
}
