//! Independent oracles and instance generators shared by the integration
//! tests. Nothing here calls the library's linear algebra or solvers.

#![allow(dead_code)]

use icbound::field::FieldSpec;
use icbound::instance::{IccsiInstance, IcsiInstance};
use icbound::matrix::FqMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// Rank over GF(p), p prime, by plain Gaussian elimination.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] % p != 0) else { continue };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][c], p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let factor = rows[r][c];
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] + p * p - factor * rows[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Min-rank of a digraph over GF(p) by enumerating every fitting matrix.
pub fn brute_minrank(n: usize, arcs: &[(usize, usize)], p: u64) -> usize {
    let total = p.pow(arcs.len() as u32);
    let mut best = n;
    for idx in 0..total {
        let mut m = vec![vec![0u64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        let mut x = idx;
        for &(u, v) in arcs {
            m[u][v] = x % p;
            x /= p;
        }
        best = best.min(rank_mod_p(m, p));
        if best == 0 {
            break;
        }
    }
    best
}

/// Arcs of a digraph given as a bitmask over the `n(n−1)` off-diagonal pairs.
pub fn arcs_from_mask(n: usize, mask: u64) -> Vec<(usize, usize)> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    pairs.into_iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, a)| a).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative arc set per isomorphism class of digraphs on `n`
/// vertices.
pub fn digraphs_up_to_isomorphism(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs = n * n.saturating_sub(1);
    let perms = permutations(n);
    let code = |arcs: &[(usize, usize)]| -> Vec<(usize, usize)> {
        let mut a = arcs.to_vec();
        a.sort_unstable();
        a
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut reps = Vec::new();
    for mask in 0..1u64 << pairs {
        let arcs = arcs_from_mask(n, mask);
        let canon = perms
            .iter()
            .map(|p| code(&arcs.iter().map(|&(u, v)| (p[u], p[v])).collect::<Vec<_>>()))
            .min()
            .unwrap();
        if seen.insert(canon) {
            reps.push(arcs);
        }
    }
    reps
}

/// Brute-force feedback number: smallest vertex set meeting every circuit,
/// found by testing acyclicity of what remains with Kahn's algorithm.
/// Two-vertex circuits count.
pub fn brute_tau(n: usize, arcs: &[(usize, usize)]) -> usize {
    let acyclic = |keep: u32| {
        let mut indeg = vec![0; n];
        for &(u, v) in arcs {
            if keep >> u & 1 == 1 && keep >> v & 1 == 1 {
                indeg[v] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| keep >> v & 1 == 1 && indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for &(a, b) in arcs {
                if a == u && keep >> b & 1 == 1 {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        stack.push(b);
                    }
                }
            }
        }
        seen == keep.count_ones() as usize
    };
    let full = (1u32 << n) - 1;
    (0..=full).filter(|&removed| acyclic(full & !removed)).map(|r| r.count_ones() as usize).min().unwrap()
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Solves `A x = b` over the rationals; `None` unless the solution is unique.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigRational>> =
        a.iter().zip(b).map(|(r, bi)| r.iter().cloned().chain([bi.clone()]).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let piv = (rank..rows).find(|&r| !m[r][c].is_zero())?;
        m.swap(rank, piv);
        let inv = BigRational::one() / m[rank][c].clone();
        for x in m[rank].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let factor = m[r][c].clone();
                for k in 0..=cols {
                    let sub = &factor * &m[rank][k];
                    m[r][k] = &m[r][k] - sub;
                }
            }
        }
        rank += 1;
    }
    if (rank..rows).any(|r| !m[r][cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| m[c][cols].clone()).collect())
}

/// Set-partition program: columns are subsets of `[elements]` with costs.
pub struct PartitionProgram {
    pub elements: usize,
    pub columns: Vec<(u32, BigRational)>,
}

impl PartitionProgram {
    pub fn random(rng: &mut impl Rng) -> Self {
        let elements = rng.gen_range(2..=8);
        let count = rng.gen_range(elements..=elements + 6).min((1 << elements) - 1);
        let mut columns: Vec<(u32, BigRational)> = (0..elements).map(|e| (1 << e, q(rng.gen_range(2..=9), 1))).collect();
        while columns.len() < count {
            let s: u32 = rng.gen_range(1..1u32 << elements);
            if columns.iter().all(|(t, _)| *t != s) {
                columns.push((s, q(rng.gen_range(1..=12), rng.gen_range(1..=3))));
            }
        }
        PartitionProgram { elements, columns }
    }

    /// Integral optimum by trying every subset of columns.
    pub fn brute_integral(&self) -> BigRational {
        let full = (1u32 << self.elements) - 1;
        let mut best: Option<BigRational> = None;
        for pick in 0..1u32 << self.columns.len() {
            let mut union = 0u32;
            let mut ok = true;
            let mut cost = BigRational::zero();
            for (k, (s, c)) in self.columns.iter().enumerate() {
                if pick >> k & 1 == 1 {
                    ok &= union & s == 0;
                    union |= s;
                    cost += c;
                }
            }
            if ok && union == full && best.as_ref().map_or(true, |b| cost < *b) {
                best = Some(cost);
            }
        }
        best.expect("singletons always partition")
    }

    /// LP optimum as the best basic feasible solution.
    pub fn brute_fractional(&self) -> BigRational {
        let k = self.columns.len();
        let mut best: Option<BigRational> = None;
        for pick in 1..1u32 << k {
            if pick.count_ones() as usize > self.elements {
                continue;
            }
            let cols: Vec<usize> = (0..k).filter(|&c| pick >> c & 1 == 1).collect();
            let a: Vec<Vec<BigRational>> = (0..self.elements)
                .map(|e| cols.iter().map(|&c| if self.columns[c].0 >> e & 1 == 1 { BigRational::one() } else { BigRational::zero() }).collect())
                .collect();
            let b = vec![BigRational::one(); self.elements];
            let Some(x) = solve_rational(&a, &b) else { continue };
            if x.iter().any(|v| v.is_negative()) {
                continue;
            }
            let cost: BigRational = cols.iter().zip(&x).map(|(&c, v)| &self.columns[c].1 * v).sum();
            if best.as_ref().map_or(true, |b| cost < *b) {
                best = Some(cost);
            }
        }
        best.expect("singleton basis is feasible")
    }
}

fn random_vector(rng: &mut impl Rng, q: u32, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..q)).collect()
}

/// Random coded-side-information instance over GF(q) with `n, m ≤ 5`.
pub fn random_iccsi(rng: &mut impl Rng, q: u32) -> IccsiInstance {
    let f = FieldSpec::of_order(q).unwrap();
    loop {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(2..=5);
        let vs = if rng.gen_bool(0.5) {
            FqMatrix::identity(&f, n)
        } else {
            let d = rng.gen_range(1..=n);
            FqMatrix::from_rows(&f, n, &(0..d).map(|_| random_vector(rng, q, n)).collect::<Vec<_>>())
        };
        let v: Vec<FqMatrix> = (0..m)
            .map(|_| {
                let k = rng.gen_range(0..=2);
                FqMatrix::from_rows(&f, n, &(0..k).map(|_| random_vector(rng, q, n)).collect::<Vec<_>>())
            })
            .collect();
        let mut r = Vec::new();
        for _ in 0..m {
            let c = random_vector(rng, q, vs.rows());
            r.push(vs.left_mul_vec(&c));
        }
        let r = FqMatrix::from_rows(&f, n, &r);
        if let Ok(inst) = IccsiInstance::new(f.clone(), 1, vs, v, r) {
            return inst;
        }
    }
}

pub fn fano() -> IcsiInstance {
    IcsiInstance::canonical_one_based(&[&[2, 3], &[6, 7], &[5, 7], &[2, 5], &[1, 6], &[3, 4], &[1, 4]]).unwrap()
}

pub fn four_receivers() -> IcsiInstance {
    IcsiInstance::canonical_one_based(&[&[2], &[3, 4], &[1, 4], &[1, 3]]).unwrap()
}

pub fn iccsi(q: u32, n: usize, v: &[&[Vec<u32>]], r: &[Vec<u32>]) -> IccsiInstance {
    let f = FieldSpec::of_order(q).unwrap();
    let v = v.iter().map(|rows| FqMatrix::from_rows(&f, n, rows)).collect();
    IccsiInstance::new(f.clone(), 1, FqMatrix::identity(&f, n), v, FqMatrix::from_rows(&f, n, r)).unwrap()
}

pub fn coded_pair() -> IccsiInstance {
    iccsi(2, 2, &[&[vec![1, 1]], &[]], &[vec![1, 0], vec![0, 1]])
}

pub fn coded_triple() -> IccsiInstance {
    iccsi(2, 3, &[&[vec![0, 1, 1]], &[vec![1, 1, 1]], &[vec![1, 1, 1]]], &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
}

pub fn digits(s: &str) -> Vec<u32> {
    s.chars().map(|c| c.to_digit(10).unwrap()).collect()
}

pub fn gf4_six() -> IccsiInstance {
    let side = [
        ["010000", "000011"],
        ["100000", "001100"],
        ["000100", "000011"],
        ["001000", "110000"],
        ["000001", "001100"],
        ["110000", "000010"],
    ];
    let v: Vec<Vec<Vec<u32>>> = side.iter().map(|rows| rows.iter().map(|r| digits(r)).collect()).collect();
    let v: Vec<&[Vec<u32>]> = v.iter().map(|x| x.as_slice()).collect();
    let r: Vec<Vec<u32>> = (0..6).map(|i| (0..6).map(|j| (i == j) as u32).collect()).collect();
    iccsi(4, 6, &v, &r)
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}
