//! Independent oracles: dense polynomials over Z/p, brute-force closures
//! and the generator families written out from their definitions.

#![allow(dead_code)]

use std::collections::BTreeMap;

use tspaces::{FieldSpec, SparsePoly};

/// Dense coefficients over Z/p, index = exponent.
pub type Dense = Vec<u32>;

pub fn trim(mut v: Dense) -> Dense {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn add(p: u32, a: &[u32], b: &[u32]) -> Dense {
    let mut out = vec![0; a.len().max(b.len())];
    for (k, c) in a.iter().enumerate() {
        out[k] = *c;
    }
    for (k, c) in b.iter().enumerate() {
        out[k] = (out[k] + c) % p;
    }
    trim(out)
}

pub fn scale(p: u32, a: &[u32], c: u32) -> Dense {
    trim(a.iter().map(|x| x * c % p).collect())
}

pub fn mul(p: u32, a: &[u32], b: &[u32]) -> Dense {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

/// `g(u)`.
pub fn compose(p: u32, g: &[u32], u: &[u32]) -> Dense {
    let mut acc: Dense = Vec::new();
    let mut pw: Dense = vec![1];
    for (e, c) in g.iter().enumerate() {
        if e > 0 {
            pw = mul(p, &pw, u);
        }
        if *c != 0 {
            acc = add(p, &acc, &scale(p, &pw, *c));
        }
    }
    acc
}

pub fn monomials(p: u32, exps: &[u64]) -> Dense {
    let top = exps.iter().copied().max().unwrap_or(0) as usize;
    let mut v = vec![0u32; top + 1];
    for &e in exps {
        v[e as usize] = (v[e as usize] + 1) % p;
    }
    trim(v)
}

/// Dense form of a polynomial over a prime field.
pub fn dense(f: &FieldSpec, g: &SparsePoly) -> Dense {
    assert_eq!(f.m(), 1, "dense oracle needs a prime field");
    let mut v = Vec::new();
    for (e, c) in g.terms() {
        let e: usize = e.try_into().expect("small exponent");
        if v.len() <= e {
            v.resize(e + 1, 0);
        }
        v[e] = f.residue(c)[0];
    }
    trim(v)
}

fn inv_mod(p: u32, a: u32) -> u32 {
    (1..p).find(|b| a * b % p == 1).expect("unit")
}

/// Row echelon form keyed by leading (highest) exponent.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pub p: u32,
    pub rows: BTreeMap<usize, Dense>,
}

impl Echelon {
    pub fn new(p: u32) -> Echelon {
        Echelon { p, rows: BTreeMap::new() }
    }

    pub fn reduce(&self, v: &[u32]) -> Dense {
        let p = self.p;
        let mut v = trim(v.to_vec());
        while !v.is_empty() {
            let lead = v.len() - 1;
            let Some(row) = self.rows.get(&lead) else { break };
            let c = v[lead];
            for (k, r) in row.iter().enumerate() {
                v[k] = (v[k] + p - c * r % p) % p;
            }
            v = trim(v);
        }
        v
    }

    /// Full reduction: keeps eliminating below the first non-pivot term.
    pub fn residue(&self, v: &[u32]) -> Dense {
        let p = self.p;
        let mut v = trim(v.to_vec());
        for (&lead, row) in self.rows.iter().rev() {
            if lead < v.len() && v[lead] != 0 {
                let c = v[lead];
                for (k, r) in row.iter().enumerate() {
                    v[k] = (v[k] + p - c * r % p) % p;
                }
            }
        }
        trim(v)
    }

    pub fn insert(&mut self, v: &[u32]) -> bool {
        let v = self.reduce(v);
        let Some(&lead) = v.last() else { return false };
        let inv = inv_mod(self.p, lead);
        let row = scale(self.p, &v, inv);
        self.rows.insert(row.len() - 1, row);
        true
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.residue(v).is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// The part of the span of degree at most `d`.
    pub fn low_part(&self, d: usize) -> Echelon {
        Echelon { p: self.p, rows: self.rows.range(..=d).map(|(k, v)| (*k, v.clone())).collect() }
    }

    pub fn basis(&self) -> Vec<Dense> {
        self.rows.values().cloned().collect()
    }
}

/// Every substitution `x -> u` with `deg u <= d`; `u(0) = 0` unless
/// `unitary`.
pub fn substitutions(p: u32, d: usize, unitary: bool) -> impl Iterator<Item = Dense> {
    let lo = if unitary { 0 } else { 1 };
    let slots = d + 1 - lo;
    let count = (p as u64).pow(slots as u32);
    (0..count).map(move |mut k| {
        let mut u = vec![0u32; d + 1];
        for slot in u.iter_mut().skip(lo) {
            *slot = (k % p as u64) as u32;
            k /= p as u64;
        }
        trim(u)
    })
}

/// Span of `{g(u)}` over all substitutions of degree at most `d`,
/// intersected with degree at most `d`.
pub fn brute_closure(p: u32, gens: &[Dense], d: usize, unitary: bool) -> Echelon {
    let mut ech = Echelon::new(p);
    for u in substitutions(p, d, unitary) {
        for g in gens {
            ech.insert(&compose(p, g, &u));
        }
    }
    ech.low_part(d)
}

pub fn same_subspace(a: &Echelon, b: &Echelon) -> bool {
    a.dim() == b.dim() && a.basis().iter().all(|v| b.contains(v))
}

/// W_n over GF(2): `x^i + x^{2i}`, `x^{(Q+1)i}`, `x^{Qi+j} + x^{i+Qj}`
/// (`i > j`), `Q = 2^n`, as exponent lists.
pub fn w_instances(n: u32, bound: u64) -> Vec<Vec<u64>> {
    let qq = 1u64 << n;
    let mut out = Vec::new();
    for i in 1..=bound {
        if 2 * i <= bound {
            out.push(vec![i, 2 * i]);
        }
        if (qq + 1) * i <= bound {
            out.push(vec![(qq + 1) * i]);
        }
        for j in 1..i {
            if qq * i + j <= bound {
                out.push(vec![qq * i + j, i + qq * j]);
            }
        }
    }
    out
}

/// Exponents of a random W_n instance with parameters up to `max`,
/// reduced mod `m`.
pub fn w_instance_mod<R: rand::Rng>(q: u64, n: u32, m: u64, max: u64, rng: &mut R) -> Vec<u64> {
    let qq = (q as u128).pow(n);
    let m = m as u128;
    match rng.gen_range(0..3) {
        0 => {
            let i = rng.gen_range(1..=max) as u128;
            vec![(i % m) as u64, (q as u128 * i % m) as u64]
        }
        1 => vec![((qq + 1) * rng.gen_range(1..=max) as u128 % m) as u64],
        _ => {
            let i = rng.gen_range(2..=max) as u128;
            let j = rng.gen_range(1..i as u64) as u128;
            vec![((qq * i + j) % m) as u64, ((i + qq * j) % m) as u64]
        }
    }
}

/// `x^i + x^{iQ}` with `Q = q^{2^n}`, exponents reduced mod `m`.
pub fn v_instance_mod<R: rand::Rng>(q: u64, n: u32, m: u64, max: u64, rng: &mut R) -> Vec<u64> {
    let m = m as u128;
    let big = (0..1u32 << n).fold(1u128, |acc, _| acc * q as u128 % m);
    let i = rng.gen_range(1..=max) as u128;
    vec![(i % m) as u64, (i * big % m) as u64]
}

/// Remainder of `sum c_e x^e` modulo `x^q - x` over Z/p, by long division.
pub fn rem_frobenius(p: u32, q: usize, g: &[u32]) -> Dense {
    let mut v = g.to_vec();
    for e in (q..v.len()).rev() {
        let c = v[e];
        if c != 0 {
            v[e] = 0;
            v[e - q + 1] = (v[e - q + 1] + c) % p;
        }
    }
    trim(v)
}

/// `n choose k` mod `p` via Lucas.
pub fn binom_mod(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        let mut c = 1u64;
        for t in 0..b {
            c = c * ((a - t) % p) % p * inv_mod(p as u32, ((t + 1) % p) as u32) as u64 % p;
        }
        acc = acc * c % p;
        n /= p;
        k /= p;
    }
    acc
}

/// The q-homogeneous class of `x^e`: `1..=q-1`, constants in class `q - 1`.
pub fn q_class(e: u64, q: u64) -> u64 {
    if e == 0 {
        q - 1
    } else {
        (e - 1) % (q - 1) + 1
    }
}
