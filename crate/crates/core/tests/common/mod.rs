//! Brute-force oracles shared by the integration tests. They use their own
//! bitmask evaluator and frame checks, independent of the library's.

#![allow(dead_code)]

use certlogic::decision::SystemId;
use certlogic::Formula;

/// A single-agent frame on at most 8 states: `succ[s]` is the successor mask.
#[derive(Clone, Debug)]
pub struct SmallFrame {
    pub n: usize,
    pub succ: Vec<u8>,
}

impl SmallFrame {
    fn has(&self, s: usize, t: usize) -> bool {
        self.succ[s] >> t & 1 == 1
    }

    pub fn in_class(&self, sys: SystemId) -> bool {
        let r = 0..self.n;
        let reflexive = r.clone().all(|s| self.has(s, s));
        let serial = r.clone().all(|s| self.succ[s] != 0);
        let mut transitive = true;
        let mut euclidean = true;
        for s in r.clone() {
            for t in r.clone() {
                for u in r.clone() {
                    if self.has(s, t) && self.has(t, u) && !self.has(s, u) {
                        transitive = false;
                    }
                    if self.has(s, t) && self.has(s, u) && !self.has(t, u) {
                        euclidean = false;
                    }
                }
            }
        }
        (!sys.has_t() || reflexive)
            && (!sys.is_serial() || serial)
            && (!sys.has_4() || transitive)
            && (!sys.has_5() || euclidean)
    }
}

/// All frames with exactly `n` states in the class of `sys`.
pub fn frames(n: usize, sys: SystemId) -> Vec<SmallFrame> {
    let mut out = vec![];
    for mask in 0u32..(1 << (n * n)) {
        let succ = (0..n)
            .map(|s| ((mask >> (s * n)) & ((1 << n) - 1)) as u8)
            .collect();
        let f = SmallFrame { n, succ };
        if f.in_class(sys) {
            out.push(f);
        }
    }
    out
}

/// Extension of a knowledge or certainty formula as a state mask; `K` and
/// `Cert` are both read through the successor masks.
pub fn ext(f: &Formula, frame: &SmallFrame, props: &[String], val: &[u8]) -> u8 {
    let all: u8 = ((1u16 << frame.n) - 1) as u8;
    if let Some((_, a)) = f.as_cert() {
        return boxed(ext(a, frame, props, val), frame);
    }
    match f {
        Formula::True => all,
        Formula::False => 0,
        Formula::Prop(p) => val[props.iter().position(|q| q == p).expect("declared prop")],
        Formula::Not(a) => !ext(a, frame, props, val) & all,
        Formula::And(a, b) => ext(a, frame, props, val) & ext(b, frame, props, val),
        Formula::Or(a, b) => ext(a, frame, props, val) | ext(b, frame, props, val),
        Formula::Implies(a, b) => (!ext(a, frame, props, val) & all) | ext(b, frame, props, val),
        Formula::Know(_, a) => boxed(ext(a, frame, props, val), frame),
        other => panic!("oracle cannot evaluate {other}"),
    }
}

fn boxed(inner: u8, frame: &SmallFrame) -> u8 {
    (0..frame.n)
        .filter(|&s| frame.succ[s] & !inner == 0)
        .fold(0, |m, s| m | 1 << s)
}

/// A falsifying (frame, valuation, state) on at most `max_states` states,
/// valuations given as one state mask per proposition.
pub fn countermodel(
    f: &Formula,
    sys: SystemId,
    max_states: usize,
) -> Option<(SmallFrame, Vec<u8>, usize)> {
    let props: Vec<String> = f.props().into_iter().collect();
    for n in 1..=max_states {
        for frame in frames(n, sys) {
            for vmask in 0u32..(1 << (n * props.len())) {
                let val: Vec<u8> = (0..props.len())
                    .map(|p| ((vmask >> (p * n)) & ((1 << n) - 1)) as u8)
                    .collect();
                let e = ext(f, &frame, &props, &val);
                if let Some(s) = (0..n).find(|&s| e >> s & 1 == 0) {
                    return Some((frame, val, s));
                }
            }
        }
    }
    None
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Every single-agent probability frame on `n` states whose distributions
/// have denominators at most `max_den`.
pub fn probability_frames(n: usize, max_den: u32) -> Vec<certlogic::structures::Frame> {
    let grid = certlogic::structures::distribution_grid(n, max_den);
    let mut out = vec![];
    let mut idx = vec![0usize; n];
    loop {
        let kernel = idx.iter().map(|&i| grid[i].clone()).collect();
        let states = (1..=n).map(|i| format!("s{i}")).collect();
        out.push(certlogic::structures::Frame::new(states, vec!["a".into()], vec![kernel]).unwrap());
        let mut k = 0;
        while k < n && idx[k] + 1 == grid.len() {
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return out;
        }
        idx[k] += 1;
    }
}

/// Uniformity by definition: support-linked states carry equal rows.
pub fn frame_is_uniform(f: &certlogic::structures::Frame) -> bool {
    let k = f.kernel(certlogic::AgentId(1)).unwrap();
    (0..k.len()).all(|s| (0..k.len()).all(|t| k[s].get(t).is_zero() || k[s] == k[t]))
}

/// Miller's principle by direct rational arithmetic: for every event `A`
/// and every interval with endpoints `k/12`, and every state `s`,
/// `a·PR(s)(E) <= PR(s)(A ∩ E) <= b·PR(s)(E)` where
/// `E = {u : PR(u)(A) ∈ [a, b]}`. Every probability of a frame with
/// denominators at most four on three states is a multiple of 1/12.
pub fn miller_valid_by_arithmetic(f: &certlogic::structures::Frame) -> bool {
    use certlogic::Rational;
    let k = f.kernel(certlogic::AgentId(1)).unwrap();
    let n = k.len();
    let grid: Vec<Rational> = (0..=12).map(|i| Rational::new(i, 12)).collect();
    for a_mask in 0u32..1 << n {
        let prob = |s: usize, m: u32| {
            (0..n)
                .filter(|u| m >> u & 1 == 1)
                .fold(Rational::zero(), |acc, u| acc + k[s].get(u).clone())
        };
        let vals: Vec<Rational> = (0..n).map(|u| prob(u, a_mask)).collect();
        for (i, a) in grid.iter().enumerate() {
            for b in &grid[i..] {
                let e: u32 = (0..n)
                    .filter(|&u| a <= &vals[u] && &vals[u] <= b)
                    .fold(0, |m, u| m | 1 << u);
                for s in 0..n {
                    let pe = prob(s, e);
                    let pae = prob(s, e & a_mask);
                    if pae < a.clone() * pe.clone() || pae > b.clone() * pe {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Each state's distribution, restricted to any class of states sharing a
/// distribution `μ` that it reaches, is proportional to `μ`.
pub fn frame_is_reflective(f: &certlogic::structures::Frame) -> bool {
    use certlogic::Rational;
    let k = f.kernel(certlogic::AgentId(1)).unwrap();
    let n = k.len();
    (0..n).all(|s| {
        (0..n).filter(|&t| !k[s].get(t).is_zero()).all(|t| {
            let class: Vec<usize> = (0..n).filter(|&u| k[u] == k[t]).collect();
            let mass = class.iter().fold(Rational::zero(), |acc, &u| acc + k[s].get(u).clone());
            (0..n).all(|u| {
                let here = if class.contains(&u) { k[s].get(u).clone() } else { Rational::zero() };
                here == mass.clone() * k[t].get(u).clone()
            })
        })
    })
}

/// States falsifying some certain formula with at most `max_size`
/// connectives over `~`, `&` and `Cert`, found by closing the set of
/// definable extensions under the connectives, smallest first.
pub fn fb_by_enumeration(n: &certlogic::structures::SimpleProbabilityStructure, max_size: usize) -> Vec<usize> {
    let size = n.worlds().len();
    let all: u8 = ((1u16 << size) - 1) as u8;
    let pr = n.distribution(certlogic::AgentId(1)).unwrap();
    let prob = |m: u8| -> certlogic::Rational {
        (0..size)
            .filter(|s| m >> s & 1 == 1)
            .fold(certlogic::Rational::zero(), |acc, s| acc + pr.get(s).clone())
    };
    let mut best: std::collections::HashMap<u8, usize> = std::collections::HashMap::new();
    for p in 0..n.worlds().props().len() {
        let m = (0..size).filter(|&s| n.worlds().holds(s, p)).fold(0u8, |m, s| m | 1 << s);
        best.insert(m, 0);
    }
    for k in 1..=max_size {
        let known: Vec<(u8, usize)> = best.iter().map(|(&m, &c)| (m, c)).collect();
        let mut add = |m: u8| {
            best.entry(m).or_insert(k);
        };
        for &(m, c) in &known {
            if c + 1 == k {
                add(!m & all);
                add(if prob(m).is_one() { all } else { 0 });
            }
            for &(m2, c2) in &known {
                if c + c2 + 1 == k {
                    add(m & m2);
                }
            }
        }
    }
    (0..size)
        .filter(|&s| best.keys().any(|&m| m >> s & 1 == 0 && prob(m).is_one()))
        .collect()
}

/// Every single-agent simple structure on at most `max_states` states with
/// denominators at most `max_den`, under every assignment.
pub fn simple_grid(max_states: usize, props: &[String], max_den: u32) -> Vec<certlogic::structures::SimpleProbabilityStructure> {
    let mut out = vec![];
    for size in 1..=max_states {
        let k = props.len();
        for mask in 0u32..1 << (size * k) {
            let assign: Vec<Vec<bool>> = (0..size)
                .map(|s| (0..k).map(|p| mask >> (s * k + p) & 1 == 1).collect())
                .collect();
            for d in certlogic::structures::distribution_grid(size, max_den) {
                let w = certlogic::structures::Worlds::numbered(size, props, assign.clone()).unwrap();
                out.push(certlogic::structures::SimpleProbabilityStructure::new(w, vec!["a".into()], vec![d]).unwrap());
            }
        }
    }
    out
}
