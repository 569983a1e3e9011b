//! Independent reference implementations used as test oracles.
//!
//! Everything here works on plain vectors and is written for clarity over
//! speed, so that it shares no code path with the engine it checks.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

// ------------------------------------------------------------ networks

/// Random DAG with parents drawn from lower indices.
pub struct RandomNet {
    pub cards: Vec<usize>,
    pub parents: Vec<Vec<usize>>,
    /// Parent-major (first parent slowest), child fastest.
    pub cpts: Vec<Vec<f64>>,
}

impl RandomNet {
    /// Mostly binary variables with an occasional ternary one.
    pub fn binaryish(seed: u64, n: usize, max_parents: usize) -> Self {
        let mut rng = StdRng::seed_from_u64(seed);
        let cards: Vec<usize> = (0..n).map(|_| if rng.gen_bool(0.2) { 3 } else { 2 }).collect();
        let mut parents = Vec::with_capacity(n);
        for i in 0..n {
            let mut ps: Vec<usize> = (0..i).filter(|_| rng.gen_bool(0.5)).collect();
            while ps.len() > max_parents {
                let drop = rng.gen_range(0..ps.len());
                ps.remove(drop);
            }
            parents.push(ps);
        }
        let cpts = (0..n)
            .map(|i| {
                let rows: usize = parents[i].iter().map(|&p| cards[p]).product();
                let mut out = Vec::with_capacity(rows * cards[i]);
                for _ in 0..rows {
                    let w: Vec<f64> = (0..cards[i]).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let s: f64 = w.iter().sum();
                    out.extend(w.iter().map(|x| x / s));
                }
                out
            })
            .collect();
        Self { cards, parents, cpts }
    }
}

/// Full joint by brute-force product of CPT entries; row-major, last variable fastest.
pub fn enumerate_joint(cards: &[usize], parents: &[Vec<usize>], cpts: &[Vec<f64>]) -> Vec<f64> {
    let size: usize = cards.iter().product();
    let mut joint = vec![0.0; size];
    for (idx, slot) in joint.iter_mut().enumerate() {
        let a = decode(idx, cards);
        let mut p = 1.0;
        for v in 0..cards.len() {
            let mut row = 0;
            for &q in &parents[v] {
                row = row * cards[q] + a[q];
            }
            p *= cpts[v][row * cards[v] + a[v]];
        }
        *slot = p;
    }
    joint
}

pub fn decode(mut idx: usize, cards: &[usize]) -> Vec<usize> {
    let mut a = vec![0; cards.len()];
    for v in (0..cards.len()).rev() {
        a[v] = idx % cards[v];
        idx /= cards[v];
    }
    a
}

/// Normalized marginal over `query` (in that order) restricted to `evidence`;
/// `None` when the evidence has zero mass.
pub fn marginal(cards: &[usize], joint: &[f64], query: &[usize], evidence: &[(usize, usize)]) -> Option<Vec<f64>> {
    let qsize: usize = query.iter().map(|&q| cards[q]).product();
    let mut out = vec![0.0; qsize];
    for (idx, &p) in joint.iter().enumerate() {
        let a = decode(idx, cards);
        if evidence.iter().any(|&(v, o)| a[v] != o) {
            continue;
        }
        let mut qi = 0;
        for &q in query {
            qi = qi * cards[q] + a[q];
        }
        out[qi] += p;
    }
    let total: f64 = out.iter().sum();
    if total <= 0.0 {
        return None;
    }
    Some(out.into_iter().map(|x| x / total).collect())
}

/// Numeric test of x ⊥ y | given on an enumerated joint.
pub fn conditionally_independent(cards: &[usize], joint: &[f64], x: usize, y: usize, given: &[usize], tol: f64) -> bool {
    let gsize: usize = given.iter().map(|&g| cards[g]).product();
    for gi in 0..gsize {
        let mut ev = Vec::new();
        let mut rem = gi;
        for &g in given.iter().rev() {
            ev.push((g, rem % cards[g]));
            rem /= cards[g];
        }
        let Some(pxy) = marginal(cards, joint, &[x, y], &ev) else { continue };
        let (cx, cy) = (cards[x], cards[y]);
        for a in 0..cx {
            for b in 0..cy {
                let px: f64 = (0..cy).map(|bb| pxy[a * cy + bb]).sum();
                let py: f64 = (0..cx).map(|aa| pxy[aa * cy + b]).sum();
                if (pxy[a * cy + b] - px * py).abs() > tol {
                    return false;
                }
            }
        }
    }
    true
}

// ------------------------------------------------------------ graphs

/// All-pairs hop counts from a boolean adjacency matrix.
pub fn floyd_warshall(adj: &[Vec<bool>]) -> Vec<Vec<Option<u32>>> {
    let n = adj.len();
    let mut d: Vec<Vec<Option<u32>>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Some(0) } else if adj[i][j] { Some(1) } else { None }).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].map_or(true, |c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

// ------------------------------------------------------------ first passage

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// Explicit-power form: P(H = τ) = Σ_{k ∈ trap} ((π P^{τ-1}) with trap entries zeroed · P)_k.
pub fn first_passage_by_powers(p: &[Vec<f64>], trap: &[usize], start: &[f64], horizon: usize) -> Vec<f64> {
    let n = p.len();
    let mut power: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut v: Vec<f64> = (0..n).map(|j| (0..n).map(|i| start[i] * power[i][j]).sum()).collect();
        for &t in trap {
            v[t] = 0.0;
        }
        let w: Vec<f64> = (0..n).map(|j| (0..n).map(|i| v[i] * p[i][j]).sum()).collect();
        out.push(trap.iter().map(|&t| w[t]).sum());
        power = mat_mul(&power, p);
    }
    out
}

/// Sampled first-passage frequencies for τ = 1..=horizon.
pub fn monte_carlo_first_passage(p: &[Vec<f64>], trap: &[usize], start: usize, horizon: usize, paths: usize, seed: u64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
    let mut counts = vec![0usize; horizon];
    let in_trap = |s: usize| trap.contains(&s);
    for _ in 0..paths {
        let mut s = start;
        if in_trap(s) {
            continue;
        }
        for k in 0..horizon {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut next = p[s].iter().rposition(|&q| q > 0.0).unwrap();
            for (j, &q) in p[s].iter().enumerate() {
                acc += q;
                if u < acc {
                    next = j;
                    break;
                }
            }
            s = next;
            if in_trap(s) {
                counts[k] += 1;
                break;
            }
        }
    }
    counts.into_iter().map(|c| c as f64 / paths as f64).collect()
}

// ------------------------------------------------------------ filtering

/// Sums the full joint over every state path, D and R.
/// `p[d][x][y]` transition rows, `lik[t][x][r]` likelihood of the observed
/// signal at period t+1. Returns (π_T, P(D | S), P(R | S), ln P(S)).
pub fn enumerate_filter(
    p: &[Vec<Vec<f64>>],
    p0: &[f64],
    pd: &[f64],
    pr: &[f64],
    lik: &[Vec<Vec<f64>>],
) -> (Vec<f64>, Vec<f64>, Vec<f64>, f64) {
    let n = p0.len();
    let periods = lik.len();
    let mut pi = vec![0.0; n];
    let mut post_d = vec![0.0; pd.len()];
    let mut post_r = vec![0.0; pr.len()];
    let cards = vec![n; periods + 1];
    let paths: usize = cards.iter().product();
    for d in 0..pd.len() {
        for r in 0..pr.len() {
            for idx in 0..paths {
                let x = decode(idx, &cards);
                let mut w = pd[d] * pr[r] * p0[x[0]];
                for t in 1..=periods {
                    w *= p[d][x[t - 1]][x[t]] * lik[t - 1][x[t]][r];
                }
                pi[x[periods]] += w;
                post_d[d] += w;
                post_r[r] += w;
            }
        }
    }
    let z: f64 = post_d.iter().sum();
    let norm = |v: Vec<f64>| v.into_iter().map(|x| x / z).collect::<Vec<f64>>();
    (norm(pi), norm(post_d), norm(post_r), z.ln())
}

/// Re-runs the classic forward recursion from the first report for every
/// credibility realization, then mixes the runs with P(D, R | signals)
/// obtained by Bayes rule from each run's total likelihood.
pub fn reiterated_forward(
    p: &[Vec<Vec<f64>>],
    p0: &[f64],
    pd: &[f64],
    pr: &[f64],
    lik: &[Vec<Vec<f64>>],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = p0.len();
    let mut runs = Vec::new();
    for d in 0..pd.len() {
        for r in 0..pr.len() {
            let mut alpha = p0.to_vec();
            for step in lik {
                alpha = (0..n).map(|y| (0..n).map(|x| alpha[x] * p[d][x][y]).sum::<f64>() * step[y][r]).collect();
            }
            let l: f64 = alpha.iter().sum();
            runs.push((d, r, pd[d] * pr[r] * l, alpha));
        }
    }
    let z: f64 = runs.iter().map(|r| r.2).sum();
    let mut pi = vec![0.0; n];
    let mut post_d = vec![0.0; pd.len()];
    let mut post_r = vec![0.0; pr.len()];
    for (d, r, w, alpha) in &runs {
        let l: f64 = alpha.iter().sum();
        post_d[*d] += w / z;
        post_r[*r] += w / z;
        for x in 0..n {
            pi[x] += w / z * alpha[x] / l;
        }
    }
    (pi, post_d, post_r)
}

// ------------------------------------------------------------ alert timing

/// Inputs of an alert-timing problem in plain vectors.
pub struct DeskInstance {
    /// `probs[j][k]` = P(H = t + 1 + k | D = j).
    pub probs: Vec<Vec<f64>>,
    pub alert_costs: Vec<f64>,
    pub lead_times: Vec<Vec<Option<u32>>>,
    pub failure_costs: Vec<f64>,
    pub daily_rate: f64,
    pub periods_per_day: u32,
    pub horizon: u32,
    pub cumulative: bool,
}

impl DeskInstance {
    fn window(&self, t: u32, i: usize, t_alert: u32, j: usize) -> std::ops::RangeInclusive<u32> {
        let lo = if self.cumulative { t + 1 } else { t_alert.max(t + 1) };
        let hi = match self.lead_times[i][j] {
            Some(l) => (t_alert + l).min(self.horizon),
            None => self.horizon,
        };
        lo..=hi
    }

    fn prob(&self, j: usize, t: u32, tau: u32) -> f64 {
        self.probs[j].get((tau - t - 1) as usize).copied().unwrap_or(0.0)
    }
}

const DIGITS: u32 = 60;

/// Decimal fixed point with 60 fractional digits.
#[derive(Clone, Debug)]
struct Fixed(BigInt);

impl Fixed {
    fn scale() -> BigInt {
        BigInt::from(10u32).pow(DIGITS)
    }

    fn int(n: i64) -> Self {
        Fixed(BigInt::from(n) * Self::scale())
    }

    fn from_f64(x: f64) -> Self {
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = if exp == 0 { (bits & 0xf_ffff_ffff_ffff) << 1 } else { (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000 };
        let e = exp - 1075;
        let m = BigInt::from(mantissa) * Self::scale() * sign;
        Fixed(if e >= 0 { m << e as usize } else { m >> (-e) as usize })
    }

    fn to_f64(&self) -> f64 {
        format!("{}e-{}", self.0, DIGITS).parse().unwrap()
    }

    fn add(&self, o: &Self) -> Self {
        Fixed(&self.0 + &o.0)
    }

    fn sub(&self, o: &Self) -> Self {
        Fixed(&self.0 - &o.0)
    }

    fn mul(&self, o: &Self) -> Self {
        Fixed(&self.0 * &o.0 / Self::scale())
    }

    fn div(&self, o: &Self) -> Self {
        Fixed(&self.0 * Self::scale() / &o.0)
    }

    fn exp(&self) -> Self {
        let small = Self::scale() / 100;
        let mut x = self.clone();
        let mut halvings = 0;
        while x.0.abs() > small {
            x = Fixed(x.0 / 2);
            halvings += 1;
        }
        let mut sum = Self::int(1);
        let mut term = Self::int(1);
        for k in 1.. {
            term = Fixed(term.mul(&x).0 / k);
            if term.0.is_zero() {
                break;
            }
            sum = sum.add(&term);
        }
        for _ in 0..halvings {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// 2 atanh(z) for |z| ≤ 1/3.
    fn two_atanh(z: &Self) -> Self {
        let z2 = z.mul(z);
        let mut power = z.clone();
        let mut sum = Fixed(BigInt::zero());
        let mut k = 1i64;
        while !power.0.is_zero() {
            sum = sum.add(&Fixed(&power.0 / k));
            power = power.mul(&z2);
            k += 2;
        }
        Fixed(sum.0 * 2)
    }

    fn ln(&self) -> Self {
        assert!(self.0 > BigInt::zero(), "ln of a nonpositive number");
        let one = Self::int(1);
        let two = Self::int(2);
        let mut y = self.clone();
        let mut k = 0i64;
        while y.0 > two.0 {
            y = Fixed(y.0 / 2);
            k += 1;
        }
        while y.0 < one.0 {
            y = Fixed(y.0 * 2);
            k -= 1;
        }
        let ln2 = Self::two_atanh(&one.div(&Self::int(3)));
        let z = y.sub(&one).div(&y.add(&one));
        Self::two_atanh(&z).add(&Fixed(ln2.0 * k))
    }
}

/// Certain equivalent under exponential disutility, evaluated with 60-digit
/// fixed-point arithmetic.
pub fn ce_high_precision(inst: &DeskInstance, t: u32, i: usize, t_alert: u32, j: usize, gamma: f64) -> f64 {
    let ln_growth = Fixed::int(1).add(&Fixed::from_f64(inst.daily_rate)).ln().div(&Fixed::int(inst.periods_per_day as i64));
    let pv = |cost: f64, n: u32| Fixed::from_f64(cost).mul(&Fixed(-(ln_growth.0.clone() * n)).exp());
    let g = Fixed::from_f64(gamma);
    let one = Fixed::int(1);
    let mut expected = Fixed(BigInt::zero());
    for tau in inst.window(t, i, t_alert, j) {
        let p = inst.prob(j, t, tau);
        if p == 0.0 {
            continue;
        }
        let u = g.mul(&pv(inst.failure_costs[j], tau - t)).exp().sub(&one).div(&g);
        expected = expected.add(&Fixed::from_f64(p).mul(&u));
    }
    let u_inv = one.add(&g.mul(&expected)).ln().div(&g);
    pv(inst.alert_costs[i], t_alert - t).add(&u_inv).to_f64()
}

/// Linear-disutility scan over every (alert, time) pair. Near-ties within a
/// relative 1e-12 go to the earliest time, then to the larger associated
/// failure cost.
pub fn exhaustive_argmin(inst: &DeskInstance, p_d: &[f64], t: u32) -> (usize, u32) {
    let d = (1.0 + inst.daily_rate).powf(-1.0 / inst.periods_per_day as f64);
    let mut cells = Vec::new();
    for i in 0..inst.alert_costs.len() {
        for t_alert in t..=inst.horizon {
            let mut ed = 0.0;
            for (j, &w) in p_d.iter().enumerate() {
                let mut fail = 0.0;
                for tau in inst.window(t, i, t_alert, j) {
                    fail += inst.prob(j, t, tau) * inst.failure_costs[j] * d.powi((tau - t) as i32);
                }
                ed += w * (inst.alert_costs[i] * d.powi((t_alert - t) as i32) + fail);
            }
            cells.push((i, t_alert, ed));
        }
    }
    let min = cells.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let associated = |i: usize| {
        inst.lead_times[i].iter().zip(&inst.failure_costs).filter(|(l, _)| l.is_some()).map(|(_, v)| *v).fold(0.0, f64::max)
    };
    let (i, tau, _) = cells
        .into_iter()
        .filter(|c| c.2 <= min * (1.0 + 1e-12))
        .min_by(|a, b| a.1.cmp(&b.1).then(associated(b.0).partial_cmp(&associated(a.0)).unwrap()))
        .unwrap();
    (i, tau)
}
