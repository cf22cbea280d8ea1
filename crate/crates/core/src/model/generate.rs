use rand::Rng;

use super::{CbmInstance, CbmParams, Edge, Spin};
use crate::error::Result;
use crate::rng::{substream, tag};

/// Draw a planted instance.
///
/// Labels, edge positions and sign noise come from three independent streams
/// of `params.seed`. Pairs are enumerated in the order `(0,1), (0,2), (1,2),
/// (0,3), …` and visited by geometric skips, so the cost is O(n + m).
pub fn generate(params: &CbmParams) -> Result<CbmInstance> {
    params.validate()?;
    let n = params.n;

    let mut rng = substream(params.seed, tag::SIGMA, 0);
    let sigma: Vec<Spin> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();

    let pairs = sample_pairs(n, params.edge_probability(), params.seed);

    let mut rng = substream(params.seed, tag::NOISE, 0);
    let edges = pairs
        .into_iter()
        .map(|(i, j)| {
            let clean = sigma[i as usize] * sigma[j as usize];
            let flip = params.epsilon > 0.0 && rng.random::<f64>() < params.epsilon;
            Edge { i, j, w: if flip { -clean } else { clean } }
        })
        .collect();

    Ok(CbmInstance { params: *params, sigma, edges })
}

fn sample_pairs(n: usize, p: f64, seed: u64) -> Vec<(u32, u32)> {
    let total = n as u64 * (n as u64).saturating_sub(1) / 2;
    if total == 0 || p <= 0.0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity((total as f64 * p * 1.1) as usize + 16);
    if p >= 1.0 {
        for j in 1..n as u32 {
            out.extend((0..j).map(|i| (i, j)));
        }
        return out;
    }
    // failures before the next success: ⌊ln U / ln(1−p)⌋ with U in (0, 1]
    let log_q = (-p).ln_1p();
    let mut rng = substream(seed, tag::EDGES, 0);
    let mut t = 0u64;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / log_q).floor();
        if !(skip < total as f64) {
            break;
        }
        t = match t.checked_add(skip as u64) {
            Some(t) if t < total => t,
            _ => break,
        };
        out.push(pair_at(t));
        t += 1;
    }
    out
}

/// Inverse of `t = j(j−1)/2 + i` for `0 ≤ i < j`.
fn pair_at(t: u64) -> (u32, u32) {
    let mut j = ((1.0 + (1.0 + 8.0 * t as f64).sqrt()) / 2.0) as u64;
    while j * (j - 1) / 2 > t {
        j -= 1;
    }
    while (j + 1) * j / 2 <= t {
        j += 1;
    }
    let i = t - j * (j - 1) / 2;
    (i as u32, j as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_decoding_enumerates_all_pairs_in_order() {
        let mut t = 0;
        for j in 1..200u32 {
            for i in 0..j {
                assert_eq!(pair_at(t), (i, j));
                t += 1;
            }
        }
        // far out in the index range used at n = 1e5
        let j = 99_999u64;
        let t = j * (j - 1) / 2 + 12_345;
        assert_eq!(pair_at(t), (12_345, 99_999));
    }

    #[test]
    fn vanishing_probability_gives_no_edges() {
        let params = CbmParams::new(4, 1e-300, 0.3, 1).unwrap();
        let inst = generate(&params).unwrap();
        assert!(inst.edges.is_empty());
        assert_eq!(inst.sigma.len(), 4);
    }

    #[test]
    fn complete_graph_when_probability_is_one() {
        let params = CbmParams::new(6, 6.0, 0.0, 1).unwrap();
        let inst = generate(&params).unwrap();
        assert_eq!(inst.m(), 15);
    }

    #[test]
    fn noiseless_edges_match_label_products() {
        let params = CbmParams::new(2000, 5.0, 0.0, 3).unwrap();
        let inst = generate(&params).unwrap();
        assert!(inst.m() > 0);
        for e in &inst.edges {
            assert_eq!(e.w, inst.sigma[e.i as usize] * inst.sigma[e.j as usize]);
        }
    }

    #[test]
    fn generated_instances_satisfy_invariants() {
        let params = CbmParams::new(3000, 6.0, 0.2, 11).unwrap();
        let inst = generate(&params).unwrap();
        let rebuilt = CbmInstance::from_parts(inst.params, inst.sigma.clone(), inst.edges.clone()).unwrap();
        assert_eq!(rebuilt, inst);
    }

    #[test]
    fn deterministic_in_params() {
        let params = CbmParams::new(1000, 4.0, 0.25, 42).unwrap();
        assert_eq!(generate(&params).unwrap(), generate(&params).unwrap());
        let other = CbmParams { seed: 43, ..params };
        assert_ne!(generate(&params).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn changing_noise_keeps_graph_and_labels() {
        // separate streams: epsilon only touches the noise draws
        let a = generate(&CbmParams::new(500, 4.0, 0.1, 5).unwrap()).unwrap();
        let b = generate(&CbmParams::new(500, 4.0, 0.3, 5).unwrap()).unwrap();
        assert_eq!(a.sigma, b.sigma);
        let pairs = |x: &CbmInstance| x.edges.iter().map(|e| (e.i, e.j)).collect::<Vec<_>>();
        assert_eq!(pairs(&a), pairs(&b));
    }
}
