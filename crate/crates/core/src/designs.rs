//! The six parametric network designs and closed forms for Stars and Cycles.
//!
//! Cell designs split `n` nodes into `⌊n/k⌋` cells of size `k` plus, when `k`
//! does not divide `n`, one remainder cell of size `n mod k` with the same
//! topology. Nodes of a cell are contiguous and its first node is the leader.

use std::fmt;
use std::str::FromStr;

use num_traits::Float;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::scalar::{inv_pow, Scalar};
use crate::seed::RunSeed;

/// Node count used by the design experiments.
pub const DEFAULT_NODES: usize = 180;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("cell size k = {k} outside 1..={n}")]
    InvalidCellSize { k: usize, n: usize },
    #[error("connectivity p = {0} outside [0, 1]")]
    InvalidConnectivity(f64),
    #[error("design {design} requires parameter {param}")]
    MissingParameter { design: Design, param: &'static str },
    #[error("design {design} does not take parameter {param}")]
    UnexpectedParameter { design: Design, param: &'static str },
    #[error("ensemble size must be at least 1")]
    EmptyEnsemble,
    #[error("design needs at least one node")]
    NoNodes,
    #[error("unknown design '{0}'")]
    UnknownDesign(String),
    #[error("attenuation exponent cannot be applied in this scalar type")]
    UnsupportedExponent,
    #[error("{design} has no closed form")]
    NoClosedForm { design: Design },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Design {
    Cliques,
    Stars,
    Cycles,
    ConnectedCliques,
    ConnectedStars,
    #[serde(rename = "er")]
    ErdosRenyi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Clique,
    Star,
    Cycle,
}

impl Design {
    pub const ALL: [Design; 6] = [
        Design::Cliques,
        Design::Stars,
        Design::Cycles,
        Design::ConnectedCliques,
        Design::ConnectedStars,
        Design::ErdosRenyi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Design::Cliques => "cliques",
            Design::Stars => "stars",
            Design::Cycles => "cycles",
            Design::ConnectedCliques => "connected-cliques",
            Design::ConnectedStars => "connected-stars",
            Design::ErdosRenyi => "er",
        }
    }

    pub fn cell_kind(self) -> Option<CellKind> {
        match self {
            Design::Cliques | Design::ConnectedCliques => Some(CellKind::Clique),
            Design::Stars | Design::ConnectedStars => Some(CellKind::Star),
            Design::Cycles => Some(CellKind::Cycle),
            Design::ErdosRenyi => None,
        }
    }

    pub fn has_cells(self) -> bool {
        self.cell_kind().is_some()
    }

    pub fn has_connectivity(self) -> bool {
        matches!(self, Design::ConnectedCliques | Design::ConnectedStars | Design::ErdosRenyi)
    }

    /// Stars and Cycles have exact per-cell closed forms.
    pub fn has_closed_form(self) -> bool {
        matches!(self, Design::Stars | Design::Cycles)
    }

    fn ordinal(self) -> u64 {
        Design::ALL.iter().position(|&d| d == self).unwrap() as u64
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Design {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "cliques" | "caveman" => Ok(Design::Cliques),
            "stars" => Ok(Design::Stars),
            "cycles" | "rings" => Ok(Design::Cycles),
            "connected-cliques" | "connectedcliques" => Ok(Design::ConnectedCliques),
            "connected-stars" | "connectedstars" => Ok(Design::ConnectedStars),
            "er" | "erdos-renyi" | "random" => Ok(Design::ErdosRenyi),
            _ => Err(DesignError::UnknownDesign(s.to_string())),
        }
    }
}

/// Which nodes anchor the single edge placed between two connected cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum InterCellWiring {
    /// A uniformly random member of each cell.
    #[default]
    RandomMembers,
    /// The two cell leaders.
    Leaders,
}

/// One point of a design's parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignConfig {
    pub design: Design,
    pub n: usize,
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub ensemble_size: usize,
    pub wiring: InterCellWiring,
}

impl DesignConfig {
    /// Validates the parameters and picks the default ensemble size: ten
    /// graphs for designs with random connectivity, one otherwise.
    pub fn new(design: Design, n: usize, k: Option<usize>, p: Option<f64>) -> Result<Self, DesignError> {
        if n == 0 {
            return Err(DesignError::NoNodes);
        }
        match (design.has_cells(), k) {
            (true, None) => return Err(DesignError::MissingParameter { design, param: "k" }),
            (false, Some(_)) => return Err(DesignError::UnexpectedParameter { design, param: "k" }),
            (true, Some(k)) if k == 0 || k > n => return Err(DesignError::InvalidCellSize { k, n }),
            _ => {}
        }
        match (design.has_connectivity(), p) {
            (true, None) => return Err(DesignError::MissingParameter { design, param: "p" }),
            (false, Some(_)) => return Err(DesignError::UnexpectedParameter { design, param: "p" }),
            (true, Some(p)) if !(0.0..=1.0).contains(&p) => return Err(DesignError::InvalidConnectivity(p)),
            _ => {}
        }
        let ensemble_size = if design.has_connectivity() { 10 } else { 1 };
        Ok(DesignConfig { design, n, k, p, ensemble_size, wiring: InterCellWiring::default() })
    }

    pub fn with_ensemble_size(mut self, size: usize) -> Result<Self, DesignError> {
        if size == 0 {
            return Err(DesignError::EmptyEnsemble);
        }
        self.ensemble_size = size;
        Ok(self)
    }

    pub fn with_wiring(mut self, wiring: InterCellWiring) -> Self {
        self.wiring = wiring;
        self
    }

    /// Integers identifying this configuration for seed derivation.
    ///
    /// Connected designs with singleton cells are the ER model and share its
    /// key, so they draw exactly the ER ensemble.
    pub fn seed_key(&self) -> [u64; 5] {
        if self.design.has_cells() && self.design.has_connectivity() && self.k == Some(1) {
            let er = DesignConfig { design: Design::ErdosRenyi, k: None, wiring: InterCellWiring::default(), ..*self };
            return er.seed_key();
        }
        [
            self.design.ordinal(),
            self.n as u64,
            self.k.map_or(u64::MAX, |k| k as u64),
            self.p.map_or(u64::MAX, f64::to_bits),
            match self.wiring {
                InterCellWiring::RandomMembers => 0,
                InterCellWiring::Leaders => 1,
            },
        ]
    }
}

/// Cell sizes for `n` nodes and cell size `k`: full cells then the remainder.
pub fn cell_sizes(n: usize, k: usize) -> Vec<usize> {
    let mut sizes = vec![k; n / k];
    if !n.is_multiple_of(k) {
        sizes.push(n % k);
    }
    sizes
}

fn push_cell(kind: CellKind, start: usize, size: usize, edges: &mut Vec<(usize, usize)>) {
    match kind {
        CellKind::Clique => {
            for u in start..start + size {
                for v in u + 1..start + size {
                    edges.push((u, v));
                }
            }
        }
        CellKind::Star => {
            for v in start + 1..start + size {
                edges.push((start, v));
            }
        }
        CellKind::Cycle => match size {
            0 | 1 => {}
            2 => edges.push((start, start + 1)),
            _ => {
                for i in 0..size {
                    let (a, b) = (start + i, start + (i + 1) % size);
                    edges.push((a.min(b), a.max(b)));
                }
            }
        },
    }
}

/// Draw one graph of the design.
pub fn generate(config: &DesignConfig, seed: RunSeed) -> Graph {
    let n = config.n;
    let mut rng = seed.rng();
    let mut edges = Vec::new();
    match (config.design.cell_kind(), config.k) {
        (Some(kind), Some(k)) => {
            let mut cells = Vec::new();
            let mut start = 0;
            for size in cell_sizes(n, k) {
                push_cell(kind, start, size, &mut edges);
                cells.push((start, size));
                start += size;
            }
            if let Some(p) = config.p {
                for i in 0..cells.len() {
                    for j in i + 1..cells.len() {
                        if rng.gen::<f64>() < p {
                            let mut member = |(start, size): (usize, usize)| match config.wiring {
                                InterCellWiring::RandomMembers if size > 1 => start + rng.gen_range(0..size),
                                _ => start,
                            };
                            let (a, b) = (member(cells[i]), member(cells[j]));
                            edges.push((a, b));
                        }
                    }
                }
            }
        }
        _ => {
            let p = config.p.unwrap_or(0.0);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::from_canonical(n, edges)
}

/// The `ensemble_size` independent graphs of a configuration.
///
/// With singleton cells a connected design consumes randomness exactly as
/// ER does, so equal seeds give equal graphs.
pub fn generate_ensemble(config: &DesignConfig, seed: RunSeed) -> Vec<Graph> {
    (0..config.ensemble_size).map(|i| generate(config, seed.child(i as u64))).collect()
}

fn check_cells(n: usize, k: usize) -> Result<(), DesignError> {
    if k == 0 || k > n {
        return Err(DesignError::InvalidCellSize { k, n });
    }
    Ok(())
}

/// Closed-form `(R, W)` of the Stars design with identical cells of size `k`.
///
/// `R = 1 − (1 − 1/k)/(n − 1) · [2 + τ(k − 2)]·τ` and
/// `W = (1 − 1/k)/(n − 1) · [2 + 2^(−g)(k − 2)]`; `(1, 0)` for `k = 1`.
/// Exact for generated graphs when `k` divides `n`.
pub fn analytic_stars<T: Scalar>(n: usize, k: usize, tau: &T, g_exp: &T) -> Result<(T, T), DesignError> {
    check_cells(n, k)?;
    if k == 1 || n < 2 {
        return Ok((T::one(), T::zero()));
    }
    let two = T::from_count(2);
    let kk = T::from_count(k);
    let km2 = T::from_count(k - 2);
    let scale = (T::one() - T::one() / kk) / T::from_count(n - 1);
    let r = T::one() - scale.clone() * (two.clone() + tau.clone() * km2.clone()) * tau.clone();
    let half_g = inv_pow(two.clone(), g_exp).ok_or(DesignError::UnsupportedExponent)?;
    let w = scale * (two + half_g * km2);
    Ok((r, w))
}

/// Sum over ordered pairs `u ≠ v` inside one ring of size `s` of `1/d^g`,
/// divided by `s` (the per-node profile).
fn cycle_profile<T: Scalar>(s: usize, g_exp: &T) -> Result<T, DesignError> {
    let inv = |j: usize| inv_pow(T::from_count(j), g_exp).ok_or(DesignError::UnsupportedExponent);
    let mut total = T::zero();
    if s < 2 {
        return Ok(total);
    }
    let two = T::from_count(2);
    if s.is_multiple_of(2) {
        total = total + inv(s / 2)?;
        for j in 1..s / 2 {
            total = total + two.clone() * inv(j)?;
        }
    } else {
        for j in 1..=(s - 1) / 2 {
            total = total + two.clone() * inv(j)?;
        }
    }
    Ok(total)
}

/// Expected new failures from one seed inside a ring of size `s`.
fn cycle_extent<T: Scalar>(s: usize, tau: &T) -> T {
    match s {
        0 | 1 => T::zero(),
        // a two-node cell is a single edge in a simple graph
        2 => tau.clone(),
        _ => {
            // 2·Σ_{j=1}^{s−1} τ^j − (s − 1)·τ^s; at τ = 1 this is s − 1
            let mut power = T::one();
            let mut geometric = T::zero();
            for _ in 1..s {
                power = power * tau.clone();
                geometric = geometric + power.clone();
            }
            let tau_s = power * tau.clone();
            T::from_count(2) * geometric - T::from_count(s - 1) * tau_s
        }
    }
}

/// Closed-form `(R, W)` of the Cycles design with identical rings of size `k`.
///
/// `R = 1 − [2τ(1 − τ^(k−1))/(1 − τ) − (k − 1)τ^k]/(n − 1)`, evaluated as a
/// finite geometric sum so `τ = 1` needs no special case. `W` is the ring's
/// per-node distance profile over `n − 1`. A ring of size two is a single
/// edge, so its `R` is `1 − τ/(n − 1)`.
pub fn analytic_cycles<T: Scalar>(n: usize, k: usize, tau: &T, g_exp: &T) -> Result<(T, T), DesignError> {
    check_cells(n, k)?;
    if k == 1 || n < 2 {
        return Ok((T::one(), T::zero()));
    }
    let nm1 = T::from_count(n - 1);
    let r = T::one() - cycle_extent(k, tau) / nm1.clone();
    let w = cycle_profile(k, g_exp)? / nm1;
    Ok((r, w))
}

/// Exact `(R, W)` of a Stars or Cycles graph with any cell partition,
/// including a remainder cell, by summing per-cell contributions.
pub fn exact_cell_metrics<T: Scalar>(
    design: Design,
    n: usize,
    k: usize,
    tau: &T,
    g_exp: &T,
) -> Result<(T, T), DesignError> {
    check_cells(n, k)?;
    if n < 2 {
        return Ok((T::one(), T::zero()));
    }
    let mut extent_sum = T::zero();
    let mut reach_sum = T::zero();
    for s in cell_sizes(n, k) {
        let count = T::from_count(s);
        match design {
            Design::Stars => {
                if s >= 2 {
                    let sm1 = T::from_count(s - 1);
                    let sm2 = T::from_count(s - 2);
                    let two = T::from_count(2);
                    extent_sum = extent_sum + sm1.clone() * tau.clone() * (two.clone() + tau.clone() * sm2.clone());
                    let half_g = inv_pow(two.clone(), g_exp).ok_or(DesignError::UnsupportedExponent)?;
                    reach_sum = reach_sum + sm1 * (two + half_g * sm2);
                }
            }
            Design::Cycles => {
                extent_sum = extent_sum + count.clone() * cycle_extent(s, tau);
                reach_sum = reach_sum + count * cycle_profile(s, g_exp)?;
            }
            other => return Err(DesignError::NoClosedForm { design: other }),
        }
    }
    let pairs = T::from_count(n * (n - 1));
    Ok((T::one() - extent_sum / pairs.clone(), reach_sum / pairs))
}

/// Transmission probability `2^(−g/2)` above which a single large star
/// stops being the best Stars configuration at `r = 1/2`.
pub fn stars_single_cell_threshold<F: Float>(g_exp: F) -> F {
    let two = F::one() + F::one();
    two.powf(-g_exp / two)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    #[test]
    fn cliques_n6_k3() {
        let cfg = DesignConfig::new(Design::Cliques, 6, Some(3), None).unwrap();
        let g = generate(&cfg, RunSeed::new(0));
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.connected_components(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn single_star() {
        let cfg = DesignConfig::new(Design::Stars, 180, Some(180), None).unwrap();
        let g = generate(&cfg, RunSeed::new(0));
        assert_eq!(g.edge_count(), 179);
        assert_eq!(g.degree(0), 179);
    }

    #[test]
    fn er_boundaries() {
        let empty = generate(&DesignConfig::new(Design::ErdosRenyi, 10, None, Some(0.0)).unwrap(), RunSeed::new(1));
        assert_eq!(empty.edge_count(), 0);
        let full = generate(&DesignConfig::new(Design::ErdosRenyi, 10, None, Some(1.0)).unwrap(), RunSeed::new(1));
        assert!(full.is_complete());
    }

    #[test]
    fn remainder_cells() {
        assert_eq!(cell_sizes(10, 4), vec![4, 4, 2]);
        assert_eq!(cell_sizes(9, 3), vec![3, 3, 3]);
        let g = generate(&DesignConfig::new(Design::Cycles, 10, Some(4), None).unwrap(), RunSeed::new(0));
        // two 4-rings and one edge
        assert_eq!(g.edge_count(), 9);
        let g = generate(&DesignConfig::new(Design::Cliques, 7, Some(3), None).unwrap(), RunSeed::new(0));
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.degree(6), 0);
    }

    #[test]
    fn connected_wiring_modes() {
        let cfg = DesignConfig::new(Design::ConnectedStars, 20, Some(5), Some(1.0)).unwrap();
        let leaders = generate(&cfg.with_wiring(InterCellWiring::Leaders), RunSeed::new(3));
        assert_eq!(leaders.edge_count(), 4 * 4 + 6);
        for u in [0, 5, 10, 15] {
            assert_eq!(leaders.degree(u), 4 + 3);
        }
        let random = generate(&cfg, RunSeed::new(3));
        assert_eq!(random.connected_components().len(), 1);
        let isolated = DesignConfig::new(Design::ConnectedCliques, 20, Some(5), Some(0.0)).unwrap();
        assert_eq!(generate(&isolated, RunSeed::new(3)).connected_components().len(), 4);
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            DesignConfig::new(Design::Stars, 10, Some(11), None),
            Err(DesignError::InvalidCellSize { .. })
        ));
        assert!(matches!(
            DesignConfig::new(Design::Stars, 10, Some(0), None),
            Err(DesignError::InvalidCellSize { .. })
        ));
        assert!(matches!(DesignConfig::new(Design::Stars, 10, None, None), Err(DesignError::MissingParameter { .. })));
        assert!(matches!(
            DesignConfig::new(Design::Stars, 10, Some(2), Some(0.1)),
            Err(DesignError::UnexpectedParameter { .. })
        ));
        assert!(matches!(
            DesignConfig::new(Design::ErdosRenyi, 10, None, Some(1.5)),
            Err(DesignError::InvalidConnectivity(_))
        ));
        assert_eq!(DesignConfig::new(Design::ErdosRenyi, 10, None, Some(0.5)).unwrap().ensemble_size, 10);
        assert_eq!(DesignConfig::new(Design::Cycles, 10, Some(5), None).unwrap().ensemble_size, 1);
        assert!(DesignConfig::new(Design::Cycles, 10, Some(5), None).unwrap().with_ensemble_size(0).is_err());
        assert_eq!("connected_stars".parse::<Design>().unwrap(), Design::ConnectedStars);
        assert!("lattice".parse::<Design>().is_err());
    }

    #[test]
    fn analytic_stars_examples() {
        let one = ratio(1, 1);
        assert_eq!(analytic_stars(180, 1, &ratio(1, 2), &one).unwrap(), (one.clone(), ratio(0, 1)));
        let (r, _) = analytic_stars(3, 3, &ratio(1, 2), &one).unwrap();
        assert_eq!(r, ratio(7, 12));
        let (_, w) = analytic_stars(180, 180, &ratio(1, 5), &one).unwrap();
        assert_eq!(w, ratio(91, 180));
    }

    #[test]
    fn analytic_cycles_examples() {
        let one = ratio(1, 1);
        let (r, _) = analytic_cycles(3, 3, &ratio(1, 2), &one).unwrap();
        assert_eq!(r, ratio(3, 8));
        let (_, w) = analytic_cycles(4, 4, &ratio(1, 2), &one).unwrap();
        assert_eq!(w, ratio(5, 6));
        for k in 1..12 {
            let (r, _) = analytic_cycles(12, k, &ratio(0, 1), &one).unwrap();
            assert_eq!(r, one);
        }
        // τ = 1: every ring member fails
        let (r, _) = analytic_cycles::<BigRational>(10, 5, &one, &one).unwrap();
        assert_eq!(r, ratio(5, 9));
    }

    #[test]
    fn cycles_formula_matches_textbook_form_away_from_one() {
        for k in 3..15usize {
            for t in [0.1f64, 0.35, 0.8] {
                let closed = 2.0 * t * (1.0 - t.powi(k as i32 - 1)) / (1.0 - t) - (k as f64 - 1.0) * t.powi(k as i32);
                let (r, _) = analytic_cycles(60, k, &t, &1.0).unwrap();
                assert!((1.0 - r - closed / 59.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exact_cell_metrics_reduces_to_closed_forms() {
        let g = ratio(1, 1);
        let tau = ratio(3, 10);
        for k in [1usize, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60] {
            assert_eq!(
                exact_cell_metrics(Design::Stars, 60, k, &tau, &g).unwrap(),
                analytic_stars(60, k, &tau, &g).unwrap()
            );
            assert_eq!(
                exact_cell_metrics(Design::Cycles, 60, k, &tau, &g).unwrap(),
                analytic_cycles(60, k, &tau, &g).unwrap()
            );
        }
        assert!(exact_cell_metrics(Design::Cliques, 60, 3, &tau, &g).is_err());
    }

    #[test]
    fn threshold() {
        assert!((stars_single_cell_threshold(1.0f64) - 0.71).abs() < 0.005);
        assert_eq!(stars_single_cell_threshold(0.0f64), 1.0);
        assert!((stars_single_cell_threshold(2.0f64) - 0.5).abs() < 1e-15);
    }
}
