use std::cmp::Ordering;

use serde::Serialize;

use crate::designs::{Design, DesignConfig, InterCellWiring};
use crate::seed::RunSeed;

use super::surface::{evaluate_many, Evaluator, SurfacePoint};
use super::OptimizerError;

/// Connectivity values added to the regular grid to resolve the sparse
/// regime where connected designs change phase.
pub const EXTRA_P_POINTS: [f64; 3] = [0.005, 0.01, 0.02];

/// Parameter grid for one design.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub k_values: Vec<usize>,
    pub p_values: Vec<f64>,
    /// Insert one midpoint wherever adjacent connectivity values (same `k`)
    /// differ in fitness by more than `refine_threshold`.
    pub refine: bool,
    pub refine_threshold: f64,
}

impl SearchGrid {
    /// Every cell size in `1..=n`; connectivity at multiples of 0.05 plus
    /// [`EXTRA_P_POINTS`]; refinement on.
    pub fn standard(n: usize) -> Self {
        let mut p_values: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        p_values.extend_from_slice(&EXTRA_P_POINTS);
        p_values.sort_by(f64::total_cmp);
        SearchGrid { k_values: (1..=n).collect(), p_values, refine: true, refine_threshold: 0.05 }
    }

    pub fn with_k_values(mut self, k: Vec<usize>) -> Self {
        self.k_values = k;
        self
    }

    pub fn with_p_values(mut self, p: Vec<f64>) -> Self {
        self.p_values = p;
        self
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine = false;
        self
    }
}

/// Everything except the design, τ and r that a search needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSettings {
    pub n: usize,
    pub grid: SearchGrid,
    pub evaluator: Evaluator,
    pub ensemble_size: Option<usize>,
    pub wiring: InterCellWiring,
}

impl SearchSettings {
    pub fn standard(n: usize) -> Self {
        SearchSettings {
            n,
            grid: SearchGrid::standard(n),
            evaluator: Evaluator::default(),
            ensemble_size: None,
            wiring: InterCellWiring::default(),
        }
    }

    fn make_config(&self, design: Design, k: Option<usize>, p: Option<f64>) -> Result<DesignConfig, OptimizerError> {
        let mut cfg = DesignConfig::new(design, self.n, k, p)?.with_wiring(self.wiring);
        if let Some(m) = self.ensemble_size {
            cfg = cfg.with_ensemble_size(m)?;
        }
        Ok(cfg)
    }

    /// The base grid of configurations for `design`, ordered by `(k, p)`.
    pub fn configurations(&self, design: Design) -> Result<Vec<DesignConfig>, OptimizerError> {
        let ks: Vec<Option<usize>> = if design.has_cells() {
            let mut ks: Vec<usize> = self.grid.k_values.iter().copied().filter(|&k| k >= 1 && k <= self.n).collect();
            ks.sort_unstable();
            ks.dedup();
            ks.into_iter().map(Some).collect()
        } else {
            vec![None]
        };
        let ps: Vec<Option<f64>> = if design.has_connectivity() {
            let mut ps: Vec<f64> = self.grid.p_values.iter().copied().filter(|p| (0.0..=1.0).contains(p)).collect();
            ps.sort_by(f64::total_cmp);
            ps.dedup();
            ps.into_iter().map(Some).collect()
        } else {
            vec![None]
        };
        let mut out = Vec::with_capacity(ks.len() * ps.len());
        for &k in &ks {
            for &p in &ps {
                out.push(self.make_config(design, k, p)?);
            }
        }
        Ok(out)
    }
}

/// All evaluated configurations of one design at one τ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Surface {
    pub design: Design,
    pub tau: f64,
    pub g_exp: f64,
    pub points: Vec<SurfacePoint>,
}

fn param_order(a: &DesignConfig, b: &DesignConfig) -> Ordering {
    a.k.unwrap_or(0)
        .cmp(&b.k.unwrap_or(0))
        .then_with(|| a.p.unwrap_or(0.0).total_cmp(&b.p.unwrap_or(0.0)))
        .then_with(|| a.design.cmp(&b.design))
}

impl Surface {
    /// Highest fitness at weight `r`; ties go to the lowest `k`, then lowest `p`.
    pub fn best(&self, r: f64) -> Option<&SurfacePoint> {
        best_of(&self.points, r)
    }

    pub fn max_fitness(&self, r: f64) -> Option<f64> {
        self.best(r).map(|p| p.fitness_at(r))
    }
}

pub(crate) fn best_of(points: &[SurfacePoint], r: f64) -> Option<&SurfacePoint> {
    let mut best: Option<&SurfacePoint> = None;
    for p in points {
        best = match best {
            None => Some(p),
            Some(b) => {
                let (fp, fb) = (p.fitness_at(r), b.fitness_at(r));
                if fp > fb || (fp == fb && param_order(&p.config, &b.config) == Ordering::Less) {
                    Some(p)
                } else {
                    Some(b)
                }
            }
        }
    }
    best
}

/// Evaluate the base grid of `design` at every τ in `taus`.
///
/// Each configuration's ensemble is generated once and reused across τ.
pub fn evaluate_surfaces(
    design: Design,
    taus: &[f64],
    g_exp: f64,
    seed: RunSeed,
    settings: &SearchSettings,
) -> Result<Vec<Surface>, OptimizerError> {
    let configs = settings.configurations(design)?;
    let evaluated = evaluate_many(&configs, taus, g_exp, seed, &settings.evaluator)?;
    let mut surfaces: Vec<Surface> =
        taus.iter().map(|&tau| Surface { design, tau, g_exp, points: Vec::with_capacity(configs.len()) }).collect();
    for per_tau in evaluated {
        for (surface, point) in surfaces.iter_mut().zip(per_tau) {
            surface.points.push(point);
        }
    }
    Ok(surfaces)
}

/// One level of connectivity refinement at weight `r`.
///
/// For each `k`, adjacent grid values of `p` whose fitness differs by more
/// than the grid's threshold get their midpoint evaluated and added.
pub fn refine_surface(
    surface: &mut Surface,
    r: f64,
    seed: RunSeed,
    settings: &SearchSettings,
) -> Result<usize, OptimizerError> {
    if !settings.grid.refine || !surface.design.has_connectivity() {
        return Ok(0);
    }
    let mut sorted: Vec<&SurfacePoint> = surface.points.iter().collect();
    sorted.sort_by(|a, b| param_order(&a.config, &b.config));
    let mut midpoints = Vec::new();
    for pair in sorted.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.config.k != b.config.k {
            continue;
        }
        if (a.fitness_at(r) - b.fitness_at(r)).abs() > settings.grid.refine_threshold {
            let mid = 0.5 * (a.config.p.unwrap() + b.config.p.unwrap());
            let exists = surface.points.iter().any(|p| p.config.k == a.config.k && p.config.p == Some(mid));
            if !exists {
                midpoints.push(settings.make_config(surface.design, a.config.k, Some(mid))?);
            }
        }
    }
    let added = evaluate_many(&midpoints, &[surface.tau], surface.g_exp, seed, &settings.evaluator)?;
    let count = added.len();
    surface.points.extend(added.into_iter().map(|mut v| v.remove(0)));
    surface.points.sort_by(|a, b| param_order(&a.config, &b.config));
    Ok(count)
}

/// Best configuration and full surface of one grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: SurfacePoint,
    pub surface: Surface,
}

/// Grid search of `design` at transmission probability `tau` and resilience
/// weight `r`.
pub fn grid_search(
    design: Design,
    tau: f64,
    r: f64,
    g_exp: f64,
    seed: RunSeed,
    settings: &SearchSettings,
) -> Result<SearchResult, OptimizerError> {
    check_weight(r)?;
    let mut surface = evaluate_surfaces(design, &[tau], g_exp, seed, settings)?.remove(0);
    refine_surface(&mut surface, r, seed, settings)?;
    let best = surface.best(r).ok_or(OptimizerError::EmptySurface)?.clone();
    Ok(SearchResult { best, surface })
}

pub(crate) fn check_weight(r: f64) -> Result<(), OptimizerError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(OptimizerError::InvalidWeight(r));
    }
    Ok(())
}

/// Optimal configuration of a design at one τ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub tau: f64,
    pub fitness: f64,
    /// Half-width of `fitness` from the resilience estimate.
    pub ci: f64,
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub r_mean: f64,
    pub w_mean: f64,
    pub avg_degree: f64,
    pub high_cv: bool,
}

impl CurvePoint {
    pub fn from_point(point: &SurfacePoint, r: f64) -> Self {
        CurvePoint {
            tau: point.tau,
            fitness: point.fitness_at(r),
            ci: point.fitness_ci(r),
            k: point.config.k,
            p: point.config.p,
            r_mean: point.r_mean,
            w_mean: point.w_mean,
            avg_degree: point.mean_degree,
            high_cv: point.high_cv(r),
        }
    }
}

/// Best fitness of a design as a function of τ, with the surfaces it was
/// computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessCurve {
    pub design: Design,
    pub r: f64,
    pub points: Vec<CurvePoint>,
    pub surfaces: Vec<Surface>,
}

/// Curves for several resilience weights from one set of base surfaces.
pub fn fitness_curves(
    design: Design,
    taus: &[f64],
    rs: &[f64],
    g_exp: f64,
    seed: RunSeed,
    settings: &SearchSettings,
) -> Result<Vec<FitnessCurve>, OptimizerError> {
    for &r in rs {
        check_weight(r)?;
    }
    let base = evaluate_surfaces(design, taus, g_exp, seed, settings)?;
    rs.iter()
        .map(|&r| {
            let mut surfaces = base.clone();
            let mut points = Vec::with_capacity(taus.len());
            for surface in &mut surfaces {
                refine_surface(surface, r, seed, settings)?;
                let best = surface.best(r).ok_or(OptimizerError::EmptySurface)?;
                points.push(CurvePoint::from_point(best, r));
            }
            Ok(FitnessCurve { design, r, points, surfaces })
        })
        .collect()
}

/// Grid search at every τ of `taus` for weight `r`.
pub fn fitness_curve(
    design: Design,
    taus: &[f64],
    r: f64,
    g_exp: f64,
    seed: RunSeed,
    settings: &SearchSettings,
) -> Result<FitnessCurve, OptimizerError> {
    Ok(fitness_curves(design, taus, &[r], g_exp, seed, settings)?.remove(0))
}
