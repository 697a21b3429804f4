use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stressgate_core::benchmarks::percentile;
use stressgate_core::evaluator::SOLID_THRESHOLD;
use stressgate_core::fea::Mesh;

use super::{Interpreter, InterpreterContext, Proposal};
use crate::action::Action;

/// Solid element with the largest von Mises stress; ties go to the lowest
/// index. `None` without solid elements.
pub fn max_stress_element(von_mises: &[f64], densities: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (e, (&s, &r)) in von_mises.iter().zip(densities).enumerate() {
        if r > SOLID_THRESHOLD && best.is_none_or(|(_, b)| s > b) {
            best = Some((e, s));
        }
    }
    best.map(|(e, _)| e)
}

/// Solid elements at or above the median solid stress, in index order.
pub fn hotspot_candidates(von_mises: &[f64], densities: &[f64]) -> Vec<usize> {
    let solid: Vec<usize> = (0..densities.len()).filter(|&e| densities[e] > SOLID_THRESHOLD).collect();
    let values: Vec<f64> = solid.iter().map(|&e| von_mises[e]).collect();
    let Ok(median) = percentile(&values, 50.0) else {
        return Vec::new();
    };
    solid.into_iter().filter(|&e| von_mises[e] >= median).collect()
}

fn planar_centroid(mesh: &Mesh, e: usize) -> [f64; 2] {
    let c = mesh.centroid(e);
    [c[0], c[1]]
}

/// One hotspot circle on the numerical stress maximum.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactHotspot;

impl Interpreter for ExactHotspot {
    fn propose(&mut self, ctx: &InterpreterContext<'_>) -> Proposal {
        let actions = max_stress_element(&ctx.stress.von_mises, ctx.densities)
            .map(|e| vec![Action::hotspot(1, planar_centroid(&ctx.spec.mesh, e))])
            .unwrap_or_default();
        Proposal::ranked(actions)
    }
}

/// One hotspot circle on a uniformly drawn element of the upper half of the
/// solid stress distribution.
#[derive(Debug, Clone)]
pub struct RandomRegion {
    rng: ChaCha8Rng,
}

impl RandomRegion {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Draws one candidate element.
    pub fn draw(&mut self, von_mises: &[f64], densities: &[f64]) -> Option<usize> {
        let candidates = hotspot_candidates(von_mises, densities);
        if candidates.is_empty() {
            return None;
        }
        Some(candidates[self.rng.gen_range(0..candidates.len())])
    }
}

impl Interpreter for RandomRegion {
    fn propose(&mut self, ctx: &InterpreterContext<'_>) -> Proposal {
        let actions = self
            .draw(&ctx.stress.von_mises, ctx.densities)
            .map(|e| vec![Action::hotspot(1, planar_centroid(&ctx.spec.mesh, e))])
            .unwrap_or_default();
        Proposal::ranked(actions)
    }
}
