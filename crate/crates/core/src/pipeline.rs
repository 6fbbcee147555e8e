//! The whole construction from an instance to C(B) in one call.

use crate::compose::{compose, BrokenChimera};
use crate::enlarge::{triple_and_extend, EnlargedRepresentation};
use crate::error::{Error, Result};
use crate::gadget::VertexGadget;
use crate::instance::{default_side_bound, embed_grid, EmbedBudget, EmbedOutcome, InstanceGraph, RectangularRepresentation};
use crate::tentacle::TentaclePatterns;

#[derive(Clone, Debug)]
pub struct Built {
    pub representation: RectangularRepresentation,
    pub enlarged: EnlargedRepresentation,
    pub chimera: BrokenChimera,
}

/// Embeds `b` in a square of side `side_bound` (default three per vertex).
pub fn embed(b: &InstanceGraph, side_bound: Option<usize>, budget: EmbedBudget, seed: u64) -> Result<RectangularRepresentation> {
    let side = side_bound.unwrap_or_else(|| default_side_bound(b));
    match embed_grid(b, side, budget, seed) {
        EmbedOutcome::Found(r) => Ok(r),
        EmbedOutcome::NotFound => Err(Error::EmbeddingFailed(format!("search space exhausted within side {side}"))),
        EmbedOutcome::Timeout => Err(Error::Timeout(format!("embedding within side {side}"))),
    }
}

pub fn build_from_representation(
    b: &InstanceGraph,
    r: RectangularRepresentation,
    gadget: &VertexGadget,
    patterns: &TentaclePatterns,
) -> Result<Built> {
    let enlarged = triple_and_extend(&r, b)?;
    let chimera = compose(b, &r, &enlarged, gadget, patterns)?;
    Ok(Built { representation: r, enlarged, chimera })
}

/// Embeds, enlarges and composes with the shipped fixtures.
pub fn build_shipped(b: &InstanceGraph, seed: u64) -> Result<Built> {
    let r = embed(b, None, EmbedBudget::default(), seed)?.normalized();
    build_from_representation(b, r, &VertexGadget::shipped(), &TentaclePatterns::shipped())
}
