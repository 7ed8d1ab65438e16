//! Markoff-triple graphs over prime fields.

pub mod bigfield;
pub mod factor;
pub mod field;
pub mod surface;
pub mod enumerate;
pub mod rotation;
pub mod hash;
pub mod pathfinder;
pub mod lifting;
pub mod analytics;
pub mod parse;
