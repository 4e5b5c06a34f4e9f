//! Semantic-to-layout class mapping and dense CRF refinement.

mod classes;
mod crf;

pub use classes::{
    build_unary, map_to_layout_classes, ClassMapping, LabelMap, LayoutClass, LayoutClassMap,
    UnaryField,
};
pub use crf::{crf_marginals, crf_refine, CrfParams, MeanField};
