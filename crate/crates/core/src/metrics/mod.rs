//! Specialisation, relatedness and complexity indicators.

mod categories;
mod rca;
mod reflections;
mod relatedness;

pub use categories::{
    category_complexity, category_relatedness, detect_core, Categories, CategoryComplexity, CategoryPairs,
    CategorySpec, CorePartition, AI_CORE, AI_RELATED, DEFAULT_CATEGORIES, SURROUNDING,
};
pub use rca::{binarize, log10_rca, rca, BinaryRcaMatrix, RcaMatrix, Transform};
pub use reflections::{country_complexity, method_of_reflections, ComplexityAxis, ComplexityVector};
pub use relatedness::{association_strength, overall_relatedness, RelatednessMatrix};
