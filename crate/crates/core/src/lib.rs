pub mod addressing;
pub mod graph;
pub mod par;
pub mod lp;
pub mod bounds;
pub mod exact;
pub mod lee;
pub mod product;
