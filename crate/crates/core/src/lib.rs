pub mod frontend;
pub mod logic;
pub mod preprocess;
pub mod sat;
pub mod constraints;
pub mod sorts;
pub mod encode;
pub mod model;
pub mod pipeline;
pub mod search;
