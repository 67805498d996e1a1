pub mod divgeo;
pub mod endo;
pub mod idealeng;
pub mod linalg;
pub mod logchern;
pub mod polyring;
pub mod random;
pub mod univariate;
pub mod verdict;
