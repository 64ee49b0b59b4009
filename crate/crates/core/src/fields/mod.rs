pub mod bipoly;
pub mod expr;
pub mod ff;
pub mod padic;
pub mod poly;
pub mod ratfun;
pub mod series;
pub mod tower;

pub use bipoly::BiPoly;
pub use ff::{Embedding, Fe, FiniteField, ResidueExtension};
pub use padic::PAdic;
pub use poly::{Factorization, Poly};
pub use ratfun::RatFn;
pub use series::Series;
pub use tower::{Elem, Tower, DEFAULT_PRECISION};
