//! Weierstrass division and preparation over `A[[y]]` for `A = k[[x]]` or
//! `Z_p`, and reduction of diagonal forms to the shape
//! `lambda * x^n * P_1 ... P_s` with `n` in `{0, 1}`.

mod newton;
mod normalize;
mod prep;
mod ring;

pub use newton::{irreducibility, Irreducibility};
pub use normalize::{
    normalize_form, CoefficientJson, FactorJson, IsometryRecord, NormalizedCoefficient, NormalizedForm,
};
pub use prep::{
    monicize, series_inverse, square_normalize, w_divide, w_prepare, DistinguishedPoly, Preparation, YSeries,
    MIN_SQUARE_PRECISION,
};
pub use ring::{APoly, Dvr};
