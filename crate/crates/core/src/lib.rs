pub mod acceptance;
pub mod cumulants;
pub mod ensembles;
pub mod harness;
pub mod error;
pub mod logdet;
pub mod moments;
pub mod quadrature;
pub mod series;
pub mod specfun;
pub mod sum;
pub mod text;
pub mod tolerances;
