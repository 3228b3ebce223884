pub mod asym;
pub mod bivar;
pub mod diagram;
pub mod error;
pub mod joint;
pub mod mseries;
pub mod oracle;
pub mod real;
mod roots;
pub mod secondary;
pub mod series;
pub mod shapes;

pub use bivar::BivarPoly;
pub use diagram::JointDiagram;
pub use error::{Error, Result};
pub use mseries::{Caps, Exponent, MSeries};
pub use real::{Real, DEFAULT_PRECISION_BITS};
pub use secondary::{secondary_gf, SecondaryParams};
pub use series::{Rational, Series, DEFAULT_ORDER};
pub use shapes::{shape_gf_closed, shape_gf_grammar, ShapeClass};
pub use joint::{joint_gf, joint_gf_via_mseries, InflationBundle};
pub use asym::{asymptotic_constant, dominant_singularity, q_polynomial, AsymptoticEstimate};
