use num_traits::One;

use crate::series::vars;
use crate::{Rational, Series, Vars};

/// Tail of an order-two normal form `a x² + tail(y)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Order2Tail {
    Zero,
    /// `+ y^{2k+1}`
    OddPow { k: u32 },
    /// `+ b y^{2k}`
    EvenPow { k: u32, b: Rational },
}

/// Normal forms of `F` in `z² - F(x, y)`, plus the cases that have none.
#[derive(Clone, Debug, PartialEq)]
pub enum NormalForm {
    /// `F(0) ≠ 0`: the germ is empty and the ring is zero.
    Unit,
    /// `ω(F) ≤ 1`; the surface is smooth.
    Smooth,
    Order2 { a: Rational, tail: Order2Tail },
    /// `x²y`
    X2Y,
    /// `x²y + (-1)^k a y^k`, `k ≥ 3`
    X2YPlus { k: u32, a: Rational },
    /// `x³ + a x y² + b y³` with no rational linear factor.
    IrreducibleCubic { a: Rational, b: Rational },
    /// `x³ + a y⁴`
    X3Y4 { a: Rational },
    /// `x³ + x y³`
    X3XY3,
    /// `x³ + y⁵`
    X3Y5,
    /// `x³ + B(y) x + C(y)` with `ω(B) ≥ 4`, `ω(C) ≥ 6`; `b`, `c` are the
    /// coefficients of `y⁴` in `B` and `y⁶` in `C`.
    X3Bare { b: Rational, c: Rational, prepared: Series },
    /// `ω(F) ≥ 4`.
    HighOrder { order: u32, series: Series },
    /// `F = 0`.
    NotReduced,
}

pub(crate) fn xy() -> Vars {
    vars(&["x", "y"])
}

fn mono(ex: u32, ey: u32, c: Rational) -> Series {
    Series::monomial(xy(), &[ex, ey], c)
}

impl NormalForm {
    /// Stable tag used in reports.
    pub fn tag(&self) -> &'static str {
        match self {
            NormalForm::Unit => "unit",
            NormalForm::Smooth => "smooth",
            NormalForm::Order2 { tail: Order2Tail::Zero, .. } => "ax2",
            NormalForm::Order2 { tail: Order2Tail::OddPow { .. }, .. } => "ax2+y^(2k+1)",
            NormalForm::Order2 { tail: Order2Tail::EvenPow { .. }, .. } => "ax2+by^(2k)",
            NormalForm::X2Y => "x2y",
            NormalForm::X2YPlus { .. } => "x2y+(-1)^k*ay^k",
            NormalForm::IrreducibleCubic { .. } => "irreducible_cubic",
            NormalForm::X3Y4 { .. } => "x3+ay4",
            NormalForm::X3XY3 => "x3+xy3",
            NormalForm::X3Y5 => "x3+y5",
            NormalForm::X3Bare { .. } => "x3_degenerate",
            NormalForm::HighOrder { .. } => "order_ge_4",
            NormalForm::NotReduced => "zero",
        }
    }

    /// Named parameters, in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        match self {
            NormalForm::Order2 { a, tail } => {
                let mut v = vec![("a", a.to_string())];
                match tail {
                    Order2Tail::Zero => {}
                    Order2Tail::OddPow { k } => v.push(("k", k.to_string())),
                    Order2Tail::EvenPow { k, b } => {
                        v.push(("k", k.to_string()));
                        v.push(("b", b.to_string()));
                    }
                }
                v
            }
            NormalForm::X2YPlus { k, a } => vec![("k", k.to_string()), ("a", a.to_string())],
            NormalForm::IrreducibleCubic { a, b } => vec![("a", a.to_string()), ("b", b.to_string())],
            NormalForm::X3Y4 { a } => vec![("a", a.to_string())],
            NormalForm::X3Bare { b, c, .. } => vec![("b", b.to_string()), ("c", c.to_string())],
            NormalForm::HighOrder { order, .. } => vec![("order", order.to_string())],
            _ => vec![],
        }
    }

    /// The normal form as a series in `x, y`. For the degenerate cases this
    /// is the series the classification stopped at.
    pub fn polynomial(&self) -> Series {
        let one = Rational::one;
        match self {
            NormalForm::Unit => Series::one(xy()),
            NormalForm::Smooth => mono(1, 0, one()),
            NormalForm::Order2 { a, tail } => {
                let sq = mono(2, 0, a.clone());
                match tail {
                    Order2Tail::Zero => sq,
                    Order2Tail::OddPow { k } => &sq + &mono(0, 2 * k + 1, one()),
                    Order2Tail::EvenPow { k, b } => &sq + &mono(0, 2 * k, b.clone()),
                }
            }
            NormalForm::X2Y => mono(2, 1, one()),
            NormalForm::X2YPlus { k, a } => {
                let c = if k % 2 == 0 { a.clone() } else { -a.clone() };
                &mono(2, 1, one()) + &mono(0, *k, c)
            }
            NormalForm::IrreducibleCubic { a, b } => {
                &(&mono(3, 0, one()) + &mono(1, 2, a.clone())) + &mono(0, 3, b.clone())
            }
            NormalForm::X3Y4 { a } => &mono(3, 0, one()) + &mono(0, 4, a.clone()),
            NormalForm::X3XY3 => &mono(3, 0, one()) + &mono(1, 3, one()),
            NormalForm::X3Y5 => &mono(3, 0, one()) + &mono(0, 5, one()),
            NormalForm::X3Bare { prepared, .. } => prepared.clone(),
            NormalForm::HighOrder { series, .. } => series.clone(),
            NormalForm::NotReduced => Series::exact_zero(xy()),
        }
    }

    /// Whether the normal form determines the germ up to coordinates.
    pub fn is_finitely_determined(&self) -> bool {
        !matches!(
            self,
            NormalForm::Unit
                | NormalForm::X2Y
                | NormalForm::Order2 { tail: Order2Tail::Zero, .. }
                | NormalForm::X3Bare { .. }
                | NormalForm::HighOrder { .. }
                | NormalForm::NotReduced
        )
    }

    /// The sign-sensitive parameter, when positivity of the answer hinges
    /// on one.
    pub fn sign_parameter(&self) -> Option<&Rational> {
        match self {
            NormalForm::Order2 { a, .. } | NormalForm::X2YPlus { a, .. } | NormalForm::X3Y4 { a } => Some(a),
            _ => None,
        }
    }
}
