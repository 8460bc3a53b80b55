//! Graph semantics for equation strings: point membership and windowed
//! rasterization, with the invalid-equation fallback rendering.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{eval_expr, Budget, Env, EvalOutcome, Equation, ProductPlanner};
use crate::glyphs::{glyph_of_string, rasterize, Bitmap, Font, Symbol, Window, WindowTooLarge};

/// Tri-state membership of a point in a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    In,
    /// `undefined` marks points excluded because evaluation hit a domain
    /// error rather than a nonzero value.
    Out { undefined: bool },
    Unknown(String),
}

/// Decide whether the point satisfies the equation: In iff lhs − rhs
/// evaluates to exact zero.
pub fn graph_membership(
    eq: &Equation,
    x: &BigRational,
    y: &BigRational,
    budget: &Budget,
    planner: &dyn ProductPlanner,
) -> Membership {
    let mut env = Env::new();
    env.insert('x', x.clone());
    env.insert('y', y.clone());
    membership_in_env(eq, &env, budget, planner)
}

pub fn membership_in_env(
    eq: &Equation,
    env: &Env,
    budget: &Budget,
    planner: &dyn ProductPlanner,
) -> Membership {
    match eval_expr(&eq.defect(), env, budget, planner) {
        EvalOutcome::Exact(v) => {
            if v == BigRational::from_integer(BigInt::from(0)) {
                Membership::In
            } else {
                Membership::Out { undefined: false }
            }
        }
        EvalOutcome::Undefined(_) => Membership::Out { undefined: true },
        EvalOutcome::Unknown(r) => Membership::Unknown(r),
    }
}

/// The fixed fallback text rendered for invalid equations. Spelled with
/// alphabet symbols only (the alphabet has no space character), so its glyph
/// set is nonempty by construction.
pub const ERROR_STRING: &str = "error(invalidequation";

/// Output of windowed graphing.
#[derive(Debug)]
pub struct GrOutput {
    pub bitmap: Bitmap,
    /// Pixels whose membership could not be decided within budget.
    pub unknown_mask: Bitmap,
    /// True when the input failed to parse and the error text was rendered.
    pub invalid_input: bool,
    /// Pixel-center sampling is exact only for equations that are constant
    /// on pixel interiors; for arbitrary input it is a heuristic.
    pub heuristic: bool,
    pub in_count: usize,
    pub out_count: usize,
    pub unknown_count: usize,
    pub undefined_count: usize,
}

/// Graph a string: parse it, and rasterize membership at every pixel center
/// in the window. Invalid strings render the fixed error text instead
/// (an arbitrary nonempty set, so the empty string is not self-graphing).
pub fn gr(
    text: &str,
    window: Window,
    font: &Font,
    budget: &Budget,
    planner: &dyn ProductPlanner,
    pixel_budget: u128,
) -> Result<GrOutput, WindowTooLarge> {
    let g = font.resolution();
    let eq = match super::parse_equation(text) {
        Ok(eq) => eq,
        Err(_) => {
            let err_syms = Symbol::parse_str(ERROR_STRING).expect("error string is alphabetic");
            let set = glyph_of_string(&err_syms, font);
            let bitmap = rasterize(&set, window, pixel_budget)?;
            let unknown_mask = Bitmap::new(window, g, pixel_budget)?;
            let in_count = bitmap.count_lit();
            let out_count = bitmap.width * bitmap.height - in_count;
            return Ok(GrOutput {
                bitmap,
                unknown_mask,
                invalid_input: true,
                heuristic: false,
                in_count,
                out_count,
                unknown_count: 0,
                undefined_count: 0,
            });
        }
    };

    let mut bitmap = Bitmap::new(window, g, pixel_budget)?;
    let mut unknown_mask = Bitmap::new(window, g, pixel_budget)?;
    let (mut in_count, mut out_count, mut unknown_count, mut undefined_count) = (0, 0, 0, 0);
    let two_g = BigInt::from(2u32 * g);
    for row in 0..bitmap.height {
        for col in 0..bitmap.width {
            // Center of the pixel, exactly: ((2c+1)/2G, (2r+1)/2G) offset by
            // the window origin.
            let x = BigRational::new(
                BigInt::from(2 * (window.x0 * g as i64 + col as i64) + 1),
                two_g.clone(),
            );
            let y = BigRational::new(
                BigInt::from(2 * (window.y0 * g as i64 + row as i64) + 1),
                two_g.clone(),
            );
            match graph_membership(&eq, &x, &y, budget, planner) {
                Membership::In => {
                    bitmap.set(col, row, true);
                    in_count += 1;
                }
                Membership::Out { undefined } => {
                    out_count += 1;
                    if undefined {
                        undefined_count += 1;
                    }
                }
                Membership::Unknown(_) => {
                    unknown_mask.set(col, row, true);
                    unknown_count += 1;
                }
            }
        }
    }
    Ok(GrOutput {
        bitmap,
        unknown_mask,
        invalid_input: false,
        heuristic: true,
        in_count,
        out_count,
        unknown_count,
        undefined_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqlang::NoPlans;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn circle_membership() {
        let eq = super::super::parse_equation("x^2+y^2=1").unwrap();
        let b = Budget::default();
        assert_eq!(
            graph_membership(&eq, &rat(1), &rat(0), &b, &NoPlans),
            Membership::In
        );
        assert_eq!(
            graph_membership(&eq, &rat(0), &rat(0), &b, &NoPlans),
            Membership::Out { undefined: false }
        );
    }

    #[test]
    fn empty_graph_equation() {
        let eq = super::super::parse_equation("x^2=0−1").unwrap();
        let b = Budget::default();
        for (x, y) in [(0, 0), (1, 2), (-3, 5), (7, -11)] {
            assert_eq!(
                graph_membership(&eq, &rat(x), &rat(y), &b, &NoPlans),
                Membership::Out { undefined: false }
            );
        }
    }

    #[test]
    fn invalid_input_renders_error_text() {
        let font = Font::builtin_g8();
        let out = gr(
            "+=",
            Window::new(0, 0, ERROR_STRING.chars().count() as i64, 1),
            &font,
            &Budget::default(),
            &NoPlans,
            crate::glyphs::DEFAULT_PIXEL_BUDGET,
        )
        .unwrap();
        assert!(out.invalid_input);
        assert!(out.bitmap.count_lit() > 0, "error rendering must be nonempty");
    }

    #[test]
    fn division_by_zero_pixels_are_out_and_recorded() {
        // y·(1/x) = 1: undefined along x = 0.
        let font = Font::builtin_g8();
        let out = gr(
            "y·(1/x)=1",
            Window::new(-1, -1, 1, 1),
            &font,
            &Budget::default(),
            &NoPlans,
            crate::glyphs::DEFAULT_PIXEL_BUDGET,
        )
        .unwrap();
        assert_eq!(out.undefined_count, 0, "pixel centers never hit x=0 exactly");
        let eq = super::super::parse_equation("y·(1/x)=1").unwrap();
        assert_eq!(
            graph_membership(&eq, &rat(0), &rat(1), &Budget::default(), &NoPlans),
            Membership::Out { undefined: true }
        );
    }
}
