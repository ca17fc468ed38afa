//! One-dimensional finite-element building blocks on a uniform mesh.
//!
//! Every 2D operator in this crate is a sum of tensor products of the 1D
//! stencils below, and every 2D interpolation is the tensor product of the 1D
//! rules. Offsets are measured in half mesh widths so that Q2 midpoint
//! unknowns sit on odd offsets.

use crate::scalar::Real;

/// Position of a 1D unknown inside its cell: at the left vertex or at the
/// cell midpoint (Q2 only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dof1 {
    Vertex,
    Mid,
}

impl Dof1 {
    /// Offset from the left vertex in half mesh widths.
    #[inline]
    pub fn half(self) -> i32 {
        match self {
            Dof1::Vertex => 0,
            Dof1::Mid => 1,
        }
    }
}

/// `row ← col` coupling: output at a `row` unknown receives `value` times the
/// `col` unknown located `offset` half-widths away.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry1<T> {
    pub row: Dof1,
    pub col: Dof1,
    pub offset: i32,
    pub value: T,
}

fn e<T: Real>(row: Dof1, col: Dof1, offset: i32, value: f64, scale: T) -> Entry1<T> {
    Entry1 { row, col, offset, value: T::lit(value) * scale }
}

use Dof1::{Mid, Vertex};

/// Linear stiffness `∫ φ_i' φ_j'`.
pub fn q1_stiffness<T: Real>(h: T) -> Vec<Entry1<T>> {
    let s = h.recip();
    vec![e(Vertex, Vertex, -2, -1.0, s), e(Vertex, Vertex, 0, 2.0, s), e(Vertex, Vertex, 2, -1.0, s)]
}

/// Linear mass `∫ φ_i φ_j`.
pub fn q1_mass<T: Real>(h: T) -> Vec<Entry1<T>> {
    let s = h / T::lit(6.0);
    vec![e(Vertex, Vertex, -2, 1.0, s), e(Vertex, Vertex, 0, 4.0, s), e(Vertex, Vertex, 2, 1.0, s)]
}

/// Linear test functions against derivatives of linear trial functions, `∫ φ_i ψ_j'`.
pub fn q1_derivative<T: Real>() -> Vec<Entry1<T>> {
    let s = T::one();
    vec![e(Vertex, Vertex, -2, -0.5, s), e(Vertex, Vertex, 2, 0.5, s)]
}

/// Quadratic stiffness.
pub fn q2_stiffness<T: Real>(h: T) -> Vec<Entry1<T>> {
    let s = (T::lit(3.0) * h).recip();
    vec![
        e(Vertex, Vertex, -2, 1.0, s),
        e(Vertex, Vertex, 0, 14.0, s),
        e(Vertex, Vertex, 2, 1.0, s),
        e(Vertex, Mid, -1, -8.0, s),
        e(Vertex, Mid, 1, -8.0, s),
        e(Mid, Vertex, -1, -8.0, s),
        e(Mid, Vertex, 1, -8.0, s),
        e(Mid, Mid, 0, 16.0, s),
    ]
}

/// Quadratic mass.
pub fn q2_mass<T: Real>(h: T) -> Vec<Entry1<T>> {
    let s = h / T::lit(30.0);
    vec![
        e(Vertex, Vertex, -2, -1.0, s),
        e(Vertex, Vertex, 0, 8.0, s),
        e(Vertex, Vertex, 2, -1.0, s),
        e(Vertex, Mid, -1, 2.0, s),
        e(Vertex, Mid, 1, 2.0, s),
        e(Mid, Vertex, -1, 2.0, s),
        e(Mid, Vertex, 1, 2.0, s),
        e(Mid, Mid, 0, 16.0, s),
    ]
}

/// Quadratic test functions against derivatives of linear trial functions.
pub fn q2q1_derivative<T: Real>() -> Vec<Entry1<T>> {
    let s = T::one() / T::lit(6.0);
    vec![
        e(Vertex, Vertex, -2, -1.0, s),
        e(Vertex, Vertex, 2, 1.0, s),
        e(Mid, Vertex, -1, -4.0, s),
        e(Mid, Vertex, 1, 4.0, s),
    ]
}

/// Quadratic test functions against linear trial functions.
pub fn q2q1_mass<T: Real>(h: T) -> Vec<Entry1<T>> {
    let s = h / T::lit(3.0);
    vec![e(Vertex, Vertex, 0, 1.0, s), e(Mid, Vertex, -1, 1.0, s), e(Mid, Vertex, 1, 1.0, s)]
}

/// One term of a 1D interpolation rule: the fine unknown receives `weight`
/// times the coarse unknown of type `coarse` in coarse cell `j + cell`, where
/// `j` is the coarse cell containing the fine cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpTerm {
    pub coarse: Dof1,
    pub cell: i32,
    pub weight: f64,
}

/// Nodal interpolation from a mesh of width `2h` to width `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp1 {
    Linear,
    Quadratic,
}

impl Interp1 {
    pub fn fine_types(self) -> &'static [Dof1] {
        match self {
            Interp1::Linear => &[Vertex],
            Interp1::Quadratic => &[Vertex, Mid],
        }
    }

    /// Terms for a fine unknown of type `fine` in fine cell `2j + parity`.
    pub fn terms(self, fine: Dof1, parity: usize) -> &'static [InterpTerm] {
        const fn t(coarse: Dof1, cell: i32, weight: f64) -> InterpTerm {
            InterpTerm { coarse, cell, weight }
        }
        const LIN_EVEN: [InterpTerm; 1] = [t(Vertex, 0, 1.0)];
        const LIN_ODD: [InterpTerm; 2] = [t(Vertex, 0, 0.5), t(Vertex, 1, 0.5)];
        const QV_EVEN: [InterpTerm; 1] = [t(Vertex, 0, 1.0)];
        const QV_ODD: [InterpTerm; 1] = [t(Mid, 0, 1.0)];
        const QM_EVEN: [InterpTerm; 3] = [t(Vertex, 0, 0.375), t(Mid, 0, 0.75), t(Vertex, 1, -0.125)];
        const QM_ODD: [InterpTerm; 3] = [t(Vertex, 0, -0.125), t(Mid, 0, 0.75), t(Vertex, 1, 0.375)];
        match (self, fine, parity) {
            (Interp1::Linear, Vertex, 0) => &LIN_EVEN,
            (Interp1::Linear, Vertex, 1) => &LIN_ODD,
            (Interp1::Quadratic, Vertex, 0) => &QV_EVEN,
            (Interp1::Quadratic, Vertex, 1) => &QV_ODD,
            (Interp1::Quadratic, Mid, 0) => &QM_EVEN,
            (Interp1::Quadratic, Mid, 1) => &QM_ODD,
            _ => panic!("no interpolation rule for {fine:?} under {self:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_sum(st: &[Entry1<f64>], row: Dof1) -> f64 {
        st.iter().filter(|e| e.row == row).map(|e| e.value).sum()
    }

    #[test]
    fn stiffness_annihilates_constants() {
        for st in [q1_stiffness(0.1), q2_stiffness(0.1)] {
            assert!(row_sum(&st, Vertex).abs() < 1e-12);
        }
        assert!(row_sum(&q2_stiffness(0.1), Mid).abs() < 1e-12);
    }

    #[test]
    fn mass_rows_integrate_test_functions() {
        // vertex basis integrates to h, quadratic vertex basis to h/3, bubble to 2h/3
        let h = 0.25;
        assert!((row_sum(&q1_mass(h), Vertex) - h).abs() < 1e-14);
        assert!((row_sum(&q2_mass(h), Vertex) - h / 3.0).abs() < 1e-14);
        assert!((row_sum(&q2_mass(h), Mid) - 2.0 * h / 3.0).abs() < 1e-14);
        assert!((row_sum(&q2q1_mass(h), Vertex) - h / 3.0).abs() < 1e-14);
        assert!((row_sum(&q2q1_mass(h), Mid) - 2.0 * h / 3.0).abs() < 1e-14);
    }

    #[test]
    fn interpolation_reproduces_quadratics() {
        // coarse nodal values of x^2 with coarse cell width 2 (vertex at 2j, mid at 2j+1)
        let f = |x: f64| x * x - 3.0 * x + 1.0;
        for parity in 0..2 {
            for &fine in Interp1::Quadratic.fine_types() {
                let j = 3;
                let x = (2 * j + parity) as f64 + 0.5 * fine.half() as f64;
                let v: f64 = Interp1::Quadratic
                    .terms(fine, parity as usize)
                    .iter()
                    .map(|t| t.weight * f((2 * (j + t.cell) + t.coarse.half()) as f64))
                    .sum();
                assert!((v - f(x)).abs() < 1e-12);
            }
        }
    }
}
