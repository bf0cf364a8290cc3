//! Matrices of the standard gate set (qelib1 conventions).

use std::f64::consts::FRAC_1_SQRT_2;

use super::{Matrix2, Matrix4};
use crate::tensor::{C64, ONE, ZERO};

const I: C64 = C64::new(0.0, 1.0);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn id() -> Matrix2 {
    [ONE, ZERO, ZERO, ONE]
}

pub fn h() -> Matrix2 {
    let s = re(FRAC_1_SQRT_2);
    [s, s, s, -s]
}

pub fn x() -> Matrix2 {
    [ZERO, ONE, ONE, ZERO]
}

pub fn y() -> Matrix2 {
    [ZERO, -I, I, ZERO]
}

pub fn z() -> Matrix2 {
    [ONE, ZERO, ZERO, -ONE]
}

pub fn s() -> Matrix2 {
    [ONE, ZERO, ZERO, I]
}

pub fn sdg() -> Matrix2 {
    [ONE, ZERO, ZERO, -I]
}

pub fn t() -> Matrix2 {
    u1(std::f64::consts::FRAC_PI_4)
}

pub fn tdg() -> Matrix2 {
    u1(-std::f64::consts::FRAC_PI_4)
}

pub fn sx() -> Matrix2 {
    let a = C64::new(0.5, 0.5);
    let b = C64::new(0.5, -0.5);
    [a, b, b, a]
}

pub fn sxdg() -> Matrix2 {
    let a = C64::new(0.5, -0.5);
    let b = C64::new(0.5, 0.5);
    [a, b, b, a]
}

pub fn u3(theta: f64, phi: f64, lambda: f64) -> Matrix2 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [
        re(c),
        -phase(lambda) * s,
        phase(phi) * s,
        phase(phi + lambda) * c,
    ]
}

pub fn u2(phi: f64, lambda: f64) -> Matrix2 {
    u3(std::f64::consts::FRAC_PI_2, phi, lambda)
}

/// Also known as `p`.
pub fn u1(lambda: f64) -> Matrix2 {
    [ONE, ZERO, ZERO, phase(lambda)]
}

pub fn rx(theta: f64) -> Matrix2 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [re(c), -I * s, -I * s, re(c)]
}

pub fn ry(theta: f64) -> Matrix2 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [re(c), re(-s), re(s), re(c)]
}

pub fn rz(theta: f64) -> Matrix2 {
    [phase(-theta / 2.0), ZERO, ZERO, phase(theta / 2.0)]
}

/// Block-diagonal `diag(I, u)`: `u` acts on the second qubit when the first is set.
pub fn controlled(u: &Matrix2) -> Matrix4 {
    let mut m = [ZERO; 16];
    m[0] = ONE;
    m[5] = ONE;
    m[10] = u[0];
    m[11] = u[1];
    m[14] = u[2];
    m[15] = u[3];
    m
}

pub fn cx() -> Matrix4 {
    controlled(&x())
}

pub fn cy() -> Matrix4 {
    controlled(&y())
}

pub fn cz() -> Matrix4 {
    controlled(&z())
}

pub fn ch() -> Matrix4 {
    controlled(&h())
}

pub fn swap() -> Matrix4 {
    let mut m = [ZERO; 16];
    m[0] = ONE;
    m[4 + 2] = ONE;
    m[2 * 4 + 1] = ONE;
    m[15] = ONE;
    m
}

pub fn rzz(theta: f64) -> Matrix4 {
    let (a, b) = (phase(-theta / 2.0), phase(theta / 2.0));
    let mut m = [ZERO; 16];
    m[0] = a;
    m[5] = b;
    m[10] = b;
    m[15] = a;
    m
}

pub fn rxx(theta: f64) -> Matrix4 {
    let (c, s) = (re((theta / 2.0).cos()), -I * (theta / 2.0).sin());
    let mut m = [ZERO; 16];
    for k in 0..4 {
        m[k * 4 + k] = c;
        m[k * 4 + (3 - k)] = s;
    }
    m
}

/// Kronecker product `a ⊗ b`, with `a` on the first (more significant) qubit.
pub fn kron(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    let mut m = [ZERO; 16];
    for r in 0..4 {
        for c in 0..4 {
            m[r * 4 + c] = a[(r / 2) * 2 + c / 2] * b[(r % 2) * 2 + c % 2];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, GateKind};

    fn close(a: &[C64], b: &[C64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    fn mul2(a: &Matrix2, b: &Matrix2) -> Matrix2 {
        let mut m = [ZERO; 4];
        for r in 0..2 {
            for c in 0..2 {
                m[r * 2 + c] = a[r * 2] * b[c] + a[r * 2 + 1] * b[2 + c];
            }
        }
        m
    }

    #[test]
    fn all_library_gates_are_unitary() {
        let ones: Vec<Matrix2> = vec![
            id(),
            h(),
            x(),
            y(),
            z(),
            s(),
            sdg(),
            t(),
            tdg(),
            sx(),
            sxdg(),
            u3(0.3, 1.1, -0.7),
            u2(0.2, 0.9),
            u1(0.4),
            rx(1.3),
            ry(-0.8),
            rz(2.1),
        ];
        for m in ones {
            Gate::new_unchecked(
                "g",
                GateKind::One {
                    target: 0,
                    matrix: m,
                },
            )
            .check_unitary()
            .unwrap();
        }
        let twos: Vec<Matrix4> = vec![
            cx(),
            cy(),
            cz(),
            ch(),
            swap(),
            rzz(0.7),
            rxx(1.9),
            controlled(&u3(0.1, 0.2, 0.3)),
            kron(&h(), &t()),
        ];
        for m in twos {
            Gate::new_unchecked(
                "g",
                GateKind::Two {
                    targets: [0, 1],
                    matrix: m,
                },
            )
            .check_unitary()
            .unwrap();
        }
    }

    #[test]
    fn algebraic_identities() {
        assert!(close(&mul2(&s(), &s()), &z()));
        assert!(close(&mul2(&t(), &t()), &s()));
        assert!(close(&mul2(&sx(), &sx()), &x()));
        assert!(close(&mul2(&sx(), &sxdg()), &id()));
        assert!(close(&mul2(&h(), &h()), &id()));
        // u3(π, 0, π) = X, u2(0, π) = H
        assert!(close(
            &u3(std::f64::consts::PI, 0.0, std::f64::consts::PI),
            &x()
        ));
        assert!(close(&u2(0.0, std::f64::consts::PI), &h()));
    }
}
