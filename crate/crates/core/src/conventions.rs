//! Sign and orientation conventions used throughout the crate.

use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Convention {
    pub topic: &'static str,
    pub statement: &'static str,
}

const LEDGER: &[Convention] = &[
    Convention {
        topic: "contraction",
        statement: "iota(v_1,...,v_q) alpha is the (p-q)-form alpha(v_1,...,v_q, -, ..., -): vectors fill the leading slots",
    },
    Convention {
        topic: "symplectic form",
        statement: "omega = sum_i dx_i ^ dy_i on every chart, with (y, x) action-angle coordinates and unit fibre lattice",
    },
    Convention {
        topic: "multivector contraction",
        statement: "iota(d/dx_I) Omega_0 = (-1)^M dx_{I*}, Omega_0 = dx_1^...^dx_n, I* the complement of I, \
                    M = #{(i, j) : i in I, j in I*, i > j}",
    },
    Convention {
        topic: "bigraded basis",
        statement: "dy_J (x) d/dx_I has bidegree (-|I|, |J|) and maps to dy_J ^ iota(d/dx_I) Omega_0",
    },
    Convention {
        topic: "graded commutation",
        statement: "a b = (-1)^(p p' + q q') b a for bidegrees (p, q), (p', q'); the same sign enters the order-defect recursion",
    },
    Convention {
        topic: "primed differential",
        statement: "d_x' acts on bidegree (p, q) as (-1)^(p+q+1) d_x; the bracket is the order-2 defect of d_x'",
    },
    Convention {
        topic: "holomorphic form",
        statement: "Omega = V exp(beta) = V ^_i (dx_i + sum_j beta_ij dy_j), beta = b + i g^{-1}, V = det(Im beta)^(-1/2) > 0",
    },
    Convention {
        topic: "volume normalization",
        statement: "omega^n/n! = (-1)^(n(n-1)/2) (i/2)^n Omega ^ conj(Omega) when V^2 det(Im beta) = 1",
    },
    Convention {
        topic: "orientation",
        statement: "fibres are oriented by dx_1^...^dx_n (V > 0); the base by dy_1^...^dy_n; \
                    the total space and its dual by omega^n/n!",
    },
    Convention {
        topic: "cycle pairing",
        statement: "e_i^* <-> (-1)^(i-1) e_1^...^e_i(omitted)^...^e_n; the alternative order (-1)^(n-i) multiplies \
                    the period identities by (-1)^(n-1)",
    },
    Convention {
        topic: "two-torus cycles",
        statement: "on T^2 the 1-cycle e_1 (x_1-circle) is the omitted-index cycle of e_2^*, so e_1 <-> -e_2^*",
    },
    Convention {
        topic: "period embedding",
        statement: "gamma maps to the covector v -> -int_gamma iota(v) Im Omega_n, Omega_n = Omega / int_fibre Omega",
    },
    Convention {
        topic: "loops on the sphere",
        statement: "gamma_i run counterclockwise around the i-th marked point; the relation gamma_k...gamma_1 = 1 \
                    is read right to left, so T_k...T_1 = I",
    },
    Convention {
        topic: "fibre volume (K3)",
        statement: "after phase alignment Vol(S_b) = Re Omega . E, and Im Omega_n = Im Omega / Vol(S_b), which is Re Omega_K / Vol(S_b)",
    },
];

/// The full convention ledger.
pub fn ledger() -> &'static [Convention] {
    LEDGER
}
