#pragma once

// Text printed by `qclass explain-conventions`.

#include <string_view>

namespace qclass {

inline constexpr std::string_view kConventionsHandbook = R"(qclass sign conventions
=======================

Parity and Koszul rule
  Every coordinate is even or odd. Moving an object of parity a past one of
  parity b costs (-1)^(a*b). Polynomials are stored in normal form: odd
  coordinates inside a monomial appear in chart order, so t2*t1 is read as
  -t1*t2.

Derivatives
  d/dz acts from the left. For an odd coordinate it first moves z to the
  front: d/dt2 (t1*t2) = -t1.

Tensors
  A (n,m) tensor is written as a sum of coefficient * basis word, with the
  coefficient on the LEFT of the word, upper slots (d/dz) before lower
  slots (dz). Its parity is the parity of coefficient plus word; all
  components of a tensor share one parity.
  The pairing is <dz^j, d/dz_k> = delta^j_k for an adjacent pair "dz d/dz";
  any other contraction first moves the paired symbols together with
  Koszul signs.
  Reports list components as [index-tuple, expression] with the index
  tuple naming coordinates, upper slots first.

Endomorphisms
  A (1,1) tensor A acts on vector fields by contracting its lower slot:
  A(d/dz_j) = sum_i A^i_j d/dz_i. Composition (AB)(X) = A(B(X)).
  Supertrace: Str A = sum_i (-1)^e_i A^i_i, where e_i is the parity of
  coordinate i. It vanishes on every supercommutator
  [A,B] = AB - (-1)^(|A||B|) BA.

Vector fields and Q
  [X,Y] = XY - (-1)^(|X||Y|) YX. Q must be odd with [Q,Q] = 0; the
  coboundary is delta = L_Q, the Lie derivative along Q, extended to
  tensors as a derivation commuting with contractions.

Connections
  nabla_{d/dz_i} d/dz_j = sum_k Gamma^k_ij d/dz_k with graded symmetry
  Gamma^k_ij = (-1)^(e_i e_j) Gamma^k_ji. In a manifest an entry may be
  given on one side only; its partner is filled in with this sign.
  Curvature: R_XY = [nabla_X, nabla_Y] - nabla_[X,Y].

Lambda and Omega
  Lambda = nabla_Q - L_Q on vector fields, an odd endomorphism:
  Lambda(Y) = (-1)^|Y| nabla_Y Q.
  Omega_X = nabla_X Lambda - R_XQ. As a tensor Omega is odd, with the
  form slot first and the endomorphism input last; Omega_X has parity
  |X| + 1.

Series
  A_n = Str(Lambda^(2n+1))           flat connections only, odd scalar
  B_n = Omega o ... o Omega (n)      (1, n+1) tensor, B_0 = identity
  C_n = Str B_n                      (0, n) tensor of parity n
  P_n = Str((R_QQ)^(2n))             even scalar
  Qpow_n = Q (x) ... (x) Q (n)       (n, 0) tensor
  Evaluating B_n on coordinate fields a_1..a_n gives
  Omega_a1 o ... o Omega_an after the sign (-1)^(sum_k e(a_k)(k-1)).

Transgression
  For connections nabla_0, nabla_1 the tool works on M x R^(1|1) with
  extra coordinates __t (even) and __theta (odd), field Q + __theta d/d__t
  and connection t*Gamma_1 + (1-t)*Gamma_0. Psi is the __theta-derivative
  of the lifted cocycle integrated over t in [0,1]; the report checks
  delta Psi = C[nabla_1] - C[nabla_0] exactly. Names starting with "__"
  are reserved.

Builders
  odd-tangent(n):         x1..xn even, dx1..dxn odd, Q = sum dx_i d/dx_i
  chevalley-eilenberg:    t1..tq odd, Q^k = -1/2 sum c^k_ij t_i t_j
                          (indices 1-based, c^k_ji = -c^k_ij filled in)
  lie-algebroid:          x1..xn even, t1..tq odd,
                          Q = t_a rho^i_a d/dx_i - 1/2 C^c_ab t_a t_b d/dt_c

Exactness
  Solutions of delta S = T are searched with even-coordinate degree at
  most the bound in every component, by exact elimination over Q. On a
  chart without even coordinates the search is complete and a negative
  verdict is conclusive.
)";

}  // namespace qclass
