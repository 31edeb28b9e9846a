#pragma once

#include "cel/tensor.hpp"

namespace cel::curv {

// Curvature stack at one point. Orders step down from the metric order k:
// gamma at k-1, the (0,4) curvature and everything algebraic in it at k-2.
// Conventions:
//   R(X,Y,Z,T) = g(nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z, T)
//   Ric(X,Y)   = trace{V -> R(V,X)Y} = g^{ab} R_{aXYb},  S = g^{jk} Ric_jk
//   schouten   = (Ric - S/(2(n-1)) g) / (n-2),  weyl = R - g (*) schouten
// where (*) is the Kulkarni-Nomizu product. On the unit sphere Ric = (n-1) g.
struct CurvaturePack {
    dsl::MetricJets metric;
    Tensor gamma;    // gamma^k_{ij}, upper index first
    Tensor riemann;  // (0,4)
    Tensor ricci;    // (0,2)
    jets::Jet scalar;
    Tensor schouten; // (0,2)
    Tensor weyl;     // (0,4)
};

// gamma^k_{ij} = g^{kl}(d_i g_{jl} + d_j g_{il} - d_l g_{ij}) / 2
Tensor christoffel(const dsl::MetricJets& m);

// R, Ric, S from gamma; enforces pair symmetries and the first Bianchi
// identity on the result.
Tensor riemann(const dsl::MetricJets& m, const Tensor& gamma);
Tensor ricci_from_riemann(const dsl::MetricJets& m, const Tensor& riem);
jets::Jet scalar_curvature(const dsl::MetricJets& m, const Tensor& ric);

// (a (*) b)(X,Y,Z,T) = a(X,T)b(Y,Z) + a(Y,Z)b(X,T) - a(X,Z)b(Y,T) - a(Y,T)b(X,Z)
Tensor kulkarni_nomizu(const Tensor& a, const Tensor& b);

Tensor schouten(const dsl::MetricJets& m, const Tensor& ric, const jets::Jet& scal);
// weyl = riemann - g (*) schouten; enforces total tracelessness.
Tensor weyl(const dsl::MetricJets& m, const Tensor& riem, const Tensor& schout);

// Full stack; requires metric order >= 2 and dim >= 3.
CurvaturePack build_curvature_pack(const dsl::MetricJets& m);

// Covariant derivative of a (0,s) tensor; the new (differentiation) slot
// comes first: (nabla T)_{k;i1..is}.
Tensor covariant_derivative(const Tensor& t, const Tensor& gamma);

// Divergence in slot r (1-based): contracts the derivative slot of nabla T
// with slot r of T using g^{ab}.
Tensor divergence(const Tensor& t, int slot, const dsl::MetricJets& m, const Tensor& gamma);

// Exterior derivative of a symmetric (0,2) tensor:
// d^nabla b (X,Y,Z) = (nabla_X b)(Y,Z) - (nabla_Y b)(X,Z).
Tensor dnabla_sym2(const Tensor& b, const Tensor& gamma);

// Internal consistency failure (a postcondition check tripped).
class InternalCheck : public Error {
public:
    using Error::Error;
};

} // namespace cel::curv
