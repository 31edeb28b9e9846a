#pragma once

#include <utility>

#include "cel/curvature.hpp"
#include "cel/linalg.hpp"

namespace cel::weyl {

// Ordered basis { dx^i ^ dx^j : i < j } of the two-form space, lexicographic.
struct TwoFormBasis {
    int dim = 0;
    std::vector<std::pair<int, int>> pairs;

    explicit TwoFormBasis(int n);
    int size() const { return static_cast<int>(pairs.size()); }
    int index_of(int i, int j) const; // requires i < j
};

struct JetMatrix {
    int rows = 0, cols = 0;
    std::vector<jets::Jet> a;

    JetMatrix() = default;
    JetMatrix(int r, int c, int dim, int order)
        : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, jets::Jet::constant(0.0, dim, order)) {}
    jets::Jet& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const jets::Jet& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    linalg::Matd values() const;
    JetMatrix operator*(const JetMatrix& o) const;
};

// A curvature-type (0,4) tensor acting on (0,2) tensors:
//   A(X* (x) Y*)(Z,T) = A(Y,Z,T,X), extended by linearity; indices are
//   raised with g. Preserves symmetry and skew-symmetry of the input.
curv::Tensor curv_apply(const curv::Tensor& a4, const curv::Tensor& b2, const dsl::MetricJets& m);

// Matrix of the endomorphism on the coordinate two-form basis.
JetMatrix weyl_endomorphism(const curv::Tensor& w, const dsl::MetricJets& m,
                            const TwoFormBasis& basis);

// Induced inner product on two-forms: gram[PQ] = g^{ik}g^{jl} - g^{il}g^{jk}.
JetMatrix twoform_gram(const dsl::MetricJets& m, const TwoFormBasis& basis);

// Negative Ricci contraction of the squared endomorphism, returned as the
// symmetric bilinear form with both indices raised:
//   q^{at} = g^{ax} sum_i [w_sq(dx^i ^ dx^t)]_{ix}.
// The operator on covector components is then g * q.
JetMatrix ricci_contraction_sq(const JetMatrix& w_sq, const TwoFormBasis& basis,
                               const dsl::MetricJets& m);

struct KernelInfo {
    int rank_E = 0;                            // dim Ker of the operator
    bool regular = true;                       // spectral gap above the margin
    std::vector<std::vector<double>> e_basis;  // g-orthonormal kernel vectors (index up)
    linalg::Matd pinv_op;                      // Moore-Penrose inverse acting on covector components
    std::vector<double> spectrum;              // operator eigenvalues, ascending
};

// Pointwise spectral analysis of the operator determined by the symmetric
// both-up form `q` and metric `g` (values). Eigenvalues at or below
// rel_tol * lambda_max count as kernel; if lambda_max itself is below the
// noise floor (rel_tol * (1 + weyl_scale))^2 the operator is treated as zero
// and the kernel is everything. When `weyl_check` is given, each kernel
// vector v is validated against |W(v,.,.,.)| ~ 0 and IsomorphismViolation is
// thrown on failure.
KernelInfo kernel_rank_E(const linalg::Matd& q, const linalg::Matd& g, double weyl_scale,
                         double rel_tol, double margin_factor,
                         const curv::Tensor* weyl_check = nullptr,
                         const dsl::MetricJets* m = nullptr);

struct WeylAlgebraPack {
    TwoFormBasis basis{0};
    JetMatrix w_op;     // N x N endomorphism matrix on the two-form basis
    JetMatrix gram;     // N x N induced inner product
    JetMatrix w_sq;     // w_op * w_op
    JetMatrix w_ricci;  // n x n both-up form of the Ricci contraction of w_sq
    KernelInfo kernel;
    int ker_w_dim = 0;        // dim Ker of the two-form endomorphism
    double weyl_scale = 0.0;  // invariant rms of the (0,4) Weyl tensor

    int rank_E() const { return kernel.rank_E; }
    bool regular() const { return kernel.regular; }
};

WeylAlgebraPack build_weyl_algebra(const curv::CurvaturePack& pack, double rank_rel_tol,
                                   double margin_factor);

} // namespace cel::weyl
