#pragma once

#include <optional>

#include "cel/weyl_algebra.hpp"

namespace cel::invariants {

struct Tolerances {
    double vanish = 1e-6;        // "vanishes" threshold on dimension-normalized norms
    double rank_rel = 1e-8;      // relative spectral threshold for rank decisions
    double regular_margin = 1e3; // regular iff lambda_min_kept/lambda_max > margin * rank_rel
    double fd_step = 1e-4;       // step of the finite-difference fallback
};

// The distinguished vector field: Moore-Penrose solve of the contracted Weyl
// image of delta W, scaled by 1/(n-3); the candidate gradient of the
// conformal factor. Jet-valued (order 1) on the rank-0 path; on the positive
// rank path its first derivatives come from central differences of pointwise
// values, with the rank held constant across the stencil.
struct TField {
    bool jet_valued = false;
    bool fd_fallback = false;
    std::vector<jets::Jet> t_star; // covector components
    std::vector<jets::Jet> t_vec;  // vector components
    std::vector<double> values() const;
};

// Covector u with u_x = g^{ab} [W_op(delta W(.,.,e_b))]_{a x}; the source term
// of the field equation.
std::vector<jets::Jet> t_source(const curv::CurvaturePack& pack, const curv::Tensor& div_w);

// Computes the field. `spec` enables the finite-difference fallback (pass
// nullptr to restrict to the jet route). Throws NearRankBoundary when the
// regular flag is down, Unavailable when no route applies.
TField field_T(const dsl::MetricSpec* spec, const curv::CurvaturePack& pack,
               const weyl::WeylAlgebraPack& wpack, const curv::Tensor& div_w,
               const Tolerances& tol);

// C_T = d^nabla schouten - W(.,.,.,T); cross-checked internally against
// delta W / (n-3) - W(.,.,.,T).
curv::Tensor cotton_T(const curv::CurvaturePack& pack, const curv::Tensor& div_w,
                      const TField& t);

// E_V = Ric - (S/n) g + (n-2)(nabla V* + V* (x) V* - [div V + |V|^2] g / n);
// trace-free by construction (asserted).
curv::Tensor conformal_ricci_E(const curv::CurvaturePack& pack,
                               const std::vector<jets::Jet>& v_vec);

// d(T*) as a (0,2) form.
curv::Tensor exterior_d_covector(const std::vector<jets::Jet>& t_star, int dim);

// B_T = delta_1 delta_4 W + (n-3)/(n-2) W_op(Ric) - (n-4)/(n-2) W_op(sym E_T)
//       - (n-3)(n-4) [W_op(T* (x) T*) + sym(C_T(T,.,.))]
curv::Tensor bach_T(const curv::CurvaturePack& pack, const TField& t, const curv::Tensor& cotton,
                    const curv::Tensor& e_t);

// B_hat_T = delta_1 delta_4 W + (n-3)/(n-2) W_op(Ric) - (n-3)(n-4) W(T,.,.,T),
// paired with W_op(sym E_T).
std::pair<curv::Tensor, curv::Tensor> bach_hat_and_wsymE(const curv::CurvaturePack& pack,
                                                         const TField& t,
                                                         const curv::Tensor& e_t);

// | delta_3 C_T - (n-3) C_T(.,.,T) + W_op(d T*) | ; needs the jet route.
double delta3_residual(const curv::CurvaturePack& pack, const curv::Tensor& cotton,
                       const TField& t);

// Everything the pipeline can produce at one point; absent optionals carry
// their reason in `why_unavailable`.
struct PointAnalysis {
    curv::CurvaturePack pack;
    weyl::WeylAlgebraPack wpack;
    std::optional<curv::Tensor> div_w;
    std::optional<TField> t;
    std::optional<curv::Tensor> cotton;
    std::optional<curv::Tensor> d_t_star;
    std::optional<curv::Tensor> e_t;
    std::optional<curv::Tensor> b_t;
    std::optional<curv::Tensor> b_hat;
    std::optional<curv::Tensor> w_sym_e;
    std::optional<double> delta3;
    std::string why_unavailable;
};

PointAnalysis analyze_point(const dsl::MetricSpec& spec, std::span<const double> point, int order,
                            const Tolerances& tol);

enum class Verdict { ConformallyFlat, NecessaryConditionsPass, Obstructed, Indeterminate };
const char* to_string(Verdict v);

struct InvariantReport {
    std::vector<double> point;
    int rank_E = 0;
    bool regular = true;
    bool fd_fallback = false;
    std::vector<double> t_components;

    struct Norms {
        double weyl = 0, dT_star = 0, C_T = 0, E_T = 0, B_T = 0, B_hat_T = 0, W_sym_E_T = 0,
               delta3 = 0;
    } norms;
    struct Availability {
        bool T = false, dT_star = false, C_T = false, E_T = false, B_T = false, B_hat_T = false,
             W_sym_E_T = false, delta3 = false;
    } available;

    Verdict verdict = Verdict::Indeterminate;
    std::vector<std::string> obstructions;
    std::string reason;
    // the whole point evaluation failed with a numeric error (reason holds it)
    bool failed = false;
};

InvariantReport report_point(const dsl::MetricSpec& spec, std::span<const double> point, int order,
                             const Tolerances& tol);

struct Classification {
    std::string spec_name;
    Tolerances tol;
    int order = 4;
    std::vector<InvariantReport> points;
    Verdict aggregate = Verdict::Indeterminate;
};

// Per-point reports plus the worst verdict. Requires dim >= 4. Point errors
// are contained (they yield Indeterminate reports), never abort the batch.
// Points may be evaluated concurrently unless CEL_NO_PARALLEL=1 is set.
Classification classify(const dsl::MetricSpec& spec,
                        const std::vector<std::vector<double>>& points, int order,
                        const Tolerances& tol);

} // namespace cel::invariants
