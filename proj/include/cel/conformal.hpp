#pragma once

#include <array>

#include "cel/invariants.hpp"

namespace cel::lab {

// New spec with entries exp(-2 phi) * g_ij (expression level, so downstream
// evaluation of the rescaled metric is an independent computation). A phi
// that is literally the constant 0 returns the spec unchanged.
dsl::MetricSpec rescale_spec(const dsl::MetricSpec& spec, const dsl::ConformalFactorSpec& phi);

inline constexpr int kLawCount = 10;

// One conformal transformation law at one point. Residuals are
// |LHS - RHS|_rms / (max(|LHS|_rms, |RHS|_rms) + 1) over plain components,
// with both sides produced by disjoint code paths (recomputation on the
// rescaled metric vs. the transformation formula applied to the base stack).
// Laws whose hypotheses fail at the point (kernel rank, Cotton vanishing)
// report applicable = false and residual 0.
struct LawResult {
    const char* law = "";
    double residual = 0.0;
    bool available = false;
    bool applicable = true;
    std::string detail;
};

struct PointLaws {
    std::vector<double> point;
    std::array<LawResult, kLawCount> laws;
};

struct TransformationLawReport {
    std::string spec_name;
    std::string phi_text;
    double tolerance = 1e-6;
    std::vector<PointLaws> points;
    double max_residual = 0.0;
    bool all_pass = true;
};

extern const std::array<const char*, kLawCount> kLawNames;

TransformationLawReport check_transformation_laws(const dsl::MetricSpec& spec,
                                                  const dsl::ConformalFactorSpec& phi,
                                                  const std::vector<std::vector<double>>& points,
                                                  const invariants::Tolerances& tol);

} // namespace cel::lab
