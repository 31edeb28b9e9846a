#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cel/expr.hpp"

namespace cel::dsl {

struct Interval {
    double lo = -1.0;
    double hi = 1.0;
};

// Parsed symbolic metric: n x n symmetric array of expression trees over the
// declared coordinates, plus an optional per-coordinate sampling region.
struct MetricSpec {
    int dim = 0;
    std::vector<std::string> coord_names;
    std::vector<ExprPtr> entries; // dim*dim, mirrored from the upper triangle
    std::string name;
    std::string notes;
    std::vector<Interval> region; // size dim; defaults to (-1, 1) per coordinate

    const Expr& entry(int i, int j) const { return *entries[i * dim + j]; }
};

// Conformal factor phi over the same coordinates as the paired metric
// (the rescale uses psi = e^phi).
struct ConformalFactorSpec {
    ExprPtr phi;
};

// Line-based document:
//   dim = <integer>
//   coords = <ident>{, <ident>}
//   region = <ident>: <lo> .. <hi> {, ...}      (optional)
//   g[<i>][<j>] = <expression>                  (1-based, i <= j)
// plus optional "name = ..." / "notes = ..." metadata and '#' comments.
// Unassigned entries default to 0.
MetricSpec parse_metric_document(std::string_view text);

std::string to_document(const MetricSpec& spec);

// Metric and inverse-metric jets at a point. The inverse comes from
// jet-valued Gaussian elimination; positive definiteness of the constant
// term matrix is checked and SingularMetric carries the smallest eigenvalue.
struct MetricJets {
    int dim = 0;
    int order = 0;
    std::vector<double> point;
    std::vector<jets::Jet> g;     // dim*dim
    std::vector<jets::Jet> g_inv; // dim*dim

    const jets::Jet& gg(int i, int j) const { return g[i * dim + j]; }
    const jets::Jet& inv(int i, int j) const { return g_inv[i * dim + j]; }
};

MetricJets eval_metric_at(const MetricSpec& spec, std::span<const double> point, int order);

} // namespace cel::dsl
