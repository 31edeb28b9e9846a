#include "cel/conformal.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

namespace cel::lab {

using curv::Tensor;
using jets::Jet;

dsl::MetricSpec rescale_spec(const dsl::MetricSpec& spec, const dsl::ConformalFactorSpec& phi) {
    using dsl::BinaryOp;
    using dsl::Expr;
    using dsl::UnaryOp;
    if (!phi.phi) throw Error("rescale: conformal factor is empty");
    if (phi.phi->kind == Expr::Kind::Constant && phi.phi->value == 0.0) return spec;
    dsl::MetricSpec r = spec;
    dsl::ExprPtr factor =
        Expr::unary(UnaryOp::Exp, Expr::binary(BinaryOp::Mul, Expr::constant(-2.0), phi.phi));
    for (int i = 0; i < spec.dim; ++i)
        for (int j = i; j < spec.dim; ++j) {
            const dsl::ExprPtr& e = spec.entries[i * spec.dim + j];
            if (e->kind == Expr::Kind::Constant && e->value == 0.0) continue;
            dsl::ExprPtr scaled = (e->kind == Expr::Kind::Constant && e->value == 1.0)
                                      ? factor
                                      : Expr::binary(BinaryOp::Mul, factor, e);
            r.entries[i * spec.dim + j] = scaled;
            r.entries[j * spec.dim + i] = scaled;
        }
    return r;
}

const std::array<const char*, kLawCount> kLawNames = {
    "eq2_connection",      "eq3_weyl",           "eq9_div_weyl",   "eq13_ricci",
    "eq14_t_field",        "cotton_invariance",  "conformal_ricci_invariance",
    "bach_weight1",        "bach_hat_weight1",   "w_sym_e_weight1"};

namespace {

double rms(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / std::max<std::size_t>(1, v.size()));
}

double rel_residual(std::span<const double> lhs, std::span<const double> rhs) {
    double s = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double d = lhs[i] - rhs[i];
        s += d * d;
    }
    const double diff = std::sqrt(s / std::max<std::size_t>(1, lhs.size()));
    return diff / (std::max(rms(lhs), rms(rhs)) + 1.0);
}

std::vector<double> scaled(std::vector<double> v, double f) {
    for (double& x : v) x *= f;
    return v;
}

PointLaws check_point(const dsl::MetricSpec& spec, const dsl::MetricSpec& rescaled,
                      const dsl::ConformalFactorSpec& phi, std::span<const double> point,
                      const invariants::Tolerances& tol) {
    PointLaws out;
    out.point.assign(point.begin(), point.end());
    for (int i = 0; i < kLawCount; ++i) out.laws[i].law = kLawNames[i];

    invariants::PointAnalysis base, bar;
    try {
        base = invariants::analyze_point(spec, point, 4, tol);
        bar = invariants::analyze_point(rescaled, point, 4, tol);
    } catch (const Error& e) {
        for (auto& l : out.laws) l.detail = e.what();
        return out;
    }
    const auto& m = base.pack.metric;
    const int n = m.dim;

    const Jet phi_jet = dsl::eval_jet(*phi.phi, point, 4);
    const double psi2 = std::exp(2.0 * phi_jet.value()); // psi^2 with gbar = psi^-2 g
    std::vector<double> dphi(n);
    std::vector<Jet> dphi_jets;
    for (int i = 0; i < n; ++i) {
        dphi_jets.push_back(phi_jet.derivative(i));
        dphi[i] = dphi_jets.back().value();
    }
    std::vector<double> grad_phi(n, 0.0); // index raised with the base metric
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) grad_phi[i] += m.inv(i, j).value() * dphi[j];

    // --- eq2: connection law
    {
        std::vector<double> lhs = bar.pack.gamma.values();
        std::vector<double> rhs = base.pack.gamma.values();
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j, ++idx) {
                    double v = rhs[idx];
                    if (k == j) v -= dphi[i];
                    if (k == i) v -= dphi[j];
                    v += m.gg(i, j).value() * grad_phi[k];
                    rhs[idx] = v;
                }
        out.laws[0].available = true;
        out.laws[0].residual = rel_residual(lhs, rhs);
    }

    // --- eq3: weyl weight
    {
        out.laws[1].available = true;
        out.laws[1].residual =
            rel_residual(bar.pack.weyl.values(), scaled(base.pack.weyl.values(), 1.0 / psi2));
    }

    // --- eq9: divergence of weyl
    if (base.div_w && bar.div_w) {
        std::vector<double> rhs = base.div_w->values();
        std::size_t idx = 0;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z, ++idx) {
                    double w = 0.0;
                    for (int t = 0; t < n; ++t)
                        w += base.pack.weyl.at(x, y, z, t).value() * grad_phi[t];
                    rhs[idx] -= (n - 3) * w;
                }
        out.laws[2].available = true;
        out.laws[2].residual = rel_residual(bar.div_w->values(), rhs);
    }

    // --- eq13: ricci law
    {
        Tensor dphi_t(n, 1, 3);
        for (int i = 0; i < n; ++i) dphi_t.at(i) = dphi_jets[i];
        Tensor hess = curv::covariant_derivative(dphi_t, base.pack.gamma);
        double lap = 0.0, grad2 = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                lap += m.inv(a, b).value() * hess.at(a, b).value();
                grad2 += m.inv(a, b).value() * dphi[a] * dphi[b];
            }
        std::vector<double> rhs = base.pack.ricci.values();
        std::size_t idx = 0;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y, ++idx) {
                rhs[idx] += (n - 2) * (hess.at(x, y).value() + dphi[x] * dphi[y]);
                rhs[idx] += (lap - (n - 2) * grad2) * m.gg(x, y).value();
            }
        out.laws[3].available = true;
        out.laws[3].residual = rel_residual(bar.pack.ricci.values(), rhs);
    }

    // --- eq14: field law  Tbar = psi^2 (T - proj_{E^perp} grad phi)
    if (base.t && bar.t) {
        std::vector<double> proj = grad_phi;
        for (const auto& e : base.wpack.kernel.e_basis) {
            double inner = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) inner += m.gg(i, j).value() * grad_phi[i] * e[j];
            for (int i = 0; i < n; ++i) proj[i] -= inner * e[i];
        }
        std::vector<double> rhs(n);
        const std::vector<double> tv = base.t->values();
        for (int i = 0; i < n; ++i) rhs[i] = psi2 * (tv[i] - proj[i]);
        out.laws[4].available = true;
        out.laws[4].residual = rel_residual(bar.t->values(), rhs);
    } else {
        out.laws[4].detail = "field unavailable on one side";
    }

    // --- cotton invariance (weight 0)
    if (base.cotton && bar.cotton) {
        out.laws[5].available = true;
        out.laws[5].residual = rel_residual(bar.cotton->values(), base.cotton->values());
    }

    // --- conformal ricci invariance; the lemma needs grad phi in E^perp,
    //     i.e. a trivial kernel
    if (base.wpack.rank_E() == 0 && bar.wpack.rank_E() == 0) {
        if (base.e_t && bar.e_t) {
            out.laws[6].available = true;
            out.laws[6].residual = rel_residual(bar.e_t->values(), base.e_t->values());
        }
    } else {
        out.laws[6].available = true;
        out.laws[6].applicable = false;
        out.laws[6].detail = "rank_E > 0: invariance of E_T not implied";
    }

    // --- bach weight 1
    if (base.b_t && bar.b_t) {
        out.laws[7].available = true;
        out.laws[7].residual = rel_residual(bar.b_t->values(), scaled(base.b_t->values(), psi2));
    }

    // --- bach_hat and W(sym E): weight 1 under vanishing Cotton
    const bool cotton_vanishes =
        base.cotton && curv::invariant_rms(*base.cotton, m) < tol.vanish;
    if (!cotton_vanishes) {
        for (int i : {8, 9}) {
            out.laws[i].available = base.cotton != std::nullopt;
            out.laws[i].applicable = false;
            out.laws[i].detail = "C_T does not vanish: weight-1 law not implied";
        }
    } else {
        if (base.b_hat && bar.b_hat) {
            out.laws[8].available = true;
            out.laws[8].residual =
                rel_residual(bar.b_hat->values(), scaled(base.b_hat->values(), psi2));
        }
        if (base.w_sym_e && bar.w_sym_e) {
            out.laws[9].available = true;
            out.laws[9].residual =
                rel_residual(bar.w_sym_e->values(), scaled(base.w_sym_e->values(), psi2));
        }
    }
    return out;
}

bool parallel_disabled() {
    const char* v = std::getenv("CEL_NO_PARALLEL");
    return v && v[0] == '1';
}

} // namespace

TransformationLawReport check_transformation_laws(const dsl::MetricSpec& spec,
                                                  const dsl::ConformalFactorSpec& phi,
                                                  const std::vector<std::vector<double>>& points,
                                                  const invariants::Tolerances& tol) {
    TransformationLawReport rep;
    rep.spec_name = spec.name;
    rep.phi_text = phi.phi ? dsl::to_string(*phi.phi, spec.coord_names) : "";
    rep.tolerance = tol.vanish;
    const dsl::MetricSpec rescaled = rescale_spec(spec, phi);
    rep.points.resize(points.size());

    unsigned hw = std::thread::hardware_concurrency();
    const bool parallel = !parallel_disabled() && hw > 1 && points.size() > 1;
    if (parallel) {
        (void)jets::JetLayout::get(spec.dim, 4);
        std::vector<std::future<void>> futs;
        std::atomic<std::size_t> next{0};
        unsigned workers = std::min<unsigned>(hw, points.size());
        for (unsigned w = 0; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, [&]() {
                for (std::size_t i = next++; i < points.size(); i = next++)
                    rep.points[i] = check_point(spec, rescaled, phi, points[i], tol);
            }));
        for (auto& f : futs) f.get();
    } else {
        for (std::size_t i = 0; i < points.size(); ++i)
            rep.points[i] = check_point(spec, rescaled, phi, points[i], tol);
    }

    for (const auto& p : rep.points)
        for (const auto& l : p.laws)
            if (l.available && l.applicable) {
                rep.max_residual = std::max(rep.max_residual, l.residual);
                if (!(l.residual < rep.tolerance)) rep.all_pass = false;
            }
    return rep;
}

} // namespace cel::lab
