#include "cel/invariants.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

namespace cel::invariants {

using curv::Tensor;
using jets::Jet;
using weyl::curv_apply;

std::vector<double> TField::values() const {
    std::vector<double> v(t_vec.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = t_vec[i].value();
    return v;
}

std::vector<Jet> t_source(const curv::CurvaturePack& pack, const curv::Tensor& div_w) {
    const auto& m = pack.metric;
    const int n = m.dim;
    const int ord = std::min(div_w.order(), pack.weyl.order());
    std::vector<Jet> u(n, Jet::constant(0.0, n, ord));
    for (int b = 0; b < n; ++b) {
        // the two-form delta W(.,.,e_b)
        Tensor f(n, 2, div_w.order());
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) f.at(x, y) = div_w.at(x, y, b);
        Tensor img = curv_apply(pack.weyl, f, m);
        for (int x = 0; x < n; ++x)
            for (int a = 0; a < n; ++a) u[x] += m.inv(a, b) * img.at(a, x);
    }
    return u;
}

namespace {

std::vector<Jet> raise_covector(const std::vector<Jet>& theta, const dsl::MetricJets& m) {
    const int n = m.dim;
    std::vector<Jet> v;
    v.reserve(n);
    for (int i = 0; i < n; ++i) {
        Jet s = m.inv(i, 0) * theta[0];
        for (int j = 1; j < n; ++j) s += m.inv(i, j) * theta[j];
        v.push_back(s);
    }
    return v;
}

std::vector<Jet> lower_vector(const std::vector<Jet>& v, const dsl::MetricJets& m) {
    const int n = m.dim;
    std::vector<Jet> theta;
    theta.reserve(n);
    for (int i = 0; i < n; ++i) {
        Jet s = m.gg(i, 0) * v[0];
        for (int j = 1; j < n; ++j) s += m.gg(i, j) * v[j];
        theta.push_back(s);
    }
    return theta;
}

// pointwise T* values through the Moore-Penrose operator
std::vector<double> t_star_values(const curv::CurvaturePack& pack,
                                  const weyl::WeylAlgebraPack& wpack,
                                  const curv::Tensor& div_w) {
    const int n = pack.metric.dim;
    std::vector<Jet> u = t_source(pack, div_w);
    std::vector<double> uv(n);
    for (int i = 0; i < n; ++i) uv[i] = u[i].value();
    std::vector<double> theta = wpack.kernel.pinv_op.apply(uv);
    for (double& v : theta) v /= (n - 3);
    return theta;
}

} // namespace

TField field_T(const dsl::MetricSpec* spec, const curv::CurvaturePack& pack,
               const weyl::WeylAlgebraPack& wpack, const curv::Tensor& div_w,
               const Tolerances& tol) {
    const auto& m = pack.metric;
    const int n = m.dim;
    if (n < 4) throw DomainError("the field needs dimension >= 4");
    if (!wpack.regular())
        throw NearRankBoundary("spectral gap of the Weyl contraction is below the stability margin");

    TField t;
    if (wpack.rank_E() == 0) {
        // jet route: solve q * theta = g^{-1} u in truncated Taylor arithmetic
        std::vector<Jet> u = t_source(pack, div_w);
        std::vector<Jet> rhs = raise_covector(u, m);
        std::vector<Jet> q = wpack.w_ricci.a;
        std::vector<Jet> theta = linalg::solve_jet_linear(n, 1, std::move(q), std::move(rhs));
        for (Jet& j : theta) j *= 1.0 / (n - 3);
        t.jet_valued = true;
        t.t_star = std::move(theta);
        t.t_vec = raise_covector(t.t_star, m);
        return t;
    }

    // positive rank: pointwise value here, derivatives by central differences
    // with the rank pinned across the stencil
    if (!spec)
        throw Unavailable("rank_E > 0 and no metric description available for the "
                          "finite-difference fallback");
    std::vector<double> center = t_star_values(pack, wpack, div_w);
    const double h = tol.fd_step;
    const int stencil_order = 3; // values only at stencil points
    std::vector<std::vector<double>> dtheta(n); // dtheta[k][i] = d_k theta_i
    for (int k = 0; k < n; ++k) {
        std::vector<double> plus, minus;
        for (int sign = 0; sign < 2; ++sign) {
            std::vector<double> p = m.point;
            p[k] += sign == 0 ? h : -h;
            dsl::MetricJets ms;
            try {
                ms = dsl::eval_metric_at(*spec, p, stencil_order);
            } catch (const Error& e) {
                throw Unavailable(std::string("finite-difference stencil left the metric domain: ") +
                                  e.what());
            }
            curv::CurvaturePack ps = curv::build_curvature_pack(ms);
            weyl::WeylAlgebraPack ws =
                weyl::build_weyl_algebra(ps, tol.rank_rel, tol.regular_margin);
            if (ws.rank_E() != wpack.rank_E())
                throw Unavailable("rank of the kernel bundle changes across the "
                                  "finite-difference stencil");
            curv::Tensor dws = curv::divergence(ps.weyl, 4, ps.metric, ps.gamma);
            auto vals = t_star_values(ps, ws, dws);
            (sign == 0 ? plus : minus) = vals;
        }
        dtheta[k].resize(n);
        for (int i = 0; i < n; ++i) dtheta[k][i] = (plus[i] - minus[i]) / (2.0 * h);
    }
    t.fd_fallback = true;
    t.t_star.reserve(n);
    for (int i = 0; i < n; ++i) {
        Jet j(n, 1);
        j.raw(0) = center[i];
        for (int k = 0; k < n; ++k) j.raw(1 + k) = dtheta[k][i];
        t.t_star.push_back(j);
    }
    t.t_vec = raise_covector(t.t_star, m);
    return t;
}

curv::Tensor cotton_T(const curv::CurvaturePack& pack, const curv::Tensor& div_w,
                      const TField& t) {
    const auto& m = pack.metric;
    const int n = m.dim;
    Tensor wt(n, 3, std::min(pack.weyl.order(), t.t_vec.front().order()));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) {
                Jet s = pack.weyl.at(x, y, z, 0) * t.t_vec[0];
                for (int a = 1; a < n; ++a) s += pack.weyl.at(x, y, z, a) * t.t_vec[a];
                wt.at(x, y, z) = s;
            }
    Tensor c = curv::dnabla_sym2(pack.schouten, pack.gamma) - wt;

    // cross-check against the computational form delta W/(n-3) - W(.,.,.,T)
    Tensor c2 = div_w.scaled(1.0 / (n - 3)) - wt;
    double resid = curv::invariant_rms(c - c2, m);
    double scale = std::max(curv::invariant_rms(c, m), curv::invariant_rms(c2, m));
    if (!(resid <= 1e-8 * (1.0 + scale)))
        throw curv::InternalCheck("the two Cotton forms disagree: residual " +
                                  std::to_string(resid));
    return c;
}

curv::Tensor conformal_ricci_E(const curv::CurvaturePack& pack,
                               const std::vector<Jet>& v_vec) {
    const auto& m = pack.metric;
    const int n = m.dim;
    if (v_vec.front().order() < 1)
        throw OrderExhausted("conformal Ricci tensor needs the field at order >= 1");
    std::vector<Jet> v_star = lower_vector(v_vec, m);
    Tensor vs(n, 1, v_star.front().order());
    for (int i = 0; i < n; ++i) vs.at(i) = v_star[i];
    Tensor nv = curv::covariant_derivative(vs, pack.gamma); // (nabla V*)_{k;i}
    const int ord = nv.order();

    Jet div = Jet::constant(0.0, n, ord);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) div += m.inv(k, i) * nv.at(k, i);
    Jet vv = Jet::constant(0.0, n, ord);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) vv += m.gg(i, j) * v_vec[i] * v_vec[j];

    Tensor e(n, 2, ord);
    const Jet mix = (div + vv) * (1.0 / n);
    const Jet s_over_n = pack.scalar * (1.0 / n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            Jet val = pack.ricci.at(x, y) - s_over_n * m.gg(x, y);
            val += (nv.at(x, y) + v_star[x] * v_star[y] - mix * m.gg(x, y)) * double(n - 2);
            e.at(x, y) = val;
        }

    // trace-free by construction
    double tr = 0.0, scale = curv::max_abs_value(e);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) tr += m.inv(a, b).value() * e.at(a, b).value();
    if (!(std::abs(tr) <= 1e-9 * (1.0 + scale) * n))
        throw curv::InternalCheck("conformal Ricci tensor has nonzero trace " + std::to_string(tr));
    return e;
}

curv::Tensor exterior_d_covector(const std::vector<Jet>& t_star, int dim) {
    if (t_star.front().order() < 1) throw OrderExhausted("d of a covector needs order >= 1");
    Tensor d(dim, 2, t_star.front().order() - 1);
    for (int x = 0; x < dim; ++x)
        for (int y = 0; y < dim; ++y)
            d.at(x, y) = t_star[y].derivative(x) - t_star[x].derivative(y);
    return d;
}

namespace {

Tensor sym2(const Tensor& b) {
    const int n = b.dim();
    Tensor s(n, 2, b.order());
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) s.at(x, y) = b.at(x, y) + b.at(y, x);
    return s;
}

Tensor delta1_delta4_weyl(const curv::CurvaturePack& pack) {
    Tensor d4 = curv::divergence(pack.weyl, 4, pack.metric, pack.gamma);
    return curv::divergence(d4, 1, pack.metric, pack.gamma);
}

Tensor t_outer_t_star(const TField& t, int n) {
    Tensor b(n, 2, t.t_star.front().order());
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) b.at(x, y) = t.t_star[x] * t.t_star[y];
    return b;
}

Tensor cotton_contracted_sym(const curv::Tensor& cotton, const TField& t, int n) {
    Tensor b(n, 2, std::min(cotton.order(), t.t_vec.front().order()));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            Jet s = t.t_vec[0] * cotton.at(0, x, y);
            for (int a = 1; a < n; ++a) s += t.t_vec[a] * cotton.at(a, x, y);
            b.at(x, y) = s;
        }
    return sym2(b);
}

void check_bach_shape(const Tensor& b, const dsl::MetricJets& m, const char* what) {
    const int n = m.dim;
    double scale = curv::max_abs_value(b);
    double tr = 0.0, asym = 0.0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            tr += m.inv(x, y).value() * b.at(x, y).value();
            asym = std::max(asym, std::abs(b.at(x, y).value() - b.at(y, x).value()));
        }
    if (!(std::abs(tr) <= 1e-8 * (1.0 + scale) * n) || !(asym <= 1e-7 * (1.0 + scale)))
        throw curv::InternalCheck(std::string(what) + " is not symmetric trace-free: trace " +
                                  std::to_string(tr) + ", asymmetry " + std::to_string(asym));
}

} // namespace

curv::Tensor bach_T(const curv::CurvaturePack& pack, const TField& t, const curv::Tensor& cotton,
                    const curv::Tensor& e_t) {
    const auto& m = pack.metric;
    const int n = m.dim;
    Tensor b = delta1_delta4_weyl(pack);
    b = b + curv_apply(pack.weyl, pack.ricci, m).scaled(double(n - 3) / double(n - 2));
    b = b - curv_apply(pack.weyl, sym2(e_t), m).scaled(double(n - 4) / double(n - 2));
    Tensor mixed = curv_apply(pack.weyl, t_outer_t_star(t, n), m) +
                   cotton_contracted_sym(cotton, t, n);
    b = b - mixed.scaled(double((n - 3) * (n - 4)));
    check_bach_shape(b, m, "generalized Bach tensor");
    return b;
}

std::pair<curv::Tensor, curv::Tensor> bach_hat_and_wsymE(const curv::CurvaturePack& pack,
                                                         const TField& t,
                                                         const curv::Tensor& e_t) {
    const auto& m = pack.metric;
    const int n = m.dim;
    Tensor bh = delta1_delta4_weyl(pack);
    bh = bh + curv_apply(pack.weyl, pack.ricci, m).scaled(double(n - 3) / double(n - 2));
    // W(T,.,.,T) written out directly
    const int ord = std::min(pack.weyl.order(), t.t_vec.front().order());
    Tensor wtt(n, 2, ord);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            Jet s = Jet::constant(0.0, n, ord);
            for (int a = 0; a < n; ++a)
                for (int bb = 0; bb < n; ++bb)
                    s += t.t_vec[a] * t.t_vec[bb] * pack.weyl.at(a, x, y, bb);
            wtt.at(x, y) = s;
        }
    bh = bh - wtt.scaled(double((n - 3) * (n - 4)));
    Tensor wsym = curv_apply(pack.weyl, sym2(e_t), m);
    return {bh, wsym};
}

double delta3_residual(const curv::CurvaturePack& pack, const curv::Tensor& cotton,
                       const TField& t) {
    const auto& m = pack.metric;
    const int n = m.dim;
    if (cotton.order() < 1) throw OrderExhausted("delta_3 of the Cotton tensor needs order >= 1");
    if (!t.jet_valued)
        throw Unavailable("the delta_3 identity needs the jet-valued field (rank_E = 0)");
    // delta_3 C_T = (n-3) C_T(.,.,T) - W_op(d T*). The coefficient follows
    // from the product rule together with delta_3 delta_4 W = 0; with it the
    // identity holds in every dimension (the factor is invisible at n = 4).
    Tensor d3 = curv::divergence(cotton, 3, m, pack.gamma);
    Tensor ct(n, 2, std::min(cotton.order(), t.t_vec.front().order()));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            Jet s = cotton.at(x, y, 0) * t.t_vec[0];
            for (int a = 1; a < n; ++a) s += cotton.at(x, y, a) * t.t_vec[a];
            ct.at(x, y) = s;
        }
    Tensor wdt = curv_apply(pack.weyl, exterior_d_covector(t.t_star, n), m);
    return curv::invariant_rms(d3 - ct.scaled(double(n - 3)) + wdt, m);
}

PointAnalysis analyze_point(const dsl::MetricSpec& spec, std::span<const double> point, int order,
                            const Tolerances& tol) {
    PointAnalysis a;
    dsl::MetricJets m = dsl::eval_metric_at(spec, point, order);
    a.pack = curv::build_curvature_pack(m);
    a.wpack = weyl::build_weyl_algebra(a.pack, tol.rank_rel, tol.regular_margin);

    auto note = [&a](const char* what, const Error& e) {
        if (!a.why_unavailable.empty()) a.why_unavailable += "; ";
        a.why_unavailable += std::string(what) + ": " + e.what();
    };

    if (a.pack.weyl.order() >= 1)
        a.div_w = curv::divergence(a.pack.weyl, 4, a.pack.metric, a.pack.gamma);
    else
        a.why_unavailable = "divergence of W: metric order too low";

    if (a.div_w) {
        try {
            a.t = field_T(&spec, a.pack, a.wpack, *a.div_w, tol);
        } catch (const NumericError& e) {
            note("T", e);
        }
    }
    if (a.t) {
        try {
            a.cotton = cotton_T(a.pack, *a.div_w, *a.t);
        } catch (const NumericError& e) {
            note("C_T", e);
        }
        try {
            a.d_t_star = exterior_d_covector(a.t->t_star, m.dim);
        } catch (const NumericError& e) {
            note("dT*", e);
        }
        try {
            a.e_t = conformal_ricci_E(a.pack, a.t->t_vec);
        } catch (const NumericError& e) {
            note("E_T", e);
        }
    }
    if (a.t && a.cotton && a.e_t && order >= 4) {
        try {
            a.b_t = bach_T(a.pack, *a.t, *a.cotton, *a.e_t);
            auto [bh, ws] = bach_hat_and_wsymE(a.pack, *a.t, *a.e_t);
            a.b_hat = bh;
            a.w_sym_e = ws;
        } catch (const NumericError& e) {
            note("B_T", e);
        }
    } else if (order < 4 && a.why_unavailable.empty()) {
        a.why_unavailable = "B_T: needs metric jets of order 4";
    }
    if (a.t && a.cotton && a.t->jet_valued && order >= 4) {
        try {
            a.delta3 = delta3_residual(a.pack, *a.cotton, *a.t);
        } catch (const NumericError& e) {
            note("delta3", e);
        }
    }
    return a;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::ConformallyFlat: return "ConformallyFlat";
    case Verdict::NecessaryConditionsPass: return "NecessaryConditionsPass";
    case Verdict::Obstructed: return "Obstructed";
    case Verdict::Indeterminate: return "Indeterminate";
    }
    return "?";
}

InvariantReport report_point(const dsl::MetricSpec& spec, std::span<const double> point, int order,
                             const Tolerances& tol) {
    InvariantReport r;
    r.point.assign(point.begin(), point.end());
    PointAnalysis a;
    try {
        a = analyze_point(spec, point, order, tol);
    } catch (const NumericError& e) {
        r.verdict = Verdict::Indeterminate;
        r.reason = e.what();
        r.failed = true;
        return r;
    }
    const auto& m = a.pack.metric;
    r.rank_E = a.wpack.rank_E();
    r.regular = a.wpack.regular();
    r.norms.weyl = a.wpack.weyl_scale;
    if (a.t) {
        r.available.T = true;
        r.fd_fallback = a.t->fd_fallback;
        r.t_components = a.t->values();
    }
    if (a.d_t_star) {
        r.available.dT_star = true;
        r.norms.dT_star = curv::invariant_rms(*a.d_t_star, m);
    }
    if (a.cotton) {
        r.available.C_T = true;
        r.norms.C_T = curv::invariant_rms(*a.cotton, m);
    }
    if (a.e_t) {
        r.available.E_T = true;
        r.norms.E_T = curv::invariant_rms(*a.e_t, m);
    }
    if (a.b_t) {
        r.available.B_T = true;
        r.norms.B_T = curv::invariant_rms(*a.b_t, m);
    }
    if (a.b_hat) {
        r.available.B_hat_T = true;
        r.norms.B_hat_T = curv::invariant_rms(*a.b_hat, m);
    }
    if (a.w_sym_e) {
        r.available.W_sym_E_T = true;
        r.norms.W_sym_E_T = curv::invariant_rms(*a.w_sym_e, m);
    }
    if (a.delta3) {
        r.available.delta3 = true;
        r.norms.delta3 = *a.delta3;
    }

    if (r.norms.weyl < tol.vanish) {
        r.verdict = Verdict::ConformallyFlat;
    } else if (r.rank_E == 0 && r.regular) {
        if (r.available.E_T && r.available.dT_star && r.available.C_T && r.available.B_T) {
            const struct {
                const char* name;
                double norm;
            } checks[] = {{"E_T", r.norms.E_T},
                          {"dT_star", r.norms.dT_star},
                          {"C_T", r.norms.C_T},
                          {"B_T", r.norms.B_T}};
            for (const auto& c : checks)
                if (!(c.norm < tol.vanish)) r.obstructions.push_back(c.name);
            r.verdict =
                r.obstructions.empty() ? Verdict::NecessaryConditionsPass : Verdict::Obstructed;
        } else {
            r.verdict = Verdict::Indeterminate;
            r.reason = a.why_unavailable.empty() ? "required invariants unavailable"
                                                 : a.why_unavailable;
        }
    } else {
        r.verdict = Verdict::Indeterminate;
        r.reason = !r.regular
                       ? "near rank boundary: spectral gap below the stability margin"
                       : "rank_E = " + std::to_string(r.rank_E) +
                             " > 0: vanishing of E_T is sufficient but not necessary here";
    }
    return r;
}

namespace {

bool parallel_disabled() {
    const char* v = std::getenv("CEL_NO_PARALLEL");
    return v && v[0] == '1';
}

} // namespace

Classification classify(const dsl::MetricSpec& spec,
                        const std::vector<std::vector<double>>& points, int order,
                        const Tolerances& tol) {
    if (spec.dim < 4)
        throw ParseError("classification needs dimension >= 4 (got " + std::to_string(spec.dim) +
                         ")");
    Classification c;
    c.spec_name = spec.name;
    c.tol = tol;
    c.order = order;
    c.points.resize(points.size());

    unsigned hw = std::thread::hardware_concurrency();
    const bool parallel = !parallel_disabled() && hw > 1 && points.size() > 1;
    if (parallel) {
        // warm the shared jet layout cache before going wide
        (void)jets::JetLayout::get(spec.dim, order);
        std::vector<std::future<void>> futs;
        std::atomic<std::size_t> next{0};
        unsigned workers = std::min<unsigned>(hw, points.size());
        for (unsigned w = 0; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, [&]() {
                for (std::size_t i = next++; i < points.size(); i = next++)
                    c.points[i] = report_point(spec, points[i], order, tol);
            }));
        for (auto& f : futs) f.get();
    } else {
        for (std::size_t i = 0; i < points.size(); ++i)
            c.points[i] = report_point(spec, points[i], order, tol);
    }

    auto severity = [](Verdict v) {
        switch (v) {
        case Verdict::ConformallyFlat: return 0;
        case Verdict::NecessaryConditionsPass: return 1;
        case Verdict::Indeterminate: return 2;
        case Verdict::Obstructed: return 3;
        }
        return 3;
    };
    c.aggregate = Verdict::ConformallyFlat;
    for (const auto& p : c.points)
        if (severity(p.verdict) > severity(c.aggregate)) c.aggregate = p.verdict;
    return c;
}

} // namespace cel::invariants
