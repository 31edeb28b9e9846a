#include <doctest.h>

#include <cmath>

#include "cel/curvature.hpp"
#include "support/oracles.hpp"

using namespace cel;
using curv::Tensor;
using dsl::MetricJets;
using jets::Jet;
using cel::sampling::Rng;

namespace {

// raw metric jets for the polar 2-sphere: g = d theta^2 + sin^2 theta d phi^2
MetricJets polar_sphere2(double theta, double phi, int order) {
    MetricJets m;
    m.dim = 2;
    m.order = order;
    m.point = {theta, phi};
    Jet th = Jet::variable(theta, 0, 2, order);
    Jet s2 = jets::sin(th) * jets::sin(th);
    m.g = {Jet::constant(1.0, 2, order), Jet::constant(0.0, 2, order),
           Jet::constant(0.0, 2, order), s2};
    m.g_inv = {Jet::constant(1.0, 2, order), Jet::constant(0.0, 2, order),
               Jet::constant(0.0, 2, order), 1.0 / s2};
    (void)phi;
    return m;
}

dsl::MetricSpec flat_spec(int n) {
    std::string doc = "dim = " + std::to_string(n) + "\ncoords = ";
    for (int i = 0; i < n; ++i) doc += (i ? ", x" : "x") + std::to_string(i + 1);
    doc += "\n";
    for (int i = 1; i <= n; ++i)
        doc += "g[" + std::to_string(i) + "][" + std::to_string(i) + "] = 1\n";
    return dsl::parse_metric_document(doc);
}

dsl::MetricSpec sphere_spec(int n) {
    std::string doc = "dim = " + std::to_string(n) + "\ncoords = ";
    for (int i = 0; i < n; ++i) doc += (i ? ", x" : "x") + std::to_string(i + 1);
    doc += "\n";
    std::string den = "(1";
    for (int i = 1; i <= n; ++i) den += " + x" + std::to_string(i) + "^2";
    den += ")^2";
    for (int i = 1; i <= n; ++i)
        doc += "g[" + std::to_string(i) + "][" + std::to_string(i) + "] = 4/" + den + "\n";
    return dsl::parse_metric_document(doc);
}

dsl::MetricSpec s2xs2_spec() {
    return dsl::parse_metric_document(
        "dim = 4\ncoords = t1, p1, t2, p2\nregion = t1: 0.7 .. 2.4, p1: 0.1 .. 3, "
        "t2: 0.7 .. 2.4, p2: 0.1 .. 3\ng[1][1]=1\ng[2][2]=sin(t1)^2\ng[3][3]=1\n"
        "g[4][4]=sin(t2)^2\n");
}

std::vector<double> box_point(Rng& rng, const dsl::MetricSpec& spec) {
    std::vector<double> p(spec.dim);
    for (int i = 0; i < spec.dim; ++i) p[i] = rng.uniform(spec.region[i].lo, spec.region[i].hi);
    return p;
}

double rel_tensor_resid(const Tensor& a, const Tensor& b, const MetricJets& m) {
    return curv::invariant_rms(a - b, m) /
           (std::max(curv::invariant_rms(a, m), curv::invariant_rms(b, m)) + 1.0);
}

} // namespace

TEST_CASE("flat metric has vanishing christoffel and curvature") {
    auto spec = flat_spec(4);
    std::vector<double> p{0.1, -0.4, 0.2, 0.8};
    auto m = dsl::eval_metric_at(spec, p, 4);
    auto pack = curv::build_curvature_pack(m);
    CHECK(curv::max_abs_value(pack.gamma) == 0.0);
    CHECK(curv::max_abs_value(pack.riemann) == 0.0);
    CHECK(curv::max_abs_value(pack.ricci) == 0.0);
    CHECK(pack.scalar.value() == 0.0);
    CHECK(curv::max_abs_value(pack.weyl) == 0.0);
}

TEST_CASE("polar 2-sphere: christoffel, scalar curvature, ricci sign") {
    // gamma^theta_{phi phi} = -sin theta cos theta = -1/2 at theta = pi/4
    auto m = polar_sphere2(M_PI / 4, 0.3, 3);
    Tensor gamma = curv::christoffel(m);
    CHECK(gamma.at(0, 1, 1).value() == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(gamma.at(1, 0, 1).value() == doctest::Approx(1.0).epsilon(1e-12)); // cot(pi/4)
    // symmetry in the lower pair
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(gamma.at(k, i, j).value() == gamma.at(k, j, i).value());

    Tensor riem = curv::riemann(m, gamma);
    Tensor ric = curv::ricci_from_riemann(m, riem);
    Jet s = curv::scalar_curvature(m, ric);
    CHECK(s.value() == doctest::Approx(2.0).epsilon(1e-11)); // S = n(n-1) = 2
    // Ric = (n-1) g = g, positive: pins the sign convention
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(ric.at(i, j).value() == doctest::Approx(m.gg(i, j).value()).epsilon(1e-11));
}

TEST_CASE("unit spheres: S = n(n-1), Ric = (n-1) g, W = 0, R = g*g/2") {
    Rng rng(71);
    for (int n : {4, 5}) {
        auto spec = sphere_spec(n);
        for (int rep = 0; rep < 3; ++rep) {
            std::vector<double> p(n);
            for (auto& x : p) x = rng.uniform(-0.8, 0.8);
            auto m = dsl::eval_metric_at(spec, p, 4);
            auto pack = curv::build_curvature_pack(m);
            CHECK(std::abs(pack.scalar.value() - n * (n - 1)) <
                  1e-6 * n * (n - 1)); // S = n(n-1)
            Tensor ric_minus = pack.ricci;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    ric_minus.at(i, j) -= m.gg(i, j) * double(n - 1);
            CHECK(curv::invariant_rms(ric_minus, m) < 1e-9);
            CHECK(curv::invariant_rms(pack.weyl, m) < 1e-9);

            // constant curvature: R = (1/2) g (*) g
            Tensor g2(n, 2, m.order);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) g2.at(i, j) = m.gg(i, j);
            Tensor half_gg = curv::kulkarni_nomizu(g2, g2).scaled(0.5);
            CHECK(rel_tensor_resid(pack.riemann, half_gg, m) < 1e-8);

            // schouten of the unit sphere is g/2
            Tensor k_minus = pack.schouten;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) k_minus.at(i, j) -= m.gg(i, j) * 0.5;
            CHECK(curv::invariant_rms(k_minus, m) < 1e-9);
        }
    }
}

TEST_CASE("kulkarni-nomizu product: expansion, symmetry, curvature symmetries") {
    // orthonormal identity metric: (g*g)(e1,e2,e2,e1) = 2
    auto spec = flat_spec(4);
    std::vector<double> p{0, 0, 0, 0};
    auto m = dsl::eval_metric_at(spec, p, 2);
    Tensor g2(4, 2, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g2.at(i, j) = m.gg(i, j);
    Tensor gg = curv::kulkarni_nomizu(g2, g2);
    CHECK(gg.at(0, 1, 1, 0).value() == doctest::Approx(2.0));
    CHECK(gg.at(0, 1, 0, 1).value() == doctest::Approx(-2.0));
    CHECK(gg.at(0, 1, 2, 3).value() == doctest::Approx(0.0));

    // a*b = b*a and curvature symmetries on random symmetric inputs
    Rng rng(72);
    Tensor a(4, 2, 2), b(4, 2, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            Jet va = Jet::constant(rng.uniform(-1, 1), 4, 2);
            Jet vb = Jet::constant(rng.uniform(-1, 1), 4, 2);
            a.at(i, j) = va;
            a.at(j, i) = va;
            b.at(i, j) = vb;
            b.at(j, i) = vb;
        }
    Tensor ab = curv::kulkarni_nomizu(a, b);
    Tensor ba = curv::kulkarni_nomizu(b, a);
    CHECK(curv::max_abs_value(ab - ba) < 1e-14);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    CHECK(ab.at(i, j, k, l).value() ==
                          doctest::Approx(-ab.at(j, i, k, l).value()));
                    CHECK(ab.at(i, j, k, l).value() ==
                          doctest::Approx(ab.at(k, l, i, j).value()));
                    CHECK(std::abs(ab.at(i, j, k, l).value() + ab.at(j, k, i, l).value() +
                                   ab.at(k, i, j, l).value()) < 1e-13);
                }
}

TEST_CASE("product of unit spheres is einstein with nonzero weyl tensor") {
    auto spec = s2xs2_spec();
    Rng rng(73);
    for (int rep = 0; rep < 3; ++rep) {
        auto p = box_point(rng, spec);
        auto m = dsl::eval_metric_at(spec, p, 4);
        auto pack = curv::build_curvature_pack(m);
        CHECK(pack.scalar.value() == doctest::Approx(4.0).epsilon(1e-10));
        Tensor ric_minus = pack.ricci;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) ric_minus.at(i, j) -= m.gg(i, j);
        CHECK(curv::invariant_rms(ric_minus, m) < 1e-9); // lambda = 1
        CHECK(curv::invariant_rms(pack.weyl, m) > 0.1);
    }
}

TEST_CASE("metricity: nabla g = 0 and d^nabla g = 0") {
    Rng rng(74);
    auto spec = s2xs2_spec();
    auto p = box_point(rng, spec);
    auto m = dsl::eval_metric_at(spec, p, 4);
    auto pack = curv::build_curvature_pack(m);
    Tensor g2(4, 2, m.order);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g2.at(i, j) = m.gg(i, j);
    Tensor ng = curv::covariant_derivative(g2, pack.gamma);
    CHECK(curv::max_abs_value(ng) < 1e-10);
    Tensor dg = curv::dnabla_sym2(g2, pack.gamma);
    CHECK(curv::max_abs_value(dg) < 1e-10);
}

TEST_CASE("covariant derivative of a scalar is its gradient") {
    auto spec = s2xs2_spec();
    Rng rng(75);
    auto p = box_point(rng, spec);
    auto m = dsl::eval_metric_at(spec, p, 4);
    auto pack = curv::build_curvature_pack(m);
    // S as a rank-0 tensor
    Tensor s(4, 0, pack.scalar.order());
    s[0] = pack.scalar;
    Tensor grad = curv::covariant_derivative(s, pack.gamma);
    for (int k = 0; k < 4; ++k)
        CHECK(grad.at(k).value() == doctest::Approx(pack.scalar.derivative(k).value()));
}

TEST_CASE("divergence of a parallel tensor vanishes") {
    auto spec = flat_spec(4);
    std::vector<double> p{0.2, 0.3, -0.1, 0.5};
    auto m = dsl::eval_metric_at(spec, p, 4);
    auto pack = curv::build_curvature_pack(m);
    Tensor g2(4, 2, m.order);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g2.at(i, j) = m.gg(i, j);
    Tensor d = curv::divergence(g2, 2, m, pack.gamma);
    CHECK(curv::max_abs_value(d) == 0.0);
    CHECK_THROWS_AS(curv::divergence(g2, 3, m, pack.gamma), cel::IndexOutOfRange);
}

TEST_CASE("bianchi consequences pin the divergence conventions") {
    // random perturbed metrics in n = 4, 5: delta R = d^nabla Ric and
    // delta W = (n-3) d^nabla schouten
    for (int n : {4, 5}) {
        auto base = flat_spec(n);
        for (std::uint64_t seed : {101u, 102u}) {
            auto spec = cel::sampling::perturbed_spec(base, 0.1, seed);
            Rng rng(seed * 7 + n);
            auto p = box_point(rng, spec);
            auto m = dsl::eval_metric_at(spec, p, 4);
            auto pack = curv::build_curvature_pack(m);

            Tensor dR = curv::divergence(pack.riemann, 4, m, pack.gamma);
            Tensor dnr = curv::dnabla_sym2(pack.ricci, pack.gamma);
            CHECK(rel_tensor_resid(dR, dnr, m) < 1e-9);

            Tensor dW = curv::divergence(pack.weyl, 4, m, pack.gamma);
            Tensor dnk = curv::dnabla_sym2(pack.schouten, pack.gamma).scaled(double(n - 3));
            CHECK(rel_tensor_resid(dW, dnk, m) < 1e-8);

            // delta_1 W (X,Y,Z) = delta_4 W (Z,Y,X)
            Tensor d1 = curv::divergence(pack.weyl, 1, m, pack.gamma);
            Tensor d4 = curv::divergence(pack.weyl, 4, m, pack.gamma);
            double resid = 0.0;
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    for (int z = 0; z < n; ++z)
                        resid = std::max(resid, std::abs(d1.at(x, y, z).value() -
                                                         d4.at(z, y, x).value()));
            CHECK(resid < 1e-10);
        }
    }
}

TEST_CASE("einstein fixture: schouten is parallel, weyl divergence-free") {
    auto spec = s2xs2_spec();
    Rng rng(76);
    auto p = box_point(rng, spec);
    auto m = dsl::eval_metric_at(spec, p, 4);
    auto pack = curv::build_curvature_pack(m);
    Tensor dnk = curv::dnabla_sym2(pack.schouten, pack.gamma);
    CHECK(curv::invariant_rms(dnk, m) < 1e-9);
    Tensor dW = curv::divergence(pack.weyl, 4, m, pack.gamma);
    CHECK(curv::invariant_rms(dW, m) < 1e-7);
}

TEST_CASE("weyl rescales with weight -2 under constant conformal factors") {
    // homothety: gbar = e^{-2c} g evaluated directly
    auto spec = s2xs2_spec();
    const double c = 0.3;
    dsl::MetricSpec scaled = spec;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            scaled.entries[i * 4 + j] = dsl::Expr::binary(
                dsl::BinaryOp::Mul, dsl::Expr::constant(std::exp(-2.0 * c)),
                spec.entries[i * 4 + j]);
    Rng rng(77);
    auto p = box_point(rng, spec);
    auto m1 = dsl::eval_metric_at(spec, p, 4);
    auto m2 = dsl::eval_metric_at(scaled, p, 4);
    auto pack1 = curv::build_curvature_pack(m1);
    auto pack2 = curv::build_curvature_pack(m2);
    Tensor expect = pack1.weyl.scaled(std::exp(-2.0 * c));
    CHECK(rel_tensor_resid(pack2.weyl, expect, m1) < 1e-12);
    // christoffel symbols are unchanged under homotheties
    CHECK(curv::max_abs_value(pack2.gamma - pack1.gamma) < 1e-12);
}
