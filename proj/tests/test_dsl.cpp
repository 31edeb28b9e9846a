#include <doctest.h>

#include <cmath>

#include "cel/metric.hpp"
#include "support/oracles.hpp"

using namespace cel::dsl;
using cel::sampling::Rng;

namespace {
const std::vector<std::string> kSphereCoords{"theta", "phi"};
const std::vector<std::string> kRT{"r", "t"};
} // namespace

TEST_CASE("grammar: precedence and functions") {
    ExprPtr e = parse_expression("sin(theta)^2", kSphereCoords);
    REQUIRE(e->kind == Expr::Kind::Binary);
    CHECK(e->bop == BinaryOp::Pow);
    CHECK(e->lhs->kind == Expr::Kind::Unary);
    CHECK(e->lhs->uop == UnaryOp::Sin);
    CHECK(e->lhs->lhs->kind == Expr::Kind::Coordinate);
    CHECK(e->lhs->lhs->coord == 0);
    CHECK(e->rhs->kind == Expr::Kind::Constant);
    CHECK(e->rhs->value == 2.0);

    ExprPtr nested = parse_expression("1/(1 - 1/r)", kRT);
    REQUIRE(nested->kind == Expr::Kind::Binary);
    CHECK(nested->bop == BinaryOp::Div);
    CHECK(nested->rhs->kind == Expr::Kind::Binary);
    CHECK(nested->rhs->bop == BinaryOp::Sub);
    CHECK(nested->rhs->rhs->bop == BinaryOp::Div);

    CHECK_THROWS_AS(parse_expression("sinh(r)", kRT), cel::UnknownIdentifier);
    CHECK_THROWS_AS(parse_expression("r + q", kRT), cel::UnknownIdentifier);
    CHECK_THROWS_AS(parse_expression("r ^ t", kRT), cel::NonConstantExponent);
    CHECK_THROWS_AS(parse_expression("(r", kRT), cel::SyntaxError);
    CHECK_THROWS_AS(parse_expression("r + ", kRT), cel::SyntaxError);

    // pow binds tighter than unary minus; mul/div bind tighter than add/sub
    ExprPtr neg = parse_expression("-r^2", kRT);
    CHECK(neg->kind == Expr::Kind::Unary);
    CHECK(neg->uop == UnaryOp::Neg);
    CHECK(neg->lhs->bop == BinaryOp::Pow);
    CHECK(eval(*parse_expression("2 + 3*4", kRT), {{1.0, 1.0}}) == 14.0);
    CHECK(eval(*parse_expression("2 - 3 - 4", kRT), {{1.0, 1.0}}) == -5.0);
    CHECK(eval(*parse_expression("2^2^3", kRT), {{1.0, 1.0}}) == 256.0); // right associative

    // syntax errors carry the byte offset
    try {
        parse_expression("1 + $", kRT);
        CHECK(false);
    } catch (const cel::SyntaxError& e) {
        CHECK(e.offset() == 4);
    }
}

TEST_CASE("pretty-print then parse is a fixed point") {
    const std::vector<std::string> coords{"x", "y", "z"};
    for (const char* text :
         {"sin(x)^2 + cos(y)*z", "1/(1 - 1/x)", "-x^2 + (-y)^3", "x*(y + z)*2.5",
          "exp(-2*(0.2*sin(x) + 0.1*cos(y)))*sqrt(1.5 + z^2)", "x - -2", "x/-3", "ln(1.5 + x^2)"}) {
        ExprPtr e = parse_expression(text, coords);
        std::string printed = to_string(*e, coords);
        ExprPtr e2 = parse_expression(printed, coords);
        CHECK(equal(*e, *e2));
        CHECK(to_string(*e2, coords) == printed);
    }
    Rng rng(301);
    for (int rep = 0; rep < 200; ++rep) {
        ExprPtr e = oracles::random_expression(rng, 3, 3);
        std::string printed = to_string(*e, coords);
        ExprPtr e2 = parse_expression(printed, coords);
        CHECK(equal(*e, *e2));
    }
}

TEST_CASE("plain evaluation agrees with order-0 jets") {
    Rng rng(303);
    for (int rep = 0; rep < 100; ++rep) {
        ExprPtr e = oracles::random_expression(rng, 2, 3);
        std::vector<double> p{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
        double plain = eval(*e, p);
        double jet = eval_jet(*e, p, 0).value();
        CHECK(std::abs(plain - jet) <= 1e-14 * (std::abs(plain) + 1.0));
    }
}

TEST_CASE("metric documents parse, default entries to zero") {
    MetricSpec spec =
        parse_metric_document("dim = 3\ncoords = x, y, z\ng[1][1]=1\ng[2][2]=1\ng[3][3]=1\n");
    CHECK(spec.dim == 3);
    CHECK(spec.coord_names[2] == "z");
    CHECK(spec.entry(0, 1).kind == Expr::Kind::Constant);
    CHECK(spec.entry(0, 1).value == 0.0);

    CHECK_THROWS_AS(parse_metric_document("coords = x, y, z\ng[1][1]=1\n"), cel::MissingDimension);
    CHECK_THROWS_AS(parse_metric_document("dim = 3\ncoords = x, y, z\ng[2][1]=1\n"),
                    cel::IndexOutOfRange);
    CHECK_THROWS_AS(parse_metric_document("dim = 3\ncoords = x, y, z\ng[1][4]=1\n"),
                    cel::IndexOutOfRange);
    CHECK_THROWS_AS(parse_metric_document("dim = 3\ncoords = x, y, z\ng[1][1]=1\ng[1][1]=2\n"),
                    cel::DuplicateEntry);
    CHECK_THROWS_AS(parse_metric_document("dim = 2\ncoords = x, y\ng[1][1]=1\n"),
                    cel::SyntaxError);
    CHECK_THROWS_AS(parse_metric_document("dim = 3\ncoords = x, y\n"), cel::SyntaxError);
}

TEST_CASE("schwarzschild document round-trips through evaluation") {
    const char* doc = R"(
# fixture
name = schw
dim = 4
coords = r, th, ph, t
region = r: 3 .. 10, th: 0.7 .. 2.4, ph: 0.1 .. 3, t: -1 .. 1
g[1][1] = 1/(1 - 1/r)
g[2][2] = r^2
g[3][3] = r^2*sin(th)^2
g[4][4] = 1 - 1/r
)";
    MetricSpec spec = parse_metric_document(doc);
    CHECK(spec.name == "schw");
    CHECK(spec.region[0].lo == 3.0);
    CHECK(spec.region[0].hi == 10.0);

    // hand-coded evaluator as the oracle
    auto hand = [](const std::vector<double>& p, int i) {
        const double r = p[0], th = p[1];
        switch (i) {
        case 0: return 1.0 / (1.0 - 1.0 / r);
        case 1: return r * r;
        case 2: return r * r * std::sin(th) * std::sin(th);
        default: return 1.0 - 1.0 / r;
        }
    };
    Rng rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> p{rng.uniform(3.0, 10.0), rng.uniform(0.7, 2.4), rng.uniform(0.1, 3.0),
                              rng.uniform(-1.0, 1.0)};
        MetricJets m = eval_metric_at(spec, p, 2);
        for (int i = 0; i < 4; ++i)
            CHECK(m.gg(i, i).value() == doctest::Approx(hand(p, i)).epsilon(1e-13));
        CHECK(m.gg(0, 1).value() == 0.0);
    }

    // document print/parse round trip preserves evaluation
    MetricSpec reparsed = parse_metric_document(to_document(spec));
    std::vector<double> p{4.0, 1.0, 1.0, 0.0};
    for (int i = 0; i < 16; ++i)
        CHECK(eval(*reparsed.entries[i], p) ==
              doctest::Approx(eval(*spec.entries[i], p)).epsilon(1e-15));
}

TEST_CASE("metric evaluation: identity, sin^2 factor, inverse identity") {
    MetricSpec flat = parse_metric_document(
        "dim = 4\ncoords = x1, x2, x3, x4\ng[1][1]=1\ng[2][2]=1\ng[3][3]=1\ng[4][4]=1\n");
    std::vector<double> p{0.3, -0.2, 0.5, 0.9};
    MetricJets m = eval_metric_at(flat, p, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(m.gg(i, j).value() == (i == j ? 1.0 : 0.0));
            CHECK(m.inv(i, j).value() == (i == j ? 1.0 : 0.0));
        }

    // the round-sphere factor: sin^2(pi/3) = 3/4
    MetricSpec prod = parse_metric_document("dim = 4\ncoords = t1, p1, t2, p2\ng[1][1]=1\n"
                                            "g[2][2]=sin(t1)^2\ng[3][3]=1\ng[4][4]=sin(t2)^2\n");
    std::vector<double> q{M_PI / 3, 0.4, 1.0, 1.2};
    MetricJets mp = eval_metric_at(prod, q, 3);
    CHECK(mp.gg(1, 1).value() == doctest::Approx(0.75).epsilon(1e-14));

    // g * g^{-1} = identity as jets
    Rng rng(55);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> pt{rng.uniform(0.7, 2.4), rng.uniform(0.1, 3.0), rng.uniform(0.7, 2.4),
                               rng.uniform(0.1, 3.0)};
        MetricJets mm = eval_metric_at(prod, pt, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                cel::jets::Jet s = cel::jets::Jet::constant(0.0, 4, 4);
                for (int k = 0; k < 4; ++k) s += mm.gg(i, k) * mm.inv(k, j);
                for (int c = 0; c < s.layout().size(); ++c) {
                    double want = (i == j && c == 0) ? 1.0 : 0.0;
                    CHECK(std::abs(s.raw(c) - want) < 1e-10);
                }
            }
    }
}

TEST_CASE("indefinite metrics are rejected with the smallest eigenvalue") {
    MetricSpec bad =
        parse_metric_document("dim = 3\ncoords = x, y, z\ng[1][1]=1\ng[2][2]=-1\ng[3][3]=1\n");
    std::vector<double> p{0.0, 0.0, 0.0};
    try {
        eval_metric_at(bad, p, 2);
        CHECK(false);
    } catch (const cel::SingularMetric& e) {
        CHECK(e.smallest_eigenvalue() == doctest::Approx(-1.0));
    }
    MetricSpec dom = parse_metric_document(
        "dim = 3\ncoords = x, y, z\ng[1][1]=ln(x)\ng[2][2]=1\ng[3][3]=1\n");
    std::vector<double> neg{-1.0, 0.5, 0.5};
    CHECK_THROWS_AS(eval_metric_at(dom, neg, 2), cel::DomainError);
}
