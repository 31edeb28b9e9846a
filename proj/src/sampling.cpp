#include "cel/sampling.hpp"

#include <cmath>

namespace cel::sampling {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t Rng::next_u64() { return splitmix64(seed_ ^ (0x9e3779b97f4a7c15ull * ++counter_)); }

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

int Rng::next_below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

std::vector<std::vector<double>> sample_points(const dsl::MetricSpec& spec, int count,
                                               std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> pts;
    pts.reserve(count);
    for (int k = 0; k < count; ++k) {
        std::vector<double> p(spec.dim);
        for (int i = 0; i < spec.dim; ++i)
            p[i] = rng.uniform(spec.region[i].lo, spec.region[i].hi);
        pts.push_back(std::move(p));
    }
    return pts;
}

dsl::ExprPtr random_smooth_expression(const std::vector<std::string>& coord_names,
                                      std::uint64_t seed, double amplitude, int terms) {
    using dsl::BinaryOp;
    using dsl::Expr;
    using dsl::UnaryOp;
    Rng rng(seed);
    const int n = static_cast<int>(coord_names.size());
    dsl::ExprPtr sum;
    for (int t = 0; t < terms; ++t) {
        // coefficient rounded so documents print compactly and reparse exactly
        double c = std::round(rng.uniform(-amplitude, amplitude) * 1024.0) / 1024.0;
        if (c == 0.0) c = amplitude / 2;
        dsl::ExprPtr term = Expr::constant(c);
        const int factors = 1 + rng.next_below(2);
        for (int f = 0; f < factors; ++f) {
            int ci = rng.next_below(n);
            dsl::ExprPtr arg = Expr::coordinate(ci);
            if (rng.next_below(2) == 1)
                arg = Expr::binary(BinaryOp::Mul, Expr::constant(2.0), arg);
            dsl::ExprPtr wave = rng.next_below(2) == 0 ? Expr::unary(UnaryOp::Sin, arg)
                                                       : Expr::unary(UnaryOp::Cos, arg);
            term = Expr::binary(BinaryOp::Mul, term, wave);
        }
        sum = sum ? Expr::binary(BinaryOp::Add, sum, term) : term;
    }
    return sum;
}

dsl::MetricSpec perturbed_spec(const dsl::MetricSpec& base, double eps, std::uint64_t seed) {
    using dsl::BinaryOp;
    using dsl::Expr;
    dsl::MetricSpec r = base;
    for (int i = 0; i < base.dim; ++i)
        for (int j = i; j < base.dim; ++j) {
            std::uint64_t entry_seed = seed * 1000003ull + static_cast<std::uint64_t>(i * base.dim + j);
            dsl::ExprPtr h = random_smooth_expression(base.coord_names, entry_seed, 1.0);
            dsl::ExprPtr term = Expr::binary(BinaryOp::Mul, Expr::constant(eps), h);
            const dsl::ExprPtr& b = base.entries[i * base.dim + j];
            dsl::ExprPtr e = (b->kind == Expr::Kind::Constant && b->value == 0.0)
                                 ? term
                                 : Expr::binary(BinaryOp::Add, b, term);
            r.entries[i * base.dim + j] = e;
            r.entries[j * base.dim + i] = e;
        }
    return r;
}

} // namespace cel::sampling
