#include "cel/jets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace cel::jets {

namespace {

// Multi-indices of total degree <= order in graded lexicographic order.
void enumerate(int dim, int order, std::vector<std::vector<int>>& out) {
    for (int deg = 0; deg <= order; ++deg) {
        std::vector<int> alpha(dim, 0);
        // iterate compositions of `deg` into `dim` parts, lexicographic
        alpha[0] = deg;
        if (dim == 1) {
            out.push_back(alpha);
            continue;
        }
        while (true) {
            out.push_back(alpha);
            // next composition
            int i = dim - 2;
            while (i >= 0 && alpha[i] == 0) --i;
            if (i < 0) break;
            --alpha[i];
            int rest = deg;
            for (int j = 0; j <= i; ++j) rest -= alpha[j];
            alpha[i + 1] = rest;
            for (int j = i + 2; j < dim; ++j) alpha[j] = 0;
        }
    }
}

std::uint64_t pack(std::span<const std::uint8_t> alpha) {
    std::uint64_t key = 0;
    for (std::uint8_t e : alpha) key = key * 8 + e;
    return key;
}

} // namespace

JetLayout::JetLayout(int dim, int order) : dim_(dim), order_(order) {
    std::vector<std::vector<int>> indices;
    enumerate(dim, order, indices);
    exponents_.reserve(indices.size() * dim);
    degree_.reserve(indices.size());
    factorial_.reserve(indices.size());
    std::map<std::uint64_t, int> pos_of;
    for (std::size_t p = 0; p < indices.size(); ++p) {
        int deg = 0;
        double fact = 1.0;
        for (int e : indices[p]) {
            exponents_.push_back(static_cast<std::uint8_t>(e));
            deg += e;
            for (int k = 2; k <= e; ++k) fact *= k;
        }
        degree_.push_back(static_cast<std::uint8_t>(deg));
        factorial_.push_back(fact);
        pos_of[pack(exponents(static_cast<int>(p)))] = static_cast<int>(p);
    }
    const int n = size();
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (degree_[a] + degree_[b] > order) continue;
            std::vector<std::uint8_t> sum(dim_);
            auto ea = exponents(a), eb = exponents(b);
            for (int i = 0; i < dim_; ++i) sum[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
            products_.push_back({a, b, pos_of.at(pack(sum))});
        }
    }
    // Sort by target so accumulation is cache friendly.
    std::sort(products_.begin(), products_.end(),
              [](const ProductTerm& x, const ProductTerm& y) { return x.target < y.target; });
}

const JetLayout& JetLayout::get(int dim, int order) {
    if (dim < 1 || order < 0 || order > kMaxOrder)
        throw OrderExhausted("jet layout: dim must be >= 1 and 0 <= order <= 4, got dim=" +
                             std::to_string(dim) + " order=" + std::to_string(order));
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{dim, order}];
    if (!slot) slot.reset(new JetLayout(dim, order));
    return *slot;
}

int JetLayout::position(std::span<const int> alpha) const {
    if (static_cast<int>(alpha.size()) != dim_)
        throw OrderExhausted("multi-index has wrong number of variables");
    int deg = 0;
    for (int e : alpha) {
        if (e < 0) throw OrderExhausted("negative multi-index entry");
        deg += e;
    }
    if (deg > order_) return -1;
    // graded layout: scan the block of matching degree
    const int n = size();
    for (int p = 0; p < n; ++p) {
        if (degree_[p] != deg) continue;
        auto e = exponents(p);
        bool match = true;
        for (int i = 0; i < dim_; ++i)
            if (e[i] != alpha[i]) {
                match = false;
                break;
            }
        if (match) return p;
    }
    return -1;
}

Jet Jet::constant(double value, int dim, int order) {
    Jet j(dim, order);
    j.c_[0] = value;
    return j;
}

Jet Jet::variable(double base, int var, int dim, int order) {
    if (var < 0 || var >= dim)
        throw IndexOutOfRange("variable index " + std::to_string(var) + " out of range for dim " +
                              std::to_string(dim));
    Jet j(dim, order);
    j.c_[0] = base;
    if (order >= 1) j.c_[1 + var] = 1.0; // degree-1 block is x_0..x_{dim-1} in order
    return j;
}

double Jet::coefficient(std::span<const int> alpha) const {
    int pos = layout().position(alpha);
    if (pos < 0)
        throw OrderExhausted("multi-index degree exceeds jet order " + std::to_string(order_));
    return c_[pos];
}

double Jet::partial(std::span<const int> alpha) const {
    int pos = layout().position(alpha);
    if (pos < 0)
        throw OrderExhausted("multi-index degree exceeds jet order " + std::to_string(order_));
    return c_[pos] * layout().factorial(pos);
}

Jet Jet::truncated(int order) const {
    if (order >= order_) return *this;
    Jet r(dim_, order);
    std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
    return r;
}

Jet Jet::derivative(int var) const {
    if (var < 0 || var >= dim_) throw IndexOutOfRange("derivative variable out of range");
    if (order_ == 0) throw OrderExhausted("cannot differentiate an order-0 jet");
    Jet r(dim_, order_ - 1);
    const JetLayout& lo = r.layout();
    const JetLayout& hi = layout();
    std::vector<int> alpha(dim_);
    for (int p = 0; p < lo.size(); ++p) {
        auto e = lo.exponents(p);
        for (int i = 0; i < dim_; ++i) alpha[i] = e[i];
        ++alpha[var];
        int src = hi.position(alpha);
        r.c_[p] = c_[src] * alpha[var];
    }
    return r;
}

namespace {
// Align two jets on a common (dim-checked, min-order) footing.
int common_order(const Jet& a, const Jet& b) {
    if (a.dim() != b.dim())
        throw OrderExhausted("jet dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                             std::to_string(b.dim()));
    return std::min(a.order(), b.order());
}
} // namespace

Jet Jet::operator-() const {
    Jet r = *this;
    for (double& v : r.c_) v = -v;
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    int ord = common_order(*this, o);
    if (ord < order_) *this = truncated(ord);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    int ord = common_order(*this, o);
    if (ord < order_) *this = truncated(ord);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator+=(double v) {
    c_[0] += v;
    return *this;
}

Jet& Jet::operator-=(double v) {
    c_[0] -= v;
    return *this;
}

Jet& Jet::operator*=(double v) {
    for (double& x : c_) x *= v;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    int ord = common_order(a, b);
    Jet r(a.dim(), ord);
    const auto& la = JetLayout::get(a.dim(), ord);
    const double* ca = a.coefficients().data();
    const double* cb = b.coefficients().data();
    for (const auto& t : la.products()) r.raw(t.target) += ca[t.a] * cb[t.b];
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    int ord = common_order(a, b);
    if (b.value() == 0.0)
        throw SingularPointError("jet division by zero constant term");
    // Solve b*q = a order by order: q_g = (a_g - sum_{0<beta<=g} b_beta q_{g-beta}) / b_0.
    Jet q(a.dim(), ord);
    const auto& l = JetLayout::get(a.dim(), ord);
    const double inv_b0 = 1.0 / b.value();
    // products() is sorted by target; the graded layout guarantees that every
    // q coefficient a term needs is already solved when its target comes up.
    const double* cb = b.coefficients().data();
    int next = 0;
    const auto terms = l.products();
    for (int g = 0; g < l.size(); ++g) {
        double sum = 0.0;
        while (next < static_cast<int>(terms.size()) && terms[next].target == g) {
            const auto& t = terms[next];
            if (t.a != 0) // skip the b_0 * q_g term; it is the unknown
                sum += cb[t.a] * q.raw(t.b);
            ++next;
        }
        q.raw(g) = (a.raw(g) - sum) * inv_b0;
    }
    return q;
}

Jet operator/(double v, const Jet& a) {
    return Jet::constant(v, a.dim(), a.order()) / a;
}

namespace {

// Composition f(a) = sum_k c_k (a - a_0)^k with c_k = f^(k)(a_0)/k!.
// delta has zero constant term, so the Horner loop is exact at truncation.
Jet compose(const Jet& a, std::span<const double> c) {
    Jet delta = a;
    delta -= a.value();
    int ord = a.order();
    Jet r = Jet::constant(c[ord], a.dim(), ord);
    for (int k = ord - 1; k >= 0; --k) {
        r = r * delta;
        r += c[k];
    }
    return r;
}

} // namespace

Jet sin(const Jet& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    const double coef[kMaxOrder + 1] = {s, c, -s / 2.0, -c / 6.0, s / 24.0};
    return compose(a, {coef, static_cast<std::size_t>(a.order() + 1)});
}

Jet cos(const Jet& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    const double coef[kMaxOrder + 1] = {c, -s, -c / 2.0, s / 6.0, c / 24.0};
    return compose(a, {coef, static_cast<std::size_t>(a.order() + 1)});
}

Jet exp(const Jet& a) {
    const double e = std::exp(a.value());
    const double coef[kMaxOrder + 1] = {e, e, e / 2.0, e / 6.0, e / 24.0};
    return compose(a, {coef, static_cast<std::size_t>(a.order() + 1)});
}

Jet log(const Jet& a) {
    const double u = a.value();
    if (u <= 0.0) throw DomainError("log of non-positive constant term");
    const double coef[kMaxOrder + 1] = {std::log(u), 1.0 / u, -1.0 / (2.0 * u * u),
                                        1.0 / (3.0 * u * u * u), -1.0 / (4.0 * u * u * u * u)};
    return compose(a, {coef, static_cast<std::size_t>(a.order() + 1)});
}

Jet sqrt(const Jet& a) {
    const double u = a.value();
    if (u <= 0.0) throw DomainError("sqrt of non-positive constant term");
    const double r = std::sqrt(u);
    // d^k sqrt(u) / k!
    const double coef[kMaxOrder + 1] = {r, 0.5 / r, -1.0 / (8.0 * u * r), 1.0 / (16.0 * u * u * r),
                                        -5.0 / (128.0 * u * u * u * r)};
    return compose(a, {coef, static_cast<std::size_t>(a.order() + 1)});
}

Jet pow(const Jet& a, double p) {
    const double ip = std::nearbyint(p);
    if (ip == p && std::abs(p) <= 64) {
        int e = static_cast<int>(ip);
        if (e == 0) return Jet::constant(1.0, a.dim(), a.order());
        bool neg = e < 0;
        e = neg ? -e : e;
        Jet r = a;
        for (int k = 1; k < e; ++k) r = r * a;
        if (neg) return Jet::constant(1.0, a.dim(), a.order()) / r;
        return r;
    }
    if (a.value() <= 0.0)
        throw DomainError("pow with non-integer exponent needs a positive constant term");
    return exp(log(a) * p);
}

} // namespace cel::jets
