#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cel/errors.hpp"

namespace cel::jets {

inline constexpr int kMaxOrder = 4;

// Multi-index table for truncated Taylor expansions of total degree <= order
// in `dim` variables. Indices are graded (by total degree, then lexicographic),
// so the coefficient array of a lower order is a prefix of a higher one.
// Instances are cached and shared; all jets of a given (dim, order) use the
// same layout.
class JetLayout {
public:
    static const JetLayout& get(int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(exponents_.size()) / dim_; }

    // Exponent vector of the multi-index stored at `pos`.
    std::span<const std::uint8_t> exponents(int pos) const {
        return {exponents_.data() + static_cast<std::size_t>(pos) * dim_,
                static_cast<std::size_t>(dim_)};
    }
    int degree(int pos) const { return degree_[pos]; }

    // Position of a multi-index, or -1 if its degree exceeds the order.
    int position(std::span<const int> alpha) const;

    struct ProductTerm {
        std::int32_t a, b, target;
    };
    // All coefficient pairs (a, b) with deg(a) + deg(b) <= order, and the
    // position their product contributes to. Drives truncated convolution.
    std::span<const ProductTerm> products() const { return products_; }

    // alpha! for the multi-index at `pos`.
    double factorial(int pos) const { return factorial_[pos]; }

private:
    JetLayout(int dim, int order);

    int dim_;
    int order_;
    std::vector<std::uint8_t> exponents_; // size() * dim_ entries
    std::vector<std::uint8_t> degree_;
    std::vector<double> factorial_;
    std::vector<ProductTerm> products_;
};

// Truncated multivariate Taylor expansion of a scalar at a base point.
// Coefficients store derivative/alpha! (Taylor coefficients), so products are
// plain truncated convolutions. Jets are immutable values; every operation is
// pure and returns a fresh jet. Binary operations on mixed orders truncate to
// the smaller order.
class Jet {
public:
    Jet() : dim_(0), order_(0) {}
    Jet(int dim, int order)
        : dim_(dim), order_(order), c_(JetLayout::get(dim, order).size(), 0.0) {}

    static Jet constant(double value, int dim, int order);
    // Jet of the coordinate function x_i at a point with point[i] = base.
    static Jet variable(double base, int var, int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }
    const JetLayout& layout() const { return JetLayout::get(dim_, order_); }

    double value() const { return c_.empty() ? 0.0 : c_[0]; }
    std::span<const double> coefficients() const { return c_; }
    double& raw(int pos) { return c_[pos]; }
    double raw(int pos) const { return c_[pos]; }

    // Taylor coefficient of the multi-index alpha.
    double coefficient(std::span<const int> alpha) const;
    // Partial derivative d^alpha at the base point, i.e. alpha! * coefficient.
    double partial(std::span<const int> alpha) const;

    Jet truncated(int order) const;
    // Jet of the partial derivative with respect to variable `var`; drops one
    // order.
    Jet derivative(int var) const;

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator+=(double v);
    Jet& operator-=(double v);
    Jet& operator*=(double v);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator+(Jet a, double v) { return a += v; }
    friend Jet operator+(double v, Jet a) { return a += v; }
    friend Jet operator-(Jet a, double v) { return a -= v; }
    friend Jet operator-(double v, const Jet& a) { return -a + v; }
    friend Jet operator*(Jet a, double v) { return a *= v; }
    friend Jet operator*(double v, Jet a) { return a *= v; }
    friend Jet operator/(Jet a, double v) { return a *= 1.0 / v; }
    friend Jet operator/(double v, const Jet& a);

private:
    int dim_;
    int order_;
    std::vector<double> c_;
};

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
// Integer exponents use repeated multiplication (division for negative);
// other exponents go through exp(p*log) and need a positive constant term.
Jet pow(const Jet& a, double p);

} // namespace cel::jets
