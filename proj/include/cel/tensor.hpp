#pragma once

#include <vector>

#include "cel/metric.hpp"

namespace cel::curv {

// Dense coordinate-frame tensor with jet components. All slots range over the
// manifold dimension; the caller tracks variance (which slots are up/down)
// through naming. Components are zero jets on construction.
class Tensor {
public:
    Tensor() : dim_(0), rank_(0), order_(0) {}
    Tensor(int dim, int rank, int order);

    int dim() const { return dim_; }
    int rank() const { return rank_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(c_.size()); }

    jets::Jet& operator[](int flat) { return c_[flat]; }
    const jets::Jet& operator[](int flat) const { return c_[flat]; }

    jets::Jet& at(int i) { return c_[i]; }
    jets::Jet& at(int i, int j) { return c_[i * dim_ + j]; }
    jets::Jet& at(int i, int j, int k) { return c_[(i * dim_ + j) * dim_ + k]; }
    jets::Jet& at(int i, int j, int k, int l) { return c_[((i * dim_ + j) * dim_ + k) * dim_ + l]; }
    jets::Jet& at(int i, int j, int k, int l, int m) {
        return c_[(((i * dim_ + j) * dim_ + k) * dim_ + l) * dim_ + m];
    }
    const jets::Jet& at(int i) const { return c_[i]; }
    const jets::Jet& at(int i, int j) const { return c_[i * dim_ + j]; }
    const jets::Jet& at(int i, int j, int k) const { return c_[(i * dim_ + j) * dim_ + k]; }
    const jets::Jet& at(int i, int j, int k, int l) const {
        return c_[((i * dim_ + j) * dim_ + k) * dim_ + l];
    }
    const jets::Jet& at(int i, int j, int k, int l, int m) const {
        return c_[(((i * dim_ + j) * dim_ + k) * dim_ + l) * dim_ + m];
    }

    // decode a flat position into indices
    void indices(int flat, int* out) const;

    Tensor operator+(const Tensor& o) const;
    Tensor operator-(const Tensor& o) const;
    Tensor scaled(const jets::Jet& f) const;
    Tensor scaled(double f) const;

    // constant terms of all components
    std::vector<double> values() const;

private:
    int dim_, rank_, order_;
    std::vector<jets::Jet> c_;
};

// Frobenius norm of the constant terms with all indices raised by g_inv,
// divided by sqrt(component count). Chart-independent for honest tensors.
double invariant_rms(const Tensor& t, const dsl::MetricJets& m);

// Same norm for an explicit component value array of the given rank.
double invariant_rms(const std::vector<double>& comp, int dim, int rank,
                     const dsl::MetricJets& m);

// Plain component RMS of constant terms (no metric contraction).
double component_rms(const Tensor& t);

// max |constant term|
double max_abs_value(const Tensor& t);

} // namespace cel::curv
