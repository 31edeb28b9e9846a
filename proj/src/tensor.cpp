#include "cel/tensor.hpp"

#include <cmath>

namespace cel::curv {

Tensor::Tensor(int dim, int rank, int order) : dim_(dim), rank_(rank), order_(order) {
    int n = 1;
    for (int r = 0; r < rank; ++r) n *= dim;
    c_.assign(n, jets::Jet::constant(0.0, dim, order));
}

void Tensor::indices(int flat, int* out) const {
    for (int r = rank_ - 1; r >= 0; --r) {
        out[r] = flat % dim_;
        flat /= dim_;
    }
}

Tensor Tensor::operator+(const Tensor& o) const {
    Tensor r = *this;
    r.order_ = std::min(order_, o.order_);
    for (int i = 0; i < size(); ++i) r.c_[i] += o.c_[i];
    return r;
}

Tensor Tensor::operator-(const Tensor& o) const {
    Tensor r = *this;
    r.order_ = std::min(order_, o.order_);
    for (int i = 0; i < size(); ++i) r.c_[i] -= o.c_[i];
    return r;
}

Tensor Tensor::scaled(const jets::Jet& f) const {
    Tensor r = *this;
    r.order_ = std::min(order_, f.order());
    for (int i = 0; i < size(); ++i) r.c_[i] = c_[i] * f;
    return r;
}

Tensor Tensor::scaled(double f) const {
    Tensor r = *this;
    for (int i = 0; i < size(); ++i) r.c_[i] *= f;
    return r;
}

std::vector<double> Tensor::values() const {
    std::vector<double> v(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) v[i] = c_[i].value();
    return v;
}

double invariant_rms(const std::vector<double>& comp, int dim, int rank,
                     const dsl::MetricJets& m) {
    if (rank == 0) return comp.empty() ? 0.0 : std::abs(comp[0]);
    // raise one index per pass
    std::vector<double> up = comp;
    std::vector<double> next(comp.size());
    int outer = 1;                                  // product of extents before the slot
    int inner = static_cast<int>(comp.size()) / dim; // product after the slot
    for (int slot = 0; slot < rank; ++slot) {
        for (int o = 0; o < outer; ++o)
            for (int a = 0; a < dim; ++a)
                for (int in = 0; in < inner; ++in) {
                    double s = 0.0;
                    for (int b = 0; b < dim; ++b)
                        s += m.inv(a, b).value() * up[(o * dim + b) * inner + in];
                    next[(o * dim + a) * inner + in] = s;
                }
        std::swap(up, next);
        outer *= dim;
        inner /= dim;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < comp.size(); ++i) s += comp[i] * up[i];
    // tiny negative values can appear through rounding on near-zero tensors
    s = std::max(s, 0.0);
    return std::sqrt(s / static_cast<double>(comp.size()));
}

double invariant_rms(const Tensor& t, const dsl::MetricJets& m) {
    return invariant_rms(t.values(), t.dim(), t.rank(), m);
}

double component_rms(const Tensor& t) {
    double s = 0.0;
    for (int i = 0; i < t.size(); ++i) {
        double v = t[i].value();
        s += v * v;
    }
    return std::sqrt(s / std::max(1, t.size()));
}

double max_abs_value(const Tensor& t) {
    double s = 0.0;
    for (int i = 0; i < t.size(); ++i) s = std::max(s, std::abs(t[i].value()));
    return s;
}

} // namespace cel::curv
