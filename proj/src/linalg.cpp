#include "cel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cel::linalg {

Matd Matd::identity(int n) {
    Matd m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matd Matd::transposed() const {
    Matd t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matd operator*(const Matd& a, const Matd& b) {
    Matd r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int k = 0; k < a.cols_; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

Matd operator-(const Matd& a, const Matd& b) {
    Matd r = a;
    for (int i = 0; i < a.rows_; ++i)
        for (int j = 0; j < a.cols_; ++j) r(i, j) -= b(i, j);
    return r;
}

Matd operator+(const Matd& a, const Matd& b) {
    Matd r = a;
    for (int i = 0; i < a.rows_; ++i)
        for (int j = 0; j < a.cols_; ++j) r(i, j) += b(i, j);
    return r;
}

Matd& Matd::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

std::vector<double> Matd::apply(const std::vector<double>& x) const {
    std::vector<double> y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
}

double Matd::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

double Matd::frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

EigenDecomposition eigh(const Matd& a) {
    const int n = a.rows();
    Matd d = a, v = Matd::identity(n);
    // symmetrize defensively against rounding in the caller's assembly
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double m = 0.5 * (d(i, j) + d(j, i));
            d(i, j) = d(j, i) = m;
        }
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += d(p, q) * d(p, q);
        if (off <= 1e-30 * std::max(1.0, d.frobenius() * d.frobenius())) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = d(p, q);
                if (apq == 0.0) continue;
                const double scale = std::abs(d(p, p)) + std::abs(d(q, q));
                if (std::abs(apq) < 1e-18 * std::max(1.0, scale)) continue;
                const double theta = 0.5 * std::atan2(2.0 * apq, d(q, q) - d(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                // rotate rows/columns p and q
                for (int k = 0; k < n; ++k) {
                    const double dkp = d(k, p), dkq = d(k, q);
                    d(k, p) = c * dkp - s * dkq;
                    d(k, q) = s * dkp + c * dkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double dpk = d(p, k), dqk = d(q, k);
                    d(p, k) = c * dpk - s * dqk;
                    d(q, k) = s * dpk + c * dqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    EigenDecomposition e;
    e.values.resize(n);
    for (int i = 0; i < n; ++i) e.values[i] = d(i, i);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](int x, int y) { return e.values[x] < e.values[y]; });
    EigenDecomposition sorted;
    sorted.values.resize(n);
    sorted.vectors = Matd(n, n);
    for (int j = 0; j < n; ++j) {
        sorted.values[j] = e.values[perm[j]];
        for (int i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, perm[j]);
    }
    return sorted;
}

Matd cholesky(const Matd& a) {
    const int n = a.rows();
    Matd l(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) {
                    auto e = eigh(a);
                    throw SingularMetric("matrix not positive definite", e.values.front());
                }
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

Matd pseudo_inverse_symmetric(const Matd& a, double rel_tol) {
    const int n = a.rows();
    EigenDecomposition e = eigh(a);
    double lmax = 0.0;
    for (double v : e.values) lmax = std::max(lmax, std::abs(v));
    Matd r(n, n);
    if (lmax == 0.0) return r;
    const double thr = rel_tol * lmax;
    for (int k = 0; k < n; ++k) {
        if (std::abs(e.values[k]) <= thr) continue;
        const double inv = 1.0 / e.values[k];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(i, j) += inv * e.vectors(i, k) * e.vectors(j, k);
    }
    return r;
}

std::vector<jets::Jet> solve_jet_linear(int n, int b_cols, std::vector<jets::Jet> a,
                                        std::vector<jets::Jet> b) {
    auto A = [&](int i, int j) -> jets::Jet& { return a[static_cast<std::size_t>(i) * n + j]; };
    auto B = [&](int i, int j) -> jets::Jet& { return b[static_cast<std::size_t>(i) * b_cols + j]; };
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A(r, col).value()) > std::abs(A(pivot, col).value())) pivot = r;
        if (A(pivot, col).value() == 0.0)
            throw SingularPointError("jet linear solve: singular constant-term matrix");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(A(col, j), A(pivot, j));
            for (int j = 0; j < b_cols; ++j) std::swap(B(col, j), B(pivot, j));
        }
        const jets::Jet inv = 1.0 / A(col, col);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            jets::Jet f = A(r, col) * inv;
            for (int j = col; j < n; ++j) A(r, j) -= f * A(col, j);
            for (int j = 0; j < b_cols; ++j) B(r, j) -= f * B(col, j);
        }
    }
    std::vector<jets::Jet> x;
    x.reserve(static_cast<std::size_t>(n) * b_cols);
    for (int i = 0; i < n; ++i) {
        jets::Jet inv = 1.0 / A(i, i);
        for (int j = 0; j < b_cols; ++j) x.push_back(B(i, j) * inv);
    }
    return x;
}

} // namespace cel::linalg
