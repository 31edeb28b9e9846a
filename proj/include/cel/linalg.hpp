#pragma once

#include <vector>

#include "cel/jets.hpp"

namespace cel::linalg {

// Row-major dense matrix of doubles, sized for pointwise spectral work
// (two-form spaces stay at n(n-1)/2 <= 15 here).
class Matd {
public:
    Matd() : rows_(0), cols_(0) {}
    Matd(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}
    static Matd identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    Matd transposed() const;
    friend Matd operator*(const Matd& a, const Matd& b);
    friend Matd operator-(const Matd& a, const Matd& b);
    friend Matd operator+(const Matd& a, const Matd& b);
    Matd& operator*=(double s);

    std::vector<double> apply(const std::vector<double>& x) const;
    double max_abs() const;
    double frobenius() const;

private:
    int rows_, cols_;
    std::vector<double> a_;
};

struct EigenDecomposition {
    std::vector<double> values; // ascending
    Matd vectors;               // columns are the corresponding eigenvectors
};

// Cyclic Jacobi iteration for a real symmetric matrix. Converges to machine
// precision for the small dense matrices used here.
EigenDecomposition eigh(const Matd& a);

// Cholesky factor L with a = L L^T; throws SingularMetric when `a` is not
// positive definite (reports the smallest eigenvalue).
Matd cholesky(const Matd& a);

// Moore-Penrose pseudoinverse of a symmetric matrix via eigendecomposition:
// eigenvalues with |lambda| > rel_tol * max|lambda| are inverted, the rest
// are dropped. The zero matrix maps to the zero matrix.
Matd pseudo_inverse_symmetric(const Matd& a, double rel_tol);

// Solve a jet-valued linear system a * x = b by Gaussian elimination with
// partial pivoting on constant terms. Every a(i,j), b(i) must share dim and
// order; throws SingularPointError when a pivot's constant term vanishes.
// `a` and `b` are row-major with `n` columns (`b` may have several columns).
std::vector<jets::Jet> solve_jet_linear(int n, int b_cols, std::vector<jets::Jet> a,
                                        std::vector<jets::Jet> b);

} // namespace cel::linalg
