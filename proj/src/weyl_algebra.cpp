#include "cel/weyl_algebra.hpp"

#include <cmath>
#include <string>

namespace cel::weyl {

TwoFormBasis::TwoFormBasis(int n) : dim(n) {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
}

int TwoFormBasis::index_of(int i, int j) const {
    // lexicographic position of (i,j), i < j
    return i * dim - i * (i + 1) / 2 + (j - i - 1);
}

linalg::Matd JetMatrix::values() const {
    linalg::Matd v(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) v(i, j) = at(i, j).value();
    return v;
}

JetMatrix JetMatrix::operator*(const JetMatrix& o) const {
    const jets::Jet& probe = a.front();
    JetMatrix r(rows, o.cols, probe.dim(), std::min(probe.order(), o.a.front().order()));
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            const jets::Jet& f = at(i, k);
            for (int j = 0; j < o.cols; ++j) r.at(i, j) += f * o.at(k, j);
        }
    return r;
}

curv::Tensor curv_apply(const curv::Tensor& a4, const curv::Tensor& b2, const dsl::MetricJets& m) {
    const int n = m.dim;
    if (a4.rank() != 4 || b2.rank() != 2) throw Error("curv_apply expects a (0,4) and a (0,2) tensor");
    const int ord = std::min(a4.order(), std::min(b2.order(), m.order));
    // raise both indices of b
    curv::Tensor bup(n, 2, ord);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            jets::Jet s = jets::Jet::constant(0.0, n, ord);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) s += m.inv(x, a) * m.inv(y, b) * b2.at(a, b);
            bup.at(x, y) = s;
        }
    curv::Tensor out(n, 2, ord);
    for (int z = 0; z < n; ++z)
        for (int t = 0; t < n; ++t) {
            jets::Jet s = jets::Jet::constant(0.0, n, ord);
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y) s += bup.at(x, y) * a4.at(y, z, t, x);
            out.at(z, t) = s;
        }
    return out;
}

JetMatrix weyl_endomorphism(const curv::Tensor& w, const dsl::MetricJets& m,
                            const TwoFormBasis& basis) {
    const int n = m.dim;
    const int N = basis.size();
    const int ord = std::min(w.order(), m.order);
    JetMatrix out(N, N, n, ord);
    curv::Tensor eta(n, 2, ord);
    const jets::Jet one = jets::Jet::constant(1.0, n, ord);
    const jets::Jet zero = jets::Jet::constant(0.0, n, ord);
    for (int p = 0; p < N; ++p) {
        auto [i, j] = basis.pairs[p];
        eta.at(i, j) = one;
        eta.at(j, i) = -one;
        curv::Tensor img = curv_apply(w, eta, m);
        for (int q = 0; q < N; ++q) {
            auto [k, l] = basis.pairs[q];
            out.at(q, p) = img.at(k, l);
        }
        eta.at(i, j) = zero;
        eta.at(j, i) = zero;
    }
    return out;
}

JetMatrix twoform_gram(const dsl::MetricJets& m, const TwoFormBasis& basis) {
    const int N = basis.size();
    JetMatrix h(N, N, m.dim, m.order);
    for (int p = 0; p < N; ++p) {
        auto [i, j] = basis.pairs[p];
        for (int q = 0; q < N; ++q) {
            auto [k, l] = basis.pairs[q];
            h.at(p, q) = m.inv(i, k) * m.inv(j, l) - m.inv(i, l) * m.inv(j, k);
        }
    }
    return h;
}

JetMatrix ricci_contraction_sq(const JetMatrix& w_sq, const TwoFormBasis& basis,
                               const dsl::MetricJets& m) {
    const int n = m.dim;
    const int ord = w_sq.a.front().order();
    // operator entries: p_op[x][t] = sum_i [w_sq(dx^i ^ dx^t)]_{ix}
    JetMatrix p_op(n, n, n, ord);
    for (int t = 0; t < n; ++t) {
        for (int i = 0; i < n; ++i) {
            if (i == t) continue;
            const double sign_it = i < t ? 1.0 : -1.0;
            const int col = i < t ? basis.index_of(i, t) : basis.index_of(t, i);
            // image = sign_it * w_sq(:, col), expanded back into components
            for (int x = 0; x < n; ++x) {
                if (x == i) continue;
                const double sign_ix = i < x ? 1.0 : -1.0;
                const int row = i < x ? basis.index_of(i, x) : basis.index_of(x, i);
                p_op.at(x, t) += w_sq.at(row, col) * (sign_it * sign_ix);
            }
        }
    }
    // raise the first index: q^{at} = g^{ax} p_op[x][t]
    JetMatrix q(n, n, n, ord);
    for (int a = 0; a < n; ++a)
        for (int t = 0; t < n; ++t) {
            jets::Jet s = jets::Jet::constant(0.0, n, ord);
            for (int x = 0; x < n; ++x) s += m.inv(a, x) * p_op.at(x, t);
            q.at(a, t) = s;
        }
    // the form is symmetric up to rounding; enforce exactly
    double scale = 0.0, asym = 0.0;
    for (int a = 0; a < n; ++a)
        for (int t = 0; t < n; ++t) {
            scale = std::max(scale, std::abs(q.at(a, t).value()));
            asym = std::max(asym, std::abs(q.at(a, t).value() - q.at(t, a).value()));
        }
    if (!(asym <= 1e-7 * (1.0 + scale)))
        throw curv::InternalCheck("ricci contraction of the squared endomorphism is not symmetric");
    for (int a = 0; a < n; ++a)
        for (int t = a + 1; t < n; ++t) {
            jets::Jet s = (q.at(a, t) + q.at(t, a)) * 0.5;
            q.at(a, t) = s;
            q.at(t, a) = s;
        }
    return q;
}

KernelInfo kernel_rank_E(const linalg::Matd& q, const linalg::Matd& g, double weyl_scale,
                         double rel_tol, double margin_factor, const curv::Tensor* weyl_check,
                         const dsl::MetricJets* m) {
    const int n = q.rows();
    KernelInfo info;
    const linalg::Matd l = linalg::cholesky(g);
    // whitened operator: symmetric, same spectrum as the operator g*q on covectors
    linalg::Matd b = l.transposed() * q * l;
    linalg::EigenDecomposition e = linalg::eigh(b);
    info.spectrum = e.values;
    double lmax = 0.0;
    for (double v : e.values) lmax = std::max(lmax, std::abs(v));

    const double zero_floor = std::pow(rel_tol * (1.0 + weyl_scale), 2);
    if (lmax <= zero_floor) {
        info.rank_E = n;
        info.regular = true;
        info.pinv_op = linalg::Matd(n, n);
        // kernel is everything; an orthonormal basis comes from any whitened frame
        for (int k = 0; k < n; ++k) {
            std::vector<double> zeta(n, 0.0);
            zeta[k] = 1.0;
            info.e_basis.push_back(zeta);
        }
        // map zeta -> v = l^{-T} zeta by back substitution
        for (auto& v : info.e_basis) {
            for (int i = n - 1; i >= 0; --i) {
                double s = v[i];
                for (int k = i + 1; k < n; ++k) s -= l(k, i) * v[k];
                v[i] = s / l(i, i);
            }
        }
        return info;
    }

    const double thr = rel_tol * lmax;
    double min_retained = lmax;
    linalg::Matd pinv_white(n, n);
    for (int k = 0; k < n; ++k) {
        const double lam = e.values[k];
        if (std::abs(lam) <= thr) {
            // kernel direction
            std::vector<double> zeta(n);
            for (int i = 0; i < n; ++i) zeta[i] = e.vectors(i, k);
            // v = l^{-T} zeta
            for (int i = n - 1; i >= 0; --i) {
                double s = zeta[i];
                for (int r = i + 1; r < n; ++r) s -= l(r, i) * zeta[r];
                zeta[i] = s / l(i, i);
            }
            info.e_basis.push_back(zeta);
        } else {
            min_retained = std::min(min_retained, std::abs(lam));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    pinv_white(i, j) += e.vectors(i, k) * e.vectors(j, k) / lam;
        }
    }
    info.rank_E = static_cast<int>(info.e_basis.size());
    info.regular = min_retained / lmax > margin_factor * rel_tol;

    // pinv of the operator on covector components: l * pinv_white * l^{-1}
    linalg::Matd linv(n, n);
    for (int c = 0; c < n; ++c) {
        std::vector<double> col(n, 0.0);
        col[c] = 1.0;
        for (int i = 0; i < n; ++i) {
            double s = col[i];
            for (int k = 0; k < i; ++k) s -= l(i, k) * linv(k, c);
            linv(i, c) = s / l(i, i);
        }
    }
    info.pinv_op = l * pinv_white * linv;

    if (weyl_check && m && info.rank_E > 0 && info.rank_E < n) {
        // kernel vectors must satisfy W(v,.,.,.) = 0 within the spectral noise
        const double tol = std::sqrt(rel_tol) * (1.0 + weyl_scale);
        for (const auto& v : info.e_basis) {
            std::vector<double> contr;
            contr.reserve(static_cast<std::size_t>(n) * n * n);
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    for (int t = 0; t < n; ++t) {
                        double s = 0.0;
                        for (int x = 0; x < n; ++x) s += v[x] * weyl_check->at(x, y, z, t).value();
                        contr.push_back(s);
                    }
            double norm = curv::invariant_rms(contr, n, 3, *m);
            if (!(norm <= tol))
                throw IsomorphismViolation(
                    "kernel vector of the Weyl contraction operator fails W(v,.,.,.)=0: " +
                    std::to_string(norm) + " vs tolerance " + std::to_string(tol));
        }
    }
    return info;
}

WeylAlgebraPack build_weyl_algebra(const curv::CurvaturePack& pack, double rank_rel_tol,
                                   double margin_factor) {
    const int n = pack.metric.dim;
    WeylAlgebraPack w;
    w.basis = TwoFormBasis(n);
    w.w_op = weyl_endomorphism(pack.weyl, pack.metric, w.basis);
    w.gram = twoform_gram(pack.metric, w.basis);
    w.weyl_scale = curv::invariant_rms(pack.weyl, pack.metric);

    // symmetry of the endomorphism w.r.t. the induced inner product
    {
        linalg::Matd h0 = w.gram.values();
        linalg::Matd m0 = w.w_op.values();
        linalg::Matd s = h0 * m0;
        linalg::Matd asym = s - s.transposed();
        if (!(asym.max_abs() <= 1e-8 * (1.0 + s.max_abs())))
            throw curv::InternalCheck("two-form endomorphism is not symmetric in the induced metric");
    }

    w.w_sq = w.w_op * w.w_op;
    w.w_ricci = ricci_contraction_sq(w.w_sq, w.basis, pack.metric);

    linalg::Matd g0(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g0(i, j) = pack.metric.gg(i, j).value();
    w.kernel = kernel_rank_E(w.w_ricci.values(), g0, w.weyl_scale, rank_rel_tol, margin_factor,
                             &pack.weyl, &pack.metric);

    // positive semidefiniteness of the contraction (spectrum is the operator's)
    if (!w.kernel.spectrum.empty()) {
        double lmax = std::max(std::abs(w.kernel.spectrum.front()),
                               std::abs(w.kernel.spectrum.back()));
        if (w.kernel.spectrum.front() < -1e-9 * (1.0 + lmax))
            throw curv::InternalCheck("Ricci contraction of the squared endomorphism not PSD");
    }

    // kernel dimension of the endomorphism itself, for the dimension bound
    {
        const int N = w.basis.size();
        linalg::Matd h0 = w.gram.values();
        linalg::Matd lh = linalg::cholesky(h0);
        // whiten the symmetric form S = H*M: operator spectrum = eig(lh^{-1} S lh^{-T})
        linalg::Matd s = h0 * w.w_op.values();
        // forward substitutions
        linalg::Matd x(N, N); // lh^{-1} * s
        for (int c = 0; c < N; ++c)
            for (int i = 0; i < N; ++i) {
                double v = s(i, c);
                for (int k = 0; k < i; ++k) v -= lh(i, k) * x(k, c);
                x(i, c) = v / lh(i, i);
            }
        linalg::Matd xt = x.transposed();
        linalg::Matd y(N, N); // lh^{-1} * x^T
        for (int c = 0; c < N; ++c)
            for (int i = 0; i < N; ++i) {
                double v = xt(i, c);
                for (int k = 0; k < i; ++k) v -= lh(i, k) * y(k, c);
                y(i, c) = v / lh(i, i);
            }
        auto ew = linalg::eigh(y); // y = lh^{-1} S lh^{-T}, symmetric, operator spectrum
        double lmax = 0.0;
        for (double v : ew.values) lmax = std::max(lmax, std::abs(v));
        if (lmax <= rank_rel_tol * (1.0 + w.weyl_scale)) {
            w.ker_w_dim = N;
        } else {
            w.ker_w_dim = 0;
            for (double v : ew.values)
                if (std::abs(v) <= rank_rel_tol * lmax) ++w.ker_w_dim;
        }
    }
    return w;
}

} // namespace cel::weyl
