#include "cel/curvature.hpp"

#include <cmath>
#include <string>

namespace cel::curv {

namespace {

void check_close(double residual, double scale, const char* what) {
    if (!(residual <= 1e-7 * (1.0 + scale)))
        throw InternalCheck(std::string(what) + " check failed: residual " +
                            std::to_string(residual) + " at scale " + std::to_string(scale));
}

} // namespace

Tensor christoffel(const dsl::MetricJets& m) {
    const int n = m.dim;
    if (m.order < 1) throw OrderExhausted("christoffel needs metric jets of order >= 1");
    Tensor dg(n, 3, m.order - 1); // dg[l][i][j] = d_l g_{ij}
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dg.at(l, i, j) = m.gg(i, j).derivative(l);
    Tensor gamma(n, 3, m.order - 1);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                jets::Jet s = jets::Jet::constant(0.0, n, m.order - 1);
                for (int l = 0; l < n; ++l)
                    s += m.inv(k, l) * (dg.at(i, j, l) + dg.at(j, i, l) - dg.at(l, i, j));
                s *= 0.5;
                gamma.at(k, i, j) = s;
                gamma.at(k, j, i) = s;
            }
    return gamma;
}

Tensor riemann(const dsl::MetricJets& m, const Tensor& gamma) {
    const int n = m.dim;
    if (gamma.order() < 1) throw OrderExhausted("riemann needs christoffel jets of order >= 1");
    const int ord = gamma.order() - 1;
    // R^m_{ijk} = d_i gamma^m_{jk} - d_j gamma^m_{ik}
    //           + gamma^p_{jk} gamma^m_{ip} - gamma^p_{ik} gamma^m_{jp}
    Tensor up(n, 4, ord); // up[mm][i][j][k]
    for (int mm = 0; mm < n; ++mm)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) // antisymmetric in (i,j)
                for (int k = 0; k < n; ++k) {
                    jets::Jet s = gamma.at(mm, j, k).derivative(i) - gamma.at(mm, i, k).derivative(j);
                    for (int p = 0; p < n; ++p)
                        s += gamma.at(p, j, k) * gamma.at(mm, i, p) -
                             gamma.at(p, i, k) * gamma.at(mm, j, p);
                    up.at(mm, i, j, k) = s;
                    up.at(mm, j, i, k) = -s;
                }
    Tensor r(n, 4, ord);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    jets::Jet s = jets::Jet::constant(0.0, n, ord);
                    for (int mm = 0; mm < n; ++mm) s += m.gg(l, mm) * up.at(mm, i, j, k);
                    r.at(i, j, k, l) = s;
                    r.at(j, i, k, l) = -s;
                }

    // postconditions: pair symmetry and the first Bianchi identity
    double scale = max_abs_value(r);
    double resid_pair = 0.0, resid_bianchi = 0.0, resid_skew = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    resid_pair = std::max(resid_pair, std::abs(r.at(i, j, k, l).value() -
                                                               r.at(k, l, i, j).value()));
                    resid_skew = std::max(resid_skew, std::abs(r.at(i, j, k, l).value() +
                                                               r.at(i, j, l, k).value()));
                    resid_bianchi = std::max(resid_bianchi,
                                             std::abs(r.at(i, j, k, l).value() +
                                                      r.at(j, k, i, l).value() +
                                                      r.at(k, i, j, l).value()));
                }
    check_close(resid_pair, scale, "riemann pair symmetry");
    check_close(resid_skew, scale, "riemann last-pair antisymmetry");
    check_close(resid_bianchi, scale, "first Bianchi identity");
    return r;
}

Tensor ricci_from_riemann(const dsl::MetricJets& m, const Tensor& riem) {
    const int n = m.dim;
    Tensor ric(n, 2, riem.order());
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            jets::Jet s = jets::Jet::constant(0.0, n, riem.order());
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) s += m.inv(a, b) * riem.at(a, j, k, b);
            ric.at(j, k) = s;
            ric.at(k, j) = s;
        }
    return ric;
}

jets::Jet scalar_curvature(const dsl::MetricJets& m, const Tensor& ric) {
    const int n = m.dim;
    jets::Jet s = jets::Jet::constant(0.0, n, ric.order());
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) s += m.inv(j, k) * ric.at(j, k);
    return s;
}

Tensor kulkarni_nomizu(const Tensor& a, const Tensor& b) {
    const int n = a.dim();
    if (b.dim() != n || a.rank() != 2 || b.rank() != 2)
        throw Error("kulkarni_nomizu expects two (0,2) tensors over the same space");
    Tensor r(n, 4, std::min(a.order(), b.order()));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z)
                for (int t = 0; t < n; ++t)
                    r.at(x, y, z, t) = a.at(x, t) * b.at(y, z) + a.at(y, z) * b.at(x, t) -
                                       a.at(x, z) * b.at(y, t) - a.at(y, t) * b.at(x, z);
    return r;
}

Tensor schouten(const dsl::MetricJets& m, const Tensor& ric, const jets::Jet& scal) {
    const int n = m.dim;
    if (n < 3) throw DomainError("schouten tensor needs dimension >= 3");
    Tensor k(n, 2, ric.order());
    const jets::Jet f = scal * (1.0 / (2.0 * (n - 1)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            k.at(i, j) = (ric.at(i, j) - f * m.gg(i, j)) * (1.0 / (n - 2));
    return k;
}

Tensor weyl(const dsl::MetricJets& m, const Tensor& riem, const Tensor& schout) {
    const int n = m.dim;
    Tensor g2(n, 2, m.order);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g2.at(i, j) = m.gg(i, j);
    Tensor w = riem - kulkarni_nomizu(g2, schout);

    // postcondition: trace-free in every metric pair; by the symmetries it is
    // enough to check the (1,4) and (2,3) contractions
    double scale = max_abs_value(w);
    double resid = 0.0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double t14 = 0.0, t23 = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    t14 += m.inv(a, b).value() * w.at(a, j, k, b).value();
                    t23 += m.inv(a, b).value() * w.at(j, a, b, k).value();
                }
            resid = std::max(resid, std::max(std::abs(t14), std::abs(t23)));
        }
    check_close(resid, scale, "weyl trace");
    return w;
}

CurvaturePack build_curvature_pack(const dsl::MetricJets& m) {
    if (m.order < 2) throw OrderExhausted("curvature stack needs metric jets of order >= 2");
    CurvaturePack p;
    p.metric = m;
    p.gamma = christoffel(m);
    p.riemann = riemann(m, p.gamma);
    p.ricci = ricci_from_riemann(m, p.riemann);
    p.scalar = scalar_curvature(m, p.ricci);
    p.schouten = schouten(m, p.ricci, p.scalar);
    p.weyl = weyl(m, p.riemann, p.schouten);
    return p;
}

Tensor covariant_derivative(const Tensor& t, const Tensor& gamma) {
    const int n = t.dim();
    if (t.order() < 1) throw OrderExhausted("covariant derivative: tensor order exhausted");
    const int s = t.rank();
    Tensor r(n, s + 1, t.order() - 1);
    std::vector<int> idx(s);
    std::vector<int> mod(s);
    for (int flat = 0; flat < t.size(); ++flat) {
        t.indices(flat, idx.data());
        for (int k = 0; k < n; ++k) {
            jets::Jet v = t[flat].derivative(k);
            for (int slot = 0; slot < s; ++slot) {
                mod = idx;
                const int im = idx[slot];
                for (int l = 0; l < n; ++l) {
                    mod[slot] = l;
                    int mflat = 0;
                    for (int q = 0; q < s; ++q) mflat = mflat * n + mod[q];
                    v -= gamma.at(l, k, im) * t[mflat];
                }
            }
            r[k * t.size() + flat] = v;
        }
    }
    return r;
}

Tensor divergence(const Tensor& t, int slot, const dsl::MetricJets& m, const Tensor& gamma) {
    const int n = t.dim();
    const int s1 = t.rank(); // s+1 slots on input
    if (slot < 1 || slot > s1) throw IndexOutOfRange("divergence slot out of range");
    Tensor nt = covariant_derivative(t, gamma); // rank s1+1, derivative slot first
    Tensor r(n, s1 - 1, nt.order());
    std::vector<int> out(s1 - 1);
    std::vector<int> in(s1 + 1);
    for (int flat = 0; flat < r.size(); ++flat) {
        r.indices(flat, out.data());
        jets::Jet v = jets::Jet::constant(0.0, n, nt.order());
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                // (nabla t)_{a; out_1..out_{slot-1}, b, out_slot..}
                in[0] = a;
                for (int q = 0; q < slot - 1; ++q) in[1 + q] = out[q];
                in[slot] = b;
                for (int q = slot - 1; q < s1 - 1; ++q) in[1 + q + 1] = out[q];
                int nflat = 0;
                for (int q = 0; q < s1 + 1; ++q) nflat = nflat * n + in[q];
                v += m.inv(a, b) * nt[nflat];
            }
        r[flat] = v;
    }
    return r;
}

Tensor dnabla_sym2(const Tensor& b, const Tensor& gamma) {
    const int n = b.dim();
    if (b.rank() != 2) throw Error("dnabla_sym2 expects a (0,2) tensor");
    Tensor nb = covariant_derivative(b, gamma);
    Tensor r(n, 3, nb.order());
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) r.at(x, y, z) = nb.at(x, y, z) - nb.at(y, x, z);
    return r;
}

} // namespace cel::curv
