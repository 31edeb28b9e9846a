#include "cel/report.hpp"

#include <json.hpp>

namespace cel::report {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json point_record(const invariants::InvariantReport& r) {
    ordered_json j;
    j["point"] = r.point;
    j["rank_E"] = r.rank_E;
    j["regular"] = r.regular;
    j["fd_fallback"] = r.fd_fallback;
    if (r.available.T) j["T"] = r.t_components;
    ordered_json norms;
    norms["W"] = r.norms.weyl;
    if (r.available.dT_star) norms["dT_star"] = r.norms.dT_star;
    if (r.available.C_T) norms["C_T"] = r.norms.C_T;
    if (r.available.E_T) norms["E_T"] = r.norms.E_T;
    if (r.available.B_T) norms["B_T"] = r.norms.B_T;
    if (r.available.B_hat_T) norms["B_hat_T"] = r.norms.B_hat_T;
    if (r.available.W_sym_E_T) norms["W_sym_E_T"] = r.norms.W_sym_E_T;
    if (r.available.delta3) norms["delta3"] = r.norms.delta3;
    j["norms"] = norms;
    ordered_json avail;
    avail["T"] = r.available.T;
    avail["dT_star"] = r.available.dT_star;
    avail["C_T"] = r.available.C_T;
    avail["E_T"] = r.available.E_T;
    avail["B_T"] = r.available.B_T;
    avail["B_hat_T"] = r.available.B_hat_T;
    avail["W_sym_E_T"] = r.available.W_sym_E_T;
    avail["delta3"] = r.available.delta3;
    j["availability"] = avail;
    j["verdict"] = invariants::to_string(r.verdict);
    if (!r.obstructions.empty()) j["obstructions"] = r.obstructions;
    if (!r.reason.empty()) j["reason"] = r.reason;
    return j;
}

} // namespace

std::string classification_records(const invariants::Classification& c, std::uint64_t seed) {
    std::string out;
    for (const auto& p : c.points) out += point_record(p).dump() + "\n";
    ordered_json agg;
    agg["spec"] = c.spec_name;
    agg["points"] = c.points.size();
    agg["order"] = c.order;
    agg["seed"] = seed;
    agg["tol"] = c.tol.vanish;
    agg["rank_tol"] = c.tol.rank_rel;
    agg["norm"] = "invariant Frobenius / sqrt(component count)";
    ordered_json counts;
    for (const auto& p : c.points) {
        const char* v = invariants::to_string(p.verdict);
        counts[v] = (counts.contains(v) ? counts[v].get<int>() : 0) + 1;
    }
    agg["verdict_counts"] = counts;
    agg["verdict"] = invariants::to_string(c.aggregate);
    out += agg.dump() + "\n";
    return out;
}

std::string law_records(const lab::TransformationLawReport& r, std::uint64_t seed) {
    std::string out;
    for (const auto& p : r.points) {
        ordered_json j;
        j["point"] = p.point;
        ordered_json laws;
        for (const auto& l : p.laws) {
            ordered_json lj;
            lj["residual"] = l.residual;
            lj["available"] = l.available;
            lj["applicable"] = l.applicable;
            if (!l.detail.empty()) lj["detail"] = l.detail;
            lj["pass"] = !l.available || !l.applicable || l.residual < r.tolerance;
            laws[l.law] = lj;
        }
        j["laws"] = laws;
        out += j.dump() + "\n";
    }
    ordered_json agg;
    agg["spec"] = r.spec_name;
    agg["phi"] = r.phi_text;
    agg["points"] = r.points.size();
    agg["seed"] = seed;
    agg["tol"] = r.tolerance;
    agg["max_residual"] = r.max_residual;
    agg["all_pass"] = r.all_pass;
    out += agg.dump() + "\n";
    return out;
}

} // namespace cel::report
