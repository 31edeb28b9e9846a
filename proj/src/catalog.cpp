#include "cel/catalog.hpp"

#include <map>
#include <mutex>

#include "cel/conformal.hpp"
#include "cel/sampling.hpp"
#include "catalog_documents.inc.hpp"

namespace cel::catalog {

std::string make_rescaled_document(const dsl::MetricSpec& base, const std::string& phi_text,
                                   const std::string& name, const std::string& notes) {
    dsl::ConformalFactorSpec phi{dsl::parse_expression(phi_text, base.coord_names)};
    dsl::MetricSpec r = lab::rescale_spec(base, phi);
    r.name = name;
    r.notes = notes;
    return dsl::to_document(r);
}

std::string make_perturbed_document(const dsl::MetricSpec& base, double eps, std::uint64_t seed,
                                    const std::string& name, const std::string& notes) {
    dsl::MetricSpec r = sampling::perturbed_spec(base, eps, seed);
    r.name = name;
    r.notes = notes;
    return dsl::to_document(r);
}

namespace {

struct Row {
    const char* name;
    Expected expected;
    const char* provenance;
    const char* phi;
    double pert_eps;
    std::uint64_t pert_seed;
};

constexpr double kSphere4Scalar = 12.0;  // S = n(n-1) on the unit sphere
constexpr double kSphere5Scalar = 20.0;

const Row kRows[] = {
    {"flat4", {true, true, 0.0, 0.0, 4}, "Euclidean metric on R^4", "", 0, 0},
    {"flat5", {true, true, 0.0, 0.0, 5}, "Euclidean metric on R^5", "", 0, 0},
    {"flat6", {true, true, 0.0, 0.0, 6}, "Euclidean metric on R^6", "", 0, 0},
    {"sphere4",
     {true, true, kSphere4Scalar, 3.0, 4},
     "unit round S^4, stereographic chart g = 4 delta / (1+|x|^2)^2",
     "", 0, 0},
    {"sphere5",
     {true, true, kSphere5Scalar, 4.0, 5},
     "unit round S^5, stereographic chart",
     "", 0, 0},
    {"hyperbolic5",
     {true, true, -20.0, -4.0, 5},
     "hyperbolic space H^5, upper half-space chart g = delta / x5^2",
     "", 0, 0},
    {"s2xs2",
     {true, false, 4.0, 1.0, 0},
     "product of two unit round 2-spheres; Einstein with lambda = 1, nonzero Weyl tensor",
     "", 0, 0},
    {"s2xh2",
     {false, true, 0.0, std::nullopt, 4},
     "product of a unit 2-sphere and a unit hyperbolic plane; scalar-flat, not Einstein, "
     "conformally flat (curvatures +1 and -1 cancel in the Weyl tensor)",
     "", 0, 0},
    {"schwarzschild4",
     {true, false, 0.0, 0.0, 0},
     "Riemannian Schwarzschild with m = 1/2: Ricci-flat, nonzero Weyl tensor",
     "", 0, 0},
    {"s2xs2_conf_a",
     {false, false, std::nullopt, std::nullopt, 0},
     "e^{-2 phi} rescaling of s2xs2; conformally Einstein by construction",
     "0.2*sin(t1) + 0.1*cos(p2)", 0, 0},
    {"s2xs2_conf_b",
     {false, false, std::nullopt, std::nullopt, 0},
     "e^{-2 phi} rescaling of s2xs2; conformally Einstein by construction",
     "0.15*cos(t2)*sin(p1)", 0, 0},
    {"s2xs2_pert_001",
     {false, false, std::nullopt, std::nullopt, 0},
     "s2xs2 plus a fixed random symmetric perturbation, amplitude 0.01",
     "", 0.01, 97531},
    {"s2xs2_pert_005",
     {false, false, std::nullopt, std::nullopt, 0},
     "s2xs2 plus a fixed random symmetric perturbation, amplitude 0.05",
     "", 0.05, 97531},
};

std::map<std::string, CatalogEntry> build() {
    std::map<std::string, CatalogEntry> entries;
    std::map<std::string, const char*> docs;
    for (const auto& d : embedded::kDocuments) docs[d.name] = d.text;
    for (const Row& row : kRows) {
        auto it = docs.find(row.name);
        if (it == docs.end())
            throw Error(std::string("catalog document missing from data/: ") + row.name);
        CatalogEntry e;
        e.name = row.name;
        e.document = it->second;
        e.spec = dsl::parse_metric_document(e.document);
        e.expected = row.expected;
        e.provenance = row.provenance;
        e.phi = row.phi;
        e.pert_eps = row.pert_eps;
        e.pert_seed = row.pert_seed;
        entries.emplace(e.name, std::move(e));
    }
    return entries;
}

const std::map<std::string, CatalogEntry>& entries() {
    static std::once_flag once;
    static std::map<std::string, CatalogEntry>* table = nullptr;
    std::call_once(once, [] { table = new std::map<std::string, CatalogEntry>(build()); });
    return *table;
}

} // namespace

const CatalogEntry& get(const std::string& name) {
    const auto& t = entries();
    auto it = t.find(name);
    if (it == t.end()) throw UnknownEntry("no catalog entry named '" + name + "'");
    return it->second;
}

std::vector<std::string> list() {
    std::vector<std::string> names;
    for (const auto& [name, entry] : entries()) names.push_back(name);
    return names;
}

} // namespace cel::catalog
