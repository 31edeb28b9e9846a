#pragma once

#include <cstdint>
#include <optional>

#include "cel/metric.hpp"

namespace cel::catalog {

// Analytically known properties of a fixture. Nothing here is trusted: the
// test suites re-derive every stated value through the pipeline.
struct Expected {
    std::optional<bool> einstein;
    std::optional<bool> conformally_flat;
    std::optional<double> scalar;            // S, where constant
    std::optional<double> einstein_constant; // lambda with Ric = lambda g
    std::optional<int> rank_E;
};

struct CatalogEntry {
    std::string name;
    std::string document; // exact text of the shipped metric document
    dsl::MetricSpec spec;
    Expected expected;
    std::string provenance;
    std::string phi;          // conformal factor of rescaled entries, else empty
    double pert_eps = 0.0;    // perturbation entries record their parameters
    std::uint64_t pert_seed = 0;
};

const CatalogEntry& get(const std::string& name); // throws UnknownEntry
std::vector<std::string> list();

// Generators behind the derived documents in data/. The committed files are
// their exact output; a catalog test regenerates and compares byte for byte.
std::string make_rescaled_document(const dsl::MetricSpec& base, const std::string& phi_text,
                                   const std::string& name, const std::string& notes);
std::string make_perturbed_document(const dsl::MetricSpec& base, double eps, std::uint64_t seed,
                                    const std::string& name, const std::string& notes);

} // namespace cel::catalog
