#pragma once

#include <cstdint>
#include <vector>

#include "cel/metric.hpp"

namespace cel::sampling {

// Counter-based deterministic generator: value k of stream `seed` is
// splitmix64(seed ^ golden*k). Identical output on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64();
    // uniform in [0, 1)
    double next_double();
    // uniform in [lo, hi)
    double uniform(double lo, double hi);
    // uniform integer in [0, n)
    int next_below(int n);

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

// `count` points uniform over the spec's region box, stream keyed by seed.
std::vector<std::vector<double>> sample_points(const dsl::MetricSpec& spec, int count,
                                               std::uint64_t seed);

// Smooth random scalar expression over the given coordinates: a short sum of
// products of sin/cos waves and bounded rational bumps. Coefficients land in
// [-amplitude, amplitude]; all partials up to order 4 stay moderate.
dsl::ExprPtr random_smooth_expression(const std::vector<std::string>& coord_names,
                                      std::uint64_t seed, double amplitude, int terms = 2);

// Symmetric perturbation spec: base + eps * h with h random smooth entries
// (seeded); used by the perturbed catalog entries and the identity suites.
dsl::MetricSpec perturbed_spec(const dsl::MetricSpec& base, double eps, std::uint64_t seed);

} // namespace cel::sampling
