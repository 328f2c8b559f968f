#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbv/table.hpp"

namespace rbv {

struct MarginalTriple {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

struct FeatureMarginals {
    int feature_no = 0;
    MarginalTriple survived;
    MarginalTriple non_survived;
};

// Parameters for the synthetic surrogate-dataset generator: per-feature,
// per-class quartile triples plus class sizes and a seed. Columns are drawn
// independently unless a Spearman target matrix is supplied, in which case a
// Gaussian copula couples them (marginals unchanged).
struct SyntheticSpec {
    std::vector<FeatureMarginals> features;  // ascending feature_no
    std::size_t n_survived = 2364;
    std::size_t n_nonsurvived = 233;
    std::uint64_t seed = 42;
    // Row-major k x k Spearman target over `features`, optional.
    std::optional<std::vector<double>> spearman_target;

    void validate() const;
};

// Reads the marginals file: a JSON object keyed by feature name, each value
// {"survived": [median, q25, q75], "non_survived": [median, q25, q75]}.
std::vector<FeatureMarginals> load_marginals(const std::string& path);
void save_marginals(const std::vector<FeatureMarginals>& marginals, const std::string& path);

// Parameters of the shifted log-normal fitted to a quartile triple: the
// distribution of exp(mu + sigma * Z) - shift has median equal to the spec
// median, and its quartiles match q25/q75 in least squares on the log scale.
// A triple with q25 == q75 degenerates to a constant column.
struct FittedLogNormal {
    double mu = 0.0;
    double sigma = 0.0;
    double shift = 0.0;
    bool constant = false;
    double constant_value = 0.0;

    double sample(double z) const;
};

FittedLogNormal fit_lognormal(const MarginalTriple& m);

// Draws the synthetic table: rows 0..n_survived-1 are class 0, the rest class
// 1. Bit-reproducible for a fixed spec (per feature/class substreams).
FeatureTable generate_synthetic(const SyntheticSpec& spec);

}  // namespace rbv
