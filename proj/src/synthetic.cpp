#include "rbv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rbv/rng.hpp"

namespace rbv {

namespace {
// z such that Phi(z) = 0.75.
constexpr double kZ75 = 0.674489750196082;
}  // namespace

void SyntheticSpec::validate() const {
    if (features.empty()) throw std::invalid_argument("synthetic spec: no features");
    if (n_survived == 0 || n_nonsurvived == 0) {
        throw std::invalid_argument("synthetic spec: class sizes must be positive");
    }
    int prev = 0;
    for (const auto& f : features) {
        if (f.feature_no <= prev) {
            throw std::invalid_argument("synthetic spec: features must be ascending and unique");
        }
        prev = f.feature_no;
        for (const MarginalTriple* m : {&f.survived, &f.non_survived}) {
            if (!(m->q25 <= m->median && m->median <= m->q75)) {
                throw std::invalid_argument(
                    "synthetic spec: need q25 <= median <= q75 for feature " +
                    std::to_string(f.feature_no));
            }
        }
    }
    if (spearman_target) {
        const std::size_t k = features.size();
        if (spearman_target->size() != k * k) {
            throw std::invalid_argument("synthetic spec: Spearman target has wrong shape");
        }
    }
}

std::vector<FeatureMarginals> load_marginals(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("marginals: cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (!j.is_object()) throw std::runtime_error("marginals: top level must be an object");

    const auto& catalog = FeatureCatalog::instance();
    std::vector<FeatureMarginals> out;
    for (const auto& [name, value] : j.items()) {
        const auto no = catalog.find_no(name);
        if (!no) throw std::runtime_error("marginals: unknown feature '" + name + "'");
        FeatureMarginals fm;
        fm.feature_no = *no;
        for (const char* key : {"survived", "non_survived"}) {
            if (!value.contains(key) || !value[key].is_array() || value[key].size() != 3) {
                throw std::runtime_error("marginals: feature '" + name + "' needs " +
                                         std::string(key) + " = [median, q25, q75]");
            }
            MarginalTriple t{value[key][0].get<double>(), value[key][1].get<double>(),
                             value[key][2].get<double>()};
            if (std::string(key) == "survived") {
                fm.survived = t;
            } else {
                fm.non_survived = t;
            }
        }
        out.push_back(fm);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.feature_no < b.feature_no; });
    return out;
}

void save_marginals(const std::vector<FeatureMarginals>& marginals, const std::string& path) {
    nlohmann::json j = nlohmann::json::object();
    const auto& catalog = FeatureCatalog::instance();
    for (const auto& fm : marginals) {
        const auto& name = catalog.by_no(fm.feature_no).name;
        j[name] = {
            {"survived", {fm.survived.median, fm.survived.q25, fm.survived.q75}},
            {"non_survived",
             {fm.non_survived.median, fm.non_survived.q25, fm.non_survived.q75}},
        };
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("marginals: cannot write " + path);
    out << j.dump(2) << '\n';
}

double FittedLogNormal::sample(double z) const {
    if (constant) return constant_value;
    return std::exp(mu + sigma * z) - shift;
}

FittedLogNormal fit_lognormal(const MarginalTriple& m) {
    FittedLogNormal f;
    if (m.q75 == m.q25) {
        f.constant = true;
        f.constant_value = m.median;
        return f;
    }
    // Positive support is needed for the log; shift so the lower quartile
    // sits half an IQR above zero when it is not already positive.
    if (m.q25 <= 0.0) f.shift = 0.5 * (m.q75 - m.q25) - m.q25;
    const double med = m.median + f.shift;
    const double lo = m.q25 + f.shift;
    const double hi = m.q75 + f.shift;
    f.mu = std::log(med);
    // Least-squares sigma for the two quartile residuals on the log scale
    // with mu pinned to the median.
    f.sigma = (std::log(hi) - std::log(lo)) / (2.0 * kZ75);
    return f;
}

namespace {

// Lower Cholesky with diagonal shrinkage toward identity until the matrix is
// positive definite. k is small (<= 38), plain loops are fine.
std::vector<double> shrunk_cholesky(std::vector<double> r, std::size_t k) {
    for (double alpha = 0.0; alpha <= 1.0; alpha = alpha == 0.0 ? 1e-10 : alpha * 10.0) {
        std::vector<double> a(k * k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                const double target = i == j ? 1.0 : 0.0;
                a[i * k + j] = (1.0 - alpha) * r[i * k + j] + alpha * target;
            }
        }
        std::vector<double> l(k * k, 0.0);
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = a[i * k + j];
                for (std::size_t p = 0; p < j; ++p) sum -= l[i * k + p] * l[j * k + p];
                if (i == j) {
                    if (sum <= 1e-12) {
                        ok = false;
                        break;
                    }
                    l[i * k + j] = std::sqrt(sum);
                } else {
                    l[i * k + j] = sum / l[j * k + j];
                }
            }
        }
        if (ok) return l;
        if (alpha >= 1.0) break;
    }
    throw std::runtime_error("synthetic: Spearman target cannot be made positive definite");
}

}  // namespace

FeatureTable generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::vector<int> nos;
    nos.reserve(spec.features.size());
    for (const auto& f : spec.features) nos.push_back(f.feature_no);

    const std::size_t n_total = spec.n_survived + spec.n_nonsurvived;
    FeatureTable table(nos, n_total);
    for (std::size_t r = 0; r < n_total; ++r) {
        table.set_label(r, r < spec.n_survived ? kSurvived : kNonSurvived);
    }

    std::vector<FittedLogNormal> fit_surv, fit_non;
    for (const auto& f : spec.features) {
        fit_surv.push_back(fit_lognormal(f.survived));
        fit_non.push_back(fit_lognormal(f.non_survived));
    }

    const std::size_t k = spec.features.size();
    if (!spec.spearman_target) {
        // Independent columns, one substream per (feature, class): columns
        // reproduce individually no matter which subset is generated.
        for (std::size_t c = 0; c < k; ++c) {
            const int no = spec.features[c].feature_no;
            Rng rng_s(substream_seed(spec.seed, "synth", std::uint64_t(no), 0));
            for (std::size_t r = 0; r < spec.n_survived; ++r) {
                table.at(r, c) = fit_surv[c].sample(rng_s.normal());
            }
            Rng rng_n(substream_seed(spec.seed, "synth", std::uint64_t(no), 1));
            for (std::size_t r = spec.n_survived; r < n_total; ++r) {
                table.at(r, c) = fit_non[c].sample(rng_n.normal());
            }
        }
        return table;
    }

    // Gaussian copula: latent normal correlation from the Spearman target,
    // then each latent coordinate maps through its own log-normal marginal.
    std::vector<double> latent(k * k);
    for (std::size_t i = 0; i < k * k; ++i) {
        const double rho = std::clamp((*spec.spearman_target)[i], -1.0, 1.0);
        latent[i] = 2.0 * std::sin(M_PI * rho / 6.0);
    }
    for (std::size_t i = 0; i < k; ++i) latent[i * k + i] = 1.0;
    const std::vector<double> chol = shrunk_cholesky(latent, k);

    std::vector<double> g(k), z(k);
    for (ClassLabel cls : {kSurvived, kNonSurvived}) {
        Rng rng(substream_seed(spec.seed, "synth-copula", cls, 0));
        const std::size_t begin = cls == kSurvived ? 0 : spec.n_survived;
        const std::size_t end = cls == kSurvived ? spec.n_survived : n_total;
        const auto& fits = cls == kSurvived ? fit_surv : fit_non;
        for (std::size_t r = begin; r < end; ++r) {
            for (std::size_t i = 0; i < k; ++i) g[i] = rng.normal();
            for (std::size_t i = 0; i < k; ++i) {
                double sum = 0.0;
                for (std::size_t j = 0; j <= i; ++j) sum += chol[i * k + j] * g[j];
                z[i] = sum;
            }
            for (std::size_t c = 0; c < k; ++c) table.at(r, c) = fits[c].sample(z[c]);
        }
    }
    return table;
}

}  // namespace rbv
