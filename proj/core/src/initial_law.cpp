#include "ranklab/initial_law.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "ranklab/errors.hpp"
#include "ranklab/rng.hpp"

namespace ranklab {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

InitialLaw InitialLaw::point_mass(double at) {
    InitialLaw l;
    l.law_ = PointMass{at};
    return l;
}

InitialLaw InitialLaw::uniform(double a, double b) {
    if (!(a < b)) throw invalid_parameter("uniform law: need a < b");
    InitialLaw l;
    l.law_ = Uniform{a, b};
    return l;
}

InitialLaw InitialLaw::gaussian(double mean, double variance) {
    if (!(variance > 0.0)) throw invalid_parameter("gaussian law: variance must be > 0");
    InitialLaw l;
    l.law_ = Gaussian{mean, variance};
    return l;
}

InitialLaw InitialLaw::samples(std::vector<double> values) {
    if (values.empty()) throw invalid_parameter("sample law: no values");
    for (double v : values)
        if (!std::isfinite(v)) throw invalid_parameter("sample law: non-finite value");
    std::sort(values.begin(), values.end());
    InitialLaw l;
    l.law_ = Samples{std::move(values)};
    return l;
}

InitialLaw InitialLaw::samples_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_parameter("sample law: cannot open " + path);
    std::vector<double> values;
    double v;
    while (in >> v) values.push_back(v);
    return samples(std::move(values));
}

double InitialLaw::cdf(double x) const {
    return std::visit(
        [x](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return x >= l.at ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                if (x <= l.a) return 0.0;
                if (x >= l.b) return 1.0;
                return (x - l.a) / (l.b - l.a);
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                return normal_cdf((x - l.mean) / std::sqrt(l.variance));
            } else {
                const auto it = std::upper_bound(l.values.begin(), l.values.end(), x);
                return static_cast<double>(it - l.values.begin()) /
                       static_cast<double>(l.values.size());
            }
        },
        law_);
}

double InitialLaw::mean() const {
    return std::visit(
        [](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return l.at;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return 0.5 * (l.a + l.b);
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                return l.mean;
            } else {
                return std::accumulate(l.values.begin(), l.values.end(), 0.0) /
                       static_cast<double>(l.values.size());
            }
        },
        law_);
}

double InitialLaw::mass_outside(double lo, double hi) const {
    return cdf(lo) + (1.0 - cdf(hi));
}

double InitialLaw::sample(std::uint64_t seed, std::uint64_t stream) const {
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return l.at;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                const double u = uniform_draw(seed, stream, 0, RngPurpose::InitialSample);
                return l.a + u * (l.b - l.a);
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                return l.mean + std::sqrt(l.variance) *
                                    gaussian_draw(seed, stream, 0, RngPurpose::InitialSample);
            } else {
                // particles take the recorded values in order, cycling if short
                return l.values[static_cast<std::size_t>(stream) % l.values.size()];
            }
        },
        law_);
}

}  // namespace ranklab
