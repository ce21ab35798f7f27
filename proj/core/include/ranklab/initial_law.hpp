#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ranklab {

/// One-dimensional initial laws with exact CDFs, means and samplers.
class InitialLaw {
  public:
    struct PointMass {
        double at;
    };
    struct Uniform {
        double a;
        double b;
    };
    struct Gaussian {
        double mean;
        double variance;
    };
    struct Samples {
        std::vector<double> values;  // kept sorted
    };

    static InitialLaw point_mass(double at);
    static InitialLaw uniform(double a, double b);
    static InitialLaw gaussian(double mean, double variance);
    static InitialLaw samples(std::vector<double> values);
    /// One decimal value per line; blank lines ignored.
    static InitialLaw samples_from_file(const std::string& path);

    double cdf(double x) const;
    double mean() const;
    /// Mass outside [lo, hi]; used to validate truncated domains.
    double mass_outside(double lo, double hi) const;
    /// Deterministic draw for the given stream (particle index).
    double sample(std::uint64_t seed, std::uint64_t stream) const;

    bool is_point_mass() const { return std::holds_alternative<PointMass>(law_); }
    const std::variant<PointMass, Uniform, Gaussian, Samples>& raw() const { return law_; }

  private:
    std::variant<PointMass, Uniform, Gaussian, Samples> law_;
};

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace ranklab
