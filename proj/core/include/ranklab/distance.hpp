#pragma once

#include <functional>
#include <span>

namespace ranklab {

/// W1 distance between two empirical laws given as sorted samples: the
/// exact integral of |F_A - F_B| over the merged breakpoints.
double wasserstein1(std::span<const double> sorted_a, std::span<const double> sorted_b);

/// W1 distance between a sorted sample and a continuous CDF. Piecewise
/// integration between sample points: the crossing of the step level is
/// bracketed by bisection and each smooth piece is integrated adaptively.
/// Tails are extended until the reference CDF mass is negligible.
double wasserstein1(std::span<const double> sorted_a,
                    const std::function<double(double)>& cdf, double abs_tol = 1e-9);

}  // namespace ranklab
