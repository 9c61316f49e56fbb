#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace cwauc::normal {

inline double pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Upper tail 1 - cdf(z), accurate far into the tail.
inline double sf(double z) {
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

inline double quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace cwauc::normal
