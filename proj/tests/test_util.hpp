#pragma once

#include <random>

#include "sysarea/harmonics.hpp"
#include "sysarea/sphere.hpp"

namespace testing_util {

inline sysarea::SphericalPoint random_point(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return sysarea::SphericalPoint::project({n(rng), n(rng), n(rng)});
}

// Random coefficients in [-1, 1] up to degree L, optionally without the constant.
inline sysarea::SphericalFunction random_function(std::mt19937_64& rng, int L, bool mean_zero = false) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    sysarea::SphericalFunction f(L);
    for (int l = 0; l <= L; ++l) {
        for (int m = -l; m <= l; ++m) f.set(l, m, u(rng));
    }
    if (mean_zero) f.set(0, 0, 0.0);
    return f;
}

}  // namespace testing_util
