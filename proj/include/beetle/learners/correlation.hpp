#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "beetle/core/error.hpp"

namespace beetle::learners {

/// Pearson correlation of two paired samples, clamped to [-1, 1].
inline double performance_correlation(std::span<const double> s, std::span<const double> t) {
    if (s.size() != t.size()) throw Error(ErrorKind::schema, "correlation inputs differ in length");
    if (s.size() < 2) throw Error(ErrorKind::undefined_metric, "correlation needs at least 2 pairs");
    const double n = static_cast<double>(s.size());
    double ms = 0.0, mt = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        ms += s[i];
        mt += t[i];
    }
    ms /= n;
    mt /= n;
    double sst = 0.0, sss = 0.0, stt = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double ds = s[i] - ms, dt = t[i] - mt;
        sst += ds * dt;
        sss += ds * ds;
        stt += dt * dt;
    }
    if (sss == 0.0 || stt == 0.0) {
        throw Error(ErrorKind::undefined_metric, "correlation undefined for a zero-variance sample");
    }
    return std::clamp(sst / std::sqrt(sss * stt), -1.0, 1.0);
}

}  // namespace beetle::learners
