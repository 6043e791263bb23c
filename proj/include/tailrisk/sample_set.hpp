#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tailrisk/errors.hpp"

namespace tailrisk {

// Ordered collection of real-valued observations (latencies, rates, queue
// lengths). The units tag is carried through for provenance only.
struct SampleSet {
    std::vector<double> values;
    std::string units;

    SampleSet() = default;
    SampleSet(std::vector<double> v, std::string u = {})
        : values(std::move(v)), units(std::move(u)) {}
    SampleSet(std::initializer_list<double> v) : values(v) {}

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
};

inline void require_samples(const SampleSet& xs, const char* op) {
    if (xs.empty()) throw SampleError(std::string(op) + ": sample set must be non-empty");
    for (double v : xs.values) {
        if (!std::isfinite(v))
            throw SampleError(std::string(op) + ": sample set must contain finite values only");
    }
}

inline double sample_mean(const SampleSet& xs) {
    return std::accumulate(xs.values.begin(), xs.values.end(), 0.0) /
           static_cast<double>(xs.size());
}

inline std::vector<double> sorted_values(const SampleSet& xs) {
    std::vector<double> s = xs.values;
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace tailrisk
