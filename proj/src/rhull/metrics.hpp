#pragma once

#include <cstdint>

#include "rhull/region.hpp"

namespace rhull {

// A computed distance together with a bound on its discretisation error:
// the exact value lies in [value, value + error_bound].
struct DistanceEstimate {
    double value = 0;
    double error_bound = 0;
};

// Default resolution: diagonal of the joint bounding box / 2048.
double default_metric_step(const Region& a, const Region& c);

// sup over x in A of d(x, C). Regions with positive area are searched by
// branch and bound on a quadtree (d(., C) is 1-Lipschitz), refined until the
// cell half-diagonal drops below step / 2; measure-zero sets are sampled.
DistanceEstimate directed_hausdorff(const Region& a, const Region& c, double step = 0);

DistanceEstimate hausdorff(const Region& a, const Region& c, double step = 0);

// Hausdorff distance between the boundaries, from boundary samples spaced at
// most `step` apart.
DistanceEstimate boundary_hausdorff(const Region& a, const Region& c, double step = 0);

struct MeasureEstimate {
    double value = 0;
    double standard_error = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

// Monte Carlo estimate of the area of the symmetric difference over the joint
// bounding box. The stream is split into fixed chunks with derived seeds, so
// the estimate depends only on (samples, seed).
MeasureEstimate distance_in_measure(const Region& a, const Region& c, std::size_t samples = 200000,
                                    std::uint64_t seed = 0);

}  // namespace rhull
