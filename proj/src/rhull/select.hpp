#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rhull/spacing.hpp"

namespace rhull {

struct SelectionConfig {
    double alpha = 0.01;
    std::size_t iterations = 20;      // I
    std::size_t max_components = 4;   // C
    double r_min = 0;                 // 0: half the smallest nearest-neighbour distance
    double r_max = 0;                 // 0: sample diameter
    double nu = 1.0;
    double h0 = 1.0;
    double bandwidth = 0;             // 0: default rule
    std::size_t angular_samples = 128;
    // r_max is doubled while the test keeps accepting, up to this multiple of
    // the diameter; beyond it the convex hull is returned.
    double escalation_limit = 1024;
    std::uint64_t seed = 0;           // recorded only; selection draws no random numbers

    void validate() const;
};

enum class Fallback { none, component_cap, convex_hull };
const char* fallback_name(Fallback f);

struct TraceStep {
    double r = 0;
    bool reject = false;
    std::size_t components = 0;
    std::optional<Witness> witness;
    double low = 0, high = 0;  // bracket after this step
};

struct Endpoints {
    double r_min = 0, r_max = 0;  // validated bracket (meaningful when directive == none)
    double r_components = 0;      // smallest r with at most C components (0 when n <= C)
    Fallback directive = Fallback::none;
    std::vector<TraceStep> checks;  // tests run while validating
};

struct SelectionResult {
    double r_hat = 0;  // infinity under the convex-hull fallback
    Fallback fallback = Fallback::none;
    Endpoints endpoints;
    std::vector<TraceStep> trace;
    double final_low = 0, final_high = 0;
    double c_crit = 0;
    double bandwidth = 0;
    double m = 0;
    std::size_t extreme_count = 0;
};

struct SupportEstimate {
    RegionPtr region;
    double radius = 0;  // nu * r_hat
    std::size_t components = 0;
    double area = 0;
    SelectionResult selection;
    SelectionConfig config;
    std::uint64_t sample_hash = 0;
};

// Radius at which C_r first drops to at most `max_components` components:
// the smallest circumradius where the kept triangles connect that far, or,
// when pinched corners still leave too many components there, the crossing
// point found by doubling and bisection on the true count. 0 when the sample
// has at most that many points; infinity for collinear samples or when no
// radius up to 1024 diameters suffices.
double component_threshold(const IndexPtr& index, std::size_t max_components);

Endpoints validate_endpoints(const RConvexityTester& tester, const SelectionConfig& config);
Endpoints validate_endpoints(IndexPtr index, const SelectionConfig& config);

SelectionResult select_r0(const RConvexityTester& tester, const SelectionConfig& config);
SelectionResult select_r0(IndexPtr index, const SelectionConfig& config);

SupportEstimate estimate_support(IndexPtr index, const SelectionConfig& config);

}  // namespace rhull
