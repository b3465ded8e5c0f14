#pragma once

#include <functional>
#include <vector>

#include "sweptnet/nn.hpp"
#include "sweptnet/sweptvol.hpp"

namespace sweptnet {

struct PointCloud {
    std::vector<Vec3> points;
};

// Result of a clearance query against one motion. When `free`, certified is
// the exact minimum distance over (point, configuration); otherwise the scan
// stopped at the first value at or below the margin.
struct ClearanceResult {
    bool free = false;
    double certified = -std::numeric_limits<double>::infinity();
};

// Exact minimum over the cloud and the discretized configurations; equals
// min over x in X of swept_sdf(r, m, steps, x).
double gcc_min_distance(const RobotModel& r, const Motion& m, const PointCloud& X, int steps);

// Same scan with an early exit once a value <= margin is seen. `free`
// is equivalent to gcc_min_distance > margin.
ClearanceResult gcc_clearance(const SweptCapsules& sweep, const PointCloud& X, double margin);

struct SearchResult {
    bool found = false;
    int motion_index = -1;        // into the motion list passed to the search
    double certified_distance = 0;  // produced by the geometric checker
    long exact_checks = 0;
    long nn_checks = 0;
    double proxy_seconds = 0;  // time spent in proxy evaluations
    double exact_seconds = 0;  // time spent in geometric checks
    double total_seconds = 0;
};

// Checker/proxy callables index into the caller's motion list. A checker
// call is counted as one exact check regardless of internal early exits.
using ExactChecker = std::function<ClearanceResult(int)>;
using ProxyEvaluator = std::function<double(int)>;

// Scans motions in order and returns the first one the checker certifies.
SearchResult gcc0_search_impl(int n_motions, const ExactChecker& checker, double margin);

// Interleaved proxy/checker search: a first pass invokes the checker only on
// motions whose proxy distance clears the margin; if that fails, remaining
// motions are checked in descending proxy order (ties: original order).
// Every returned motion carries a checker-certified distance.
SearchResult gcc_nn_search_impl(int n_motions, const ProxyEvaluator& proxy, const ExactChecker& checker,
                                double margin);

SearchResult gcc0_search(const std::vector<Motion>& motions, const PointCloud& X, const RobotModel& r,
                         double margin, int steps);

SearchResult gcc_nn_search(const std::vector<Motion>& motions, const PointCloud& X, const Mlp& model,
                           const RobotModel& r, double margin, int steps);

}  // namespace sweptnet
