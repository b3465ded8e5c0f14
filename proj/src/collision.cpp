#include "sweptnet/collision.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace sweptnet {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

double gcc_min_distance(const RobotModel& r, const Motion& m, const PointCloud& X, int steps) {
    if (X.points.empty()) throw std::invalid_argument("gcc_min_distance: empty point cloud");
    const SweptCapsules sweep = pose_swept_capsules(r, m, steps);
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& p : X.points) best = std::min(best, sweep.sdf(p));
    return best;
}

ClearanceResult gcc_clearance(const SweptCapsules& sweep, const PointCloud& X, double margin) {
    if (X.points.empty()) throw std::invalid_argument("gcc_clearance: empty point cloud");
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& p : X.points) {
        best = std::min(best, sweep.sdf(p));
        if (best <= margin) return {false, best};
    }
    return {true, best};
}

SearchResult gcc0_search_impl(int n_motions, const ExactChecker& checker, double margin) {
    SearchResult res;
    const double start = now_seconds();
    for (int j = 0; j < n_motions; ++j) {
        const ClearanceResult c = checker(j);
        ++res.exact_checks;
        if (c.free) {
            res.found = true;
            res.motion_index = j;
            res.certified_distance = c.certified;
            break;
        }
    }
    res.exact_seconds = now_seconds() - start;
    res.total_seconds = res.exact_seconds;
    (void)margin;
    return res;
}

SearchResult gcc_nn_search_impl(int n_motions, const ProxyEvaluator& proxy, const ExactChecker& checker,
                                double margin) {
    SearchResult res;
    const double start = now_seconds();
    std::vector<double> delta_hat(static_cast<size_t>(n_motions), 0.0);
    std::vector<bool> done(static_cast<size_t>(n_motions), false);

    // First loop: certify eagerly whenever the proxy clears the margin.
    for (int j = 0; j < n_motions; ++j) {
        const double t0 = now_seconds();
        delta_hat[static_cast<size_t>(j)] = proxy(j);
        ++res.nn_checks;
        res.proxy_seconds += now_seconds() - t0;
        if (delta_hat[static_cast<size_t>(j)] > margin) {
            const double t1 = now_seconds();
            const ClearanceResult c = checker(j);
            ++res.exact_checks;
            res.exact_seconds += now_seconds() - t1;
            done[static_cast<size_t>(j)] = true;
            if (c.free) {
                res.found = true;
                res.motion_index = j;
                res.certified_distance = c.certified;
                res.total_seconds = now_seconds() - start;
                return res;
            }
        }
    }

    // Second loop: most promising of the unchecked motions first.
    std::vector<int> rest;
    rest.reserve(static_cast<size_t>(n_motions));
    for (int j = 0; j < n_motions; ++j)
        if (!done[static_cast<size_t>(j)]) rest.push_back(j);
    std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
        return delta_hat[static_cast<size_t>(a)] > delta_hat[static_cast<size_t>(b)];
    });

    for (int j : rest) {
        const double t1 = now_seconds();
        const ClearanceResult c = checker(j);
        ++res.exact_checks;
        res.exact_seconds += now_seconds() - t1;
        if (c.free) {
            res.found = true;
            res.motion_index = j;
            res.certified_distance = c.certified;
            break;
        }
    }
    res.total_seconds = now_seconds() - start;
    return res;
}

SearchResult gcc0_search(const std::vector<Motion>& motions, const PointCloud& X, const RobotModel& r,
                         double margin, int steps) {
    return gcc0_search_impl(static_cast<int>(motions.size()),
                            [&](int j) {
                                const SweptCapsules sweep =
                                    pose_swept_capsules(r, motions[static_cast<size_t>(j)], steps);
                                return gcc_clearance(sweep, X, margin);
                            },
                            margin);
}

SearchResult gcc_nn_search(const std::vector<Motion>& motions, const PointCloud& X, const Mlp& model,
                           const RobotModel& r, double margin, int steps) {
    return gcc_nn_search_impl(
        static_cast<int>(motions.size()),
        [&](int j) { return predict_min_distance(model, X.points, motions[static_cast<size_t>(j)]).first; },
        [&](int j) {
            const SweptCapsules sweep = pose_swept_capsules(r, motions[static_cast<size_t>(j)], steps);
            return gcc_clearance(sweep, X, margin);
        },
        margin);
}

}  // namespace sweptnet
