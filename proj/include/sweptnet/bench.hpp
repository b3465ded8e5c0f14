#pragma once

#include <string>
#include <vector>

#include "sweptnet/collision.hpp"

namespace sweptnet {

struct BoxWorldScene {
    std::vector<OrientedBox> boxes;
    JointConfig start;
    std::vector<JointConfig> goals;
    PointCloud cloud;
    uint64_t seed = 0;

    std::vector<Motion> motions() const;  // start -> goal_i, in goal order
};

// Boxes with uniform random orientation, centers uniform in
// x,y in [-1,1] m, z in [0,1.5] m, side lengths independently uniform in
// [1,10] cm. Start and goals uniform within joint limits. Cloud sampled on
// box surfaces at 0.1 points/cm^2.
BoxWorldScene gen_box_world(Rng& rng, const RobotModel& r, int n_boxes = 50, int n_goals = 100);

// Convenience overload recording `seed` in the scene.
BoxWorldScene gen_box_world(uint64_t seed, const RobotModel& r, int n_boxes = 50, int n_goals = 100);

struct Stats {
    double mean = 0;
    double stddev = 0;  // population
    long n = 0;
};

Stats compute_stats(const std::vector<double>& values);

// Mean absolute prediction error over labeled samples, in millimeters.
Stats eval_mae(const Mlp& model, const std::vector<TrainingSample>& samples);

struct ClassificationReport {
    double accuracy = 0;
    double fp_rate = 0;  // predicted free, truly colliding
    double fn_rate = 0;  // predicted colliding, truly free
    long motions = 0;
    long fp = 0, fn = 0;
};

// Per motion, predicted class is (proxy distance > margin) and true class is
// (gcc_min_distance > margin); rates over all motions of all scenes.
ClassificationReport eval_classification(const Mlp& model, const RobotModel& r,
                                         const std::vector<BoxWorldScene>& scenes, double margin,
                                         int steps);

struct SearchAggregate {
    Stats gcc0_exact_checks, gccnn_exact_checks, gccnn_nn_checks;
    Stats gcc0_seconds, gccnn_seconds;
    long runs = 0;
};

struct SceneReport {
    int scene_index = 0;
    uint64_t scene_seed = 0;
    int n_motions = 0;
    int n_free = 0;  // exact count of collision-free motions
    SearchAggregate agg;
};

struct ExperimentReport {
    std::vector<SceneReport> scenes;
    SearchAggregate aggregate;
    double free_fraction = 0;
    int permutations = 0;
    double margin = 0;
    int steps = 0;
    bool proxy_cached = false;

    bool has_classification = false;
    ClassificationReport classification;
    bool has_mae = false;
    Stats mae_mm;
};

struct BoxWorldConfig {
    int permutations = 1000;
    double margin = 0.005;  // meters
    int steps = 200;
    uint64_t permutation_seed = 7;
    // Memoize per-scene proxy distances across permutations. Counters and
    // verdicts are unchanged; per-run timings then exclude repeated network
    // work, which the report records via proxy_cached.
    bool cache_proxy = true;
    bool with_classification = true;
};

// For every scene and seeded goal permutation, runs the plain scan and the
// proxy-guided search on identical inputs and aggregates counters and wall
// times. Throws if the two searches ever disagree on feasibility.
ExperimentReport run_box_world(const Mlp& model, const RobotModel& r,
                               const std::vector<BoxWorldScene>& scenes, const BoxWorldConfig& cfg);

void write_report_json(const std::string& path, const ExperimentReport& report);
// Deterministic subset (counters only, no timing): byte-identical across
// runs with the same seeds.
void write_report_csv(const std::string& path, const ExperimentReport& report);

}  // namespace sweptnet
