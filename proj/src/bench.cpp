#include "sweptnet/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "sweptnet/errors.hpp"
#include "sweptnet/parallel.hpp"

namespace sweptnet {

using nlohmann::json;

std::vector<Motion> BoxWorldScene::motions() const {
    std::vector<Motion> out;
    out.reserve(goals.size());
    for (const JointConfig& g : goals) out.push_back({start, g, MotionType::LinearJoint});
    return out;
}

BoxWorldScene gen_box_world(Rng& rng, const RobotModel& r, int n_boxes, int n_goals) {
    BoxWorldScene scene;
    scene.boxes.reserve(static_cast<size_t>(n_boxes));
    for (int i = 0; i < n_boxes; ++i) {
        OrientedBox b;
        b.center = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(0.0, 1.5)};
        for (int a = 0; a < 3; ++a) b.half_extents[a] = 0.5 * rng.uniform(0.01, 0.10);
        b.rotation = rng.rotation();
        scene.boxes.push_back(b);
    }
    auto draw_config = [&] {
        JointConfig q(r.dof());
        for (int i = 0; i < r.dof(); ++i)
            q[i] = rng.uniform(r.joints[static_cast<size_t>(i)].lower, r.joints[static_cast<size_t>(i)].upper);
        return q;
    };
    scene.start = draw_config();
    scene.goals.reserve(static_cast<size_t>(n_goals));
    for (int g = 0; g < n_goals; ++g) scene.goals.push_back(draw_config());
    for (const OrientedBox& b : scene.boxes) {
        const auto pts = sample_box_surface(b, 0.1, rng);
        scene.cloud.points.insert(scene.cloud.points.end(), pts.begin(), pts.end());
    }
    return scene;
}

BoxWorldScene gen_box_world(uint64_t seed, const RobotModel& r, int n_boxes, int n_goals) {
    Rng rng(seed);
    BoxWorldScene scene = gen_box_world(rng, r, n_boxes, n_goals);
    scene.seed = seed;
    return scene;
}

Stats compute_stats(const std::vector<double>& values) {
    Stats s;
    s.n = static_cast<long>(values.size());
    if (s.n == 0) return s;
    double sum = 0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    double sq = 0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.n));
    return s;
}

Stats eval_mae(const Mlp& model, const std::vector<TrainingSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("eval_mae: empty sample set");
    const long chunk = 8192;
    const long n = static_cast<long>(samples.size());
    std::vector<double> errors_mm;
    errors_mm.reserve(static_cast<size_t>(n));
    Mlp::Mat x;
    for (long start = 0; start < n; start += chunk) {
        const long rows = std::min(chunk, n - start);
        x.resize(rows, model.input_dim);
        for (long i = 0; i < rows; ++i) {
            const TrainingSample& s = samples[static_cast<size_t>(start + i)];
            const long dof = s.q0.size();
            if (3 + 2 * dof != model.input_dim) throw std::invalid_argument("eval_mae: sample dof mismatch");
            x(i, 0) = s.x[0];
            x(i, 1) = s.x[1];
            x(i, 2) = s.x[2];
            for (long d = 0; d < dof; ++d) x(i, 3 + d) = s.q0[d];
            for (long d = 0; d < dof; ++d) x(i, 3 + dof + d) = s.q1[d];
        }
        const Eigen::VectorXf pred = forward_eval(model, x);
        for (long i = 0; i < rows; ++i)
            errors_mm.push_back(1000.0 * std::abs(static_cast<double>(pred[i]) -
                                                  static_cast<double>(samples[static_cast<size_t>(start + i)].delta)));
    }
    return compute_stats(errors_mm);
}

ClassificationReport eval_classification(const Mlp& model, const RobotModel& r,
                                         const std::vector<BoxWorldScene>& scenes, double margin,
                                         int steps) {
    ClassificationReport rep;
    long correct = 0;
    for (const BoxWorldScene& scene : scenes) {
        for (const Motion& m : scene.motions()) {
            const double proxy = predict_min_distance(model, scene.cloud.points, m).first;
            const SweptCapsules sweep = pose_swept_capsules(r, m, steps);
            const bool truly_free = gcc_clearance(sweep, scene.cloud, margin).free;
            const bool predicted_free = proxy > margin;
            ++rep.motions;
            if (predicted_free == truly_free)
                ++correct;
            else if (predicted_free)
                ++rep.fp;
            else
                ++rep.fn;
        }
    }
    if (rep.motions > 0) {
        rep.accuracy = static_cast<double>(correct) / static_cast<double>(rep.motions);
        rep.fp_rate = static_cast<double>(rep.fp) / static_cast<double>(rep.motions);
        rep.fn_rate = static_cast<double>(rep.fn) / static_cast<double>(rep.motions);
    }
    return rep;
}

namespace {

struct RunSamples {
    std::vector<double> gcc0_checks, nn_exact_checks, nn_nn_checks, gcc0_secs, nn_secs;
};

SearchAggregate aggregate_runs(const RunSamples& runs) {
    SearchAggregate agg;
    agg.gcc0_exact_checks = compute_stats(runs.gcc0_checks);
    agg.gccnn_exact_checks = compute_stats(runs.nn_exact_checks);
    agg.gccnn_nn_checks = compute_stats(runs.nn_nn_checks);
    agg.gcc0_seconds = compute_stats(runs.gcc0_secs);
    agg.gccnn_seconds = compute_stats(runs.nn_secs);
    agg.runs = static_cast<long>(runs.gcc0_checks.size());
    return agg;
}

}  // namespace

ExperimentReport run_box_world(const Mlp& model, const RobotModel& r,
                               const std::vector<BoxWorldScene>& scenes, const BoxWorldConfig& cfg) {
    ExperimentReport report;
    report.permutations = cfg.permutations;
    report.margin = cfg.margin;
    report.steps = cfg.steps;
    report.proxy_cached = cfg.cache_proxy;
    report.scenes.resize(scenes.size());

    std::vector<RunSamples> per_scene(scenes.size());

    parallel_for(static_cast<long>(scenes.size()), [&](long s0, long s1) {
        for (long si = s0; si < s1; ++si) {
            const BoxWorldScene& scene = scenes[static_cast<size_t>(si)];
            const std::vector<Motion> motions = scene.motions();
            const int n = static_cast<int>(motions.size());

            // Swept capsules are permutation-independent; pose them once.
            std::vector<SweptCapsules> sweeps;
            sweeps.reserve(motions.size());
            for (const Motion& m : motions) sweeps.push_back(pose_swept_capsules(r, m, cfg.steps));

            SceneReport& sr = report.scenes[static_cast<size_t>(si)];
            sr.scene_index = static_cast<int>(si);
            sr.scene_seed = scene.seed;
            sr.n_motions = n;
            for (const SweptCapsules& sweep : sweeps)
                if (gcc_clearance(sweep, scene.cloud, cfg.margin).free) ++sr.n_free;

            std::vector<double> proxy_cache(static_cast<size_t>(n),
                                            std::numeric_limits<double>::quiet_NaN());

            RunSamples& runs = per_scene[static_cast<size_t>(si)];
            std::vector<int> perm(static_cast<size_t>(n));
            for (int p = 0; p < cfg.permutations; ++p) {
                for (int j = 0; j < n; ++j) perm[static_cast<size_t>(j)] = j;
                Rng prng(substream_seed(cfg.permutation_seed ^ scene.seed, static_cast<uint64_t>(p)));
                prng.shuffle(perm);

                auto checker = [&](int k) {
                    return gcc_clearance(sweeps[static_cast<size_t>(perm[static_cast<size_t>(k)])],
                                         scene.cloud, cfg.margin);
                };
                auto proxy = [&](int k) {
                    const int mi = perm[static_cast<size_t>(k)];
                    if (cfg.cache_proxy) {
                        double& slot = proxy_cache[static_cast<size_t>(mi)];
                        if (std::isnan(slot))
                            slot = predict_min_distance(model, scene.cloud.points,
                                                        motions[static_cast<size_t>(mi)])
                                       .first;
                        return slot;
                    }
                    return predict_min_distance(model, scene.cloud.points, motions[static_cast<size_t>(mi)])
                        .first;
                };

                const SearchResult base = gcc0_search_impl(n, checker, cfg.margin);
                const SearchResult guided = gcc_nn_search_impl(n, proxy, checker, cfg.margin);
                if (base.found != guided.found)
                    throw std::runtime_error("run_box_world: feasibility verdict mismatch on scene " +
                                             std::to_string(si) + " permutation " + std::to_string(p));

                runs.gcc0_checks.push_back(static_cast<double>(base.exact_checks));
                runs.nn_exact_checks.push_back(static_cast<double>(guided.exact_checks));
                runs.nn_nn_checks.push_back(static_cast<double>(guided.nn_checks));
                runs.gcc0_secs.push_back(base.total_seconds);
                runs.nn_secs.push_back(guided.total_seconds);
            }
            sr.agg = aggregate_runs(runs);
        }
    });

    RunSamples all;
    long free_total = 0, motion_total = 0;
    for (size_t si = 0; si < scenes.size(); ++si) {
        const RunSamples& runs = per_scene[si];
        all.gcc0_checks.insert(all.gcc0_checks.end(), runs.gcc0_checks.begin(), runs.gcc0_checks.end());
        all.nn_exact_checks.insert(all.nn_exact_checks.end(), runs.nn_exact_checks.begin(),
                                   runs.nn_exact_checks.end());
        all.nn_nn_checks.insert(all.nn_nn_checks.end(), runs.nn_nn_checks.begin(), runs.nn_nn_checks.end());
        all.gcc0_secs.insert(all.gcc0_secs.end(), runs.gcc0_secs.begin(), runs.gcc0_secs.end());
        all.nn_secs.insert(all.nn_secs.end(), runs.nn_secs.begin(), runs.nn_secs.end());
        free_total += report.scenes[si].n_free;
        motion_total += report.scenes[si].n_motions;
    }
    report.aggregate = aggregate_runs(all);
    report.free_fraction =
        motion_total > 0 ? static_cast<double>(free_total) / static_cast<double>(motion_total) : 0.0;

    if (cfg.with_classification) {
        report.has_classification = true;
        report.classification = eval_classification(model, r, scenes, cfg.margin, cfg.steps);
    }
    return report;
}

namespace {

json stats_to_json(const Stats& s) { return {{"mean", s.mean}, {"std", s.stddev}, {"n", s.n}}; }

json aggregate_to_json(const SearchAggregate& a) {
    return {{"gcc0_exact_checks", stats_to_json(a.gcc0_exact_checks)},
            {"gccnn_exact_checks", stats_to_json(a.gccnn_exact_checks)},
            {"gccnn_nn_checks", stats_to_json(a.gccnn_nn_checks)},
            {"gcc0_seconds", stats_to_json(a.gcc0_seconds)},
            {"gccnn_seconds", stats_to_json(a.gccnn_seconds)},
            {"runs", a.runs}};
}

}  // namespace

void write_report_json(const std::string& path, const ExperimentReport& report) {
    json j;
    j["permutations"] = report.permutations;
    j["margin_m"] = report.margin;
    j["steps"] = report.steps;
    j["proxy_cached"] = report.proxy_cached;
    j["free_fraction"] = report.free_fraction;
    j["aggregate"] = aggregate_to_json(report.aggregate);
    j["scenes"] = json::array();
    for (const SceneReport& s : report.scenes) {
        json js = {{"scene", s.scene_index}, {"seed", s.scene_seed},   {"n_motions", s.n_motions},
                   {"n_free", s.n_free},     {"agg", aggregate_to_json(s.agg)}};
        j["scenes"].push_back(js);
    }
    if (report.has_classification)
        j["classification"] = {{"accuracy", report.classification.accuracy},
                               {"fp_rate", report.classification.fp_rate},
                               {"fn_rate", report.classification.fn_rate},
                               {"motions", report.classification.motions},
                               {"fp", report.classification.fp},
                               {"fn", report.classification.fn}};
    if (report.has_mae)
        j["mae"] = {{"mean_mm", report.mae_mm.mean}, {"std_mm", report.mae_mm.stddev}, {"n", report.mae_mm.n}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot open report for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing report: " + path);
}

void write_report_csv(const std::string& path, const ExperimentReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open report CSV for writing: " + path);
    out << "scene,n_motions,n_free,runs,gcc0_exact_mean,gcc0_exact_std,gccnn_exact_mean,gccnn_exact_std,"
           "gccnn_nn_mean,gccnn_nn_std\n";
    char buf[256];
    auto row = [&](const std::string& label, int n_motions, int n_free, const SearchAggregate& a) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%ld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", label.c_str(),
                      n_motions, n_free, a.runs, a.gcc0_exact_checks.mean, a.gcc0_exact_checks.stddev,
                      a.gccnn_exact_checks.mean, a.gccnn_exact_checks.stddev, a.gccnn_nn_checks.mean,
                      a.gccnn_nn_checks.stddev);
        out << buf;
    };
    long motions = 0, free_count = 0;
    for (const SceneReport& s : report.scenes) {
        row(std::to_string(s.scene_index), s.n_motions, s.n_free, s.agg);
        motions += s.n_motions;
        free_count += s.n_free;
    }
    row("aggregate", static_cast<int>(motions), static_cast<int>(free_count), report.aggregate);
    if (!out) throw IoError("failed writing report CSV: " + path);
}

}  // namespace sweptnet
