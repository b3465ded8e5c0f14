#include "sweptnet/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sweptnet/bench.hpp"
#include "sweptnet/errors.hpp"
#include "sweptnet/parallel.hpp"

namespace sweptnet {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

// --robot accepts "builtin:<dof>" or a robot description file.
RobotModel resolve_robot(const std::string& spec) {
    if (spec.rfind("builtin:", 0) == 0) {
        const int dof = std::stoi(spec.substr(8));
        return default_robot(dof);
    }
    return load_robot_config(spec);
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f << j.dump(2) << "\n";
}

JointConfig parse_config_list(const std::vector<double>& values) {
    JointConfig q(static_cast<long>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) q[static_cast<long>(i)] = values[i];
    return q;
}

struct GenDataArgs {
    std::string robot = "builtin:6";
    std::string out = "out";
    int motions = 100;
    uint64_t seed = 1;
    SamplingConfig sampling;
    std::vector<double> bbox;  // min xyz, max xyz
};

int cmd_gen_data(const GenDataArgs& a) {
    const double t0 = now_seconds();
    const RobotModel robot = resolve_robot(a.robot);
    SamplingConfig cfg = a.sampling;
    if (a.bbox.size() == 6) {
        cfg.bounding_box.min = {a.bbox[0], a.bbox[1], a.bbox[2]};
        cfg.bounding_box.max = {a.bbox[3], a.bbox[4], a.bbox[5]};
    }
    cfg = resolve_sampling_config(cfg, robot);

    Dataset ds;
    ds.dof = robot.dof();
    ds.steps = cfg.steps;
    ds.samples = generate_dataset(robot, a.motions, cfg, a.seed);

    const fs::path dir = prepare_out_dir(a.out);
    const fs::path data_path = dir / "dataset.svdata";
    write_dataset(data_path.string(), ds);

    json manifest;
    manifest["command"] = "gen-data";
    manifest["robot"] = a.robot;
    manifest["seed"] = a.seed;
    manifest["motions"] = a.motions;
    manifest["sampling"] = {{"uniform_density_per_dm3", cfg.uniform_density},
                            {"surface_density_per_cm2", cfg.surface_density},
                            {"gaussian_per_surface_point", cfg.gaussian_per_surface_point},
                            {"gaussian_sigma_m", cfg.gaussian_sigma},
                            {"line_points_per_surface_point", cfg.line_points_per_surface_point},
                            {"steps", cfg.steps},
                            {"bounding_box_min", {cfg.bounding_box.min.x(), cfg.bounding_box.min.y(),
                                                  cfg.bounding_box.min.z()}},
                            {"bounding_box_max", {cfg.bounding_box.max.x(), cfg.bounding_box.max.y(),
                                                  cfg.bounding_box.max.z()}}};
    manifest["count"] = ds.samples.size();
    manifest["dataset"] = data_path.filename().string();
    manifest["wall_time_s"] = now_seconds() - t0;
    write_json_file(dir / "manifest.json", manifest);
    std::cout << "wrote " << ds.samples.size() << " samples to " << data_path.string() << "\n";
    return 0;
}

struct SplitView {
    std::vector<TrainingSample> train, val, test;
};

// Deterministic 60/25/15 partition by sample index.
SplitView split_dataset(const std::vector<TrainingSample>& samples) {
    SplitView v;
    const size_t n = samples.size();
    const size_t n_train = static_cast<size_t>(0.60 * static_cast<double>(n));
    const size_t n_val = static_cast<size_t>(0.25 * static_cast<double>(n));
    v.train.assign(samples.begin(), samples.begin() + static_cast<long>(n_train));
    v.val.assign(samples.begin() + static_cast<long>(n_train),
                 samples.begin() + static_cast<long>(n_train + n_val));
    v.test.assign(samples.begin() + static_cast<long>(n_train + n_val), samples.end());
    return v;
}

struct TrainArgs {
    std::string dataset;
    std::string robot = "builtin:6";
    std::string out = "out";
    TrainConfig cfg;
};

int cmd_train(const TrainArgs& a) {
    const double t0 = now_seconds();
    const RobotModel robot = resolve_robot(a.robot);
    const Dataset ds = read_dataset(a.dataset);
    if (ds.dof != robot.dof())
        throw FormatError("dataset dof " + std::to_string(ds.dof) + " does not match robot dof " +
                          std::to_string(robot.dof()));
    const SplitView splits = split_dataset(ds.samples);
    if (splits.train.empty() || splits.val.empty())
        throw FormatError("dataset too small to form train/validation splits");

    const TrainResult result = train(robot, splits.train, splits.val, a.cfg);

    const fs::path dir = prepare_out_dir(a.out);
    const fs::path ckpt = dir / "checkpoint.svckpt";
    const fs::path history = dir / "history.csv";
    save_checkpoint(ckpt.string(), result.model);
    save_history_csv(history.string(), result.history);

    json manifest;
    manifest["command"] = "train";
    manifest["dataset"] = a.dataset;
    manifest["robot"] = a.robot;
    manifest["n_blocks"] = a.cfg.n_blocks;
    manifest["block_dim"] = a.cfg.block_dim;
    manifest["batch_size"] = a.cfg.batch_size;
    manifest["epochs"] = a.cfg.epochs;
    manifest["seed"] = a.cfg.seed;
    manifest["lr"] = a.cfg.lr;
    manifest["split"] = {{"train", splits.train.size()}, {"val", splits.val.size()}, {"test", splits.test.size()}};
    manifest["best_epoch"] = result.best_epoch;
    manifest["best_val_loss"] = result.best_val_loss;
    manifest["checkpoint"] = ckpt.filename().string();
    manifest["history"] = history.filename().string();
    manifest["wall_time_s"] = now_seconds() - t0;
    write_json_file(dir / "manifest.json", manifest);
    std::cout << "best epoch " << result.best_epoch << " val loss " << result.best_val_loss << "\n";
    return 0;
}

struct EvalArgs {
    std::string checkpoint;
    std::string dataset;
    std::string split = "all";
    std::string out;
    bool labels_as_predictions = false;
};

int cmd_eval(const EvalArgs& a) {
    const Dataset ds = read_dataset(a.dataset);
    const SplitView splits = split_dataset(ds.samples);
    const std::vector<TrainingSample>* subset = nullptr;
    if (a.split == "all")
        subset = &ds.samples;
    else if (a.split == "train")
        subset = &splits.train;
    else if (a.split == "val")
        subset = &splits.val;
    else if (a.split == "test")
        subset = &splits.test;
    else
        throw std::invalid_argument("eval: --split must be all|train|val|test");

    Stats mae;
    if (a.labels_as_predictions) {
        // Oracle sanity mode: predictions are the stored labels.
        mae = compute_stats(std::vector<double>(subset->size(), 0.0));
    } else {
        const Mlp model = load_checkpoint(a.checkpoint);
        if (model.dof() != ds.dof) throw FormatError("eval: checkpoint dof does not match dataset dof");
        mae = eval_mae(model, *subset);
    }

    json report = {{"command", "eval"},   {"dataset", a.dataset}, {"split", a.split},
                   {"samples", mae.n},    {"mae_mm", mae.mean},   {"mae_std_mm", mae.stddev},
                   {"labels_as_predictions", a.labels_as_predictions}};
    if (!a.checkpoint.empty()) report["checkpoint"] = a.checkpoint;
    std::cout << report.dump(2) << "\n";
    if (!a.out.empty()) write_json_file(a.out, report);
    return 0;
}

struct ReconstructArgs {
    std::string checkpoint;  // empty => oracle
    std::string robot = "builtin:6";
    std::vector<double> q0, q1;
    double voxel_size = 0.01;
    int steps = 200;
    double margin = 0.05;
    std::string out = "swept.obj";
    std::string grid_out;
};

int cmd_reconstruct(const ReconstructArgs& a) {
    const RobotModel robot = resolve_robot(a.robot);
    Motion m{parse_config_list(a.q0), parse_config_list(a.q1), MotionType::LinearJoint};
    if (m.q0.size() != robot.dof() || m.q1.size() != robot.dof())
        throw std::invalid_argument("reconstruct: q0/q1 must have one angle per joint");
    if (!within_limits(robot, m.q0) || !within_limits(robot, m.q1))
        throw std::invalid_argument("reconstruct: configuration outside joint limits");

    const SweptCapsules sweep = pose_swept_capsules(robot, m, a.steps);
    const Aabb bounds = swept_bounds(sweep, a.margin);

    SdfGrid grid;
    if (a.checkpoint.empty()) {
        grid = build_sdf_grid(robot, m, a.steps, bounds, a.voxel_size);
    } else {
        const Mlp model = load_checkpoint(a.checkpoint);
        if (model.dof() != robot.dof())
            throw FormatError("reconstruct: checkpoint dof does not match robot dof");
        grid.origin = bounds.min;
        grid.voxel_size = a.voxel_size;
        for (int ax = 0; ax < 3; ++ax)
            grid.dims[ax] =
                1 + static_cast<int>(std::ceil((bounds.max[ax] - bounds.min[ax]) / a.voxel_size - 1e-12));
        grid.values.resize(static_cast<size_t>(grid.dims.x()) * grid.dims.y() * grid.dims.z());
        std::vector<Vec3> centers;
        centers.reserve(grid.values.size());
        for (int ix = 0; ix < grid.dims.x(); ++ix)
            for (int iy = 0; iy < grid.dims.y(); ++iy)
                for (int iz = 0; iz < grid.dims.z(); ++iz) centers.push_back(grid.voxel_center(ix, iy, iz));
        Mlp::Mat raw(static_cast<long>(centers.size()), model.input_dim);
        for (long rw = 0; rw < raw.rows(); ++rw) {
            const Vec3& p = centers[static_cast<size_t>(rw)];
            raw(rw, 0) = static_cast<float>(p.x());
            raw(rw, 1) = static_cast<float>(p.y());
            raw(rw, 2) = static_cast<float>(p.z());
            for (long i = 0; i < robot.dof(); ++i) raw(rw, 3 + i) = static_cast<float>(m.q0[i]);
            for (long i = 0; i < robot.dof(); ++i) raw(rw, 3 + robot.dof() + i) = static_cast<float>(m.q1[i]);
        }
        const Eigen::VectorXf pred = forward_eval(model, raw);
        for (size_t i = 0; i < grid.values.size(); ++i) grid.values[i] = pred[static_cast<long>(i)];
    }

    const TriMesh mesh = marching_cubes(grid, 0.0);
    save_obj(a.out, mesh);
    if (!a.grid_out.empty()) save_grid(a.grid_out, grid);
    std::cout << "wrote mesh with " << mesh.vertices.size() << " vertices, " << mesh.faces.size()
              << " faces to " << a.out << "\n";
    return 0;
}

struct BoxWorldArgs {
    std::string checkpoint;
    std::string robot = "builtin:6";
    std::string out = "out";
    int scenes = 10;
    int boxes = 50;
    int goals = 100;
    uint64_t seed = 1;
    BoxWorldConfig cfg;
    bool live_proxy = false;
};

int cmd_boxworld(const BoxWorldArgs& a) {
    const double t0 = now_seconds();
    const RobotModel robot = resolve_robot(a.robot);
    const Mlp model = load_checkpoint(a.checkpoint);
    if (model.dof() != robot.dof()) throw FormatError("boxworld: checkpoint dof does not match robot dof");

    std::vector<BoxWorldScene> scenes;
    scenes.reserve(static_cast<size_t>(a.scenes));
    for (int s = 0; s < a.scenes; ++s)
        scenes.push_back(gen_box_world(substream_seed(a.seed, static_cast<uint64_t>(s)), robot, a.boxes,
                                       a.goals));

    BoxWorldConfig cfg = a.cfg;
    cfg.cache_proxy = !a.live_proxy;
    const ExperimentReport report = run_box_world(model, robot, scenes, cfg);

    const fs::path dir = prepare_out_dir(a.out);
    write_report_json((dir / "report.json").string(), report);
    write_report_csv((dir / "report.csv").string(), report);

    json manifest;
    manifest["command"] = "boxworld";
    manifest["checkpoint"] = a.checkpoint;
    manifest["robot"] = a.robot;
    manifest["scenes"] = a.scenes;
    manifest["boxes"] = a.boxes;
    manifest["goals"] = a.goals;
    manifest["permutations"] = cfg.permutations;
    manifest["margin_m"] = cfg.margin;
    manifest["steps"] = cfg.steps;
    manifest["seed"] = a.seed;
    manifest["proxy_cached"] = cfg.cache_proxy;
    manifest["wall_time_s"] = now_seconds() - t0;
    write_json_file(dir / "manifest.json", manifest);

    std::cout << "gcc0 exact checks " << report.aggregate.gcc0_exact_checks.mean << " +- "
              << report.aggregate.gcc0_exact_checks.stddev << ", gcc-nn "
              << report.aggregate.gccnn_exact_checks.mean << " +- "
              << report.aggregate.gccnn_exact_checks.stddev << ", free fraction " << report.free_fraction
              << "\n";
    return 0;
}

struct RobotArgs {
    int dof = 6;
    std::string out;
};

int cmd_robot(const RobotArgs& a) {
    const RobotModel r = default_robot(a.dof);
    if (a.out.empty()) {
        const std::string tmp = "/tmp/sweptnet_robot_dump.txt";
        save_robot_config(tmp, r);
        std::ifstream in(tmp);
        std::cout << in.rdbuf();
    } else {
        save_robot_config(a.out, r);
        std::cout << "wrote robot description to " << a.out << "\n";
    }
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Neural swept-volume distance fields: data generation, training, evaluation and "
                 "collision-checking benchmarks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI file (command line wins)");
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores, 1 = single-thread deterministic)")
        ->capture_default_str();

    GenDataArgs gd;
    auto* gen = app.add_subcommand("gen-data", "Generate a labeled swept-volume distance dataset");
    gen->add_option("--robot", gd.robot, "Robot: builtin:<dof> or config file")->capture_default_str();
    gen->add_option("--motions", gd.motions, "Number of motions")->capture_default_str();
    gen->add_option("--seed", gd.seed, "Base RNG seed")->capture_default_str();
    gen->add_option("--out", gd.out, "Output directory")->capture_default_str();
    gen->add_option("--uniform-density", gd.sampling.uniform_density, "Uniform points per dm^3")
        ->capture_default_str();
    gen->add_option("--surface-density", gd.sampling.surface_density, "Surface points per cm^2")
        ->capture_default_str();
    gen->add_option("--gaussian-per-surface", gd.sampling.gaussian_per_surface_point,
                    "Gaussian draws per surface point")
        ->capture_default_str();
    gen->add_option("--gaussian-sigma", gd.sampling.gaussian_sigma, "Gaussian sigma in meters")
        ->capture_default_str();
    gen->add_option("--line-per-surface", gd.sampling.line_points_per_surface_point,
                    "Line samples per surface point")
        ->capture_default_str();
    gen->add_option("--steps", gd.sampling.steps, "Motion discretization steps")->capture_default_str();
    gen->add_option("--bbox", gd.bbox, "Sampling box: min_x min_y min_z max_x max_y max_z")
        ->expected(6);

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train the distance network on a dataset");
    train_cmd->add_option("--dataset", tr.dataset, "Dataset file")->required();
    train_cmd->add_option("--robot", tr.robot, "Robot: builtin:<dof> or config file")->capture_default_str();
    train_cmd->add_option("--out", tr.out, "Output directory")->capture_default_str();
    train_cmd->add_option("--n-blocks", tr.cfg.n_blocks, "Number of blocks")->capture_default_str();
    train_cmd->add_option("--block-dim", tr.cfg.block_dim, "Block dimension")->capture_default_str();
    train_cmd->add_option("--batch", tr.cfg.batch_size, "Mini-batch size")->capture_default_str();
    train_cmd->add_option("--epochs", tr.cfg.epochs, "Training epochs")->capture_default_str();
    train_cmd->add_option("--seed", tr.cfg.seed, "Training seed")->capture_default_str();
    train_cmd->add_option("--lr", tr.cfg.lr, "Adam learning rate")->capture_default_str();
    train_cmd->add_flag("--verbose", tr.cfg.verbose, "Print per-epoch losses");

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Report MAE of a checkpoint on a dataset");
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file");
    eval_cmd->add_option("--dataset", ev.dataset, "Dataset file")->required();
    eval_cmd->add_option("--split", ev.split, "all|train|val|test")->capture_default_str();
    eval_cmd->add_option("--out", ev.out, "Also write the JSON report here");
    eval_cmd->add_flag("--labels-as-predictions", ev.labels_as_predictions,
                       "Sanity mode: score the stored labels against themselves");

    ReconstructArgs rc;
    auto* rec = app.add_subcommand("reconstruct", "Marching-cubes mesh of a motion's swept volume");
    rec->add_option("--checkpoint", rc.checkpoint, "Checkpoint file (omit to use the exact oracle)");
    rec->add_option("--robot", rc.robot, "Robot: builtin:<dof> or config file")->capture_default_str();
    rec->add_option("--q0", rc.q0, "Start configuration, radians")->required()->expected(-1);
    rec->add_option("--q1", rc.q1, "Goal configuration, radians")->required()->expected(-1);
    rec->add_option("--voxel-size", rc.voxel_size, "Grid resolution in meters")->capture_default_str();
    rec->add_option("--steps", rc.steps, "Motion discretization steps")->capture_default_str();
    rec->add_option("--margin", rc.margin, "Bounds margin around the swept volume, meters")
        ->capture_default_str();
    rec->add_option("--out", rc.out, "Output OBJ path")->capture_default_str();
    rec->add_option("--grid-out", rc.grid_out, "Also write the sampled grid here");

    BoxWorldArgs bw;
    auto* box = app.add_subcommand("boxworld", "Box-world collision-checking benchmark");
    box->add_option("--checkpoint", bw.checkpoint, "Checkpoint file")->required();
    box->add_option("--robot", bw.robot, "Robot: builtin:<dof> or config file")->capture_default_str();
    box->add_option("--out", bw.out, "Output directory")->capture_default_str();
    box->add_option("--scenes", bw.scenes, "Number of scenes")->capture_default_str();
    box->add_option("--boxes", bw.boxes, "Boxes per scene")->capture_default_str();
    box->add_option("--goals", bw.goals, "Goal configurations per scene")->capture_default_str();
    box->add_option("--permutations", bw.cfg.permutations, "Goal-order permutations per scene")
        ->capture_default_str();
    box->add_option("--epsilon", bw.cfg.margin, "Safety margin in meters")->capture_default_str();
    box->add_option("--steps", bw.cfg.steps, "Motion discretization steps")->capture_default_str();
    box->add_option("--seed", bw.seed, "Scene generation seed")->capture_default_str();
    box->add_option("--permutation-seed", bw.cfg.permutation_seed, "Permutation shuffle seed")
        ->capture_default_str();
    box->add_flag("--live-proxy", bw.live_proxy,
                  "Re-run the network on every proxy query instead of memoizing per scene");
    bool no_classification = false;
    box->add_flag("--no-classification", no_classification, "Skip the classification evaluation");

    RobotArgs ra;
    auto* rob = app.add_subcommand("robot", "Print or save a builtin robot description");
    rob->add_option("--dof", ra.dof, "Degrees of freedom (2..7)")->capture_default_str();
    rob->add_option("--out", ra.out, "Write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    set_thread_count(threads);
    bw.cfg.with_classification = !no_classification;

    try {
        if (gen->parsed()) return cmd_gen_data(gd);
        if (train_cmd->parsed()) return cmd_train(tr);
        if (eval_cmd->parsed()) return cmd_eval(ev);
        if (rec->parsed()) return cmd_reconstruct(rc);
        if (box->parsed()) return cmd_boxworld(bw);
        if (rob->parsed()) return cmd_robot(ra);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace sweptnet
