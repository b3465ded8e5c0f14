#include "sweptnet/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "sweptnet/errors.hpp"
#include "sweptnet/parallel.hpp"

namespace sweptnet {

namespace {

constexpr double kSurfaceTol = 1e-3;  // meters; |sdf| bound for kept surface points

Vec3 quantize(const Vec3& p) {
    return {static_cast<double>(static_cast<float>(p.x())), static_cast<double>(static_cast<float>(p.y())),
            static_cast<double>(static_cast<float>(p.z()))};
}

JointConfigF to_f32(const JointConfig& q) {
    JointConfigF out(q.size());
    for (long i = 0; i < q.size(); ++i) out[i] = static_cast<float>(q[i]);
    return out;
}

JointConfig to_f64(const JointConfigF& q) {
    JointConfig out(q.size());
    for (long i = 0; i < q.size(); ++i) out[i] = static_cast<double>(q[i]);
    return out;
}

}  // namespace

void SamplingConfig::validate() const {
    if (uniform_density < 0 || surface_density < 0) throw std::invalid_argument("sampling: densities must be >= 0");
    if (gaussian_per_surface_point < 0 || line_points_per_surface_point < 0)
        throw std::invalid_argument("sampling: per-point counts must be >= 0");
    if (!(gaussian_sigma > 0)) throw std::invalid_argument("sampling: gaussian_sigma must be > 0");
    if (steps < 2) throw std::invalid_argument("sampling: steps must be >= 2");
    if (!((bounding_box.max.array() > bounding_box.min.array()).all()))
        throw std::invalid_argument("sampling: bounding box is empty");
}

Aabb default_bounding_box(const RobotModel& r) {
    const Vec3 center = r.base_pose.translation();
    return {center - Vec3::Constant(1.2), center + Vec3::Constant(1.2)};
}

SamplingConfig resolve_sampling_config(const SamplingConfig& cfg, const RobotModel& r) {
    SamplingConfig out = cfg;
    if ((out.bounding_box.size().array() <= 0).any()) out.bounding_box = default_bounding_box(r);
    out.validate();
    return out;
}

Motion sample_motion(const RobotModel& r, Rng& rng) {
    Motion m;
    m.q0.resize(r.dof());
    m.q1.resize(r.dof());
    for (int i = 0; i < r.dof(); ++i) m.q0[i] = rng.uniform(r.joints[static_cast<size_t>(i)].lower,
                                                            r.joints[static_cast<size_t>(i)].upper);
    for (int i = 0; i < r.dof(); ++i) m.q1[i] = rng.uniform(r.joints[static_cast<size_t>(i)].lower,
                                                            r.joints[static_cast<size_t>(i)].upper);
    return m;
}

namespace {

std::vector<Vec3> surface_points_impl(const SweptCapsules& sweep, const SamplingConfig& cfg, Rng& rng) {
    std::vector<Vec3> kept;
    if (cfg.surface_density <= 0 || sweep.capsules.empty()) return kept;

    std::vector<double> cumulative_area(sweep.capsules.size());
    double total = 0;
    for (size_t i = 0; i < sweep.capsules.size(); ++i) {
        total += sweep.capsules[i].surface_area();
        cumulative_area[i] = total;
    }
    const auto candidates = static_cast<long>(std::llround(total * 1e4 * cfg.surface_density));
    kept.reserve(static_cast<size_t>(candidates) / 4);
    for (long n = 0; n < candidates; ++n) {
        const double pick = rng.uniform() * total;
        const size_t idx = static_cast<size_t>(
            std::lower_bound(cumulative_area.begin(), cumulative_area.end(), pick) - cumulative_area.begin());
        const Vec3 p = quantize(sample_capsule_surface(sweep.capsules[std::min(idx, sweep.capsules.size() - 1)], rng));
        if (std::abs(sweep.sdf(p)) <= kSurfaceTol) kept.push_back(p);
    }
    return kept;
}

}  // namespace

std::vector<Vec3> approximate_surface_points(const RobotModel& r, const Motion& m,
                                             const SamplingConfig& cfg_in, Rng& rng) {
    const SamplingConfig cfg = resolve_sampling_config(cfg_in, r);
    const SweptCapsules sweep = pose_swept_capsules(r, m, cfg.steps);
    return surface_points_impl(sweep, cfg, rng);
}

std::vector<TrainingSample> generate_samples(const RobotModel& r, const Motion& m,
                                             const SamplingConfig& cfg_in, Rng& rng) {
    const SamplingConfig cfg = resolve_sampling_config(cfg_in, r);

    // Quantize the motion first so stored configurations label themselves:
    // relabeling from file contents reproduces delta exactly.
    Motion mq;
    mq.q0 = to_f64(to_f32(m.q0));
    mq.q1 = to_f64(to_f32(m.q1));
    mq.type = m.type;
    const JointConfigF q0f = to_f32(mq.q0), q1f = to_f32(mq.q1);

    const SweptCapsules sweep = pose_swept_capsules(r, mq, cfg.steps);

    std::vector<TrainingSample> samples;
    auto emit = [&](const Vec3& point) {
        const Vec3 p = quantize(point);
        TrainingSample s;
        s.x = p.cast<float>();
        s.q0 = q0f;
        s.q1 = q1f;
        s.delta = static_cast<float>(sweep.sdf(p));
        samples.push_back(std::move(s));
    };

    // (a) uniform in the bounding box
    const Aabb& box = cfg.bounding_box;
    const auto n_uniform = static_cast<long>(std::llround(box.volume() * 1e3 * cfg.uniform_density));
    for (long i = 0; i < n_uniform; ++i)
        emit({rng.uniform(box.min.x(), box.max.x()), rng.uniform(box.min.y(), box.max.y()),
              rng.uniform(box.min.z(), box.max.z())});

    // (b) points near the swept-volume boundary
    const std::vector<Vec3> surface = surface_points_impl(sweep, cfg, rng);
    for (const Vec3& p : surface) emit(p);

    // (c) Gaussian cloud around each surface point
    for (const Vec3& p : surface)
        for (int k = 0; k < cfg.gaussian_per_surface_point; ++k) emit(p + rng.normal3(cfg.gaussian_sigma));

    // (d) uniform on the segment to a second random surface point
    for (const Vec3& p : surface)
        for (int k = 0; k < cfg.line_points_per_surface_point; ++k) {
            const Vec3& other = surface[rng.uniform_index(surface.size())];
            emit(p + rng.uniform() * (other - p));
        }

    return samples;
}

std::vector<TrainingSample> generate_dataset(const RobotModel& r, int n_motions,
                                             const SamplingConfig& cfg_in, uint64_t seed) {
    if (r.dof() > kMaxDatasetDof) throw std::invalid_argument("generate_dataset: dof exceeds dataset limit");
    const SamplingConfig cfg = resolve_sampling_config(cfg_in, r);
    std::vector<std::vector<TrainingSample>> per_motion(static_cast<size_t>(std::max(n_motions, 0)));
    parallel_for(n_motions, [&](long begin, long end) {
        for (long i = begin; i < end; ++i) {
            Rng rng(substream_seed(seed, static_cast<uint64_t>(i)));
            const Motion m = sample_motion(r, rng);
            per_motion[static_cast<size_t>(i)] = generate_samples(r, m, cfg, rng);
        }
    });
    std::vector<TrainingSample> all;
    size_t total = 0;
    for (const auto& v : per_motion) total += v.size();
    all.reserve(total);
    for (auto& v : per_motion)
        for (auto& s : v) all.push_back(std::move(s));
    return all;
}

namespace {

constexpr char kDatasetMagic[8] = {'S', 'V', 'D', 'A', 'T', 'A', '0', '1'};

}  // namespace

void write_dataset(const std::string& path, const Dataset& ds) {
    if (ds.dof < 1 || ds.dof > kMaxDatasetDof) throw std::invalid_argument("write_dataset: bad dof");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open dataset for writing: " + path);
    out.write(kDatasetMagic, sizeof(kDatasetMagic));
    const uint32_t dof = static_cast<uint32_t>(ds.dof), steps = static_cast<uint32_t>(ds.steps);
    const uint64_t count = ds.samples.size();
    out.write(reinterpret_cast<const char*>(&dof), 4);
    out.write(reinterpret_cast<const char*>(&steps), 4);
    out.write(reinterpret_cast<const char*>(&count), 8);
    std::vector<float> record(3 + 2 * static_cast<size_t>(ds.dof) + 1);
    for (const TrainingSample& s : ds.samples) {
        if (s.q0.size() != ds.dof || s.q1.size() != ds.dof)
            throw std::invalid_argument("write_dataset: sample dof mismatch");
        float* w = record.data();
        for (int i = 0; i < 3; ++i) *w++ = s.x[i];
        for (int i = 0; i < ds.dof; ++i) *w++ = s.q0[i];
        for (int i = 0; i < ds.dof; ++i) *w++ = s.q1[i];
        *w++ = s.delta;
        out.write(reinterpret_cast<const char*>(record.data()),
                  static_cast<std::streamsize>(record.size() * sizeof(float)));
    }
    if (!out) throw IoError("failed writing dataset: " + path);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0)
        throw FormatError(path + ": not a sweptnet dataset file");
    uint32_t dof = 0, steps = 0;
    uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&dof), 4);
    in.read(reinterpret_cast<char*>(&steps), 4);
    in.read(reinterpret_cast<char*>(&count), 8);
    if (!in) throw TruncationError(path + ": file ends inside header");
    if (dof < 1 || dof > static_cast<uint32_t>(kMaxDatasetDof))
        throw FormatError(path + ": implausible dof " + std::to_string(dof));

    Dataset ds;
    ds.dof = static_cast<int>(dof);
    ds.steps = static_cast<int>(steps);
    ds.samples.resize(count);
    const size_t record_floats = 3 + 2 * static_cast<size_t>(dof) + 1;
    std::vector<float> record(record_floats);
    for (uint64_t n = 0; n < count; ++n) {
        in.read(reinterpret_cast<char*>(record.data()),
                static_cast<std::streamsize>(record_floats * sizeof(float)));
        if (static_cast<size_t>(in.gcount()) != record_floats * sizeof(float))
            throw TruncationError(path + ": file ends inside record " + std::to_string(n));
        TrainingSample& s = ds.samples[n];
        const float* rp = record.data();
        for (int i = 0; i < 3; ++i) s.x[i] = *rp++;
        s.q0.resize(dof);
        s.q1.resize(dof);
        for (uint32_t i = 0; i < dof; ++i) s.q0[i] = *rp++;
        for (uint32_t i = 0; i < dof; ++i) s.q1[i] = *rp++;
        s.delta = *rp++;
    }
    in.peek();
    if (!in.eof()) throw FormatError(path + ": trailing bytes after last record");
    return ds;
}

}  // namespace sweptnet
