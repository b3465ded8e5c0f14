#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sweptnet/sweptvol.hpp"

namespace sweptnet {

// Joint vector quantized to the dataset's 32-bit storage precision.
// Inline capacity bounds the supported dof.
using JointConfigF = Eigen::Matrix<float, Eigen::Dynamic, 1, Eigen::ColMajor, 16, 1>;

constexpr int kMaxDatasetDof = 16;

// One labeled tuple. delta is swept_sdf evaluated at the stored (already
// float-quantized) values, so relabeling from the stored fields reproduces
// it bit for bit.
struct TrainingSample {
    Eigen::Vector3f x;
    JointConfigF q0;
    JointConfigF q1;
    float delta = 0;
};

struct SamplingConfig {
    double uniform_density = 0.25;        // points per dm^3 of bounding box
    double surface_density = 0.2;         // points per cm^2 of swept surface
    int gaussian_per_surface_point = 2;   // extra draws per surface point
    double gaussian_sigma = 0.003;        // meters
    int line_points_per_surface_point = 1;
    int steps = 200;                      // motion discretization
    Aabb bounding_box;

    void validate() const;
};

// Cube of side 2.4 m centered on the robot base; covers a ~1 m reach with
// margin.
Aabb default_bounding_box(const RobotModel& r);

// Fills unset bounding boxes with the default. Returns a validated copy.
SamplingConfig resolve_sampling_config(const SamplingConfig& cfg, const RobotModel& r);

// q0, q1 i.i.d. uniform within the per-joint limits.
Motion sample_motion(const RobotModel& r, Rng& rng);

// Points within 1e-3 m of the swept-volume boundary, obtained by sampling
// capsule surfaces across the discretized configurations and rejecting
// candidates buried inside the union. Candidate count is
// surface_density * total capsule area, so the kept count approximates
// surface_density * true boundary area. Returned points are float-quantized.
std::vector<Vec3> approximate_surface_points(const RobotModel& r, const Motion& m,
                                             const SamplingConfig& cfg, Rng& rng);

// The four-part sampling scheme: (a) uniform in the bounding box,
// (b) surface points, (c) Gaussian perturbations around each surface point,
// (d) uniform points on segments between random surface-point pairs.
// Every point is labeled with swept_sdf at its quantized location.
std::vector<TrainingSample> generate_samples(const RobotModel& r, const Motion& m,
                                             const SamplingConfig& cfg, Rng& rng);

// n_motions independent motions, each from its own substream of `seed`;
// motions are processed in parallel and concatenated in index order, so the
// result is identical for any worker count.
std::vector<TrainingSample> generate_dataset(const RobotModel& r, int n_motions,
                                             const SamplingConfig& cfg, uint64_t seed);

struct Dataset {
    int dof = 0;
    int steps = 0;  // discretization the labels were computed with
    std::vector<TrainingSample> samples;
};

// Little-endian binary: magic "SVDATA01", u32 dof, u32 steps, u64 count,
// then per record x[3], q0[dof], q1[dof], delta as f32.
void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& path);

}  // namespace sweptnet
