#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sweptnet/robot.hpp"

namespace sweptnet {

enum class MotionType { LinearJoint };

// A motion parameterized by its start and goal configuration.
struct Motion {
    JointConfig q0;
    JointConfig q1;
    MotionType type = MotionType::LinearJoint;
};

// Configuration at motion parameter s in [0, 1]; linear in joint space.
JointConfig interpolate(const Motion& m, double s);

// Configurations at s = i/(steps-1), i = 0..steps-1, both endpoints included.
// Endpoints are returned exactly; interior configs use a symmetric weighted
// form so that reversing the motion yields bit-identical configurations.
std::vector<JointConfig> discretize(const Motion& m, int steps);

// All link capsules posed at every discretized configuration, plus one
// bounding sphere per configuration for exact pruning during queries.
struct SweptCapsules {
    std::vector<Capsule> capsules;  // config-major
    std::vector<int> offsets;       // size steps+1, capsule range per config
    std::vector<Sphere> bounds;     // per config, encloses that config's capsules

    int steps() const { return static_cast<int>(bounds.size()); }
    // min over all capsules of sdf_capsule(x, .). The ground-truth label
    // function of the whole pipeline.
    double sdf(const Vec3& x) const;
};

SweptCapsules pose_swept_capsules(const RobotModel& r, const Motion& m, int steps);

// Signed distance from x to the discretized swept volume:
//   min over q in discretize(m, steps) of robot_sdf(r, q, x)
double swept_sdf(const RobotModel& r, const Motion& m, int steps, const Vec3& x);

struct Aabb {
    Vec3 min{0, 0, 0};
    Vec3 max{0, 0, 0};
    Vec3 size() const { return max - min; }
    double volume() const { return size().prod(); }
    bool contains(const Vec3& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
};

// Tight axis-aligned bounds of the posed capsules, inflated by margin.
Aabb swept_bounds(const SweptCapsules& sweep, double margin);

// Axis-aligned voxel grid of signed distances. values[(ix*ny + iy)*nz + iz]
// is the distance at world point origin + voxel_size * (ix, iy, iz); origin
// is the center of voxel (0,0,0).
struct SdfGrid {
    Vec3 origin{0, 0, 0};
    double voxel_size = 0;
    Eigen::Vector3i dims{0, 0, 0};
    std::vector<float> values;

    size_t index(int ix, int iy, int iz) const {
        return (static_cast<size_t>(ix) * dims.y() + iy) * dims.z() + iz;
    }
    float at(int ix, int iy, int iz) const { return values[index(ix, iy, iz)]; }
    Vec3 voxel_center(int ix, int iy, int iz) const {
        return origin + voxel_size * Vec3(ix, iy, iz);
    }
    // Trilinear interpolation; points outside the lattice are clamped to it.
    double trilinear(const Vec3& p) const;
};

// Samples swept_sdf at every voxel center covering `bounds`. Throws
// std::invalid_argument if the grid would exceed memory_cap_bytes.
SdfGrid build_sdf_grid(const RobotModel& r, const Motion& m, int steps, const Aabb& bounds,
                       double voxel_size, size_t memory_cap_bytes = size_t{2} << 30);

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Eigen::Vector3i> faces;  // 0-based indices
};

// Standard marching cubes at level `iso` with shared-edge vertex welding.
// Requires dims >= 2 per axis.
TriMesh marching_cubes(const SdfGrid& g, double iso);

// ASCII OBJ: "v x y z" lines then "f i j k" lines, 1-indexed.
void save_obj(const std::string& path, const TriMesh& mesh);
TriMesh load_obj(const std::string& path);

// Little-endian binary grid: magic "SVGRID01", u64 dims[3], f64 origin[3],
// f64 voxel_size, then f32 values in index order.
void save_grid(const std::string& path, const SdfGrid& g);
SdfGrid load_grid(const std::string& path);

}  // namespace sweptnet
