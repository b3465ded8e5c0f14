#include "sweptnet/sweptvol.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "sweptnet/errors.hpp"
#include "sweptnet/mc_tables.hpp"
#include "sweptnet/parallel.hpp"

namespace sweptnet {

JointConfig interpolate(const Motion& m, double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("interpolate: s must be in [0,1]");
    if (m.q0.size() != m.q1.size()) throw std::invalid_argument("interpolate: q0/q1 dof mismatch");
    return (1.0 - s) * m.q0 + s * m.q1;
}

std::vector<JointConfig> discretize(const Motion& m, int steps) {
    if (steps < 2) throw std::invalid_argument("discretize: steps must be >= 2");
    if (m.q0.size() != m.q1.size()) throw std::invalid_argument("discretize: q0/q1 dof mismatch");
    const long dof = m.q0.size();
    const double denom = steps - 1;
    std::vector<JointConfig> configs(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        JointConfig q(dof);
        for (long c = 0; c < dof; ++c) {
            // Componentwise: endpoints exact, identical components exact, and
            // the interior weighting is symmetric under motion reversal.
            if (m.q0[c] == m.q1[c]) {
                q[c] = m.q0[c];
            } else if (i == 0) {
                q[c] = m.q0[c];
            } else if (i == steps - 1) {
                q[c] = m.q1[c];
            } else {
                q[c] = ((steps - 1 - i) * m.q0[c] + i * m.q1[c]) / denom;
            }
        }
        configs[static_cast<size_t>(i)] = std::move(q);
    }
    return configs;
}

SweptCapsules pose_swept_capsules(const RobotModel& r, const Motion& m, int steps) {
    const auto configs = discretize(m, steps);
    SweptCapsules sweep;
    sweep.offsets.reserve(configs.size() + 1);
    sweep.bounds.reserve(configs.size());
    sweep.offsets.push_back(0);
    for (const JointConfig& q : configs) {
        pose_link_capsules(r, q, sweep.capsules);
        sweep.offsets.push_back(static_cast<int>(sweep.capsules.size()));

        const int begin = sweep.offsets[sweep.offsets.size() - 2];
        const int end = sweep.offsets.back();
        Vec3 center = Vec3::Zero();
        for (int k = begin; k < end; ++k) center += sweep.capsules[k].a + sweep.capsules[k].b;
        center /= 2.0 * (end - begin);
        double radius = 0;
        for (int k = begin; k < end; ++k) {
            const Capsule& c = sweep.capsules[k];
            radius = std::max(radius, std::max((c.a - center).norm(), (c.b - center).norm()) + c.radius);
        }
        sweep.bounds.push_back({center, radius});
    }
    return sweep;
}

double SweptCapsules::sdf(const Vec3& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t cfg = 0; cfg < bounds.size(); ++cfg) {
        // ||x - c|| - R lower-bounds every capsule sdf of this configuration;
        // the 1e-9 slack keeps the skip conservative under fp rounding.
        const double lb = (x - bounds[cfg].center).norm() - bounds[cfg].radius;
        if (lb - 1e-9 > best) continue;
        for (int k = offsets[cfg]; k < offsets[cfg + 1]; ++k)
            best = std::min(best, sdf_capsule(x, capsules[static_cast<size_t>(k)]));
    }
    return best;
}

double swept_sdf(const RobotModel& r, const Motion& m, int steps, const Vec3& x) {
    return pose_swept_capsules(r, m, steps).sdf(x);
}

Aabb swept_bounds(const SweptCapsules& sweep, double margin) {
    Aabb box;
    box.min = Vec3::Constant(std::numeric_limits<double>::infinity());
    box.max = -box.min;
    for (const Capsule& c : sweep.capsules) {
        const Vec3 r = Vec3::Constant(c.radius + margin);
        box.min = box.min.cwiseMin(c.a - r).cwiseMin(c.b - r);
        box.max = box.max.cwiseMax(c.a + r).cwiseMax(c.b + r);
    }
    return box;
}

double SdfGrid::trilinear(const Vec3& p) const {
    Vec3 u = (p - origin) / voxel_size;
    int cx = std::clamp(static_cast<int>(std::floor(u.x())), 0, std::max(dims.x() - 2, 0));
    int cy = std::clamp(static_cast<int>(std::floor(u.y())), 0, std::max(dims.y() - 2, 0));
    int cz = std::clamp(static_cast<int>(std::floor(u.z())), 0, std::max(dims.z() - 2, 0));
    const double fx = std::clamp(u.x() - cx, 0.0, 1.0);
    const double fy = std::clamp(u.y() - cy, 0.0, 1.0);
    const double fz = std::clamp(u.z() - cz, 0.0, 1.0);
    const int x1 = std::min(cx + 1, dims.x() - 1);
    const int y1 = std::min(cy + 1, dims.y() - 1);
    const int z1 = std::min(cz + 1, dims.z() - 1);

    auto v = [&](int ix, int iy, int iz) { return static_cast<double>(at(ix, iy, iz)); };
    const double c00 = v(cx, cy, cz) * (1 - fx) + v(x1, cy, cz) * fx;
    const double c10 = v(cx, y1, cz) * (1 - fx) + v(x1, y1, cz) * fx;
    const double c01 = v(cx, cy, z1) * (1 - fx) + v(x1, cy, z1) * fx;
    const double c11 = v(cx, y1, z1) * (1 - fx) + v(x1, y1, z1) * fx;
    const double c0 = c00 * (1 - fy) + c10 * fy;
    const double c1 = c01 * (1 - fy) + c11 * fy;
    return c0 * (1 - fz) + c1 * fz;
}

SdfGrid build_sdf_grid(const RobotModel& r, const Motion& m, int steps, const Aabb& bounds,
                       double voxel_size, size_t memory_cap_bytes) {
    if (!(voxel_size > 0)) throw std::invalid_argument("build_sdf_grid: voxel_size must be > 0");
    SdfGrid g;
    g.origin = bounds.min;
    g.voxel_size = voxel_size;
    for (int a = 0; a < 3; ++a) {
        const double extent = bounds.max[a] - bounds.min[a];
        g.dims[a] = 1 + static_cast<int>(std::ceil(extent / voxel_size - 1e-12));
    }
    const size_t total = static_cast<size_t>(g.dims.x()) * g.dims.y() * g.dims.z();
    if (total * sizeof(float) > memory_cap_bytes)
        throw std::invalid_argument("build_sdf_grid: grid of " + std::to_string(total) +
                                    " voxels exceeds the memory cap");
    g.values.resize(total);

    const SweptCapsules sweep = pose_swept_capsules(r, m, steps);
    const long ny = g.dims.y(), nz = g.dims.z();
    parallel_for(g.dims.x(), [&](long x0, long x1) {
        for (long ix = x0; ix < x1; ++ix)
            for (long iy = 0; iy < ny; ++iy)
                for (long iz = 0; iz < nz; ++iz)
                    g.values[g.index(static_cast<int>(ix), static_cast<int>(iy), static_cast<int>(iz))] =
                        static_cast<float>(sweep.sdf(g.voxel_center(static_cast<int>(ix), static_cast<int>(iy),
                                                                    static_cast<int>(iz))));
    });
    return g;
}

TriMesh marching_cubes(const SdfGrid& g, double iso) {
    if (g.dims.minCoeff() < 2)
        throw std::invalid_argument("marching_cubes: grid dims must be >= 2 per axis");

    TriMesh mesh;
    // Welds shared edge crossings: key is the canonical (low, high) pair of
    // global corner ids of the crossed lattice edge.
    std::unordered_map<uint64_t, int> edge_vertex;
    const uint64_t n_corners =
        static_cast<uint64_t>(g.dims.x()) * g.dims.y() * g.dims.z();

    auto corner_id = [&](int ix, int iy, int iz) -> uint64_t {
        return (static_cast<uint64_t>(ix) * g.dims.y() + iy) * g.dims.z() + iz;
    };

    int cell_vertices[12];
    for (int ix = 0; ix + 1 < g.dims.x(); ++ix)
        for (int iy = 0; iy + 1 < g.dims.y(); ++iy)
            for (int iz = 0; iz + 1 < g.dims.z(); ++iz) {
                double corner_val[8];
                int corner_ijk[8][3];
                int cubeindex = 0;
                for (int c = 0; c < 8; ++c) {
                    corner_ijk[c][0] = ix + mc::kCornerOffsets[c][0];
                    corner_ijk[c][1] = iy + mc::kCornerOffsets[c][1];
                    corner_ijk[c][2] = iz + mc::kCornerOffsets[c][2];
                    corner_val[c] = g.at(corner_ijk[c][0], corner_ijk[c][1], corner_ijk[c][2]);
                    if (corner_val[c] > iso) cubeindex |= 1 << c;
                }
                const int edges = mc::kEdgeTable[cubeindex];
                if (edges == 0) continue;

                for (int e = 0; e < 12; ++e) {
                    if (!(edges & (1 << e))) continue;
                    const int ca = mc::kEdgeCorners[e][0], cb = mc::kEdgeCorners[e][1];
                    uint64_t ida = corner_id(corner_ijk[ca][0], corner_ijk[ca][1], corner_ijk[ca][2]);
                    uint64_t idb = corner_id(corner_ijk[cb][0], corner_ijk[cb][1], corner_ijk[cb][2]);
                    const uint64_t key = std::min(ida, idb) * n_corners + std::max(ida, idb);
                    auto it = edge_vertex.find(key);
                    if (it == edge_vertex.end()) {
                        const double va = corner_val[ca], vb = corner_val[cb];
                        const double mu =
                            std::abs(vb - va) > 0 ? std::clamp((iso - va) / (vb - va), 0.0, 1.0) : 0.5;
                        const Vec3 pa = g.voxel_center(corner_ijk[ca][0], corner_ijk[ca][1], corner_ijk[ca][2]);
                        const Vec3 pb = g.voxel_center(corner_ijk[cb][0], corner_ijk[cb][1], corner_ijk[cb][2]);
                        it = edge_vertex.emplace(key, static_cast<int>(mesh.vertices.size())).first;
                        mesh.vertices.push_back(pa + mu * (pb - pa));
                    }
                    cell_vertices[e] = it->second;
                }

                const int8_t* tris = mc::kTriTable[cubeindex];
                for (int t = 0; tris[t] != -1; t += 3) {
                    const int a = cell_vertices[tris[t]];
                    const int b = cell_vertices[tris[t + 1]];
                    const int c = cell_vertices[tris[t + 2]];
                    if (a != b && b != c && a != c) mesh.faces.push_back({a, b, c});
                }
            }
    return mesh;
}

void save_obj(const std::string& path, const TriMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open OBJ for writing: " + path);
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& f : mesh.faces) out << "f " << f.x() + 1 << " " << f.y() + 1 << " " << f.z() + 1 << "\n";
    if (!out) throw IoError("failed writing OBJ: " + path);
}

TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open OBJ: " + path);
    TriMesh mesh;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x() >> v.y() >> v.z()))
                throw FormatError(path + ":" + std::to_string(lineno) + ": bad vertex line");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            Eigen::Vector3i f;
            if (!(ls >> f.x() >> f.y() >> f.z()))
                throw FormatError(path + ":" + std::to_string(lineno) + ": bad face line");
            mesh.faces.push_back(f - Eigen::Vector3i::Ones());
        } else if (tag[0] != '#') {
            throw FormatError(path + ":" + std::to_string(lineno) + ": unsupported OBJ element '" + tag + "'");
        }
    }
    return mesh;
}

namespace {

constexpr char kGridMagic[8] = {'S', 'V', 'G', 'R', 'I', 'D', '0', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::istream& in, T& v, const std::string& path) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw TruncationError(path + ": file ends inside header");
}

}  // namespace

void save_grid(const std::string& path, const SdfGrid& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open grid for writing: " + path);
    out.write(kGridMagic, sizeof(kGridMagic));
    for (int a = 0; a < 3; ++a) write_raw(out, static_cast<uint64_t>(g.dims[a]));
    for (int a = 0; a < 3; ++a) write_raw(out, g.origin[a]);
    write_raw(out, g.voxel_size);
    out.write(reinterpret_cast<const char*>(g.values.data()),
              static_cast<std::streamsize>(g.values.size() * sizeof(float)));
    if (!out) throw IoError("failed writing grid: " + path);
}

SdfGrid load_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open grid: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kGridMagic, sizeof(magic)) != 0)
        throw FormatError(path + ": not a sweptnet grid file");
    SdfGrid g;
    for (int a = 0; a < 3; ++a) {
        uint64_t d;
        read_raw(in, d, path);
        g.dims[a] = static_cast<int>(d);
    }
    if (g.dims.minCoeff() < 1) throw FormatError(path + ": nonpositive grid dims");
    for (int a = 0; a < 3; ++a) read_raw(in, g.origin[a], path);
    read_raw(in, g.voxel_size, path);
    if (!(g.voxel_size > 0)) throw FormatError(path + ": nonpositive voxel size");
    const size_t total = static_cast<size_t>(g.dims.x()) * g.dims.y() * g.dims.z();
    g.values.resize(total);
    in.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(total * sizeof(float)));
    if (static_cast<size_t>(in.gcount()) != total * sizeof(float))
        throw TruncationError(path + ": file ends inside value block");
    in.peek();
    if (!in.eof()) throw FormatError(path + ": trailing bytes after value block");
    return g;
}

}  // namespace sweptnet
