#include "sweptnet/robot.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sweptnet/errors.hpp"

namespace sweptnet {

double RobotModel::reach() const {
    double sum = 0;
    for (const Joint& j : joints) sum += j.offset.norm();
    return sum;
}

double RobotModel::max_extent() const {
    double extra = 0;
    for (const auto& link : link_shapes)
        for (const Capsule& c : link)
            extra = std::max(extra, std::max(c.a.norm(), c.b.norm()) + c.radius);
    return reach() + extra;
}

void RobotModel::validate() const {
    if (joints.empty()) throw std::invalid_argument("robot: dof must be >= 1");
    if (link_shapes.size() != joints.size())
        throw std::invalid_argument("robot: need one shape list per link");
    for (size_t i = 0; i < joints.size(); ++i) {
        const Joint& j = joints[i];
        if (std::abs(j.axis.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("robot: joint axis must be a unit vector");
        if (!(j.lower < j.upper))
            throw std::invalid_argument("robot: joint limits must satisfy lower < upper");
        if (!j.offset.allFinite()) throw std::invalid_argument("robot: joint offset must be finite");
        if (link_shapes[i].empty())
            throw std::invalid_argument("robot: every link needs at least one capsule");
        for (const Capsule& c : link_shapes[i])
            if (!(c.radius > 0) || !c.a.allFinite() || !c.b.allFinite())
                throw std::invalid_argument("robot: link capsule invalid");
    }
    Eigen::Matrix3d rtr = base_pose.linear().transpose() * base_pose.linear();
    if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("robot: base pose rotation not orthonormal");
}

std::vector<Eigen::Isometry3d> forward_kinematics(const RobotModel& r, const JointConfig& q) {
    if (q.size() != r.dof())
        throw std::invalid_argument("forward_kinematics: configuration has wrong dof");
    std::vector<Eigen::Isometry3d> frames;
    frames.reserve(r.joints.size());
    Eigen::Isometry3d t = r.base_pose;
    for (size_t i = 0; i < r.joints.size(); ++i) {
        t = t * Eigen::AngleAxisd(q[static_cast<long>(i)], r.joints[i].axis);
        t = t * Eigen::Translation3d(r.joints[i].offset);
        frames.push_back(t);
    }
    return frames;
}

void pose_link_capsules(const RobotModel& r, const JointConfig& q, std::vector<Capsule>& out) {
    const auto frames = forward_kinematics(r, q);
    for (size_t i = 0; i < frames.size(); ++i)
        for (const Capsule& c : r.link_shapes[i])
            out.push_back({frames[i] * c.a, frames[i] * c.b, c.radius});
}

double robot_sdf(const RobotModel& r, const JointConfig& q, const Vec3& x) {
    const auto frames = forward_kinematics(r, q);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < frames.size(); ++i)
        for (const Capsule& c : r.link_shapes[i])
            best = std::min(best, sdf_capsule(x, Capsule{frames[i] * c.a, frames[i] * c.b, c.radius}));
    return best;
}

bool within_limits(const RobotModel& r, const JointConfig& q, double tol) {
    if (q.size() != r.dof()) return false;
    for (int i = 0; i < r.dof(); ++i)
        if (q[i] < r.joints[i].lower - tol || q[i] > r.joints[i].upper + tol) return false;
    return true;
}

namespace {

// Round a limit to its float32 value so that float-quantized joint samples
// clamp exactly onto the stored bound.
double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

const double kLimitZ = f32(170.0 * M_PI / 180.0);
const double kLimitY = f32(120.0 * M_PI / 180.0);

struct ChainSpec {
    std::vector<double> lengths;
    std::vector<double> radii;
};

ChainSpec chain_spec(int dof) {
    switch (dof) {
        case 2: return {{0.55, 0.45}, {0.060, 0.050}};
        case 3: return {{0.40, 0.35, 0.25}, {0.060, 0.050, 0.045}};
        case 4: return {{0.35, 0.30, 0.20, 0.15}, {0.060, 0.052, 0.047, 0.042}};
        case 5: return {{0.28, 0.25, 0.20, 0.15, 0.12}, {0.060, 0.053, 0.048, 0.044, 0.040}};
        case 6: return {{0.20, 0.25, 0.20, 0.15, 0.12, 0.08}, {0.060, 0.055, 0.050, 0.045, 0.042, 0.040}};
        case 7:
            return {{0.18, 0.17, 0.16, 0.14, 0.13, 0.12, 0.10},
                    {0.060, 0.055, 0.050, 0.047, 0.044, 0.042, 0.040}};
        default: throw std::invalid_argument("default_robot: dof must be in 2..7");
    }
}

}  // namespace

RobotModel default_robot(int dof) {
    const ChainSpec spec = chain_spec(dof);
    RobotModel r;
    for (int i = 0; i < dof; ++i) {
        Joint j;
        j.axis = (i % 2 == 0) ? Vec3(0, 0, 1) : Vec3(0, 1, 0);
        j.offset = Vec3(0, 0, spec.lengths[static_cast<size_t>(i)]);
        const double lim = (i % 2 == 0) ? kLimitZ : kLimitY;
        j.lower = -lim;
        j.upper = lim;
        r.joints.push_back(j);
        const double len = spec.lengths[static_cast<size_t>(i)];
        r.link_shapes.push_back({Capsule{Vec3(0, 0, -len), Vec3(0, 0, 0), spec.radii[static_cast<size_t>(i)]}});
    }
    r.validate();
    return r;
}

namespace {

std::string fmt_vec3(const Vec3& v) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", v.x(), v.y(), v.z());
    return buf;
}

}  // namespace

void save_robot_config(const std::string& path, const RobotModel& r) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open robot config for writing: " + path);
    out << "# sweptnet robot description\n";
    out << "dof " << r.dof() << "\n";
    out << "base_translation " << fmt_vec3(r.base_pose.translation()) << "\n";
    Eigen::Quaterniond q(r.base_pose.linear());
    char buf[256];
    std::snprintf(buf, sizeof(buf), "base_quaternion %.17g %.17g %.17g %.17g", q.w(), q.x(), q.y(), q.z());
    out << buf << "\n";
    for (int i = 0; i < r.dof(); ++i) {
        const Joint& j = r.joints[static_cast<size_t>(i)];
        std::snprintf(buf, sizeof(buf), "joint %d axis %s offset %s limits %.17g %.17g", i,
                      fmt_vec3(j.axis).c_str(), fmt_vec3(j.offset).c_str(), j.lower, j.upper);
        out << buf << "\n";
    }
    for (int i = 0; i < r.dof(); ++i)
        for (const Capsule& c : r.link_shapes[static_cast<size_t>(i)]) {
            std::snprintf(buf, sizeof(buf), "capsule %d %s %s %.17g", i, fmt_vec3(c.a).c_str(),
                          fmt_vec3(c.b).c_str(), c.radius);
            out << buf << "\n";
        }
    if (!out) throw IoError("failed writing robot config: " + path);
}

RobotModel load_robot_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open robot config: " + path);

    RobotModel r;
    int dof = -1;
    std::vector<bool> joint_seen;
    std::string line;
    int lineno = 0;

    auto fail = [&](const std::string& msg) {
        throw FormatError(path + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;

        if (key == "dof") {
            if (dof != -1) fail("duplicate dof");
            if (!(ls >> dof) || dof < 1) fail("dof must be a positive integer");
            r.joints.resize(static_cast<size_t>(dof));
            r.link_shapes.resize(static_cast<size_t>(dof));
            joint_seen.assign(static_cast<size_t>(dof), false);
        } else if (key == "base_translation") {
            Vec3 t;
            if (!(ls >> t.x() >> t.y() >> t.z())) fail("base_translation needs 3 reals");
            r.base_pose.translation() = t;
        } else if (key == "base_quaternion") {
            double w, x, y, z;
            if (!(ls >> w >> x >> y >> z)) fail("base_quaternion needs w x y z");
            Eigen::Quaterniond q(w, x, y, z);
            if (q.norm() < 1e-12) fail("base_quaternion must be nonzero");
            r.base_pose.linear() = q.normalized().toRotationMatrix();
        } else if (key == "joint") {
            int idx;
            std::string kw_axis, kw_offset, kw_limits;
            Joint j;
            if (!(ls >> idx)) fail("joint needs an index");
            if (dof < 0 || idx < 0 || idx >= dof) fail("joint index out of range (declare dof first)");
            if (!(ls >> kw_axis >> j.axis.x() >> j.axis.y() >> j.axis.z() >> kw_offset >> j.offset.x() >>
                  j.offset.y() >> j.offset.z() >> kw_limits >> j.lower >> j.upper) ||
                kw_axis != "axis" || kw_offset != "offset" || kw_limits != "limits")
                fail("joint syntax: joint <i> axis x y z offset x y z limits lo hi");
            if (joint_seen[static_cast<size_t>(idx)]) fail("duplicate joint index");
            joint_seen[static_cast<size_t>(idx)] = true;
            r.joints[static_cast<size_t>(idx)] = j;
        } else if (key == "capsule") {
            int idx;
            Capsule c;
            if (!(ls >> idx >> c.a.x() >> c.a.y() >> c.a.z() >> c.b.x() >> c.b.y() >> c.b.z() >> c.radius))
                fail("capsule syntax: capsule <link> ax ay az bx by bz radius");
            if (dof < 0 || idx < 0 || idx >= dof) fail("capsule link index out of range");
            r.link_shapes[static_cast<size_t>(idx)].push_back(c);
        } else {
            fail("unknown key '" + key + "'");
        }
        std::string extra;
        if (ls >> extra) fail("trailing tokens after '" + key + "'");
    }

    if (dof < 1) throw FormatError(path + ": missing dof declaration");
    for (int i = 0; i < dof; ++i)
        if (!joint_seen[static_cast<size_t>(i)])
            throw FormatError(path + ": joint " + std::to_string(i) + " not declared");
    try {
        r.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(path + ": " + e.what());
    }
    return r;
}

}  // namespace sweptnet
