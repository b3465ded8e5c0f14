#include "sweptnet/geometry.hpp"

#include <cmath>

namespace sweptnet {

double Capsule::surface_area() const {
    const double len = (b - a).norm();
    return 2.0 * M_PI * radius * len + 4.0 * M_PI * radius * radius;
}

double OrientedBox::surface_area() const {
    const Vec3& h = half_extents;
    return 8.0 * (h.x() * h.y() + h.y() * h.z() + h.z() * h.x());
}

bool OrientedBox::is_valid(double tol) const {
    if (!(half_extents.array() > 0).all()) return false;
    if (!half_extents.allFinite() || !center.allFinite()) return false;
    Eigen::Matrix3d should_be_identity = rotation.transpose() * rotation;
    if ((should_be_identity - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(rotation.determinant() - 1.0) <= tol;
}

double sdf_sphere(const Vec3& x, const Sphere& s) {
    return (x - s.center).norm() - s.radius;
}

double sdf_capsule(const Vec3& x, const Capsule& c) {
    const Vec3 pa = x - c.a;
    const Vec3 ba = c.b - c.a;
    const double bb = ba.squaredNorm();
    if (bb == 0.0) return pa.norm() - c.radius;
    const double t = std::clamp(pa.dot(ba) / bb, 0.0, 1.0);
    return (pa - t * ba).norm() - c.radius;
}

double sdf_box(const Vec3& x, const OrientedBox& b) {
    const Vec3 p = b.rotation.transpose() * (x - b.center);
    const Vec3 d = p.cwiseAbs() - b.half_extents;
    const double outside = d.cwiseMax(0.0).norm();
    const double inside = std::min(d.maxCoeff(), 0.0);
    return outside + inside;
}

Vec3 sample_capsule_surface(const Capsule& c, Rng& rng) {
    const Vec3 ab = c.b - c.a;
    const double len = ab.norm();
    const double cyl_area = 2.0 * M_PI * c.radius * len;
    const double cap_area = 4.0 * M_PI * c.radius * c.radius;
    const double pick = rng.uniform() * (cyl_area + cap_area);

    Vec3 axis = len > 0 ? Vec3(ab / len) : Vec3(0, 0, 1);
    // orthonormal frame around the axis
    Vec3 u = axis.unitOrthogonal();
    Vec3 v = axis.cross(u);

    if (pick < cyl_area) {
        const double t = rng.uniform();
        const double phi = rng.uniform() * 2.0 * M_PI;
        return c.a + t * ab + c.radius * (std::cos(phi) * u + std::sin(phi) * v);
    }
    // End caps: the two hemispheres together form a full sphere. Draw a uniform
    // direction and attach it to the endpoint it points away from.
    const double z = 2.0 * rng.uniform() - 1.0;
    const double phi = rng.uniform() * 2.0 * M_PI;
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 dir = rxy * std::cos(phi) * u + rxy * std::sin(phi) * v + z * axis;
    return (dir.dot(axis) >= 0 ? c.b : c.a) + c.radius * dir;
}

std::vector<Vec3> sample_box_surface(const OrientedBox& b, double density_per_cm2, Rng& rng) {
    std::vector<Vec3> points;
    if (density_per_cm2 <= 0) return points;
    const Vec3& h = b.half_extents;
    // face index f = axis * 2 + (positive ? 0 : 1)
    for (int axis = 0; axis < 3; ++axis) {
        const int ua = (axis + 1) % 3, va = (axis + 2) % 3;
        const double area_m2 = 4.0 * h[ua] * h[va];
        const auto count = static_cast<long>(std::llround(area_m2 * 1e4 * density_per_cm2));
        for (int side = 0; side < 2; ++side) {
            const double n = side == 0 ? h[axis] : -h[axis];
            for (long i = 0; i < count; ++i) {
                Vec3 local;
                local[axis] = n;
                local[ua] = rng.uniform(-h[ua], h[ua]);
                local[va] = rng.uniform(-h[va], h[va]);
                points.push_back(b.center + b.rotation * local);
            }
        }
    }
    return points;
}

}  // namespace sweptnet
