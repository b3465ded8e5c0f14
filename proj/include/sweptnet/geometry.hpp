#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sweptnet/rng.hpp"

namespace sweptnet {

using Vec3 = Eigen::Vector3d;

struct Sphere {
    Vec3 center{0, 0, 0};
    double radius = 0;  // meters, > 0
};

// Segment [a, b] inflated by radius. a == b degenerates to a sphere.
struct Capsule {
    Vec3 a{0, 0, 0};
    Vec3 b{0, 0, 0};
    double radius = 0;

    double surface_area() const;
};

struct OrientedBox {
    Vec3 center{0, 0, 0};
    Vec3 half_extents{0, 0, 0};             // all > 0
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // orthonormal, det +1

    double surface_area() const;
    bool is_valid(double tol = 1e-9) const;
};

/// Signed distance, negative inside. All exact up to floating-point rounding.
double sdf_sphere(const Vec3& x, const Sphere& s);
double sdf_capsule(const Vec3& x, const Capsule& c);
double sdf_box(const Vec3& x, const OrientedBox& b);

// Uniform point on the capsule surface, area-weighted between the cylindrical
// shell and the two end caps.
Vec3 sample_capsule_surface(const Capsule& c, Rng& rng);

// Area-weighted uniform samples on the box surface. Per face the point count
// is round(face_area * density), density in points per cm^2.
std::vector<Vec3> sample_box_surface(const OrientedBox& b, double density_per_cm2, Rng& rng);

}  // namespace sweptnet
