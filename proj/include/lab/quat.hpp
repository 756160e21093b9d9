#pragma once

#include <array>
#include <cmath>

#include "lab/numeric.hpp"

namespace lab {

/// Unit quaternions represent points of S^3; w + x i + y j + z k.
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
    }
    Quat conj() const { return {w, -x, -y, -z}; }
    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quat normalized() const {
        double n = norm();
        return {w / n, x / n, y / n, z / n};
    }
    std::array<double, 3> vec() const { return {x, y, z}; }
};

using Vec3 = std::array<double, 3>;

/// exp of the pure quaternion v (angle |v|).
Quat quat_exp(const Vec3& v);
/// log of a unit quaternion, returned as the pure part with |log| <= pi.
Vec3 quat_log(const Quat& q);
/// Unit basis quaternion e_j (j = 0,1,2 for i,j,k).
Quat quat_basis(int j);
/// Conjugation q v q^{-1} of the pure quaternion v.
Vec3 quat_rotate(const Quat& q, const Vec3& v);
/// Haar-distributed unit quaternion.
Quat quat_random(Rng& rng);
/// Chordal-free intrinsic angle on the round unit S^3.
double quat_angle(const Quat& a, const Quat& b);

}  // namespace lab
