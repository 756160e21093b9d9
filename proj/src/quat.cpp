#include "lab/quat.hpp"

#include <algorithm>

namespace lab {

Quat quat_exp(const Vec3& v) {
    double t = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (t < 1e-300) return {1, 0, 0, 0};
    double s = std::sin(t) / t;
    return {std::cos(t), s * v[0], s * v[1], s * v[2]};
}

Vec3 quat_log(const Quat& q0) {
    Quat q = q0.w < 0 ? Quat{-q0.w, -q0.x, -q0.y, -q0.z} : q0;
    double n = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    if (n < 1e-300) return {0, 0, 0};
    double t = std::atan2(n, q.w);
    // undo the sign flip: -q = exp(v) with |v| replaced by pi - |v| along -axis
    if (q0.w < 0) {
        double tt = kPi - t;
        return {-q.x / n * tt, -q.y / n * tt, -q.z / n * tt};
    }
    return {q.x / n * t, q.y / n * t, q.z / n * t};
}

Quat quat_basis(int j) {
    Quat q{0, 0, 0, 0};
    if (j == 0) q.x = 1;
    if (j == 1) q.y = 1;
    if (j == 2) q.z = 1;
    return q;
}

Vec3 quat_rotate(const Quat& q, const Vec3& v) {
    Quat p{0, v[0], v[1], v[2]};
    Quat r = q * p * q.conj();
    return {r.x, r.y, r.z};
}

Quat quat_random(Rng& rng) {
    Quat q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    return q.normalized();
}

double quat_angle(const Quat& a, const Quat& b) {
    double d = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    return std::acos(std::clamp(d, -1.0, 1.0));
}

}  // namespace lab
