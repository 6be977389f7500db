#pragma once

#include <array>
#include <cmath>
#include <ostream>

namespace posegen {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct Vec2 {
    double x = 0, y = 0;
};

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    return n > 0 ? v / n : Vec3{0, 0, 0};
}

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

/// 3x3 rotation/linear map, row-major.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }

    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }

    double determinant() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
             - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
             + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

/// Rigid transform: p -> R*p + t.
struct Rigid {
    Mat3 rot = Mat3::identity();
    Vec3 trans{};

    static Rigid identity() { return {}; }
    static Rigid translation(const Vec3& t) { return {Mat3::identity(), t}; }
    static Rigid rotation(const Mat3& r) { return {r, {}}; }

    Vec3 apply(const Vec3& p) const { return rot * p + trans; }

    Rigid operator*(const Rigid& o) const { return {rot * o.rot, rot * o.trans + trans}; }

    Rigid inverse() const {
        Mat3 rt = rot.transposed();
        return {rt, -(rt * trans)};
    }
};

inline Mat3 rotation_x(double a) {
    double c = std::cos(a), s = std::sin(a);
    Mat3 r = Mat3::identity();
    r.m[1][1] = c; r.m[1][2] = -s;
    r.m[2][1] = s; r.m[2][2] = c;
    return r;
}

inline Mat3 rotation_y(double a) {
    double c = std::cos(a), s = std::sin(a);
    Mat3 r = Mat3::identity();
    r.m[0][0] = c; r.m[0][2] = s;
    r.m[2][0] = -s; r.m[2][2] = c;
    return r;
}

inline Mat3 rotation_z(double a) {
    double c = std::cos(a), s = std::sin(a);
    Mat3 r = Mat3::identity();
    r.m[0][0] = c; r.m[0][1] = -s;
    r.m[1][0] = s; r.m[1][1] = c;
    return r;
}

/// Fixed-axis X-Y-Z (roll-pitch-yaw): R = Rz(gamma) * Ry(beta) * Rx(alpha).
inline Mat3 euler_to_rotation(double alpha, double beta, double gamma) {
    return rotation_z(gamma) * rotation_y(beta) * rotation_x(alpha);
}

/// Rodrigues rotation about a unit axis.
inline Mat3 axis_angle(const Vec3& axis, double angle) {
    double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    const Vec3& a = axis;
    Mat3 r;
    r.m[0][0] = t * a.x * a.x + c;
    r.m[0][1] = t * a.x * a.y - s * a.z;
    r.m[0][2] = t * a.x * a.z + s * a.y;
    r.m[1][0] = t * a.x * a.y + s * a.z;
    r.m[1][1] = t * a.y * a.y + c;
    r.m[1][2] = t * a.y * a.z - s * a.x;
    r.m[2][0] = t * a.x * a.z - s * a.y;
    r.m[2][1] = t * a.y * a.z + s * a.x;
    r.m[2][2] = t * a.z * a.z + c;
    return r;
}

/// Max abs entry of R*R^T - I; zero for a perfect rotation.
inline double orthonormality_error(const Mat3& r) {
    Mat3 g = r * r.transposed();
    double e = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) e = std::max(e, std::abs(g.m[i][j] - (i == j ? 1.0 : 0.0)));
    return e;
}

}  // namespace posegen
