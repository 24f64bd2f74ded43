#pragma once

#include <array>
#include <cmath>

namespace pechaos {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { double n = norm(v); return {v.x / n, v.y / n, v.z / n}; }

/// Row-major 3x3 matrix; just enough linear algebra for the cocycle bookkeeping.
struct Mat3 {
  std::array<double, 9> a{};

  static Mat3 identity() {
    Mat3 m;
    m.a = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    return m;
  }
  static Mat3 zero() { return Mat3{}; }

  double& operator()(int r, int c) { return a[3 * r + c]; }
  double operator()(int r, int c) const { return a[3 * r + c]; }

  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = a[i] + o.a[i];
    return r;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = a[i] - o.a[i];
    return r;
  }
  Mat3 operator*(double s) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = a[i] * s;
    return r;
  }
  Mat3& operator+=(const Mat3& o) {
    for (int i = 0; i < 9; ++i) a[i] += o.a[i];
    return *this;
  }
};

inline Mat3 operator*(double s, const Mat3& m) { return m * s; }

inline Mat3 matmul(const Mat3& A, const Mat3& B) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += A(i, k) * B(k, j);
      r(i, j) = s;
    }
  return r;
}

inline Vec3 matvec(const Mat3& A, const Vec3& v) {
  return {A(0, 0) * v.x + A(0, 1) * v.y + A(0, 2) * v.z,
          A(1, 0) * v.x + A(1, 1) * v.y + A(1, 2) * v.z,
          A(2, 0) * v.x + A(2, 1) * v.y + A(2, 2) * v.z};
}

inline Vec3 matTvec(const Mat3& A, const Vec3& v) {
  return {A(0, 0) * v.x + A(1, 0) * v.y + A(2, 0) * v.z,
          A(0, 1) * v.x + A(1, 1) * v.y + A(2, 1) * v.z,
          A(0, 2) * v.x + A(1, 2) * v.y + A(2, 2) * v.z};
}

/// A^T * B without forming the transpose.
inline Mat3 matTmul(const Mat3& A, const Mat3& B) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += A(k, i) * B(k, j);
      r(i, j) = s;
    }
  return r;
}

inline Mat3 transpose(const Mat3& A) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = A(j, i);
  return r;
}

inline double det(const Mat3& A) {
  return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
         A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
         A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
}

inline double frobenius_norm(const Mat3& A) {
  double s = 0.0;
  for (double v : A.a) s += v * v;
  return std::sqrt(s);
}

inline double max_abs(const Mat3& A) {
  double m = 0.0;
  for (double v : A.a) m = std::max(m, std::abs(v));
  return m;
}

/// Modified Gram-Schmidt QR with the sign convention R(i,i) > 0.
/// Returns Q in place of the columns of `A`; diag holds the R diagonal.
struct QRResult {
  Mat3 Q;
  std::array<double, 3> r_diag;
};

inline QRResult qr_positive(const Mat3& A) {
  QRResult out;
  std::array<Vec3, 3> col;
  for (int j = 0; j < 3; ++j) col[j] = {A(0, j), A(1, j), A(2, j)};
  std::array<Vec3, 3> q;
  for (int j = 0; j < 3; ++j) {
    Vec3 v = col[j];
    for (int i = 0; i < j; ++i) v = v - dot(col[j], q[i]) * q[i];
    double r = norm(v);
    out.r_diag[j] = r;
    q[j] = (r > 0.0) ? v * (1.0 / r) : Vec3{0, 0, 0};
  }
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) out.Q(i, j) = q[j][i];
  return out;
}

inline double top_singular_value(const Mat3& A) {
  // Power iteration on A^T A; plenty for 3x3 diagnostics.
  Vec3 v{1.0, 0.7, 0.4};
  v = normalized(v);
  for (int it = 0; it < 200; ++it) {
    Vec3 w = matTvec(A, matvec(A, v));
    double n = norm(w);
    if (n == 0.0) return 0.0;
    v = w * (1.0 / n);
  }
  return norm(matvec(A, v));
}

}  // namespace pechaos
