#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "dys/errors.hpp"

namespace dys {

/// Dense real vector. Sizes are desk-scale (n <= 200), storage is a plain
/// contiguous array of doubles.
class Vec {
public:
  Vec() = default;
  explicit Vec(int n, double fill = 0.0) : data_(static_cast<size_t>(n), fill) {}
  Vec(std::initializer_list<double> xs) : data_(xs) {}

  static Vec zeros(int n) { return Vec(n); }
  static Vec ones(int n) { return Vec(n, 1.0); }
  static Vec unit(int n, int i) {
    Vec e(n);
    e[i] = 1.0;
    return e;
  }

  int size() const { return static_cast<int>(data_.size()); }
  double& operator[](int i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int i) const { return data_[static_cast<size_t>(i)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  Vec& operator+=(const Vec& o) {
    check_same_size(o);
    for (int i = 0; i < size(); ++i) data_[i] += o[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    check_same_size(o);
    for (int i = 0; i < size(); ++i) data_[i] -= o[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
  }

private:
  void check_same_size(const Vec& o) const {
    if (o.size() != size())
      throw DimensionMismatch("vector sizes " + std::to_string(size()) + " vs " +
                              std::to_string(o.size()));
  }
  std::vector<double> data_;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator-(Vec a) { return a *= -1.0; }

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

}  // namespace dys
