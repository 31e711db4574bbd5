#pragma once

#include <cmath>

#include "dys/errors.hpp"

namespace dys {

/// Extended real in R union {+inf}. The infinite case is a flag, not a
/// floating Inf, so it never enters arithmetic.
class ExtReal {
public:
  ExtReal() : val_(0.0), finite_(true) {}
  ExtReal(double v) : val_(v), finite_(true) {
    if (!std::isfinite(v)) throw NonFiniteValue("ExtReal from non-finite double");
  }
  static ExtReal infinity() {
    ExtReal r;
    r.finite_ = false;
    return r;
  }

  bool finite() const { return finite_; }
  double value() const {
    if (!finite_) throw NonFiniteValue("value() on infinite ExtReal");
    return val_;
  }

  ExtReal operator+(const ExtReal& o) const {
    if (!finite_ || !o.finite_) return infinity();
    return ExtReal(val_ + o.val_);
  }

  // Comparisons treat the infinite value as larger than every finite one.
  bool operator<=(const ExtReal& o) const {
    if (!finite_) return !o.finite_;
    if (!o.finite_) return true;
    return val_ <= o.val_;
  }
  bool operator<(const ExtReal& o) const {
    if (!finite_) return false;
    if (!o.finite_) return true;
    return val_ < o.val_;
  }

private:
  double val_;
  bool finite_;
};

}  // namespace dys
