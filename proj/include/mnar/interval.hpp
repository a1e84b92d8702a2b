#pragma once

#include <map>
#include <string>

namespace mnar {

enum class Method { base, stratified, shadow, set_expansion, ate, ate_shadow };

const char* method_name(Method m);

// Closed interval [lo, hi] with a method tag and free-form numeric diagnostics.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  Method method = Method::base;
  std::map<std::string, double> meta;

  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

}  // namespace mnar
