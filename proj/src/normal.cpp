#include "mnar/normal.hpp"

#include <cmath>

namespace mnar::stats {

double erf_approx(double x) {
  if (x == 0.0) return 0.0;  // the polynomial leaves a 1e-9 defect at zero
  double sign = x < 0 ? -1.0 : 1.0;
  double ax = std::fabs(x);
  double t = 1.0 / (1.0 + 0.3275911 * ax);
  double poly = t * (0.254829592 +
                     t * (-0.284496736 +
                          t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
  return sign * (1.0 - poly * std::exp(-ax * ax));
}

double norm_pdf(double z) {
  return 0.3989422804014327 * std::exp(-0.5 * z * z);
}

double norm_cdf(double z) {
  return 0.5 * (1.0 + erf_approx(z * 0.7071067811865476));
}

double mills_ratio(double z) {
  if (z < -6.0) {
    double z2 = z * z;
    double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -z / series;
  }
  double cdf = norm_cdf(z);
  if (cdf < 1e-300) cdf = 1e-300;
  return norm_pdf(z) / cdf;
}

}  // namespace mnar::stats
