#pragma once

namespace mnar::stats {

// Polynomial erf approximation, absolute error below 1.5e-7.
double erf_approx(double x);

double norm_pdf(double z);
double norm_cdf(double z);

// Inverse Mills ratio phi(z) / Phi(z); switches to an asymptotic expansion
// for z < -6 where pdf and cdf both underflow toward 0/0.
double mills_ratio(double z);

}  // namespace mnar::stats
