#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sczlab/errors.hpp"

namespace sczlab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 2) throw LabError("least_squares_line: need >= 2 paired samples");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw LabError("least_squares_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

// Fit q ~ C e^{-c A} with the decay rate from least squares on log q
// (clamped to c >= 0) and C as the exact envelope at that rate.
struct DecayFit {
  double c = 0.0;   // decay rate
  double C = 0.0;   // envelope constant: max q e^{c A}
  double r2 = 0.0;  // of the log-linear regression
};

inline DecayFit fit_exponential_decay(const std::vector<double>& A, const std::vector<double>& q) {
  if (A.size() != q.size() || A.size() < 2)
    throw LabError("fit_exponential_decay: need >= 2 paired samples");
  std::vector<double> lq(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] > 0.0)) throw LabError("fit_exponential_decay: sample values must be positive");
    lq[i] = std::log(q[i]);
  }
  const LineFit line = least_squares_line(A, lq);
  DecayFit out;
  out.c = std::max(0.0, -line.slope);
  out.r2 = line.r2;
  double C = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) C = std::max(C, q[i] * std::exp(out.c * A[i]));
  out.C = C;
  return out;
}

// Envelope-only fit at a prescribed rate.
inline double envelope_constant(const std::vector<double>& A, const std::vector<double>& q,
                                double c) {
  double C = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) C = std::max(C, q[i] * std::exp(c * A[i]));
  return C;
}

inline std::vector<double> arithmetic_lattice(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-12; x += step) v.push_back(x);
  return v;
}

inline std::vector<double> geometric_lattice(double lo, double hi, double factor) {
  std::vector<double> v;
  for (double x = lo; x <= hi * (1.0 + 1e-12); x *= factor) v.push_back(std::min(x, hi));
  if (!v.empty() && v.back() < hi) v.push_back(hi);
  return v;
}

// Smallest power of two >= x (as a double), used to round raw constants up.
inline double round_up_pow2(double x) {
  double p = 1.0;
  while (p < x) p *= 2.0;
  while (p / 2.0 >= x && p > 1.0) p /= 2.0;
  return p;
}

}  // namespace sczlab
