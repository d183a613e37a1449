// Copyright 2026 The ppdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference computations used as independent oracles by the tests. Nothing
// here calls into the library.

#ifndef PPDL_TESTS_ORACLES_H_
#define PPDL_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace ppdl::oracle {

inline double Phi(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double NormalPdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

// Composite Simpson rule on [lo, hi] with `intervals` (even) panels.
inline double Simpson(const std::function<double(double)>& f, double lo,
                      double hi, int intervals) {
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * h);
  }
  return sum * h / 3.0;
}

// Half the L1 distance between two densities, integrated on a fine grid
// that splits at every crossing so the kinks of |p - q| fall on panel edges.
inline double GridTv(const std::function<double(double)>& p,
                     const std::function<double(double)>& q, double lo,
                     double hi, int cells = 200000) {
  const double h = (hi - lo) / cells;
  std::vector<double> edges{lo};
  double prev = p(lo) - q(lo);
  for (int i = 1; i <= cells; ++i) {
    const double x = lo + i * h;
    const double cur = p(x) - q(x);
    if ((prev > 0) != (cur > 0) && prev != 0.0) {
      double a = x - h, b = x, fa = prev;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = p(mid) - q(mid);
        if ((fm > 0) == (fa > 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      edges.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  edges.push_back(hi);
  auto diff = [&](double x) { return std::abs(p(x) - q(x)); };
  double total = 0.0;
  for (size_t e = 0; e + 1 < edges.size(); ++e) {
    const int panels =
        std::max(2, 2 * static_cast<int>((edges[e + 1] - edges[e]) / h / 2));
    total += Simpson(diff, edges[e], edges[e + 1], panels);
  }
  return 0.5 * total;
}

inline double GridTvGaussian(double m1, double s1, double m2, double s2) {
  const double lo = std::min(m1 - 14 * s1, m2 - 14 * s2);
  const double hi = std::max(m1 + 14 * s1, m2 + 14 * s2);
  return GridTv([&](double x) { return NormalPdf(x, m1, s1); },
                [&](double x) { return NormalPdf(x, m2, s2); }, lo, hi);
}

inline double HalfL1(const std::vector<double>& a,
                     const std::vector<double>& b) {
  double total = 0.0;
  for (size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return 0.5 * total;
}

// Ordinary least-squares slope of y on x.
inline double Slope(const std::vector<double>& x,
                    const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// n choose k as a double.
inline double Choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace ppdl::oracle

#endif  // PPDL_TESTS_ORACLES_H_
