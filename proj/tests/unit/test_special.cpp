// Copyright 2026  The lddisc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <doctest.h>

#include "lddisc/rng.hpp"
#include "lddisc/special.hpp"

using namespace lddisc;

namespace {

struct Reference {
  double x, digamma, trigamma;
};

// mpmath at 30 digits.
const Reference kReference[] = {
    {1e-6, -1000000.5772140199687, 1000000000001.6449317},
    {0.01, -100.5608854578686745, 10001.62121352831322},
    {0.5, -1.9635100260214234794, 4.9348022005446793094},
    {1.0, -0.57721566490153286061, 1.6449340668482264365},
    {1.5, 0.036489973978576520559, 0.93480220054467930942},
    {3.7, 1.1671535393615113859, 0.3100378576700383191},
    {10.0, 2.2517525890667211076, 0.10516633568168574612},
    {123.456, 4.8118293238289853873, 0.0081329458342781980101},
    {1e6, 13.815510057964190771, 1.0000005000001666667e-6},
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("digamma and trigamma match high-precision references") {
  for (const auto &r : kReference) {
    CAPTURE(r.x);
    CHECK(rel(digamma(r.x), r.digamma) < 1e-13);
    CHECK(std::abs(trigamma(r.x) - r.trigamma) / r.trigamma < 1e-13);
  }
}

TEST_CASE("digamma and trigamma agree with boost over a log grid") {
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    double x = std::exp(-12.0 + 26.0 * rng.uniform());
    CAPTURE(x);
    CHECK(rel(digamma(x), boost::math::digamma(x)) < 1e-12);
    CHECK(std::abs(trigamma(x) - boost::math::trigamma(x)) / boost::math::trigamma(x) < 1e-12);
  }
}

TEST_CASE("digamma recurrence") {
  for (double x : {0.3, 1.7, 8.25, 40.0}) CHECK(digamma(x + 1.0) - digamma(x) == doctest::Approx(1.0 / x).epsilon(1e-13));
}

TEST_CASE("log_gamma small integers") {
  CHECK(log_gamma(1.0) == 0.0);
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-15));
}

TEST_CASE("log_sum_exp is stable") {
  std::vector<double> v{-1000.0, -1000.0};
  CHECK(log_sum_exp(v) == doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-15));
  std::vector<double> big{800.0, 0.0};
  CHECK(log_sum_exp(big) == doctest::Approx(800.0));
  std::vector<double> ninf{-std::numeric_limits<double>::infinity(), 0.0};
  CHECK(log_sum_exp(ninf) == 0.0);
}
