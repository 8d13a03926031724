// tests/test_util.hpp

// Copyright 2026  The anchored-transducer authors

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

#ifndef ANCHORED_TESTS_TEST_UTIL_HPP_
#define ANCHORED_TESTS_TEST_UTIL_HPP_

#include <random>
#include <string>

#include "anchored/numerics/gradcheck.hpp"
#include "anchored/numerics/tensor.hpp"

namespace anchored::testing {

inline Matrix<double> RandomMatrix(std::mt19937_64& rng, Index rows,
                                   Index cols, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix<double> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

inline Tensor<double> RandomTensor(std::mt19937_64& rng, Shape shape,
                                   double scale = 1.0) {
  Matrix<double> m = RandomMatrix(rng, shape.rows(), shape.cols(), scale);
  Tensor<double> t(std::move(shape), std::move(m));
  t.set_requires_grad(true);
  return t;
}

inline std::string Describe(const GradCheckReport& r) {
  std::string s = "max rel err " + std::to_string(r.max_rel_error);
  for (const auto& p : r.params)
    s += "\n  " + p.name + ": " + std::to_string(p.max_rel_error) + " @" +
         std::to_string(p.worst_index) + " analytic " +
         std::to_string(p.analytic_at_worst) + " numeric " +
         std::to_string(p.numeric_at_worst);
  if (!r.message.empty()) s += "\n  " + r.message;
  return s;
}

}  // namespace anchored::testing

#endif  // ANCHORED_TESTS_TEST_UTIL_HPP_
