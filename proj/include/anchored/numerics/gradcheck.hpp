// numerics/gradcheck.hpp

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

#ifndef ANCHORED_NUMERICS_GRADCHECK_HPP_
#define ANCHORED_NUMERICS_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "anchored/numerics/tape.hpp"

namespace anchored {

template <typename Scalar>
using LossBuilder = std::function<Var<Scalar>(Tape<Scalar>&)>;

template <typename Scalar>
using NamedParams = std::vector<std::pair<std::string, Tensor<Scalar>*>>;

struct GradCheckOptions {
  double step = 1e-6;
  double tolerance = 1e-6;
  /// Magnitudes below this are compared absolutely rather than relatively.
  double abs_floor = 1e-3;
  /// 0 checks every element; otherwise an evenly strided subset per tensor.
  Index max_elements_per_param = 0;
};

struct ParamGradError {
  std::string name;
  Index checked = 0;
  Index worst_index = -1;
  double max_rel_error = 0.0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

struct GradCheckReport {
  bool finite = true;
  std::string message;
  std::vector<ParamGradError> params;
  double max_rel_error = 0.0;
  bool passed = false;
};

/// Compares reverse-mode gradients of `build` against central differences.
/// `build` must be deterministic; it is re-run twice per checked element on a
/// gradient-free tape.
template <typename Scalar>
GradCheckReport FiniteDifferenceCheck(const LossBuilder<Scalar>& build,
                                      const NamedParams<Scalar>& params,
                                      const GradCheckOptions& opts = {}) {
  GradCheckReport report;
  for (auto& [name, p] : params) {
    p->ZeroGrad();
    p->set_requires_grad(true);
  }

  auto eval = [&build]() {
    Tape<Scalar> tape(GradMode::kDisabled);
    return static_cast<double>(build(tape).item());
  };

  {
    Tape<Scalar> tape;
    Var<Scalar> root = build(tape);
    if (!std::isfinite(static_cast<double>(root.item()))) {
      report.finite = false;
      report.message = "loss is not finite; check aborted";
      return report;
    }
    tape.Backward(root);
  }

  for (auto& [name, p] : params) {
    ParamGradError err;
    err.name = name;
    Matrix<Scalar> analytic = p->has_grad()
                                  ? p->grad()
                                  : Matrix<Scalar>::Zero(p->data().rows(),
                                                         p->data().cols());
    const Index n = p->data().size();
    const Index stride =
        opts.max_elements_per_param > 0
            ? std::max<Index>(1, n / opts.max_elements_per_param)
            : 1;
    for (Index k = 0; k < n; k += stride) {
      Scalar& x = p->data().data()[k];
      const Scalar saved = x;
      x = saved + static_cast<Scalar>(opts.step);
      const double up = eval();
      x = saved - static_cast<Scalar>(opts.step);
      const double down = eval();
      x = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        report.finite = false;
        report.message = "non-finite loss while perturbing " + name;
        return report;
      }
      const double numeric = (up - down) / (2.0 * opts.step);
      const double a = static_cast<double>(analytic.data()[k]);
      const double denom =
          std::max({std::abs(a), std::abs(numeric), opts.abs_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++err.checked;
      if (rel > err.max_rel_error || err.worst_index < 0) {
        err.max_rel_error = rel;
        err.worst_index = k;
        err.analytic_at_worst = a;
        err.numeric_at_worst = numeric;
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, err.max_rel_error);
    report.params.push_back(std::move(err));
  }
  report.passed = report.max_rel_error < opts.tolerance;
  return report;
}

}  // namespace anchored

#endif  // ANCHORED_NUMERICS_GRADCHECK_HPP_
