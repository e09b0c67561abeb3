// SPDX-License-Identifier: Apache-2.0
//
// mmwgen - generative millimeter wave channel models
// Copyright (C) 2026 The mmwgen authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMWGEN_TESTS_FINITE_DIFF_HPP
#define MMWGEN_TESTS_FINITE_DIFF_HPP

// Central-difference gradient oracle. Deliberately knows nothing about the
// backward pass: it perturbs one scalar at a time and re-evaluates the loss.

#include <algorithm>
#include <cmath>
#include <functional>

namespace mmwgen::testing {

inline double central_difference(double& param, const std::function<double()>& loss, double h = 1e-5) {
  const double saved = param;
  param = saved + h;
  const double up = loss();
  param = saved - h;
  const double down = loss();
  param = saved;
  return (up - down) / (2.0 * h);
}

// |a - n| / max(|a|, |n|, floor); the floor keeps near-zero gradients from
// turning roundoff into a relative error (roundoff ~ eps * |loss| / h).
inline double gradient_relative_error(double analytic, double numeric, double loss_magnitude) {
  const double floor = 1e-6 * std::max(1.0, std::abs(loss_magnitude));
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

}  // namespace mmwgen::testing

#endif
