// Copyright 2026 The Spectroscope Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace spectroscope {

/// Adaptive integration gave up: the step size fell below the representable
/// minimum before the requested tolerance could be met.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double time, double achieved_error)
      : std::runtime_error(what + " (t=" + std::to_string(time) +
                           ", achieved error=" + std::to_string(achieved_error) + ")"),
        time_(time),
        achieved_error_(achieved_error) {}

  double time() const noexcept { return time_; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double time_;
  double achieved_error_;
};

/// A perturbative denominator of the form +-eps_q + g + k*omega (or a pole of
/// the inverse-channel sums) sits too close to zero for the closed forms.
/// qubit() is 0 for the two-qubit denominators eps1 +- eps2 + k*omega.
class ResonanceError : public std::runtime_error {
 public:
  ResonanceError(int qubit, int sign, int k, double denominator)
      : std::runtime_error("resonant denominator: qubit=" + std::to_string(qubit) +
                           " sign=" + (sign > 0 ? std::string("+") : std::string("-")) +
                           " k=" + std::to_string(k) +
                           " value=" + std::to_string(denominator)),
        qubit_(qubit),
        sign_(sign),
        k_(k),
        denominator_(denominator) {}

  int qubit() const noexcept { return qubit_; }
  int sign() const noexcept { return sign_; }
  int k() const noexcept { return k_; }
  double denominator() const noexcept { return denominator_; }

 private:
  int qubit_;
  int sign_;
  int k_;
  double denominator_;
};

/// Two routes to the same quantity disagree beyond their contract.
class ConsistencyError : public std::runtime_error {
 public:
  ConsistencyError(const std::string& what, double discrepancy)
      : std::runtime_error(what + " (discrepancy=" + std::to_string(discrepancy) + ")"),
        discrepancy_(discrepancy) {}

  double discrepancy() const noexcept { return discrepancy_; }

 private:
  double discrepancy_;
};

/// Density matrix lost positivity beyond the abort threshold.
class PositivityError : public std::runtime_error {
 public:
  PositivityError(double min_eigenvalue, double time)
      : std::runtime_error("density matrix lost positivity: min eigenvalue " +
                           std::to_string(min_eigenvalue) + " at t=" + std::to_string(time)),
        min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

}  // namespace spectroscope
