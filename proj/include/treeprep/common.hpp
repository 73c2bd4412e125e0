// Copyright 2026 The treeprep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace treeprep {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Raised when a run configuration is invalid (CLI maps this to exit code 2).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a request exceeds the dense-simulation capacity limit
/// (CLI maps this to exit code 3).
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) {
        w += kTwoPi;
    }
    // fmod can land exactly on 2*pi after the correction above.
    if (w >= kTwoPi) {
        w -= kTwoPi;
    }
    return w;
}

}  // namespace treeprep
