// Copyright 2026 The qoctk Authors
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

#include <chrono>

namespace qoc {

/// Source of elapsed run time. Time limits and periodic drift compensation
/// read it; simulated runs substitute a ManualClock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double elapsed_minutes() const = 0;
};

class SteadyClock final : public Clock {
 public:
  SteadyClock() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_minutes() const override {
    return std::chrono::duration<double, std::ratio<60>>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

class ManualClock final : public Clock {
 public:
  double elapsed_minutes() const override { return minutes_; }
  void advance_minutes(double m) { minutes_ += m; }
  void advance_seconds(double s) { minutes_ += s / 60.0; }

 private:
  double minutes_ = 0.0;
};

}  // namespace qoc
