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

#include <filesystem>
#include <memory>

#include <spdlog/spdlog.h>

namespace qoc {

/// Library logger "qoc". Until configured it writes warnings and above to
/// stderr.
spdlog::logger& logger();

/// Routes the library logger to `file` (appending) and, optionally, to stderr
/// at `console_level`. Lines are "[timestamp] [level] message".
void configure_logging(const std::filesystem::path& file,
                       spdlog::level::level_enum console_level = spdlog::level::info);

/// Restores the default stderr-only logger.
void reset_logging(spdlog::level::level_enum console_level = spdlog::level::warn);

}  // namespace qoc
