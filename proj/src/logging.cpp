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

#include "qoc/logging.hpp"

#include <mutex>

#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_color_sinks.h>

namespace qoc {

namespace {

constexpr const char* kPattern = "[%Y-%m-%d %H:%M:%S.%e] [%l] %v";

std::mutex& guard() {
  static std::mutex m;
  return m;
}

std::shared_ptr<spdlog::logger>& slot() {
  static std::shared_ptr<spdlog::logger> l;
  return l;
}

std::shared_ptr<spdlog::logger> make_console(spdlog::level::level_enum level) {
  auto sink = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
  sink->set_level(level);
  auto l = std::make_shared<spdlog::logger>("qoc", sink);
  l->set_pattern(kPattern);
  l->set_level(spdlog::level::trace);
  return l;
}

}  // namespace

spdlog::logger& logger() {
  std::lock_guard lock(guard());
  if (!slot()) slot() = make_console(spdlog::level::warn);
  return *slot();
}

void configure_logging(const std::filesystem::path& file, spdlog::level::level_enum console_level) {
  auto file_sink = std::make_shared<spdlog::sinks::basic_file_sink_mt>(file.string(), false);
  file_sink->set_level(spdlog::level::debug);
  auto console = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
  console->set_level(console_level);
  auto l = std::make_shared<spdlog::logger>("qoc", spdlog::sinks_init_list{file_sink, console});
  l->set_pattern(kPattern);
  l->set_level(spdlog::level::debug);
  l->flush_on(spdlog::level::info);
  std::lock_guard lock(guard());
  slot() = l;
}

void reset_logging(spdlog::level::level_enum console_level) {
  auto l = make_console(console_level);
  std::lock_guard lock(guard());
  if (slot()) slot()->flush();
  slot() = l;
}

}  // namespace qoc
