// Copyright 2026 The ragcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Fixture builders shared by the unit tests.

#ifndef RAGCAL_TESTS_TEST_UTIL_H_
#define RAGCAL_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <string>
#include <vector>

#include "fmt/format.h"
#include "gtest/gtest.h"
#include "items.h"

namespace ragcal::testing {

// Fresh, empty scratch directory under the test temp dir.
inline std::string ScratchDir(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "ragcal_tests" /
      fmt::format("{}.{}.{}", info->test_suite_name(), info->name(), name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline std::string DataPath(const std::string& name) {
  return std::string(RAGCAL_TEST_DATA_DIR) + "/" + name;
}

}  // namespace ragcal::testing

#endif  // RAGCAL_TESTS_TEST_UTIL_H_
