#ifndef DRRBDO_TESTS_TEST_PATHS_HPP
#define DRRBDO_TESTS_TEST_PATHS_HPP

#include <filesystem>
#include <string>

namespace test_paths {

inline std::filesystem::path problem(const std::string& name) {
  return std::filesystem::path(DRRBDO_PROBLEM_DIR) / name;
}

}  // namespace test_paths

#endif  // DRRBDO_TESTS_TEST_PATHS_HPP
