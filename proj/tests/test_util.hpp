#pragma once

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <string>

#include "depthkit/error.hpp"

// Asserts that `stmt` throws depthkit::Error carrying `expected_code`.
#define EXPECT_THROW_CODE(stmt, expected_code)                                        \
  do {                                                                               \
    bool thrown_ = false;                                                            \
    try {                                                                            \
      (void)(stmt);                                                                  \
    } catch (const ::depthkit::Error& e_) {                                          \
      thrown_ = true;                                                                \
      EXPECT_EQ(e_.code(), (expected_code)) << e_.what();                            \
    }                                                                                \
    EXPECT_TRUE(thrown_) << #stmt " did not throw";                                  \
  } while (0)

namespace depthkit::testing {

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("depthkit_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace depthkit::testing
