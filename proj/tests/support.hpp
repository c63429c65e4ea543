#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "domainkit/common/error.hpp"

namespace testing {

inline std::filesystem::path fixtures() { return DOMAINKIT_FIXTURES; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("domainkit-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
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

template <typename Fn>
domainkit::ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const domainkit::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a domainkit::Error");
}

}  // namespace testing
