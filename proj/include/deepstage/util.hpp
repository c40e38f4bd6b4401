#ifndef DEEPSTAGE_UTIL_HPP_
#define DEEPSTAGE_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace deepstage {

template <typename... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(Args&&... args) {
  throw std::runtime_error(cat(std::forward<Args>(args)...));
}

// FNV-1a, used for technique-tag bucketing and seed-stream derivation.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Writes to "<path>.tmp" then renames, so partial output never lands under
// the final name.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content);

// Runs fn(0..n-1) on up to num_threads workers. Each index must be
// independent; callers that reduce results must merge by index order.
void parallel_for(std::size_t n, int num_threads,
                  const std::function<void(std::size_t)>& fn);

std::string read_file(const std::filesystem::path& path);

}  // namespace deepstage

#endif  // DEEPSTAGE_UTIL_HPP_
