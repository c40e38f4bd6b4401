#include "deepstage/util.hpp"

#include <fstream>
#include <thread>
#include <vector>

namespace deepstage {

void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot open for writing: ", tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail("write failed: ", tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void parallel_for(std::size_t n, int num_threads,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, num_threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open: ", path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace deepstage
