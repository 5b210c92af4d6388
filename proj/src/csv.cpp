#include "adq/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "adq/error.hpp"

namespace adq {

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot rename onto " + path);
  }
}

}  // namespace adq
