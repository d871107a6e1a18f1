#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "weyl/errors.hpp"
#include "weyl/util.hpp"

namespace weyl {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_int(std::int64_t v) { return std::to_string(v); }

// CSV with a comment header block: tool version, config hash, seed, and the
// identifier of the estimate being tested.
class CsvWriter {
 public:
  CsvWriter(std::string estimate, std::uint64_t config_hash, std::uint64_t seed,
            std::vector<std::string> columns, std::string schema = "1")
      : columns_(std::move(columns)) {
    char hash_buf[24];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(config_hash));
    buf_ << "# tool_version=" << kToolVersion << "\n";
    buf_ << "# schema=weyl.report/" << schema << "\n";
    buf_ << "# estimate=" << estimate << "\n";
    buf_ << "# config_hash=" << hash_buf << "\n";
    buf_ << "# seed=" << seed << "\n";
    for (size_t i = 0; i < columns_.size(); ++i)
      buf_ << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
      throw InvariantViolationError("csv row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i)
      buf_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  }

  std::string str() const { return buf_.str(); }

  // Atomic write: temp file in the target directory, then rename.
  void write(const std::filesystem::path& path) const {
    namespace fs = std::filesystem;
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot open " + tmp.string());
      out << buf_.str();
    }
    fs::rename(tmp, path);
  }

 private:
  std::vector<std::string> columns_;
  std::ostringstream buf_;
};

inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  namespace fs = std::filesystem;
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

}  // namespace weyl
