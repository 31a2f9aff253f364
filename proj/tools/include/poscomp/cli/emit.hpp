#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace poscomp::cli {

// Output file name -> contents. Ordered so iteration is deterministic.
using FileSet = std::map<std::string, std::string>;

// Fixed-point text with `decimals` digits; "-0.000" is normalized to "0.000".
std::string fixed(double v, int decimals);
inline std::string util4(double v) { return fixed(v, 4); }
inline std::string hours3(double v) { return fixed(v, 3); }

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(std::vector<std::string> cells);
  std::string str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

std::string jsonl(const std::vector<nlohmann::json>& records);

class MarkdownTable {
 public:
  explicit MarkdownTable(std::vector<std::string> header);
  void row(std::vector<std::string> cells);
  std::string str() const { return out_; }

 private:
  std::string out_;
};

// Keeps files whose extension is in `formats` (csv, jsonl, md); .json
// files (summaries, config echo) are always kept.
FileSet filter_formats(const FileSet& files, const std::vector<std::string>& formats);

void write_files(const std::string& dir, const FileSet& files);

}  // namespace poscomp::cli
