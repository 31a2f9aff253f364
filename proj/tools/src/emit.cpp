#include "poscomp/cli/emit.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace poscomp::cli {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

namespace {

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& cells, const std::string& sep,
                 bool escape) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += sep;
    out += escape ? csv_escape(cells[i]) : cells[i];
  }
  return out;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  out_ = join(header, ",", true) + "\n";
}

void CsvWriter::row(std::vector<std::string> cells) {
  if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
  out_ += join(cells, ",", true) + "\n";
}

std::string jsonl(const std::vector<nlohmann::json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

MarkdownTable::MarkdownTable(std::vector<std::string> header) {
  out_ = "| " + join(header, " | ", false) + " |\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out_ += "---|";
  out_ += "\n";
}

void MarkdownTable::row(std::vector<std::string> cells) {
  out_ += "| " + join(cells, " | ", false) + " |\n";
}

FileSet filter_formats(const FileSet& files, const std::vector<std::string>& formats) {
  FileSet out;
  for (const auto& [name, body] : files) {
    const auto dot = name.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : name.substr(dot + 1);
    if (ext == "json" || std::find(formats.begin(), formats.end(), ext) != formats.end()) {
      out.emplace(name, body);
    }
  }
  return out;
}

void write_files(const std::string& dir, const FileSet& files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, body] : files) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
  }
}

}  // namespace poscomp::cli
