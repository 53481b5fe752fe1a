#include "vsd/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace vsd::csv {

namespace {
constexpr const char* kConfigPrefix = "# config: ";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}
}  // namespace

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw InvalidArgument("csv row width does not match header");
  rows.push_back(std::move(row));
}

std::string Table::str() const {
  std::string out;
  if (!config.empty()) out += kConfigPrefix + config + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void write(const std::string& path, const Table& table) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  const std::string s = table.str();
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!f) throw IoError("failed writing " + path);
}

Table read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(f, line)) {
    if (line.rfind(kConfigPrefix, 0) == 0) {
      t.config = line.substr(std::string(kConfigPrefix).size());
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      t.header = split(line);
      have_header = true;
    } else {
      auto cells = split(line);
      if (cells.size() != t.header.size()) throw IoError("ragged csv row in " + path);
      t.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw IoError("csv has no header: " + path);
  return t;
}

Table samples_table(const Samples& s, const std::string& config) {
  Table t;
  t.config = config;
  for (Eigen::Index j = 0; j < s.cols(); ++j) t.header.push_back("x" + std::to_string(j));
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < s.cols(); ++j) row.push_back(format(s(i, j)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Samples to_samples(const Table& t) {
  Samples s(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      try {
        s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::stod(t.rows[i][j]);
      } catch (const std::logic_error&) {
        throw IoError("non-numeric csv cell '" + t.rows[i][j] + "'");
      }
    }
  return s;
}

std::string embedded_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::string line;
  while (std::getline(f, line))
    if (line.rfind(kConfigPrefix, 0) == 0) return line.substr(std::string(kConfigPrefix).size());
  return "";
}

}  // namespace vsd::csv
