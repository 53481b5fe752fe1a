#pragma once

#include "vsd/types.hpp"

#include <string>
#include <vector>

namespace vsd::csv {

// 17 significant digits, enough for an exact double round trip.
std::string format(double v);

struct Table {
  std::string config;  // emitted as "# config: <config>" when non-empty
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string str() const;
};

void write(const std::string& path, const Table& table);
Table read(const std::string& path);

// Sample matrices use columns x0, x1, ...
Table samples_table(const Samples& s, const std::string& config);
Samples to_samples(const Table& t);

// Reads the embedded config of a file written by `write`, or "" if absent.
std::string embedded_config(const std::string& path);

}  // namespace vsd::csv
