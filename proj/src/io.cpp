#include "edgewise/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "edgewise/errors.hpp"

namespace edgewise {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fmt_num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv_rows(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << fmt_num(r[i]);
    out << '\n';
  }
}

std::vector<std::vector<double>> read_csv_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      auto b = cell.find_first_not_of(" \t");
      auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos) { numeric = false; break; }
      cell = cell.substr(b, e - b + 1);
      double v = 0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) { numeric = false; break; }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header line
      throw ConfigError("non-numeric row in " + path + ": " + line);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace edgewise
