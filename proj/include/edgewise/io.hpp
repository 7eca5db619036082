#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edgewise {

// 17 significant digits, '.' decimal point, locale independent.
std::string fmt_num(double v);

// Writes rows with LF endings; fails with ConfigError if the file cannot be opened.
void write_csv_rows(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);

std::vector<std::vector<double>> read_csv_numbers(const std::string& path);

// 64-bit FNV-1a, stable across platforms; used for config hashes and cache keys.
std::uint64_t fnv1a(const std::string& s);

}  // namespace edgewise
