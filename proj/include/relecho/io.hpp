#pragma once
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relecho/fidelity.hpp"

// Byte-stable exporters: fixed scientific formatting, '\n' line endings,
// no locale dependence, so identical runs produce identical files.

namespace relecho::io {

std::string format_sci(double v);  // full double precision, %.17e

void write_series_csv(const std::string& path, const FidelitySeries& series);

void write_kv(const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& rows);

void write_text(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace relecho::io
