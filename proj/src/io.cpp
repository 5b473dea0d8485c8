#include "relecho/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace relecho::io {

std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17e", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_series_csv(const std::string& path, const FidelitySeries& series) {
  std::ostringstream out;
  out << "t,re_f,im_f,F,method\n";
  const char* name = method_name(series.method);
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    out << format_sci(series.t[k]) << ',' << format_sci(series.f[k].real())
        << ',' << format_sci(series.f[k].imag()) << ','
        << format_sci(series.F[k]) << ',' << name << '\n';
  }
  write_text(path, out.str());
}

void write_kv(const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ostringstream out;
  for (const auto& [k, v] : rows) out << k << " = " << v << '\n';
  write_text(path, out.str());
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace relecho::io
