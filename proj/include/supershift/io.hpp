#pragma once

// Result files: CSV (17 significant digits, LF), gnuplot blocks and JSON
// manifests, all written through a temporary file and an atomic rename.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include "json.hpp"
#include "supershift/evolve.hpp"

namespace supershift::io {

/// Shortest-safe rendering with 17 significant digits, independent of the
/// C++ locale.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string());
}

inline std::string wavefield_csv(const WaveField& f) {
  std::string s = "t,x,re_psi,im_psi,abs_psi,quad_err\n";
  for (std::size_t i = 0; i < f.ts.size(); ++i)
    for (std::size_t j = 0; j < f.xs.size(); ++j) {
      const cplx v = f.at(i, j);
      s += fmt(f.ts[i]) + ',' + fmt(f.xs[j]) + ',' + fmt(v.real()) + ',' + fmt(v.imag()) + ',' +
           fmt(std::abs(v)) + ',' + fmt(f.quad_errors[f.index(i, j)]) + '\n';
    }
  return s;
}

/// One whitespace-separated block per t-slice, blocks separated by two blank
/// lines (gnuplot `index`).
inline std::string wavefield_gnuplot(const WaveField& f) {
  std::string s = "# potential: " + f.potential + "\n# initial: " + f.initial +
                  "\n# columns: x re_psi im_psi abs_psi quad_err\n";
  for (std::size_t i = 0; i < f.ts.size(); ++i) {
    if (i) s += "\n\n";
    s += "# t = " + fmt(f.ts[i]) + '\n';
    for (std::size_t j = 0; j < f.xs.size(); ++j) {
      const cplx v = f.at(i, j);
      s += fmt(f.xs[j]) + ' ' + fmt(v.real()) + ' ' + fmt(v.imag()) + ' ' + fmt(std::abs(v)) +
           ' ' + fmt(f.quad_errors[f.index(i, j)]) + '\n';
    }
  }
  return s;
}

inline std::string supershift_csv(const SupershiftReport& r) {
  std::string s = "n,d_n,metric,ratio,split_discrepancy\n";
  for (std::size_t i = 0; i < r.ns.size(); ++i)
    s += std::to_string(r.ns[i]) + ',' + fmt(r.distance[i]) + ',' + fmt(r.metric[i]) + ',' +
         fmt(r.distance[i] / r.metric[i]) + ',' + fmt(r.split_discrepancy[i]) + '\n';
  return s;
}

/// 64-bit FNV-1a, used to fingerprint the resolved configuration.
inline std::string digest(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Manifest; the timestamp is the only non-deterministic entry and sits on
/// its own line.
inline nlohmann::json manifest(const WaveField& f, const nlohmann::json& config) {
  nlohmann::json j;
  j["potential"] = f.potential;
  j["initial"] = f.initial;
  j["grid"] = {{"t", f.ts}, {"x", f.xs}};
  j["tol"] = f.tol;
  j["failures"] = f.failures;
  j["config"] = config;
  j["config_digest"] = digest(config.dump());
  j["created_utc"] = utc_timestamp();
  return j;
}

}  // namespace supershift::io
