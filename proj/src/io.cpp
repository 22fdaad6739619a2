#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include <unistd.h>

#include "kreinlab/error.hpp"
#include "kreinlab/experiments.hpp"

namespace kreinlab::experiments {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string spectrum_csv(const std::vector<double>& s) {
  std::string out = "j,s_j\n";
  out.reserve(out.size() + s.size() * 32);
  for (std::size_t j = 1; j <= s.size(); ++j) {
    out += std::to_string(j);
    out += ',';
    out += g17(s[j - 1]);
    out += '\n';
  }
  return out;
}

std::string plot_csv(const std::vector<double>& s, double p) {
  std::string out = "j,s_j,s_j_jp\n";
  for (std::size_t j = 1; j <= s.size(); ++j) {
    out += std::to_string(j) + ',' + g17(s[j - 1]) + ',' +
           g17(s[j - 1] * std::pow(static_cast<double>(j), p)) + '\n';
  }
  return out;
}

std::vector<double> read_spectrum_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spectrum file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("j,s_j", 0) != 0) {
    throw ConfigError(path.string() + ": expected header 'j,s_j'");
  }
  std::vector<double> s;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string jcol, scol;
    if (!std::getline(row, jcol, ',') || !std::getline(row, scol, ',')) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    try {
      if (std::stoul(jcol) != s.size() + 1) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": j out of sequence");
      }
      const double v = std::stod(scol);
      if (!std::isfinite(v) || v < 0.0) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": invalid s_j");
      }
      s.push_back(v);
    } catch (const std::logic_error&) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  for (std::size_t j = 1; j < s.size(); ++j) {
    if (s[j] > s[j - 1]) throw ConfigError(path.string() + ": spectrum is not descending");
  }
  return s;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::string>{}(path.string()) & 0xffff);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace kreinlab::experiments
