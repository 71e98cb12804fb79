#include "wpcn/simkit.hpp"

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wpcn::sim {

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (cell.empty() || end != begin + cell.size())
    throw std::invalid_argument("parse_csv: line " + std::to_string(line_no) + ": bad number '" + cell + "'");
  return v;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_csv(const SweepResult& result) {
  for (const auto& s : result.series) {
    if (s.values.size() != result.axis_values.size())
      throw std::invalid_argument("to_csv: series " + s.name + " does not match the axis length");
    if (s.name.find_first_of(",\n") != std::string::npos)
      throw std::invalid_argument("to_csv: series name contains a separator: " + s.name);
  }
  char head[96];
  std::snprintf(head, sizeof head, "# seed=%" PRIu64 " config_hash=%016" PRIx64 " trials=%d\n", result.seed,
                result.config_hash, result.trials);
  std::string out = head;
  out += result.axis_name;
  for (const auto& s : result.series) out += "," + s.name;
  out += "\n";
  for (std::size_t i = 0; i < result.axis_values.size(); ++i) {
    out += full(result.axis_values[i]);
    for (const auto& s : result.series) out += "," + full(s.values[i]);
    out += "\n";
  }
  return out;
}

SweepResult parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  SweepResult r;

  if (!std::getline(in, line)) throw std::invalid_argument("parse_csv: empty input");
  char hash_hex[17] = {};
  int consumed = 0;
  if (std::sscanf(line.c_str(), "# seed=%" SCNu64 " config_hash=%16[0-9a-f] trials=%d%n", &r.seed, hash_hex,
                  &r.trials, &consumed) != 3 ||
      static_cast<std::size_t>(consumed) != line.size() || std::strlen(hash_hex) != 16)
    throw std::invalid_argument("parse_csv: malformed metadata line: " + line);
  r.config_hash = std::strtoull(hash_hex, nullptr, 16);

  if (!std::getline(in, line)) throw std::invalid_argument("parse_csv: missing header line");
  const std::vector<std::string> names = split(line);
  r.axis_name = names.front();
  for (std::size_t i = 1; i < names.size(); ++i) r.series.push_back({names[i], {}});

  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != names.size())
      throw std::invalid_argument("parse_csv: line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " + std::to_string(names.size()));
    r.axis_values.push_back(parse_number(cells[0], line_no));
    for (std::size_t i = 1; i < cells.size(); ++i) r.series[i - 1].values.push_back(parse_number(cells[i], line_no));
  }
  return r;
}

void emit(const SweepResult& result, const std::string& path) {
  const std::string text = to_csv(result);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit: cannot open " + path + ": " + std::strerror(errno));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw std::runtime_error("emit: write to " + path + " failed");
}

}  // namespace wpcn::sim
