#include "lookahead/record_io.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lookahead {

namespace {

const char* const kColumns[] = {"t", "f", "gap", "dir_norm", "beta", "lr", "lyapunov"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ConfigError("csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

std::optional<double> parse_optional(const std::string& s, std::size_t line_no) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, line_no);
}

bool take_prefix(const std::string& line, const std::string& prefix, std::string& rest) {
  if (line.rfind(prefix, 0) != 0) return false;
  rest = line.substr(prefix.size());
  return true;
}

std::string header_line(std::size_t width) {
  std::string h;
  for (const char* c : kColumns) h += std::string(h.empty() ? "" : ",") + c;
  for (std::size_t i = 0; i < width; ++i) h += ",x" + std::to_string(i);
  return h;
}

}  // namespace

std::string to_csv(const RunRecord& r) {
  std::string out;
  out += "# lookahead " + r.version + "\n";
  out += "# config " + r.config_json + "\n";
  out += "# created " + r.created + "\n";
  out += "# status " + to_string(r.status);
  if (r.diverged_at) out += " " + std::to_string(*r.diverged_at);
  out += "\n";
  out += header_line(r.iterate_width) + "\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.t) + "," + fmt(row.f) + "," + fmt(row.gap) + "," + fmt(row.dir_norm) + "," +
           fmt(row.beta) + "," + fmt(row.lr) + "," + fmt(row.lyapunov);
    for (double v : row.iterate) out += "," + fmt(v);
    out += "\n";
  }
  return out;
}

RunRecord parse_csv(const std::string& text) {
  RunRecord r;
  std::istringstream in(text);
  std::string line, rest;
  std::size_t line_no = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw ConfigError(std::string("csv: missing ") + what);
    ++line_no;
  };

  next("version line");
  if (!take_prefix(line, "# lookahead ", r.version)) throw ConfigError("csv: expected '# lookahead <version>'");
  next("config line");
  if (!take_prefix(line, "# config ", r.config_json)) throw ConfigError("csv: expected '# config <json>'");
  next("created line");
  if (!take_prefix(line, "# created ", r.created)) throw ConfigError("csv: expected '# created <timestamp>'");
  next("status line");
  if (!take_prefix(line, "# status ", rest)) throw ConfigError("csv: expected '# status ...'");
  const auto status = split(rest, ' ');
  if (status.empty() || (status[0] != "complete" && status[0] != "diverged"))
    throw ConfigError("csv: unknown status '" + rest + "'");
  r.status = status[0] == "complete" ? RunStatus::Complete : RunStatus::Diverged;
  if (status.size() > 1) r.diverged_at = std::stoll(status[1]);

  next("header");
  const auto columns = split(line, ',');
  const std::size_t base = std::size(kColumns);
  if (columns.size() < base) throw ConfigError("csv: short header");
  r.iterate_width = columns.size() - base;
  if (line != header_line(r.iterate_width)) throw ConfigError("csv: unexpected header '" + line + "'");

  while (std::getline(in, line)) {
    ++line_no;
    const auto f = split(line, ',');
    if (f.size() != columns.size())
      throw ConfigError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(columns.size()) +
                        " fields");
    RunRow row;
    row.t = std::stoll(f[0]);
    row.f = parse_double(f[1], line_no);
    row.gap = parse_optional(f[2], line_no);
    row.dir_norm = parse_optional(f[3], line_no);
    row.beta = parse_optional(f[4], line_no);
    row.lr = parse_optional(f[5], line_no);
    row.lyapunov = parse_optional(f[6], line_no);
    for (std::size_t i = base; i < f.size(); ++i) row.iterate.push_back(parse_double(f[i], line_no));
    r.rows.push_back(std::move(row));
  }
  return r;
}

std::string to_json(const RunRecord& r) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j = {{"t", row.t},           {"f", row.f},   {"gap", opt(row.gap)},         {"dir_norm", opt(row.dir_norm)},
              {"beta", opt(row.beta)}, {"lr", opt(row.lr)}, {"lyapunov", opt(row.lyapunov)}};
    if (!row.iterate.empty()) j["iterate"] = row.iterate;
    rows.push_back(std::move(j));
  }
  json out = {{"version", r.version},
              {"created", r.created},
              {"status", to_string(r.status)},
              {"diverged_at", r.diverged_at ? json(*r.diverged_at) : json(nullptr)},
              {"config", json::parse(r.config_json)},
              {"rows", rows}};
  return out.dump(2) + "\n";
}

std::string probe_to_csv(const std::vector<ProbeRow>& rows) {
  std::string out = "t,beta,f_along_delta,f_along_m\n";
  for (const auto& r : rows)
    out += std::to_string(r.t) + "," + fmt(r.beta) + "," + fmt(r.f_along_delta) + "," + fmt(r.f_along_m) + "\n";
  return out;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
  std::string out = "gamma,beta_max,seed,status,final_t,final_f,final_gap,min_f\n";
  for (const auto& p : points) {
    const auto& rows = p.record.rows;
    out += fmt(p.gamma) + "," + fmt(p.beta_max) + "," + std::to_string(p.seed) + "," + to_string(p.record.status);
    if (rows.empty()) {
      out += ",,,,\n";
      continue;
    }
    double best = rows.front().f;
    for (const auto& r : rows) best = std::min(best, r.f);
    out += "," + std::to_string(rows.back().t) + "," + fmt(rows.back().f) + "," + fmt(rows.back().gap) + "," +
           fmt(best) + "\n";
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lookahead
