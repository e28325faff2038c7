#pragma once

#include <string>
#include <vector>

#include "lookahead/harness.hpp"

namespace lookahead {

/// CSV layout:
///
///   # lookahead <version>
///   # config <compact json>
///   # created <timestamp>
///   # status complete|diverged [iteration]
///   t,f,gap,dir_norm,beta,lr,lyapunov[,x0,x1,...]
///   rows, floats with 17 significant digits, empty field when absent
std::string to_csv(const RunRecord& record);
RunRecord parse_csv(const std::string& text);

std::string to_json(const RunRecord& record);

std::string probe_to_csv(const std::vector<ProbeRow>& rows);
std::string sweep_to_csv(const std::vector<SweepPoint>& points);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace lookahead
