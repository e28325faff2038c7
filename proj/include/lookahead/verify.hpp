#pragma once

// Property suites with fixed seeds. Failures are reported, never thrown.

#include <optional>
#include <string>
#include <vector>

namespace lookahead {

enum class Suite { RatesSC, RatesCvx, Reductions, Filters, Lyapunov, NewtonSchulz };

struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool passed = false;
  std::string detail;
};

struct Report {
  Suite suite = Suite::RatesSC;
  std::vector<Check> checks;

  bool passed() const;
};

Report verify(Suite suite);

const std::vector<Suite>& all_suites();
std::string to_string(Suite suite);
/// Accepts the names printed by to_string (rates_sc, rates_cvx, reductions,
/// filters, lyapunov, newton_schulz).
std::optional<Suite> parse_suite(const std::string& name);

/// One line per check: "PASS|FAIL <suite>/<name> measured=<v> bound=<v> [detail]".
std::string format_report(const Report& report);

}  // namespace lookahead
