#pragma once

#include <string>
#include <vector>

#include "cdlab/check.hpp"
#include "cdlab/transport.hpp"

namespace cdlab {

/// CSV row format: name,anchor,t,lhs,rhs,margin,tol,pass with doubles in
/// %.17g; the pass column is 1, 0 or "inconclusive".
std::string to_csv_row(const CheckReport& r);
void write_csv(const std::string& path, const std::vector<CheckReport>& rows);

struct CsvSummary {
  int total = 0;
  int passed = 0;
  int failed = 0;
  int inconclusive = 0;
};

CsvSummary summarize(const std::vector<CheckReport>& rows);
CsvSummary read_csv_summary(const std::string& path);

void write_summary(const std::string& path, const CsvSummary& s,
                   const std::vector<std::pair<std::string, std::string>>&
                       calibration);

void write_plan_csv(const std::string& path, const TransportPlan& plan);

}  // namespace cdlab
