#include "cdlab/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cdlab {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_csv_row(const CheckReport& r) {
  std::ostringstream os;
  os << r.name << ',' << r.anchor << ',' << g17(r.t) << ',' << g17(r.lhs)
     << ',' << g17(r.rhs) << ',' << g17(r.margin) << ',' << g17(r.tolerance)
     << ',';
  if (!r.conclusive) os << "inconclusive";
  else os << (r.pass ? '1' : '0');
  return os.str();
}

void write_csv(const std::string& path, const std::vector<CheckReport>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_csv: cannot open " + path);
  out << "name,anchor,t,lhs,rhs,margin,tol,pass\n";
  for (const CheckReport& r : rows) out << to_csv_row(r) << '\n';
}

CsvSummary summarize(const std::vector<CheckReport>& rows) {
  CsvSummary s;
  for (const CheckReport& r : rows) {
    ++s.total;
    if (!r.conclusive) ++s.inconclusive;
    else if (r.pass) ++s.passed;
    else ++s.failed;
  }
  return s;
}

CsvSummary read_csv_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_csv_summary: cannot open " + path);
  CsvSummary s;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) continue;
    const std::string flag = line.substr(comma + 1);
    ++s.total;
    if (flag == "1") ++s.passed;
    else if (flag == "inconclusive") ++s.inconclusive;
    else ++s.failed;
  }
  return s;
}

void write_summary(const std::string& path, const CsvSummary& s,
                   const std::vector<std::pair<std::string, std::string>>&
                       calibration) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_summary: cannot open " + path);
  out << "total = " << s.total << "\n";
  out << "passed = " << s.passed << "\n";
  out << "failed = " << s.failed << "\n";
  out << "inconclusive = " << s.inconclusive << "\n";
  for (const auto& [k, v] : calibration) out << k << " = " << v << "\n";
}

void write_plan_csv(const std::string& path, const TransportPlan& plan) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_plan_csv: cannot open " + path);
  out << "i,j,mass\n";
  for (int i = 0; i < plan.coupling.rows(); ++i)
    for (int j = 0; j < plan.coupling.cols(); ++j)
      if (plan.coupling(i, j) > 0.0)
        out << i << ',' << j << ',' << g17(plan.coupling(i, j)) << '\n';
}

}  // namespace cdlab
