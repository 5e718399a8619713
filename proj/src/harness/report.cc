#include "adl/harness/report.h"

#include <cmath>
#include <cstdio>

namespace adl::harness {

ReportRow make_report_row(const RunConfig& config, const learn::EvalResult& result) {
  ReportRow row;
  row.task = config.env;
  row.robot = config.env == kToyEnvId ? "-" : config.robot;
  row.human = envs::to_string(config.human);
  row.episodes = static_cast<int>(result.returns.size());
  if (row.episodes > 0) {
    row.mean_reward = result.mean_return();
    double ss = 0.0;
    for (double r : result.returns) ss += (r - row.mean_reward) * (r - row.mean_reward);
    row.std_reward = std::sqrt(ss / row.episodes);
    row.success_rate = result.success_rate();
  }
  return row;
}

std::string report_header() { return "task,robot,human,episodes,mean_reward,std_reward,success_pct"; }

std::string format_report_row(const ReportRow& row) {
  char numbers[96];
  std::snprintf(numbers, sizeof(numbers), "%d,%.4f,%.4f,%.1f", row.episodes, row.mean_reward, row.std_reward,
                100.0 * row.success_rate);
  return row.task + "," + row.robot + "," + row.human + "," + numbers;
}

std::string format_report(const std::vector<ReportRow>& rows) {
  std::string out = report_header() + "\n";
  for (const ReportRow& r : rows) out += format_report_row(r) + "\n";
  return out;
}

}  // namespace adl::harness
