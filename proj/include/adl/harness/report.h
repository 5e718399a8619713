#ifndef ADL_HARNESS_REPORT_H_
#define ADL_HARNESS_REPORT_H_

#include <string>
#include <vector>

#include "adl/harness/run_config.h"
#include "adl/learn/trainer.h"

namespace adl::harness {

// One row of an evaluation table: average reward and task success over N
// episodes for one (task, robot, human mode) triple.
struct ReportRow {
  std::string task;
  std::string robot;
  std::string human;
  int episodes = 0;
  double mean_reward = 0.0;
  double std_reward = 0.0;  // population standard deviation
  double success_rate = 0.0;  // in [0, 1]
};

ReportRow make_report_row(const RunConfig& config, const learn::EvalResult& result);

// Comma-separated: task,robot,human,episodes,mean_reward,std_reward,success_pct
// with rewards to 4 decimals and success to 1 decimal; a pure function of
// the row, so re-running an evaluation reproduces the bytes.
std::string report_header();
std::string format_report_row(const ReportRow& row);
std::string format_report(const std::vector<ReportRow>& rows);

}  // namespace adl::harness

#endif  // ADL_HARNESS_REPORT_H_
