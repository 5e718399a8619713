#include "adl/core/task.h"

#include "adl/core/error.h"

namespace adl {

std::string to_string(Task t) {
  switch (t) {
    case Task::kScratchItch: return "scratch_itch";
    case Task::kBedBathing: return "bed_bathing";
    case Task::kFeeding: return "feeding";
    case Task::kDrinking: return "drinking";
    case Task::kDressing: return "dressing";
    case Task::kArmManipulation: return "arm_manipulation";
  }
  return "scratch_itch";
}

Task task_from_string(std::string_view id) {
  for (Task t : kAllTasks) {
    if (to_string(t) == id) return t;
  }
  throw ParameterError("unknown environment '" + std::string(id) + "'");
}

}  // namespace adl
