#ifndef ADL_CORE_TASK_H_
#define ADL_CORE_TASK_H_

#include <array>
#include <string>
#include <string_view>

namespace adl {

enum class Task { kScratchItch, kBedBathing, kFeeding, kDrinking, kDressing, kArmManipulation };

inline constexpr std::array<Task, 6> kAllTasks = {Task::kScratchItch, Task::kBedBathing, Task::kFeeding,
                                                  Task::kDrinking,    Task::kDressing,   Task::kArmManipulation};

// Environment ids: scratch_itch, bed_bathing, feeding, drinking, dressing,
// arm_manipulation.
std::string to_string(Task t);
// Throws ParameterError for unknown ids.
Task task_from_string(std::string_view id);

// The person sits in a wheelchair for these tasks and lies on a bed otherwise.
inline bool is_wheelchair_task(Task t) {
  return t == Task::kScratchItch || t == Task::kFeeding || t == Task::kDrinking || t == Task::kDressing;
}

}  // namespace adl

#endif  // ADL_CORE_TASK_H_
