#pragma once

#include <mutex>

namespace invasion {

// FFTW's planner is not re-entrant; every plan creation and destruction in
// the library takes this lock.
std::mutex& planner_mutex();

}  // namespace invasion
