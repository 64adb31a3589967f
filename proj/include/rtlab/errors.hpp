#pragma once

#include <stdexcept>
#include <string>

namespace rtlab {

// Thrown when an iterative or linear-algebra kernel fails to converge.
// step_index records where in a time march (or sweep) the failure occurred;
// -1 when there is no meaningful step.
class numerical_breakdown : public std::runtime_error {
 public:
  numerical_breakdown(const std::string& what, long step_index = -1)
      : std::runtime_error(what), step_index_(step_index) {}
  long step_index() const noexcept { return step_index_; }

 private:
  long step_index_;
};

}  // namespace rtlab
