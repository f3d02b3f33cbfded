#pragma once

#include <stdexcept>
#include <string>

namespace elvis {

// All recoverable failures in the pipeline surface as elvis::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the orchestrator when a pipeline stage fails; what() names the stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& detail)
      : Error(stage + ": " + detail), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace elvis
