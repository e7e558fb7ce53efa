#pragma once

#include <stdexcept>
#include <string>

namespace ntheta {

/// Raised when an operation is called outside its domain. The tag names the
/// violated precondition so the CLI can echo it verbatim.
class PreconditionError : public std::invalid_argument {
public:
  PreconditionError(std::string tag, const std::string& detail)
      : std::invalid_argument(tag + ": " + detail), tag_(std::move(tag)) {}

  const std::string& tag() const noexcept { return tag_; }

private:
  std::string tag_;
};

/// Raised when a checked mathematical identity fails. This is either a bug
/// or a counterexample; callers must never swallow it.
class AssertionFailure : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool condition, const char* tag, const std::string& detail) {
  if (!condition) throw PreconditionError(tag, detail);
}

} // namespace detail
} // namespace ntheta
