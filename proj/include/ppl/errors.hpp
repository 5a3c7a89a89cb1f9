#pragma once

#include <stdexcept>
#include <string>

namespace ppl {

// Exit-code contract shared by the CLI: 0 success, 1 check failure,
// 2 usage, 3 capacity/IO.
enum class exit_code : int { ok = 0, check_failed = 1, usage = 2, capacity = 3 };

// k = 0 for the singular series, degenerate R, and similar inputs outside
// a function's mathematical domain.
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A requested index or cutoff exceeds the table it reads from.
class range_error : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

// Allocation would exceed the configured memory budget.
class capacity_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Oracle routines refuse inputs above their documented scale cap.
class scale_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class usage_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ppl
