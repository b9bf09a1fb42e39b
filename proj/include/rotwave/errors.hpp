#pragma once

#include <stdexcept>
#include <string>

namespace rotwave {

/// Base class for domain errors raised by this library.  Precondition
/// violations on plain arguments throw std::invalid_argument instead.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// The weight threshold was not reached before the hard angular-momentum cap.
class truncation_error : public error {
public:
  truncation_error(double captured, int cap)
      : error("truncation cap I=" + std::to_string(cap) +
              " reached with captured weight " + std::to_string(captured)),
        captured_weight(captured),
        i_cap(cap) {}
  double captured_weight;
  int i_cap;
};

/// A tabulated energy model has no level for a needed I.
class missing_level_error : public error {
public:
  explicit missing_level_error(int i_missing)
      : error("no energy level tabulated for I=" + std::to_string(i_missing)),
        i(i_missing) {}
  int i;
};

/// |E''| vanishes at the requested point; no revival period exists.
class degenerate_spectrum_error : public error {
public:
  using error::error;
};

/// An operation that is exact only for one model family got another.
class unsupported_model_error : public error {
public:
  using error::error;
};

/// Two expansions that must share truncation and frame do not.
class invalid_pair_error : public error {
public:
  using error::error;
};

/// A grid kind was requested for a state lacking the required symmetry.
class symmetry_violation_error : public error {
public:
  using error::error;
};

/// A text input does not follow one of the repo file formats.
class format_error : public error {
public:
  using error::error;
};

/// An amplitude set carries no weight at all.
class empty_packet_error : public error {
public:
  using error::error;
};

/// Too few data points for the requested fit.
class insufficient_data_error : public error {
public:
  using error::error;
};

/// Filesystem-level failure (unreadable/unwritable path).
class io_error : public error {
public:
  using error::error;
};

}  // namespace rotwave
