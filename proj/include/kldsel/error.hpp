#pragma once

#include <stdexcept>
#include <string>

namespace kldsel {

/// Invalid argument to a library call (bad bandwidth, empty sample, index
/// out of range, mismatched partitions, ...).
class ParameterError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of an operation (non-finite kernel
/// argument, non-positive model density, data outside a family's support).
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to produce a usable result.
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace kldsel
