#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "dyngraph/config.h"

DYNGRAPH_BEGIN_NAMESPACE

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PoolExhausted : public Error {
 public:
  PoolExhausted(std::string pool, std::size_t requested, std::size_t remaining);
  const std::string& pool() const { return pool_; }
  std::size_t requested() const { return requested_; }
  std::size_t remaining() const { return remaining_; }

 private:
  std::string pool_;
  std::size_t requested_;
  std::size_t remaining_;
};

class CallbackError : public Error {
 public:
  CallbackError(std::size_t datum, const std::string& what);
  std::size_t datum() const { return datum_; }

 private:
  std::size_t datum_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

#define DYNGRAPH_DEFINE_ERROR(Name)  \
  class Name : public Error {        \
   public:                           \
    using Error::Error;              \
  }

DYNGRAPH_DEFINE_ERROR(AllocationFailed);
DYNGRAPH_DEFINE_ERROR(IndexOutOfBounds);
DYNGRAPH_DEFINE_ERROR(BadShape);
DYNGRAPH_DEFINE_ERROR(LengthMismatch);
DYNGRAPH_DEFINE_ERROR(StaleExpression);
DYNGRAPH_DEFINE_ERROR(ShapeError);
DYNGRAPH_DEFINE_ERROR(NonScalarLoss);
DYNGRAPH_DEFINE_ERROR(EmptyBatch);
DYNGRAPH_DEFINE_ERROR(EmptyList);
DYNGRAPH_DEFINE_ERROR(DuplicateName);
DYNGRAPH_DEFINE_ERROR(FileError);
DYNGRAPH_DEFINE_ERROR(FormatError);
DYNGRAPH_DEFINE_ERROR(RosterMismatch);
DYNGRAPH_DEFINE_ERROR(UnknownWord);
DYNGRAPH_DEFINE_ERROR(ConfigError);

#undef DYNGRAPH_DEFINE_ERROR

DYNGRAPH_END_NAMESPACE
