#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

PoolExhausted::PoolExhausted(std::string pool, std::size_t requested, std::size_t remaining)
    : Error("pool '" + pool + "' exhausted: requested " + std::to_string(requested) +
            " bytes, " + std::to_string(remaining) +
            " remaining; rerun with a larger --mem"),
      pool_(std::move(pool)),
      requested_(requested),
      remaining_(remaining) {}

CallbackError::CallbackError(std::size_t datum, const std::string& what)
    : Error("loss callback failed on datum " + std::to_string(datum) + ": " + what), datum_(datum) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

DYNGRAPH_END_NAMESPACE
