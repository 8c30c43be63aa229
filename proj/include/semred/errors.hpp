#pragma once

#include <stdexcept>
#include <string>

namespace semred {

/** Base class of every error thrown by this library. */
class Error : public std::runtime_error
{
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/** Malformed grammar file: bad JSON, duplicate or undefined rules, ... */
class GrammarError : public Error
{
 public:
  using Error::Error;
};

/** Unexpected character while tokenizing. */
class LexError : public Error
{
 public:
  LexError(const std::string& msg, int line, int column)
      : Error(msg), line(line), column(column)
  {
  }
  int line;
  int column;
};

/** Input does not match the grammar; position is a token index. */
class ParseError : public Error
{
 public:
  ParseError(const std::string& msg, int position)
      : Error(msg), position(position)
  {
  }
  int position;
};

/** Unknown, dead or non-removable node handed to a tree operation. */
class NodeError : public Error
{
 public:
  using Error::Error;
};

/** Oracle could not be run, or rejected the initial input. */
class OracleError : public Error
{
 public:
  using Error::Error;
};

/** Model training, loading or prediction failure (shape or hash mismatch). */
class ModelError : public Error
{
 public:
  using Error::Error;
};

/** Dataset file is inconsistent (mixed modes, bad labels, ...). */
class DatasetError : public Error
{
 public:
  using Error::Error;
};

/** Metric computed from records that lack a required field. */
class MetricError : public Error
{
 public:
  using Error::Error;
};

}  // namespace semred
