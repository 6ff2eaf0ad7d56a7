#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace folsynth {

// Parse failures carry a kind so callers (scoring, extraction) can bucket them.
enum class ParseErrorKind {
  Syntax,        // tokenization / balance / shape failure
  Arity,         // wrong argument count for a predicate or connective
  FreeVariable,  // free variables of the whole formula != {x}
  Shadowing,     // quantifier rebinds a name already in scope (x is always in scope)
  UnknownSymbol, // head or variable outside the fixed signature
};

class ParseError : public std::runtime_error {
public:
  ParseError(ParseErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ParseErrorKind kind() const { return kind_; }

private:
  ParseErrorKind kind_;
};

// Unary balance window unreachable within the retry budget.
class SamplingExhausted : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Instance construction ran out of retries; carries a histogram of which
// filter (or phase) rejected each attempt so selection effects stay visible.
class GenerationExhausted : public std::runtime_error {
public:
  GenerationExhausted(const std::string& what, std::map<std::string, int> failures)
      : std::runtime_error(what), failure_counts(std::move(failures)) {}
  std::map<std::string, int> failure_counts;
};

// Satisfiability budget (conflicts or wall clock) exceeded. Never to be
// conflated with UNSAT.
class ResourceLimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InsufficientPool : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class AdapterProtocolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace folsynth
