//
//  errors.hpp — ruc
//
//  Exception taxonomy shared by all modules.
//

#ifndef RUC_ERRORS_HPP
#define RUC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ruc {

// Malformed input document (not parseable at all).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally parseable but violates the instance schema.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Bad argument to an operation (epsilon >= 1, probabilities off, ...).
struct ValidationError : std::invalid_argument {
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Model construction problems (duplicate variable name, bad row).
struct ModelError : std::logic_error {
  explicit ModelError(const std::string& what) : std::logic_error(what) {}
};

// Solver backend failures (backend unavailable, solution fails re-check).
struct SolveError : std::runtime_error {
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

// Policy evaluation / extraction failures.
struct PolicyError : std::runtime_error {
  explicit PolicyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ruc

#endif
