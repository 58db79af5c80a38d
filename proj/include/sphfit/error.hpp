#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sphfit {

/// Base exception. `code` is a stable machine-readable identifier, `module`
/// names the subsystem that raised it and `context` carries free-form detail
/// (a JSON fragment or a short key=value list).
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string module, const std::string& message,
        std::string context = {})
      : std::runtime_error(message),
        code_(std::move(code)),
        module_(std::move(module)),
        context_(std::move(context)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& context() const noexcept { return context_; }

  /// Numerical failures (as opposed to bad input) map to CLI exit code 2.
  virtual bool numerical() const noexcept { return false; }

 private:
  std::string code_;
  std::string module_;
  std::string context_;
};

class InvalidArgument : public Error {
 public:
  InvalidArgument(const std::string& module, const std::string& message,
                  std::string context = {})
      : Error("InvalidArgument", module, message, std::move(context)) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& module, const std::string& message)
      : Error("DimensionMismatch", module, message) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& message, std::string context = {})
      : Error("IoError", "io", message, std::move(context)) {}
};

/// Raised when no nonnegative weight vector reproduces the moments of
/// spherical polynomials up to the requested degree on the given nodes.
class NoPositiveRule : public Error {
 public:
  NoPositiveRule(double residual, int degree, std::size_t nodes)
      : Error("NoPositiveRule", "quadrature",
              "no positive quadrature rule of degree " +
                  std::to_string(degree) + " on " + std::to_string(nodes) +
                  " nodes (residual " + std::to_string(residual) + ")",
              "{\"residual\":" + std::to_string(residual) +
                  ",\"degree\":" + std::to_string(degree) +
                  ",\"nodes\":" + std::to_string(nodes) + "}"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }
  bool numerical() const noexcept override { return true; }

 private:
  double residual_;
};

class SolveFailure : public Error {
 public:
  SolveFailure(const std::string& module, const std::string& message)
      : Error("SolveFailure", module, message) {}
  bool numerical() const noexcept override { return true; }
};

/// One or more servers failed to produce a local estimator.
class ShardFailure : public Error {
 public:
  ShardFailure(std::vector<int> server_ids, const std::string& message)
      : Error("ShardFailure", "distributed", message, ids_json(server_ids)),
        server_ids_(std::move(server_ids)) {}

  const std::vector<int>& server_ids() const noexcept { return server_ids_; }
  bool numerical() const noexcept override { return true; }

 private:
  static std::string ids_json(const std::vector<int>& ids) {
    std::string s = "{\"failed_servers\":[";
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(ids[i]);
    }
    return s + "]}";
  }
  std::vector<int> server_ids_;
};

}  // namespace sphfit
