#pragma once

#include <stdexcept>
#include <string>

namespace ordwalk {

/// Base of every error raised by the library. Carries the module and the
/// operation that failed so the CLI can report them in structured form.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, std::string module, std::string op, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)), module_(std::move(module)),
        op_(std::move(op)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& op() const noexcept { return op_; }

 private:
  std::string kind_;
  std::string module_;
  std::string op_;
};

#define ORDWALK_DEFINE_ERROR(Name)                                                   \
  class Name : public Error {                                                        \
   public:                                                                           \
    Name(std::string module, std::string op, const std::string& what)                \
        : Error(#Name, std::move(module), std::move(op), what) {}                    \
  };

ORDWALK_DEFINE_ERROR(DomainError)
ORDWALK_DEFINE_ERROR(PreconditionError)
ORDWALK_DEFINE_ERROR(NonStabilized)
ORDWALK_DEFINE_ERROR(TailDominates)
ORDWALK_DEFINE_ERROR(DegenerateWeights)
ORDWALK_DEFINE_ERROR(ResamplingDegenerate)
ORDWALK_DEFINE_ERROR(StepSizeUnderflow)
ORDWALK_DEFINE_ERROR(DenominatorVanishes)
ORDWALK_DEFINE_ERROR(RejectionStarved)
ORDWALK_DEFINE_ERROR(ConfigError)

#undef ORDWALK_DEFINE_ERROR

}  // namespace ordwalk
