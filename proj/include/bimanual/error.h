#ifndef BIMANUAL_ERROR_H_
#define BIMANUAL_ERROR_H_

#include <stdexcept>
#include <string>

namespace bimanual {

enum class ErrorKind {
  kIo,            // file missing, unreadable, unwritable
  kSchema,        // malformed manifest / config / PLY
  kInvalidInput,  // contract violation on otherwise well-formed input
  kDegenerate,    // the data cannot determine the unknowns
  kNumerical,     // non-finite values during solving
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bimanual

#endif  // BIMANUAL_ERROR_H_
