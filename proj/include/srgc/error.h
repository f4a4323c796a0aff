#ifndef SRGC_ERROR_H_
#define SRGC_ERROR_H_

#include <stdexcept>
#include <string>

namespace srgc {

// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kInvalidArgument,  // bad parameters supplied by the caller
  kData,             // malformed or inconsistent input data / streams
  kInternal,         // numerical failure or broken invariant
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error InvalidArgument(const std::string& what) {
  return Error(ErrorKind::kInvalidArgument, what);
}
inline Error DataError(const std::string& what) {
  return Error(ErrorKind::kData, what);
}
inline Error InternalError(const std::string& what) {
  return Error(ErrorKind::kInternal, what);
}

}  // namespace srgc

#endif  // SRGC_ERROR_H_
