#pragma once

#include <stdexcept>
#include <string>

namespace icmpsift {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// wire model
struct TruncatedMessage : Error {
  using Error::Error;
};

// capture ingest
struct FileUnreadable : Error {
  using Error::Error;
};
struct MalformedCaptureHeader : Error {
  using Error::Error;
};

// detectors
struct NotARedirect : Error {
  using Error::Error;
};
struct NotSourceQuench : Error {
  using Error::Error;
};

// loop detection
struct CycleBudgetExceeded : Error {
  using Error::Error;
};
struct TransportFailure : Error {
  using Error::Error;
};

// config / tables
struct SchemaError : Error {
  using Error::Error;
};
struct DanglingNextHop : Error {
  using Error::Error;
};
struct EmptyTable : Error {
  using Error::Error;
};

}  // namespace icmpsift
