#include "candleseg/error.hpp"

namespace candleseg {

const char* to_string(IoErrorKind kind) noexcept {
    switch (kind) {
        case IoErrorKind::file_missing: return "file-missing";
        case IoErrorKind::unsupported_format: return "unsupported-format";
        case IoErrorKind::corrupt_header: return "corrupt-header";
        case IoErrorKind::io_failure: return "io-failure";
    }
    return "unknown";
}

IoError::IoError(IoErrorKind kind, std::filesystem::path path, const std::string& detail)
    : Error(std::string(to_string(kind)) + ": " + path.string() + (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      path_(std::move(path)) {}

}  // namespace candleseg
