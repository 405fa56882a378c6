#pragma once

#include <stdexcept>
#include <string>

namespace actembed {

// Error categories double as process exit codes (config 2, data 3, numeric 4).
enum class ErrorKind { Config = 2, Data = 3, Numeric = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};
struct DataError : Error {
    explicit DataError(const std::string& w) : Error(ErrorKind::Data, w) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& w) : Error(ErrorKind::Numeric, w) {}
};

// config
struct UnknownKey : ConfigError { using ConfigError::ConfigError; };
struct ConfigTypeError : ConfigError { using ConfigError::ConfigError; };
struct MissingRequired : ConfigError { using ConfigError::ConfigError; };
struct InvalidConfig : ConfigError { using ConfigError::ConfigError; };
struct InvalidWeights : ConfigError { using ConfigError::ConfigError; };
struct InvalidShape : ConfigError { using ConfigError::ConfigError; };

// data
struct MalformedRow : DataError { using DataError::DataError; };
struct MissingColumn : DataError { using DataError::DataError; };
struct EmptyFile : DataError { using DataError::DataError; };
struct EmptyDirectory : DataError { using DataError::DataError; };
struct AllMissingChannel : DataError { using DataError::DataError; };
struct EmptySeries : DataError { using DataError::DataError; };
struct EmptySegment : DataError { using DataError::DataError; };
struct EmptySubset : DataError { using DataError::DataError; };
struct DimMismatch : DataError { using DataError::DataError; };
struct EmptyBatch : DataError { using DataError::DataError; };
struct TooFewDistinctPoints : DataError { using DataError::DataError; };
struct EmptyInput : DataError { using DataError::DataError; };
struct LengthMismatch : DataError { using DataError::DataError; };
struct TooFewSamples : DataError { using DataError::DataError; };
struct DatasetTooSmall : DataError { using DataError::DataError; };
struct TooFewSessions : DataError { using DataError::DataError; };
struct EmptyReport : DataError { using DataError::DataError; };
struct IoError : DataError { using DataError::DataError; };

// numeric
struct Diverged : NumericError { using NumericError::NumericError; };
struct ConvergenceFailure : NumericError { using NumericError::NumericError; };

// A module error re-thrown with (fold, method, k) context; keeps the
// original category so exit codes stay correct.
class AnnotatedError : public Error {
public:
    AnnotatedError(const Error& cause, const std::string& context)
        : Error(cause.kind(), context + ": " + cause.what()) {}
};

}  // namespace actembed
