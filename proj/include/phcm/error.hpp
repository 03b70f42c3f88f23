#pragma once

#include <stdexcept>
#include <string>

namespace phcm {

// Precondition or computation failure inside a library operation.
class Error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

// Malformed run configuration (CLI exit code 1).
class ConfigError : public Error
{
public:
	using Error::Error;
};

} // namespace phcm
