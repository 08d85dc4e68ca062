#ifndef BIFURC_ERRORS_HPP
#define BIFURC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bifurc {

// Base class for everything the engine throws on purpose.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape or size disagreement between tensors/layers/maps.
class dimension_error : public error {
public:
    using error::error;
};

// Malformed file content (PNM, IDX, model container).
class format_error : public error {
public:
    using error::error;
};

// Operation invoked in a state that does not support it
// (backward without a forward cache, inference on an untrained model).
class state_error : public error {
public:
    using error::error;
};

// Dataset-level problems: empty class, missing pairs, empty directory.
class data_error : public error {
public:
    using error::error;
};

// Invalid configuration values (non-positive lr, class-count mismatch).
class config_error : public error {
public:
    using error::error;
};

// Non-finite values where finite ones are required (NaN loss).
class numeric_error : public error {
public:
    using error::error;
};

// Out-of-range index (class label, tensor axis).
class index_error : public error {
public:
    using error::error;
};

} // namespace bifurc

#endif
