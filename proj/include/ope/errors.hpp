#pragma once

#include <stdexcept>
#include <string>

namespace ope {

struct InvalidMdp : std::runtime_error {
    explicit InvalidMdp(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidPolicy : std::runtime_error {
    explicit InvalidPolicy(const std::string& msg) : std::runtime_error(msg) {}
};

/// Power iteration on the induced chain failed to converge.
struct ErgodicityError : std::runtime_error {
    explicit ErgodicityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Target occupancy puts mass where the data distribution has none.
struct CoverageError : std::runtime_error {
    explicit CoverageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Behavior policy assigns zero probability to an observed action.
struct BehaviorSupportError : std::runtime_error {
    explicit BehaviorSupportError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularMatrix : std::runtime_error {
    explicit SingularMatrix(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyDataset : std::runtime_error {
    explicit EmptyDataset(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateBandwidth : std::runtime_error {
    explicit DegenerateBandwidth(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateNormalization : std::runtime_error {
    explicit DegenerateNormalization(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace ope
