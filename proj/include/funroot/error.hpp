#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace funroot {

/// Broad failure classes. The CLI maps these onto exit codes 1, 2 and 3.
enum class ErrorCategory { usage, data, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string kind, const std::string& what)
        : std::runtime_error(what), category_(category), kind_(std::move(kind)) {}

    ErrorCategory category() const noexcept { return category_; }
    /// Stable machine-readable tag, e.g. "domain_mismatch".
    const std::string& kind() const noexcept { return kind_; }

private:
    ErrorCategory category_;
    std::string kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what)
        : Error(ErrorCategory::usage, "invalid_argument", what) {}
};

class DomainMismatch : public Error {
public:
    explicit DomainMismatch(const std::string& what)
        : Error(ErrorCategory::data, "domain_mismatch", what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what)
        : Error(ErrorCategory::data, "data_error", what) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what)
        : Error(ErrorCategory::data, "precondition_failed", what) {}
};

class UnsupportedAdjoint : public Error {
public:
    explicit UnsupportedAdjoint(const std::string& what)
        : Error(ErrorCategory::usage, "unsupported_adjoint", what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what)
        : Error(ErrorCategory::numerical, "numerical_failure", what) {}

protected:
    NumericalError(std::string kind, const std::string& what)
        : Error(ErrorCategory::numerical, std::move(kind), what) {}
};

class SingularDesign : public NumericalError {
public:
    explicit SingularDesign(const std::string& what)
        : NumericalError("singular_design", what) {}
};

/// Simulation produced a non-finite value.
class DivergenceError : public NumericalError {
public:
    DivergenceError(std::size_t index, const std::string& what)
        : NumericalError("divergence", what), index_(index) {}
    /// First time index (counting burn-in steps from 1) with a non-finite frame.
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Eigenvalue 1 has geometric multiplicity below its algebraic multiplicity.
class DefectiveUnitRoot : public NumericalError {
public:
    DefectiveUnitRoot(std::size_t algebraic, std::size_t geometric, const std::string& what)
        : NumericalError("defective_unit_root", what), algebraic_(algebraic), geometric_(geometric) {}
    bool multiplicity_flag() const noexcept { return true; }
    std::size_t algebraic() const noexcept { return algebraic_; }
    std::size_t geometric() const noexcept { return geometric_; }

private:
    std::size_t algebraic_;
    std::size_t geometric_;
};

}  // namespace funroot
