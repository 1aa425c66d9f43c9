#pragma once

#include <stdexcept>
#include <string>

namespace fbpool {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexError : Error {
    using Error::Error;
};
struct AlignmentError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct NumericError : Error {
    using Error::Error;
};
struct SingularityError : Error {
    using Error::Error;
};

struct PreconditionError : Error {
    PreconditionError(const std::string& what, double measured_excess)
        : Error(what), excess(measured_excess) {}
    double excess;
};

struct SolverStallError : Error {
    SolverStallError(const std::string& what, double eps, int iterations, double e_start,
                     double e_end)
        : Error(what), eps(eps), iterations(iterations), energy_start(e_start), energy_end(e_end) {}
    double eps;
    int iterations;
    double energy_start;
    double energy_end;
};

}  // namespace fbpool
