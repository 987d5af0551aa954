#pragma once

#include <stdexcept>
#include <string>

// Error taxonomy shared by all modules. Domain errors derive from
// graphflow::Error so the CLI can map them to exit code 1 uniformly.

namespace graphflow {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -- chain loading / validation ------------------------------------------
struct SchemaError : Error {
    using Error::Error;
};
struct NotStochastic : Error {
    using Error::Error;
};
struct NotIrreducible : Error {
    using Error::Error;
};
struct NotReversible : Error {
    using Error::Error;
};
struct BadReference : Error {
    using Error::Error;
};

// -- pointwise numerics ----------------------------------------------------
struct DomainError : Error {
    using Error::Error;
};

// -- elliptic solves -------------------------------------------------------
struct NotInterior : Error {
    using Error::Error;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct NotSolvable : Error {
    using Error::Error;
};

// -- trajectories / solvers -------------------------------------------------
struct InvalidTrajectory : Error {
    using Error::Error;
};
struct MassMismatch : Error {
    using Error::Error;
};
struct NotConverged : Error {
    using Error::Error;
};
struct ShootingFailed : Error {
    using Error::Error;
};
struct BoundaryContact : Error {
    using Error::Error;
};
struct BoundaryStart : Error {
    using Error::Error;
};
struct NoPotentials : Error {
    using Error::Error;
};

// -- i/o ---------------------------------------------------------------------
struct IoError : Error {
    using Error::Error;
};

}  // namespace graphflow
