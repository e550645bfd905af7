#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ibflow {

class InvalidGeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class SurfaceQualityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CompatibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-criterion elimination counts gathered while filtering a stencil.
struct StencilDiagnostics {
    int candidates = 0;
    int removed_owner = 0;
    int removed_solid = 0;
    int removed_distance = 0;
    int removed_fov = 0;
    int removed_cap = 0;
    int kept = 0;
};

class StencilStarvationError : public std::runtime_error {
public:
    StencilStarvationError(const std::string& what, StencilDiagnostics d)
        : std::runtime_error(what), diagnostics(d) {}
    StencilDiagnostics diagnostics;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

struct ValidationIssue {
    std::string path;
    std::string message;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<ValidationIssue> list)
        : std::runtime_error(format(list)), issues(std::move(list)) {}
    std::vector<ValidationIssue> issues;

private:
    static std::string format(const std::vector<ValidationIssue>& list) {
        std::string s = "configuration invalid:";
        for (const auto& i : list) {
            s += "\n  " + i.path + ": " + i.message;
        }
        return s;
    }
};

} // namespace ibflow
