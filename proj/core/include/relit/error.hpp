// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace relit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Image/patch/map dimensions do not satisfy an operation's requirements.
class SizingError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Bad palette file, unknown map color, or out-of-range label.
class MaterialError : public Error {
public:
    using Error::Error;
};

/// Iterative solver failed to reach the requested residual.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double relative_residual, int iterations)
        : Error(what), relative_residual_(relative_residual), iterations_(iterations) {}

    double relative_residual() const noexcept { return relative_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double relative_residual_;
    int iterations_;
};

/// An error from a pipeline stage, labeled with the stage name.
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& what)
        : Error("stage '" + stage + "': " + what), stage_(stage) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace relit
