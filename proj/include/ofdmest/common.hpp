// SPDX-License-Identifier: Apache-2.0
//
// ofdmest -- shared aliases and error types.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofdmest {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// Thrown by Hermitian solves when the matrix is singular or nearly so.
class IllConditionedError : public std::runtime_error {
public:
    explicit IllConditionedError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by the zero-forcing equalizer when |H_e(k)| falls below the guard
// threshold on an active carrier. Deliberately not clamped.
class NearZeroChannelError : public std::runtime_error {
public:
    explicit NearZeroChannelError(const std::string& what) : std::runtime_error(what) {}
};

// Config-file or flag errors; carries the offending line (0 = not from a file).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace ofdmest
