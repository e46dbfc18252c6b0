#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace msc {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline const cplx iu{0.0, 1.0};

// Thrown on precondition violations (bad model parameters, grid mismatch, ...).
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical certification step fails hard (e.g. blow-up).
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace msc
