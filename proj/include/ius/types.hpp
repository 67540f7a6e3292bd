#pragma once

// Shared value types and error taxonomy for the initial uplink
// synchronization (IUS) library.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ius {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// Column-major complex matrix. Kept deliberately minimal; heavy linear
// algebra goes through Eigen maps over the same storage.
struct CMat {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> data;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}

    cplx& operator()(int r, int c) { return data[static_cast<size_t>(c) * rows + r]; }
    const cplx& operator()(int r, int c) const { return data[static_cast<size_t>(c) * rows + r]; }

    cplx* col(int c) { return data.data() + static_cast<size_t>(c) * rows; }
    const cplx* col(int c) const { return data.data() + static_cast<size_t>(c) * rows; }
};

inline double col_norm(const CMat& m, int c) {
    double s = 0.0;
    const cplx* p = m.col(c);
    for (int r = 0; r < m.rows; ++r) s += std::norm(p[r]);
    return std::sqrt(s);
}

inline double vec_norm(const CVec& v) {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return std::sqrt(s);
}

struct invalid_config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_root_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct shift_overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct bound_violation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct degenerate_column_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct wrong_operation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ius
