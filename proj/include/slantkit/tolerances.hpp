#pragma once

namespace slantkit {

struct Tolerances {
    double structure = 1e-9;       // structure axioms, relative
    double cluster = 1e-8;         // absolute on eigenvalues of f^2
    double angle_const = 1e-6;     // radians; constancy and joining of slant functions
    double angle_distinct = 1e-6;  // radians; distinctness of slant functions
    double generic_margin = 1e-6;  // distance of alpha from {0, 1} counted as an endpoint
    double identity = 1e-9;        // identity suite residuals
    double dual = 1e-8;            // dual round-trip angles and spectra
    double zero_threshold = 1e-4;  // finite-difference derivatives counted as zero
    double fd_step = 1e-5;         // central-difference step
};

}  // namespace slantkit
