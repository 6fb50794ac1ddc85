#pragma once

// Time-ordered state samples shared between the integrators that produce
// them and the thermodynamic accounting that consumes them.

#include <vector>

#include "blochtherm/bloch.hpp"
#include "blochtherm/smalg.hpp"

namespace blochtherm {

/// Diagnostics gathered while integrating; default-constructed (all zero)
/// for hand-built trajectories.
struct IntegrationStats {
    long steps_accepted = 0;
    long steps_rejected = 0;
    double max_trace_drift = 0.0;          // max |tr rho - 1| before renormalization
    double min_eigenvalue = 1.0;           // smallest eigenvalue seen on accepted states
    double max_hermiticity_drift = 0.0;    // max |rho - rho^dag| on accepted states
};

template <int N>
struct TrajectoryPoint {
    double t = 0.0;
    Matrix<N> rho;
    FieldVector field;  // local thermodynamic field attached to the sample
};

template <int N>
struct Trajectory {
    std::vector<TrajectoryPoint<N>> points;
    IntegrationStats stats;

    std::size_t size() const { return points.size(); }
    const TrajectoryPoint<N>& operator[](std::size_t i) const { return points[i]; }
    TrajectoryPoint<N>& operator[](std::size_t i) { return points[i]; }
};

}  // namespace blochtherm
