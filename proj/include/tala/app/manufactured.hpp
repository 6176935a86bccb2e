#pragma once

#include "tala/common.hpp"

namespace tala::app {

/// Closed-form temperature, velocity and viscosity of the temporal convergence test,
/// with the forcing that makes them an exact solution of
/// dT/dt + u.grad T - k lap T - T (u.g) - 2 eta eps:eps - 1 = f  (rho = C^p = Di = alpha = H = Pe = Ra = 1).
struct ManufacturedSolution
{
    double k = 0.1;

    double temperature( double t, const Vec2& x ) const;
    Vec2   temperature_gradient( double t, const Vec2& x ) const;
    double temperature_laplacian( double t, const Vec2& x ) const;
    double temperature_rate( double t, const Vec2& x ) const;

    Vec2 velocity( double t, const Vec2& x ) const;
    Mat2 velocity_gradient( double t, const Vec2& x ) const; // (i, j) = d u_i / d x_j

    double viscosity( const Vec2& x, double T ) const;

    /// Deviatoric eps(u):eps(u).
    double strain_rate_squared( double t, const Vec2& x ) const;

    double forcing( double t, const Vec2& x ) const;
};

} // namespace tala::app
