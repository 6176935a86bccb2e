#pragma once

#include "tala/common.hpp"
#include "tala/fem/coefficients.hpp"

#include <vector>

namespace tala::physics {

/// Dimensional reference constants (SI units).
struct ReferenceConstants
{
    double d           = 2.891e6;  // m
    double delta_T     = 3.9e3;    // K
    double eta0        = 1e22;     // Pa s
    double rho0        = 4.686e3;  // kg m^-3
    double cp0         = 1.25e3;   // J kg^-1 K^-1
    double alpha0      = 2e-5;     // K^-1
    double g0          = 9.81;     // m s^-2
    double u0          = 5e-9;     // m s^-1
    double k0          = 3.0;      // W m^-1 K^-1
    double gruneisen0  = 1.2;

    double r_surface   = 6.371e6;  // m
    double r_cmb       = 3.48e6;   // m
    double T_surface   = 300.0;    // K
    double T_cmb       = 4200.0;   // K
    double rho_top     = 3.381e3;  // kg m^-3
    double T_adiabatic = 1.6e3;    // K

    void validate() const;
};

struct DimensionlessNumbers
{
    double Ra    = 0;
    double Pe    = 0;
    double Di    = 0;
    double gamma = 0;
    double xi    = 0;

    double kappa_d  = 0;  // m^2 s^-1
    double t0       = 0;  // s
    double p0       = 0;  // Pa
    double H0       = 0;  // W kg^-1
    double QL0      = 0;  // W m^-3
    double KT0      = 0;  // Pa
    double kappa_T0 = 0;  // Pa^-1
};

DimensionlessNumbers nondimensionalize( const ReferenceConstants& rc );

/// Piecewise log-linear table eta_base(r) over nondimensional radius, clamped at the ends.
class BaseViscosityProfile
{
 public:
    BaseViscosityProfile() = default;
    BaseViscosityProfile( std::vector< double > radius, std::vector< double > eta );

    double operator()( double r ) const;

    const std::vector< double >& radius() const { return radius_; }
    const std::vector< double >& values() const { return eta_; }

 private:
    std::vector< double > radius_;
    std::vector< double > eta_;
};

/// Illustrative four-layer profile (lower mantle, transition, asthenosphere, lithosphere).
BaseViscosityProfile default_base_profile( double r_cmb, double r_surface );

/// Nondimensional model used by the solvers.
struct PhysicalParams
{
    double Ra    = 0;
    double Pe    = 0;
    double Di    = 0;
    double gamma = 0;

    double r_cmb       = 0;
    double r_surface   = 0;
    double T_surface   = 0;
    double T_cmb       = 0;
    double rho_top     = 0;
    double T_adiabatic = 0;

    double alpha = 1.0;
    double cp    = 1.0;
    double k     = 1.0;
    double H     = 0.0;

    double E_A = 4.610;
    double V_A = 2.996;

    BaseViscosityProfile eta_base;

    double viscosity( const Vec2& x, double T ) const;
    double density( const Vec2& x ) const;
    Vec2   grad_ln_density( const Vec2& x ) const;
    double reference_temperature( const Vec2& x ) const;
    Vec2   gravity( const Vec2& x ) const;

    fem::ViscosityLaw viscosity_law() const;

    /// Factor multiplying T_d in the momentum load: (Ra/Pe) rho alpha.
    double buoyancy_factor( const Vec2& x ) const;
};

PhysicalParams make_physical_params( const ReferenceConstants& rc );

double seconds_to_nondimensional( const DimensionlessNumbers& n, double seconds );
double nondimensional_to_seconds( const DimensionlessNumbers& n, double t );

} // namespace tala::physics
