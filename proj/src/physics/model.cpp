#include "tala/physics/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>

namespace tala::physics {

void ReferenceConstants::validate() const
{
    for ( double v : { d, delta_T, eta0, rho0, cp0, alpha0, g0, u0, k0, gruneisen0, r_surface, r_cmb, T_surface, T_cmb,
                       rho_top, T_adiabatic } )
    {
        require( v > 0.0 && std::isfinite( v ), "reference constants must be positive" );
    }
    require( r_cmb < r_surface, "r_cmb must be below r_surface" );
}

DimensionlessNumbers nondimensionalize( const ReferenceConstants& rc )
{
    rc.validate();
    DimensionlessNumbers n;
    n.kappa_d  = rc.k0 / ( rc.rho0 * rc.cp0 );
    n.t0       = rc.d / rc.u0;
    n.p0       = rc.eta0 * rc.u0 / rc.d;
    n.H0       = rc.cp0 * rc.delta_T * rc.u0 / rc.d;
    n.kappa_T0 = rc.alpha0 / ( rc.gruneisen0 * rc.rho0 * rc.cp0 );
    n.KT0      = 1.0 / n.kappa_T0;
    n.QL0      = rc.rho0 * rc.u0 * rc.delta_T * rc.cp0 / rc.d;
    n.Pe       = rc.u0 * rc.d / n.kappa_d;
    n.Ra       = rc.rho0 * rc.alpha0 * rc.g0 * rc.delta_T * rc.d * rc.d * rc.d / ( n.kappa_d * rc.eta0 );
    n.Di       = rc.alpha0 * rc.g0 * rc.d / rc.cp0;
    n.gamma    = n.Di / rc.gruneisen0;
    n.xi       = rc.alpha0 * rc.delta_T;
    return n;
}

BaseViscosityProfile::BaseViscosityProfile( std::vector< double > radius, std::vector< double > eta )
: radius_( std::move( radius ) )
, eta_( std::move( eta ) )
{
    require( !radius_.empty() && radius_.size() == eta_.size(), "viscosity table needs matching non-empty columns" );
    for ( std::size_t i = 0; i < eta_.size(); ++i )
    {
        require( eta_[i] > 0.0, "viscosity table values must be positive" );
        if ( i > 0 )
        {
            require( radius_[i] > radius_[i - 1], "viscosity table radii must increase" );
        }
    }
}

double BaseViscosityProfile::operator()( double r ) const
{
    require( !radius_.empty(), "empty viscosity table" );
    if ( r < radius_.front() || r > radius_.back() )
    {
        static std::atomic< bool > warned{ false };
        const double               slack = 1e-9 * ( 1.0 + std::abs( r ) );
        const bool                 far   = r < radius_.front() - slack || r > radius_.back() + slack;
        if ( far && radius_.size() > 1 && !warned.exchange( true ) )
        {
            std::cerr << "warning: base viscosity queried outside its table at r = " << r << ", clamping\n";
        }
        return r < radius_.front() ? eta_.front() : eta_.back();
    }
    const auto   it = std::upper_bound( radius_.begin(), radius_.end(), r );
    if ( it == radius_.end() )
    {
        return eta_.back();
    }
    const auto   i  = static_cast< std::size_t >( it - radius_.begin() );
    if ( i == 0 )
    {
        return eta_.front();
    }
    const double s = ( r - radius_[i - 1] ) / ( radius_[i] - radius_[i - 1] );
    return std::exp( ( 1.0 - s ) * std::log( eta_[i - 1] ) + s * std::log( eta_[i] ) );
}

BaseViscosityProfile default_base_profile( double r_cmb, double r_surface )
{
    const double h = r_surface - r_cmb;
    // heights as fraction of the mantle depth
    const std::vector< double > f   = { 0.0, 0.76, 0.78, 0.88, 0.93, 0.96, 1.0 };
    const std::vector< double > eta = { 3.0, 3.0, 0.3, 0.01, 0.01, 100.0, 100.0 };
    std::vector< double >       r( f.size() );
    for ( std::size_t i = 0; i < f.size(); ++i )
    {
        r[i] = r_cmb + f[i] * h;
    }
    return { r, eta };
}

double PhysicalParams::viscosity( const Vec2& x, double T ) const
{
    return eta_base( x.norm() ) * std::exp( -E_A * T + V_A * ( r_surface - x.norm() ) );
}

double PhysicalParams::density( const Vec2& x ) const
{
    const double r = x.norm();
    require( r > 0.0, "density undefined at the origin" );
    return rho_top * std::exp( gamma * ( r_surface - r ) );
}

Vec2 PhysicalParams::grad_ln_density( const Vec2& x ) const
{
    const double r = x.norm();
    require( r > 0.0, "density undefined at the origin" );
    return -gamma * x / r;
}

double PhysicalParams::reference_temperature( const Vec2& x ) const
{
    const double r = x.norm();
    require( r > 0.0, "reference temperature undefined at the origin" );
    return T_adiabatic * std::exp( Di * ( r_surface - r ) );
}

Vec2 PhysicalParams::gravity( const Vec2& x ) const
{
    const double r = x.norm();
    require( r > 0.0, "gravity undefined at the origin" );
    return -x / r;
}

fem::ViscosityLaw PhysicalParams::viscosity_law() const
{
    fem::ViscosityLaw law;
    const auto        base = eta_base;
    law.prefactor          = [base]( const Vec2& x ) { return base( x.norm() ); };
    const double ea = E_A, va = V_A, rs = r_surface;
    law.exponent = [ea, va, rs]( const Vec2& x, double T ) { return -ea * T + va * ( rs - x.norm() ); };
    return law;
}

double PhysicalParams::buoyancy_factor( const Vec2& x ) const
{
    return Ra / Pe * density( x ) * alpha;
}

PhysicalParams make_physical_params( const ReferenceConstants& rc )
{
    const auto     n = nondimensionalize( rc );
    PhysicalParams p;
    p.Ra          = n.Ra;
    p.Pe          = n.Pe;
    p.Di          = n.Di;
    p.gamma       = n.gamma;
    p.r_cmb       = rc.r_cmb / rc.d;
    p.r_surface   = rc.r_surface / rc.d;
    p.T_surface   = rc.T_surface / rc.delta_T;
    p.T_cmb       = rc.T_cmb / rc.delta_T;
    p.rho_top     = rc.rho_top / rc.rho0;
    p.T_adiabatic = rc.T_adiabatic / rc.delta_T;
    p.eta_base    = default_base_profile( p.r_cmb, p.r_surface );
    return p;
}

double seconds_to_nondimensional( const DimensionlessNumbers& n, double seconds )
{
    return seconds / n.t0;
}

double nondimensional_to_seconds( const DimensionlessNumbers& n, double t )
{
    return t * n.t0;
}

} // namespace tala::physics
