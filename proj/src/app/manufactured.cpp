#include "tala/app/manufactured.hpp"

#include <cmath>

namespace tala::app {

namespace {

// pieces of T = x0 x1 cos(t |x - c(t)|), c(t) = (-sin 3t, cos 3t)
struct Parts
{
    Vec2   y;    // x - c
    double rho;  // |x - c|
    double C;    // cos(t rho)
    double q;    // sin(t rho) / rho, finite at rho = 0
    Vec2   dc;   // c'(t)
};

Parts parts( double t, const Vec2& x )
{
    Parts p;
    const Vec2 c( -std::sin( 3 * t ), std::cos( 3 * t ) );
    p.y   = x - c;
    p.rho = p.y.norm();
    p.C   = std::cos( t * p.rho );
    p.q   = p.rho > 1e-8 ? std::sin( t * p.rho ) / p.rho : t;
    p.dc  = Vec2( -3 * std::cos( 3 * t ), -3 * std::sin( 3 * t ) );
    return p;
}

} // namespace

double ManufacturedSolution::temperature( double t, const Vec2& x ) const
{
    return x.x() * x.y() * parts( t, x ).C;
}

Vec2 ManufacturedSolution::temperature_gradient( double t, const Vec2& x ) const
{
    const Parts  p = parts( t, x );
    const double P = x.x() * x.y();
    return p.C * Vec2( x.y(), x.x() ) - P * t * p.q * p.y;
}

double ManufacturedSolution::temperature_laplacian( double t, const Vec2& x ) const
{
    const Parts  p = parts( t, x );
    const double P = x.x() * x.y();
    // lap cos(t rho) = -t^2 cos - t sin / rho in two dimensions
    return P * ( -t * t * p.C - t * p.q ) - 2.0 * t * p.q * Vec2( x.y(), x.x() ).dot( p.y );
}

double ManufacturedSolution::temperature_rate( double t, const Vec2& x ) const
{
    const Parts  p = parts( t, x );
    const double P = x.x() * x.y();
    // d/dt (t rho) = rho - t y.c' / rho
    return -P * ( std::sin( t * p.rho ) * p.rho - t * p.q * p.y.dot( p.dc ) );
}

Vec2 ManufacturedSolution::velocity( double t, const Vec2& x ) const
{
    const double a = 2.0 + std::cos( 3 * M_PI * t + x.x() * x.y() * t );
    return a * Vec2( -x.y(), x.x() );
}

Mat2 ManufacturedSolution::velocity_gradient( double t, const Vec2& x ) const
{
    const double th = 3 * M_PI * t + x.x() * x.y() * t;
    const double a  = 2.0 + std::cos( th );
    const double s  = -std::sin( th ) * t;
    const Vec2   ga( s * x.y(), s * x.x() );
    Mat2         G;
    G( 0, 0 ) = -ga.x() * x.y();
    G( 0, 1 ) = -ga.y() * x.y() - a;
    G( 1, 0 ) = ga.x() * x.x() + a;
    G( 1, 1 ) = ga.y() * x.x();
    return G;
}

double ManufacturedSolution::viscosity( const Vec2& x, double T ) const
{
    return x.squaredNorm() * std::exp( -T );
}

double ManufacturedSolution::strain_rate_squared( double t, const Vec2& x ) const
{
    const Mat2 G   = velocity_gradient( t, x );
    Mat2       eps = 0.5 * ( G + G.transpose() );
    eps -= 0.5 * eps.trace() * Mat2::Identity();
    return ( eps.array() * eps.array() ).sum();
}

double ManufacturedSolution::forcing( double t, const Vec2& x ) const
{
    const double T = temperature( t, x );
    const Vec2   u = velocity( t, x );
    const Vec2   g = -x / x.norm();
    return temperature_rate( t, x ) + u.dot( temperature_gradient( t, x ) ) - k * temperature_laplacian( t, x ) - T * u.dot( g ) -
           2.0 * viscosity( x, T ) * strain_rate_squared( t, x ) - 1.0;
}

} // namespace tala::app
