#pragma once

#include "tala/fem/space.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace tala::fem {

/// Coefficient values at the quadrature points of every element of a level.
struct QuadratureField
{
    int                   level      = 0;
    int                   degree     = 6;
    int                   num_points = 0;
    std::vector< double > values;

    double at( int e, int q ) const { return values[static_cast< std::size_t >( e ) * num_points + q]; }
};

struct VectorQuadratureField
{
    int                 level      = 0;
    int                 degree     = 6;
    int                 num_points = 0;
    std::vector< Vec2 > values;

    const Vec2& at( int e, int q ) const { return values[static_cast< std::size_t >( e ) * num_points + q]; }
};

QuadratureField constant_field( const Discretization& d, int level, int degree, double c );
QuadratureField field_from_function( const Discretization& d, int level, int degree, const std::function< double( const Vec2& ) >& f );
QuadratureField field_from_nodal( const Discretization& d, int level, int degree, SpaceKind kind, const Vector& c );
VectorQuadratureField vector_field_from_function( const Discretization& d, int level, int degree,
                                                  const std::function< Vec2( const Vec2& ) >& f );
VectorQuadratureField vector_field_from_nodal( const Discretization& d, int level, int degree, const Vector& u );

QuadratureField transform( QuadratureField f, const std::function< double( double ) >& g );
QuadratureField multiply( QuadratureField a, const QuadratureField& b );

/// Multiply values on elements touching the outer boundary by factor.
QuadratureField scale_surface_elements( const Discretization& d, QuadratureField f, double factor );

/// Piecewise Chebyshev interpolant of exp on [z_min, z_max] with equal pieces; the piece
/// count grows until the sampled relative error is below the tolerance. Arguments outside
/// the range fall back to std::exp.
class ExpSurrogate
{
 public:
    ExpSurrogate( double z_min, double z_max, int degree = 6, double tolerance = 6e-4 );

    double operator()( double z ) const;

    int    pieces() const { return pieces_; }
    int    degree() const { return degree_; }
    double z_min() const { return z_min_; }
    double z_max() const { return z_max_; }

    double max_relative_error( int samples ) const;

 private:
    double z_min_;
    double z_max_;
    int    degree_;
    int    pieces_ = 0;
    double width_  = 0.0;

    std::vector< std::vector< double > > coefficients_;

    void build( int pieces );
};

/// eta(x, T) = prefactor(x) * exp(exponent(x, T)).
struct ViscosityLaw
{
    std::function< double( const Vec2& ) >          prefactor;
    std::function< double( const Vec2&, double ) > exponent;

    double operator()( const Vec2& x, double T ) const { return prefactor( x ) * std::exp( exponent( x, T ) ); }
};

/// Two-tier viscosity: levels up to l_eta evaluate the law at each quadrature point with
/// the temperature taken from the finest field; finer levels interpolate the nodal P1
/// viscosity eta_P1.
class ViscosityField
{
 public:
    ViscosityField( const Discretization& d, ViscosityLaw law, Vector temperature, int fine_level, int l_eta,
                    std::shared_ptr< const ExpSurrogate > surrogate = nullptr );

    int fine_level() const { return fine_level_; }
    int l_eta() const { return l_eta_; }

    QuadratureField quadrature( int level, int degree, bool use_surrogate = false ) const;
    Vector          p1_nodal( int level ) const;

    const ViscosityLaw& law() const { return law_; }
    const Vector&       temperature() const { return temperature_; }

 private:
    const Discretization*                 d_;
    ViscosityLaw                          law_;
    Vector                                temperature_;
    int                                   fine_level_;
    int                                   l_eta_;
    std::shared_ptr< const ExpSurrogate > surrogate_;
};

} // namespace tala::fem
