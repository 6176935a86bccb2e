#include "tala/fem/coefficients.hpp"

#include "tala/fem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tala::fem {

namespace {

QuadratureField empty_field( const Discretization& d, int level, int degree )
{
    const auto& geo = d.geometry( level, degree );
    QuadratureField f;
    f.level      = level;
    f.degree     = basis_table( degree ).degree;
    f.num_points = geo.num_points;
    f.values.resize( geo.x.size() );
    return f;
}

} // namespace

QuadratureField constant_field( const Discretization& d, int level, int degree, double c )
{
    QuadratureField f = empty_field( d, level, degree );
    std::fill( f.values.begin(), f.values.end(), c );
    return f;
}

QuadratureField field_from_function( const Discretization& d, int level, int degree, const std::function< double( const Vec2& ) >& g )
{
    QuadratureField f   = empty_field( d, level, degree );
    const auto&     geo = d.geometry( level, degree );
    for ( std::size_t k = 0; k < geo.x.size(); ++k )
    {
        f.values[k] = g( geo.x[k] );
    }
    return f;
}

QuadratureField field_from_nodal( const Discretization& d, int level, int degree, SpaceKind kind, const Vector& c )
{
    require( kind != SpaceKind::P2Vector, "scalar quadrature field needs a scalar space" );
    require( c.size() == d.num_nodes( kind, level ), "coefficient vector does not match the space dimension" );
    QuadratureField f     = empty_field( d, level, degree );
    const auto&     basis = basis_table( degree );
    const auto&     lm    = d.mesh().level( level );
    const int       nq    = f.num_points;
#pragma omp parallel for schedule( static )
    for ( int e = 0; e < lm.num_elements(); ++e )
    {
        for ( int q = 0; q < nq; ++q )
        {
            double v = 0.0;
            if ( kind == SpaceKind::P1 )
            {
                for ( int k = 0; k < 3; ++k )
                    v += basis.p1[q][k] * c[lm.p1_nodes[e][k]];
            }
            else
            {
                for ( int k = 0; k < 6; ++k )
                    v += basis.p2[q][k] * c[lm.p2_nodes[e][k]];
            }
            f.values[static_cast< std::size_t >( e ) * nq + q] = v;
        }
    }
    return f;
}

VectorQuadratureField vector_field_from_function( const Discretization& d, int level, int degree,
                                                  const std::function< Vec2( const Vec2& ) >& g )
{
    const auto&           geo = d.geometry( level, degree );
    VectorQuadratureField f;
    f.level      = level;
    f.degree     = basis_table( degree ).degree;
    f.num_points = geo.num_points;
    f.values.resize( geo.x.size() );
    for ( std::size_t k = 0; k < geo.x.size(); ++k )
    {
        f.values[k] = g( geo.x[k] );
    }
    return f;
}

VectorQuadratureField vector_field_from_nodal( const Discretization& d, int level, int degree, const Vector& u )
{
    const int n = d.num_nodes( SpaceKind::P2Vector, level );
    require( u.size() == 2 * n, "coefficient vector does not match the space dimension" );
    const auto&           geo   = d.geometry( level, degree );
    const auto&           basis = basis_table( degree );
    const auto&           lm    = d.mesh().level( level );
    VectorQuadratureField f;
    f.level      = level;
    f.degree     = basis.degree;
    f.num_points = geo.num_points;
    f.values.resize( geo.x.size() );
    const int nq = f.num_points;
#pragma omp parallel for schedule( static )
    for ( int e = 0; e < lm.num_elements(); ++e )
    {
        for ( int q = 0; q < nq; ++q )
        {
            Vec2 v = Vec2::Zero();
            for ( int k = 0; k < 6; ++k )
            {
                const int node = lm.p2_nodes[e][k];
                v.x() += basis.p2[q][k] * u[node];
                v.y() += basis.p2[q][k] * u[n + node];
            }
            f.values[static_cast< std::size_t >( e ) * nq + q] = v;
        }
    }
    return f;
}

QuadratureField transform( QuadratureField f, const std::function< double( double ) >& g )
{
    for ( double& v : f.values )
    {
        v = g( v );
    }
    return f;
}

QuadratureField multiply( QuadratureField a, const QuadratureField& b )
{
    require( a.values.size() == b.values.size() && a.level == b.level, "quadrature fields live on different levels" );
    for ( std::size_t k = 0; k < a.values.size(); ++k )
    {
        a.values[k] *= b.values[k];
    }
    return a;
}

QuadratureField scale_surface_elements( const Discretization& d, QuadratureField f, double factor )
{
    const auto& lm = d.mesh().level( f.level );
    for ( int e = 0; e < lm.num_elements(); ++e )
    {
        if ( lm.touches_surface[e] )
        {
            for ( int q = 0; q < f.num_points; ++q )
            {
                f.values[static_cast< std::size_t >( e ) * f.num_points + q] *= factor;
            }
        }
    }
    return f;
}

// ---------------------------------------------------------------------------------------------

ExpSurrogate::ExpSurrogate( double z_min, double z_max, int degree, double tolerance )
: z_min_( z_min )
, z_max_( z_max )
, degree_( degree )
{
    require( z_max > z_min, "surrogate range must be nonempty" );
    require( degree >= 1, "surrogate degree must be positive" );
    // build against half the budget so that dense scans stay below the tolerance
    for ( int pieces = 1; pieces <= 4096; pieces *= 2 )
    {
        build( pieces );
        if ( max_relative_error( 200 * pieces ) < 0.5 * tolerance )
        {
            return;
        }
    }
}

void ExpSurrogate::build( int pieces )
{
    pieces_ = pieces;
    width_  = ( z_max_ - z_min_ ) / pieces;
    coefficients_.assign( pieces, std::vector< double >( degree_ + 1, 0.0 ) );
    const int n = degree_ + 1;
    for ( int p = 0; p < pieces; ++p )
    {
        const double a = z_min_ + p * width_;
        std::vector< double > nodes( n ), values( n );
        for ( int j = 0; j < n; ++j )
        {
            nodes[j]  = std::cos( std::numbers::pi * ( j + 0.5 ) / n );
            values[j] = std::exp( a + 0.5 * width_ * ( nodes[j] + 1.0 ) );
        }
        for ( int k = 0; k < n; ++k )
        {
            double s = 0.0;
            for ( int j = 0; j < n; ++j )
            {
                s += values[j] * std::cos( k * std::numbers::pi * ( j + 0.5 ) / n );
            }
            coefficients_[p][k] = ( k == 0 ? 1.0 : 2.0 ) * s / n;
        }
    }
}

double ExpSurrogate::operator()( double z ) const
{
    if ( z < z_min_ || z > z_max_ )
    {
        return std::exp( z );
    }
    const int    p = std::min( static_cast< int >( ( z - z_min_ ) / width_ ), pieces_ - 1 );
    const double t = 2.0 * ( z - ( z_min_ + p * width_ ) ) / width_ - 1.0;
    const auto&  c = coefficients_[p];
    double       b1 = 0.0, b2 = 0.0;
    for ( int k = degree_; k >= 1; --k )
    {
        const double b0 = c[k] + 2.0 * t * b1 - b2;
        b2              = b1;
        b1              = b0;
    }
    return c[0] + t * b1 - b2;
}

double ExpSurrogate::max_relative_error( int samples ) const
{
    double worst = 0.0;
    for ( int i = 0; i < samples; ++i )
    {
        const double z     = z_min_ + ( z_max_ - z_min_ ) * i / ( samples - 1 );
        const double exact = std::exp( z );
        worst              = std::max( worst, std::abs( ( *this )( z ) - exact ) / exact );
    }
    return worst;
}

// ---------------------------------------------------------------------------------------------

ViscosityField::ViscosityField( const Discretization& d, ViscosityLaw law, Vector temperature, int fine_level, int l_eta,
                                std::shared_ptr< const ExpSurrogate > surrogate )
: d_( &d )
, law_( std::move( law ) )
, temperature_( std::move( temperature ) )
, fine_level_( fine_level )
, l_eta_( l_eta )
, surrogate_( std::move( surrogate ) )
{
    require( temperature_.size() == d.num_nodes( SpaceKind::P2, fine_level ), "temperature must be a P2 field on the fine level" );
}

Vector ViscosityField::p1_nodal( int level ) const
{
    require( level <= fine_level_, "viscosity requested above the temperature level" );
    const auto& mesh   = d_->mesh();
    const auto& grid   = mesh.p1_grid( level );
    const auto  inject = mesh.injection( level, fine_level_ + 1 );
    Vector      eta( grid.num_points() );
    for ( int i = 0; i < grid.num_points(); ++i )
    {
        eta[i] = law_( grid.physical[i], temperature_[inject[i]] );
    }
    return eta;
}

QuadratureField ViscosityField::quadrature( int level, int degree, bool use_surrogate ) const
{
    if ( level > l_eta_ )
    {
        return field_from_nodal( *d_, level, degree, SpaceKind::P1, p1_nodal( level ) );
    }

    const auto&           mesh  = d_->mesh();
    const auto&           macro = mesh.macro();
    const auto&           lm    = mesh.level( level );
    const QuadratureRule& rule  = quadrature_rule( degree );
    const auto&           geo   = d_->geometry( level, degree );
    QuadratureField       f;
    f.level      = level;
    f.degree     = rule.degree;
    f.num_points = rule.size();
    f.values.resize( geo.x.size() );

    const bool surrogate = use_surrogate && surrogate_ != nullptr;
    const int  nq        = f.num_points;
#pragma omp parallel for schedule( static )
    for ( int e = 0; e < lm.num_elements(); ++e )
    {
        const int   m   = lm.macro_of[e];
        const auto& tri = macro.triangles[m];
        Mat2        Fm;
        Fm.col( 0 ) = macro.vertices[tri[1]] - macro.vertices[tri[0]];
        Fm.col( 1 ) = macro.vertices[tri[2]] - macro.vertices[tri[0]];
        const Mat2  Fm_inv = Fm.inverse();
        const auto& c      = lm.corners[e];
        Mat2        JF;
        JF.col( 0 ) = c[1] - c[0];
        JF.col( 1 ) = c[2] - c[0];
        for ( int q = 0; q < nq; ++q )
        {
            const Vec2 x_tilde = c[0] + JF * rule.points[q];
            const Vec2 st      = Fm_inv * ( x_tilde - macro.vertices[tri[0]] );
            const auto loc     = mesh.locate_in_macro( fine_level_, m, st );
            const double T     = evaluate_in_element( *d_, SpaceKind::P2, fine_level_, temperature_, loc.element, loc.local );
            const Vec2& x      = geo.x[static_cast< std::size_t >( e ) * nq + q];
            const double z     = law_.exponent( x, T );
            f.values[static_cast< std::size_t >( e ) * nq + q] = law_.prefactor( x ) * ( surrogate ? ( *surrogate_ )( z ) : std::exp( z ) );
        }
    }
    return f;
}

} // namespace tala::fem
