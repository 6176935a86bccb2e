#include "tala/constraints/boundary.hpp"

#include "tala/parallel.hpp"

#include <cmath>

namespace tala::constraints {

using fem::SpaceKind;
using geometry::BoundaryTag;

BoundaryProjection::BoundaryProjection( const fem::Discretization& d, int level )
: level_( level )
, n2_( d.num_nodes( SpaceKind::P2, level ) )
, cmb_( d.mesh().nodes_with_tag( level, BoundaryTag::CMB ) )
, surface_( d.mesh().nodes_with_tag( level, BoundaryTag::Surface ) )
{
    const auto& grid = d.mesh().p2_grid( level );
    normals_.reserve( cmb_.size() );
    for ( int i : cmb_ )
        normals_.push_back( grid.physical[i].normalized() );
}

void BoundaryProjection::apply_freeslip( Vector& u ) const
{
    require( u.size() == 2 * n2_, "free-slip projection expects a P2 vector of this level" );
    for ( std::size_t k = 0; k < cmb_.size(); ++k )
    {
        const int    i  = cmb_[k];
        const Vec2&  n  = normals_[k];
        const double un = u[i] * n.x() + u[n2_ + i] * n.y();
        u[i] -= un * n.x();
        u[n2_ + i] -= un * n.y();
    }
}

void BoundaryProjection::mask_surface( Vector& u ) const
{
    require( u.size() == 2 * n2_, "surface mask expects a P2 vector of this level" );
    for ( int i : surface_ )
    {
        u[i]       = 0.0;
        u[n2_ + i] = 0.0;
    }
}

void BoundaryProjection::apply_velocity( Vector& u ) const
{
    apply_freeslip( u );
    mask_surface( u );
}

void BoundaryProjection::apply_zero_mean( Vector& p ) const
{
    zero_mean( p );
}

void BoundaryProjection::mask_scalar_surface( Vector& t ) const
{
    require( t.size() == n2_, "scalar mask expects a P2 field of this level" );
    for ( int i : surface_ )
        t[i] = 0.0;
}

void BoundaryProjection::mask_scalar_boundary( Vector& t ) const
{
    mask_scalar_surface( t );
    for ( int i : cmb_ )
        t[i] = 0.0;
}

fem::FieldFunction BoundaryProjection::apply_freeslip( const fem::FieldFunction& u ) const
{
    require( u.space.kind == SpaceKind::P2Vector && u.space.level == level_, "free-slip projection needs a P2 vector field" );
    fem::FieldFunction out = u;
    apply_freeslip( out.coefficients );
    return out;
}

fem::FieldFunction BoundaryProjection::apply_zero_mean( const fem::FieldFunction& p ) const
{
    fem::FieldFunction out = p;
    zero_mean( out.coefficients );
    return out;
}

Projection BoundaryProjection::velocity_projection() const
{
    return [this]( Vector& u ) { apply_velocity( u ); };
}

Projection BoundaryProjection::pressure_projection() const
{
    return []( Vector& p ) { zero_mean( p ); };
}

Projection BoundaryProjection::projection( ProjectionKind kind ) const
{
    switch ( kind )
    {
    case ProjectionKind::FreeSlip:
        return [this]( Vector& u ) { apply_freeslip( u ); };
    case ProjectionKind::ZeroMean:
        return pressure_projection();
    case ProjectionKind::Composite:
        break;
    }
    // block vector [u; p]
    return [this]( Vector& x ) {
        Vector u = x.head( 2 * n2_ );
        Vector p = x.tail( x.size() - 2 * n2_ );
        apply_velocity( u );
        zero_mean( p );
        x << u, p;
    };
}

double BoundaryProjection::max_normal_velocity( const Vector& u ) const
{
    double worst = 0.0;
    for ( std::size_t k = 0; k < cmb_.size(); ++k )
    {
        const int i = cmb_[k];
        worst       = std::max( worst, std::abs( u[i] * normals_[k].x() + u[n2_ + i] * normals_[k].y() ) );
    }
    return worst;
}

void zero_mean( Vector& p )
{
    if ( p.size() == 0 )
        return;
    const double mean = sum( p ) / static_cast< double >( p.size() );
    p.array() -= mean;
}

double pressure_shift_constant( const fem::FieldFunction& p )
{
    const auto& d = *p.space.discretization;
    return -fem::integrate( p ) / fem::domain_area( d, p.space.level );
}

Vector surface_velocity_interpolant( const fem::Discretization& d, int level, const BoundaryConditionSet& bcs )
{
    const int n = d.num_nodes( SpaceKind::P2, level );
    Vector    u = Vector::Zero( 2 * n );
    if ( !bcs.surface_velocity )
        return u;
    const auto& grid = d.mesh().p2_grid( level );
    for ( int i : d.mesh().nodes_with_tag( level, BoundaryTag::Surface ) )
    {
        const Vec2 v = bcs.surface_velocity( grid.physical[i] );
        u[i]         = v.x();
        u[n + i]     = v.y();
    }
    return u;
}

Vector temperature_boundary_values( const fem::Discretization& d, int level, const BoundaryConditionSet& bcs )
{
    Vector t = Vector::Zero( d.num_nodes( SpaceKind::P2, level ) );
    for ( int i : d.mesh().nodes_with_tag( level, BoundaryTag::Surface ) )
        t[i] = bcs.surface_temperature;
    for ( int i : d.mesh().nodes_with_tag( level, BoundaryTag::CMB ) )
        t[i] = bcs.cmb_temperature;
    return t;
}

ReducedRhs eliminate_dirichlet( const BoundaryProjection& proj, const fem::FormOperator& A, const LinearOperator& divergence,
                                const Vector& f, const Vector& g, const Vector& u_int )
{
    ReducedRhs out;
    Vector     Au, Bu;
    A.apply( u_int, Au );
    divergence( u_int, Bu );
    out.f = f - Au;
    out.g = g - Bu;
    proj.apply_velocity( out.f );
    zero_mean( out.g );
    return out;
}

LinearOperator dirichlet_masked( LinearOperator op, std::vector< int > rows )
{
    return [op = std::move( op ), rows = std::move( rows )]( const Vector& x, Vector& y ) {
        Vector xm = x;
        for ( int i : rows )
            xm[i] = 0.0;
        op( xm, y );
        for ( int i : rows )
            y[i] = x[i];
    };
}

Vector dirichlet_masked_diagonal( Vector diag, const std::vector< int >& rows )
{
    for ( int i : rows )
        diag[i] = 1.0;
    return diag;
}

} // namespace tala::constraints
