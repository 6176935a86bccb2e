#include "tala/fem/transfer.hpp"

#include "tala/fem/quadrature.hpp"

#include <cmath>
#include <vector>

namespace tala::fem {

Transfer::Transfer( const Discretization& d, SpaceKind kind, int coarse_level )
: kind_( kind )
, coarse_level_( coarse_level )
{
    require( coarse_level >= 0 && coarse_level < d.max_level(), "transfer needs two adjacent levels of the hierarchy" );
    const auto& mesh      = d.mesh();
    const auto& coarse_lm = mesh.level( coarse_level );
    const auto& fine_grid = d.node_grid( kind, coarse_level + 1 );
    const int   n_coarse  = d.num_nodes( kind, coarse_level );
    const int   n_fine    = fine_grid.num_points();
    const bool  p1        = kind == SpaceKind::P1;
    const int   nf        = fine_grid.n;

    std::vector< Eigen::Triplet< double > > triplets;
    std::vector< char >                     done( n_fine, 0 );
    for ( int m = 0; m < mesh.macro().num_triangles(); ++m )
    {
        for ( int b = 0; b <= nf; ++b )
        {
            for ( int a = 0; a <= nf - b; ++a )
            {
                const int row = fine_grid.id( m, a, b );
                if ( done[row] )
                {
                    continue;
                }
                done[row]      = 1;
                const Vec2 st( static_cast< double >( a ) / nf, static_cast< double >( b ) / nf );
                const auto loc = mesh.locate_in_macro( coarse_level, m, st );
                if ( p1 )
                {
                    const auto phi = p1_values( loc.local );
                    for ( int k = 0; k < 3; ++k )
                    {
                        if ( std::abs( phi[k] ) > 1e-14 )
                            triplets.emplace_back( row, coarse_lm.p1_nodes[loc.element][k], phi[k] );
                    }
                }
                else
                {
                    const auto phi = p2_values( loc.local );
                    for ( int k = 0; k < 6; ++k )
                    {
                        if ( std::abs( phi[k] ) > 1e-14 )
                            triplets.emplace_back( row, coarse_lm.p2_nodes[loc.element][k], phi[k] );
                    }
                }
            }
        }
    }
    p_.resize( n_fine, n_coarse );
    p_.setFromTriplets( triplets.begin(), triplets.end() );
    pt_ = p_.transpose();
}

void Transfer::prolongate( const Vector& coarse, Vector& fine ) const
{
    const Eigen::Index nc = p_.cols();
    const Eigen::Index nf = p_.rows();
    if ( kind_ == SpaceKind::P2Vector )
    {
        require( coarse.size() == 2 * nc, "prolongation input does not match the coarse space" );
        fine.resize( 2 * nf );
        fine.head( nf ) = p_ * coarse.head( nc );
        fine.tail( nf ) = p_ * coarse.tail( nc );
    }
    else
    {
        require( coarse.size() == nc, "prolongation input does not match the coarse space" );
        fine = p_ * coarse;
    }
}

void Transfer::restrict_to_coarse( const Vector& fine, Vector& coarse ) const
{
    const Eigen::Index nc = p_.cols();
    const Eigen::Index nf = p_.rows();
    if ( kind_ == SpaceKind::P2Vector )
    {
        require( fine.size() == 2 * nf, "restriction input does not match the fine space" );
        coarse.resize( 2 * nc );
        coarse.head( nc ) = pt_ * fine.head( nf );
        coarse.tail( nc ) = pt_ * fine.tail( nf );
    }
    else
    {
        require( fine.size() == nf, "restriction input does not match the fine space" );
        coarse = pt_ * fine;
    }
}

FieldFunction prolongate( const FieldFunction& coarse, int fine_level )
{
    require( fine_level >= coarse.space.level, "prolongation goes to a finer level" );
    FieldFunction out = coarse;
    for ( int l = coarse.space.level; l < fine_level; ++l )
    {
        const Transfer t( *coarse.space.discretization, coarse.space.kind, l );
        FieldFunction  next( coarse.space.discretization->space( coarse.space.kind, l + 1 ) );
        t.prolongate( out.coefficients, next.coefficients );
        out = std::move( next );
    }
    return out;
}

FieldFunction restrict_field( const FieldFunction& fine, int coarse_level )
{
    require( coarse_level <= fine.space.level, "restriction goes to a coarser level" );
    FieldFunction out = fine;
    for ( int l = fine.space.level - 1; l >= coarse_level; --l )
    {
        const Transfer t( *fine.space.discretization, fine.space.kind, l );
        FieldFunction  next( fine.space.discretization->space( fine.space.kind, l ) );
        t.restrict_to_coarse( out.coefficients, next.coefficients );
        out = std::move( next );
    }
    return out;
}

} // namespace tala::fem
