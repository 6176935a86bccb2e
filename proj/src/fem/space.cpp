#include "tala/fem/space.hpp"

#include "tala/fem/quadrature.hpp"

#include <cmath>

namespace tala::fem {

using geometry::RefinedMesh;

const char* to_string( SpaceKind kind )
{
    switch ( kind )
    {
    case SpaceKind::P1:
        return "P1";
    case SpaceKind::P2:
        return "P2";
    case SpaceKind::P2Vector:
        return "P2 vector";
    }
    return "?";
}

int FunctionSpace::num_nodes() const
{
    return discretization->num_nodes( kind, level );
}

int FunctionSpace::dim() const
{
    return kind == SpaceKind::P2Vector ? 2 * num_nodes() : num_nodes();
}

FieldFunction::FieldFunction( const FunctionSpace& s )
: space( s )
, coefficients( Vector::Zero( s.dim() ) )
{}

FieldFunction::FieldFunction( const FunctionSpace& s, Vector values )
: space( s )
, coefficients( std::move( values ) )
{
    require( coefficients.size() == space.dim(), "coefficient vector does not match the space dimension" );
}

const BasisTable& basis_table( int degree )
{
    static const auto build = []( int deg ) {
        const QuadratureRule& rule = quadrature_rule( deg );
        BasisTable            table;
        table.degree     = rule.degree;
        table.num_points = rule.size();
        for ( const Vec2& xi : rule.points )
        {
            table.p1.push_back( p1_values( xi ) );
            table.p2.push_back( p2_values( xi ) );
            table.p2_grad.push_back( p2_gradients( xi ) );
        }
        table.p1_grad = p1_gradients();
        return table;
    };
    static const BasisTable degree4 = build( 4 );
    static const BasisTable degree6 = build( 6 );
    return degree <= 4 ? degree4 : degree6;
}

Discretization::Discretization( std::shared_ptr< const RefinedMesh > mesh )
: mesh_( std::move( mesh ) )
{
    require( mesh_ != nullptr, "discretization needs a mesh" );
}

FunctionSpace Discretization::space( SpaceKind kind, int level ) const
{
    require( level >= 0 && level <= mesh_->max_level(), "level outside the refinement hierarchy" );
    return { this, kind, level };
}

const geometry::VertexGrid& Discretization::node_grid( SpaceKind kind, int level ) const
{
    return kind == SpaceKind::P1 ? mesh_->p1_grid( level ) : mesh_->p2_grid( level );
}

int Discretization::num_nodes( SpaceKind kind, int level ) const
{
    return node_grid( kind, level ).num_points();
}

const GeometryCache& Discretization::geometry( int level, int degree ) const
{
    const QuadratureRule& rule = quadrature_rule( degree );
    std::lock_guard< std::mutex > lock( mutex_ );
    auto& slot = geometry_[{ level, rule.degree }];
    if ( slot )
    {
        return *slot;
    }

    const geometry::LevelMesh& lm       = mesh_->level( level );
    const auto&                blending = mesh_->blending();
    const auto&                macro    = mesh_->macro();
    const int                  nq       = rule.size();
    const int                  ne       = lm.num_elements();

    auto cache        = std::make_unique< GeometryCache >();
    cache->num_points = nq;
    cache->x.resize( static_cast< std::size_t >( ne ) * nq );
    cache->inv_jacobian_t.resize( static_cast< std::size_t >( ne ) * nq );
    cache->weight.resize( static_cast< std::size_t >( ne ) * nq );

#pragma omp parallel for schedule( static )
    for ( int e = 0; e < ne; ++e )
    {
        const auto& c      = lm.corners[e];
        const int   sector = macro.triangle_sector[lm.macro_of[e]];
        Mat2        JF;
        JF.col( 0 ) = c[1] - c[0];
        JF.col( 1 ) = c[2] - c[0];
        for ( int q = 0; q < nq; ++q )
        {
            const Vec2 x_tilde = c[0] + JF * rule.points[q];
            const auto JB      = blending.jacobian( x_tilde, sector );
            const Mat2 J       = JB.matrix * JF;
            const std::size_t k = static_cast< std::size_t >( e ) * nq + q;
            cache->x[k]              = blending.blend( x_tilde, sector );
            cache->inv_jacobian_t[k] = J.inverse().transpose();
            cache->weight[k]         = rule.weights[q] * std::abs( J.determinant() );
        }
    }
    slot = std::move( cache );
    return *slot;
}

const NodeIncidence& Discretization::incidence( SpaceKind kind, int level ) const
{
    const int key_kind = kind == SpaceKind::P1 ? 1 : 2;
    std::lock_guard< std::mutex > lock( mutex_ );
    auto& slot = incidence_[{ level, key_kind }];
    if ( slot )
    {
        return *slot;
    }

    const geometry::LevelMesh& lm    = mesh_->level( level );
    const int                  nodes = node_grid( kind, level ).num_points();
    const int                  nloc  = key_kind == 1 ? 3 : 6;

    auto inc = std::make_unique< NodeIncidence >();
    inc->offsets.assign( nodes + 1, 0 );
    const auto node_of = [&]( int e, int k ) { return key_kind == 1 ? lm.p1_nodes[e][k] : lm.p2_nodes[e][k]; };
    for ( int e = 0; e < lm.num_elements(); ++e )
    {
        for ( int k = 0; k < nloc; ++k )
        {
            ++inc->offsets[node_of( e, k ) + 1];
        }
    }
    for ( int i = 0; i < nodes; ++i )
    {
        inc->offsets[i + 1] += inc->offsets[i];
    }
    inc->element.resize( inc->offsets.back() );
    inc->local.resize( inc->offsets.back() );
    std::vector< int > fill( inc->offsets.begin(), inc->offsets.end() - 1 );
    for ( int e = 0; e < lm.num_elements(); ++e )
    {
        for ( int k = 0; k < nloc; ++k )
        {
            const int pos      = fill[node_of( e, k )]++;
            inc->element[pos]  = e;
            inc->local[pos]    = k;
        }
    }
    slot = std::move( inc );
    return *slot;
}

Vector Discretization::interpolate( SpaceKind kind, int level, const std::function< double( const Vec2& ) >& f ) const
{
    require( kind != SpaceKind::P2Vector, "use interpolate_vector for vector spaces" );
    const auto& grid = node_grid( kind, level );
    Vector      out( grid.num_points() );
    for ( int i = 0; i < grid.num_points(); ++i )
    {
        out[i] = f( grid.physical[i] );
    }
    return out;
}

Vector Discretization::interpolate_vector( int level, const std::function< Vec2( const Vec2& ) >& f ) const
{
    const auto& grid = node_grid( SpaceKind::P2Vector, level );
    const int   n    = grid.num_points();
    Vector      out( 2 * n );
    for ( int i = 0; i < n; ++i )
    {
        const Vec2 v = f( grid.physical[i] );
        out[i]       = v.x();
        out[n + i]   = v.y();
    }
    return out;
}

double evaluate_in_element( const Discretization& d, SpaceKind kind, int level, const Vector& c, int element, const Vec2& xi )
{
    const auto& lm = d.mesh().level( level );
    if ( kind == SpaceKind::P1 )
    {
        const auto phi = p1_values( xi );
        const auto& n  = lm.p1_nodes[element];
        return phi[0] * c[n[0]] + phi[1] * c[n[1]] + phi[2] * c[n[2]];
    }
    require( kind == SpaceKind::P2, "scalar evaluation needs a scalar space" );
    const auto phi = p2_values( xi );
    const auto& n  = lm.p2_nodes[element];
    double      v  = 0.0;
    for ( int k = 0; k < 6; ++k )
    {
        v += phi[k] * c[n[k]];
    }
    return v;
}

Vec2 evaluate_vector_in_element( const Discretization& d, int level, const Vector& c, int element, const Vec2& xi )
{
    const auto& lm     = d.mesh().level( level );
    const int   offset = d.num_nodes( SpaceKind::P2Vector, level );
    const auto  phi    = p2_values( xi );
    const auto& n      = lm.p2_nodes[element];
    Vec2        v      = Vec2::Zero();
    for ( int k = 0; k < 6; ++k )
    {
        v.x() += phi[k] * c[n[k]];
        v.y() += phi[k] * c[offset + n[k]];
    }
    return v;
}

std::optional< double > evaluate_at( const FieldFunction& f, const Vec2& x )
{
    const Discretization& d   = *f.space.discretization;
    const auto            loc = d.mesh().locate( f.space.level, x );
    if ( loc.element < 0 )
    {
        return std::nullopt;
    }
    return evaluate_in_element( d, f.space.kind, f.space.level, f.coefficients, loc.element, loc.local );
}

std::optional< Vec2 > evaluate_vector_at( const FieldFunction& f, const Vec2& x )
{
    require( f.space.kind == SpaceKind::P2Vector, "vector evaluation needs a vector space" );
    const Discretization& d   = *f.space.discretization;
    const auto            loc = d.mesh().locate( f.space.level, x );
    if ( loc.element < 0 )
    {
        return std::nullopt;
    }
    return evaluate_vector_in_element( d, f.space.level, f.coefficients, loc.element, loc.local );
}

double integrate( const Discretization& d, SpaceKind kind, int level, const Vector& c )
{
    require( kind != SpaceKind::P2Vector, "integration needs a scalar field" );
    require( c.size() == d.num_nodes( kind, level ), "coefficient vector does not match the space dimension" );
    const auto& geo   = d.geometry( level, 6 );
    const auto& basis = basis_table( 6 );
    const auto& lm    = d.mesh().level( level );
    const int   nq    = geo.num_points;
    const int   ne    = lm.num_elements();

    std::vector< double > partial( ne );
#pragma omp parallel for schedule( static )
    for ( int e = 0; e < ne; ++e )
    {
        double s = 0.0;
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
            s += geo.weight[static_cast< std::size_t >( e ) * nq + q] * v;
        }
        partial[e] = s;
    }
    double total = 0.0;
    for ( double p : partial )
    {
        total += p;
    }
    return total;
}

double integrate( const FieldFunction& f )
{
    return integrate( *f.space.discretization, f.space.kind, f.space.level, f.coefficients );
}

double domain_area( const Discretization& d, int level )
{
    const auto& geo   = d.geometry( level, 6 );
    double      total = 0.0;
    for ( double w : geo.weight )
    {
        total += w;
    }
    return total;
}

} // namespace tala::fem
