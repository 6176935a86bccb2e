#include "tala/geometry/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tala::geometry {

namespace {

constexpr double radius_tolerance = 1e-10;

double signed_area( const Vec2& a, const Vec2& b, const Vec2& c )
{
    return 0.5 * ( ( b.x() - a.x() ) * ( c.y() - a.y() ) - ( b.y() - a.y() ) * ( c.x() - a.x() ) );
}

BoundaryTag edge_tag( BoundaryTag a, BoundaryTag b )
{
    return ( a == b && a != BoundaryTag::Inner ) ? a : BoundaryTag::Inner;
}

} // namespace

// ---------------------------------------------------------------------------------------------
// Macro mesh
// ---------------------------------------------------------------------------------------------

MacroMesh build_annulus_macro_mesh( int n_tangential, int n_radial, double r_cmb, double r_surface )
{
    if ( n_tangential < 3 )
    {
        throw std::invalid_argument( "annulus macro mesh needs at least 3 polygon sides" );
    }
    if ( n_radial < 1 )
    {
        throw std::invalid_argument( "annulus macro mesh needs at least one radial layer" );
    }
    if ( !( r_cmb > 0.0 ) || !( r_surface > r_cmb ) )
    {
        throw std::invalid_argument( "annulus radii must satisfy 0 < r_cmb < r_surface" );
    }

    MacroMesh mesh;
    mesh.n_tangential = n_tangential;
    mesh.n_radial     = n_radial;
    mesh.r_cmb        = r_cmb;
    mesh.r_surface    = r_surface;

    const auto vertex_index = [n_tangential]( int i, int j ) { return j * n_tangential + ( i % n_tangential ); };

    for ( int j = 0; j <= n_radial; ++j )
    {
        const double r = mesh.layer_radius( j );
        for ( int i = 0; i < n_tangential; ++i )
        {
            const double phi = 2.0 * std::numbers::pi * i / n_tangential;
            mesh.vertices.emplace_back( r * std::cos( phi ), r * std::sin( phi ) );
            mesh.vertex_tags.push_back(
                j == 0 ? BoundaryTag::CMB : ( j == n_radial ? BoundaryTag::Surface : BoundaryTag::Inner ) );
        }
    }

    for ( int j = 0; j < n_radial; ++j )
    {
        for ( int i = 0; i < n_tangential; ++i )
        {
            const int a = vertex_index( i, j );
            const int b = vertex_index( i + 1, j );
            const int c = vertex_index( i + 1, j + 1 );
            const int d = vertex_index( i, j + 1 );
            for ( std::array< int, 3 > tri : { std::array< int, 3 >{ a, b, c }, std::array< int, 3 >{ a, c, d } } )
            {
                if ( signed_area( mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]] ) < 0.0 )
                {
                    std::swap( tri[1], tri[2] );
                }
                mesh.triangles.push_back( tri );
                mesh.triangle_sector.push_back( i );
                mesh.triangle_layer.push_back( j );
            }
        }
    }

    std::map< std::pair< int, int >, int > edge_lookup;
    for ( const auto& tri : mesh.triangles )
    {
        std::array< int, 3 > local{};
        for ( int k = 0; k < 3; ++k )
        {
            const int v0  = tri[k];
            const int v1  = tri[( k + 1 ) % 3];
            const auto key = std::minmax( v0, v1 );
            auto [it, inserted] = edge_lookup.try_emplace( { key.first, key.second }, static_cast< int >( mesh.edges.size() ) );
            if ( inserted )
            {
                mesh.edges.push_back( { key.first, key.second } );
                mesh.edge_tags.push_back( edge_tag( mesh.vertex_tags[v0], mesh.vertex_tags[v1] ) );
            }
            local[k] = it->second;
        }
        mesh.triangle_edges.push_back( local );
    }
    return mesh;
}

// ---------------------------------------------------------------------------------------------
// Blending
// ---------------------------------------------------------------------------------------------

BlendingMap::BlendingMap( int n_tangential, double r_cmb, double r_surface, bool enabled )
: n_tangential_( n_tangential )
, r_cmb_( r_cmb )
, r_surface_( r_surface )
, inv_cos_( 1.0 / std::cos( std::numbers::pi / n_tangential ) )
, enabled_( enabled )
{}

int BlendingMap::sector_of( const Vec2& x ) const
{
    double phi = std::atan2( x.y(), x.x() );
    if ( phi < 0.0 )
    {
        phi += 2.0 * std::numbers::pi;
    }
    const int sector = static_cast< int >( std::floor( phi * n_tangential_ / ( 2.0 * std::numbers::pi ) ) );
    return std::clamp( sector, 0, n_tangential_ - 1 );
}

Vec2 BlendingMap::scaled_axis( int sector ) const
{
    const double phi = 2.0 * std::numbers::pi * ( sector + 0.5 ) / n_tangential_;
    return inv_cos_ * Vec2( std::cos( phi ), std::sin( phi ) );
}

void BlendingMap::check_radius( double r ) const
{
    if ( r < r_cmb_ * ( 1.0 - radius_tolerance ) || r > r_surface_ * ( 1.0 + radius_tolerance ) )
    {
        throw std::domain_error( "point outside the blended annulus (radius " + std::to_string( r ) + ")" );
    }
}

double BlendingMap::blended_radius( const Vec2& x_tilde ) const
{
    const double r = scaled_axis( sector_of( x_tilde ) ).dot( x_tilde );
    check_radius( r );
    return r;
}

Vec2 BlendingMap::blend( const Vec2& x_tilde ) const
{
    return blend( x_tilde, sector_of( x_tilde ) );
}

Vec2 BlendingMap::blend( const Vec2& x_tilde, int sector ) const
{
    if ( !enabled_ )
    {
        return x_tilde;
    }
    const double r = scaled_axis( sector ).dot( x_tilde );
    check_radius( r );
    return ( r / x_tilde.norm() ) * x_tilde;
}

BlendingMap::Jacobian BlendingMap::jacobian( const Vec2& x_tilde, int sector ) const
{
    if ( !enabled_ )
    {
        return { Mat2::Identity(), 1.0 };
    }
    const Vec2   a      = scaled_axis( sector );
    const double norm   = x_tilde.norm();
    const Vec2   e      = x_tilde / norm;
    const double radius = a.dot( x_tilde );
    check_radius( radius );

    // d/dx [ (a.x) x / |x| ] = e a^T + (a.x)/|x| (I - e e^T)
    Mat2 J = e * a.transpose() + ( radius / norm ) * ( Mat2::Identity() - e * e.transpose() );
    const double a_e = a.dot( e );
    return { J, a_e * a_e };
}

Vec2 BlendingMap::unblend( const Vec2& x ) const
{
    if ( !enabled_ )
    {
        return x;
    }
    const double r = x.norm();
    check_radius( r );
    const Vec2 e = x / r;
    return ( r / scaled_axis( sector_of( x ) ).dot( e ) ) * e;
}

// ---------------------------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------------------------

int VertexGrid::id( int macro, int a, int b ) const
{
    return ids[static_cast< std::size_t >( macro ) * points_per_macro() + local_point_index( n, a, b )];
}

namespace {

VertexGrid build_grid( const MacroMesh& macro, const BlendingMap& blending, int grid_level )
{
    VertexGrid grid;
    grid.grid_level = grid_level;
    grid.n          = 1 << grid_level;
    const int n     = grid.n;

    std::vector< int >                 vertex_ids( macro.vertices.size(), -1 );
    std::vector< std::vector< int > >  edge_ids( macro.edges.size(), std::vector< int >( n + 1, -1 ) );
    grid.ids.assign( static_cast< std::size_t >( macro.num_triangles() ) * grid.points_per_macro(), -1 );

    const auto new_point = [&]( int m, const Vec2& x_tilde, BoundaryTag tag ) {
        grid.reference.push_back( x_tilde );
        grid.physical.push_back( blending.blend( x_tilde, macro.triangle_sector[m] ) );
        grid.tags.push_back( tag );
        grid.owner_macro.push_back( m );
        return static_cast< int >( grid.reference.size() ) - 1;
    };

    for ( int m = 0; m < macro.num_triangles(); ++m )
    {
        const auto& tri = macro.triangles[m];
        const Vec2& v0  = macro.vertices[tri[0]];
        const Vec2  d1  = macro.vertices[tri[1]] - v0;
        const Vec2  d2  = macro.vertices[tri[2]] - v0;

        for ( int b = 0; b <= n; ++b )
        {
            for ( int a = 0; a <= n - b; ++a )
            {
                const Vec2 x_tilde = v0 + ( static_cast< double >( a ) / n ) * d1 + ( static_cast< double >( b ) / n ) * d2;
                int*       slot    = nullptr;
                BoundaryTag tag    = BoundaryTag::Inner;

                int corner = -1;
                if ( a == 0 && b == 0 )
                    corner = 0;
                else if ( a == n && b == 0 )
                    corner = 1;
                else if ( a == 0 && b == n )
                    corner = 2;

                if ( corner >= 0 )
                {
                    slot = &vertex_ids[tri[corner]];
                    tag  = macro.vertex_tags[tri[corner]];
                }
                else
                {
                    int local_edge = -1;
                    int param      = 0;
                    if ( b == 0 )
                    {
                        local_edge = 0;
                        param      = a;
                    }
                    else if ( a + b == n )
                    {
                        local_edge = 1;
                        param      = b;
                    }
                    else if ( a == 0 )
                    {
                        local_edge = 2;
                        param      = n - b;
                    }
                    if ( local_edge >= 0 )
                    {
                        const int e        = macro.triangle_edges[m][local_edge];
                        const int from     = tri[local_edge];
                        const int position = ( macro.edges[e][0] == from ) ? param : n - param;
                        slot               = &edge_ids[e][position];
                        tag                = macro.edge_tags[e];
                    }
                }

                int id = -1;
                if ( slot != nullptr )
                {
                    if ( *slot < 0 )
                    {
                        *slot = new_point( m, x_tilde, tag );
                    }
                    id = *slot;
                }
                else
                {
                    id = new_point( m, x_tilde, tag );
                }
                grid.ids[static_cast< std::size_t >( m ) * grid.points_per_macro() + local_point_index( n, a, b )] = id;
            }
        }
    }
    return grid;
}

LevelMesh build_level( const MacroMesh& macro, const VertexGrid& p1, const VertexGrid& p2, int level )
{
    LevelMesh mesh;
    mesh.level  = level;
    mesh.n      = 1 << level;
    const int n = mesh.n;

    const std::size_t count = static_cast< std::size_t >( macro.num_triangles() ) * n * n;
    mesh.p1_nodes.resize( count );
    mesh.p2_nodes.resize( count );
    mesh.macro_of.resize( count );
    mesh.corners.resize( count );
    mesh.touches_surface.resize( count );

    for ( int m = 0; m < macro.num_triangles(); ++m )
    {
        const auto& tri = macro.triangles[m];
        const Vec2& v0  = macro.vertices[tri[0]];
        const Vec2  d1  = macro.vertices[tri[1]] - v0;
        const Vec2  d2  = macro.vertices[tri[2]] - v0;
        const auto  point = [&]( int a, int b ) {
            return Vec2( v0 + ( static_cast< double >( a ) / n ) * d1 + ( static_cast< double >( b ) / n ) * d2 );
        };

        const auto emit = [&]( std::size_t e, std::array< std::array< int, 2 >, 3 > c ) {
            mesh.macro_of[e] = m;
            bool on_surface  = false;
            for ( int k = 0; k < 3; ++k )
            {
                mesh.p1_nodes[e][k] = p1.id( m, c[k][0], c[k][1] );
                mesh.p2_nodes[e][k] = p2.id( m, 2 * c[k][0], 2 * c[k][1] );
                mesh.corners[e][k]  = point( c[k][0], c[k][1] );
                on_surface          = on_surface || p1.tags[mesh.p1_nodes[e][k]] == BoundaryTag::Surface;
            }
            for ( int k = 0; k < 3; ++k )
            {
                const auto& s = c[k];
                const auto& t = c[( k + 1 ) % 3];
                mesh.p2_nodes[e][3 + k] = p2.id( m, s[0] + t[0], s[1] + t[1] );
            }
            mesh.touches_surface[e] = on_surface ? 1 : 0;
        };

        const std::size_t base = static_cast< std::size_t >( m ) * n * n;
        for ( int b = 0; b < n; ++b )
        {
            for ( int a = 0; a < n - b; ++a )
            {
                emit( base + up_element_index( n, a, b ), { { { a, b }, { a + 1, b }, { a, b + 1 } } } );
            }
        }
        for ( int b = 0; b + 1 < n; ++b )
        {
            for ( int a = 0; a + 1 < n - b; ++a )
            {
                emit( base + down_element_index( n, a, b ), { { { a + 1, b + 1 }, { a, b + 1 }, { a + 1, b } } } );
            }
        }
    }
    return mesh;
}

} // namespace

RefinedMesh::RefinedMesh( MacroMesh macro, int max_level, bool blending_enabled )
: macro_( std::move( macro ) )
, blending_( macro_.n_tangential, macro_.r_cmb, macro_.r_surface, blending_enabled )
, max_level_( max_level )
{
    if ( max_level < 0 )
    {
        throw std::invalid_argument( "refinement level must be nonnegative" );
    }
    for ( int g = 0; g <= max_level + 1; ++g )
    {
        grids_.push_back( build_grid( macro_, blending_, g ) );
    }
    for ( int l = 0; l <= max_level; ++l )
    {
        levels_.push_back( build_level( macro_, grids_[l], grids_[l + 1], l ) );
    }
}

const LevelMesh& RefinedMesh::level( int l ) const
{
    require( l >= 0 && l <= max_level_, "level outside the refinement hierarchy" );
    return levels_[l];
}

const VertexGrid& RefinedMesh::grid( int grid_level ) const
{
    require( grid_level >= 0 && grid_level <= max_level_ + 1, "grid level outside the refinement hierarchy" );
    return grids_[grid_level];
}

std::vector< int > RefinedMesh::nodes_with_tag( int level, BoundaryTag tag ) const
{
    const VertexGrid&  g = p2_grid( level );
    std::vector< int > out;
    for ( int i = 0; i < g.num_points(); ++i )
    {
        if ( g.tags[i] == tag )
        {
            out.push_back( i );
        }
    }
    return out;
}

std::pair< int, Vec2 > RefinedMesh::locate_macro( const Vec2& x_tilde ) const
{
    const int    sector = blending_.sector_of( x_tilde );
    const double phi    = 2.0 * std::numbers::pi * ( sector + 0.5 ) / macro_.n_tangential;
    const double radius = Vec2( std::cos( phi ), std::sin( phi ) ).dot( x_tilde ) /
                          std::cos( std::numbers::pi / macro_.n_tangential );
    const double fraction = ( radius - macro_.r_cmb ) / ( macro_.r_surface - macro_.r_cmb );
    const int    layer    = std::clamp( static_cast< int >( std::floor( fraction * macro_.n_radial ) ), 0, macro_.n_radial - 1 );

    const auto reference = [&]( int m ) {
        const auto& tri = macro_.triangles[m];
        Mat2        F;
        F.col( 0 ) = macro_.vertices[tri[1]] - macro_.vertices[tri[0]];
        F.col( 1 ) = macro_.vertices[tri[2]] - macro_.vertices[tri[0]];
        return Vec2( F.inverse() * ( x_tilde - macro_.vertices[tri[0]] ) );
    };

    const int  first = 2 * ( layer * macro_.n_tangential + sector );
    const Vec2 st    = reference( first );
    if ( std::min( { st.x(), st.y(), 1.0 - st.x() - st.y() } ) >= -1e-12 )
    {
        return { first, st };
    }
    return { first + 1, reference( first + 1 ) };
}

ElementLocation RefinedMesh::locate_in_macro( int level, int macro, const Vec2& st ) const
{
    const int    n = 1 << level;
    const double X = st.x() * n;
    const double Y = st.y() * n;
    const int    a = std::clamp( static_cast< int >( std::floor( X ) ), 0, n - 1 );
    const int    b = std::clamp( static_cast< int >( std::floor( Y ) ), 0, n - 1 - a );
    const double fx = X - a;
    const double fy = Y - b;

    const std::size_t base = static_cast< std::size_t >( macro ) * n * n;
    if ( fx + fy <= 1.0 || a + b == n - 1 )
    {
        return { static_cast< int >( base + up_element_index( n, a, b ) ), Vec2( fx, fy ) };
    }
    return { static_cast< int >( base + down_element_index( n, a, b ) ), Vec2( 1.0 - fx, 1.0 - fy ) };
}

ElementLocation RefinedMesh::locate( int level, const Vec2& x ) const
{
    Vec2 x_tilde;
    try
    {
        x_tilde = blending_.unblend( x );
        if ( !blending_.enabled() )
        {
            blending_.blended_radius( x_tilde );
        }
    }
    catch ( const std::domain_error& )
    {
        return {};
    }
    const auto [macro, st] = locate_macro( x_tilde );
    return locate_in_macro( level, macro, st );
}

std::vector< int > RefinedMesh::injection( int coarse_grid_level, int fine_grid_level ) const
{
    require( coarse_grid_level <= fine_grid_level, "injection needs a finer target grid" );
    const VertexGrid& coarse = grid( coarse_grid_level );
    const VertexGrid& fine   = grid( fine_grid_level );
    const int         ratio  = 1 << ( fine_grid_level - coarse_grid_level );

    std::vector< int > map( coarse.num_points(), -1 );
    for ( int m = 0; m < macro_.num_triangles(); ++m )
    {
        for ( int b = 0; b <= coarse.n; ++b )
        {
            for ( int a = 0; a <= coarse.n - b; ++a )
            {
                map[coarse.id( m, a, b )] = fine.id( m, a * ratio, b * ratio );
            }
        }
    }
    return map;
}

std::uint64_t RefinedMesh::descriptor_hash() const
{
    std::uint64_t hash  = 1469598103934665603ULL;
    const auto    mix   = [&hash]( const void* data, std::size_t size ) {
        const auto* bytes = static_cast< const unsigned char* >( data );
        for ( std::size_t i = 0; i < size; ++i )
        {
            hash ^= bytes[i];
            hash *= 1099511628211ULL;
        }
    };
    const std::int64_t ints[] = { macro_.n_tangential, macro_.n_radial, max_level_, blending_.enabled() ? 1 : 0 };
    const double       reals[] = { macro_.r_cmb, macro_.r_surface };
    mix( ints, sizeof( ints ) );
    mix( reals, sizeof( reals ) );
    return hash;
}

RefinedMesh refine( const MacroMesh& mesh, int level )
{
    return RefinedMesh( mesh, level );
}

double element_diameter( const std::array< Vec2, 3 >& c )
{
    return std::max( { ( c[1] - c[0] ).norm(), ( c[2] - c[1] ).norm(), ( c[0] - c[2] ).norm() } );
}

double element_diameter( const RefinedMesh& mesh, int level, int element )
{
    return element_diameter( mesh.level( level ).corners.at( element ) );
}

double min_element_diameter( const RefinedMesh& mesh, int level )
{
    double h = std::numeric_limits< double >::max();
    for ( int e = 0; e < mesh.level( level ).num_elements(); ++e )
    {
        h = std::min( h, element_diameter( mesh, level, e ) );
    }
    return h;
}

} // namespace tala::geometry
