#pragma once

#include "tala/common.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace tala::geometry {

enum class BoundaryTag : std::uint8_t
{
    Inner   = 0,
    CMB     = 1,
    Surface = 2
};

/// Hollow regular polygon split into trapezoid layers, two triangles per trapezoid.
///
/// Vertex (i, j) sits at angle 2*pi*i/n_tangential on the polygon of circumradius
/// layer_radius(j); corners therefore lie exactly on the target circles.
struct MacroMesh
{
    int    n_tangential = 0;
    int    n_radial     = 0;
    double r_cmb        = 0.0;
    double r_surface    = 0.0;

    std::vector< Vec2 >                  vertices;
    std::vector< BoundaryTag >           vertex_tags;
    std::vector< std::array< int, 3 > >  triangles;
    std::vector< int >                   triangle_sector;
    std::vector< int >                   triangle_layer;

    /// Unique edges (lower vertex id first) with their tags; triangle_edges[t][k]
    /// is the edge joining local vertices k and (k + 1) % 3.
    std::vector< std::array< int, 2 > >  edges;
    std::vector< BoundaryTag >           edge_tags;
    std::vector< std::array< int, 3 > >  triangle_edges;

    double layer_radius( int j ) const { return r_cmb + ( r_surface - r_cmb ) * j / n_radial; }
    int    num_triangles() const { return static_cast< int >( triangles.size() ); }
    int    num_vertices() const { return static_cast< int >( vertices.size() ); }
};

MacroMesh build_annulus_macro_mesh( int n_tangential, int n_radial, double r_cmb, double r_surface );

/// Angle-preserving map from the polygonal domain onto the exact annulus.
///
/// Inside polygon sector i the map is B(x) = (a_i . x) x / |x| with a_i = m_i / cos(pi / n),
/// m_i the unit vector through the middle of the sector. Every chord of the sector is sent
/// to its circle, and the radial fraction between two chords is preserved.
class BlendingMap
{
 public:
    struct Jacobian
    {
        Mat2   matrix;
        double det;
    };

    BlendingMap() = default;
    BlendingMap( int n_tangential, double r_cmb, double r_surface, bool enabled = true );

    bool   enabled() const { return enabled_; }
    int    sector_of( const Vec2& x ) const;

    Vec2     blend( const Vec2& x_tilde ) const;
    Vec2     blend( const Vec2& x_tilde, int sector ) const;
    Jacobian jacobian( const Vec2& x_tilde, int sector ) const;
    Jacobian jacobian( const Vec2& x_tilde ) const { return jacobian( x_tilde, sector_of( x_tilde ) ); }

    /// Inverse of blend; throws std::domain_error outside the annulus.
    Vec2 unblend( const Vec2& x ) const;

    /// Radius a point of the polygonal domain is sent to (throws std::domain_error outside).
    double blended_radius( const Vec2& x_tilde ) const;

 private:
    int    n_tangential_ = 0;
    double r_cmb_        = 0.0;
    double r_surface_    = 0.0;
    double inv_cos_      = 1.0;
    bool   enabled_      = true;

    Vec2 scaled_axis( int sector ) const;
    void check_radius( double r ) const;
};

/// Nodes of a uniform grid with 2^grid_level intervals along every macro edge,
/// deduplicated across macro interfaces.
struct VertexGrid
{
    int grid_level = 0;
    int n          = 1;

    std::vector< int >         ids; // macro-major, local_point_index order
    std::vector< Vec2 >        reference;
    std::vector< Vec2 >        physical;
    std::vector< BoundaryTag > tags;
    std::vector< int >         owner_macro;

    int num_points() const { return static_cast< int >( reference.size() ); }
    int points_per_macro() const { return ( n + 1 ) * ( n + 2 ) / 2; }
    int id( int macro, int a, int b ) const;
};

inline int local_point_index( int n, int a, int b )
{
    return b * ( n + 1 ) - b * ( b - 1 ) / 2 + a;
}

/// Micro elements of one refinement level.
///
/// Element e of macro m with n = 2^level: "up" triangles (a, b), (a+1, b), (a, b+1) are
/// stored first, then "down" triangles (a+1, b+1), (a, b+1), (a+1, b). P2 node k of an
/// element is vertex k for k < 3 and the midpoint of edge (k-3, k-2 mod 3) otherwise.
struct LevelMesh
{
    int level = 0;
    int n     = 1;

    std::vector< std::array< int, 3 > >  p1_nodes; // into grid(level)
    std::vector< std::array< int, 6 > >  p2_nodes; // into grid(level + 1)
    std::vector< int >                   macro_of;
    std::vector< std::array< Vec2, 3 > > corners;  // unblended vertex coordinates
    std::vector< std::uint8_t >          touches_surface;

    int num_elements() const { return static_cast< int >( macro_of.size() ); }
};

inline int up_element_index( int n, int a, int b )
{
    return b * n - b * ( b - 1 ) / 2 + a;
}

inline int down_element_index( int n, int a, int b )
{
    return n * ( n + 1 ) / 2 + b * ( n - 1 ) - b * ( b - 1 ) / 2 + a;
}

/// Position of a point inside one micro element.
struct ElementLocation
{
    int  element = -1;
    Vec2 local   = Vec2::Zero(); // reference coordinates (xi_1, xi_2)
};

/// Macro mesh with a hierarchy of uniformly red-refined levels 0..max_level.
class RefinedMesh
{
 public:
    RefinedMesh( MacroMesh macro, int max_level, bool blending_enabled = true );

    const MacroMesh&   macro() const { return macro_; }
    const BlendingMap& blending() const { return blending_; }
    int                max_level() const { return max_level_; }

    const LevelMesh&  level( int l ) const;
    const VertexGrid& p1_grid( int l ) const { return grid( l ); }
    const VertexGrid& p2_grid( int l ) const { return grid( l + 1 ); }
    const VertexGrid& grid( int grid_level ) const;

    /// Index sets of P2 node positions on a level.
    std::vector< int > nodes_with_tag( int level, BoundaryTag tag ) const;

    /// Macro element and macro-reference coordinates of an unblended point.
    std::pair< int, Vec2 > locate_macro( const Vec2& x_tilde ) const;

    /// Micro element containing macro-reference point (s, t) of a macro.
    ElementLocation locate_in_macro( int level, int macro, const Vec2& st ) const;

    /// Micro element containing a physical point; element == -1 when outside the annulus.
    ElementLocation locate( int level, const Vec2& x ) const;

    /// Map grid ids of a coarse grid to the coinciding ids of a finer grid.
    std::vector< int > injection( int coarse_grid_level, int fine_grid_level ) const;

    /// 64-bit descriptor hash of the macro parameters and hierarchy depth.
    std::uint64_t descriptor_hash() const;

 private:
    MacroMesh                  macro_;
    BlendingMap                blending_;
    int                        max_level_;
    std::vector< VertexGrid >  grids_;
    std::vector< LevelMesh >   levels_;
};

RefinedMesh refine( const MacroMesh& mesh, int level );

/// Longest edge of a triangle.
double element_diameter( const std::array< Vec2, 3 >& corners );

/// Longest edge of the unblended micro triangle.
double element_diameter( const RefinedMesh& mesh, int level, int element );

/// Smallest element diameter on a level.
double min_element_diameter( const RefinedMesh& mesh, int level );

} // namespace tala::geometry
