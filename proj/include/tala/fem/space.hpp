#pragma once

#include "tala/common.hpp"
#include "tala/geometry/mesh.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace tala::fem {

enum class SpaceKind
{
    P1,
    P2,
    P2Vector
};

const char* to_string( SpaceKind kind );

class Discretization;

/// Scalar P1 / scalar P2 / vector P2 space on one refinement level.
/// Vector coefficients are stored component-blocked: all x values, then all y values.
struct FunctionSpace
{
    const Discretization* discretization = nullptr;
    SpaceKind             kind           = SpaceKind::P1;
    int                   level          = 0;

    int num_nodes() const;
    int dim() const;

    bool operator==( const FunctionSpace& other ) const
    {
        return discretization == other.discretization && kind == other.kind && level == other.level;
    }
};

struct FieldFunction
{
    FunctionSpace space;
    Vector        coefficients;

    FieldFunction() = default;
    explicit FieldFunction( const FunctionSpace& s );
    FieldFunction( const FunctionSpace& s, Vector values );
};

/// Per quadrature point geometry of one level: physical point, inverse-transpose
/// Jacobian of the composed map B o F, and the weight times |det|.
struct GeometryCache
{
    int                 num_points = 0;
    std::vector< Vec2 > x;
    std::vector< Mat2 > inv_jacobian_t;
    std::vector< double > weight;
};

/// Element-node incidence in CSR form; entries are ordered by element index so that
/// summation at shared nodes happens in a fixed order.
struct NodeIncidence
{
    std::vector< int > offsets;
    std::vector< int > element;
    std::vector< int > local;
};

/// Reference shape function tables for one quadrature rule.
struct BasisTable
{
    int                                  degree = 0;
    int                                  num_points = 0;
    std::vector< std::array< double, 3 > > p1;
    std::vector< std::array< double, 6 > > p2;
    std::vector< std::array< Vec2, 6 > >   p2_grad;
    std::array< Vec2, 3 >                  p1_grad;
};

const BasisTable& basis_table( int degree );

/// Shared mesh hierarchy with lazily built per-level caches.
class Discretization
{
 public:
    explicit Discretization( std::shared_ptr< const geometry::RefinedMesh > mesh );

    const geometry::RefinedMesh&                   mesh() const { return *mesh_; }
    std::shared_ptr< const geometry::RefinedMesh > mesh_ptr() const { return mesh_; }
    int                                            max_level() const { return mesh_->max_level(); }

    FunctionSpace space( SpaceKind kind, int level ) const;
    int           num_nodes( SpaceKind kind, int level ) const;

    /// Grid that carries the nodes of a space on a level.
    const geometry::VertexGrid& node_grid( SpaceKind kind, int level ) const;

    const GeometryCache& geometry( int level, int degree ) const;
    const NodeIncidence& incidence( SpaceKind kind, int level ) const;

    /// Nodal interpolation of a function of the physical position.
    Vector interpolate( SpaceKind kind, int level, const std::function< double( const Vec2& ) >& f ) const;
    Vector interpolate_vector( int level, const std::function< Vec2( const Vec2& ) >& f ) const;

 private:
    std::shared_ptr< const geometry::RefinedMesh > mesh_;

    mutable std::mutex                                                 mutex_;
    mutable std::map< std::pair< int, int >, std::unique_ptr< GeometryCache > > geometry_;
    mutable std::map< std::pair< int, int >, std::unique_ptr< NodeIncidence > > incidence_;
};

/// Evaluate a field at a physical point; empty when the point is outside the annulus.
std::optional< double > evaluate_at( const FieldFunction& f, const Vec2& x );
std::optional< Vec2 >   evaluate_vector_at( const FieldFunction& f, const Vec2& x );

/// Evaluation inside a known micro element at reference coordinates.
double evaluate_in_element( const Discretization& d, SpaceKind kind, int level, const Vector& c, int element, const Vec2& xi );
Vec2   evaluate_vector_in_element( const Discretization& d, int level, const Vector& c, int element, const Vec2& xi );

/// Quadrature of a scalar field over the blended annulus (vector fields are rejected).
double integrate( const FieldFunction& f );
double integrate( const Discretization& d, SpaceKind kind, int level, const Vector& c );

/// Area of the blended domain as seen by the level-l quadrature.
double domain_area( const Discretization& d, int level );

} // namespace tala::fem
