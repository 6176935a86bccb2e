#pragma once

#include "tala/fem/operators.hpp"
#include "tala/fem/space.hpp"

#include <functional>

namespace tala::constraints {

/// Surface velocity (tangential), nondimensional boundary temperatures.
struct BoundaryConditionSet
{
    std::function< Vec2( const Vec2& ) > surface_velocity; // empty means no-slip
    double                               surface_temperature = 0.0;
    double                               cmb_temperature     = 1.0;
};

enum class ProjectionKind
{
    FreeSlip,
    ZeroMean,
    Composite
};

/// Node sets and CMB normals of one level, and the projections built on them.
///
/// Velocity projections act on blocked P2 vectors; the composite velocity projection
/// removes the normal component at CMB nodes and zeroes surface rows (pinned Dirichlet
/// rows of the reduced system).
class BoundaryProjection
{
 public:
    BoundaryProjection( const fem::Discretization& d, int level );

    int level() const { return level_; }

    const std::vector< int >&  cmb_nodes() const { return cmb_; }
    const std::vector< int >&  surface_nodes() const { return surface_; }
    const std::vector< Vec2 >& normals() const { return normals_; }

    void apply_freeslip( Vector& u ) const;
    void mask_surface( Vector& u ) const;
    void apply_velocity( Vector& u ) const;
    void apply_zero_mean( Vector& p ) const;
    void mask_scalar_surface( Vector& t ) const;
    void mask_scalar_boundary( Vector& t ) const;

    fem::FieldFunction apply_freeslip( const fem::FieldFunction& u ) const;
    fem::FieldFunction apply_zero_mean( const fem::FieldFunction& p ) const;

    Projection velocity_projection() const;
    Projection pressure_projection() const;
    Projection projection( ProjectionKind kind ) const;

    /// max |u.n| over CMB nodes.
    double max_normal_velocity( const Vector& u ) const;

 private:
    int                 level_;
    int                 n2_;
    std::vector< int >  cmb_;
    std::vector< int >  surface_;
    std::vector< Vec2 > normals_;
};

/// Arithmetic mean removal.
void zero_mean( Vector& p );

/// c_p = -integral(p) / |Omega| on the quadrature of the pressure level.
double pressure_shift_constant( const fem::FieldFunction& p );

/// Surface velocity interpolant: prescribed values at surface P2 nodes, zero elsewhere.
Vector surface_velocity_interpolant( const fem::Discretization& d, int level, const BoundaryConditionSet& bcs );

/// Temperature boundary values at surface and CMB P2 nodes, zero elsewhere.
Vector temperature_boundary_values( const fem::Discretization& d, int level, const BoundaryConditionSet& bcs );

struct ReducedRhs
{
    Vector f;
    Vector g;
};

/// Block row modification for the surface Dirichlet data: returns
/// (P_v(f - A u_int) with surface rows zero, P_p(g - Bbar u_int)).
ReducedRhs eliminate_dirichlet( const BoundaryProjection& proj, const fem::FormOperator& A, const LinearOperator& divergence,
                                const Vector& f, const Vector& g, const Vector& u_int );

/// Operator with Dirichlet rows replaced by identity: y = op(x with rows zeroed), y[rows] = x[rows].
LinearOperator dirichlet_masked( LinearOperator op, std::vector< int > rows );
Vector         dirichlet_masked_diagonal( Vector diag, const std::vector< int >& rows );

} // namespace tala::constraints
