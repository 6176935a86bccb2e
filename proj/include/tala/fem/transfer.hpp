#pragma once

#include "tala/fem/space.hpp"

#include <Eigen/Sparse>

namespace tala::fem {

/// Nodal-interpolation prolongation from a level to the next finer one; restriction is
/// its transpose. Vector spaces apply the scalar stencil per component.
class Transfer
{
 public:
    using Matrix = Eigen::SparseMatrix< double, Eigen::RowMajor >;

    Transfer( const Discretization& d, SpaceKind kind, int coarse_level );

    int       coarse_level() const { return coarse_level_; }
    SpaceKind kind() const { return kind_; }

    void prolongate( const Vector& coarse, Vector& fine ) const;
    void restrict_to_coarse( const Vector& fine, Vector& coarse ) const;

    const Matrix& matrix() const { return p_; }

 private:
    SpaceKind kind_;
    int       coarse_level_;
    Matrix    p_;
    Matrix    pt_;
};

FieldFunction prolongate( const FieldFunction& coarse, int fine_level );
FieldFunction restrict_field( const FieldFunction& fine, int coarse_level );

} // namespace tala::fem
