#pragma once

#include "tala/common.hpp"

#include <array>
#include <vector>

namespace tala::fem {

/// Symmetric rule on the reference triangle (0,0), (1,0), (0,1).
/// Weights sum to the reference area 1/2.
struct QuadratureRule
{
    int                 degree = 0;
    std::vector< Vec2 > points;
    std::vector< double > weights;

    int size() const { return static_cast< int >( points.size() ); }
};

const QuadratureRule& quadrature_rule( int degree );

// Shape functions in barycentric ordering; P2 uses [v0, v1, v2, m01, m12, m20].
std::array< double, 3 > p1_values( const Vec2& xi );
std::array< Vec2, 3 >   p1_gradients();
std::array< double, 6 > p2_values( const Vec2& xi );
std::array< Vec2, 6 >   p2_gradients( const Vec2& xi );

} // namespace tala::fem
