#include "tala/fem/quadrature.hpp"

#include <stdexcept>

namespace tala::fem {

namespace {

void add_orbit_3( QuadratureRule& rule, double w, double a, double b )
{
    // barycentric (a, b, b) and its rotations
    const std::array< std::array< double, 3 >, 3 > lambda = { { { a, b, b }, { b, a, b }, { b, b, a } } };
    for ( const auto& l : lambda )
    {
        rule.points.emplace_back( l[1], l[2] );
        rule.weights.push_back( 0.5 * w );
    }
}

void add_orbit_6( QuadratureRule& rule, double w, double a, double b, double c )
{
    const std::array< std::array< double, 3 >, 6 > lambda = {
        { { a, b, c }, { a, c, b }, { b, a, c }, { b, c, a }, { c, a, b }, { c, b, a } } };
    for ( const auto& l : lambda )
    {
        rule.points.emplace_back( l[1], l[2] );
        rule.weights.push_back( 0.5 * w );
    }
}

QuadratureRule make_degree4()
{
    QuadratureRule rule;
    rule.degree = 4;
    add_orbit_3( rule, 0.223381589678011, 0.108103018168070, 0.445948490915965 );
    add_orbit_3( rule, 0.109951743655322, 0.816847572980459, 0.091576213509771 );
    return rule;
}

QuadratureRule make_degree6()
{
    QuadratureRule rule;
    rule.degree = 6;
    add_orbit_3( rule, 0.116786275726379, 0.501426509658179, 0.249286745170910 );
    add_orbit_3( rule, 0.050844906370207, 0.873821971016996, 0.063089014491502 );
    add_orbit_6( rule, 0.082851075618374, 0.053145049844817, 0.310352451033784, 0.636502499121399 );
    return rule;
}

} // namespace

const QuadratureRule& quadrature_rule( int degree )
{
    static const QuadratureRule degree4 = make_degree4();
    static const QuadratureRule degree6 = make_degree6();
    if ( degree <= 4 )
    {
        return degree4;
    }
    if ( degree <= 6 )
    {
        return degree6;
    }
    throw std::invalid_argument( "no quadrature rule above degree 6" );
}

std::array< double, 3 > p1_values( const Vec2& xi )
{
    return { 1.0 - xi.x() - xi.y(), xi.x(), xi.y() };
}

std::array< Vec2, 3 > p1_gradients()
{
    return { Vec2( -1.0, -1.0 ), Vec2( 1.0, 0.0 ), Vec2( 0.0, 1.0 ) };
}

std::array< double, 6 > p2_values( const Vec2& xi )
{
    const double l0 = 1.0 - xi.x() - xi.y();
    const double l1 = xi.x();
    const double l2 = xi.y();
    return { l0 * ( 2.0 * l0 - 1.0 ),
             l1 * ( 2.0 * l1 - 1.0 ),
             l2 * ( 2.0 * l2 - 1.0 ),
             4.0 * l0 * l1,
             4.0 * l1 * l2,
             4.0 * l2 * l0 };
}

std::array< Vec2, 6 > p2_gradients( const Vec2& xi )
{
    const double l0 = 1.0 - xi.x() - xi.y();
    const double l1 = xi.x();
    const double l2 = xi.y();
    const Vec2   g0( -1.0, -1.0 ), g1( 1.0, 0.0 ), g2( 0.0, 1.0 );
    return { ( 4.0 * l0 - 1.0 ) * g0,
             ( 4.0 * l1 - 1.0 ) * g1,
             ( 4.0 * l2 - 1.0 ) * g2,
             4.0 * ( l1 * g0 + l0 * g1 ),
             4.0 * ( l2 * g1 + l1 * g2 ),
             4.0 * ( l0 * g2 + l2 * g0 ) };
}

} // namespace tala::fem
