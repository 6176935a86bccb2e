#include "doctest.h"

#include "dense_oracle.hpp"
#include "operator_checks.hpp"

#include "tala/fem/coefficients.hpp"
#include "tala/fem/operators.hpp"
#include "tala/fem/quadrature.hpp"
#include "tala/fem/space.hpp"
#include "tala/fem/transfer.hpp"
#include "tala/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace tala;
using namespace tala::fem;
using geometry::build_annulus_macro_mesh;
using geometry::RefinedMesh;

namespace {

std::shared_ptr< const RefinedMesh > small_mesh( int levels, bool blend = true )
{
    return std::make_shared< const RefinedMesh >( build_annulus_macro_mesh( 8, 2, 1.22, 2.22 ), levels, blend );
}

double factorial( int n )
{
    return n <= 1 ? 1.0 : n * factorial( n - 1 );
}

Vector random_vector( int n, std::mt19937_64& rng )
{
    std::uniform_real_distribution< double > u( -1, 1 );
    Vector                                   v( n );
    for ( int i = 0; i < n; ++i )
        v[i] = u( rng );
    return v;
}

} // namespace

TEST_SUITE( "femcore" )
{
    TEST_CASE( "quadrature integrates monomials exactly" )
    {
        for ( int degree : { 4, 6 } )
        {
            const auto& rule = quadrature_rule( degree );
            CHECK( rule.degree == degree );
            double wsum = 0;
            for ( double w : rule.weights )
            {
                CHECK( w > 0 );
                wsum += w;
            }
            CHECK( wsum == doctest::Approx( 0.5 ).epsilon( 1e-15 ) );
            for ( int a = 0; a <= degree; ++a )
                for ( int b = 0; a + b <= degree; ++b )
                {
                    double q = 0;
                    for ( int i = 0; i < rule.size(); ++i )
                        q += rule.weights[i] * std::pow( rule.points[i].x(), a ) * std::pow( rule.points[i].y(), b );
                    const double exact = factorial( a ) * factorial( b ) / factorial( a + b + 2 );
                    CHECK( std::abs( q - exact ) < 1e-14 );
                }
        }
        CHECK( quadrature_rule( 6 ).size() == 12 );
        CHECK( quadrature_rule( 4 ).size() == 6 );
    }

    TEST_CASE( "shape functions are nodal and sum to one" )
    {
        const Vec2 nodes[6] = { { 0, 0 }, { 1, 0 }, { 0, 1 }, { 0.5, 0 }, { 0.5, 0.5 }, { 0, 0.5 } };
        for ( int i = 0; i < 6; ++i )
        {
            const auto v = p2_values( nodes[i] );
            for ( int j = 0; j < 6; ++j )
                CHECK( v[j] == doctest::Approx( i == j ? 1.0 : 0.0 ) );
        }
        const Vec2 xi( 0.21, 0.37 );
        const auto v  = p2_values( xi );
        const auto g  = p2_gradients( xi );
        const auto vo = oracle::p2_shape( xi );
        const auto go = oracle::p2_shape_grad( xi );
        double     s  = 0;
        Vec2       gs = Vec2::Zero();
        for ( int j = 0; j < 6; ++j )
        {
            s += v[j];
            gs += g[j];
            CHECK( v[j] == doctest::Approx( vo[j] ).epsilon( 1e-14 ) );
            CHECK( g[j].x() == doctest::Approx( go( j, 0 ) ).epsilon( 1e-14 ) );
            CHECK( g[j].y() == doctest::Approx( go( j, 1 ) ).epsilon( 1e-14 ) );
        }
        CHECK( s == doctest::Approx( 1.0 ) );
        CHECK( gs.norm() < 1e-14 );
    }

    TEST_CASE( "composed map has positive determinant everywhere" )
    {
        Discretization d( small_mesh( 3 ) );
        for ( int l = 0; l <= 3; ++l )
            for ( int degree : { 4, 6 } )
            {
                const auto& g = d.geometry( l, degree );
                for ( std::size_t i = 0; i < g.weight.size(); ++i )
                {
                    CHECK_MESSAGE( g.weight[i] > 0, "level ", l );
                    CHECK( g.inv_jacobian_t[i].determinant() > 0 );
                }
            }
    }

    TEST_CASE( "matrix-free operators equal dense assembly" )
    {
        Discretization d( small_mesh( 2 ) );
        for ( int l : { 1, 2 } )
        {
            const auto errors = oracle::compare_all_operators( d, l );
            CHECK( errors.size() == 17 );
            for ( const auto& [name, err] : errors )
                CHECK_MESSAGE( err < 1e-12, name, " level ", l, " error ", err );
        }
    }

    TEST_CASE( "viscous operator is symmetric, semidefinite and rotation-free" )
    {
        Discretization        d( small_mesh( 2 ) );
        const ViscousOperator A( d, 2, field_from_function( d, 2, 6, oracle::test_eta ) );
        std::mt19937_64       rng( 7 );
        const int             n = A.domain().dim();
        for ( int k = 0; k < 10; ++k )
        {
            const Vector x = random_vector( n, rng ), y = random_vector( n, rng );
            const double xy = y.dot( A( x ) ), yx = x.dot( A( y ) );
            CHECK( std::abs( xy - yx ) <= 1e-12 * std::max( 1.0, std::abs( xy ) ) );
            CHECK( x.dot( A( x ) ) >= -1e-12 );
        }
        // the blended P2 space holds constants but not linear fields, so rotations are checked without blending
        Discretization        flat( small_mesh( 2, false ) );
        const ViscousOperator Af( flat, 2, field_from_function( flat, 2, 6, oracle::test_eta ) );
        const Vector rot = flat.interpolate_vector( 2, []( const Vec2& x ) { return Vec2( -x.y(), x.x() ); } );
        CHECK( Af( rot ).cwiseAbs().maxCoeff() < 1e-11 );
        const Vector shift = d.interpolate_vector( 2, []( const Vec2& ) { return Vec2( 0.3, -1.1 ); } );
        CHECK( A( shift ).cwiseAbs().maxCoeff() < 1e-11 );
    }

    TEST_CASE( "divergence and gradient are adjoint" )
    {
        Discretization           d( small_mesh( 3 ) );
        const DivergenceOperator B( d, 3 );
        const GradientOperator   BT( d, 3 );
        std::mt19937_64          rng( 11 );
        for ( int k = 0; k < 10; ++k )
        {
            const Vector u = random_vector( B.domain().dim(), rng ), p = random_vector( B.range().dim(), rng );
            const double a = p.dot( B( u ) ), b = u.dot( BT( p ) );
            CHECK( std::abs( a - b ) <= 1e-12 * std::max( 1.0, std::abs( a ) ) );
        }
        // constant pressure against the divergence of a rotation on the polygonal domain
        Discretization           flat( small_mesh( 3, false ) );
        const DivergenceOperator Bf( flat, 3 );
        const Vector u   = flat.interpolate_vector( 3, []( const Vec2& x ) { return Vec2( -x.y(), x.x() ); } );
        const Vector one = Vector::Ones( Bf.range().dim() );
        CHECK( std::abs( one.dot( Bf( u ) ) ) < 1e-11 );
    }

    TEST_CASE( "operators reject mismatched spaces and non-square diagonals" )
    {
        Discretization           d( small_mesh( 2 ) );
        const DivergenceOperator B( d, 2 );
        CHECK_THROWS_AS( B.diagonal(), ContractViolation );
        Vector y;
        CHECK_THROWS_AS( B.apply( Vector::Zero( 5 ), y ), ContractViolation );
        FieldFunction wrong( d.space( SpaceKind::P1, 2 ) );
        CHECK_THROWS_AS( B.apply( wrong ), ContractViolation );
        FieldFunction ok( d.space( SpaceKind::P2Vector, 2 ) );
        CHECK( B.apply( ok ).space == d.space( SpaceKind::P1, 2 ) );
        CHECK( std::string( to_string( OperatorTag::ViscousBlock ) ).size() > 0 );
    }

    TEST_CASE( "P1 mass diagonal equals area over six per element without blending" )
    {
        Discretization     d( small_mesh( 1, false ) );
        const MassOperator M( d, 1, SpaceKind::P1, constant_field( d, 1, 6, 1.0 ) );
        const Vector       diag = M.diagonal();
        const auto&        lm   = d.mesh().level( 1 );
        Vector             expected = Vector::Zero( diag.size() );
        for ( int e = 0; e < lm.num_elements(); ++e )
        {
            const auto&  c    = lm.corners[e];
            const double area = 0.5 * std::abs( ( c[1] - c[0] ).x() * ( c[2] - c[0] ).y() - ( c[1] - c[0] ).y() * ( c[2] - c[0] ).x() );
            for ( int k = 0; k < 3; ++k )
                expected[lm.p1_nodes[e][k]] += area / 6.0;
        }
        CHECK( ( diag - expected ).cwiseAbs().maxCoeff() < 1e-14 );
    }

    TEST_CASE( "integration recovers the annulus area" )
    {
        Discretization d( small_mesh( 4 ) );
        const double   exact = std::numbers::pi * ( 2.22 * 2.22 - 1.22 * 1.22 );
        for ( int l = 2; l <= 4; ++l )
            CHECK( std::abs( domain_area( d, l ) - exact ) < 1e-10 * exact );
        FieldFunction one( d.space( SpaceKind::P2, 4 ), Vector::Ones( d.num_nodes( SpaceKind::P2, 4 ) ) );
        CHECK( std::abs( integrate( one ) - exact ) < 1e-10 * exact );
        FieldFunction zero( d.space( SpaceKind::P1, 4 ) );
        CHECK( integrate( zero ) == 0.0 );
        FieldFunction r2( d.space( SpaceKind::P2, 3 ), d.interpolate( SpaceKind::P2, 3, []( const Vec2& x ) { return x.squaredNorm(); } ) );
        const double  exact_r2 = std::numbers::pi / 2 * ( std::pow( 2.22, 4 ) - std::pow( 1.22, 4 ) );
        CHECK( std::abs( integrate( r2 ) - exact_r2 ) < 1e-10 * exact_r2 );
        FieldFunction vec( d.space( SpaceKind::P2Vector, 3 ) );
        CHECK_THROWS_AS( integrate( vec ), ContractViolation );
    }

    TEST_CASE( "point evaluation matches brute force element search" )
    {
        Discretization  d( small_mesh( 3 ) );
        const auto&     mesh = d.mesh();
        const auto      f    = []( const Vec2& x ) { return std::sin( x.x() ) * x.y() + x.squaredNorm(); };
        FieldFunction   T( d.space( SpaceKind::P2, 3 ), d.interpolate( SpaceKind::P2, 3, f ) );
        FieldFunction   lin( d.space( SpaceKind::P2Vector, 3 ), d.interpolate_vector( 3, []( const Vec2& x ) { return x; } ) );
        std::mt19937_64 rng( 3 );
        std::uniform_real_distribution< double > ur( 1.22, 2.22 ), ua( 0, 2 * std::numbers::pi );
        const auto&     lm = mesh.level( 3 );
        for ( int k = 0; k < 200; ++k )
        {
            const double r = ur( rng ), a = ua( rng );
            const Vec2   x( r * std::cos( a ), r * std::sin( a ) );
            const Vec2   xt = mesh.blending().unblend( x );
            // brute force: every element, barycentric test in the unblended plane
            int  found = -1;
            Vec2 xi;
            for ( int e = 0; e < lm.num_elements() && found < 0; ++e )
            {
                const auto& c = lm.corners[e];
                Mat2        J;
                J.col( 0 ) = c[1] - c[0];
                J.col( 1 ) = c[2] - c[0];
                const Vec2 s = J.inverse() * ( xt - c[0] );
                if ( s.x() >= -1e-12 && s.y() >= -1e-12 && s.x() + s.y() <= 1 + 1e-12 )
                {
                    found = e;
                    xi    = s;
                }
            }
            REQUIRE( found >= 0 );
            const double brute = evaluate_in_element( d, SpaceKind::P2, 3, T.coefficients, found, xi );
            const auto   v     = evaluate_at( T, x );
            REQUIRE( v.has_value() );
            CHECK( std::abs( *v - brute ) < 1e-13 * std::max( 1.0, std::abs( brute ) ) );
            const auto xv = evaluate_vector_at( lin, x );
            REQUIRE( xv.has_value() );
            // the interpolant of the identity is exact in the unblended plane only at nodes
            CHECK( ( *xv - x ).norm() < 1e-2 );
        }
        CHECK_FALSE( evaluate_at( T, Vec2( 0.5, 0.0 ) ).has_value() );
        CHECK_FALSE( evaluate_at( T, Vec2( 3.0, 0.0 ) ).has_value() );
        // at nodes the interpolant reproduces the nodal value
        const auto& grid = mesh.p2_grid( 3 );
        for ( int i = 0; i < grid.num_points(); i += 37 )
        {
            const auto v = evaluate_at( T, grid.physical[i] );
            REQUIRE( v.has_value() );
            CHECK( *v == doctest::Approx( f( grid.physical[i] ) ).epsilon( 1e-12 ) );
        }
    }

    TEST_CASE( "prolongation and restriction are transposes and exact on coarse functions" )
    {
        Discretization  d( small_mesh( 3 ) );
        std::mt19937_64 rng( 5 );
        for ( SpaceKind kind : { SpaceKind::P1, SpaceKind::P2, SpaceKind::P2Vector } )
            for ( int l = 0; l < 3; ++l )
            {
                const Transfer t( d, kind, l );
                const int      nc = d.space( kind, l ).dim(), nf = d.space( kind, l + 1 ).dim();
                for ( int k = 0; k < 50; ++k )
                {
                    const Vector c = random_vector( nc, rng ), f = random_vector( nf, rng );
                    Vector       pc, rf;
                    t.prolongate( c, pc );
                    t.restrict_to_coarse( f, rf );
                    const double a = f.dot( pc ), b = rf.dot( c );
                    CHECK( std::abs( a - b ) <= 1e-12 * std::max( 1.0, std::abs( a ) ) );
                }
                // a coarse finite element function is reproduced exactly on the finer level
                const Vector c = random_vector( nc, rng );
                Vector       pc;
                t.prolongate( c, pc );
                if ( kind != SpaceKind::P2Vector )
                {
                    const auto& lm = d.mesh().level( l + 1 );
                    std::mt19937_64 r2( 9 );
                    std::uniform_real_distribution< double > u( 0, 1 );
                    for ( int e = 0; e < lm.num_elements(); e += 7 )
                    {
                        Vec2 xi( u( r2 ), u( r2 ) );
                        if ( xi.sum() > 1 )
                            xi = Vec2( 1 - xi.x(), 1 - xi.y() );
                        const auto& cr = lm.corners[e];
                        const Vec2  xt = cr[0] + xi.x() * ( cr[1] - cr[0] ) + xi.y() * ( cr[2] - cr[0] );
                        const auto  m  = d.mesh().locate_macro( xt );
                        const auto  lc = d.mesh().locate_in_macro( l, m.first, m.second );
                        const double fine   = evaluate_in_element( d, kind, l + 1, pc, e, xi );
                        const double coarse = evaluate_in_element( d, kind, l, c, lc.element, lc.local );
                        CHECK( std::abs( fine - coarse ) < 1e-12 );
                    }
                }
                Vector ones = Vector::Ones( nc ), pones;
                t.prolongate( ones, pones );
                CHECK( ( pones - Vector::Ones( nf ) ).cwiseAbs().maxCoeff() < 1e-14 );
            }
        FieldFunction coarse( d.space( SpaceKind::P2, 1 ), d.interpolate( SpaceKind::P2, 1, []( const Vec2& x ) { return x.x(); } ) );
        const auto    fine = prolongate( coarse, 3 );
        CHECK( fine.space == d.space( SpaceKind::P2, 3 ) );
        CHECK( restrict_field( fine, 1 ).space == d.space( SpaceKind::P2, 1 ) );
    }

    TEST_CASE( "exponential surrogate meets its tolerance on a dense scan" )
    {
        const ExpSurrogate s( -30.0, 20.0 );
        CHECK( s.degree() == 6 );
        double worst = 0;
        const int n = 1000000;
        for ( int i = 0; i <= n; ++i )
        {
            const double z = -30.0 + 50.0 * i / n;
            worst = std::max( worst, std::abs( s( z ) - std::exp( z ) ) / std::exp( z ) );
        }
        CHECK( worst < 6e-4 );
        CHECK( s( 25.0 ) == std::exp( 25.0 ) );
        CHECK( s( -40.0 ) == std::exp( -40.0 ) );
        const ExpSurrogate tight( -5.0, 5.0, 6, 1e-10 );
        CHECK( tight.max_relative_error( 100000 ) < 1e-10 );
        CHECK( tight.pieces() > s.pieces() / 10 );
        CHECK_THROWS_AS( ExpSurrogate( 1.0, 0.0 ), ContractViolation );
    }

    TEST_CASE( "viscosity field uses pointwise law on coarse levels and P1 interpolation above" )
    {
        Discretization     d( small_mesh( 3 ) );
        const auto         Tf = []( const Vec2& x ) { return 0.5 + 0.3 * std::sin( 2 * std::atan2( x.y(), x.x() ) ) * ( x.norm() - 1.22 ); };
        const Vector       T  = d.interpolate( SpaceKind::P2, 3, Tf );
        ViscosityLaw       law{ []( const Vec2& x ) { return 1.0 + 0.1 * x.norm(); }, []( const Vec2&, double t ) { return -3.0 * t; } };
        ViscosityField     eta( d, law, T, 3, 1 );
        FieldFunction      Tfield( d.space( SpaceKind::P2, 3 ), T );
        // level <= l_eta: law evaluated with the fine temperature at every quadrature point
        const auto q1 = eta.quadrature( 1, 6 );
        const auto& g1 = d.geometry( 1, 6 );
        double     worst = 0;
        for ( std::size_t i = 0; i < g1.x.size(); ++i )
        {
            const auto Tq = evaluate_at( Tfield, g1.x[i] );
            REQUIRE( Tq.has_value() );
            worst = std::max( worst, std::abs( q1.values[i] - law( g1.x[i], *Tq ) ) / q1.values[i] );
        }
        CHECK( worst < 1e-12 );
        // level > l_eta: P1 interpolation of the nodal injection
        const Vector n2 = eta.p1_nodal( 2 );
        const auto&  grid = d.mesh().p1_grid( 2 );
        for ( int i = 0; i < grid.num_points(); ++i )
        {
            const auto Tn = evaluate_at( Tfield, grid.physical[i] );
            REQUIRE( Tn.has_value() );
            CHECK( n2[i] == doctest::Approx( law( grid.physical[i], *Tn ) ).epsilon( 1e-12 ) );
        }
        const auto q2 = eta.quadrature( 2, 6 );
        const auto ref = field_from_nodal( d, 2, 6, SpaceKind::P1, n2 );
        CHECK( q2.values == ref.values );
        // surrogate path stays within its tolerance
        auto           sur = std::make_shared< const ExpSurrogate >( -5.0, 1.0 );
        ViscosityField eta_s( d, law, T, 3, 1, sur );
        const auto     qs = eta_s.quadrature( 1, 6, true );
        for ( std::size_t i = 0; i < qs.values.size(); ++i )
            CHECK( std::abs( qs.values[i] / q1.values[i] - 1 ) < 6e-4 );
        CHECK_THROWS_AS( ViscosityField( d, law, Vector::Zero( 3 ), 3, 1 ), ContractViolation );
    }

    TEST_CASE( "surface scaling touches only outer elements" )
    {
        Discretization d( small_mesh( 2 ) );
        const auto     f  = constant_field( d, 2, 4, 1.0 );
        const auto     s  = scale_surface_elements( d, f, 4.0 );
        const auto&    lm = d.mesh().level( 2 );
        for ( int e = 0; e < lm.num_elements(); ++e )
            CHECK( s.at( e, 0 ) == ( lm.touches_surface[e] ? 4.0 : 1.0 ) );
    }

    TEST_CASE( "operator application is independent of the thread count" )
    {
        Discretization        d( small_mesh( 3 ) );
        const ViscousOperator A( d, 3, field_from_function( d, 3, 6, oracle::test_eta ) );
        std::mt19937_64       rng( 1 );
        const Vector          x  = random_vector( A.domain().dim(), rng );
        const int             t0 = thread_count();
        set_thread_count( 1 );
        const Vector y1 = A( x );
        set_thread_count( 4 );
        const Vector y4 = A( x );
        set_thread_count( t0 );
        CHECK( ( y1 - y4 ).cwiseAbs().maxCoeff() == 0.0 );
    }
}
