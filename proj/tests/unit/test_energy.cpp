#include "doctest.h"

#include "tala/energy/time_stepping.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

using namespace tala;
using namespace tala::fem;
using namespace tala::energy;

namespace {

std::shared_ptr< Discretization > disc( int levels, double r_cmb = 0.5, double r_s = 1.5, bool blended = true )
{
    return std::make_shared< Discretization >(
        std::make_shared< const geometry::RefinedMesh >( geometry::build_annulus_macro_mesh( 8, 2, r_cmb, r_s ), levels, blended ) );
}

Vector random_vector( Eigen::Index n, std::mt19937_64& rng )
{
    std::uniform_real_distribution< double > u( -1, 1 );
    Vector                                   v( n );
    for ( auto& x : v )
        x = u( rng );
    return v;
}

Vector constant_velocity( const Discretization& d, int level, const Vec2& c )
{
    return d.interpolate_vector( level, [&]( const Vec2& ) { return c; } );
}

// solve the steady transport problem with the given boundary values
Vector steady_state( const Discretization& d, int level, const EnergyParams& e, const Vector& Tbc )
{
    const auto&           geo = d.geometry( level, 6 );
    QuadratureField       m   = constant_field( d, level, 6, 0.0 );
    QuadratureField       k   = m;
    VectorQuadratureField b;
    b.level      = level;
    b.degree     = 6;
    b.num_points = m.num_points;
    b.values.resize( geo.x.size() );
    for ( std::size_t i = 0; i < geo.x.size(); ++i )
    {
        const Vec2&  x    = geo.x[i];
        const double diff = e.k / ( e.Pe * e.cp * ( e.density ? e.density( x ) : 1.0 ) );
        k.values[i]       = diff;
        b.values[i]       = e.grad_ln_rho ? Vec2( -diff * e.grad_ln_rho( x ) ) : Vec2( Vec2::Zero() );
    }
    const TransportOperator L( d, level, m, k, b );
    const auto              rows = temperature_boundary_nodes( d, level );
    Vector                  rhs  = -L( Tbc );
    for ( int r : rows )
        rhs[r] = 0.0;
    Vector     delta = Vector::Zero( rhs.size() );
    const auto rep   = krylov::fgmres( constraints::dirichlet_masked( L.linear_operator(), rows ), rhs, delta, {},
                                       { 1e-13, 1e-15, 3000 }, 200 );
    REQUIRE( rep.converged );
    return Tbc + delta;
}

} // namespace

TEST_SUITE( "energy" )
{
    TEST_CASE( "BDF2 coefficients" )
    {
        const auto a = bdf2_coefficients( 0.1, 0.1 );
        CHECK( a.s_new == doctest::Approx( 1.5 ).epsilon( 1e-15 ) );
        CHECK( a.s_n == doctest::Approx( 2.0 ).epsilon( 1e-15 ) );
        CHECK( a.s_nm1 == doctest::Approx( 0.5 ).epsilon( 1e-15 ) );

        const auto b = bdf2_coefficients( 1.0, 2.0 );
        CHECK( b.s_new == doctest::Approx( 4.0 / 3.0 ).epsilon( 1e-15 ) );
        CHECK( b.s_n == doctest::Approx( 1.5 ).epsilon( 1e-15 ) );
        CHECK( b.s_nm1 == doctest::Approx( 1.0 / 6.0 ).epsilon( 1e-15 ) );
        CHECK( std::abs( b.s_new - b.s_n + b.s_nm1 ) < 1e-15 );

        // D[t] at t^{n+1} = tau_new for T(t) = t
        const double t1 = 3.0, t0 = t1 - 1.0, tm = t0 - 2.0;
        CHECK( b.s_new * t1 - b.s_n * t0 + b.s_nm1 * tm == doctest::Approx( 1.0 ).epsilon( 1e-14 ) );

        CHECK_THROWS_AS( bdf2_coefficients( 0.0, 1.0 ), ContractViolation );
        CHECK_THROWS_AS( bdf2_coefficients( 1.0, -1.0 ), ContractViolation );
        const auto e = implicit_euler_coefficients();
        CHECK( e.s_new - e.s_n + e.s_nm1 == 0.0 );
    }

    TEST_CASE( "BDF2 identity and quadratic exactness for random steps" )
    {
        std::mt19937_64                          rng( 7 );
        std::uniform_real_distribution< double > step( 1e-3, 1.0 );
        std::uniform_real_distribution< double > time( -5.0, 5.0 );
        double                                   worst_identity = 0.0, worst_quadratic = 0.0;
        for ( int i = 0; i < 1000; ++i )
        {
            const double tn = step( rng ), to = step( rng );
            const auto   c  = bdf2_coefficients( tn, to );
            worst_identity  = std::max( worst_identity, std::abs( c.s_new - c.s_n + c.s_nm1 ) / c.s_n );

            const double t1 = time( rng ), t0 = t1 - tn, tm = t0 - to;
            const double D  = c.s_new * t1 * t1 - c.s_n * t0 * t0 + c.s_nm1 * tm * tm;
            const double ex = tn * 2.0 * t1;
            const double sc = c.s_n * ( t0 * t0 + tm * tm + t1 * t1 ) + 1.0;
            worst_quadratic = std::max( worst_quadratic, std::abs( D - ex ) / sc );
        }
        CHECK( worst_identity < 1e-14 );
        CHECK( worst_quadratic < 1e-14 );
    }

    TEST_CASE( "linear extrapolation" )
    {
        std::mt19937_64 rng( 3 );
        const Vector    a = random_vector( 50, rng ), b = random_vector( 50, rng );
        CHECK( ( extrapolate( a, a, 0.3, 0.7 ) - a ).norm() == 0.0 );

        // f(t) = a + t b at t = 1, 0.6, extrapolated to 1.25
        const Vector f1 = a + b, f0 = a + 0.6 * b;
        CHECK( ( extrapolate( f1, f0, 0.25, 0.4 ) - ( a + 1.25 * b ) ).cwiseAbs().maxCoeff() < 1e-14 );

        const Vector r = extrapolate( a, b, 0.2, 0.5 );
        for ( int i = 0; i < 50; ++i )
        {
            CHECK( r[i] == doctest::Approx( a[i] + ( a[i] - b[i] ) * 0.4 ).epsilon( 1e-15 ) );
        }
        CHECK_THROWS_AS( extrapolate( a, b, 0.1, 0.0 ), ContractViolation );
        CHECK_THROWS_AS( extrapolate( a, Vector( 3 ), 0.1, 0.1 ), ContractViolation );
    }

    TEST_CASE( "MMOC with zero velocity is the identity" )
    {
        const auto   d = disc( 3 );
        const int    L = 2;
        const Vector T = d->interpolate( SpaceKind::P2, L, []( const Vec2& x ) { return std::sin( 3 * x.x() ) * x.y(); } );
        const Vector z = Vector::Zero( 2 * d->num_nodes( SpaceKind::P2Vector, L ) );
        CHECK( mmoc_substeps( *d, L, { &z, &z, 0.1 } ) == 1 );
        const Vector Th = mmoc_advect( *d, L, T, { &z, &z, 0.1 } );
        CHECK( ( Th - T ).cwiseAbs().maxCoeff() < 1e-14 );
    }

    TEST_CASE( "MMOC is exact for constant advection of a linear field" )
    {
        // polygonal domain: P2 reproduces linear functions exactly
        const auto   d   = disc( 4, 0.5, 1.5, false );
        const int    L   = 3;
        const double c   = 0.7, tau = 0.05;
        const Vector T   = d->interpolate( SpaceKind::P2, L, []( const Vec2& x ) { return x.x(); } );
        const Vector u   = constant_velocity( *d, L, Vec2( c, 0.0 ) );
        const Vector Th  = mmoc_advect( *d, L, T, { &u, &u, tau } );
        const auto&  pos = d->node_grid( SpaceKind::P2, L ).physical;

        // keep nodes whose whole path stays well inside the polygonal shell
        const double r_in = 0.55, r_out = 1.5 * std::cos( M_PI / 8 ) - 0.05;
        int          used = 0;
        double       err  = 0.0;
        for ( std::size_t i = 0; i < pos.size(); ++i )
        {
            bool inside = true;
            for ( int s = 0; s <= 20 && inside; ++s )
            {
                const double r = ( pos[i] - Vec2( c * tau * s / 20.0, 0.0 ) ).norm();
                inside         = r > r_in && r < r_out;
            }
            if ( !inside )
                continue;
            ++used;
            err = std::max( err, std::abs( Th[static_cast< Eigen::Index >( i )] - ( pos[i].x() - c * tau ) ) );
        }
        CHECK( used > 100 );
        CHECK( err < 1e-12 );
    }

    TEST_CASE( "MMOC rigid rotation error is fifth order per step" )
    {
        const auto   d = disc( 3, 0.5, 1.5, false );
        const int    L = 2;
        const Vector u = d->interpolate_vector( L, []( const Vec2& x ) { return Vec2( -x.y(), x.x() ); } );
        std::vector< double > err;
        for ( double tau : { 0.04, 0.02, 0.01 } )
        {
            const Vec2 X = trace_back( *d, L, Vec2( 1.0, 0.0 ), { &u, &u, tau }, 1 );
            err.push_back( ( X - Vec2( std::cos( tau ), -std::sin( tau ) ) ).norm() );
        }
        const double slope = std::log( err[0] / err[2] ) / std::log( 4.0 );
        MESSAGE( "rotation errors " << err[0] << " " << err[1] << " " << err[2] << " slope " << slope );
        CHECK( slope >= 4.5 );
    }

    TEST_CASE( "MMOC history traces through both intervals" )
    {
        const auto   d  = disc( 4, 0.5, 1.5, false );
        const int    L  = 3;
        const Vector T  = d->interpolate( SpaceKind::P2, L, []( const Vec2& x ) { return x.x() + 2 * x.y(); } );
        const Vector u1 = constant_velocity( *d, L, Vec2( 0.3, 0.0 ) );
        const Vector u2 = constant_velocity( *d, L, Vec2( 0.0, 0.2 ) );
        const Vector Th = mmoc_history( *d, L, T, { &u1, &u1, 0.1 }, { &u2, &u2, 0.05 } );
        const auto&  pos = d->node_grid( SpaceKind::P2, L ).physical;
        double       err = 0.0;
        for ( std::size_t i = 0; i < pos.size(); ++i )
        {
            const double r = pos[i].norm();
            if ( r < 0.65 || r > 1.3 )
                continue;
            err = std::max( err, std::abs( Th[static_cast< Eigen::Index >( i )] - ( pos[i].x() - 0.03 + 2 * ( pos[i].y() - 0.01 ) ) ) );
        }
        CHECK( err < 1e-12 );
    }

    TEST_CASE( "departure points are clamped into the shell" )
    {
        const Vec2 a = clamp_to_shell( Vec2( 0.1, 0.0 ), 0.5, 1.5, 1e-12 );
        CHECK( a.norm() == doctest::Approx( 0.5 ).epsilon( 1e-11 ) );
        const Vec2 b = clamp_to_shell( Vec2( 0.0, 3.0 ), 0.5, 1.5, 1e-12 );
        CHECK( b.x() == 0.0 );
        CHECK( b.y() < 1.5 );
        const Vec2 c( 0.7, 0.3 );
        CHECK( clamp_to_shell( c, 0.5, 1.5, 1e-12 ) == c );

        // strong outward flow: every node still gets a value
        const auto   d = disc( 3 );
        const Vector T = d->interpolate( SpaceKind::P2, 2, []( const Vec2& x ) { return x.norm(); } );
        const Vector u = d->interpolate_vector( 2, []( const Vec2& x ) { return Vec2( 5.0 * x ); } );
        const Vector h = mmoc_advect( *d, 2, T, { &u, &u, 1.0 } );
        CHECK( h.allFinite() );
        CHECK( h.minCoeff() > 0.49 );
        CHECK( h.maxCoeff() < 1.51 );
    }

    TEST_CASE( "CFL time step" )
    {
        const auto   d  = disc( 3 );
        const int    L  = 2;
        const double h  = geometry::min_element_diameter( d->mesh(), L );
        const Vector u2 = constant_velocity( *d, L, Vec2( 0.0, 2.0 ) );
        CHECK( cfl_timestep( *d, L, u2, 1.0, 10.0 ) == doctest::Approx( h / 2.0 ).epsilon( 1e-14 ) );

        const Vector z = Vector::Zero( u2.size() );
        CHECK( cfl_timestep( *d, L, z, 1.0, 0.25 ) == 0.25 );

        // brute-force scan over elements with independently computed edge lengths
        const Vector u = d->interpolate_vector( L, []( const Vec2& x ) { return Vec2( std::sin( 4 * x.y() ), x.x() * x.x() ); } );
        const auto&  lm = d->mesh().level( L );
        const int    n  = d->num_nodes( SpaceKind::P2Vector, L );
        double       rate = 0.0;
        for ( int e = 0; e < lm.num_elements(); ++e )
        {
            const auto& c  = lm.corners[e];
            double      hk = 0.0;
            for ( int a = 0; a < 3; ++a )
                hk = std::max( hk, ( c[a] - c[( a + 1 ) % 3] ).norm() );
            double s = 0.0;
            for ( int k = 0; k < 6; ++k )
            {
                const int i = lm.p2_nodes[e][k];
                s           = std::max( s, std::sqrt( u[i] * u[i] + u[n + i] * u[n + i] ) );
            }
            rate = std::max( rate, s / hk );
        }
        CHECK( cfl_timestep( *d, L, u, 0.7, 10.0 ) == doctest::Approx( 0.7 / rate ).epsilon( 1e-14 ) );

        TimestepControl c;
        c.C_CFL   = 1.0;
        c.tau_max = 10.0;
        const double t = cfl_timestep( *d, L, u2, 1.0, 10.0 );
        CHECK( select_timestep( c, *d, L, u2, 0.0 ) == t );
        CHECK( select_timestep( c, *d, L, u2, t / 4 ) == doctest::Approx( 1.5 * t / 4 ) );
        CHECK( select_timestep( c, *d, L, u2, 4 * t ) == doctest::Approx( 2 * t ) );
        c.tau_max = t / 3;
        CHECK( select_timestep( c, *d, L, u2, 0.0 ) == doctest::Approx( t / 3 ) );
    }

    TEST_CASE( "steady diffusion profile is preserved" )
    {
        const auto   d = disc( 3 );
        const int    L = 2;
        EnergyParams e;
        e.k       = 0.3;
        e.density = []( const Vec2& x ) { return std::exp( 0.4 * ( 1.5 - x.norm() ) ); };
        e.grad_ln_rho = []( const Vec2& x ) { return Vec2( -0.4 * x / x.norm() ); };
        constraints::BoundaryConditionSet bc;
        bc.surface_temperature = 0.1;
        bc.cmb_temperature     = 1.3;
        const Vector Tbc = constraints::temperature_boundary_values( *d, L, bc );
        const Vector Ts  = steady_state( *d, L, e, Tbc );

        DiffusionInputs in;
        in.s          = bdf2_coefficients( 0.05, 0.04 );
        in.tau        = 0.05;
        in.u_star     = Vector::Zero( 2 * Ts.size() );
        in.T_star     = Ts;
        in.T_hat_n    = Ts;
        in.T_hat_nm1  = Ts;
        in.T_boundary = Tbc;
        const auto r  = solve_diffusion_step( *d, L, e, in, 1e-13 );
        CHECK( r.report.converged );
        CHECK( ( r.T - Ts ).cwiseAbs().maxCoeff() < 1e-9 );
    }

    TEST_CASE( "Dirichlet values are attained exactly and the solution stays bounded" )
    {
        const auto   d = disc( 3 );
        const int    L = 2;
        EnergyParams e;
        e.k = 0.5;
        constraints::BoundaryConditionSet bc;
        bc.surface_temperature = 0.0;
        bc.cmb_temperature     = 1.0;
        std::mt19937_64                          rng( 11 );
        std::uniform_real_distribution< double > u01( 0.0, 1.0 );
        const int                                n = d->num_nodes( SpaceKind::P2, L );
        Vector                                   a( n ), b( n );
        for ( int i = 0; i < n; ++i )
        {
            a[i] = u01( rng );
            b[i] = u01( rng );
        }
        DiffusionInputs in;
        in.s          = bdf2_coefficients( 0.01, 0.01 );
        in.tau        = 0.01;
        in.u_star     = Vector::Zero( 2 * n );
        in.T_star     = a;
        in.T_hat_n    = a;
        in.T_hat_nm1  = b;
        in.T_boundary = constraints::temperature_boundary_values( *d, L, bc );
        const auto r  = solve_diffusion_step( *d, L, e, in, 1e-10 );
        for ( int i : d->mesh().nodes_with_tag( L, geometry::BoundaryTag::Surface ) )
            CHECK( r.T[i] == 0.0 );
        for ( int i : d->mesh().nodes_with_tag( L, geometry::BoundaryTag::CMB ) )
            CHECK( r.T[i] == 1.0 );

        // history values of a BDF2 step may combine to 2a - b/2; bound by the history range
        const double lo = std::min( 0.0, ( in.s.s_n * a - in.s.s_nm1 * b ).minCoeff() / in.s.s_new );
        const double hi = std::max( 1.0, ( in.s.s_n * a - in.s.s_nm1 * b ).maxCoeff() / in.s.s_new );
        CHECK( r.T.minCoeff() >= lo - 0.05 * ( hi - lo ) );
        CHECK( r.T.maxCoeff() <= hi + 0.05 * ( hi - lo ) );
    }

    TEST_CASE( "scalar reaction limit reproduces the BDF2 amplification factor" )
    {
        const auto   d      = disc( 2 );
        const int    L      = 1;
        const double lambda = -3.0, tau = 0.1;
        const int    n      = d->num_nodes( SpaceKind::P2, L );

        // u* . g = lambda with Di alpha / C^p = 1 and no diffusion or advection
        EnergyParams e;
        e.k                     = 0.0;
        e.Di                    = 1.0;
        e.include_lhs_advection = false;
        e.gravity               = [lambda]( const Vec2& ) { return Vec2( lambda, 0.0 ); };
        const Vector ustar      = constant_velocity( *d, L, Vec2( 1.0, 0.0 ) );

        // principal root of (3/2 - tau lambda) xi^2 - 2 xi + 1/2 = 0
        const double a  = 1.5 - tau * lambda;
        const double xi = ( 2.0 + std::sqrt( 4.0 - 2.0 * a ) ) / ( 2.0 * a );

        Vector       y_old = Vector::Constant( n, 1.0 ), y = Vector::Constant( n, xi );
        double       worst = 0.0;
        for ( int step = 2; step <= 10; ++step )
        {
            DiffusionInputs in;
            in.s          = bdf2_coefficients( tau, tau );
            in.tau        = tau;
            in.u_star     = ustar;
            in.T_star     = y;
            in.T_hat_n    = y;
            in.T_hat_nm1  = y_old;
            in.T_boundary = Vector::Constant( n, std::pow( xi, step ) );
            const auto r  = solve_diffusion_step( *d, L, e, in, 1e-16, 200 );
            worst         = std::max( worst, ( r.T.array() / std::pow( xi, step ) - 1.0 ).abs().maxCoeff() );
            y_old         = y;
            y             = r.T;
        }
        CHECK( worst < 1e-12 );
    }
}

TEST_SUITE( "energy" )
{
    namespace {

    SimulationContext quiet_context( std::shared_ptr< Discretization > d, int L )
    {
        const auto      p = physics::make_physical_params( physics::ReferenceConstants{} );
        TimestepControl c;
        c.tau_max = 1e-3;
        auto ctx  = make_context( d, L, 0, std::min( L, 1 ), p, stokes::SolverConfig{}, c );
        ctx.buoyancy = false;
        return ctx;
    }

    } // namespace

    TEST_CASE( "quiescent state survives two steps" )
    {
        const auto p   = physics::make_physical_params( physics::ReferenceConstants{} );
        const auto d   = disc( 3, p.r_cmb, p.r_surface );
        const int  L   = 2;
        auto       ctx = quiet_context( d, L );
        const Vector Tbc = constraints::temperature_boundary_values( *d, L, ctx.boundary );
        const Vector Ts  = steady_state( *d, L, ctx.energy, Tbc );

        TimeState s = initial_state( ctx, Ts );
        for ( int i = 0; i < 2; ++i )
        {
            const auto rep = advance_step( ctx, s );
            CHECK( rep.tau == doctest::Approx( 1e-3 ) );
        }
        CHECK( s.step == 2 );
        CHECK( s.t == doctest::Approx( 2e-3 ) );
        CHECK( ( s.T - Ts ).cwiseAbs().maxCoeff() < 1e-8 );
        CHECK( s.u.cwiseAbs().maxCoeff() == 0.0 );
    }

    TEST_CASE( "restart from a checkpoint is bitwise identical" )
    {
        const auto p   = physics::make_physical_params( physics::ReferenceConstants{} );
        const auto d   = disc( 3, p.r_cmb, p.r_surface );
        const int  L   = 2;
        auto       ctx = quiet_context( d, L );
        ctx.buoyancy   = true;
        ctx.control.tau_max = 1e-4;

        TimeState s = initial_state( ctx, initial_temperature( *d, L, p, 5 ) );
        advance_step( ctx, s );
        advance_step( ctx, s );

        const std::string path = "energy_restart_test.ckpt";
        const auto        hash = d->mesh().descriptor_hash();
        write_checkpoint( path, s, hash );
        TimeState r = read_checkpoint( path, hash );
        CHECK( r.step == s.step );
        CHECK( r.t == s.t );
        CHECK( r.tau == s.tau );

        advance_step( ctx, s );
        advance_step( ctx, r );
        CHECK( ( s.T - r.T ).cwiseAbs().maxCoeff() == 0.0 );
        CHECK( ( s.u - r.u ).cwiseAbs().maxCoeff() == 0.0 );
        CHECK( ( s.p - r.p ).cwiseAbs().maxCoeff() == 0.0 );
        CHECK( s.u.cwiseAbs().maxCoeff() > 0.0 );

        CHECK_THROWS_AS( read_checkpoint( path, hash + 1 ), CheckpointError );

        // bump the version field
        {
            std::fstream f( path, std::ios::binary | std::ios::in | std::ios::out );
            f.seekp( 8 );
            const std::uint32_t v = checkpoint_version + 1;
            f.write( reinterpret_cast< const char* >( &v ), sizeof( v ) );
        }
        try
        {
            read_checkpoint( path, hash );
            FAIL( "version mismatch accepted" );
        }
        catch ( const CheckpointError& e )
        {
            CHECK( std::string( e.what() ).find( "version" ) != std::string::npos );
        }
        std::remove( path.c_str() );
    }

    TEST_CASE( "initial temperature noise" )
    {
        const auto   p  = physics::make_physical_params( physics::ReferenceConstants{} );
        const auto   d  = disc( 3, p.r_cmb, p.r_surface );
        const Vector T  = initial_temperature( *d, 2, p, 42 );
        const Vector T2 = initial_temperature( *d, 2, p, 42 );
        CHECK( ( T - T2 ).norm() == 0.0 );
        const Vector ref = d->interpolate( SpaceKind::P2, 2, [&]( const Vec2& x ) { return p.reference_temperature( x ); } );
        const auto   bnd = temperature_boundary_nodes( *d, 2 );
        std::vector< char > is_bnd( static_cast< std::size_t >( T.size() ), 0 );
        for ( int i : bnd )
            is_bnd[static_cast< std::size_t >( i )] = 1;
        double worst = 0.0;
        for ( Eigen::Index i = 0; i < T.size(); ++i )
        {
            if ( !is_bnd[static_cast< std::size_t >( i )] )
                worst = std::max( worst, std::abs( T[i] / ref[i] - 1.0 ) );
        }
        CHECK( worst <= 0.03 );
        CHECK( worst > 0.02 );
        for ( int i : d->mesh().nodes_with_tag( 2, geometry::BoundaryTag::Surface ) )
            CHECK( T[i] == p.T_surface );
    }

    TEST_CASE( "linearized shear heating" )
    {
        const auto d = disc( 2 );
        std::mt19937_64 rng( 3 );
        const Vector u = random_vector( 2 * d->num_nodes( SpaceKind::P2Vector, 1 ), rng );
        const Vector T = 0.3 * random_vector( d->num_nodes( SpaceKind::P2, 1 ), rng );
        EnergyParams e;
        e.Di           = 0.5;
        e.shear_cutoff = false;
        e.viscosity    = []( const Vec2& x, double t ) { return x.squaredNorm() * std::exp( -2.0 * t ); };
        const auto lin = linearized_shear_heating( *d, 1, e, u, T );
        const auto ref = shear_heating( *d, 1, e, u, T );
        double     peak = 0.0;
        for ( std::size_t i = 0; i < ref.values.size(); ++i )
        {
            CHECK( lin.source.values[i] == ref.values[i] );
            CHECK( lin.rate.values[i] == doctest::Approx( 2.0 * ref.values[i] ).epsilon( 1e-7 ) );
            peak = std::max( peak, ref.values[i] );
        }
        CHECK( peak > 0.0 );

        // heating that grows with temperature stays explicit
        e.viscosity = []( const Vec2&, double t ) { return std::exp( t ); };
        for ( double r : linearized_shear_heating( *d, 1, e, u, T ).rate.values )
            CHECK( r == 0.0 );
        e.linearized_shear = false;
        e.viscosity        = []( const Vec2&, double t ) { return std::exp( -t ); };
        for ( double r : linearized_shear_heating( *d, 1, e, u, T ).rate.values )
            CHECK( r == 0.0 );
    }
}
