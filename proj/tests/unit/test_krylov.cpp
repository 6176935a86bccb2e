#include "doctest.h"

#include "tala/constraints/boundary.hpp"
#include "tala/fem/operators.hpp"
#include "tala/fem/transfer.hpp"
#include "tala/krylov/solvers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <random>

using namespace tala;
using namespace tala::krylov;
using namespace tala::fem;

namespace {

Vector random_vector( int n, std::uint64_t seed )
{
    std::mt19937_64                          rng( seed );
    std::uniform_real_distribution< double > u( -1, 1 );
    Vector                                   v( n );
    for ( auto& x : v )
        x = u( rng );
    return v;
}

Eigen::MatrixXd dense_of( const LinearOperator& op, int n )
{
    Eigen::MatrixXd M( n, n );
    Vector          e = Vector::Zero( n ), y;
    for ( int j = 0; j < n; ++j )
    {
        e[j] = 1;
        op( e, y );
        M.col( j ) = y;
        e[j]       = 0;
    }
    return M;
}

LinearOperator matrix_op( const Eigen::MatrixXd& M )
{
    return [M]( const Vector& x, Vector& y ) { y = M * x; };
}

std::vector< int > p1_boundary( const Discretization& d, int level )
{
    std::vector< int > rows;
    const auto&        g = d.mesh().p1_grid( level );
    for ( int i = 0; i < g.num_points(); ++i )
        if ( g.tags[i] != geometry::BoundaryTag::Inner )
            rows.push_back( i );
    return rows;
}

/// P1 Poisson hierarchy with homogeneous Dirichlet rows on both circles.
struct PoissonHierarchy
{
    std::shared_ptr< Discretization >                   d;
    std::vector< std::shared_ptr< StiffnessOperator > > ops;
    std::vector< std::shared_ptr< Transfer > >          transfers;
    std::vector< LinearOperator >                       masked;
    std::vector< Vector >                               diags;
    std::vector< std::vector< int > >                   rows;

    PoissonHierarchy( int l_min, int l_max, int n_tangential = 8 )
    {
        d = std::make_shared< Discretization >(
            std::make_shared< const geometry::RefinedMesh >( geometry::build_annulus_macro_mesh( n_tangential, 2, 1.22, 2.22 ), l_max ) );
        for ( int l = l_min; l <= l_max; ++l )
        {
            auto op = std::make_shared< StiffnessOperator >( *d, l, SpaceKind::P1, constant_field( *d, l, 6, 1.0 ) );
            ops.push_back( op );
            rows.push_back( p1_boundary( *d, l ) );
            masked.push_back( constraints::dirichlet_masked( op->linear_operator(), rows.back() ) );
            diags.push_back( constraints::dirichlet_masked_diagonal( op->diagonal(), rows.back() ) );
            if ( l > l_min )
                transfers.push_back( std::make_shared< Transfer >( *d, SpaceKind::P1, l - 1 ) );
        }
    }

    std::vector< MultigridLevel > levels() const
    {
        std::vector< MultigridLevel > out;
        for ( std::size_t k = 0; k < ops.size(); ++k )
        {
            MultigridLevel L;
            L.op       = masked[k];
            L.diagonal = diags[k];
            auto r     = rows[k];
            L.projection = [r]( Vector& x ) {
                for ( int i : r )
                    x[i] = 0.0;
            };
            if ( k > 0 )
            {
                auto t                    = transfers[k - 1];
                L.prolongate_from_coarser = [t]( const Vector& c, Vector& f ) { t->prolongate( c, f ); };
                L.restrict_to_coarser     = [t]( const Vector& f, Vector& c ) { t->restrict_to_coarse( f, c ); };
            }
            out.push_back( std::move( L ) );
        }
        return out;
    }
};

double energy( const LinearOperator& op, const Vector& e )
{
    Vector y;
    op( e, y );
    return std::sqrt( e.dot( y ) );
}

} // namespace

TEST_SUITE( "krylov" )
{
    TEST_CASE( "CG basics" )
    {
        const LinearOperator id = []( const Vector& x, Vector& y ) { y = x; };
        const Vector         b  = random_vector( 20, 1 );
        Vector               x  = Vector::Zero( 20 );
        auto                 r  = cg( id, b, x, {}, { 1e-12, 0, 100 } );
        CHECK( r.converged );
        CHECK( r.iterations == 1 );
        CHECK( ( x - b ).norm() < 1e-14 );

        Vector z = Vector::Zero( 20 );
        r        = cg( id, Vector::Zero( 20 ), z, {}, { 1e-12, 0, 100 } );
        CHECK( r.converged );
        CHECK( r.iterations == 0 );
        CHECK( z.isZero( 0.0 ) );
        CHECK_THROWS_AS( cg( id, b, x, {}, { 0.0, 0.0, 10 } ), ContractViolation );
    }

    TEST_CASE( "CG on the Laplacian matches a dense factorisation" )
    {
        PoissonHierarchy   h( 3, 3 );
        const int          n = h.d->num_nodes( SpaceKind::P1, 3 );
        Vector             b = random_vector( n, 2 );
        for ( int i : h.rows[0] )
            b[i] = 0.0;
        Vector x = Vector::Zero( n );
        auto   r = cg( h.masked[0], b, x, jacobi( h.diags[0] ), { 1e-12, 0, 5000 } );
        CHECK( r.converged );
        const Eigen::MatrixXd M  = dense_of( h.masked[0], n );
        const Vector          xd = M.ldlt().solve( b );
        CHECK( ( x - xd ).cwiseAbs().maxCoeff() < 1e-9 * xd.cwiseAbs().maxCoeff() );

        // error energy norm decreases monotonically
        double last = 1e300;
        for ( int k = 1; k <= 30; ++k )
        {
            Vector xk = Vector::Zero( n );
            cg( h.masked[0], b, xk, jacobi( h.diags[0] ), { 1e-30, 0, k } );
            const double e = energy( h.masked[0], xk - xd );
            CHECK( e <= last * ( 1 + 1e-12 ) );
            last = e;
        }
    }

    TEST_CASE( "FGMRES" )
    {
        const int       n = 30;
        Eigen::MatrixXd S = Eigen::MatrixXd::Random( n, n );
        Eigen::MatrixXd A = S * S.transpose() + n * Eigen::MatrixXd::Identity( n, n );
        const Vector    b = random_vector( n, 3 );

        const Eigen::MatrixXd Ainv = A.inverse();
        Vector                x    = Vector::Zero( n );
        auto                  r    = fgmres( matrix_op( A ), b, x, matrix_op( Ainv ), { 1e-10, 0, 100 } );
        CHECK( r.converged );
        CHECK( r.iterations == 1 );

        Eigen::MatrixXd N = A + 5.0 * Eigen::MatrixXd::Random( n, n );
        x                 = Vector::Zero( n );
        r                 = fgmres( matrix_op( N ), b, x, {}, { 1e-14, 0, 200 } );
        const Vector xd   = N.partialPivLu().solve( b );
        CHECK( r.converged );
        CHECK( ( x - xd ).norm() < 1e-10 * xd.norm() );
        for ( std::size_t k = 1; k < r.history.size(); ++k )
            CHECK( r.history[k] <= r.history[k - 1] * ( 1 + 1e-12 ) );

        // restarted run reaches the same answer
        x = Vector::Zero( n );
        r = fgmres( matrix_op( N ), b, x, {}, { 1e-12, 0, 2000 }, 5 );
        CHECK( r.converged );
        CHECK( ( x - xd ).norm() < 1e-9 * xd.norm() );

        // singular consistent system: graph Laplacian of a path, mean-zero right-hand side
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero( n, n );
        for ( int i = 0; i + 1 < n; ++i )
        {
            L( i, i ) += 1;
            L( i + 1, i + 1 ) += 1;
            L( i, i + 1 ) -= 1;
            L( i + 1, i ) -= 1;
        }
        Vector g = random_vector( n, 4 );
        constraints::zero_mean( g );
        x = Vector::Zero( n );
        int calls = 0;
        r = fgmres( matrix_op( L ), g, x, {}, { 1e-12, 0, 200 }, 50, []( Vector& v ) { constraints::zero_mean( v ); },
                    [&]( int, double ) { ++calls; } );
        CHECK( r.converged );
        CHECK( calls == r.iterations );
        CHECK( std::abs( x.mean() ) < 1e-14 );
        CHECK( ( L * x - g ).norm() < 1e-10 * g.norm() );
    }

    TEST_CASE( "power iteration" )
    {
        Vector dvals( 3 );
        dvals << 1, 2, 3;
        const LinearOperator D = [dvals]( const Vector& x, Vector& y ) { y = dvals.cwiseProduct( x ); };
        const double         l = estimate_spectral_bound( D, Vector::Ones( 3 ) );
        CHECK( std::abs( l - 3.0 ) < 0.03 );
        const LinearOperator D5 = [dvals]( const Vector& x, Vector& y ) { y = 5.0 * dvals.cwiseProduct( x ); };
        CHECK( estimate_spectral_bound( D5, Vector::Ones( 3 ) ) == doctest::Approx( 5 * l ).epsilon( 1e-12 ) );
        const LinearOperator zero = []( const Vector& x, Vector& y ) { y = Vector::Zero( x.size() ); };
        CHECK_THROWS_AS( estimate_spectral_bound( zero, Vector::Ones( 3 ) ), SolverFailure );

        // viscous block on level 2 against the dense generalized eigenproblem
        auto d = std::make_shared< Discretization >(
            std::make_shared< const geometry::RefinedMesh >( geometry::build_annulus_macro_mesh( 8, 2, 1.22, 2.22 ), 2 ) );
        const ViscousOperator A( *d, 2, field_from_function( *d, 2, 6, []( const Vec2& x ) { return std::exp( -x.norm() ); } ) );
        const auto            rows = constraints::BoundaryProjection( *d, 2 ).surface_nodes();
        std::vector< int >    vrows;
        const int             n2 = d->num_nodes( SpaceKind::P2, 2 );
        for ( int i : rows )
        {
            vrows.push_back( i );
            vrows.push_back( n2 + i );
        }
        const auto            op   = constraints::dirichlet_masked( A.linear_operator(), vrows );
        const Vector          diag = constraints::dirichlet_masked_diagonal( A.diagonal(), vrows );
        const Eigen::MatrixXd M    = dense_of( op, 2 * n2 );
        const Vector          s    = diag.cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd Ms   = s.asDiagonal() * M * s.asDiagonal();
        const double          lmax = Eigen::SelfAdjointEigenSolver< Eigen::MatrixXd >( 0.5 * ( Ms + Ms.transpose() ) ).eigenvalues().maxCoeff();
        const double          est  = estimate_spectral_bound( op, diag );
        CHECK( std::abs( est - lmax ) < 0.05 * lmax );
    }

    TEST_CASE( "Chebyshev smoother" )
    {
        const int n = 8;
        Vector    dvals( n );
        for ( int i = 0; i < n; ++i )
            dvals[i] = 1.0 + i;
        const LinearOperator D = [dvals]( const Vector& x, Vector& y ) { y = dvals.cwiseProduct( x ); };

        ChebyshevSmoother unset( D, Vector::Ones( n ), 2 );
        Vector            x0 = Vector::Zero( n );
        CHECK_THROWS_AS( unset.smooth( Vector::Ones( n ), x0, 1 ), ContractViolation );

        // single mode, degree one on [lambda, lambda]
        ChebyshevSmoother one( D, Vector::Ones( n ), 1 );
        one.set_interval( 3.0, 3.0 );
        Vector e = Vector::Zero( n );
        e[2]     = 1.0; // eigenvalue 3
        Vector x = e, b = Vector::Zero( n );
        one.smooth( b, x, 1 );
        CHECK( x.norm() < 1e-15 );

        // error propagation equals the scaled Chebyshev polynomial evaluated per eigenvalue
        for ( int degree : { 1, 2, 4 } )
        {
            ChebyshevSmoother c( D, Vector::Ones( n ), degree );
            c.set_interval( 0.8, 8.5 );
            Vector xe = Vector::Ones( n );
            c.smooth( Vector::Zero( n ), xe, 2 );
            const double theta = 0.5 * ( 8.5 + 0.8 ), delta = 0.5 * ( 8.5 - 0.8 );
            const auto   T = [&]( double t ) { return std::cosh( degree * std::acosh( std::abs( t ) ) ) * ( t < 0 && degree % 2 ? -1 : 1 ); };
            const auto   Tin = [&]( double t ) { return std::cos( degree * std::acos( t ) ); };
            for ( int i = 0; i < n; ++i )
            {
                const double z   = ( theta - dvals[i] ) / delta;
                const double p   = ( std::abs( z ) <= 1 ? Tin( z ) : T( z ) ) / T( theta / delta );
                CHECK( xe[i] == doctest::Approx( p * p ).epsilon( 1e-10 ) );
                CHECK( std::abs( xe[i] ) <= 1.0 / ( T( theta / delta ) * T( theta / delta ) ) + 1e-14 );
            }
        }

        ChebyshevSmoother c( D, Vector::Ones( n ), 3 );
        c.estimate();
        CHECK( c.upper() == doctest::Approx( 1.1 * n ).epsilon( 0.02 ) );
        CHECK( c.lower() == doctest::Approx( c.upper() / 10 ) );
        Vector z = Vector::Zero( n );
        c.smooth( Vector::Zero( n ), z, 3 );
        CHECK( z.isZero( 0.0 ) );
        const Vector bx = random_vector( n, 5 ), by = random_vector( n, 6 );
        Vector       sx = Vector::Zero( n ), sy = Vector::Zero( n ), sxy = Vector::Zero( n );
        c.smooth( bx, sx, 3 );
        c.smooth( by, sy, 3 );
        c.smooth( 2.0 * bx - 0.5 * by, sxy, 3 );
        CHECK( ( sxy - ( 2.0 * sx - 0.5 * sy ) ).cwiseAbs().maxCoeff() < 1e-12 );
    }

    TEST_CASE( "V-cycle contraction on Poisson is level independent" )
    {
        // 24 x 2 macro triangles are close to isotropic; the 8 x 2 desk mesh has aspect ratios
        // up to 3.5 and point smoothing alone is markedly weaker there
        std::vector< double > rates;
        for ( int lmax = 3; lmax <= 6; ++lmax )
        {
            PoissonHierarchy h( 0, lmax, 24 );
            Multigrid        mg( h.levels(), VCycleConfig{} );
            const int        n  = h.d->num_nodes( SpaceKind::P1, lmax );
            Vector           xs = random_vector( n, 10 + lmax );
            for ( int i : h.rows.back() )
                xs[i] = 0.0;
            Vector b;
            h.masked.back()( xs, b );
            Vector x  = Vector::Zero( n );
            double e0 = energy( h.masked.back(), x - xs ), rate = 0;
            for ( int k = 0; k < 6; ++k )
            {
                mg.vcycle( b, x );
                const double e1 = energy( h.masked.back(), x - xs );
                rate            = std::max( rate, e1 / e0 );
                e0              = e1;
            }
            MESSAGE( "level ", lmax, " contraction ", rate );
            CHECK( rate < 0.2 );
            rates.push_back( rate );

            Vector xf = xs;
            mg.vcycle( b, xf );
            CHECK( ( xf - xs ).cwiseAbs().maxCoeff() < 1e-13 * std::max( 1.0, xs.cwiseAbs().maxCoeff() ) );
        }
        const double hi = *std::max_element( rates.begin(), rates.end() );
        const double lo = *std::min_element( rates.begin(), rates.end() );
        CHECK_MESSAGE( hi <= 1.5 * lo, "contraction grows with depth: ", lo, " -> ", hi );
    }

    TEST_CASE( "single-level hierarchy is the coarse solve" )
    {
        PoissonHierarchy h( 2, 2 );
        VCycleConfig     cfg;
        cfg.coarse.relative = 1e-12;
        Multigrid    mg( h.levels(), cfg );
        const int    n = h.d->num_nodes( SpaceKind::P1, 2 );
        Vector       b = random_vector( n, 20 );
        for ( int i : h.rows[0] )
            b[i] = 0;
        Vector x1 = Vector::Zero( n ), x2 = Vector::Zero( n );
        mg.vcycle( b, x1 );
        coarse_solve( h.masked[0], h.diags[0], b, x2, cfg.coarse, h.levels()[0].projection );
        CHECK( ( x1 - x2 ).cwiseAbs().maxCoeff() == 0.0 );
        const Eigen::MatrixXd M = dense_of( h.masked[0], n );
        CHECK( ( x1 - M.ldlt().solve( b ) ).cwiseAbs().maxCoeff() < 1e-9 );
        Vector z = Vector::Zero( n );
        coarse_solve( h.masked[0], h.diags[0], Vector::Zero( n ), z, cfg.coarse );
        CHECK( z.isZero( 0.0 ) );
        CHECK( VCycleConfig{}.coarse.relative == 1e-2 );
    }
}
