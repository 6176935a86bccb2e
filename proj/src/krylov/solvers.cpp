#include "tala/krylov/solvers.hpp"

#include "tala/parallel.hpp"

#include <cmath>
#include <random>

namespace tala::krylov {

void StoppingRule::validate() const
{
    require( relative >= 0.0 && absolute >= 0.0, "tolerances must be nonnegative" );
    require( relative > 0.0 || absolute > 0.0, "at least one tolerance must be positive" );
    require( max_iterations >= 0, "iteration budget must be nonnegative" );
}

namespace {

bool reached( const StoppingRule& stop, double r, double r0 )
{
    return r <= stop.relative * r0 || r <= stop.absolute;
}

void apply_or_copy( const LinearOperator& m, const Vector& x, Vector& y )
{
    if ( m )
        m( x, y );
    else
        y = x;
}

} // namespace

SolveReport cg( const LinearOperator& op, const Vector& rhs, Vector& x, const LinearOperator& precond, const StoppingRule& stop,
                const Projection& projection )
{
    stop.validate();
    SolveReport rep;
    if ( x.size() != rhs.size() )
        x = Vector::Zero( rhs.size() );
    if ( projection )
        projection( x );

    Vector r, Ap;
    op( x, Ap );
    r = rhs - Ap;
    if ( projection )
        projection( r );
    rep.initial_residual = norm( r );
    rep.final_residual   = rep.initial_residual;
    rep.history.push_back( rep.initial_residual );
    if ( rep.initial_residual == 0.0 || reached( stop, rep.initial_residual, rep.initial_residual ) )
    {
        rep.converged = true;
        return rep;
    }

    Vector z;
    apply_or_copy( precond, r, z );
    if ( projection )
        projection( z );
    Vector p  = z;
    double rz = dot( r, z );
    Vector r_old;
    for ( int k = 1; k <= stop.max_iterations; ++k )
    {
        op( p, Ap );
        const double pAp = dot( p, Ap );
        if ( !( pAp > 0.0 ) )
            break;
        const double alpha = rz / pAp;
        x += alpha * p;
        r_old = r;
        r -= alpha * Ap;
        if ( projection )
            projection( r );
        rep.iterations     = k;
        rep.final_residual = norm( r );
        rep.history.push_back( rep.final_residual );
        if ( reached( stop, rep.final_residual, rep.initial_residual ) )
        {
            rep.converged = true;
            break;
        }
        apply_or_copy( precond, r, z );
        if ( projection )
            projection( z );
        const double beta = ( dot( z, r ) - dot( z, r_old ) ) / rz;
        rz                = dot( r, z );
        p                 = z + beta * p;
    }
    return rep;
}

SolveReport fgmres( const LinearOperator& op, const Vector& rhs, Vector& x, const LinearOperator& precond, const StoppingRule& stop,
                    int restart, const Projection& projection, const IterationCallback& callback )
{
    stop.validate();
    require( restart >= 1, "restart length must be positive" );
    SolveReport rep;
    if ( x.size() != rhs.size() )
        x = Vector::Zero( rhs.size() );
    if ( projection )
        projection( x );

    const int             m = restart;
    std::vector< Vector > V( m + 1 ), Z( m );
    Eigen::MatrixXd       H( m + 1, m );
    Vector                cs( m ), sn( m ), g( m + 1 );
    Vector                r, w;
    bool                  first = true;

    while ( true )
    {
        op( x, w );
        r = rhs - w;
        if ( projection )
            projection( r );
        const double beta = norm( r );
        if ( first )
        {
            rep.initial_residual = beta;
            rep.history.push_back( beta );
            first = false;
        }
        rep.final_residual = beta;
        if ( beta == 0.0 || reached( stop, beta, rep.initial_residual ) )
        {
            rep.converged = true;
            return rep;
        }
        if ( rep.iterations >= stop.max_iterations )
            return rep;

        V[0] = r / beta;
        g.setZero();
        g[0] = beta;
        H.setZero();
        int  j    = 0;
        bool done = false;
        for ( ; j < m && rep.iterations < stop.max_iterations; ++j )
        {
            apply_or_copy( precond, V[j], Z[j] );
            if ( projection )
                projection( Z[j] );
            op( Z[j], w );
            if ( projection )
                projection( w );
            for ( int i = 0; i <= j; ++i )
            {
                H( i, j ) = dot( w, V[i] );
                w -= H( i, j ) * V[i];
            }
            H( j + 1, j ) = norm( w );
            for ( int i = 0; i < j; ++i )
            {
                const double t = cs[i] * H( i, j ) + sn[i] * H( i + 1, j );
                H( i + 1, j )  = -sn[i] * H( i, j ) + cs[i] * H( i + 1, j );
                H( i, j )      = t;
            }
            const double a = H( j, j ), b = H( j + 1, j );
            const double h = std::hypot( a, b );
            cs[j]          = h == 0.0 ? 1.0 : a / h;
            sn[j]          = h == 0.0 ? 0.0 : b / h;
            H( j, j )      = h;
            H( j + 1, j )  = 0.0;
            g[j + 1]       = -sn[j] * g[j];
            g[j]           = cs[j] * g[j];

            ++rep.iterations;
            const double res = std::abs( g[j + 1] );
            rep.history.push_back( res );
            if ( callback )
                callback( rep.iterations, res );
            const bool breakdown = b <= 1e-14 * h;
            if ( !breakdown )
                V[j + 1] = w / b;
            if ( reached( stop, res, rep.initial_residual ) || breakdown )
            {
                ++j;
                done = true;
                break;
            }
        }

        // x += Z y with H y = g on the leading j x j block
        Vector y = Vector::Zero( j );
        for ( int i = j - 1; i >= 0; --i )
        {
            double s = g[i];
            for ( int k = i + 1; k < j; ++k )
                s -= H( i, k ) * y[k];
            y[i] = H( i, i ) == 0.0 ? 0.0 : s / H( i, i );
        }
        for ( int i = 0; i < j; ++i )
            x += y[i] * Z[i];
        if ( projection )
            projection( x );

        if ( done || rep.iterations >= stop.max_iterations )
        {
            op( x, w );
            r = rhs - w;
            if ( projection )
                projection( r );
            rep.final_residual = norm( r );
            rep.converged      = reached( stop, rep.final_residual, rep.initial_residual );
            if ( rep.converged || rep.iterations >= stop.max_iterations )
                return rep;
        }
    }
}

double estimate_spectral_bound( const LinearOperator& op, const Vector& diag, int iterations, std::uint64_t seed, const Projection& projection )
{
    require( iterations >= 1, "power iteration needs at least one step" );
    const Vector                             inv = diag.cwiseInverse();
    std::mt19937_64                          rng( seed );
    std::uniform_real_distribution< double > u( -1.0, 1.0 );
    Vector                                   v( diag.size() );
    for ( auto& c : v )
        c = u( rng );
    if ( projection )
        projection( v );
    v /= norm( v );
    Vector w;
    for ( int k = 0; k < iterations; ++k )
    {
        op( v, w );
        w = inv.cwiseProduct( w );
        if ( projection )
            projection( w );
        const double nw = norm( w );
        if ( !( nw > 0.0 ) )
            throw SolverFailure( "power iteration hit the null space of the operator" );
        v = w / nw;
    }
    op( v, w );
    const double num = dot( v, w );
    const double den = dot( v, diag.cwiseProduct( v ) );
    if ( !( num > 0.0 ) )
        throw SolverFailure( "power iteration found no positive spectrum" );
    return num / den;
}

ChebyshevSmoother::ChebyshevSmoother( LinearOperator op, Vector diag, int degree, Projection projection )
: op_( std::move( op ) )
, inv_diag_( diag.cwiseInverse() )
, degree_( degree )
, projection_( std::move( projection ) )
{
    require( degree >= 1, "Chebyshev degree must be at least one" );
    require( ( diag.array() > 0.0 ).all(), "Chebyshev smoother needs a positive diagonal" );
}

void ChebyshevSmoother::estimate( int iterations, std::uint64_t seed )
{
    const double lambda = estimate_spectral_bound( op_, inv_diag_.cwiseInverse(), iterations, seed, projection_ );
    const double hi     = 1.1 * lambda;
    set_interval( hi / 10.0, hi );
}

void ChebyshevSmoother::set_interval( double lo, double hi )
{
    require( lo > 0.0 && lo <= hi, "Chebyshev interval must satisfy 0 < lo <= hi" );
    require( lo < hi || degree_ == 1, "degenerate Chebyshev interval only for degree one" );
    lo_ = lo;
    hi_ = hi;
}

void ChebyshevSmoother::smooth( const Vector& b, Vector& x, int steps ) const
{
    require( estimated(), "Chebyshev smoother used before its spectrum was estimated" );
    if ( x.size() != b.size() )
        x = Vector::Zero( b.size() );
    const double theta = 0.5 * ( hi_ + lo_ );
    const double delta = 0.5 * ( hi_ - lo_ );
    Vector       r, d, Ax;
    for ( int s = 0; s < steps; ++s )
    {
        op_( x, Ax );
        r = inv_diag_.cwiseProduct( b - Ax );
        d = r / theta;
        x += d;
        if ( projection_ )
            projection_( x );
        if ( degree_ == 1 )
            continue;
        const double sigma   = theta / delta;
        double       rho_old = 1.0 / sigma;
        for ( int k = 1; k < degree_; ++k )
        {
            op_( x, Ax );
            r                = inv_diag_.cwiseProduct( b - Ax );
            const double rho = 1.0 / ( 2.0 * sigma - rho_old );
            d                = ( rho * rho_old ) * d + ( 2.0 * rho / delta ) * r;
            x += d;
            if ( projection_ )
                projection_( x );
            rho_old = rho;
        }
    }
}

LinearOperator jacobi( const Vector& diag )
{
    const Vector inv = diag.cwiseInverse();
    return [inv]( const Vector& x, Vector& y ) { y = inv.cwiseProduct( x ); };
}

SolveReport coarse_solve( const LinearOperator& op, const Vector& diag, const Vector& rhs, Vector& x, const StoppingRule& stop,
                          const Projection& projection )
{
    SolveReport rep = cg( op, rhs, x, jacobi( diag ), stop, projection );
    if ( !rep.converged )
        throw SolverFailure( "coarse grid CG did not reach its tolerance" );
    return rep;
}

Multigrid::Multigrid( std::vector< MultigridLevel > levels, VCycleConfig config )
: levels_( std::move( levels ) )
, config_( config )
{
    require( !levels_.empty(), "multigrid needs at least one level" );
    smoothers_.resize( levels_.size() );
    for ( std::size_t l = 1; l < levels_.size(); ++l )
    {
        require( static_cast< bool >( levels_[l].prolongate_from_coarser ) && static_cast< bool >( levels_[l].restrict_to_coarser ),
                 "every level above the coarsest needs transfers" );
        smoothers_[l] = ChebyshevSmoother( levels_[l].op, levels_[l].diagonal, config_.degree, levels_[l].projection );
        smoothers_[l].estimate( config_.power_iterations, config_.seed );
    }
}

void Multigrid::vcycle( const Vector& b, Vector& x ) const
{
    cycle( num_levels() - 1, b, x );
}

LinearOperator Multigrid::preconditioner() const
{
    return [this]( const Vector& b, Vector& y ) {
        y = Vector::Zero( b.size() );
        vcycle( b, y );
    };
}

void Multigrid::cycle( int level, const Vector& b, Vector& x ) const
{
    const auto& L = levels_[level];
    if ( x.size() != b.size() )
        x = Vector::Zero( b.size() );
    if ( level == 0 )
    {
        const auto rep = coarse_solve( L.op, L.diagonal, b, x, config_.coarse, L.projection );
        coarse_iterations_ += rep.iterations;
        return;
    }
    const auto& S = smoothers_[level];
    S.smooth( b, x, config_.smoothing_steps );
    Vector Ax, rc, ec, ef;
    L.op( x, Ax );
    L.restrict_to_coarser( b - Ax, rc );
    if ( levels_[level - 1].projection )
        levels_[level - 1].projection( rc );
    ec = Vector::Zero( rc.size() );
    cycle( level - 1, rc, ec );
    L.prolongate_from_coarser( ec, ef );
    x += ef;
    if ( L.projection )
        L.projection( x );
    S.smooth( b, x, config_.smoothing_steps );
}

} // namespace tala::krylov
