#include "tala/energy/time_stepping.hpp"

#include "tala/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

namespace tala::energy {

using fem::SpaceKind;

namespace {

double seconds_since( std::chrono::steady_clock::time_point t0 )
{
    return std::chrono::duration< double >( std::chrono::steady_clock::now() - t0 ).count();
}

double max_nodal_speed( const Vector& u )
{
    const Eigen::Index n = u.size() / 2;
    double             m = 0.0;
    for ( Eigen::Index i = 0; i < n; ++i )
    {
        m = std::max( m, std::hypot( u[i], u[n + i] ) );
    }
    return m;
}

struct Shell
{
    double inner;
    double outer;
};

Shell shell_of( const fem::Discretization& d )
{
    return { d.mesh().macro().r_cmb, d.mesh().macro().r_surface };
}

// element containing x after the radial clamp; on polygonal meshes the point is pulled
// further towards the mid radius until it is found
geometry::ElementLocation locate_inside( const fem::Discretization& d, int level, const Vec2& x, const Shell& sh, double eps )
{
    const Vec2 y   = clamp_to_shell( x, sh.inner, sh.outer, eps );
    auto       loc = d.mesh().locate( level, y );
    if ( loc.element >= 0 )
    {
        return loc;
    }
    const Vec2 mid = y * ( 0.5 * ( sh.inner + sh.outer ) / y.norm() );
    Vec2       in = mid, out = y;
    for ( int i = 0; i < 60; ++i )
    {
        const Vec2 m = 0.5 * ( in + out );
        ( d.mesh().locate( level, m ).element >= 0 ? in : out ) = m;
    }
    loc = d.mesh().locate( level, in );
    require( loc.element >= 0, "cannot place a departure point inside the mesh" );
    return loc;
}

// velocity at time t^{n+1} - s of the interval, located once
Vec2 interval_velocity( const fem::Discretization& d, int level, const VelocityInterval& v, const Vec2& x, double s,
                        const Shell& sh, double eps )
{
    const auto   loc = locate_inside( d, level, x, sh, eps );
    const Vec2   a   = evaluate_vector_in_element( d, level, *v.u_new, loc.element, loc.local );
    const Vec2   b   = evaluate_vector_in_element( d, level, *v.u_old, loc.element, loc.local );
    const double w   = v.tau > 0.0 ? s / v.tau : 0.0;
    return ( 1.0 - w ) * a + w * b;
}

void check_interval( const fem::Discretization& d, int level, const VelocityInterval& v )
{
    const Eigen::Index n = 2 * d.num_nodes( SpaceKind::P2Vector, level );
    require( v.u_new != nullptr && v.u_old != nullptr, "velocity interval needs both fields" );
    require( v.u_new->size() == n && v.u_old->size() == n, "velocity fields must live on the temperature level" );
    require( v.tau >= 0.0, "negative interval length" );
}

} // namespace

BDF2Coefficients bdf2_coefficients( double tau_new, double tau_old )
{
    require( tau_new > 0.0 && tau_old > 0.0, "BDF2 needs positive step sizes" );
    BDF2Coefficients c;
    c.s_new = ( 2.0 * tau_new + tau_old ) / ( tau_new + tau_old );
    c.s_n   = ( tau_new + tau_old ) / tau_old;
    c.s_nm1 = tau_new * tau_new / ( tau_old * ( tau_new + tau_old ) );
    return c;
}

BDF2Coefficients implicit_euler_coefficients()
{
    return { 1.0, 1.0, 0.0 };
}

Vector extrapolate( const Vector& f_n, const Vector& f_nm1, double tau_new, double tau_old )
{
    require( tau_old > 0.0, "extrapolation needs a positive previous step" );
    require( f_n.size() == f_nm1.size(), "extrapolation needs fields of one space" );
    return f_n + ( f_n - f_nm1 ) * ( tau_new / tau_old );
}

Vec2 clamp_to_shell( const Vec2& x, double r_inner, double r_outer, double eps )
{
    const double r = x.norm();
    if ( r == 0.0 )
    {
        return Vec2( r_inner + eps, 0.0 );
    }
    if ( r >= r_inner - eps && r <= r_outer + eps )
    {
        return x;
    }
    const double rc = r < r_inner ? r_inner + eps : r_outer - eps;
    return x * ( rc / r );
}

int mmoc_substeps( const fem::Discretization& d, int level, const VelocityInterval& v, const MMOCConfig& cfg )
{
    check_interval( d, level, v );
    const double speed = std::max( max_nodal_speed( *v.u_new ), max_nodal_speed( *v.u_old ) );
    const double h     = geometry::min_element_diameter( d.mesh(), level );
    const double n     = std::ceil( v.tau * speed / h );
    return static_cast< int >( std::clamp( n, 1.0, static_cast< double >( cfg.max_substeps ) ) );
}

Vec2 trace_back( const fem::Discretization& d, int level, const Vec2& x, const VelocityInterval& v, int substeps,
                 const MMOCConfig& cfg )
{
    const Shell  sh  = shell_of( d );
    const double eps = cfg.clamp_epsilon;
    const double h   = v.tau / substeps;
    Vec2         X   = x;
    for ( int i = 0; i < substeps; ++i )
    {
        // backwards in time: s counts from t^{n+1}
        const double s  = i * h;
        const Vec2   k1 = interval_velocity( d, level, v, X, s, sh, eps );
        const Vec2   k2 = interval_velocity( d, level, v, X - 0.5 * h * k1, s + 0.5 * h, sh, eps );
        const Vec2   k3 = interval_velocity( d, level, v, X - 0.5 * h * k2, s + 0.5 * h, sh, eps );
        const Vec2   k4 = interval_velocity( d, level, v, X - h * k3, s + h, sh, eps );
        X               = X - ( h / 6.0 ) * ( k1 + 2.0 * k2 + 2.0 * k3 + k4 );
        X               = clamp_to_shell( X, sh.inner, sh.outer, eps );
    }
    return X;
}

namespace {

Vector evaluate_at_departures( const fem::Discretization& d, int level, const Vector& T,
                               const std::function< Vec2( const Vec2& ) >& departure )
{
    const auto& nodes = d.node_grid( SpaceKind::P2, level ).physical;
    const Shell sh    = shell_of( d );
    const int   n     = static_cast< int >( nodes.size() );
    Vector      out( n );
#pragma omp parallel for schedule( static )
    for ( int i = 0; i < n; ++i )
    {
        const Vec2 X   = departure( nodes[static_cast< std::size_t >( i )] );
        const auto loc = locate_inside( d, level, X, sh, 1e-12 );
        out[i]         = fem::evaluate_in_element( d, SpaceKind::P2, level, T, loc.element, loc.local );
    }
    return out;
}

} // namespace

Vector mmoc_advect( const fem::Discretization& d, int level, const Vector& T, const VelocityInterval& v, const MMOCConfig& cfg )
{
    require( T.size() == d.num_nodes( SpaceKind::P2, level ), "temperature must be a P2 field on the level" );
    const int ns = mmoc_substeps( d, level, v, cfg );
    return evaluate_at_departures( d, level, T, [&]( const Vec2& x ) { return trace_back( d, level, x, v, ns, cfg ); } );
}

Vector mmoc_history( const fem::Discretization& d, int level, const Vector& T, const VelocityInterval& first,
                     const VelocityInterval& second, const MMOCConfig& cfg )
{
    require( T.size() == d.num_nodes( SpaceKind::P2, level ), "temperature must be a P2 field on the level" );
    const int n1 = mmoc_substeps( d, level, first, cfg );
    const int n2 = mmoc_substeps( d, level, second, cfg );
    return evaluate_at_departures( d, level, T, [&]( const Vec2& x ) {
        return trace_back( d, level, trace_back( d, level, x, first, n1, cfg ), second, n2, cfg );
    } );
}

void TimestepControl::validate() const
{
    require( C_CFL > 0.0 && tau_max > 0.0, "C_CFL and tau_max must be positive" );
    require( ratio_min > 0.0 && ratio_min <= 1.0 && ratio_max >= 1.0, "step ratio window must contain 1" );
}

double cfl_timestep( const fem::Discretization& d, int level, const Vector& u, double C_CFL, double tau_max )
{
    const int n = d.num_nodes( SpaceKind::P2Vector, level );
    require( u.size() == 2 * n, "velocity must be a P2 vector field on the level" );
    const auto& lm   = d.mesh().level( level );
    double      rate = 0.0;
    for ( int e = 0; e < lm.num_elements(); ++e )
    {
        double s = 0.0;
        for ( int k : lm.p2_nodes[e] )
        {
            s = std::max( s, std::hypot( u[k], u[n + k] ) );
        }
        rate = std::max( rate, s / geometry::element_diameter( d.mesh(), level, e ) );
    }
    if ( rate == 0.0 )
    {
        return tau_max;
    }
    return C_CFL / rate;
}

double select_timestep( const TimestepControl& c, const fem::Discretization& d, int level, const Vector& u, double tau_prev )
{
    c.validate();
    double tau = std::min( cfl_timestep( d, level, u, c.C_CFL, c.tau_max ), c.tau_max );
    if ( tau_prev > 0.0 )
    {
        tau = std::clamp( tau, c.ratio_min * tau_prev, c.ratio_max * tau_prev );
    }
    return tau;
}

EnergyParams energy_params( const physics::PhysicalParams& p )
{
    EnergyParams e;
    e.Pe          = p.Pe;
    e.Ra          = p.Ra;
    e.Di          = p.Di;
    e.cp          = p.cp;
    e.k           = p.k;
    e.alpha       = p.alpha;
    e.H           = p.H;
    e.density     = [p]( const Vec2& x ) { return p.density( x ); };
    e.grad_ln_rho = [p]( const Vec2& x ) { return p.grad_ln_density( x ); };
    e.gravity     = [p]( const Vec2& x ) { return p.gravity( x ); };
    e.viscosity   = [p]( const Vec2& x, double T ) { return p.viscosity( x, T ); };
    return e;
}

ShearLinearization linearized_shear_heating( const fem::Discretization& d, int level, const EnergyParams& e, const Vector& u_star,
                                             const Vector& T_star )
{
    ShearLinearization out;
    out.source = fem::strain_rate_squared( d, level, 6, u_star );
    out.rate   = out.source;
    std::fill( out.rate.values.begin(), out.rate.values.end(), 0.0 );
    if ( !e.viscosity )
    {
        std::fill( out.source.values.begin(), out.source.values.end(), 0.0 );
        return out;
    }
    const auto   Tq  = fem::field_from_nodal( d, level, 6, SpaceKind::P2, T_star );
    const auto&  geo = d.geometry( level, 6 );
    const auto&  lm  = d.mesh().level( level );
    const double c   = e.Pe * e.Di / e.Ra / e.cp;
    const int    nq  = out.source.num_points;
    for ( int el = 0; el < lm.num_elements(); ++el )
    {
        const bool cut = e.shear_cutoff && lm.touches_surface[el];
        for ( int q = 0; q < nq; ++q )
        {
            const std::size_t i = static_cast< std::size_t >( el ) * nq + q;
            if ( cut )
            {
                out.source.values[i] = 0.0;
                continue;
            }
            const Vec2&  x   = geo.x[i];
            const double T   = Tq.values[i];
            const double rho = e.density ? e.density( x ) : 1.0;
            const double w   = c / rho * 2.0 * out.source.values[i];
            out.source.values[i] = w * e.viscosity( x, T );
            if ( e.linearized_shear )
            {
                const double h    = 1e-6 * std::max( 1.0, std::abs( T ) );
                const double deta = ( e.viscosity( x, T + h ) - e.viscosity( x, T - h ) ) / ( 2.0 * h );
                out.rate.values[i] = std::max( 0.0, -w * deta );
            }
        }
    }
    return out;
}

fem::QuadratureField shear_heating( const fem::Discretization& d, int level, const EnergyParams& e, const Vector& u_star,
                                    const Vector& T_star )
{
    EnergyParams explicit_only      = e;
    explicit_only.linearized_shear = false;
    return linearized_shear_heating( d, level, explicit_only, u_star, T_star ).source;
}

std::vector< int > temperature_boundary_nodes( const fem::Discretization& d, int level )
{
    auto rows = d.mesh().nodes_with_tag( level, geometry::BoundaryTag::Surface );
    auto cmb  = d.mesh().nodes_with_tag( level, geometry::BoundaryTag::CMB );
    rows.insert( rows.end(), cmb.begin(), cmb.end() );
    std::sort( rows.begin(), rows.end() );
    return rows;
}

DiffusionResult solve_diffusion_step( const fem::Discretization& d, int level, const EnergyParams& e, const DiffusionInputs& in,
                                      double tol_T, int max_iterations, double relative )
{
    const int n = d.num_nodes( SpaceKind::P2, level );
    require( in.tau > 0.0, "temperature step needs a positive step size" );
    for ( const Vector* v : { &in.T_star, &in.T_hat_n, &in.T_hat_nm1, &in.T_boundary } )
    {
        require( v->size() == n, "temperature inputs must be P2 fields on the level" );
    }
    require( in.u_star.size() == 2 * n, "extrapolated velocity must be a P2 vector field on the level" );

    const auto& geo   = d.geometry( level, 6 );
    const auto  uq    = fem::vector_field_from_nodal( d, level, 6, in.u_star );
    const double tau  = in.tau;
    const std::size_t nq = geo.x.size();

    fem::QuadratureField m, k, sym_m;
    fem::VectorQuadratureField b;
    m.level = k.level = b.level = level;
    m.degree = k.degree = b.degree = 6;
    m.num_points = k.num_points = b.num_points = uq.num_points;
    m.values.resize( nq );
    k.values.resize( nq );
    b.values.resize( nq );
    const auto shear = linearized_shear_heating( d, level, e, in.u_star, in.T_star );
    sym_m            = shear.rate;
    for ( std::size_t i = 0; i < nq; ++i )
    {
        const Vec2&  x    = geo.x[i];
        const Vec2&  u    = uq.values[i];
        const double rho  = e.density ? e.density( x ) : 1.0;
        const double diff = e.k / ( e.Pe * e.cp * rho );
        const double ug   = e.gravity ? u.dot( e.gravity( x ) ) : 0.0;
        m.values[i]       = in.s.s_new - tau * ( e.Di * e.alpha / e.cp ) * ug + tau * shear.rate.values[i];
        sym_m.values[i]   = in.s.s_new + tau * shear.rate.values[i];
        k.values[i]       = tau * diff;
        Vec2 adv          = e.include_lhs_advection ? Vec2( tau * u ) : Vec2( Vec2::Zero() );
        if ( e.grad_ln_rho )
        {
            adv -= tau * diff * e.grad_ln_rho( x );
        }
        b.values[i] = adv;
    }
    fem::VectorQuadratureField zero_b = b;
    std::fill( zero_b.values.begin(), zero_b.values.end(), Vec2::Zero() );

    const fem::TransportOperator L( d, level, m, k, b );
    const fem::TransportOperator S( d, level, sym_m, k, zero_b );
    const fem::MassOperator      M( d, level, SpaceKind::P2, fem::constant_field( d, level, 6, 1.0 ) );

    fem::QuadratureField src = shear.source;
    const auto           Tq  = fem::field_from_nodal( d, level, 6, SpaceKind::P2, in.T_star );
    const double         Hc  = e.H / e.cp;
    const bool           ext = static_cast< bool >( in.extra_source );
    for ( std::size_t i = 0; i < nq; ++i )
    {
        src.values[i] = tau * ( src.values[i] + shear.rate.values[i] * Tq.values[i] + Hc + ( ext ? in.extra_source( geo.x[i] ) : 0.0 ) );
    }

    const auto rows = temperature_boundary_nodes( d, level );
    Vector     Tbc  = Vector::Zero( n );
    for ( int r : rows )
    {
        Tbc[r] = in.T_boundary[r];
    }

    Vector rhs = M( in.s.s_n * in.T_hat_n - in.s.s_nm1 * in.T_hat_nm1 ) + fem::load_vector( d, level, SpaceKind::P2, src );
    rhs -= L( Tbc );
    for ( int r : rows )
    {
        rhs[r] = 0.0;
    }

    const LinearOperator Lm   = constraints::dirichlet_masked( L.linear_operator(), rows );
    const LinearOperator Sm   = constraints::dirichlet_masked( S.linear_operator(), rows );
    const LinearOperator Sjac = krylov::jacobi( constraints::dirichlet_masked_diagonal( S.diagonal(), rows ) );

    DiffusionResult      out;
    const LinearOperator precond = [&]( const Vector& r, Vector& z ) {
        z.setZero( r.size() );
        const auto rep = krylov::cg( Sm, r, z, Sjac, { 1e-3, 0.0, 200 } );
        out.inner += rep.iterations;
    };

    // initial guess from the history value
    Vector delta = in.T_hat_n - Tbc;
    for ( int r : rows )
    {
        delta[r] = 0.0;
    }
    out.report = krylov::fgmres( Lm, rhs, delta, precond, { relative, tol_T, max_iterations }, 50 );
    if ( !out.report.converged )
    {
        throw krylov::SolverFailure( "temperature solve did not reach tol_T (residual " + std::to_string( out.report.final_residual ) + " from "
                                     + std::to_string( out.report.initial_residual ) + " after " + std::to_string( out.report.iterations )
                                     + " iterations)" );
    }
    out.T = Tbc + delta;
    return out;
}

Vector initial_temperature( const fem::Discretization& d, int level, const physics::PhysicalParams& p, std::uint64_t seed,
                            double relative_noise )
{
    Vector T = d.interpolate( SpaceKind::P2, level, [&]( const Vec2& x ) { return p.reference_temperature( x ); } );
    std::mt19937_64                          rng( seed );
    std::uniform_real_distribution< double > noise( -relative_noise, relative_noise );
    for ( Eigen::Index i = 0; i < T.size(); ++i )
    {
        T[i] *= 1.0 + noise( rng );
    }
    for ( int i : d.mesh().nodes_with_tag( level, geometry::BoundaryTag::Surface ) )
    {
        T[i] = p.T_surface;
    }
    for ( int i : d.mesh().nodes_with_tag( level, geometry::BoundaryTag::CMB ) )
    {
        T[i] = p.T_cmb;
    }
    return T;
}

SimulationContext make_context( std::shared_ptr< const fem::Discretization > d, int level, int l_min, int l_eta,
                                const physics::PhysicalParams& p, const stokes::SolverConfig& solver,
                                const TimestepControl& control )
{
    require( d != nullptr, "simulation needs a discretisation" );
    require( 0 <= l_min && l_min <= l_eta && l_eta <= level, "levels must satisfy l_min <= l_eta <= l_max" );
    require( level + 1 <= d->max_level(), "mesh hierarchy too shallow for P2 on the simulation level" );
    solver.validate();
    control.validate();
    SimulationContext c;
    c.discretization               = std::move( d );
    c.level                        = level;
    c.l_min                        = l_min;
    c.l_eta                        = l_eta;
    c.physics                      = p;
    c.energy                       = energy_params( p );
    c.solver                       = solver;
    c.control                      = control;
    c.boundary.surface_temperature = p.T_surface;
    c.boundary.cmb_temperature     = p.T_cmb;
    return c;
}

TimeState initial_state( const SimulationContext& ctx, const Vector& T0 )
{
    const auto& d = *ctx.discretization;
    require( T0.size() == d.num_nodes( SpaceKind::P2, ctx.level ), "initial temperature must be a P2 field on the level" );
    TimeState s;
    s.T      = T0;
    s.T_prev = T0;
    s.u      = Vector::Zero( 2 * d.num_nodes( SpaceKind::P2Vector, ctx.level ) );
    s.u_prev = s.u;
    s.p      = Vector::Zero( d.num_nodes( SpaceKind::P1, ctx.level ) );
    return s;
}

namespace {

std::shared_ptr< const fem::ExpSurrogate > surrogate_for( const SimulationContext& ctx, const Vector& T )
{
    const auto& p    = ctx.physics;
    const double lo  = -p.E_A * T.maxCoeff();
    const double hi  = -p.E_A * T.minCoeff() + p.V_A * ( p.r_surface - p.r_cmb );
    const double pad = 1e-3 * ( 1.0 + hi - lo );
    return std::make_shared< const fem::ExpSurrogate >( lo - pad, hi + pad );
}

} // namespace

StepReport advance_step( const SimulationContext& ctx, TimeState& state )
{
    const auto& d     = *ctx.discretization;
    const int   level = ctx.level;
    StepReport  rep;

    const bool first = state.step == 0;
    const double tau = select_timestep( ctx.control, d, level, state.u, first ? 0.0 : state.tau );
    rep.tau          = tau;

    DiffusionInputs in;
    in.tau        = tau;
    in.T_boundary = constraints::temperature_boundary_values( d, level, ctx.boundary );

    auto t0 = std::chrono::steady_clock::now();
    if ( first )
    {
        in.s         = implicit_euler_coefficients();
        in.u_star    = state.u;
        in.T_star    = state.T;
        in.T_hat_n   = mmoc_advect( d, level, state.T, { &in.u_star, &state.u, tau }, ctx.mmoc );
        in.T_hat_nm1 = Vector::Zero( state.T.size() );
    }
    else
    {
        in.s         = bdf2_coefficients( tau, state.tau );
        in.u_star    = extrapolate( state.u, state.u_prev, tau, state.tau );
        in.T_star    = extrapolate( state.T, state.T_prev, tau, state.tau );
        in.T_hat_n   = mmoc_advect( d, level, state.T, { &in.u_star, &state.u, tau }, ctx.mmoc );
        in.T_hat_nm1 = mmoc_history( d, level, state.T_prev, { &in.u_star, &state.u, tau }, { &state.u, &state.u_prev, state.tau },
                                     ctx.mmoc );
    }
    rep.mmoc_seconds = seconds_since( t0 );

    t0                    = std::chrono::steady_clock::now();
    const auto heat       = solve_diffusion_step( d, level, ctx.energy, in, ctx.solver.tol_T );
    rep.energy_iterations = heat.report.iterations;
    rep.energy_seconds    = seconds_since( t0 );

    t0 = std::chrono::steady_clock::now();
    auto vf = std::make_shared< fem::ViscosityField >( d, ctx.physics.viscosity_law(), heat.T, level, ctx.l_eta,
                                                       ctx.use_surrogate ? surrogate_for( ctx, heat.T ) : nullptr );
    stokes::StokesSetup setup;
    setup.discretization = ctx.discretization;
    setup.l_min          = ctx.l_min;
    setup.l_max          = level;
    setup.viscosity      = stokes::viscosity_provider( vf, ctx.use_surrogate );
    if ( !first )
    {
        const auto p      = ctx.physics;
        setup.grad_ln_rho = [p]( const Vec2& x ) { return p.grad_ln_density( x ); };
    }
    const stokes::StokesSolver solver( setup, ctx.solver );
    auto                       rhs = stokes::build_stokes_rhs( d, level, heat.T, ctx.physics );
    if ( !ctx.buoyancy )
    {
        rhs.f.setZero();
    }
    const Vector u_int = constraints::surface_velocity_interpolant( d, level, ctx.boundary );
    Vector       guess( state.u.size() + state.p.size() );
    guess << state.u, state.p;
    const auto flow       = solver.solve( rhs.f, rhs.g, u_int, solver.default_stopping_rule(), {}, &guess );
    rep.stokes_iterations = flow.report.iterations;
    rep.a_block           = flow.inner.a_block;
    rep.schur             = flow.inner.schur;
    rep.stokes_seconds    = seconds_since( t0 );

    state.T_prev = state.T;
    state.T      = heat.T;
    state.u_prev = state.u;
    state.u      = flow.u;
    state.p      = flow.p;
    state.t += tau;
    state.tau = tau;
    ++state.step;
    return rep;
}

namespace {

constexpr char magic[8] = { 'T', 'A', 'L', 'A', 'C', 'K', 'P', 'T' };

template < typename T >
void put( std::ofstream& f, const T& v )
{
    f.write( reinterpret_cast< const char* >( &v ), sizeof( T ) );
}

template < typename T >
T get( std::ifstream& f )
{
    T v{};
    f.read( reinterpret_cast< char* >( &v ), sizeof( T ) );
    if ( !f )
    {
        throw CheckpointError( "truncated checkpoint" );
    }
    return v;
}

void put_array( std::ofstream& f, const Vector& v )
{
    put< std::uint64_t >( f, static_cast< std::uint64_t >( v.size() ) );
    f.write( reinterpret_cast< const char* >( v.data() ), static_cast< std::streamsize >( v.size() * sizeof( double ) ) );
}

Vector get_array( std::ifstream& f )
{
    const auto n = get< std::uint64_t >( f );
    if ( n > ( std::uint64_t( 1 ) << 34 ) )
    {
        throw CheckpointError( "corrupt checkpoint array length" );
    }
    Vector v( static_cast< Eigen::Index >( n ) );
    f.read( reinterpret_cast< char* >( v.data() ), static_cast< std::streamsize >( n * sizeof( double ) ) );
    if ( !f )
    {
        throw CheckpointError( "truncated checkpoint" );
    }
    return v;
}

} // namespace

void write_checkpoint( const std::string& path, const TimeState& s, std::uint64_t mesh_hash )
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f( tmp, std::ios::binary | std::ios::trunc );
        if ( !f )
        {
            throw CheckpointError( "cannot open checkpoint for writing: " + path );
        }
        f.write( magic, sizeof( magic ) );
        put< std::uint32_t >( f, checkpoint_version );
        put< std::uint64_t >( f, mesh_hash );
        put< std::int64_t >( f, s.step );
        put< double >( f, s.t );
        put< double >( f, s.tau );
        for ( const Vector* v : { &s.T, &s.T_prev, &s.u, &s.u_prev, &s.p } )
        {
            put_array( f, *v );
        }
        if ( !f )
        {
            throw CheckpointError( "failed writing checkpoint: " + path );
        }
    }
    if ( std::rename( tmp.c_str(), path.c_str() ) != 0 )
    {
        throw CheckpointError( "cannot move checkpoint into place: " + path );
    }
}

TimeState read_checkpoint( const std::string& path, std::uint64_t mesh_hash )
{
    std::ifstream f( path, std::ios::binary );
    if ( !f )
    {
        throw CheckpointError( "cannot open checkpoint: " + path );
    }
    char m[8];
    f.read( m, sizeof( m ) );
    if ( !f || !std::equal( m, m + 8, magic ) )
    {
        throw CheckpointError( "not a checkpoint file: " + path );
    }
    const auto version = get< std::uint32_t >( f );
    if ( version != checkpoint_version )
    {
        throw CheckpointError( "checkpoint version " + std::to_string( version ) + " is not supported (expected " +
                               std::to_string( checkpoint_version ) + ")" );
    }
    if ( get< std::uint64_t >( f ) != mesh_hash )
    {
        throw CheckpointError( "checkpoint was written for a different mesh" );
    }
    TimeState s;
    s.step   = get< std::int64_t >( f );
    s.t      = get< double >( f );
    s.tau    = get< double >( f );
    s.T      = get_array( f );
    s.T_prev = get_array( f );
    s.u      = get_array( f );
    s.u_prev = get_array( f );
    s.p      = get_array( f );
    if ( s.T.size() != s.T_prev.size() || s.u.size() != s.u_prev.size() || s.u.size() != 2 * s.T.size() )
    {
        throw CheckpointError( "inconsistent checkpoint field sizes" );
    }
    return s;
}

} // namespace tala::energy
