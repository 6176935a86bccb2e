#include "tala/app/runs.hpp"

#include "tala/app/output.hpp"
#include "tala/parallel.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

namespace tala::app {

using fem::SpaceKind;

namespace {

using clock = std::chrono::steady_clock;

double since( clock::time_point t0 )
{
    return std::chrono::duration< double >( clock::now() - t0 ).count();
}

std::string join( const std::string& dir, const std::string& file )
{
    return ( std::filesystem::path( dir ) / file ).string();
}

struct BudgetExceeded
{};

} // namespace

std::shared_ptr< fem::Discretization > make_discretization( int n_tangential, int n_radial, double r_cmb, double r_surface,
                                                            int l_max, bool blending )
{
    auto macro = geometry::build_annulus_macro_mesh( n_tangential, n_radial, r_cmb, r_surface );
    return std::make_shared< fem::Discretization >( std::make_shared< const geometry::RefinedMesh >( std::move( macro ), l_max, blending ) );
}

double loglog_slope( const std::vector< double >& x, const std::vector< double >& y )
{
    require( x.size() == y.size() && x.size() >= 2, "slope fit needs at least two points" );
    const double n  = static_cast< double >( x.size() );
    double       sx = 0, sy = 0, sxx = 0, sxy = 0;
    for ( std::size_t i = 0; i < x.size(); ++i )
    {
        const double a = std::log( x[i] ), b = std::log( y[i] );
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return ( n * sxy - sx * sy ) / ( n * sxx - sx * sx );
}

double manufactured_error( const fem::Discretization& d, int level, const ConvergenceConfig& cc, double k, int steps )
{
    require( steps >= 1, "need at least one step" );
    ManufacturedSolution ms;
    ms.k             = k;
    const double tau = ( cc.t_end - cc.t_start ) / steps;

    const auto T_at = [&]( double t ) { return d.interpolate( SpaceKind::P2, level, [&]( const Vec2& x ) { return ms.temperature( t, x ); } ); };
    const auto u_at = [&]( double t ) { return d.interpolate_vector( level, [&]( const Vec2& x ) { return ms.velocity( t, x ); } ); };

    energy::EnergyParams e;
    e.k                     = k;
    e.H                     = 1.0;
    e.Di                    = 1.0;
    e.gravity               = []( const Vec2& x ) { return Vec2( -x / x.norm() ); };
    e.viscosity             = [ms]( const Vec2& x, double T ) { return ms.viscosity( x, T ); };
    e.include_lhs_advection = false;
    e.shear_cutoff          = false;
    e.linearized_shear      = cc.linearized_shear;

    // history before the initial time from the exact solution
    Vector T_nm1 = T_at( cc.t_start - tau ), T_n = T_at( cc.t_start );
    Vector u_nm1 = u_at( cc.t_start - tau ), u_n = u_at( cc.t_start );
    for ( int i = 0; i < steps; ++i )
    {
        const double          t_new = cc.t_start + ( i + 1 ) * tau;
        energy::DiffusionInputs in;
        in.s          = energy::bdf2_coefficients( tau, tau );
        in.tau        = tau;
        in.u_star     = cc.exact_velocity ? u_at( t_new ) : energy::extrapolate( u_n, u_nm1, tau, tau );
        in.T_star     = energy::extrapolate( T_n, T_nm1, tau, tau );
        in.T_hat_n    = energy::mmoc_advect( d, level, T_n, { &in.u_star, &u_n, tau } );
        in.T_hat_nm1  = energy::mmoc_history( d, level, T_nm1, { &in.u_star, &u_n, tau }, { &u_n, &u_nm1, tau } );
        in.T_boundary = T_at( t_new );
        in.extra_source = [&ms, t_new]( const Vec2& x ) { return ms.forcing( t_new, x ); };
        const auto r  = energy::solve_diffusion_step( d, level, e, in, cc.tol_T, 1000, cc.relative );

        T_nm1 = std::move( T_n );
        T_n   = r.T;
        u_nm1 = std::move( u_n );
        u_n   = u_at( t_new );
    }
    const Vector          err = T_n - T_at( cc.t_end );
    const fem::MassOperator M( d, level, SpaceKind::P2, fem::constant_field( d, level, 6, 1.0 ) );
    return std::sqrt( std::max( 0.0, dot( err, M( err ) ) ) );
}

ConvergenceFit fit_convergence( double k, int level, const std::vector< ConvergenceRow >& rows )
{
    std::vector< double > tau, err;
    double                logc = 0.0;
    for ( const auto& r : rows )
    {
        if ( r.k == k && r.level == level )
        {
            tau.push_back( r.tau );
            err.push_back( r.error );
            logc += std::log( r.error ) - 2.0 * std::log( r.tau );
        }
    }
    ConvergenceFit f;
    f.k     = k;
    f.level = level;
    if ( tau.size() >= 2 )
    {
        f.slope    = loglog_slope( tau, err );
        f.constant = std::exp( logc / static_cast< double >( tau.size() ) );
    }
    return f;
}

ConvergenceReport run_convergence_test( const RunConfig& cfg, const std::string& out_dir )
{
    cfg.validate();
    ensure_directory( out_dir );
    const auto&       cc = cfg.convergence;
    const auto        t0 = clock::now();
    ConvergenceReport rep;
    CsvWriter         csv( join( out_dir, "convergence.csv" ), { "k", "level", "steps", "tau", "error", "seconds" } );
    for ( int level : cc.levels )
    {
        const auto d = make_discretization( cfg.mesh.n_tangential, cfg.mesh.n_radial, cc.r_cmb, cc.r_surface, level + 1, cfg.mesh.blending );
        for ( double k : cc.k )
        {
            for ( int n : cc.steps )
            {
                if ( cc.wall_budget > 0 && since( t0 ) > cc.wall_budget )
                {
                    rep.budget_exhausted = true;
                    break;
                }
                const auto     ts = clock::now();
                ConvergenceRow row{ k, level, n, ( cc.t_end - cc.t_start ) / n, 0.0, 0.0 };
                row.error   = manufactured_error( *d, level, cc, k, n );
                row.seconds = since( ts );
                rep.rows.push_back( row );
                csv.row( { CsvWriter::cell( k ), CsvWriter::cell( level ), CsvWriter::cell( n ), CsvWriter::cell( row.tau ),
                           CsvWriter::cell( row.error ), CsvWriter::cell( row.seconds ) } );
            }
            rep.fits.push_back( fit_convergence( k, level, rep.rows ) );
        }
    }
    CsvWriter fit( join( out_dir, "convergence_fit.csv" ), { "k", "level", "slope", "constant" } );
    for ( const auto& f : rep.fits )
        fit.row( { CsvWriter::cell( f.k ), CsvWriter::cell( f.level ), CsvWriter::cell( f.slope ), CsvWriter::cell( f.constant ) } );
    return rep;
}

PhysicalProblem make_physical_problem( const RunConfig& cfg, int level )
{
    PhysicalProblem p;
    p.physics        = physics::make_physical_params( cfg.reference );
    p.level          = level;
    p.discretization = make_discretization( cfg.mesh.n_tangential, cfg.mesh.n_radial, p.physics.r_cmb, p.physics.r_surface, level + 1,
                                            cfg.mesh.blending );
    const auto& d    = *p.discretization;
    p.temperature    = energy::initial_temperature( d, level, p.physics, cfg.seed, cfg.model.initial_noise );

    const int l_eta = std::min( cfg.mesh.l_eta, level );
    std::shared_ptr< const fem::ExpSurrogate > sur;
    if ( cfg.model.use_surrogate )
    {
        const auto& ph = p.physics;
        sur            = std::make_shared< const fem::ExpSurrogate >( -ph.E_A * p.temperature.maxCoeff() - 1e-3,
                                                            -ph.E_A * p.temperature.minCoeff() + ph.V_A * ( ph.r_surface - ph.r_cmb ) + 1e-3 );
    }
    auto vf = std::make_shared< fem::ViscosityField >( d, p.physics.viscosity_law(), p.temperature, level, l_eta, sur );

    const auto phys        = p.physics;
    p.setup.discretization = p.discretization;
    p.setup.l_min          = std::min( cfg.mesh.l_min, l_eta );
    p.setup.l_max          = level;
    p.setup.viscosity      = stokes::viscosity_provider( vf, cfg.model.use_surrogate );
    p.setup.grad_ln_rho    = [phys]( const Vec2& x ) { return phys.grad_ln_density( x ); };
    p.rhs                  = stokes::build_stokes_rhs( d, level, p.temperature, p.physics );
    constraints::BoundaryConditionSet bc;
    p.u_int = constraints::surface_velocity_interpolant( d, level, bc );
    return p;
}

std::vector< BenchCase > bench_cases( const RunConfig& cfg )
{
    std::vector< BenchCase > out;
    for ( auto uz : { stokes::UzawaKind::Inexact, stokes::UzawaKind::AdjointInexact, stokes::UzawaKind::Symmetric } )
    {
        stokes::SolverConfig base = cfg.solver;
        base.uzawa                = uz;
        base.tol_A                = stokes::variant_tol_A( uz );
        const std::string pre     = std::string( stokes::to_string( uz ) ) + "/";

        auto mass  = base;
        mass.schur = stokes::SchurKind::Mass;
        out.push_back( { pre + "mass", mass } );

        auto w  = base;
        w.schur = stokes::SchurKind::WeightedBFBT;
        w.omega = cfg.bench.omega_wbfbt;
        w.a_l = w.a_r = 1.0;
        out.push_back( { pre + "wbfbt", w } );

        auto wa = w;
        wa.a_r  = 10.0;
        wa.a_l  = 1.0;
        out.push_back( { pre + "wbfbt-asym", wa } );

        auto v  = base;
        v.schur = stokes::SchurKind::VCycleBFBT;
        out.push_back( { pre + "vcycle-bfbt", v } );
    }
    return out;
}

int BenchResult::iterations_to( double relative ) const
{
    for ( const auto& r : history )
        if ( r.relative <= relative )
            return r.iteration;
    return -1;
}

BenchResult run_bench_case( const PhysicalProblem& problem, const BenchCase& c, const krylov::StoppingRule& stop, double budget )
{
    BenchResult res;
    res.label = c.label;
    res.uzawa = stokes::to_string( c.solver.uzawa );
    res.schur = stokes::to_string( c.solver.schur );
    const auto t0 = clock::now();
    try
    {
        const stokes::StokesSolver s( problem.setup, c.solver );
        const auto r = s.solve( problem.rhs.f, problem.rhs.g, problem.u_int, stop, [&]( const stokes::IterationRecord& rec ) {
            res.history.push_back( rec );
            if ( budget > 0 && since( t0 ) > budget )
                throw BudgetExceeded{};
        } );
        res.converged  = r.report.converged;
        res.iterations = r.report.iterations;
    }
    catch ( const krylov::SolverFailure& )
    {
        res.converged = false;
    }
    catch ( const BudgetExceeded& )
    {
        res.converged = false;
    }
    if ( !res.converged )
        res.iterations = res.history.empty() ? 0 : res.history.back().iteration;
    res.seconds = since( t0 );
    return res;
}

std::vector< BenchResult > run_solver_bench( const RunConfig& cfg, const std::string& out_dir )
{
    cfg.validate();
    ensure_directory( out_dir );
    const auto t0      = clock::now();
    const auto problem = make_physical_problem( cfg, cfg.bench.level );
    CsvWriter  hist( join( out_dir, "bench_history.csv" ),
                     { "preconditioner", "schur", "label", "iteration", "relative", "absolute", "seconds", "a_block", "schur_inner" } );
    CsvWriter  sum( join( out_dir, "bench_summary.csv" ),
                    { "label", "converged", "iterations", "iterations_1e-3", "iterations_1e-6", "seconds" } );
    std::vector< BenchResult > out;
    for ( const auto& c : bench_cases( cfg ) )
    {
        if ( cfg.bench.wall_budget > 0 && since( t0 ) > cfg.bench.wall_budget )
            break;
        auto r = run_bench_case( problem, c, { 0.0, cfg.bench.absolute, cfg.bench.max_iterations }, cfg.bench.run_budget );
        for ( const auto& h : r.history )
            hist.row( { r.uzawa, r.schur, r.label, CsvWriter::cell( h.iteration ), CsvWriter::cell( h.relative ), CsvWriter::cell( h.absolute ),
                        CsvWriter::cell( h.seconds ), CsvWriter::cell( h.a_block ), CsvWriter::cell( h.schur ) } );
        sum.row( { r.label, r.converged ? "1" : "0", CsvWriter::cell( r.iterations ), CsvWriter::cell( r.iterations_to( 1e-3 ) ),
                   CsvWriter::cell( r.iterations_to( 1e-6 ) ), CsvWriter::cell( r.seconds ) } );
        std::cout << r.label << ": " << ( r.converged ? "converged" : "not converged" ) << " after " << r.iterations << " iterations, "
                  << r.seconds << " s\n";
        out.push_back( std::move( r ) );
    }
    return out;
}

energy::SimulationContext simulation_context( const RunConfig& cfg, std::shared_ptr< const fem::Discretization > d )
{
    const auto              phys = physics::make_physical_params( cfg.reference );
    energy::TimestepControl control;
    control.C_CFL   = cfg.time.C_CFL;
    control.tau_max = cfg.time.tau_max;
    auto ctx = energy::make_context( std::move( d ), cfg.mesh.l_max, cfg.mesh.l_min, cfg.mesh.l_eta, phys, cfg.solver, control );
    ctx.energy.include_lhs_advection = cfg.model.include_lhs_advection;
    ctx.energy.shear_cutoff          = cfg.model.shear_cutoff;
    ctx.energy.linearized_shear      = cfg.model.linearized_shear;
    ctx.use_surrogate                = cfg.model.use_surrogate;
    ctx.buoyancy                     = cfg.model.buoyancy;
    return ctx;
}

double rms_velocity( const fem::Discretization& d, int level, const Vector& u )
{
    const int               n = d.num_nodes( SpaceKind::P2, level );
    const fem::MassOperator M( d, level, SpaceKind::P2, fem::constant_field( d, level, 6, 1.0 ) );
    const Vector            ux = u.head( n ), uy = u.tail( n );
    const double            s  = dot( ux, M( ux ) ) + dot( uy, M( uy ) );
    return std::sqrt( std::max( 0.0, s ) / fem::domain_area( d, level ) );
}

SimulationReport run_simulation( const RunConfig& cfg, const SimulationOptions& opts )
{
    cfg.validate();
    const std::string out = cfg.output.dir;
    ensure_directory( out );
    const auto  phys  = physics::make_physical_params( cfg.reference );
    const int   level = cfg.mesh.l_max;
    const auto  d     = make_discretization( cfg.mesh.n_tangential, cfg.mesh.n_radial, phys.r_cmb, phys.r_surface, level + 1, cfg.mesh.blending );
    const auto  ctx   = simulation_context( cfg, d );
    const auto  hash  = d->mesh().descriptor_hash();
    const std::string ckpt = opts.checkpoint.empty() ? join( out, "checkpoint.bin" ) : opts.checkpoint;

    energy::TimeState state = opts.resume.empty()
                                  ? energy::initial_state( ctx, energy::initial_temperature( *d, level, phys, cfg.seed, cfg.model.initial_noise ) )
                                  : energy::read_checkpoint( opts.resume, hash );
    require( state.T.size() == d->num_nodes( SpaceKind::P2, level ), "checkpoint fields do not match the configured level" );

    CsvWriter series( join( out, "time_series.csv" ),
                      { "step", "t", "tau", "T_min", "T_max", "u_rms", "energy_iterations", "stokes_iterations", "a_block", "schur", "seconds" },
                      !opts.resume.empty() );

    const Vector Ts = d->interpolate( SpaceKind::P2, level, [&]( const Vec2& x ) { return phys.reference_temperature( x ); } );
    const auto   write_fields = [&]() {
        const auto& pos = d->node_grid( SpaceKind::P2, level ).physical;
        Vector      eta( state.T.size() );
        for ( Eigen::Index i = 0; i < eta.size(); ++i )
            eta[i] = phys.viscosity( pos[static_cast< std::size_t >( i )], state.T[i] );
        char name[64];
        std::snprintf( name, sizeof( name ), "fields_%06ld.vtk", state.step );
        write_vtk( join( out, name ), *d, level,
                   { { "T", state.T }, { "T_d", state.T - Ts }, { "p", p1_at_p2_nodes( *d, level, state.p ) }, { "eta", eta } },
                   { { "u", state.u } } );
    };
    if ( opts.resume.empty() && cfg.output.vtk_every > 0 )
        write_fields();

    const auto       t0 = clock::now();
    SimulationReport rep;
    while ( state.t < cfg.time.T_end * ( 1.0 - 1e-12 ) && state.step < cfg.time.max_steps )
    {
        if ( cfg.time.wall_budget > 0 && since( t0 ) > cfg.time.wall_budget )
        {
            rep.message = "wall budget reached";
            break;
        }
        energy::StepReport s;
        const auto         ts = clock::now();
        try
        {
            s = energy::advance_step( ctx, state );
        }
        catch ( const krylov::SolverFailure& e )
        {
            energy::write_checkpoint( ckpt, state, hash );
            rep.failed  = true;
            rep.message = e.what();
            break;
        }
        series.row( { CsvWriter::cell( state.step ), CsvWriter::cell( state.t ), CsvWriter::cell( s.tau ), CsvWriter::cell( state.T.minCoeff() ),
                      CsvWriter::cell( state.T.maxCoeff() ), CsvWriter::cell( rms_velocity( *d, level, state.u ) ),
                      CsvWriter::cell( s.energy_iterations ), CsvWriter::cell( s.stokes_iterations ), CsvWriter::cell( s.a_block ),
                      CsvWriter::cell( s.schur ), CsvWriter::cell( since( ts ) ) } );
        if ( cfg.output.vtk_every > 0 && state.step % cfg.output.vtk_every == 0 )
            write_fields();
        if ( cfg.output.checkpoint_every > 0 && state.step % cfg.output.checkpoint_every == 0 )
            energy::write_checkpoint( ckpt, state, hash );
    }
    if ( !rep.failed )
        energy::write_checkpoint( ckpt, state, hash );
    rep.steps = state.step;
    rep.t     = state.t;
    return rep;
}

} // namespace tala::app
